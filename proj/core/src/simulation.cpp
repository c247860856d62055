#include "umbilic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "umbilic/linalg.hpp"

namespace umbilic {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat, the embedded error estimate weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr long kMaxAdaptiveSteps = 50'000'000;

enum class StepStatus { ok, diverged, nonfinite };

class Recorder {
 public:
  Recorder(const ClosedLoopSystem& system, const SolverConfig& config, Trajectory& out)
      : system_(system), config_(config), out_(out) {}

  void record(double t, const Eigen::VectorXd& x) {
    out_.times.push_back(t);
    out_.states.push_back(x);
    out_.output.push_back(x[system_.output_index()]);
  }

  // Classifies a freshly computed state; records it when it crosses the
  // divergence norm.
  StepStatus check(double t, const Eigen::VectorXd& x) {
    const double n = max_norm(x);
    if (!std::isfinite(n)) {
      out_.diverged = true;
      return StepStatus::nonfinite;
    }
    if (n >= config_.divergence_norm) {
      record(t, x);
      out_.diverged = true;
      return StepStatus::diverged;
    }
    return StepStatus::ok;
  }

 private:
  const ClosedLoopSystem& system_;
  const SolverConfig& config_;
  Trajectory& out_;
};

std::vector<double> sample_times(const SolverConfig& config) {
  const double dt = config.sample_interval();
  const auto n = static_cast<long>(std::ceil(config.t_end / dt - 1e-9));
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i < n; ++i) ts.push_back(static_cast<double>(i) * dt);
  ts.push_back(config.t_end);
  return ts;
}

Eigen::VectorXd rk4_step(const ClosedLoopSystem& s, double t, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = s.rhs(x, t);
  const Eigen::VectorXd k2 = s.rhs(x + 0.5 * h * k1, t + 0.5 * h);
  const Eigen::VectorXd k3 = s.rhs(x + 0.5 * h * k2, t + 0.5 * h);
  const Eigen::VectorXd k4 = s.rhs(x + h * k3, t + h);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void integrate_rk4(const ClosedLoopSystem& system, Eigen::VectorXd x, const SolverConfig& config,
                   Trajectory& out) {
  Recorder rec(system, config, out);
  const auto ts = sample_times(config);
  rec.record(ts.front(), x);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double t0 = ts[i - 1];
    const double h = (ts[i] - t0) / config.record_every;
    for (int m = 0; m < config.record_every; ++m) {
      const double t = t0 + m * h;
      x = rk4_step(system, t, x, h);
      const double t_new = (m + 1 == config.record_every) ? ts[i] : t + h;
      if (rec.check(t_new, x) != StepStatus::ok) return;
    }
    rec.record(ts[i], x);
  }
}

void integrate_rk45(const ClosedLoopSystem& system, Eigen::VectorXd x, const SolverConfig& config,
                    Trajectory& out) {
  Recorder rec(system, config, out);
  const auto ts = sample_times(config);
  rec.record(ts.front(), x);

  double t = 0.0;
  double h = 0.01 * config.sample_interval();
  Eigen::VectorXd k1 = system.rhs(x, t);
  long steps = 0;

  for (std::size_t i = 1; i < ts.size(); ++i) {
    const double target = ts[i];
    while (t < target) {
      if (++steps > kMaxAdaptiveSteps) {
        out.diverged = true;
        return;
      }
      const bool last = h >= target - t;
      const double hs = last ? target - t : h;
      const Eigen::VectorXd k2 = system.rhs(x + hs * (a21 * k1), t + c2 * hs);
      const Eigen::VectorXd k3 = system.rhs(x + hs * (a31 * k1 + a32 * k2), t + c3 * hs);
      const Eigen::VectorXd k4 =
          system.rhs(x + hs * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * hs);
      const Eigen::VectorXd k5 =
          system.rhs(x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * hs);
      const Eigen::VectorXd k6 =
          system.rhs(x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + hs);
      const Eigen::VectorXd x_new =
          x + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Eigen::VectorXd k7 = system.rhs(x_new, t + hs);
      const Eigen::VectorXd err =
          hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err_norm = 0.0;
      bool finite = x_new.allFinite() && k7.allFinite();
      for (Eigen::Index c = 0; finite && c < x.size(); ++c) {
        const double scale =
            config.abs_tol + config.rel_tol * std::max(std::abs(x[c]), std::abs(x_new[c]));
        err_norm = std::max(err_norm, std::abs(err[c]) / scale);
      }
      if (!finite || !std::isfinite(err_norm)) err_norm = 1e10;

      if (err_norm <= 1.0) {
        t = last ? target : t + hs;
        x = x_new;
        k1 = k7;
        if (rec.check(t, x) != StepStatus::ok) return;
        const double factor =
            err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        // A step shortened to hit a sample time says nothing about the scale.
        if (!last) h = hs * factor;
        else h = std::max(h, hs * factor);
      } else {
        h = hs * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
        if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
          out.diverged = true;
          return;
        }
      }
    }
    rec.record(target, x);
  }
}

}  // namespace

std::string_view to_string(SolverMethod m) noexcept {
  return m == SolverMethod::rk4_fixed ? "rk4_fixed" : "rk45_adaptive";
}

SolverMethod solver_method_from_string(std::string_view name) {
  if (name == "rk4_fixed") return SolverMethod::rk4_fixed;
  if (name == "rk45_adaptive") return SolverMethod::rk45_adaptive;
  throw std::invalid_argument("unknown solver method '" + std::string(name) + "'");
}

std::string_view to_string(VerdictKind k) noexcept {
  switch (k) {
    case VerdictKind::converged:
      return "converged";
    case VerdictKind::diverged:
      return "diverged";
    case VerdictKind::undecided:
      return "undecided";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("solver step must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("solver t_end must be positive");
  if (!(divergence_norm > 0.0)) throw std::invalid_argument("divergence_norm must be positive");
  if (!(rel_tol > 0.0 && rel_tol <= 0.1)) throw std::invalid_argument("rel_tol must be in (0, 0.1]");
  if (!(abs_tol > 0.0 && abs_tol <= 0.1)) throw std::invalid_argument("abs_tol must be in (0, 0.1]");
  if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");
}

Trajectory integrate(const ClosedLoopSystem& system, const Eigen::VectorXd& x0,
                     const SolverConfig& config) {
  config.validate();
  if (x0.size() != system.dimension()) {
    throw std::invalid_argument("initial state has dimension " + std::to_string(x0.size()) +
                                ", system needs " + std::to_string(system.dimension()));
  }
  Trajectory out;
  if (config.method == SolverMethod::rk4_fixed) {
    integrate_rk4(system, x0, config, out);
  } else {
    integrate_rk45(system, x0, config, out);
  }
  return out;
}

Verdict detect_convergence(const Trajectory& trajectory, const std::vector<Equilibrium>& candidates,
                           double tol, double window) {
  if (!(tol > 0.0)) throw std::invalid_argument("convergence tol must be positive");
  Verdict v;
  if (trajectory.size() == 0) return v;
  v.final_state = trajectory.states.back();
  if (trajectory.diverged) {
    v.kind = VerdictKind::diverged;
    return v;
  }
  const double duration = trajectory.duration();
  if (!(window > 0.0) || window > duration * (1.0 + 1e-12)) {
    throw std::invalid_argument("convergence window must lie in (0, trajectory duration]");
  }
  const double t_from = trajectory.times.back() - window;
  const std::size_t n = trajectory.size();
  const auto first_in_window = static_cast<std::size_t>(
      std::lower_bound(trajectory.times.begin(), trajectory.times.end(),
                       t_from - 1e-12 * std::max(1.0, std::abs(t_from))) -
      trajectory.times.begin());

  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& target = candidates[c].state;
    if (target.size() != v.final_state.size()) continue;
    bool inside = true;
    for (std::size_t i = first_in_window; i < n && inside; ++i) {
      inside = max_norm(trajectory.states[i] - target) <= tol;
    }
    if (!inside) continue;
    std::size_t settle = first_in_window;
    while (settle > 0 && max_norm(trajectory.states[settle - 1] - target) <= tol) --settle;
    v.kind = VerdictKind::converged;
    v.equilibrium_index = c;
    v.settle_time = trajectory.times[settle];
    return v;
  }
  return v;
}

}  // namespace umbilic
