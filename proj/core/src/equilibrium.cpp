#include "umbilic/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "umbilic/linalg.hpp"

namespace umbilic {

namespace {

constexpr int kNewtonMaxIterations = 100;
constexpr int kMaxHalvings = 40;
constexpr double kNewtonStepTol = 1e-12;
constexpr double kMergeRadius = 1e-6;

Equilibrium labelled(const ClosedLoopSystem& system, Eigen::VectorXd state, std::string id) {
  auto eq = classify_equilibrium(system, state, 1e-6);
  eq.provenance = Provenance::closed_form;
  eq.formula_id = std::move(id);
  return eq;
}

double nonzero(double v, const char* what) {
  if (v == 0.0) throw std::invalid_argument(std::string(what) + " must be nonzero");
  return v;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::stable:
      return "stable";
    case Stability::unstable:
      return "unstable";
    case Stability::nonhyperbolic:
      return "nonhyperbolic";
  }
  return "unknown";
}

std::string_view to_string(Provenance p) noexcept {
  return p == Provenance::closed_form ? "closed_form" : "numeric";
}

Stability classify_spectrum(const std::vector<std::complex<double>>& eigenvalues,
                            double eps) noexcept {
  bool all_negative = true;
  for (const auto& l : eigenvalues) {
    if (l.real() > eps) return Stability::unstable;
    if (!(l.real() < -eps)) all_negative = false;
  }
  return all_negative ? Stability::stable : Stability::nonhyperbolic;
}

double Equilibrium::slowest_rate() const noexcept {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues) r = std::min(r, std::abs(l.real()));
  return r;
}

double Equilibrium::leading_real_part() const noexcept {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues) r = std::max(r, l.real());
  return r;
}

Equilibrium classify_equilibrium(const ClosedLoopSystem& system, const Eigen::VectorXd& state,
                                 double residual_tol) {
  const double residual = max_norm(system.rhs(state));
  if (!(residual <= residual_tol)) {
    throw NotAnEquilibriumError("rhs residual " + std::to_string(residual) +
                                " exceeds tolerance " + std::to_string(residual_tol));
  }
  Equilibrium eq;
  eq.state = state;
  eq.eigenvalues = eigenvalues(system.jacobian(state));
  eq.classification = classify_spectrum(eq.eigenvalues);
  eq.provenance = Provenance::numeric;
  return eq;
}

std::vector<Equilibrium> closed_form_equilibria(const ClosedLoopSystem& system) {
  if (system.input_level() != 0.0) {
    throw UnsupportedError("closed-form equilibria assume zero input; use the numeric finder");
  }
  const auto gains = deployed_gains(system);
  if (!gains) {
    throw UnsupportedError("closed-form equilibria need the deployed control law for " +
                           std::string(to_string(system.family())));
  }
  const auto& p = system.params();
  const auto [g1, g2, g3] = *gains;
  auto vec = [](std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
  };

  std::vector<Equilibrium> out;
  switch (system.family()) {
    case PlantFamily::integrators: {
      const double k1 = nonzero(g1, "k1");
      out.push_back(labelled(system, vec({0.0, 0.0}), "eq3"));
      out.push_back(labelled(system, vec({g3 / k1, 0.0}), "eq4"));
      break;
    }
    case PlantFamily::ccf: {
      const double k1 = nonzero(g1, "k1");
      out.push_back(labelled(system, vec({0.0, 0.0}), "eq8"));
      out.push_back(labelled(system, vec({(g3 - p.get("a2")) / k1, 0.0}), "eq9"));
      break;
    }
    case PlantFamily::jordan: {
      const double ka = nonzero(g1, "ka");
      const double x1 = (p.get("rho1") + g2) / ka;
      const double x2 = (p.get("rho2") + g3) / ka;
      out.push_back(labelled(system, vec({0.0, 0.0}), "eq15"));
      out.push_back(labelled(system, vec({0.0, x2}), "eq16"));
      out.push_back(labelled(system, vec({x1, 0.0}), "eq17"));
      out.push_back(labelled(system, vec({x1, x2}), "eq18"));
      break;
    }
    case PlantFamily::epidemic: {
      const double k1 = nonzero(g1, "k1");
      out.push_back(labelled(system, vec({0.0, 0.0, 0.0}), "eq26"));
      out.push_back(labelled(system, vec({0.0, 0.0, g2 / k1}), "eq27"));
      break;
    }
    case PlantFamily::aircraft: {
      const double k1 = nonzero(g1, "k1");
      out.push_back(labelled(system, vec({0.0, 0.0, 0.0}), "eq33"));
      out.push_back(labelled(system, vec({g2 / k1, 0.0, g2 / k1}), "eq34"));
      break;
    }
    case PlantFamily::submarine:
      throw UnsupportedError("no closed-form equilibria for the submarine family");
  }
  return out;
}

std::optional<Eigen::VectorXd> newton_solve(const ClosedLoopSystem& system, Eigen::VectorXd x,
                                            double tol) {
  Eigen::VectorXd f = system.rhs(x);
  double res = max_norm(f);
  if (!std::isfinite(res)) return std::nullopt;
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    const Eigen::MatrixXd j = system.jacobian(x);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd step = lu.solve(f);
    if (!step.allFinite()) return std::nullopt;

    double lambda = 1.0;
    Eigen::VectorXd trial = x - step;
    Eigen::VectorXd f_trial = system.rhs(trial);
    double res_trial = max_norm(f_trial);
    int halvings = 0;
    while (!(res_trial <= res) && halvings < kMaxHalvings) {
      lambda *= 0.5;
      trial = x - lambda * step;
      f_trial = system.rhs(trial);
      res_trial = max_norm(f_trial);
      ++halvings;
    }
    if (!(res_trial <= res)) return std::nullopt;

    const double step_norm = lambda * max_norm(step);
    x = std::move(trial);
    f = std::move(f_trial);
    res = res_trial;
    if (step_norm <= kNewtonStepTol * (1.0 + max_norm(x)) || res == 0.0) break;
  }
  if (!(res <= tol)) return std::nullopt;
  return x;
}

std::vector<Equilibrium> find_equilibria_numeric(const ClosedLoopSystem& system,
                                                 const std::vector<Interval>& box, int grid_n,
                                                 double tol) {
  const int n = system.dimension();
  if (grid_n < 2) throw std::invalid_argument("grid_n must be at least 2");
  if (static_cast<int>(box.size()) != n) {
    throw std::invalid_argument("search box has " + std::to_string(box.size()) +
                                " intervals for a " + std::to_string(n) + "-dimensional system");
  }
  for (const auto& iv : box) {
    if (!(iv.hi > iv.lo)) throw std::invalid_argument("search box interval is degenerate");
  }

  std::vector<std::pair<Eigen::VectorXd, double>> roots;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd start(n);
  while (true) {
    for (int d = 0; d < n; ++d) {
      const auto& iv = box[static_cast<std::size_t>(d)];
      start[d] = iv.lo + (iv.hi - iv.lo) * idx[static_cast<std::size_t>(d)] / (grid_n - 1);
    }
    if (auto root = newton_solve(system, start, tol)) {
      const double res = max_norm(system.rhs(*root));
      auto dup = std::find_if(roots.begin(), roots.end(), [&](const auto& r) {
        return max_norm(r.first - *root) <= kMergeRadius;
      });
      if (dup == roots.end()) {
        roots.emplace_back(*root, res);
      } else if (res < dup->second) {
        *dup = {*root, res};
      }
    }
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == grid_n) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }

  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
  std::vector<Equilibrium> out;
  out.reserve(roots.size());
  for (const auto& [x, res] : roots) {
    out.push_back(classify_equilibrium(system, x, std::max(tol, res)));
  }
  return out;
}

}  // namespace umbilic
