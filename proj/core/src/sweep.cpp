#include "umbilic/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "umbilic/linalg.hpp"

namespace umbilic {

namespace {

constexpr double kCountSlack = 1e-9;
constexpr double kFinalStateResidual = 1e-6;
constexpr double kMinHorizon = 10.0;
constexpr double kMaxHorizon = 1e5;

std::string param_name(const std::string& path) {
  constexpr std::string_view prefix = "params.";
  if (path.rfind(prefix, 0) == 0) return path.substr(prefix.size());
  return {};
}

// Distinct axes in ascending order with their run counts.
std::vector<std::pair<int, std::size_t>> axes_of(const std::vector<VaryEntry>& vary) {
  std::map<int, std::size_t> axes;
  for (const auto& v : vary) axes.emplace(v.axis, v.count());
  return {axes.begin(), axes.end()};
}

double spectral_radius(const Eigen::MatrixXd& j) {
  double r = 0.0;
  for (const auto& l : eigenvalues(j)) r = std::max(r, std::abs(l));
  return r;
}

// Horizon that lets a run settle (or diverge) given the equilibria it may reach.
double run_horizon(const ClosedLoopSystem& system, const std::vector<Equilibrium>& equilibria,
                   const Eigen::VectorXd& x0, double tol, double divergence_norm) {
  double t = 0.0;
  bool any_stable = false;
  double growth = 0.0;
  for (const auto& eq : equilibria) {
    if (eq.stable()) {
      any_stable = true;
      const double d = max_norm(x0 - eq.state);
      t = std::max(t, std::max(10.0, std::log(d / tol) + 5.0) / eq.slowest_rate());
    } else {
      growth = std::max(growth, eq.leading_real_part());
    }
  }
  if (any_stable) return t;
  if (growth > kHyperbolicEps) return std::log(divergence_norm / tol) / growth;

  // No isolated equilibrium says anything; fall back to the linearization at x0.
  const auto spectrum = eigenvalues(system.jacobian(x0));
  double lead = -std::numeric_limits<double>::infinity();
  double slow = std::numeric_limits<double>::infinity();
  for (const auto& l : spectrum) {
    lead = std::max(lead, l.real());
    if (l.real() < -kHyperbolicEps) slow = std::min(slow, -l.real());
  }
  if (lead > kHyperbolicEps) return std::log(divergence_norm / tol) / lead;
  if (std::isfinite(slow)) {
    return std::max(10.0, std::log(std::max(1.0, max_norm(x0)) / tol) + 5.0) / slow;
  }
  return 0.0;
}

double clamp_horizon(double t) {
  if (!std::isfinite(t)) return t > 0 ? kMaxHorizon : kMinHorizon;
  return std::clamp(t, kMinHorizon, kMaxHorizon);
}

HorizonPlan sampling_for(double t_end, double radius, std::size_t max_rows) {
  if (max_rows < 2) throw std::invalid_argument("max_rows must be at least 2");
  HorizonPlan plan;
  plan.t_end = t_end;
  const double interval = t_end / static_cast<double>(max_rows - 1);
  const double h_max = radius > 0.0 ? 0.1 / radius : interval;
  plan.record_every = std::max(1, static_cast<int>(std::ceil(interval / h_max - 1e-12)));
  plan.step = interval / plan.record_every;
  return plan;
}

double lattice_value(double from, double step, std::size_t i) {
  return std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9;
}

std::vector<double> lattice_axis(double from, double to, double step) {
  VaryEntry v{"", from, to, step, 0};
  std::vector<double> out(v.count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lattice_value(from, step, i);
  return out;
}

// Equilibria of the deployed submarine law: x2 = 0, x3 solves
// -k1 x3^2 + (a33 + k2) x3 + b3 d = 0, and x1 = -(a23 x3 + b2 d) / a21.
std::vector<Equilibrium> submarine_equilibria(const ClosedLoopSystem& system, const Gains& k) {
  const auto& p = system.params();
  const double d = system.input_level();
  const double a21 = p.get("a21"), a23 = p.get("a23"), a33 = p.get("a33");
  const double b2 = p.get("b2"), b3 = p.get("b3");
  std::vector<Equilibrium> out;
  if (a21 == 0.0 || p.get("a12") == 0.0) return out;
  const double a = -k[0], b = a33 + k[1], c = b3 * d;
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return out;
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    if (q != 0.0) roots.push_back(c / q);
    roots.push_back(q / a);
  }
  for (double x3 : roots) {
    Eigen::VectorXd x(3);
    x << -(a23 * x3 + b2 * d) / a21, 0.0, x3;
    Equilibrium eq;
    eq.state = x;
    eq.eigenvalues = eigenvalues(system.jacobian(x));
    eq.classification = classify_spectrum(eq.eigenvalues);
    out.push_back(std::move(eq));
  }
  return out;
}

}  // namespace

std::size_t VaryEntry::count() const {
  if (!(step != 0.0) || !std::isfinite(step) || !std::isfinite(from) || !std::isfinite(to)) {
    throw std::invalid_argument("vary entry '" + path + "' needs a finite nonzero step");
  }
  const double n = (to - from) / step;
  if (n < -kCountSlack) {
    throw std::invalid_argument("vary entry '" + path + "' steps away from its endpoint");
  }
  return static_cast<std::size_t>(std::floor(n + kCountSlack)) + 1;
}

double VaryEntry::value(std::size_t i) const { return from + static_cast<double>(i) * step; }

void SweepSpec::validate() const {
  base_params.validate();
  if (x0.size() != dimension(family())) {
    throw std::invalid_argument("x0 has " + std::to_string(x0.size()) + " entries, " +
                                std::string(to_string(family())) + " needs " +
                                std::to_string(dimension(family())));
  }
  if (!x0.allFinite()) throw std::invalid_argument("x0 must be finite");
  if (!std::isfinite(input_level)) throw std::invalid_argument("input must be finite");
  solver.validate();
  if (!(convergence.tol > 0.0)) throw std::invalid_argument("convergence tol must be positive");
  if (!(convergence.window_fraction > 0.0 && convergence.window_fraction <= 1.0)) {
    throw std::invalid_argument("convergence window_fraction must be in (0, 1]");
  }
  if (search.grid_n < 2) throw std::invalid_argument("search grid_n must be at least 2");
  if (!(search.tol > 0.0)) throw std::invalid_argument("search tol must be positive");
  if (!search.box.empty() && static_cast<int>(search.box.size()) != dimension(family())) {
    throw std::invalid_argument("search box must have one interval per state");
  }
  for (const auto& c : controllers) c.validate(dimension(family()));

  std::map<int, std::size_t> counts;
  std::set<std::string> paths;
  for (const auto& v : vary) {
    if (v.path != "input" && !base_params.has(param_name(v.path))) {
      throw std::invalid_argument("unknown vary path '" + v.path + "' for " +
                                  std::string(to_string(family())));
    }
    if (!paths.insert(v.path).second) {
      throw std::invalid_argument("vary path '" + v.path + "' appears twice");
    }
    const auto n = v.count();
    auto [it, fresh] = counts.emplace(v.axis, n);
    if (!fresh && it->second != n) {
      throw std::invalid_argument("jointly varied entries on axis " + std::to_string(v.axis) +
                                  " have unequal counts");
    }
  }
}

std::size_t SweepSpec::run_count() const {
  std::size_t n = 1;
  for (const auto& [axis, count] : axes_of(vary)) n *= count;
  return n;
}

std::vector<std::pair<std::string, double>> SweepSpec::assignment(std::size_t index) const {
  if (index >= run_count()) {
    throw std::out_of_range("run index " + std::to_string(index) + " out of range (" +
                            std::to_string(run_count()) + " runs)");
  }
  const auto axes = axes_of(vary);
  std::map<int, std::size_t> position;
  for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
    position[it->first] = index % it->second;
    index /= it->second;
  }
  std::vector<std::pair<std::string, double>> out;
  out.reserve(vary.size());
  for (const auto& v : vary) out.emplace_back(v.path, v.value(position[v.axis]));
  return out;
}

std::pair<PlantParams, double> SweepSpec::resolve(std::size_t index) const {
  PlantParams params = base_params;
  double input = input_level;
  for (const auto& [path, value] : assignment(index)) {
    if (path == "input") {
      input = value;
    } else {
      params.set(param_name(path), value);
    }
  }
  return {params, input};
}

ClosedLoopSystem SweepSpec::system(std::size_t index) const {
  auto [params, input] = resolve(index);
  return ClosedLoopSystem::build(std::move(params), controllers, input);
}

std::vector<Equilibrium> candidate_equilibria(const ClosedLoopSystem& system,
                                              const EquilibriumSearch& search) {
  if (system.input_level() == 0.0) {
    try {
      return closed_form_equilibria(system);
    } catch (const UnsupportedError&) {
    } catch (const std::invalid_argument&) {
    }
  }
  auto box = search.box;
  if (box.empty()) box.assign(static_cast<std::size_t>(system.dimension()), Interval{-10.0, 10.0});
  return find_equilibria_numeric(system, box, search.grid_n, search.tol);
}

const Equilibrium* RunRecord::attractor() const noexcept {
  if (verdict.kind != VerdictKind::converged || !verdict.equilibrium_index) return nullptr;
  return &equilibria[*verdict.equilibrium_index];
}

RunRecord run_one(const SweepSpec& spec, std::size_t index) {
  RunRecord rec;
  rec.index = index;
  rec.values = spec.assignment(index);
  try {
    const auto system = spec.system(index);
    rec.equilibria = candidate_equilibria(system, spec.search);
    rec.trajectory = integrate(system, spec.x0, spec.solver);
    const double window =
        std::min(spec.convergence.window_fraction * spec.solver.t_end, rec.trajectory.duration());
    const double tol = spec.convergence.tol;
    rec.verdict = detect_convergence(rec.trajectory, rec.equilibria, tol, window);
    if (!rec.trajectory.diverged) {
      // Runs settling on a non-isolated equilibrium (a continuum the root
      // finder cannot pin down) are judged against where they stopped.
      if (rec.verdict.kind == VerdictKind::undecided) {
        const auto& xf = rec.trajectory.states.back();
        if (max_norm(system.rhs(xf)) <= kFinalStateResidual) {
          rec.equilibria.push_back(classify_equilibrium(system, xf, kFinalStateResidual));
          rec.verdict = detect_convergence(rec.trajectory, rec.equilibria, tol, window);
          if (rec.verdict.kind != VerdictKind::converged) rec.equilibria.pop_back();
        }
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
    if (rec.error.empty()) rec.error = "run failed";
    rec.equilibria.clear();
    rec.trajectory = {};
    rec.verdict = {};
  }
  return rec;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  const std::size_t n = spec.run_count();
  result.runs.resize(n);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) result.runs[i] = run_one(spec, i);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

SweepSummary summarize(const SweepResult& result) {
  SweepSummary s;
  s.scenario = result.spec.name;
  for (const auto& run : result.runs) {
    SummaryRow row;
    row.index = run.index;
    row.values = run.values;
    if (run.errored()) {
      row.verdict = "error";
      row.error = run.error;
      ++s.errored;
      s.rows.push_back(std::move(row));
      continue;
    }
    row.verdict = std::string(to_string(run.verdict.kind));
    row.final_state = run.verdict.final_state;
    row.settle_time = run.verdict.settle_time;
    switch (run.verdict.kind) {
      case VerdictKind::converged: {
        ++s.converged;
        const auto* eq = run.attractor();
        auto it = std::find_if(s.attractors.begin(), s.attractors.end(), [&](const auto& a) {
          return max_norm(a.state - eq->state) <=
                 kAttractorMergeRadius * (1.0 + max_norm(eq->state));
        });
        if (it == s.attractors.end()) {
          s.attractors.push_back({eq->state, eq->formula_id, 0});
          it = std::prev(s.attractors.end());
        }
        ++it->runs;
        row.attractor = static_cast<std::size_t>(it - s.attractors.begin());
        break;
      }
      case VerdictKind::diverged:
        ++s.diverged;
        break;
      case VerdictKind::undecided:
        ++s.undecided;
        break;
    }
    s.rows.push_back(std::move(row));
  }
  if (!s.rows.empty()) s.stable_fraction = static_cast<double>(s.converged) / s.rows.size();
  return s;
}

HorizonPlan plan_horizon(const SweepSpec& spec, std::size_t max_rows) {
  spec.validate();
  const double tol = spec.convergence.tol;
  double horizon = 0.0;
  double radius = 0.0;
  for (std::size_t i = 0; i < spec.run_count(); ++i) {
    std::optional<ClosedLoopSystem> system;
    try {
      system.emplace(spec.system(i));
    } catch (const std::exception&) {
      continue;
    }
    std::vector<Equilibrium> eqs;
    try {
      eqs = candidate_equilibria(*system, spec.search);
    } catch (const std::exception&) {
    }
    radius = std::max(radius, spectral_radius(system->jacobian(spec.x0)));
    for (const auto& eq : eqs) {
      for (const auto& l : eq.eigenvalues) radius = std::max(radius, std::abs(l));
    }
    horizon = std::max(
        horizon, run_horizon(*system, eqs, spec.x0, tol, spec.solver.divergence_norm));
  }
  return sampling_for(clamp_horizon(horizon), radius, max_rows);
}

void apply_horizon(SweepSpec& spec, std::size_t max_rows) {
  const auto plan = plan_horizon(spec, max_rows);
  spec.solver.t_end = plan.t_end;
  spec.solver.step = plan.step;
  spec.solver.record_every = plan.record_every;
}

GainSearchResult search_submarine_gains(const SweepSpec& spec, const GainLattice& lattice) {
  if (spec.family() != PlantFamily::submarine) {
    throw std::invalid_argument("gain search applies to submarine sweeps only");
  }
  spec.validate();
  const std::size_t runs = spec.run_count();
  std::vector<std::pair<PlantParams, double>> resolved;
  for (std::size_t i = 0; i < runs; ++i) resolved.push_back(spec.resolve(i));

  struct Candidate {
    Gains gains;
    double worst;
    std::size_t order;
  };
  std::vector<Candidate> feasible;
  const auto k2s = lattice_axis(lattice.k2_from, lattice.k2_to, lattice.k2_step);
  const auto k3s = lattice_axis(lattice.k3_from, lattice.k3_to, lattice.k3_step);
  std::size_t order = 0;
  for (double k1 : lattice.k1) {
    for (double k2 : k2s) {
      for (double k3 : k3s) {
        const Gains g{k1, k2, k3};
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const auto& [params, input] : resolved) {
          const auto system =
              ClosedLoopSystem::build(params, deployed_controllers(params, g), input);
          const auto eqs = submarine_equilibria(system, g);
          const Equilibrium* stable = nullptr;
          int n_stable = 0;
          for (const auto& eq : eqs) {
            if (eq.stable()) {
              ++n_stable;
              stable = &eq;
            }
          }
          if (n_stable != 1) {
            ok = false;
            break;
          }
          worst = std::min(worst, stable->slowest_rate());
        }
        if (ok) feasible.push_back({g, worst, order});
        ++order;
      }
    }
  }
  if (feasible.empty()) throw std::runtime_error("no lattice gains stabilize every run");
  std::stable_sort(feasible.begin(), feasible.end(),
                   [](const Candidate& a, const Candidate& b) { return a.worst > b.worst; });

  GainSearchResult result;
  result.eigen_feasible = feasible.size();
  for (const auto& cand : feasible) {
    ++result.simulated;
    SweepSpec trial = spec;
    trial.controllers = deployed_controllers(spec.base_params, cand.gains);
    double horizon = 0.0;
    std::vector<ClosedLoopSystem> systems;
    std::vector<Equilibrium> targets;
    for (const auto& [params, input] : resolved) {
      systems.push_back(
          ClosedLoopSystem::build(params, deployed_controllers(params, cand.gains), input));
      for (auto& eq : submarine_equilibria(systems.back(), cand.gains)) {
        if (eq.stable()) targets.push_back(std::move(eq));
      }
      horizon = std::max(horizon, run_horizon(systems.back(), {targets.back()}, spec.x0,
                                              spec.convergence.tol, spec.solver.divergence_norm));
    }
    const auto plan = sampling_for(clamp_horizon(horizon), 0.0, kDefaultMaxRows);
    SolverConfig cfg = spec.solver;
    cfg.t_end = plan.t_end;
    cfg.step = plan.step;
    cfg.record_every = plan.record_every;

    bool all = true;
    for (std::size_t i = 0; i < runs && all; ++i) {
      const auto traj = integrate(systems[i], spec.x0, cfg);
      const auto v = detect_convergence(traj, {targets[i]}, spec.convergence.tol,
                                        spec.convergence.window_fraction * cfg.t_end);
      all = v.kind == VerdictKind::converged;
    }
    if (all) {
      result.gains = cand.gains;
      result.worst_rate = cand.worst;
      return result;
    }
  }
  throw std::runtime_error("no eigenvalue-feasible gains converge in simulation");
}

}  // namespace umbilic
