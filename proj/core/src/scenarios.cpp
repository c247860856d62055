#include "umbilic/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace umbilic {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SweepSpec make(std::string name, std::string description, PlantParams params,
               std::vector<ControllerSpec> controllers, double input, std::vector<VaryEntry> vary,
               Eigen::VectorXd x0, std::vector<Interval> box, int grid_n) {
  SweepSpec s;
  s.name = std::move(name);
  s.description = std::move(description);
  s.base_params = std::move(params);
  s.controllers = std::move(controllers);
  s.input_level = input;
  s.vary = std::move(vary);
  s.x0 = std::move(x0);
  s.search.box = std::move(box);
  s.search.grid_n = grid_n;
  return s;
}

std::vector<Interval> cube(int n, double r) {
  return std::vector<Interval>(static_cast<std::size_t>(n), Interval{-r, r});
}

PlantParams with(PlantFamily family, std::initializer_list<std::pair<std::string_view, double>> kv) {
  auto p = PlantParams::nominal(family);
  for (const auto& [k, v] : kv) p.set(k, v);
  return p;
}

struct SubmarineSweep {
  std::string_view open_name;
  std::string_view closed_name;
  std::string_view param;
  double from, to, step;
};

constexpr SubmarineSweep kSubmarineSweeps[] = {
    {"fig12", "fig17", "a21", -0.0121, 0.0009, 0.00125},
    {"fig13", "fig18", "a22", -0.611, 0.289, 0.125},
    {"fig14", "fig19", "a23", -0.88, 1.12, 0.2},
    {"fig15", "fig20", "a32", -0.43, 0.57, 0.125},
    {"fig16", "fig21", "a33", -1.3, 0.7, 0.25},
};

struct FrozenGains {
  std::string_view name;
  Gains gains;
};

// Output of search_submarine_gains on each closed-loop sweep with the default
// lattice; a test re-runs the search against these.
constexpr FrozenGains kFrozenGains[] = {
    {"fig17", {0.005, 0.25, -0.15}},
    {"fig18", {0.02, -0.5, -1.95}},
    {"fig19", {0.2, -1.0, -0.05}},
    {"fig20", {0.5, -1.0, -0.45}},
    {"fig21", {0.5, 0.3, -0.2}},
};

std::vector<SweepSpec> build_all() {
  using F = PlantFamily;
  std::vector<SweepSpec> out;

  {
    auto p = with(F::integrators, {{"T1", 100.0}});
    auto s = make("fig2", "Integrators in series, T2 swept with k = (1, -5, -2), T1 = 100", p,
                  deployed_controllers(p, {1.0, -5.0, -2.0}), 0.0,
                  {{"params.T2", -4500.0, 4500.0, 1000.0, 0}}, vec({-1.0, 0.0}), cube(2, 5.0), 9);
    out.push_back(std::move(s));
  }
  {
    auto p = with(F::integrators, {{"T2", 1000.0}});
    auto s = make("fig3", "Integrators in series, T1 swept with k = (2, -3, -1), T2 = 1000", p,
                  deployed_controllers(p, {2.0, -3.0, -1.0}), 0.0,
                  {{"params.T1", -450.0, 450.0, 100.0, 0}}, vec({-0.25, 0.0}), cube(2, 2.0), 9);
    out.push_back(std::move(s));
  }
  {
    auto p = with(F::ccf, {{"a1", 1.0}});
    auto s = make("fig4", "Canonical controllable form, a2 swept with k = (4, -4, -6), a1 = 1", p,
                  deployed_controllers(p, {4.0, -4.0, -6.0}), 0.0,
                  {{"params.a2", -9.5, 9.5, 1.0, 0}}, vec({0.05, 0.0}), cube(2, 5.0), 9);
    out.push_back(std::move(s));
  }
  {
    auto p = PlantParams::nominal(F::jordan);
    auto s = make("fig5", "Jordan form, (rho1, rho2) grid with ka = 2, kb = kc = 5", p,
                  deployed_controllers(p, {2.0, 5.0, 5.0}), 0.0,
                  {{"params.rho1", -1250.0, 1250.0, 500.0, 0},
                   {"params.rho2", -1250.0, 1250.0, 500.0, 1}},
                  vec({50.0, 50.0}), cube(2, 1000.0), 15);
    s.search.tol = 1e-6;
    s.notes.push_back("(rho1, rho2) varied as a 6 x 6 grid (36 runs)");
    out.push_back(std::move(s));
  }
  {
    auto p = with(F::epidemic, {{"alpha", 1.0}});
    auto s = make("fig6", "Epidemic plant, open loop, (beta, gamma) grid, alpha = 1", p, {}, 0.0,
                  {{"params.beta", 4.0, 6.0, 2.0, 0}, {"params.gamma", 4.0, 6.0, 2.0, 1}},
                  vec({1.0, 0.0, 0.0}), cube(3, 5.0), 5);
    s.notes.push_back("(beta, gamma) varied as a 2 x 2 grid; paired variation is the other reading");
    s.notes.push_back("x0 = (1, 0, 0) chosen as a default initial condition");
    out.push_back(std::move(s));
  }
  {
    auto p = with(F::epidemic, {{"alpha", 1.0}});
    auto s = make("fig7", "Epidemic plant, closed loop k = (1, 1, -1), (beta, gamma) grid", p,
                  deployed_controllers(p, {1.0, 1.0, -1.0}), 0.0,
                  {{"params.beta", 4.0, 6.0, 2.0, 0}, {"params.gamma", 4.0, 6.0, 2.0, 1}},
                  vec({1.0, 0.0, 0.0}), cube(3, 5.0), 7);
    s.notes.push_back("(beta, gamma) varied as a 2 x 2 grid; paired variation is the other reading");
    s.notes.push_back("gains k = (1, 1, -1) chosen as defaults");
    s.notes.push_back("x0 = (1, 0, 0) chosen as a default initial condition");
    out.push_back(std::move(s));
  }
  {
    auto p = PlantParams::nominal(F::aircraft);
    auto s = make("fig9", "Aircraft pitch, closed loop k = (0.1, 0.3, 0.7), a_y_alpha swept, input 1",
                  p, deployed_controllers(p, {0.1, 0.3, 0.7}), 1.0,
                  {{"params.a_y_alpha", -5.6, 1.4, 0.5, 0}}, vec({0.0, 0.0, 0.0}), cube(3, 50.0),
                  7);
    s.notes.push_back("input enters as a_mz_delta (input + u)");
    s.notes.push_back("x0 = 0 chosen as a default initial condition");
    out.push_back(std::move(s));
  }
  {
    auto p = PlantParams::nominal(F::aircraft);
    auto s = make("fig10",
                  "Aircraft pitch, closed loop k = (1, 3, 7), three parameters varied jointly, "
                  "input 1",
                  p, deployed_controllers(p, {1.0, 3.0, 7.0}), 1.0,
                  {{"params.a_y_alpha", -4.1, -0.1, 1.0, 0},
                   {"params.a_mz_alpha", 9.4, 49.4, 10.0, 0},
                   {"params.a_mz_omega", 0.18, 4.18, 1.0, 0}},
                  vec({0.0, 0.0, 0.0}), cube(3, 20.0), 7);
    s.notes.push_back("input enters as a_mz_delta (input + u)");
    s.notes.push_back("x0 = 0 chosen as a default initial condition");
    out.push_back(std::move(s));
  }
  for (const auto& sw : kSubmarineSweeps) {
    auto p = PlantParams::nominal(F::submarine);
    const std::string param(sw.param);
    auto s = make(std::string(sw.open_name),
                  "Submarine depth, open loop, " + param + " swept, input 1", p, {}, 1.0,
                  {{"params." + param, sw.from, sw.to, sw.step, 0}}, vec({0.0, 0.0, 0.0}),
                  cube(3, 10.0), 5);
    s.notes.push_back("x0 = 0 chosen as a default initial condition");
    out.push_back(std::move(s));
  }
  for (const auto& sw : kSubmarineSweeps) {
    auto p = PlantParams::nominal(F::submarine);
    const std::string param(sw.param);
    const auto g = frozen_submarine_gains(sw.closed_name);
    auto s = make(std::string(sw.closed_name),
                  "Submarine depth, closed loop, " + param + " swept, input 1", p,
                  deployed_controllers(p, g), 1.0,
                  {{"params." + param, sw.from, sw.to, sw.step, 0}}, vec({0.0, 0.0, 0.0}),
                  cube(3, 10.0), 5);
    s.notes.push_back("gains selected by search_submarine_gains over the default lattice");
    s.notes.push_back("x0 = 0 chosen as a default initial condition");
    out.push_back(std::move(s));
  }

  for (auto& s : out) {
    s.validate();
    apply_horizon(s);
  }
  return out;
}

std::vector<double> range(double from, double to, double step) {
  VaryEntry v{"", from, to, step, 0};
  std::vector<double> out;
  for (std::size_t i = 0; i < v.count(); ++i) out.push_back(v.value(i));
  return out;
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {
      "fig2",  "fig3",  "fig4",  "fig5",  "fig6",  "fig7",  "fig9",  "fig10", "fig12",
      "fig13", "fig14", "fig15", "fig16", "fig17", "fig18", "fig19", "fig20", "fig21",
  };
  return names;
}

const std::vector<SweepSpec>& builtin_scenarios() {
  static const std::vector<SweepSpec> all = [] {
    auto specs = build_all();
    const auto& names = builtin_scenario_names();
    std::vector<SweepSpec> ordered;
    for (const auto& n : names) {
      auto it = std::find_if(specs.begin(), specs.end(), [&](const auto& s) { return s.name == n; });
      ordered.push_back(std::move(*it));
    }
    return ordered;
  }();
  return all;
}

const SweepSpec& builtin_scenario(std::string_view name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

Gains frozen_submarine_gains(std::string_view name) {
  for (const auto& f : kFrozenGains) {
    if (f.name == name) return f.gains;
  }
  throw std::invalid_argument("no frozen gains for '" + std::string(name) + "'");
}

AuditSetup builtin_audit(PlantFamily family) {
  AuditSetup a;
  a.family = family;
  switch (family) {
    case PlantFamily::integrators: {
      a.gains = {1.0, -5.0, -2.0};
      for (double t1 : {-1000.0, -100.0, 100.0, 1000.0}) {
        for (double t2 : {-1000.0, -100.0, 100.0, 1000.0}) {
          a.grid.push_back(PlantParams::from_values(family, {t1, t2}));
        }
      }
      a.description = "T1, T2 in {-1000, -100, 100, 1000}, k = (1, -5, -2)";
      break;
    }
    case PlantFamily::ccf:
      a.gains = {4.0, -4.0, -6.0};
      for (double a2 : range(-9.5, 9.5, 1.0)) {
        a.grid.push_back(PlantParams::from_values(family, {1.0, a2}));
      }
      a.description = "a1 = 1, a2 = -9.5 .. 9.5 step 1, k = (4, -4, -6)";
      break;
    case PlantFamily::jordan:
      a.gains = {2.0, 5.0, 5.0};
      for (double r1 : range(-1250.0, 1250.0, 125.0)) {
        for (double r2 : range(-1250.0, 1250.0, 125.0)) {
          a.grid.push_back(PlantParams::from_values(family, {r1, r2}));
        }
      }
      a.description = "rho1, rho2 = -1250 .. 1250 step 125, (ka, kb, kc) = (2, 5, 5)";
      break;
    case PlantFamily::epidemic:
      a = audit_from_sweep(builtin_scenario("fig7"));
      a.description = "fig7 (beta, gamma) grid, alpha = 1, k = (1, 1, -1)";
      break;
    case PlantFamily::aircraft:
      a = audit_from_sweep(builtin_scenario("fig9"));
      a.description = "fig9 a_y_alpha values, k = (0.1, 0.3, 0.7)";
      break;
    case PlantFamily::submarine:
      throw std::invalid_argument("the submarine family has no closed-form stability conditions");
  }
  return a;
}

AuditSetup audit_from_sweep(const SweepSpec& spec) {
  spec.validate();
  AuditSetup a;
  a.family = spec.family();
  const auto system = ClosedLoopSystem::build(spec.base_params, spec.controllers);
  const auto gains = deployed_gains(system);
  if (!gains) {
    throw std::invalid_argument("scenario " + spec.name +
                                " does not carry the deployed control law of its family");
  }
  a.gains = *gains;
  for (std::size_t i = 0; i < spec.run_count(); ++i) a.grid.push_back(spec.resolve(i).first);
  a.description = "parameter values of scenario " + spec.name;
  return a;
}

std::vector<PropertyPoint> unique_stable_grid(PlantFamily family) {
  std::vector<PropertyPoint> out;
  switch (family) {
    case PlantFamily::integrators: {
      // fig2 gains need T1 > 0, fig3 gains need T2 > 0; the other constant
      // takes either sign.
      for (double fixed : {100.0, 1000.0}) {
        for (double free : {-1000.0, -100.0, 100.0, 1000.0}) {
          out.push_back({PlantParams::from_values(family, {fixed, free}), {1.0, -5.0, -2.0}});
          out.push_back({PlantParams::from_values(family, {free, fixed}), {2.0, -3.0, -1.0}});
        }
      }
      break;
    }
    case PlantFamily::ccf:
      for (double a2 : range(-9.5, 9.5, 0.1)) {
        if (std::abs(a2 + 6.0) <= 1e-3) continue;
        out.push_back({PlantParams::from_values(family, {1.0, a2}), {4.0, -4.0, -6.0}});
      }
      break;
    case PlantFamily::jordan:
      for (double r1 : range(-1250.0, 1250.0, 125.0)) {
        for (double r2 : range(-1250.0, 1250.0, 125.0)) {
          if (std::abs(r1 + 5.0) <= 1e-3 || std::abs(r2 + 5.0) <= 1e-3) continue;
          out.push_back({PlantParams::from_values(family, {r1, r2}), {2.0, 5.0, 5.0}});
        }
      }
      break;
    default:
      throw std::invalid_argument("no unique-stable grid for " + std::string(to_string(family)));
  }
  return out;
}

}  // namespace umbilic
