#include <cmath>
#include <cstring>

#include "catch.hpp"
#include "umbilic/linalg.hpp"
#include "umbilic/simulation.hpp"

using namespace umbilic;
using Catch::Approx;

namespace {

// x'' + 2x' + x = 0 with x(0) = 1, x'(0) = 0: x(t) = (1 + t) e^-t.
ClosedLoopSystem critically_damped() {
  return ClosedLoopSystem::build(PlantParams::from_values(PlantFamily::ccf, {2.0, 1.0}));
}

double exact(double t) { return (1.0 + t) * std::exp(-t); }

SolverConfig rk4(double step, double t_end) {
  SolverConfig c;
  c.method = SolverMethod::rk4_fixed;
  c.step = step;
  c.t_end = t_end;
  return c;
}

Trajectory synthetic(std::vector<double> times, std::vector<double> x) {
  Trajectory t;
  t.times = std::move(times);
  for (double v : x) {
    t.states.push_back(test::vec({v, 0.0}));
    t.output.push_back(v);
  }
  return t;
}

Equilibrium at(double v) {
  Equilibrium e;
  e.state = test::vec({v, 0.0});
  return e;
}

}  // namespace

TEST_CASE("RK4 matches the analytic solution", "[simulation]") {
  const auto traj = integrate(critically_damped(), test::vec({1.0, 0.0}), rk4(1e-2, 1.0));
  CHECK(traj.times.back() == Approx(1.0));
  CHECK(traj.output.back() == Approx(2.0 * std::exp(-1.0)).epsilon(1e-9));
  CHECK(traj.output.back() == Approx(0.73576).epsilon(1e-5));
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.output[i] == Approx(exact(traj.times[i])).margin(1e-9));
  }
}

TEST_CASE("RK4 is fourth order", "[simulation]") {
  const auto sys = critically_damped();
  const auto err = [&](double h) {
    const auto t = integrate(sys, test::vec({1.0, 0.0}), rk4(h, 1.0));
    return std::abs(t.output.back() - exact(1.0));
  };
  const double factor = err(0.1) / err(0.05);
  INFO("order factor " << factor);
  CHECK(factor >= 12.0);
  CHECK(factor <= 20.0);
}

TEST_CASE("RK45 meets its tolerance", "[simulation]") {
  SolverConfig c;
  c.t_end = 5.0;
  c.step = 0.5;
  const auto traj = integrate(critically_damped(), test::vec({1.0, 0.0}), c);
  REQUIRE(traj.size() == 11);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.times[i] == Approx(0.5 * i));
    CHECK(traj.output[i] == Approx(exact(traj.times[i])).margin(1e-7));
  }
}

TEST_CASE("samples every step * record_every and at t_end", "[simulation]") {
  auto c = rk4(0.01, 1.05);
  c.record_every = 10;
  const auto traj = integrate(critically_damped(), test::vec({1.0, 0.0}), c);
  REQUIRE(traj.size() == 12);
  CHECK(traj.times[10] == Approx(1.0));
  CHECK(traj.times.back() == Approx(1.05));
  CHECK(traj.output.back() == Approx(exact(1.05)).margin(1e-8));
}

TEST_CASE("autonomous systems are time-shift invariant", "[simulation]") {
  const auto sys = ClosedLoopSystem::build(PlantParams::from_values(PlantFamily::ccf, {1.0, 2.0}),
                                           {full_elliptic_umbilic_law(4, -4, -6)});
  for (auto method : {SolverMethod::rk4_fixed, SolverMethod::rk45_adaptive}) {
    auto c = rk4(1e-3, 2.0);
    c.method = method;
    const auto whole = integrate(sys, test::vec({0.3, -0.1}), c);
    c.t_end = 1.0;
    const auto first = integrate(sys, test::vec({0.3, -0.1}), c);
    const auto second = integrate(sys, first.states.back(), c);
    CHECK(test::max_abs(second.states.back() - whole.states.back()) <= 1e-9);
  }
}

TEST_CASE("integration is bit-for-bit deterministic", "[simulation]") {
  const auto sys = ClosedLoopSystem::build(PlantParams::nominal(PlantFamily::aircraft),
                                           deployed_controllers(PlantParams::nominal(PlantFamily::aircraft), {0.1, 0.3, 0.7}),
                                           1.0);
  SolverConfig c;
  c.t_end = 50.0;
  c.step = 0.1;
  const auto a = integrate(sys, Eigen::VectorXd::Zero(3), c);
  const auto b = integrate(sys, Eigen::VectorXd::Zero(3), c);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(a.states[i].data(), b.states[i].data(), 3 * sizeof(double)) == 0);
    CHECK(a.times[i] == b.times[i]);
  }
}

TEST_CASE("divergence stops the run", "[simulation]") {
  // x'' - x' - x = 0 grows like e^{1.618 t}.
  const auto sys = ClosedLoopSystem::build(PlantParams::from_values(PlantFamily::ccf, {-1.0, -1.0}));
  for (auto method : {SolverMethod::rk4_fixed, SolverMethod::rk45_adaptive}) {
    auto c = rk4(1e-2, 100.0);
    c.method = method;
    c.divergence_norm = 1e3;
    const auto traj = integrate(sys, test::vec({1.0, 0.0}), c);
    CHECK(traj.diverged);
    CHECK(traj.times.back() < 100.0);
    CHECK(max_norm(traj.states.back()) >= 1e3);
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) CHECK(max_norm(traj.states[i]) < 1e3);
    const auto v = detect_convergence(traj, {at(0.0)}, 1e-3, 1.0);
    CHECK(v.kind == VerdictKind::diverged);
  }
}

TEST_CASE("solver configuration is validated", "[simulation]") {
  const auto sys = critically_damped();
  const auto x0 = test::vec({1.0, 0.0});
  auto c = rk4(0.0, 1.0);
  CHECK_THROWS_AS(integrate(sys, x0, c), std::invalid_argument);
  c = rk4(0.1, -1.0);
  CHECK_THROWS_AS(integrate(sys, x0, c), std::invalid_argument);
  c = rk4(0.1, 1.0);
  c.record_every = 0;
  CHECK_THROWS_AS(integrate(sys, x0, c), std::invalid_argument);
  CHECK_THROWS_AS(integrate(sys, test::vec({1.0}), rk4(0.1, 1.0)), std::invalid_argument);
  CHECK(solver_method_from_string("rk4_fixed") == SolverMethod::rk4_fixed);
  CHECK(solver_method_from_string(to_string(SolverMethod::rk45_adaptive)) ==
        SolverMethod::rk45_adaptive);
  CHECK_THROWS_AS(solver_method_from_string("euler"), std::invalid_argument);
}

TEST_CASE("convergence detection", "[simulation]") {
  const auto traj = synthetic({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10},
                              {5, 3, 2, 1.5, 1.2, 1.0005, 1.0002, 1.0001, 1, 1, 1});

  SECTION("first candidate inside the window wins") {
    const auto v = detect_convergence(traj, {at(3.0), at(1.0), at(1.0001)}, 1e-3, 2.0);
    CHECK(v.kind == VerdictKind::converged);
    CHECK(v.equilibrium_index == 1u);
    CHECK(*v.settle_time == Approx(5.0));
    CHECK(v.final_state[0] == 1.0);
  }
  SECTION("no candidate: undecided") {
    const auto v = detect_convergence(traj, {at(2.0)}, 1e-3, 2.0);
    CHECK(v.kind == VerdictKind::undecided);
    CHECK_FALSE(v.equilibrium_index.has_value());
  }
  SECTION("window must cover only the recorded span") {
    CHECK_THROWS_AS(detect_convergence(traj, {at(1.0)}, 1e-3, 11.0), std::invalid_argument);
    CHECK_THROWS_AS(detect_convergence(traj, {at(1.0)}, 1e-3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(detect_convergence(traj, {at(1.0)}, 0.0, 1.0), std::invalid_argument);
  }
  SECTION("a late excursion keeps the run undecided") {
    auto bumped = traj;
    bumped.states[9][0] = 1.01;
    CHECK(detect_convergence(bumped, {at(1.0)}, 1e-3, 2.0).kind == VerdictKind::undecided);
  }
}
