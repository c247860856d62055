#include <cstring>

#include "catch.hpp"
#include "umbilic/linalg.hpp"
#include "umbilic/sweep.hpp"

using namespace umbilic;
using Catch::Approx;

namespace {

SweepSpec ccf_sweep() {
  SweepSpec s;
  s.name = "ccf_test";
  s.base_params = PlantParams::from_values(PlantFamily::ccf, {1.0, 2.0});
  s.controllers = {full_elliptic_umbilic_law(4, -4, -6)};
  s.vary = {{"params.a2", -9.5, 4.5, 2.0, 0}};
  s.x0 = test::vec({0.05, 0.0});
  s.search.box = {{-5, 5}, {-5, 5}};
  apply_horizon(s);
  return s;
}

}  // namespace

TEST_CASE("vary entry counts include an integer endpoint", "[sweep]") {
  CHECK(VaryEntry{"input", -4500, 4500, 1000, 0}.count() == 10);
  CHECK(VaryEntry{"input", -9.5, 9.5, 1, 0}.count() == 20);
  CHECK(VaryEntry{"input", 0, 1, 0.1, 0}.count() == 11);
  CHECK(VaryEntry{"input", 0, 0.95, 0.1, 0}.count() == 10);
  CHECK(VaryEntry{"input", -5.6, 1.4, 0.5, 0}.count() == 15);
  CHECK(VaryEntry{"input", -5.6, 1.4, 0.5, 0}.value(14) == Approx(1.4));
}

TEST_CASE("grid order: lowest axis outermost, shared axes move together", "[sweep]") {
  SweepSpec s;
  s.base_params = PlantParams::nominal(PlantFamily::aircraft);
  s.vary = {{"params.a_mz_alpha", 0, 1, 1, 1},
            {"params.a_y_alpha", 10, 12, 1, 0},
            {"params.a_mz_omega", 20, 22, 1, 0}};
  s.x0 = Eigen::VectorXd::Zero(3);
  s.validate();
  REQUIRE(s.run_count() == 6);
  const auto a = s.assignment(3);  // axis0 index 1, axis1 index 1
  REQUIRE(a.size() == 3);
  CHECK(a[0] == std::pair<std::string, double>{"params.a_mz_alpha", 1.0});
  CHECK(a[1] == std::pair<std::string, double>{"params.a_y_alpha", 11.0});
  CHECK(a[2] == std::pair<std::string, double>{"params.a_mz_omega", 21.0});
  const auto [p, in] = s.resolve(4);
  CHECK(p.get("a_y_alpha") == 12.0);
  CHECK(p.get("a_mz_alpha") == 0.0);
  CHECK(in == 0.0);
}

TEST_CASE("sweep validation", "[sweep]") {
  auto s = ccf_sweep();
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.vary[0].path = "params.nope";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.vary[0].step = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.vary[0].to = -10.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.vary.push_back({"params.a1", 0, 10, 1, 0});  // joint axis, unequal counts
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.x0 = test::vec({0, 0, 0});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = s;
  bad.vary[0].path = "input";
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("ccf sweep converges to the stable closed form", "[sweep]") {
  const auto result = run_sweep(ccf_sweep(), 2);
  REQUIRE(result.runs.size() == 8);
  for (const auto& run : result.runs) {
    const double a2 = run.values.at(0).second;
    INFO("a2 = " << a2);
    REQUIRE_FALSE(run.errored());
    REQUIRE(run.verdict.kind == VerdictKind::converged);
    const double target = a2 - (-6) > 0 ? 0.0 : (-6 - a2) / 4;
    CHECK(std::abs(run.attractor()->state[0] - target) < 1e-9);
    CHECK(max_norm(run.verdict.final_state - run.attractor()->state) <= 1e-3);
  }
  const auto summary = summarize(result);
  CHECK(summary.converged == 8);
  CHECK(summary.stable_fraction == 1.0);
  CHECK(summary.attractors.size() == 3);  // origin and two shifted targets
}

TEST_CASE("thread count does not change results", "[sweep]") {
  const auto spec = ccf_sweep();
  const auto a = run_sweep(spec, 1);
  const auto b = run_sweep(spec, 4);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    const auto& ta = a.runs[i].trajectory;
    const auto& tb = b.runs[i].trajectory;
    REQUIRE(ta.size() == tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k)
      CHECK(std::memcmp(ta.states[k].data(), tb.states[k].data(), 2 * sizeof(double)) == 0);
  }
}

TEST_CASE("a run that cannot be built is recorded as an error", "[sweep]") {
  SweepSpec s;
  s.base_params = PlantParams::nominal(PlantFamily::integrators);
  s.controllers = {full_elliptic_umbilic_law(1, -5, -2)};
  s.vary = {{"params.T2", -1000, 1000, 1000, 0}};  // T2 = 0 in the middle
  s.x0 = test::vec({-1, 0});
  s.solver.t_end = 20.0;
  const auto result = run_sweep(s, 1);
  REQUIRE(result.runs.size() == 3);
  CHECK(result.runs[1].errored());
  CHECK_FALSE(result.runs[0].errored());
  const auto summary = summarize(result);
  CHECK(summary.errored == 1);
  CHECK(summary.rows[1].verdict == "error");
}

TEST_CASE("candidates fall back to the numeric finder", "[sweep]") {
  const auto p = PlantParams::from_values(PlantFamily::ccf, {1.0, 2.0});
  const auto sys = ClosedLoopSystem::build(p, {full_elliptic_umbilic_law(4, -4, -6)}, 0.5);
  EquilibriumSearch search;
  search.box = {{-5, 5}, {-5, 5}};
  const auto eqs = candidate_equilibria(sys, search);
  REQUIRE_FALSE(eqs.empty());
  for (const auto& e : eqs) {
    CHECK(e.provenance == Provenance::numeric);
    CHECK(max_norm(sys.rhs(e.state)) <= 1e-8);
  }
}

TEST_CASE("horizon plan scales with the slowest decay", "[sweep]") {
  auto s = ccf_sweep();
  const auto plan = plan_horizon(s);
  CHECK(plan.t_end >= 10.0);
  CHECK(plan.t_end <= 1e5);
  CHECK(plan.t_end / (plan.step * plan.record_every) <= kDefaultMaxRows);
  // The window must see the run settle: the slowest run needs several time constants.
  const auto result = run_sweep(s, 1);
  for (const auto& run : result.runs) {
    REQUIRE(run.verdict.settle_time.has_value());
    CHECK(*run.verdict.settle_time < 0.9 * plan.t_end);
  }
}
