#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "catch.hpp"
#include "umbilic/io.hpp"
#include "umbilic/scenarios.hpp"

using namespace umbilic;

TEST_CASE("format_double round-trips", "[io]") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-3.0) == "-3");
  CHECK(format_double(1e-300) == "1e-300");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("CSV round-trip is bit-exact", "[io]") {
  Trajectory t;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0.0, 100.0);
  for (int i = 0; i < 50; ++i) {
    t.times.push_back(0.1 * i);
    t.states.push_back(test::vec({d(rng), d(rng), 1.0 / 3.0 * i}));
    t.output.push_back(t.states.back()[2]);
  }
  const std::string text = to_csv(t);
  CHECK(text.rfind("t,x1,x2,x3,y\n", 0) == 0);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.times[i] == t.times[i]);
    CHECK(std::memcmp(back.states[i].data(), t.states[i].data(), 3 * sizeof(double)) == 0);
    CHECK(back.output[i] == t.output[i]);
  }
  CHECK(to_csv(back) == text);
}

TEST_CASE("malformed CSV is rejected", "[io]") {
  CHECK_THROWS_AS(parse_csv(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("t,x1,y\n0,1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv("t,x1,y\n0,abc,1\n"), std::invalid_argument);
}

TEST_CASE("every built-in scenario survives a JSON round-trip", "[io]") {
  for (const auto& spec : builtin_scenarios()) {
    const Json j = to_json(spec);
    const auto back = sweep_from_json(j);
    INFO(spec.name);
    CHECK(back.name == spec.name);
    CHECK(back.base_params == spec.base_params);
    CHECK(back.controllers == spec.controllers);
    CHECK(back.vary == spec.vary);
    CHECK(back.solver == spec.solver);
    CHECK(back.convergence == spec.convergence);
    CHECK(back.x0 == spec.x0);
    CHECK(to_json(back).dump() == j.dump());
  }
}

TEST_CASE("JSON readers name the offending key", "[io]") {
  Json j = to_json(builtin_scenario("fig4"));
  j["family"] = "boat";
  CHECK_THROWS_AS(sweep_from_json(j), std::invalid_argument);
  j = to_json(builtin_scenario("fig4"));
  j["solver"]["method"] = "euler";
  CHECK_THROWS_AS(sweep_from_json(j), std::invalid_argument);
  j = to_json(builtin_scenario("fig4"));
  j["params"]["zeta"] = 1.0;
  try {
    sweep_from_json(j);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("zeta"));
  }
}

TEST_CASE("overrides follow dotted paths", "[io]") {
  Json j = to_json(builtin_scenario("fig4"));
  apply_override(j, "params.a1=2.5");
  CHECK(j["params"]["a1"] == 2.5);
  apply_override(j, "solver.t_end=500");
  CHECK(j["solver"]["t_end"] == 500);
  apply_override(j, "x0.1=0.25");
  CHECK(j["x0"][1] == 0.25);
  apply_override(j, "solver.method=rk4_fixed");
  CHECK(j["solver"]["method"] == "rk4_fixed");

  // A bare key is a plant parameter, and pinning a swept one removes the sweep.
  REQUIRE(j["vary"].size() == 1);
  apply_override(j, "a2=2");
  CHECK(j["params"]["a2"] == 2);
  CHECK(j["vary"].empty());
  CHECK(sweep_from_json(j).run_count() == 1);

  CHECK_THROWS_AS(apply_override(j, "params.zeta=1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(j, "solver.t_end"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(j, "x0.7=1"), std::invalid_argument);
}

TEST_CASE("tables are fixed width", "[io]") {
  const auto t = render_table({"run", "verdict"}, {{"0", "converged"}, {"10", "diverged"}});
  CHECK(t ==
        "run  verdict\n"
        "---  ---------\n"
        "0    converged\n"
        "10   diverged\n");
}

TEST_CASE("structured reports serialize", "[io]") {
  const auto& spec = builtin_scenario("fig4");
  const auto sys = spec.system(0);
  const auto eqs = closed_form_equilibria(sys);
  const Json e = to_json(eqs.at(0));
  CHECK(e.contains("state"));
  CHECK(e.contains("eigenvalues"));
  CHECK(e["classification"].is_string());
  const auto r = eval_stability_conditions(sys.params(), {4, -4, -6}, "eq10");
  CHECK(to_json(r)["clauses"].size() == 2);
}
