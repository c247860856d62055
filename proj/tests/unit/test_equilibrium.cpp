#include "catch.hpp"
#include "umbilic/equilibrium.hpp"

using namespace umbilic;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

ClosedLoopSystem deployed(PlantFamily f, std::vector<std::pair<std::string, double>> set,
                          const Gains& k, double input = 0.0) {
  auto p = PlantParams::nominal(f);
  for (const auto& [name, v] : set) p.set(name, v);
  return ClosedLoopSystem::build(p, deployed_controllers(p, k), input);
}

bool contains(const std::vector<Equilibrium>& eqs, const Eigen::VectorXd& x, double tol = 1e-9) {
  for (const auto& e : eqs)
    if (test::max_abs(e.state - x) <= tol * (1 + test::max_abs(x))) return true;
  return false;
}

}  // namespace

TEST_CASE("spectrum classification", "[equilibrium]") {
  CHECK(classify_spectrum({cd(-1, 0), cd(-2, 3)}) == Stability::stable);
  CHECK(classify_spectrum({cd(-1, 0), cd(0.5, 0)}) == Stability::unstable);
  CHECK(classify_spectrum({cd(-1, 0), cd(0, 1)}) == Stability::nonhyperbolic);
  CHECK(classify_spectrum({cd(-1, 0), cd(1e-12, 0)}) == Stability::nonhyperbolic);
  CHECK(classify_spectrum({cd(1e-12, 0), cd(2, 0)}) == Stability::unstable);
}

TEST_CASE("integrator closed forms", "[equilibrium]") {
  const auto sys = deployed(PlantFamily::integrators, {{"T1", 100}, {"T2", 1000}}, {1, -5, -2});
  const auto eqs = closed_form_equilibria(sys);
  REQUIRE(eqs.size() == 2);
  CHECK(*eqs[0].formula_id == "eq3");
  CHECK(*eqs[1].formula_id == "eq4");
  CHECK(test::max_abs(eqs[0].state) == 0.0);
  CHECK(eqs[1].state[0] == Approx(-2.0));
  for (const auto& e : eqs) {
    CHECK(test::max_abs(sys.rhs(e.state)) <= 1e-12);
    CHECK(e.provenance == Provenance::closed_form);
  }
  // T1, T2 > 0 with k1 > 0 and k3 < 0: origin stable, the other a saddle.
  CHECK(eqs[0].stable());
  CHECK(eqs[1].classification == Stability::unstable);
}

TEST_CASE("ccf closed forms follow (k3 - a2) / k1", "[equilibrium]") {
  for (double a2 : {-9.5, -3.5, 0.5, 7.5}) {
    const auto sys = deployed(PlantFamily::ccf, {{"a1", 1}, {"a2", a2}}, {4, -4, -6});
    const auto eqs = closed_form_equilibria(sys);
    REQUIRE(eqs.size() == 2);
    CHECK(eqs[1].state[0] == Approx((-6 - a2) / 4));
    const int stable = (eqs[0].stable() ? 1 : 0) + (eqs[1].stable() ? 1 : 0);
    CHECK(stable == 1);
  }
}

TEST_CASE("jordan closed forms are the four axis products", "[equilibrium]") {
  const auto sys = deployed(PlantFamily::jordan, {{"rho1", -1250}, {"rho2", 750}}, {2, 5, 5});
  const auto eqs = closed_form_equilibria(sys);
  REQUIRE(eqs.size() == 4);
  const double r1 = (-1250 + 5) / 2.0, r2 = (750 + 5) / 2.0;
  CHECK(contains(eqs, test::vec({0, 0})));
  CHECK(contains(eqs, test::vec({r1, 0})));
  CHECK(contains(eqs, test::vec({0, r2})));
  CHECK(contains(eqs, test::vec({r1, r2})));
  int stable = 0;
  for (const auto& e : eqs) stable += e.stable();
  CHECK(stable == 1);
  for (const auto& e : eqs)
    if (e.stable()) CHECK(test::max_abs(e.state - test::vec({0, r2})) < 1e-9);
}

TEST_CASE("epidemic and aircraft closed forms", "[equilibrium]") {
  const auto epi = deployed(PlantFamily::epidemic, {{"beta", 4}, {"gamma", 6}}, {1, 1, -1});
  auto eqs = closed_form_equilibria(epi);
  REQUIRE(eqs.size() == 2);
  CHECK(contains(eqs, test::vec({0, 0, 1})));

  const auto air = deployed(PlantFamily::aircraft, {}, {0.1, 0.3, 0.7});
  eqs = closed_form_equilibria(air);
  REQUIRE(eqs.size() == 2);
  CHECK(contains(eqs, test::vec({3, 0, 3})));
  for (const auto& e : eqs) CHECK(test::max_abs(air.rhs(e.state)) <= 1e-12);
}

TEST_CASE("closed forms refuse unsupported configurations", "[equilibrium]") {
  CHECK_THROWS_AS(closed_form_equilibria(
                      deployed(PlantFamily::ccf, {}, {4, -4, -6}, /*input=*/1.0)),
                  UnsupportedError);
  CHECK_THROWS_AS(closed_form_equilibria(deployed(PlantFamily::submarine, {}, {0.5, 0.3, -0.2})),
                  UnsupportedError);
  CHECK_THROWS_AS(closed_form_equilibria(ClosedLoopSystem::build(PlantParams::nominal(PlantFamily::ccf))),
                  UnsupportedError);
  CHECK_THROWS_AS(closed_form_equilibria(deployed(PlantFamily::ccf, {}, {0, -4, -6})),
                  std::invalid_argument);
}

TEST_CASE("numeric finder recovers the closed forms", "[equilibrium]") {
  const std::vector<ClosedLoopSystem> systems = {
      deployed(PlantFamily::integrators, {{"T2", -1500}}, {1, -5, -2}),
      deployed(PlantFamily::ccf, {{"a2", 2.5}}, {4, -4, -6}),
      deployed(PlantFamily::jordan, {{"rho1", -250}, {"rho2", 250}}, {2, 5, 5}),
      deployed(PlantFamily::aircraft, {}, {1, 3, 7}),
  };
  for (const auto& sys : systems) {
    const auto closed = closed_form_equilibria(sys);
    double span = 5.0;
    for (const auto& e : closed) span = std::max(span, 2 * test::max_abs(e.state));
    const std::vector<Interval> box(sys.dimension(), Interval{-span, span});
    const auto numeric = find_equilibria_numeric(sys, box, 9);
    INFO(to_string(sys.family()));
    for (const auto& e : closed) CHECK(contains(numeric, e.state, 1e-6));
    for (const auto& e : numeric) {
      CHECK(e.provenance == Provenance::numeric);
      CHECK(test::max_abs(sys.rhs(e.state)) <= 1e-8);
    }
  }
}

TEST_CASE("classify_equilibrium checks the residual", "[equilibrium]") {
  const auto sys = deployed(PlantFamily::ccf, {}, {4, -4, -6});
  CHECK_NOTHROW(classify_equilibrium(sys, test::vec({0, 0})));
  CHECK_THROWS_AS(classify_equilibrium(sys, test::vec({1, 1})), NotAnEquilibriumError);
  const auto e = classify_equilibrium(sys, test::vec({0, 0}));
  CHECK(e.leading_real_part() < 0);
  CHECK(e.slowest_rate() > 0);
}

TEST_CASE("newton_solve converges from a nearby start", "[equilibrium]") {
  const auto sys = deployed(PlantFamily::ccf, {{"a2", 2}}, {4, -4, -6});
  const auto root = newton_solve(sys, test::vec({-2.1, 0.05}));
  REQUIRE(root.has_value());
  CHECK((*root)[0] == Approx(-2.0));
}
