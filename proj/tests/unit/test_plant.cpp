#include <random>

#include "catch.hpp"
#include "umbilic/plant.hpp"

using namespace umbilic;
using Catch::Approx;

namespace {

Gains gains_for(PlantFamily f) {
  switch (f) {
    case PlantFamily::integrators: return {1.0, -5.0, -2.0};
    case PlantFamily::ccf: return {4.0, -4.0, -6.0};
    case PlantFamily::jordan: return {2.0, 5.0, 5.0};
    case PlantFamily::epidemic: return {1.0, 1.0, -1.0};
    case PlantFamily::aircraft: return {0.1, 0.3, 0.7};
    case PlantFamily::submarine: return {0.5, 0.3, -0.2};
  }
  return {};
}

// Hand-expanded closed-loop right-hand sides.
Eigen::VectorXd expected_rhs(PlantFamily f, const PlantParams& p, const Gains& k, double in,
                             const Eigen::VectorXd& x) {
  Eigen::VectorXd d(x.size());
  switch (f) {
    case PlantFamily::integrators: {
      const double x1 = x[0], x2 = x[1];
      const double u = -x2 * x2 * x2 + 3 * x2 * x1 * x1 - k[0] * (x1 * x1 + x2 * x2) + k[1] * x2 + k[2] * x1;
      d << x2 / p[0], (u + in) / p[1];
      break;
    }
    case PlantFamily::ccf: {
      const double x1 = x[0], x2 = x[1];
      const double u = -x2 * x2 * x2 + 3 * x2 * x1 * x1 - k[0] * (x1 * x1 + x2 * x2) + k[1] * x2 + k[2] * x1;
      d << x2, -p[1] * x1 - p[0] * x2 + u + in;
      break;
    }
    case PlantFamily::jordan:
      d << p[0] * x[0] - k[0] * x[0] * x[0] + k[1] * x[0] + in,
          p[1] * x[1] - k[0] * x[1] * x[1] + k[2] * x[1] + in;
      break;
    case PlantFamily::epidemic: {
      const double u = -k[0] * (x[2] * x[2] + x[1] * x[1]) + k[1] * x[2] + k[2] * x[1];
      d << -p[0] * x[0] - p[1] * x[1], p[1] * x[0] - p[2] * x[1] + u + in,
          p[0] * x[0] + p[2] * x[1];
      break;
    }
    case PlantFamily::aircraft: {
      const double ad = p[3];
      const double u = -(1.0 / ad) * (k[0] * (x[2] * x[2] + x[1] * x[1]) - k[1] * x[2] - k[2] * x[1]);
      d << p[0] * (x[0] - x[2]), p[1] * (x[0] - x[2]) - p[2] * x[1] + ad * (in + u), x[1];
      break;
    }
    case PlantFamily::submarine: {
      const double u = -k[0] * (x[2] * x[2] + x[1] * x[1]) + k[1] * x[2] + k[2] * x[1];
      d << p[0] * x[1], p[1] * x[0] + p[2] * x[1] + p[3] * x[2] + p[6] * in,
          p[4] * x[1] + p[5] * x[2] + p[7] * in + u;
      break;
    }
  }
  return d;
}

Eigen::VectorXd random_state(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = d(rng);
  return x;
}

}  // namespace

TEST_CASE("closed-loop rhs matches the hand-expanded equations", "[plant]") {
  std::mt19937_64 rng(5);
  for (auto f : kAllPlantFamilies) {
    const auto p = PlantParams::nominal(f);
    const auto k = gains_for(f);
    for (double in : {0.0, 1.0}) {
      const auto sys = ClosedLoopSystem::build(p, deployed_controllers(p, k), in);
      for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_state(dimension(f), rng);
        INFO(to_string(f));
        CHECK(test::max_abs(sys.rhs(x) - expected_rhs(f, p, k, in, x)) <= 1e-10 * (1 + test::max_abs(sys.rhs(x))));
      }
    }
  }
}

TEST_CASE("analytic Jacobians agree with finite differences", "[plant]") {
  std::mt19937_64 rng(42);
  for (auto f : kAllPlantFamilies) {
    const auto p = PlantParams::nominal(f);
    const auto sys = ClosedLoopSystem::build(p, deployed_controllers(p, gains_for(f)), 0.5);
    const int n = sys.dimension();
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_state(n, rng);
      const Eigen::MatrixXd j = sys.jacobian(x);
      Eigen::MatrixXd fd(n, n);
      for (int c = 0; c < n; ++c) {
        const double h = 1e-6 * (1.0 + std::abs(x[c]));
        Eigen::VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        fd.col(c) = (sys.rhs(xp) - sys.rhs(xm)) / (2 * h);
      }
      const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
      INFO(to_string(f));
      CHECK((j - fd).cwiseAbs().maxCoeff() / scale <= 1e-5);
    }
  }
}

TEST_CASE("open-loop plants are linear", "[plant]") {
  for (auto f : kAllPlantFamilies) {
    const auto sys = ClosedLoopSystem::build(PlantParams::nominal(f));
    const Eigen::MatrixXd a = sys.jacobian(Eigen::VectorXd::Zero(sys.dimension()));
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(sys.dimension(), -1.0, 2.0);
    CHECK(test::max_abs(sys.rhs(x) - a * x) <= 1e-12);
  }
}

TEST_CASE("output channel", "[plant]") {
  for (auto f : kAllPlantFamilies) {
    const auto sys = ClosedLoopSystem::build(PlantParams::nominal(f));
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(sys.dimension(), 1.0, 3.0);
    const int expected = dimension(f) == 2 ? 0 : 2;
    CHECK(sys.output_index() == expected);
    CHECK(sys.output(x) == x[expected]);
  }
}

TEST_CASE("parameter access and validation", "[plant]") {
  auto p = PlantParams::nominal(PlantFamily::ccf);
  CHECK(p.get("a1") == 1.0);
  CHECK(p.get("a2") == 2.0);
  p.set("a2", -3.5);
  CHECK(p[1] == -3.5);
  CHECK(p.has("a1"));
  CHECK_FALSE(p.has("T1"));
  CHECK_THROWS_AS(p.get("nope"), std::invalid_argument);

  auto t = PlantParams::nominal(PlantFamily::integrators);
  t.set("T2", 0.0);
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  CHECK_THROWS_AS(ClosedLoopSystem::build(t), std::invalid_argument);
  t.set("T2", std::nan(""));
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);

  CHECK_THROWS_AS(PlantParams::from_values(PlantFamily::ccf, {1.0}), std::invalid_argument);
  for (auto f : kAllPlantFamilies) {
    CHECK(plant_family_from_string(to_string(f)) == f);
    CHECK(PlantParams::nominal(f).size() == parameter_names(f).size());
  }
  CHECK_THROWS_AS(plant_family_from_string("boat"), std::invalid_argument);
}

TEST_CASE("controller count and layout checks", "[plant]") {
  const auto jp = PlantParams::nominal(PlantFamily::jordan);
  CHECK_THROWS_AS(ClosedLoopSystem::build(jp, {axis_law(0, 2, 5)}), std::invalid_argument);
  const auto cp = PlantParams::nominal(PlantFamily::ccf);
  CHECK_THROWS_AS(ClosedLoopSystem::build(cp, {germ_free_pair_law(1, 2, 1, 1, 1)}),
                  std::invalid_argument);
}

TEST_CASE("deployed gains round-trip", "[plant]") {
  for (auto f : kAllPlantFamilies) {
    const auto p = PlantParams::nominal(f);
    const auto k = gains_for(f);
    const auto sys = ClosedLoopSystem::build(p, deployed_controllers(p, k));
    const auto back = deployed_gains(sys);
    REQUIRE(back.has_value());
    for (int i = 0; i < 3; ++i) CHECK((*back)[i] == Approx(k[i]));
    CHECK_FALSE(deployed_gains(ClosedLoopSystem::build(p)).has_value());
    CHECK(gain_names(f).size() == 3);
  }
}
