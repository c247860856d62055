#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "catch.hpp"
#include "umbilic/linalg.hpp"

using namespace umbilic;
using cd = std::complex<double>;

namespace {

// Roots of the monic cubic z^3 + c2 z^2 + c1 z + c0 by Durand-Kerner.
std::vector<cd> durand_kerner(double c2, double c1, double c0) {
  auto p = [&](cd z) { return ((z + c2) * z + c1) * z + c0; };
  std::vector<cd> r = {cd(0.4, 0.9), std::pow(cd(0.4, 0.9), 2), std::pow(cd(0.4, 0.9), 3)};
  for (int it = 0; it < 500; ++it) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      cd den = 1.0;
      for (std::size_t j = 0; j < r.size(); ++j)
        if (j != i) den *= r[i] - r[j];
      r[i] -= p(r[i]) / den;
    }
  }
  return r;
}

// Greedy match: every expected root has a computed root within tol.
bool same_roots(std::vector<cd> got, const std::vector<cd>& want, double tol) {
  if (got.size() != want.size()) return false;
  for (const auto& w : want) {
    auto it = std::min_element(got.begin(), got.end(),
                               [&](cd a, cd b) { return std::abs(a - w) < std::abs(b - w); });
    if (std::abs(*it - w) > tol * (1 + std::abs(w))) return false;
    got.erase(it);
  }
  return true;
}

}  // namespace

TEST_CASE("2x2 eigenvalues equal the quadratic formula roots", "[linalg]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd m(2, 2);
    m << d(rng), d(rng), d(rng), d(rng);
    const double tr = m.trace(), det = m.determinant();
    const cd disc = std::sqrt(cd(tr * tr - 4 * det));
    const std::vector<cd> want = {(tr + disc) / 2.0, (tr - disc) / 2.0};
    CHECK(same_roots(eigenvalues(m), want, 1e-10));
  }
}

TEST_CASE("3x3 eigenvalues equal Durand-Kerner roots of the characteristic polynomial",
          "[linalg]") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = d(rng);
    // det(zI - M) = z^3 - tr z^2 + c1 z - det
    const double tr = m.trace();
    const double c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                      m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const auto want = durand_kerner(-tr, c1, -m.determinant());
    CHECK(same_roots(eigenvalues(m), want, 1e-8));
  }
}

TEST_CASE("eigenvalues are sorted by real then imaginary part", "[linalg]") {
  Eigen::MatrixXd m(3, 3);
  m << 2, 0, 0, 0, 0, -1, 0, 1, 0;  // {2, +i, -i}
  const auto ev = eigenvalues(m);
  REQUIRE(ev.size() == 3);
  CHECK(std::abs(ev[0] - cd(0, -1)) < 1e-12);
  CHECK(std::abs(ev[1] - cd(0, 1)) < 1e-12);
  CHECK(std::abs(ev[2] - cd(2, 0)) < 1e-12);

  Eigen::MatrixXd one(1, 1);
  one << -3.5;
  CHECK(eigenvalues(one) == std::vector<cd>{cd(-3.5, 0)});
}

TEST_CASE("max_norm", "[linalg]") {
  CHECK(max_norm(test::vec({1, -4, 2})) == 4.0);
  CHECK(std::isinf(max_norm(test::vec({1, std::numeric_limits<double>::quiet_NaN()}))));
  CHECK(std::isinf(max_norm(test::vec({std::numeric_limits<double>::infinity()}))));
}
