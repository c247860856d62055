#include "umbilic/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace umbilic {

namespace {

// Roots of l^2 - tr l + det, avoiding cancellation in the real case.
std::vector<std::complex<double>> quadratic_eigenvalues(double tr, double det) {
  const double half = 0.5 * tr;
  const double disc = half * half - det;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double big = half + std::copysign(s, half);
    const double small = big != 0.0 ? det / big : 0.0;
    return {{big, 0.0}, {small, 0.0}};
  }
  const double s = std::sqrt(-disc);
  return {{half, -s}, {half, s}};
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues of a non-square matrix");
  std::vector<std::complex<double>> out;
  if (m.rows() == 0) return out;
  if (m.rows() == 1) {
    out.emplace_back(m(0, 0), 0.0);
  } else if (m.rows() == 2) {
    out = quadratic_eigenvalues(m(0, 0) + m(1, 1), m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    out.assign(ev.data(), ev.data() + ev.size());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

double max_norm(const Eigen::VectorXd& v) noexcept {
  double n = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return std::numeric_limits<double>::infinity();
    n = std::max(n, std::abs(v[i]));
  }
  return n;
}

}  // namespace umbilic
