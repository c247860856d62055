#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace umbilic {

/// Eigenvalues of a small dense real matrix, sorted by (real, imag).
/// 1x1 and 2x2 use the closed form (trace/determinant); larger sizes use a
/// Hessenberg-QR eigensolver.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

/// Max-norm of a vector; +inf if any entry is not finite.
double max_norm(const Eigen::VectorXd& v) noexcept;

}  // namespace umbilic
