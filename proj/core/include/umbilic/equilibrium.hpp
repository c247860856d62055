#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "umbilic/plant.hpp"

namespace umbilic {

/// Real parts within this distance of zero count as on the imaginary axis.
inline constexpr double kHyperbolicEps = 1e-9;

enum class Stability { stable, unstable, nonhyperbolic };
enum class Provenance { closed_form, numeric };

std::string_view to_string(Stability s) noexcept;
std::string_view to_string(Provenance p) noexcept;

/// Stable iff every Re < -eps; unstable iff some Re > +eps.
Stability classify_spectrum(const std::vector<std::complex<double>>& eigenvalues,
                            double eps = kHyperbolicEps) noexcept;

struct Equilibrium {
  Eigen::VectorXd state;
  std::vector<std::complex<double>> eigenvalues;
  Stability classification = Stability::nonhyperbolic;
  Provenance provenance = Provenance::numeric;
  std::optional<std::string> formula_id;  // "eq3", "eq15", ...

  bool stable() const noexcept { return classification == Stability::stable; }
  /// min |Re lambda| over the spectrum.
  double slowest_rate() const noexcept;
  /// max Re lambda over the spectrum.
  double leading_real_part() const noexcept;
};

/// Raised when a closed form is requested for a configuration it does not
/// cover (nonzero input, open loop, a family without closed forms).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAnEquilibriumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues of the Jacobian at `state`. Throws NotAnEquilibriumError when
/// the rhs max-norm there exceeds `residual_tol`.
Equilibrium classify_equilibrium(const ClosedLoopSystem& system, const Eigen::VectorXd& state,
                                 double residual_tol = 1e-6);

/// Closed-form equilibria for the deployed control law at zero
/// input:
///   integrators  eq3 (0,0), eq4 (k3/k1, 0)
///   ccf          eq8 (0,0), eq9 ((k3-a2)/k1, 0)
///   jordan       eq15..eq18 from {0, (rho1+kb)/ka} x {0, (rho2+kc)/ka}
///   epidemic     eq26 0, eq27 (0, 0, k2/k1)
///   aircraft     eq33 0, eq34 (k2/k1, 0, k2/k1)
/// Throws UnsupportedError for nonzero input, other controller layouts, or the
/// submarine family; std::invalid_argument when k1 (ka) is zero.
std::vector<Equilibrium> closed_form_equilibria(const ClosedLoopSystem& system);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Damped Newton from a grid_n^dim lattice of starts over `box`. Starts that
/// stall, hit a singular Jacobian or end with residual > tol are dropped.
/// Roots within 1e-6 (max-norm) are merged. Result sorted lexicographically.
std::vector<Equilibrium> find_equilibria_numeric(const ClosedLoopSystem& system,
                                                 const std::vector<Interval>& box, int grid_n,
                                                 double tol = 1e-10);

/// Single damped-Newton solve; std::nullopt when it fails to converge.
std::optional<Eigen::VectorXd> newton_solve(const ClosedLoopSystem& system, Eigen::VectorXd x0,
                                            double tol = 1e-10);

}  // namespace umbilic
