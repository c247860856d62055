#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "umbilic/catastrophe.hpp"

namespace umbilic {

enum class PlantFamily { integrators, ccf, jordan, epidemic, aircraft, submarine };

inline constexpr std::array<PlantFamily, 6> kAllPlantFamilies = {
    PlantFamily::integrators, PlantFamily::ccf,      PlantFamily::jordan,
    PlantFamily::epidemic,    PlantFamily::aircraft, PlantFamily::submarine,
};

/// 2 for integrators/ccf/jordan, 3 otherwise.
int dimension(PlantFamily family) noexcept;
std::string_view to_string(PlantFamily family) noexcept;
PlantFamily plant_family_from_string(std::string_view name);

/// Parameter names of a family, in storage order.
///
///   integrators  T1 T2                               (s)
///   ccf          a1 a2
///   jordan       rho1 rho2                           (1/s)
///   epidemic     alpha beta gamma                    (1/time)
///   aircraft     a_y_alpha a_mz_alpha a_mz_omega a_mz_delta
///   submarine    a12 a21 a22 a23 a32 a33 b2 b3
std::span<const std::string_view> parameter_names(PlantFamily family) noexcept;

/// Named real parameters of one plant family.
class PlantParams {
 public:
  /// Nominal values: aircraft and submarine use the standard nominal set;
  /// the second-order families use the fig2/fig4/fig5 defaults
  /// (T1=100, T2=1000; a1=1, a2=2; rho1=rho2=-1250), epidemic alpha=1, beta=gamma=4.
  static PlantParams nominal(PlantFamily family);
  /// Values in parameter_names() order; throws on a size mismatch.
  static PlantParams from_values(PlantFamily family, std::vector<double> values);

  PlantFamily family() const noexcept { return family_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](std::size_t i) const { return values_.at(i); }
  double get(std::string_view name) const;
  void set(std::string_view name, double value);
  bool has(std::string_view name) const noexcept;

  /// Throws std::invalid_argument on non-finite values or T1/T2 == 0.
  void validate() const;

  bool operator==(const PlantParams&) const = default;

 private:
  PlantParams(PlantFamily family, std::vector<double> values)
      : family_(family), values_(std::move(values)) {}
  std::size_t index_of(std::string_view name) const;

  PlantFamily family_;
  std::vector<double> values_;
};

/// One of the six plant families closed with zero, one, or (jordan) two
/// catastrophe controllers and a constant input level.
///
/// Input and controller channels:
///   integrators  dx2 = (u + input) / T2
///   ccf          dx2 += u + input
///   jordan       dx_i += u_i + input          (u_i from controller i)
///   epidemic     dx2 += u + input              (B = (0, 1, 0))
///   aircraft     dx2 += a_mz_delta (input + u) (B = (0, a_mz_delta, 0))
///   submarine    dx2 += b2 input, dx3 += b3 input + u
class ClosedLoopSystem {
 public:
  /// Throws std::invalid_argument for invalid params, a wrong controller count
  /// (jordan: 0 or 2, others: 0 or 1) or a controller map outside the state.
  static ClosedLoopSystem build(PlantParams params, std::vector<ControllerSpec> controllers = {},
                                double input_level = 0.0);

  PlantFamily family() const noexcept { return params_.family(); }
  int dimension() const noexcept { return umbilic::dimension(family()); }
  const PlantParams& params() const noexcept { return params_; }
  const std::vector<ControllerSpec>& controllers() const noexcept { return controllers_; }
  double input_level() const noexcept { return input_level_; }
  bool open_loop() const noexcept { return controllers_.empty(); }

  /// Time derivative. `t` is unused: every input is constant.
  Eigen::VectorXd rhs(const Eigen::VectorXd& x, double t = 0.0) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  /// y = x1 for the second-order families, x3 for epidemic/aircraft/submarine.
  double output(const Eigen::VectorXd& x) const;
  int output_index() const noexcept;

 private:
  ClosedLoopSystem(PlantParams params, std::vector<ControllerSpec> controllers, double input);
  void check_state(const Eigen::VectorXd& x) const;

  PlantParams params_;
  std::vector<ControllerSpec> controllers_;
  double input_level_;
  // rhs = linear_ x + input_column_ input + sum_c control_columns_[c] u_c
  Eigen::MatrixXd linear_;
  Eigen::VectorXd input_column_;
  std::vector<Eigen::VectorXd> control_columns_;
};

/// Gains of a family's deployed control law: (k1, k2, k3), or (ka, kb, kc)
/// for jordan.
using Gains = std::array<double, 3>;

/// The control law each family is closed with by default:
///   integrators, ccf  u = -x2^3 + 3 x2 x1^2 - k1 (x1^2 + x2^2) + k2 x2 + k3 x1
///   jordan            u1 = -ka x1^2 + kb x1,  u2 = -ka x2^2 + kc x2
///   epidemic          u = -k1 (x3^2 + x2^2) + k2 x3 + k3 x2
///   aircraft          u = -(1/a_mz_delta) (k1 (x3^2 + x2^2) - k2 x3 - k3 x2)
///   submarine         u = -k1 (x3^2 + x2^2) + k2 x3 + k3 x2
std::vector<ControllerSpec> deployed_controllers(const PlantParams& params, const Gains& gains);

/// Inverse of deployed_controllers: the gains if `system` carries exactly the
/// deployed layout for its family, std::nullopt otherwise.
std::optional<Gains> deployed_gains(const ClosedLoopSystem& system);

std::span<const std::string_view> gain_names(PlantFamily family) noexcept;

}  // namespace umbilic
