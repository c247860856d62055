#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace umbilic {

/// The seven elementary catastrophes. The first four are functions of one
/// canonical variable, the umbilics of two.
enum class CatastropheKind {
  fold,
  cusp,
  swallowtail,
  butterfly,
  hyperbolic_umbilic,
  elliptic_umbilic,
  parabolic_umbilic,
};

inline constexpr std::array<CatastropheKind, 7> kAllCatastropheKinds = {
    CatastropheKind::fold,
    CatastropheKind::cusp,
    CatastropheKind::swallowtail,
    CatastropheKind::butterfly,
    CatastropheKind::hyperbolic_umbilic,
    CatastropheKind::elliptic_umbilic,
    CatastropheKind::parabolic_umbilic,
};

/// Number of canonical variables (1 or 2).
int arity(CatastropheKind kind) noexcept;

/// Number of k coefficients the polynomial uses (1..4).
int coefficient_count(CatastropheKind kind) noexcept;

std::string_view to_string(CatastropheKind kind) noexcept;

/// Throws std::invalid_argument for unknown names.
CatastropheKind catastrophe_kind_from_string(std::string_view name);

using Coefficients = std::array<double, 4>;

/// Germ only: the part of the catastrophe polynomial free of k coefficients.
double eval_germ(CatastropheKind kind, std::span<const double> x);

/// Full catalog polynomial, optionally without its germ.
///
///   fold               x^3 + k1 x
///   cusp               x^4 + k2 x^2 + k1 x
///   swallowtail        x^5 + k3 x^3 + k2 x^2 + k1 x
///   butterfly          x^6 + k4 x^4 + k3 x^3 + k2 x^2 + k1 x
///   hyperbolic umbilic x2^3 + x1^3 + k1 x2 x1 - k2 x2 + k3 x1
///   elliptic umbilic   x2^3 - 3 x2 x1^2 + k1 (x1^2 + x2^2) - k2 x2 - k3 x1
///   parabolic umbilic  x2^2 x1 + x1^4 + k1 x2^2 + k2 x1^2 - k3 x2 - k4 x1
double eval_catastrophe(CatastropheKind kind, const Coefficients& k, std::span<const double> x,
                        bool include_germ = true);

/// Partial derivatives of eval_catastrophe with respect to the canonical
/// variables. Entries beyond the kind's arity are zero.
std::array<double, 2> catastrophe_gradient(CatastropheKind kind, const Coefficients& k,
                                           std::span<const double> x, bool include_germ = true);

/// A catastrophe polynomial deployed as a scalar feedback law
///
///   u = sign * P(x_canonical),   x_canonical[j] = state[state_map[j]]
///
/// A map entry of std::nullopt pins that canonical variable to zero, which is
/// how the per-axis laws u = -ka x^2 + kb x are expressed.
struct ControllerSpec {
  CatastropheKind kind = CatastropheKind::elliptic_umbilic;
  Coefficients k{0.0, 0.0, 0.0, 0.0};
  bool include_germ = true;
  double sign = 1.0;
  std::vector<std::optional<int>> state_map;

  /// Checks coefficient slots beyond the kind's arity are zero, the map has
  /// one entry per canonical variable, and mapped indices are distinct and
  /// below `dimension` (when dimension > 0). Throws std::invalid_argument.
  void validate(int dimension = 0) const;

  bool operator==(const ControllerSpec&) const = default;
};

/// Elliptic umbilic negated, with germ, on (x1, x2): the law
/// u = -x2^3 + 3 x2 x1^2 - k1 (x1^2 + x2^2) + k2 x2 + k3 x1.
ControllerSpec full_elliptic_umbilic_law(double k1, double k2, double k3);

/// Single-axis germ-free law u = -ka x^2 + kb x acting on state index `axis`.
ControllerSpec axis_law(int axis, double ka, double kb);

/// Germ-free law u = sign * (k1 (xj^2 + xi^2) - k2 xj - k3 xi), i.e.
/// canonical x1 <- state[i], x2 <- state[j].
ControllerSpec germ_free_pair_law(int i, int j, double k1, double k2, double k3,
                                  double sign = -1.0);

double eval_controller(const ControllerSpec& spec, const Eigen::VectorXd& state);

/// du/dstate, zero in positions the map does not reference.
Eigen::VectorXd controller_gradient(const ControllerSpec& spec, const Eigen::VectorXd& state);

}  // namespace umbilic
