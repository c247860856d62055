#include "umbilic/catastrophe.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace umbilic {

namespace {

void require_arity(CatastropheKind kind, std::span<const double> x) {
  if (static_cast<int>(x.size()) != arity(kind)) {
    throw std::invalid_argument(std::string(to_string(kind)) + " takes " +
                                std::to_string(arity(kind)) + " canonical variable(s), got " +
                                std::to_string(x.size()));
  }
}

}  // namespace

int arity(CatastropheKind kind) noexcept {
  switch (kind) {
    case CatastropheKind::fold:
    case CatastropheKind::cusp:
    case CatastropheKind::swallowtail:
    case CatastropheKind::butterfly:
      return 1;
    case CatastropheKind::hyperbolic_umbilic:
    case CatastropheKind::elliptic_umbilic:
    case CatastropheKind::parabolic_umbilic:
      return 2;
  }
  return 0;
}

int coefficient_count(CatastropheKind kind) noexcept {
  switch (kind) {
    case CatastropheKind::fold:
      return 1;
    case CatastropheKind::cusp:
      return 2;
    case CatastropheKind::swallowtail:
    case CatastropheKind::hyperbolic_umbilic:
    case CatastropheKind::elliptic_umbilic:
      return 3;
    case CatastropheKind::butterfly:
    case CatastropheKind::parabolic_umbilic:
      return 4;
  }
  return 0;
}

std::string_view to_string(CatastropheKind kind) noexcept {
  switch (kind) {
    case CatastropheKind::fold:
      return "fold";
    case CatastropheKind::cusp:
      return "cusp";
    case CatastropheKind::swallowtail:
      return "swallowtail";
    case CatastropheKind::butterfly:
      return "butterfly";
    case CatastropheKind::hyperbolic_umbilic:
      return "hyperbolic_umbilic";
    case CatastropheKind::elliptic_umbilic:
      return "elliptic_umbilic";
    case CatastropheKind::parabolic_umbilic:
      return "parabolic_umbilic";
  }
  return "unknown";
}

CatastropheKind catastrophe_kind_from_string(std::string_view name) {
  for (auto kind : kAllCatastropheKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown catastrophe kind '" + std::string(name) + "'");
}

double eval_germ(CatastropheKind kind, std::span<const double> x) {
  return eval_catastrophe(kind, Coefficients{0.0, 0.0, 0.0, 0.0}, x, true);
}

double eval_catastrophe(CatastropheKind kind, const Coefficients& k, std::span<const double> x,
                        bool include_germ) {
  require_arity(kind, x);
  const double g = include_germ ? 1.0 : 0.0;
  switch (kind) {
    case CatastropheKind::fold: {
      const double v = x[0];
      return g * v * v * v + k[0] * v;
    }
    case CatastropheKind::cusp: {
      const double v = x[0], v2 = v * v;
      return g * v2 * v2 + k[1] * v2 + k[0] * v;
    }
    case CatastropheKind::swallowtail: {
      const double v = x[0], v2 = v * v, v3 = v2 * v;
      return g * v3 * v2 + k[2] * v3 + k[1] * v2 + k[0] * v;
    }
    case CatastropheKind::butterfly: {
      const double v = x[0], v2 = v * v, v3 = v2 * v, v4 = v2 * v2;
      return g * v3 * v3 + k[3] * v4 + k[2] * v3 + k[1] * v2 + k[0] * v;
    }
    case CatastropheKind::hyperbolic_umbilic: {
      const double x1 = x[0], x2 = x[1];
      return g * (x2 * x2 * x2 + x1 * x1 * x1) + k[0] * x2 * x1 - k[1] * x2 + k[2] * x1;
    }
    case CatastropheKind::elliptic_umbilic: {
      const double x1 = x[0], x2 = x[1];
      return g * (x2 * x2 * x2 - 3.0 * x2 * x1 * x1) + k[0] * (x1 * x1 + x2 * x2) - k[1] * x2 -
             k[2] * x1;
    }
    case CatastropheKind::parabolic_umbilic: {
      const double x1 = x[0], x2 = x[1], x1s = x1 * x1;
      return g * (x2 * x2 * x1 + x1s * x1s) + k[0] * x2 * x2 + k[1] * x1s - k[2] * x2 -
             k[3] * x1;
    }
  }
  return 0.0;
}

std::array<double, 2> catastrophe_gradient(CatastropheKind kind, const Coefficients& k,
                                           std::span<const double> x, bool include_germ) {
  require_arity(kind, x);
  const double g = include_germ ? 1.0 : 0.0;
  switch (kind) {
    case CatastropheKind::fold: {
      const double v = x[0];
      return {3.0 * g * v * v + k[0], 0.0};
    }
    case CatastropheKind::cusp: {
      const double v = x[0];
      return {4.0 * g * v * v * v + 2.0 * k[1] * v + k[0], 0.0};
    }
    case CatastropheKind::swallowtail: {
      const double v = x[0], v2 = v * v;
      return {5.0 * g * v2 * v2 + 3.0 * k[2] * v2 + 2.0 * k[1] * v + k[0], 0.0};
    }
    case CatastropheKind::butterfly: {
      const double v = x[0], v2 = v * v;
      return {6.0 * g * v2 * v2 * v + 4.0 * k[3] * v2 * v + 3.0 * k[2] * v2 + 2.0 * k[1] * v +
                  k[0],
              0.0};
    }
    case CatastropheKind::hyperbolic_umbilic: {
      const double x1 = x[0], x2 = x[1];
      return {3.0 * g * x1 * x1 + k[0] * x2 + k[2], 3.0 * g * x2 * x2 + k[0] * x1 - k[1]};
    }
    case CatastropheKind::elliptic_umbilic: {
      const double x1 = x[0], x2 = x[1];
      return {-6.0 * g * x2 * x1 + 2.0 * k[0] * x1 - k[2],
              g * (3.0 * x2 * x2 - 3.0 * x1 * x1) + 2.0 * k[0] * x2 - k[1]};
    }
    case CatastropheKind::parabolic_umbilic: {
      const double x1 = x[0], x2 = x[1];
      return {g * (x2 * x2 + 4.0 * x1 * x1 * x1) + 2.0 * k[1] * x1 - k[3],
              2.0 * g * x2 * x1 + 2.0 * k[0] * x2 - k[2]};
    }
  }
  return {0.0, 0.0};
}

void ControllerSpec::validate(int dimension) const {
  for (int i = coefficient_count(kind); i < 4; ++i) {
    if (k[static_cast<std::size_t>(i)] != 0.0) {
      throw std::invalid_argument(std::string(to_string(kind)) + " uses " +
                                  std::to_string(coefficient_count(kind)) +
                                  " coefficient(s); k" + std::to_string(i + 1) + " must be 0");
    }
  }
  if (static_cast<int>(state_map.size()) != arity(kind)) {
    throw std::invalid_argument("state_map needs " + std::to_string(arity(kind)) +
                                " entr(ies) for " + std::string(to_string(kind)));
  }
  std::set<int> seen;
  for (const auto& entry : state_map) {
    if (!entry) continue;
    const int idx = *entry;
    if (idx < 0 || (dimension > 0 && idx >= dimension)) {
      throw std::invalid_argument("state_map index " + std::to_string(idx) +
                                  " out of range for dimension " + std::to_string(dimension));
    }
    if (!seen.insert(idx).second) {
      throw std::invalid_argument("state_map index " + std::to_string(idx) + " repeated");
    }
  }
  if (!std::isfinite(sign)) throw std::invalid_argument("controller sign must be finite");
}

ControllerSpec full_elliptic_umbilic_law(double k1, double k2, double k3) {
  return ControllerSpec{CatastropheKind::elliptic_umbilic, {k1, k2, k3, 0.0}, true, -1.0, {0, 1}};
}

ControllerSpec axis_law(int axis, double ka, double kb) {
  return ControllerSpec{
      CatastropheKind::elliptic_umbilic, {ka, 0.0, kb, 0.0}, false, -1.0, {axis, std::nullopt}};
}

ControllerSpec germ_free_pair_law(int i, int j, double k1, double k2, double k3, double sign) {
  return ControllerSpec{CatastropheKind::elliptic_umbilic, {k1, k2, k3, 0.0}, false, sign, {i, j}};
}

namespace {

std::array<double, 2> canonical_point(const ControllerSpec& spec, const Eigen::VectorXd& state) {
  std::array<double, 2> x{0.0, 0.0};
  for (std::size_t j = 0; j < spec.state_map.size() && j < 2; ++j) {
    if (!spec.state_map[j]) continue;
    const int idx = *spec.state_map[j];
    if (idx < 0 || idx >= state.size()) {
      throw std::invalid_argument("controller maps state index " + std::to_string(idx) +
                                  " but state has dimension " + std::to_string(state.size()));
    }
    x[j] = state[idx];
  }
  return x;
}

}  // namespace

double eval_controller(const ControllerSpec& spec, const Eigen::VectorXd& state) {
  if (static_cast<int>(spec.state_map.size()) != arity(spec.kind)) {
    throw std::invalid_argument("controller state_map does not match its catastrophe arity");
  }
  const auto x = canonical_point(spec, state);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(arity(spec.kind)));
  return spec.sign * eval_catastrophe(spec.kind, spec.k, xs, spec.include_germ);
}

Eigen::VectorXd controller_gradient(const ControllerSpec& spec, const Eigen::VectorXd& state) {
  if (static_cast<int>(spec.state_map.size()) != arity(spec.kind)) {
    throw std::invalid_argument("controller state_map does not match its catastrophe arity");
  }
  const auto x = canonical_point(spec, state);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(arity(spec.kind)));
  const auto dp = catastrophe_gradient(spec.kind, spec.k, xs, spec.include_germ);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(state.size());
  for (std::size_t j = 0; j < spec.state_map.size(); ++j) {
    if (spec.state_map[j]) grad[*spec.state_map[j]] += spec.sign * dp[j];
  }
  return grad;
}

}  // namespace umbilic
