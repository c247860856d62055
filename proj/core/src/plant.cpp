#include "umbilic/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace umbilic {

namespace {

using namespace std::string_view_literals;

constexpr std::array kIntegratorNames = {"T1"sv, "T2"sv};
constexpr std::array kCcfNames = {"a1"sv, "a2"sv};
constexpr std::array kJordanNames = {"rho1"sv, "rho2"sv};
constexpr std::array kEpidemicNames = {"alpha"sv, "beta"sv, "gamma"sv};
constexpr std::array kAircraftNames = {"a_y_alpha"sv, "a_mz_alpha"sv, "a_mz_omega"sv,
                                       "a_mz_delta"sv};
constexpr std::array kSubmarineNames = {"a12"sv, "a21"sv, "a22"sv, "a23"sv,
                                        "a32"sv, "a33"sv, "b2"sv,  "b3"sv};

// Linear part A, input column, and the column each controller drives.
struct ChannelLayout {
  Eigen::MatrixXd a;
  Eigen::VectorXd input;
  std::vector<Eigen::VectorXd> control;
};

ChannelLayout layout_for(const PlantParams& p, std::size_t controller_count) {
  const int n = dimension(p.family());
  ChannelLayout out{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), {}};
  auto unit = [n](int i, double scale = 1.0) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = scale;
    return e;
  };
  switch (p.family()) {
    case PlantFamily::integrators: {
      const double t1 = p[0], t2 = p[1];
      out.a(0, 1) = 1.0 / t1;
      out.input = unit(1, 1.0 / t2);
      if (controller_count == 1) out.control.push_back(unit(1, 1.0 / t2));
      break;
    }
    case PlantFamily::ccf: {
      const double a1 = p[0], a2 = p[1];
      out.a << 0.0, 1.0, -a2, -a1;
      out.input = unit(1);
      if (controller_count == 1) out.control.push_back(unit(1));
      break;
    }
    case PlantFamily::jordan: {
      out.a(0, 0) = p[0];
      out.a(1, 1) = p[1];
      out.input = Eigen::VectorXd::Ones(n);
      if (controller_count == 2) {
        out.control.push_back(unit(0));
        out.control.push_back(unit(1));
      }
      break;
    }
    case PlantFamily::epidemic: {
      const double alpha = p[0], beta = p[1], gamma = p[2];
      out.a << -alpha, -beta, 0.0,  //
          beta, -gamma, 0.0,        //
          alpha, gamma, 0.0;
      out.input = unit(1);
      if (controller_count == 1) out.control.push_back(unit(1));
      break;
    }
    case PlantFamily::aircraft: {
      const double ay = p[0], am = p[1], aw = p[2], ad = p[3];
      out.a << ay, 0.0, -ay,  //
          am, -aw, -am,       //
          0.0, 1.0, 0.0;
      out.input = unit(1, ad);
      if (controller_count == 1) out.control.push_back(unit(1, ad));
      break;
    }
    case PlantFamily::submarine: {
      const double a12 = p[0], a21 = p[1], a22 = p[2], a23 = p[3], a32 = p[4], a33 = p[5];
      const double b2 = p[6], b3 = p[7];
      out.a << 0.0, a12, 0.0,  //
          a21, a22, a23,       //
          0.0, a32, a33;
      out.input << 0.0, b2, b3;
      // The controller enters dx3 directly, not through B.
      if (controller_count == 1) out.control.push_back(unit(2));
      break;
    }
  }
  return out;
}

}  // namespace

int dimension(PlantFamily family) noexcept {
  switch (family) {
    case PlantFamily::integrators:
    case PlantFamily::ccf:
    case PlantFamily::jordan:
      return 2;
    case PlantFamily::epidemic:
    case PlantFamily::aircraft:
    case PlantFamily::submarine:
      return 3;
  }
  return 0;
}

std::string_view to_string(PlantFamily family) noexcept {
  switch (family) {
    case PlantFamily::integrators:
      return "integrators";
    case PlantFamily::ccf:
      return "ccf";
    case PlantFamily::jordan:
      return "jordan";
    case PlantFamily::epidemic:
      return "epidemic";
    case PlantFamily::aircraft:
      return "aircraft";
    case PlantFamily::submarine:
      return "submarine";
  }
  return "unknown";
}

PlantFamily plant_family_from_string(std::string_view name) {
  for (auto f : kAllPlantFamilies) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown plant family '" + std::string(name) + "'");
}

std::span<const std::string_view> parameter_names(PlantFamily family) noexcept {
  switch (family) {
    case PlantFamily::integrators:
      return kIntegratorNames;
    case PlantFamily::ccf:
      return kCcfNames;
    case PlantFamily::jordan:
      return kJordanNames;
    case PlantFamily::epidemic:
      return kEpidemicNames;
    case PlantFamily::aircraft:
      return kAircraftNames;
    case PlantFamily::submarine:
      return kSubmarineNames;
  }
  return {};
}

PlantParams PlantParams::nominal(PlantFamily family) {
  switch (family) {
    case PlantFamily::integrators:
      return {family, {100.0, 1000.0}};
    case PlantFamily::ccf:
      return {family, {1.0, 2.0}};
    case PlantFamily::jordan:
      return {family, {-1250.0, -1250.0}};
    case PlantFamily::epidemic:
      return {family, {1.0, 4.0, 4.0}};
    case PlantFamily::aircraft:
      return {family, {-2.10, 29.4, 2.18, 60.7}};
    case PlantFamily::submarine:
      return {family, {1.0, -0.0071, -0.111, 0.12, 0.07, -0.3, -0.095, 0.072}};
  }
  throw std::invalid_argument("unknown plant family");
}

PlantParams PlantParams::from_values(PlantFamily family, std::vector<double> values) {
  if (values.size() != parameter_names(family).size()) {
    throw std::invalid_argument(std::string(to_string(family)) + " expects " +
                                std::to_string(parameter_names(family).size()) +
                                " parameters, got " + std::to_string(values.size()));
  }
  return {family, std::move(values)};
}

std::size_t PlantParams::index_of(std::string_view name) const {
  const auto names = parameter_names(family_);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    std::string known;
    for (auto n : names) known += (known.empty() ? "" : ", ") + std::string(n);
    throw std::invalid_argument("family " + std::string(to_string(family_)) +
                                " has no parameter '" + std::string(name) + "' (known: " + known +
                                ")");
  }
  return static_cast<std::size_t>(it - names.begin());
}

double PlantParams::get(std::string_view name) const { return values_[index_of(name)]; }

void PlantParams::set(std::string_view name, double value) { values_[index_of(name)] = value; }

bool PlantParams::has(std::string_view name) const noexcept {
  const auto names = parameter_names(family_);
  return std::find(names.begin(), names.end(), name) != names.end();
}

void PlantParams::validate() const {
  const auto names = parameter_names(family_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("parameter " + std::string(names[i]) + " is not finite");
    }
  }
  if (family_ == PlantFamily::integrators) {
    if (values_[0] == 0.0) throw std::invalid_argument("T1 must be nonzero");
    if (values_[1] == 0.0) throw std::invalid_argument("T2 must be nonzero");
  }
}

ClosedLoopSystem ClosedLoopSystem::build(PlantParams params,
                                         std::vector<ControllerSpec> controllers,
                                         double input_level) {
  params.validate();
  if (!std::isfinite(input_level)) throw std::invalid_argument("input level must be finite");
  const auto family = params.family();
  const std::size_t n = controllers.size();
  if (family == PlantFamily::jordan) {
    if (n != 0 && n != 2) {
      throw std::invalid_argument("jordan takes zero or two controllers, got " +
                                  std::to_string(n));
    }
  } else if (n > 1) {
    throw std::invalid_argument(std::string(to_string(family)) +
                                " takes at most one controller, got " + std::to_string(n));
  }
  for (const auto& c : controllers) c.validate(umbilic::dimension(family));
  return ClosedLoopSystem(std::move(params), std::move(controllers), input_level);
}

ClosedLoopSystem::ClosedLoopSystem(PlantParams params, std::vector<ControllerSpec> controllers,
                                   double input)
    : params_(std::move(params)), controllers_(std::move(controllers)), input_level_(input) {
  auto layout = layout_for(params_, controllers_.size());
  linear_ = std::move(layout.a);
  input_column_ = std::move(layout.input);
  control_columns_ = std::move(layout.control);
}

void ClosedLoopSystem::check_state(const Eigen::VectorXd& x) const {
  if (x.size() != dimension()) {
    throw std::invalid_argument("state has dimension " + std::to_string(x.size()) + ", " +
                                std::string(to_string(family())) + " needs " +
                                std::to_string(dimension()));
  }
}

Eigen::VectorXd ClosedLoopSystem::rhs(const Eigen::VectorXd& x, double /*t*/) const {
  check_state(x);
  Eigen::VectorXd dx = linear_ * x + input_column_ * input_level_;
  for (std::size_t c = 0; c < controllers_.size(); ++c) {
    dx += control_columns_[c] * eval_controller(controllers_[c], x);
  }
  return dx;
}

Eigen::MatrixXd ClosedLoopSystem::jacobian(const Eigen::VectorXd& x) const {
  check_state(x);
  Eigen::MatrixXd j = linear_;
  for (std::size_t c = 0; c < controllers_.size(); ++c) {
    j += control_columns_[c] * controller_gradient(controllers_[c], x).transpose();
  }
  return j;
}

std::vector<ControllerSpec> deployed_controllers(const PlantParams& params, const Gains& g) {
  switch (params.family()) {
    case PlantFamily::integrators:
    case PlantFamily::ccf:
      return {full_elliptic_umbilic_law(g[0], g[1], g[2])};
    case PlantFamily::jordan:
      return {axis_law(0, g[0], g[1]), axis_law(1, g[0], g[2])};
    case PlantFamily::epidemic:
    case PlantFamily::submarine:
      return {germ_free_pair_law(1, 2, g[0], g[1], g[2])};
    case PlantFamily::aircraft:
      return {germ_free_pair_law(1, 2, g[0], g[1], g[2], -1.0 / params.get("a_mz_delta"))};
  }
  return {};
}

std::optional<Gains> deployed_gains(const ClosedLoopSystem& system) {
  const auto& cs = system.controllers();
  const auto& p = system.params();
  Gains g{};
  switch (system.family()) {
    case PlantFamily::jordan:
      if (cs.size() != 2) return std::nullopt;
      g = {cs[0].k[0], cs[0].k[2], cs[1].k[2]};
      break;
    default:
      if (cs.size() != 1) return std::nullopt;
      g = {cs[0].k[0], cs[0].k[1], cs[0].k[2]};
      break;
  }
  auto expected = deployed_controllers(p, g);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const auto& have = cs[i];
    const auto& want = expected[i];
    if (have.kind != want.kind || have.include_germ != want.include_germ ||
        have.state_map != want.state_map || have.k != want.k) {
      return std::nullopt;
    }
    if (std::abs(have.sign - want.sign) > 1e-12 * std::abs(want.sign)) return std::nullopt;
  }
  return g;
}

std::span<const std::string_view> gain_names(PlantFamily family) noexcept {
  static constexpr std::array kPaired = {"k1"sv, "k2"sv, "k3"sv};
  static constexpr std::array kJordan = {"ka"sv, "kb"sv, "kc"sv};
  if (family == PlantFamily::jordan) return kJordan;
  return kPaired;
}

int ClosedLoopSystem::output_index() const noexcept { return dimension() == 2 ? 0 : 2; }

double ClosedLoopSystem::output(const Eigen::VectorXd& x) const {
  check_state(x);
  return x[output_index()];
}

}  // namespace umbilic
