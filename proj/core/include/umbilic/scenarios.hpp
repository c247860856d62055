#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "umbilic/conditions.hpp"
#include "umbilic/sweep.hpp"

namespace umbilic {

/// fig2 fig3 fig4 fig5 fig6 fig7 fig9 fig10 fig12 ... fig21, in that order.
const std::vector<std::string>& builtin_scenario_names();

/// Every built-in sweep with its planned horizon and sampling filled in.
/// Computed once and cached; safe to call from several threads.
const std::vector<SweepSpec>& builtin_scenarios();

/// Throws std::invalid_argument for an unknown name.
const SweepSpec& builtin_scenario(std::string_view name);

/// Closed-loop submarine gains found by search_submarine_gains for fig17..fig21.
Gains frozen_submarine_gains(std::string_view name);

/// Parameter grid and gains the condition audit of a family runs on.
struct AuditSetup {
  PlantFamily family = PlantFamily::integrators;
  std::vector<PlantParams> grid;
  Gains gains{};
  std::string description;
};

///   integrators  T1, T2 in {-1000, -100, 100, 1000}, k = (1, -5, -2)
///   ccf          a1 = 1, a2 = -9.5 .. 9.5 step 1, k = (4, -4, -6)
///   jordan       rho1, rho2 = -1250 .. 1250 step 125, (ka, kb, kc) = (2, 5, 5)
///   epidemic     the fig6/fig7 (beta, gamma) grid with the fig7 gains
///   aircraft     the fig9 a_y_alpha values with the fig9 gains
/// Throws std::invalid_argument for submarine (no stated conditions).
AuditSetup builtin_audit(PlantFamily family);

/// The runs' parameters of a sweep with its deployed gains. Throws when the
/// sweep does not carry the family's deployed control law.
AuditSetup audit_from_sweep(const SweepSpec& spec);

/// Unique-stable-equilibrium grids: a list of (params, gains) points.
struct PropertyPoint {
  PlantParams params;
  Gains gains;
};
std::vector<PropertyPoint> unique_stable_grid(PlantFamily family);

}  // namespace umbilic
