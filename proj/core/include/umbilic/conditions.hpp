#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "umbilic/equilibrium.hpp"
#include "umbilic/plant.hpp"

namespace umbilic {

enum class Relation { greater_than_zero, less_than_zero };

struct ClauseResult {
  std::string text;  // e.g. "a1 - k2 > 0"
  double value = 0.0;
  Relation relation = Relation::greater_than_zero;
  bool satisfied = false;
};

/// One stated stability-condition set evaluated at concrete values.
struct ConditionReport {
  std::string condition_set;  // "eq5", ..., "eq36"
  std::string equilibrium_id;  // equilibrium the set claims stability for
  std::vector<ClauseResult> clauses;
  bool all_satisfied = false;
};

/// Condition-set labels of a family, paired with the closed-form equilibrium
/// each one claims stability for (eq5 -> eq3, eq6 -> eq4, ...). Empty for submarine.
std::vector<std::pair<std::string, std::string>> condition_sets(PlantFamily family);

/// Evaluates the stated inequalities of `label` verbatim.
/// Throws std::invalid_argument for a label that does not belong to the family.
ConditionReport eval_stability_conditions(const PlantParams& params, const Gains& gains,
                                      std::string_view label);

struct AuditEntry {
  std::string condition_set;
  std::string equilibrium_id;
  Eigen::VectorXd state;
  bool claimed_stable = false;
  /// Verdict of the same clauses with every inequality reversed.
  bool reversed_stable = false;
  Stability oracle = Stability::nonhyperbolic;
  std::optional<bool> agree;  // empty when skipped
  std::string skip_reason;
  std::vector<double> clause_values;
};

struct AuditPoint {
  PlantParams params;
  std::vector<AuditEntry> entries;
};

struct AuditSetSummary {
  std::string condition_set;
  int evaluated = 0;
  int agreed = 0;
  int negated = 0;
  int skipped = 0;
  double agreement_rate = 0.0;  // agreed / evaluated (0 when nothing evaluated)
  /// Points where the reversed clauses match the eigenvalue verdict.
  int reversed_agreed = 0;
  double reversed_agreement_rate = 0.0;
  bool systematic_inversion = false;
};

struct AuditReport {
  PlantFamily family = PlantFamily::integrators;
  Gains gains{};
  std::vector<AuditPoint> points;
  std::vector<AuditSetSummary> summary;
  int skipped_points = 0;

  const AuditSetSummary& set(std::string_view label) const;
};

/// A set is flagged as systematically inverted when, on more than this share of
/// evaluated points, either its verdict is the negation of the eigenvalue
/// verdict or the set with every inequality reversed reproduces the eigenvalue
/// verdict. The second test catches sign-flipped clauses on grids where
/// mixed-sign points make both verdicts "not stable".
inline constexpr double kInversionThreshold = 0.95;

/// Clause values within this distance of zero mark a point as sitting on a
/// critical surface; it is skipped.
inline constexpr double kCriticalSurfaceMargin = 1e-6;

/// For every grid point and every closed-form equilibrium: the claimed verdict,
/// the eigenvalue verdict, and whether they agree. Nonhyperbolic equilibria and
/// points on critical surfaces are skipped, never counted.
AuditReport audit_conditions(PlantFamily family, const std::vector<PlantParams>& grid,
                             const Gains& gains);

}  // namespace umbilic
