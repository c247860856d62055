#include "umbilic/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace umbilic {

namespace {

using Expr = double (*)(const PlantParams&, const Gains&);

struct ClauseDef {
  std::string_view text;
  Relation relation;
  Expr expr;
};

struct ConditionSetDef {
  std::string_view label;
  PlantFamily family;
  std::string_view equilibrium_id;
  std::vector<ClauseDef> clauses;
};

constexpr auto GT = Relation::greater_than_zero;
constexpr auto LT = Relation::less_than_zero;

// Clause texts and expressions are kept exactly as stated,
// including the ones linearization disagrees with.
const std::vector<ConditionSetDef>& registry() {
  static const std::vector<ConditionSetDef> sets = {
      {"eq5", PlantFamily::integrators, "eq3",
       {{"-k2/T2 > 0", GT, [](const PlantParams& p, const Gains& k) { return -k[1] / p[1]; }},
        {"k3/(T1*T2) < 0", LT,
         [](const PlantParams& p, const Gains& k) { return k[2] / (p[0] * p[1]); }}}},
      {"eq6", PlantFamily::integrators, "eq4",
       {{"-(3*k3^2 + k2*k1^2)/(k1^2*T2) > 0", GT,
         [](const PlantParams& p, const Gains& k) {
           return -(3.0 * k[2] * k[2] + k[1] * k[0] * k[0]) / (k[0] * k[0] * p[1]);
         }},
        {"k3/(T1*T2) > 0", GT,
         [](const PlantParams& p, const Gains& k) { return k[2] / (p[0] * p[1]); }}}},
      {"eq10", PlantFamily::ccf, "eq8",
       {{"a1 - k2 > 0", GT, [](const PlantParams& p, const Gains& k) { return p[0] - k[1]; }},
        {"a2 - k3 > 0", GT, [](const PlantParams& p, const Gains& k) { return p[1] - k[2]; }}}},
      {"eq11", PlantFamily::ccf, "eq9",
       {{"a1 - k2 + 3*(k3 - a2)^2/k1^2 > 0", GT,
         [](const PlantParams& p, const Gains& k) {
           const double d = k[2] - p[1];
           return p[0] - k[1] + 3.0 * d * d / (k[0] * k[0]);
         }},
        {"k3 - a2 > 0", GT, [](const PlantParams& p, const Gains& k) { return k[2] - p[1]; }}}},
      {"eq19", PlantFamily::jordan, "eq15",
       {{"rho1 + kb > 0", GT, [](const PlantParams& p, const Gains& k) { return p[0] + k[1]; }},
        {"rho2 + kc > 0", GT,
         [](const PlantParams& p, const Gains& k) { return p[1] + k[2]; }}}},
      {"eq20", PlantFamily::jordan, "eq16",
       {{"rho1 + kb > 0", GT, [](const PlantParams& p, const Gains& k) { return p[0] + k[1]; }},
        {"rho2 + kc < 0", LT,
         [](const PlantParams& p, const Gains& k) { return p[1] + k[2]; }}}},
      {"eq21", PlantFamily::jordan, "eq17",
       {{"rho1 + kb < 0", LT, [](const PlantParams& p, const Gains& k) { return p[0] + k[1]; }},
        {"rho2 + kc > 0", GT,
         [](const PlantParams& p, const Gains& k) { return p[1] + k[2]; }}}},
      {"eq22", PlantFamily::jordan, "eq18",
       {{"rho1 + kb < 0", LT, [](const PlantParams& p, const Gains& k) { return p[0] + k[1]; }},
        {"rho2 + kc < 0", LT,
         [](const PlantParams& p, const Gains& k) { return p[1] + k[2]; }}}},
      {"eq28", PlantFamily::epidemic, "eq26",
       {{"alpha + gamma - k3 > 0", GT,
         [](const PlantParams& p, const Gains& k) { return p[0] + p[2] - k[2]; }},
        {"(alpha + gamma - k3)*(alpha*(gamma - k3) - k2*gamma + beta^2) - k2*alpha*(beta - gamma) "
         "> 0",
         GT,
         [](const PlantParams& p, const Gains& k) {
           const double al = p[0], be = p[1], ga = p[2];
           return (al + ga - k[2]) * (al * (ga - k[2]) - k[1] * ga + be * be) -
                  k[1] * al * (be - ga);
         }},
        {"k2*alpha*(beta - gamma) > 0", GT,
         [](const PlantParams& p, const Gains& k) { return k[1] * p[0] * (p[1] - p[2]); }}}},
      {"eq29", PlantFamily::epidemic, "eq27",
       {{"alpha + gamma - k3 > 0", GT,
         [](const PlantParams& p, const Gains& k) { return p[0] + p[2] - k[2]; }},
        {"(alpha + gamma - k3)*(alpha*(gamma - k3) + k2*gamma + beta^2) + k2*alpha*(beta - gamma) "
         "> 0",
         GT,
         [](const PlantParams& p, const Gains& k) {
           const double al = p[0], be = p[1], ga = p[2];
           return (al + ga - k[2]) * (al * (ga - k[2]) + k[1] * ga + be * be) +
                  k[1] * al * (be - ga);
         }},
        {"-k2*alpha*(beta - gamma) > 0", GT,
         [](const PlantParams& p, const Gains& k) { return -k[1] * p[0] * (p[1] - p[2]); }}}},
      {"eq35", PlantFamily::aircraft, "eq33",
       {{"a_mz_omega - k3 - a_y_alpha > 0", GT,
         [](const PlantParams& p, const Gains& k) { return p[2] - k[2] - p[0]; }},
        {"(a_mz_omega - k3 - a_y_alpha)*(a_y_alpha*(k3 - a_mz_omega) - k2 + a_mz_alpha) - "
         "k2*a_y_alpha > 0",
         GT,
         [](const PlantParams& p, const Gains& k) {
           const double ay = p[0], am = p[1], aw = p[2];
           return (aw - k[2] - ay) * (ay * (k[2] - aw) - k[1] + am) - k[1] * ay;
         }},
        {"k2*a_y_alpha > 0", GT,
         [](const PlantParams& p, const Gains& k) { return k[1] * p[0]; }}}},
      {"eq36", PlantFamily::aircraft, "eq34",
       {{"a_mz_omega + k3 - a_y_alpha > 0", GT,
         [](const PlantParams& p, const Gains& k) { return p[2] + k[2] - p[0]; }},
        {"(a_mz_omega + k3 - a_y_alpha)*(a_y_alpha*(k3 - a_mz_omega) + k2 + a_mz_alpha) + "
         "k2*a_y_alpha > 0",
         GT,
         [](const PlantParams& p, const Gains& k) {
           const double ay = p[0], am = p[1], aw = p[2];
           return (aw + k[2] - ay) * (ay * (k[2] - aw) + k[1] + am) + k[1] * ay;
         }},
        {"-k2*a_y_alpha > 0", GT,
         [](const PlantParams& p, const Gains& k) { return -k[1] * p[0]; }}}},
  };
  return sets;
}

const ConditionSetDef& lookup(PlantFamily family, std::string_view label) {
  for (const auto& def : registry()) {
    if (def.label == label) {
      if (def.family != family) {
        throw std::invalid_argument("condition set " + std::string(label) + " belongs to " +
                                    std::string(to_string(def.family)) + ", not " +
                                    std::string(to_string(family)));
      }
      return def;
    }
  }
  throw std::invalid_argument("unknown condition set '" + std::string(label) + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> condition_sets(PlantFamily family) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& def : registry()) {
    if (def.family == family) out.emplace_back(def.label, def.equilibrium_id);
  }
  return out;
}

ConditionReport eval_stability_conditions(const PlantParams& params, const Gains& gains,
                                      std::string_view label) {
  const auto& def = lookup(params.family(), label);
  ConditionReport report;
  report.condition_set = def.label;
  report.equilibrium_id = def.equilibrium_id;
  report.all_satisfied = true;
  for (const auto& clause : def.clauses) {
    ClauseResult r;
    r.text = clause.text;
    r.relation = clause.relation;
    r.value = clause.expr(params, gains);
    r.satisfied = clause.relation == Relation::greater_than_zero ? r.value > 0.0 : r.value < 0.0;
    report.all_satisfied = report.all_satisfied && r.satisfied;
    report.clauses.push_back(std::move(r));
  }
  return report;
}

const AuditSetSummary& AuditReport::set(std::string_view label) const {
  for (const auto& s : summary) {
    if (s.condition_set == label) return s;
  }
  throw std::invalid_argument("audit has no condition set '" + std::string(label) + "'");
}

AuditReport audit_conditions(PlantFamily family, const std::vector<PlantParams>& grid,
                             const Gains& gains) {
  const auto sets = condition_sets(family);
  AuditReport report;
  report.family = family;
  report.gains = gains;
  for (const auto& [label, _] : sets) report.summary.push_back({label});

  for (const auto& params : grid) {
    if (params.family() != family) {
      throw std::invalid_argument("audit grid mixes plant families");
    }
    AuditPoint point{params, {}};
    std::vector<Equilibrium> equilibria;
    std::string point_skip;
    try {
      const auto system = ClosedLoopSystem::build(params, deployed_controllers(params, gains));
      equilibria = closed_form_equilibria(system);
    } catch (const std::exception& e) {
      point_skip = e.what();
    }
    if (!point_skip.empty()) ++report.skipped_points;

    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto& [label, eq_id] = sets[s];
      auto& tally = report.summary[s];
      AuditEntry entry;
      entry.condition_set = label;
      entry.equilibrium_id = eq_id;
      const auto cond = eval_stability_conditions(params, gains, label);
      entry.claimed_stable = cond.all_satisfied;
      entry.reversed_stable = true;
      for (const auto& c : cond.clauses) {
        entry.clause_values.push_back(c.value);
        const bool reversed =
            c.relation == Relation::greater_than_zero ? c.value < 0.0 : c.value > 0.0;
        entry.reversed_stable = entry.reversed_stable && reversed;
      }

      const auto it = std::find_if(equilibria.begin(), equilibria.end(),
                                   [&](const Equilibrium& e) { return e.formula_id == eq_id; });
      if (!point_skip.empty()) {
        entry.skip_reason = point_skip;
      } else if (it == equilibria.end()) {
        entry.skip_reason = "equilibrium " + eq_id + " not available";
      } else {
        entry.state = it->state;
        entry.oracle = it->classification;
        const bool on_surface =
            std::any_of(cond.clauses.begin(), cond.clauses.end(), [](const ClauseResult& c) {
              return std::abs(c.value) <= kCriticalSurfaceMargin;
            });
        if (entry.oracle == Stability::nonhyperbolic) {
          entry.skip_reason = "nonhyperbolic";
        } else if (on_surface) {
          entry.skip_reason = "on critical surface";
        } else {
          entry.agree = entry.claimed_stable == (entry.oracle == Stability::stable);
        }
      }
      if (entry.agree) {
        ++tally.evaluated;
        if (*entry.agree) {
          ++tally.agreed;
        } else {
          ++tally.negated;
        }
        if (entry.reversed_stable == (entry.oracle == Stability::stable)) ++tally.reversed_agreed;
      } else {
        ++tally.skipped;
      }
      point.entries.push_back(std::move(entry));
    }
    report.points.push_back(std::move(point));
  }

  for (auto& tally : report.summary) {
    if (tally.evaluated > 0) {
      const double n = tally.evaluated;
      tally.agreement_rate = tally.agreed / n;
      tally.reversed_agreement_rate = tally.reversed_agreed / n;
      tally.systematic_inversion = tally.negated / n > kInversionThreshold ||
                                   tally.reversed_agreement_rate > kInversionThreshold;
    }
  }
  return report;
}

}  // namespace umbilic
