#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "umbilic/conditions.hpp"
#include "umbilic/sweep.hpp"

namespace umbilic {

using Json = nlohmann::ordered_json;

// Structured values. The *_from_json readers throw std::invalid_argument with
// the offending key in the message.

Json to_json(const ControllerSpec& spec);
ControllerSpec controller_from_json(const Json& j);

Json to_json(const PlantParams& params);
PlantParams params_from_json(PlantFamily family, const Json& j);

/// {"family", "params", "controllers", "input"}
Json to_json(const ClosedLoopSystem& system);
ClosedLoopSystem system_from_json(const Json& j);

Json to_json(const SolverConfig& config);
SolverConfig solver_from_json(const Json& j);

Json to_json(const SweepSpec& spec);
SweepSpec sweep_from_json(const Json& j);

Json to_json(const Equilibrium& eq);
Json to_json(const ConditionReport& report);
Json to_json(const AuditReport& report);
Json to_json(const SweepSummary& summary);

/// Sets `value` at a dotted path ("params.a2", "solver.t_end", "x0.1"). A path
/// without a dot is read as "params.<key>". The text is parsed as JSON when it
/// parses, and kept as a string otherwise. Vary entries on the same path are
/// dropped, so an override pins a swept parameter. Throws std::invalid_argument
/// for a path that does not exist in `spec`.
void apply_override(Json& spec, std::string_view assignment);

/// Shortest decimal text that reads back to the same double, at most 17
/// significant digits.
std::string format_double(double v);

/// Header `t,x1,...,xn,y`, one row per sample.
void write_csv(std::ostream& out, const Trajectory& trajectory);
std::string to_csv(const Trajectory& trajectory);

/// Inverse of write_csv. Throws std::invalid_argument on malformed input.
Trajectory parse_csv(std::string_view text);

/// Fixed-width ASCII table; columns padded to the widest cell.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

}  // namespace umbilic
