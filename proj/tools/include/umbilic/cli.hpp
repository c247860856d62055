#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "umbilic/io.hpp"

namespace umbilic::cli {

enum class Verb { list_scenarios, equilibria, check_conditions, audit, run, sweep, plot };

std::string_view to_string(Verb v) noexcept;

/// Bad arguments, unknown names or override paths: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Command {
  Verb verb = Verb::list_scenarios;
  /// Scenario name, path to a scenario JSON file, or (audit only) a family.
  std::string target;
  std::vector<std::string> overrides;  // key=value, in command-line order
  std::filesystem::path output_dir;
  unsigned threads = 0;
  std::optional<std::size_t> index;
  std::optional<std::filesystem::path> export_dir;
  bool help = false;
  std::string help_text;
};

/// `args` excludes the program name. Throws UsageError.
Command parse_command(const std::vector<std::string>& args);

struct RunManifest {
  std::string scenario;
  std::string verb;
  Json spec;
  std::vector<std::string> overrides;
  std::vector<std::string> files;  // relative to the output directory
  Json summary;
  std::string tool_version;
  std::string timestamp;
};

Json to_json(const RunManifest& m);

/// Runs the command, writing artifacts under command.output_dir and a
/// human-readable table to `console`. On failure every file this call created
/// is removed before the exception propagates.
RunManifest execute(const Command& command, std::ostream& console);

/// parse_command + execute with exit codes 0 (success), 1 (runtime failure),
/// 2 (usage error). Messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names within a small edit distance of `name` (or sharing its prefix).
std::vector<std::string> suggestions(const std::string& name,
                                     const std::vector<std::string>& known);

}  // namespace umbilic::cli
