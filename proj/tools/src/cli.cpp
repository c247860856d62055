#include "umbilic/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "umbilic/scenarios.hpp"
#include "umbilic/svg.hpp"

#ifndef UMBILIC_VERSION
#define UMBILIC_VERSION "0.0.0"
#endif

namespace umbilic::cli {

namespace fs = std::filesystem;

namespace {

struct VerbName {
  Verb verb;
  const char* name;
  const char* help;
};

constexpr VerbName kVerbs[] = {
    {Verb::list_scenarios, "list-scenarios", "List built-in scenarios (optionally export them)"},
    {Verb::equilibria, "equilibria", "Closed-form and numeric equilibria of one run"},
    {Verb::check_conditions, "check-conditions", "Evaluate the stability conditions per run"},
    {Verb::audit, "audit", "Audit stability conditions against eigenvalues"},
    {Verb::run, "run", "Integrate a single run of a scenario"},
    {Verb::sweep, "sweep", "Integrate every run of a scenario"},
    {Verb::plot, "plot", "Sweep and render plot.svg"},
};

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool is_family(const std::string& name) {
  try {
    plant_family_from_string(name);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool is_builtin(const std::string& name) {
  const auto& names = builtin_scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string fmt_vec(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt_num(v[i]);
  }
  return s + ")";
}

std::string fmt_eigs(const std::vector<std::complex<double>>& ev) {
  std::string s;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (i) s += ", ";
    s += fmt_num(ev[i].real());
    if (ev[i].imag() != 0.0) {
      s += ev[i].imag() > 0 ? "+" : "-";
      s += fmt_num(std::abs(ev[i].imag())) + "i";
    }
  }
  return s;
}

std::string fmt_values(const std::vector<std::pair<std::string, double>>& values) {
  std::string s;
  for (const auto& [k, v] : values) {
    if (!s.empty()) s += " ";
    const auto dot = k.find('.');
    s += (dot == std::string::npos ? k : k.substr(dot + 1)) + "=" + fmt_num(v);
  }
  return s.empty() ? "-" : s;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Creates files under a root and remembers them so a failed command can be
// rolled back.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& relative, const std::string& content) {
    const fs::path path = root_ / relative;
    ensure_dir(path.parent_path());
    const bool existed = fs::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (!existed) created_files_.push_back(path);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
    files_.push_back(relative);
  }

  const std::vector<std::string>& files() const noexcept { return files_; }

  void rollback() noexcept {
    std::error_code ec;
    for (auto it = created_files_.rbegin(); it != created_files_.rend(); ++it) fs::remove(*it, ec);
    for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it) {
      if (fs::is_empty(*it, ec)) fs::remove(*it, ec);
    }
  }

 private:
  void ensure_dir(const fs::path& dir) {
    if (dir.empty() || fs::is_directory(dir)) return;
    ensure_dir(dir.parent_path());
    std::error_code ec;
    if (!fs::create_directory(dir, ec) && !fs::is_directory(dir)) {
      throw std::runtime_error("cannot create directory " + dir.string() +
                               (ec ? ": " + ec.message() : ""));
    }
    created_dirs_.push_back(dir);
  }

  fs::path root_;
  std::vector<fs::path> created_files_;
  std::vector<fs::path> created_dirs_;
  std::vector<std::string> files_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool is_solver_override(const std::string& o) { return o.rfind("solver.", 0) == 0; }

// Scenario JSON with overrides applied. Changing anything but the solver
// re-plans the horizon; solver overrides are applied last so they stick.
SweepSpec resolve_spec(const Command& cmd, Json& resolved) {
  Json j;
  bool plan = false;
  if (is_builtin(cmd.target)) {
    j = to_json(builtin_scenario(cmd.target));
  } else {
    try {
      j = Json::parse(read_file(cmd.target));
    } catch (const Json::parse_error& e) {
      throw UsageError(cmd.target + ": " + e.what());
    }
    plan = !j.contains("solver");
  }
  auto apply = [&](bool solver) {
    for (const auto& o : cmd.overrides) {
      if (is_solver_override(o) != solver) continue;
      try {
        apply_override(j, o);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  };
  apply(false);
  plan = plan || std::any_of(cmd.overrides.begin(), cmd.overrides.end(),
                             [](const auto& o) { return !is_solver_override(o); });
  SweepSpec spec;
  try {
    spec = sweep_from_json(j);
    if (plan) {
      apply_horizon(spec);
      j = to_json(spec);
    }
    apply(true);
    spec = sweep_from_json(j);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("invalid scenario: " + std::string(e.what()));
  }
  resolved = to_json(spec);
  return spec;
}

std::size_t run_index(const Command& cmd, const SweepSpec& spec) {
  const std::size_t i = cmd.index.value_or(0);
  if (i >= spec.run_count()) {
    throw UsageError("--index " + std::to_string(i) + " out of range; " + spec.name + " has " +
                     std::to_string(spec.run_count()) + " runs");
  }
  return i;
}

Json summary_of(const SweepResult& result, std::ostream& console) {
  const auto s = summarize(result);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : s.rows) {
    std::string attractor = "-";
    if (r.attractor) attractor = "#" + std::to_string(*r.attractor) + " " +
                                 fmt_vec(s.attractors[*r.attractor].state);
    rows.push_back({std::to_string(r.index), fmt_values(r.values),
                    r.verdict == "error" ? "error: " + r.error : r.verdict, attractor,
                    r.settle_time ? fmt_num(*r.settle_time) : "-"});
  }
  console << render_table({"run", "values", "verdict", "attractor", "settle_time"}, rows);
  console << "runs " << s.rows.size() << ": converged " << s.converged << ", diverged "
          << s.diverged << ", undecided " << s.undecided << ", errored " << s.errored
          << "; stable fraction " << fmt_num(s.stable_fraction) << "; distinct attractors "
          << s.attractors.size() << "\n";
  return to_json(s);
}

void write_runs(ArtifactWriter& w, const SweepResult& result) {
  for (const auto& run : result.runs) {
    if (run.errored()) continue;
    w.write("runs/run_" + std::to_string(run.index) + ".csv", to_csv(run.trajectory));
  }
}

void finish(ArtifactWriter& w, RunManifest& m, const std::string& report_name, const Json& report) {
  w.write(report_name, report.dump(2) + "\n");
  m.files = w.files();
  w.write("manifest.json", to_json(m).dump(2) + "\n");
}

RunManifest list_scenarios(const Command& cmd, std::ostream& console) {
  RunManifest m;
  m.verb = "list-scenarios";
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : builtin_scenarios()) {
    rows.push_back({s.name, std::string(to_string(s.family())), std::to_string(s.run_count()),
                    fmt_num(s.solver.t_end), s.description});
  }
  console << render_table({"name", "family", "runs", "t_end", "description"}, rows);
  if (cmd.export_dir) {
    ArtifactWriter w(*cmd.export_dir);
    try {
      for (const auto& s : builtin_scenarios()) {
        w.write(s.name + ".json", to_json(s).dump(2) + "\n");
      }
    } catch (...) {
      w.rollback();
      throw;
    }
    m.files = w.files();
    console << "exported " << m.files.size() << " scenarios to " << cmd.export_dir->string()
            << "\n";
  }
  return m;
}

Json equilibria_report(const Command& cmd, const SweepSpec& spec, std::ostream& console) {
  const auto i = run_index(cmd, spec);
  const auto system = spec.system(i);
  std::vector<Equilibrium> eqs;
  std::string closed_form_note;
  if (system.input_level() == 0.0) {
    try {
      eqs = closed_form_equilibria(system);
    } catch (const std::exception& e) {
      closed_form_note = e.what();
    }
  } else {
    closed_form_note = "nonzero input; closed forms assume zero input";
  }
  auto box = spec.search.box;
  if (box.empty()) box.assign(static_cast<std::size_t>(system.dimension()), Interval{-10.0, 10.0});
  for (auto& e : find_equilibria_numeric(system, box, spec.search.grid_n, spec.search.tol)) {
    eqs.push_back(std::move(e));
  }

  std::vector<std::vector<std::string>> rows;
  Json list = Json::array();
  for (const auto& e : eqs) {
    rows.push_back({e.formula_id.value_or("-"), std::string(to_string(e.provenance)),
                    fmt_vec(e.state), std::string(to_string(e.classification)),
                    fmt_eigs(e.eigenvalues)});
    list.push_back(to_json(e));
  }
  console << spec.name << " run " << i << " (" << fmt_values(spec.assignment(i)) << ")\n";
  if (!closed_form_note.empty()) console << "closed form: " << closed_form_note << "\n";
  console << render_table({"id", "provenance", "state", "class", "eigenvalues"}, rows);
  Json report{{"scenario", spec.name}, {"run", i}, {"system", to_json(system)}};
  report["closed_form_note"] = closed_form_note;
  report["equilibria"] = list;
  return report;
}

Json conditions_report(const Command& cmd, const SweepSpec& spec, std::ostream& console) {
  std::vector<std::size_t> indices;
  if (cmd.index) {
    indices.push_back(run_index(cmd, spec));
  } else {
    for (std::size_t i = 0; i < spec.run_count(); ++i) indices.push_back(i);
  }
  const auto sets = condition_sets(spec.family());
  if (sets.empty()) {
    throw std::runtime_error("no stability conditions for the " +
                             std::string(to_string(spec.family())) + " family");
  }
  Json runs = Json::array();
  std::vector<std::vector<std::string>> rows;
  for (const auto i : indices) {
    const auto system = spec.system(i);
    const auto gains = deployed_gains(system);
    if (!gains) {
      throw std::runtime_error(spec.name + " does not carry the deployed control law");
    }
    std::vector<Equilibrium> eqs;
    try {
      eqs = closed_form_equilibria(ClosedLoopSystem::build(system.params(), system.controllers()));
    } catch (const std::exception&) {
    }
    Json reports = Json::array();
    for (const auto& [label, eq_id] : sets) {
      const auto rep = eval_stability_conditions(system.params(), *gains, label);
      std::string oracle = "-";
      for (const auto& e : eqs) {
        if (e.formula_id == eq_id) oracle = std::string(to_string(e.classification));
      }
      for (std::size_t c = 0; c < rep.clauses.size(); ++c) {
        const auto& cl = rep.clauses[c];
        rows.push_back({c == 0 ? std::to_string(i) : "", c == 0 ? label : "", cl.text,
                        fmt_num(cl.value), cl.satisfied ? "yes" : "no",
                        c == 0 ? (rep.all_satisfied ? "stable" : "not stable") : "",
                        c == 0 ? oracle : ""});
      }
      auto jr = to_json(rep);
      jr["oracle"] = oracle;
      reports.push_back(std::move(jr));
    }
    runs.push_back({{"run", i},
                    {"values", Json::object()},
                    {"conditions", reports}});
    for (const auto& [k, v] : spec.assignment(i)) runs.back()["values"][k] = v;
  }
  console << render_table({"run", "set", "clause", "value", "holds", "claimed", "eigenvalues"},
                          rows);
  return Json{{"scenario", spec.name}, {"runs", runs}};
}

Json audit_report(const AuditSetup& setup, std::ostream& console) {
  const auto report = audit_conditions(setup.family, setup.grid, setup.gains);
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : report.summary) {
    std::string eq_id;
    for (const auto& [label, id] : condition_sets(setup.family)) {
      if (label == s.condition_set) eq_id = id;
    }
    rows.push_back({s.condition_set, eq_id, std::to_string(s.evaluated), std::to_string(s.agreed),
                    std::to_string(s.negated), std::to_string(s.skipped),
                    fmt_num(s.agreement_rate), fmt_num(s.reversed_agreement_rate),
                    s.systematic_inversion ? "YES" : "no"});
  }
  console << "audit " << to_string(setup.family) << ": " << setup.description << " ("
          << setup.grid.size() << " points)\n";
  console << render_table(
      {"set", "equilibrium", "evaluated", "agreed", "negated", "skipped", "agreement",
       "reversed", "inverted"},
      rows);
  auto j = to_json(report);
  j["description"] = setup.description;
  return j;
}

}  // namespace

std::string_view to_string(Verb v) noexcept {
  for (const auto& e : kVerbs) {
    if (e.verb == v) return e.name;
  }
  return "unknown";
}

std::vector<std::string> suggestions(const std::string& name,
                                     const std::vector<std::string>& known) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& k : known) {
    const auto d = edit_distance(name, k);
    const bool prefix = !name.empty() && (k.rfind(name, 0) == 0 || name.rfind(k, 0) == 0);
    if (d <= 2 || prefix) scored.emplace_back(prefix ? 0 : d, k);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (const auto& [d, k] : scored) out.push_back(k);
  return out;
}

Command parse_command(const std::vector<std::string>& args) {
  CLI::App app{"Catastrophe-theory controllers: equilibria, condition audits and sweeps",
               "umbilic"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UMBILIC_VERSION);

  Command cmd;
  std::string out;
  for (const auto& v : kVerbs) {
    auto* sub = app.add_subcommand(v.name, v.help);
    sub->callback([&cmd, verb = v.verb] { cmd.verb = verb; });
    if (v.verb == Verb::list_scenarios) {
      sub->add_option("--export", cmd.export_dir, "Write every scenario as <name>.json here");
      continue;
    }
    sub->add_option("target", cmd.target,
                    v.verb == Verb::audit ? "Family name, scenario name or scenario JSON path"
                                          : "Scenario name or scenario JSON path")
        ->required();
    sub->add_option("--out", out, "Output directory (default: $UMBILIC_OUT or ./out)");
    sub->add_option("--set", cmd.overrides, "Override key=value (dotted path)")
        ->allow_extra_args(false);
    if (v.verb == Verb::sweep || v.verb == Verb::plot) {
      sub->add_option("--threads", cmd.threads, "Worker threads (0 = all cores)");
    }
    if (v.verb == Verb::equilibria || v.verb == Verb::check_conditions || v.verb == Verb::run) {
      sub->add_option("--index", cmd.index, "Run index within the sweep");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    cmd.help = true;
    cmd.help_text = app.help();
    return cmd;
  } catch (const CLI::CallForVersion&) {
    cmd.help = true;
    cmd.help_text = std::string(UMBILIC_VERSION) + "\n";
    return cmd;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what() + std::string("\n") + app.help());
  }

  for (const auto& o : cmd.overrides) {
    if (o.find('=') == std::string::npos || o.front() == '=') {
      throw UsageError("--set expects key=value, got '" + o + "'");
    }
  }
  if (!out.empty()) {
    cmd.output_dir = out;
  } else if (const char* env = std::getenv("UMBILIC_OUT"); env && *env) {
    cmd.output_dir = env;
  } else {
    cmd.output_dir = "out";
  }

  if (cmd.verb != Verb::list_scenarios) {
    const bool known = is_builtin(cmd.target) || (cmd.verb == Verb::audit && is_family(cmd.target));
    if (!known && !(cmd.target.size() > 5 && cmd.target.ends_with(".json") &&
                    fs::is_regular_file(cmd.target))) {
      auto names = builtin_scenario_names();
      if (cmd.verb == Verb::audit) {
        for (auto f : kAllPlantFamilies) names.emplace_back(to_string(f));
      }
      std::string msg = "unknown scenario '" + cmd.target + "'";
      const auto close = suggestions(cmd.target, names);
      if (!close.empty()) {
        msg += "; did you mean";
        for (std::size_t i = 0; i < close.size() && i < 3; ++i) msg += (i ? ", " : " ") + close[i];
        msg += "?";
      } else {
        msg += "; run 'umbilic list-scenarios' for the list";
      }
      throw UsageError(msg);
    }
  }
  return cmd;
}

Json to_json(const RunManifest& m) {
  return Json{{"tool", "umbilic"},
              {"tool_version", m.tool_version},
              {"timestamp", m.timestamp},
              {"verb", m.verb},
              {"scenario", m.scenario},
              {"overrides", m.overrides},
              {"spec", m.spec},
              {"files", m.files},
              {"summary", m.summary}};
}

RunManifest execute(const Command& cmd, std::ostream& console) {
  if (cmd.verb == Verb::list_scenarios) return list_scenarios(cmd, console);

  RunManifest m;
  m.verb = std::string(to_string(cmd.verb));
  m.overrides = cmd.overrides;
  m.tool_version = UMBILIC_VERSION;
  m.timestamp = timestamp_utc();

  ArtifactWriter w(cmd.output_dir);
  try {
    if (cmd.verb == Verb::audit && is_family(cmd.target) && !is_builtin(cmd.target)) {
      if (!cmd.overrides.empty()) throw UsageError("--set applies to scenario targets only");
      m.scenario = cmd.target;
      AuditSetup setup;
      try {
        setup = builtin_audit(plant_family_from_string(cmd.target));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const auto report = audit_report(setup, console);
      m.spec = Json{{"family", cmd.target}, {"gains", setup.gains}};
      m.summary = report["summary"];
      finish(w, m, "report.json", report);
      console << "wrote " << m.files.size() + 1 << " files to " << cmd.output_dir.string()
              << "\n";
      return m;
    }

    Json resolved;
    const auto spec = resolve_spec(cmd, resolved);
    m.scenario = spec.name;
    m.spec = resolved;

    switch (cmd.verb) {
      case Verb::equilibria:
        finish(w, m, "report.json", equilibria_report(cmd, spec, console));
        break;
      case Verb::check_conditions:
        finish(w, m, "report.json", conditions_report(cmd, spec, console));
        break;
      case Verb::audit: {
        AuditSetup setup;
        try {
          setup = audit_from_sweep(spec);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
        const auto report = audit_report(setup, console);
        m.summary = report["summary"];
        finish(w, m, "report.json", report);
        break;
      }
      case Verb::run: {
        SweepResult result;
        result.spec = spec;
        result.runs.push_back(run_one(spec, run_index(cmd, spec)));
        write_runs(w, result);
        m.summary = summary_of(result, console);
        finish(w, m, "summary.json", m.summary);
        break;
      }
      case Verb::sweep:
      case Verb::plot: {
        const auto result = run_sweep(spec, cmd.threads);
        write_runs(w, result);
        m.summary = summary_of(result, console);
        if (cmd.verb == Verb::plot) w.write("plot.svg", render_svg(result));
        finish(w, m, "summary.json", m.summary);
        break;
      }
      case Verb::list_scenarios:
        break;
    }
  } catch (...) {
    w.rollback();
    throw;
  }
  console << "wrote " << m.files.size() + 1 << " files to " << cmd.output_dir.string() << "\n";
  return m;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command cmd;
  try {
    cmd = parse_command(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  if (cmd.help) {
    out << cmd.help_text;
    return 0;
  }
  try {
    execute(cmd, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace umbilic::cli
