#include "umbilic/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace umbilic {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) fail(std::string("'") + what + "' must be a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, key);
}

std::string string_or(const Json& j, const char* key, std::string fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_string()) fail(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from(const Json& j, const char* what) {
  if (!j.is_array()) fail(std::string("'") + what + "' must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

Json values_json(const std::vector<std::pair<std::string, double>>& values) {
  Json o = Json::object();
  for (const auto& [k, v] : values) o[k] = v;
  return o;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Json to_json(const ControllerSpec& spec) {
  Json map = Json::array();
  for (const auto& m : spec.state_map) {
    if (m) {
      map.push_back(*m);
    } else {
      map.push_back(nullptr);
    }
  }
  return Json{{"kind", to_string(spec.kind)},
              {"k", {spec.k[0], spec.k[1], spec.k[2], spec.k[3]}},
              {"germ", spec.include_germ},
              {"sign", spec.sign},
              {"map", map}};
}

ControllerSpec controller_from_json(const Json& j) {
  ControllerSpec spec;
  const auto& kind = require(j, "kind");
  if (!kind.is_string()) fail("'kind' must be a string");
  spec.kind = catastrophe_kind_from_string(kind.get<std::string>());
  const auto& k = require(j, "k");
  if (!k.is_array() || k.size() > 4) fail("'k' must be an array of at most 4 numbers");
  for (std::size_t i = 0; i < k.size(); ++i) spec.k[i] = number(k[i], "k");
  if (auto it = j.find("germ"); it != j.end()) {
    if (!it->is_boolean()) fail("'germ' must be a boolean");
    spec.include_germ = it->get<bool>();
  }
  spec.sign = number_or(j, "sign", 1.0);
  const auto& map = require(j, "map");
  if (!map.is_array()) fail("'map' must be an array");
  for (const auto& m : map) {
    if (m.is_null()) {
      spec.state_map.emplace_back(std::nullopt);
    } else if (m.is_number_integer()) {
      spec.state_map.emplace_back(m.get<int>());
    } else {
      fail("'map' entries must be integers or null");
    }
  }
  spec.validate();
  return spec;
}

Json to_json(const PlantParams& params) {
  Json o = Json::object();
  const auto names = parameter_names(params.family());
  for (std::size_t i = 0; i < names.size(); ++i) o[std::string(names[i])] = params[i];
  return o;
}

PlantParams params_from_json(PlantFamily family, const Json& j) {
  if (!j.is_object()) fail("'params' must be an object");
  auto p = PlantParams::nominal(family);
  for (const auto& [key, value] : j.items()) {
    if (!p.has(key)) {
      fail("unknown parameter '" + key + "' for " + std::string(to_string(family)));
    }
    p.set(key, number(value, key.c_str()));
  }
  return p;
}

Json to_json(const ClosedLoopSystem& system) {
  Json cs = Json::array();
  for (const auto& c : system.controllers()) cs.push_back(to_json(c));
  return Json{{"family", to_string(system.family())},
              {"params", to_json(system.params())},
              {"controllers", cs},
              {"input", system.input_level()}};
}

ClosedLoopSystem system_from_json(const Json& j) {
  const auto family = plant_family_from_string(require(j, "family").get<std::string>());
  auto params = params_from_json(family, j.contains("params") ? j["params"] : Json::object());
  std::vector<ControllerSpec> cs;
  if (auto it = j.find("controllers"); it != j.end()) {
    for (const auto& c : *it) cs.push_back(controller_from_json(c));
  }
  return ClosedLoopSystem::build(std::move(params), std::move(cs), number_or(j, "input", 0.0));
}

Json to_json(const SolverConfig& c) {
  return Json{{"method", to_string(c.method)},   {"step", c.step},
              {"rel_tol", c.rel_tol},            {"abs_tol", c.abs_tol},
              {"t_end", c.t_end},                {"divergence_norm", c.divergence_norm},
              {"record_every", c.record_every}};
}

SolverConfig solver_from_json(const Json& j) {
  if (!j.is_object()) fail("'solver' must be an object");
  SolverConfig c;
  c.method = solver_method_from_string(string_or(j, "method", std::string(to_string(c.method))));
  c.step = number_or(j, "step", c.step);
  c.rel_tol = number_or(j, "rel_tol", c.rel_tol);
  c.abs_tol = number_or(j, "abs_tol", c.abs_tol);
  c.t_end = number_or(j, "t_end", c.t_end);
  c.divergence_norm = number_or(j, "divergence_norm", c.divergence_norm);
  if (auto it = j.find("record_every"); it != j.end()) {
    if (!it->is_number_integer()) fail("'record_every' must be an integer");
    c.record_every = it->get<int>();
  }
  c.validate();
  return c;
}

Json to_json(const SweepSpec& spec) {
  Json cs = Json::array();
  for (const auto& c : spec.controllers) cs.push_back(to_json(c));
  Json vary = Json::array();
  for (const auto& v : spec.vary) {
    vary.push_back(
        {{"path", v.path}, {"from", v.from}, {"to", v.to}, {"step", v.step}, {"axis", v.axis}});
  }
  Json box = Json::array();
  for (const auto& iv : spec.search.box) box.push_back({iv.lo, iv.hi});
  return Json{
      {"name", spec.name},
      {"description", spec.description},
      {"notes", spec.notes},
      {"family", to_string(spec.family())},
      {"params", to_json(spec.base_params)},
      {"controllers", cs},
      {"input", spec.input_level},
      {"vary", vary},
      {"x0", vector_json(spec.x0)},
      {"solver", to_json(spec.solver)},
      {"convergence",
       {{"tol", spec.convergence.tol}, {"window_fraction", spec.convergence.window_fraction}}},
      {"search", {{"box", box}, {"grid_n", spec.search.grid_n}, {"tol", spec.search.tol}}},
  };
}

SweepSpec sweep_from_json(const Json& j) {
  if (!j.is_object()) fail("a scenario must be a JSON object");
  SweepSpec s;
  s.name = string_or(j, "name", "custom");
  s.description = string_or(j, "description", "");
  if (auto it = j.find("notes"); it != j.end()) {
    for (const auto& n : *it) {
      if (!n.is_string()) fail("'notes' must hold strings");
      s.notes.push_back(n.get<std::string>());
    }
  }
  const auto& fam = require(j, "family");
  if (!fam.is_string()) fail("'family' must be a string");
  const auto family = plant_family_from_string(fam.get<std::string>());
  s.base_params = params_from_json(family, j.contains("params") ? j["params"] : Json::object());
  if (auto it = j.find("controllers"); it != j.end()) {
    if (!it->is_array()) fail("'controllers' must be an array");
    for (const auto& c : *it) s.controllers.push_back(controller_from_json(c));
  }
  s.input_level = number_or(j, "input", 0.0);
  if (auto it = j.find("vary"); it != j.end()) {
    if (!it->is_array()) fail("'vary' must be an array");
    for (const auto& v : *it) {
      VaryEntry e;
      e.path = require(v, "path").get<std::string>();
      if (e.path.find('.') == std::string::npos && e.path != "input") e.path = "params." + e.path;
      e.from = number(require(v, "from"), "from");
      e.to = number(require(v, "to"), "to");
      e.step = number(require(v, "step"), "step");
      if (auto a = v.find("axis"); a != v.end()) {
        if (!a->is_number_integer()) fail("'axis' must be an integer");
        e.axis = a->get<int>();
      }
      s.vary.push_back(std::move(e));
    }
  }
  if (auto it = j.find("x0"); it != j.end()) {
    s.x0 = vector_from(*it, "x0");
  } else {
    s.x0 = Eigen::VectorXd::Zero(dimension(family));
  }
  if (auto it = j.find("solver"); it != j.end()) s.solver = solver_from_json(*it);
  if (auto it = j.find("convergence"); it != j.end()) {
    s.convergence.tol = number_or(*it, "tol", s.convergence.tol);
    s.convergence.window_fraction = number_or(*it, "window_fraction", s.convergence.window_fraction);
  }
  if (auto it = j.find("search"); it != j.end()) {
    if (auto b = it->find("box"); b != it->end()) {
      for (const auto& iv : *b) {
        if (!iv.is_array() || iv.size() != 2) fail("'box' entries must be [lo, hi] pairs");
        s.search.box.push_back({number(iv[0], "box"), number(iv[1], "box")});
      }
    }
    if (auto g = it->find("grid_n"); g != it->end()) {
      if (!g->is_number_integer()) fail("'grid_n' must be an integer");
      s.search.grid_n = g->get<int>();
    }
    s.search.tol = number_or(*it, "tol", s.search.tol);
  }
  s.validate();
  return s;
}

Json to_json(const Equilibrium& eq) {
  Json ev = Json::array();
  for (const auto& l : eq.eigenvalues) ev.push_back({l.real(), l.imag()});
  Json j{{"state", vector_json(eq.state)},
         {"eigenvalues", ev},
         {"classification", to_string(eq.classification)},
         {"provenance", to_string(eq.provenance)}};
  j["formula_id"] = eq.formula_id ? Json(*eq.formula_id) : Json(nullptr);
  return j;
}

Json to_json(const ConditionReport& report) {
  Json clauses = Json::array();
  for (const auto& c : report.clauses) {
    clauses.push_back({{"text", c.text},
                       {"relation", c.relation == Relation::greater_than_zero ? "> 0" : "< 0"},
                       {"value", c.value},
                       {"satisfied", c.satisfied}});
  }
  return Json{{"condition_set", report.condition_set},
              {"equilibrium_id", report.equilibrium_id},
              {"clauses", clauses},
              {"all_satisfied", report.all_satisfied}};
}

Json to_json(const AuditReport& report) {
  Json summary = Json::array();
  for (const auto& s : report.summary) {
    summary.push_back({{"condition_set", s.condition_set},
                       {"evaluated", s.evaluated},
                       {"agreed", s.agreed},
                       {"negated", s.negated},
                       {"skipped", s.skipped},
                       {"agreement_rate", s.agreement_rate},
                       {"reversed_agreed", s.reversed_agreed},
                       {"reversed_agreement_rate", s.reversed_agreement_rate},
                       {"systematic_inversion", s.systematic_inversion}});
  }
  Json points = Json::array();
  for (const auto& p : report.points) {
    Json entries = Json::array();
    for (const auto& e : p.entries) {
      Json je{{"condition_set", e.condition_set},
              {"equilibrium_id", e.equilibrium_id},
              {"state", vector_json(e.state)},
              {"claimed_stable", e.claimed_stable},
              {"reversed_stable", e.reversed_stable},
              {"oracle", to_string(e.oracle)}};
      je["agree"] = e.agree ? Json(*e.agree) : Json(nullptr);
      je["skip_reason"] = e.skip_reason;
      je["clause_values"] = e.clause_values;
      entries.push_back(std::move(je));
    }
    points.push_back({{"params", to_json(p.params)}, {"entries", entries}});
  }
  return Json{{"family", to_string(report.family)},
              {"gains", {report.gains[0], report.gains[1], report.gains[2]}},
              {"skipped_points", report.skipped_points},
              {"summary", summary},
              {"points", points}};
}

Json to_json(const SweepSummary& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json row{{"index", r.index}, {"values", values_json(r.values)}, {"verdict", r.verdict}};
    row["attractor"] = r.attractor ? Json(*r.attractor) : Json(nullptr);
    row["settle_time"] = r.settle_time ? Json(*r.settle_time) : Json(nullptr);
    row["final_state"] = vector_json(r.final_state);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  Json attractors = Json::array();
  for (const auto& a : s.attractors) {
    Json ja{{"state", vector_json(a.state)}, {"runs", a.runs}};
    ja["formula_id"] = a.formula_id ? Json(*a.formula_id) : Json(nullptr);
    attractors.push_back(std::move(ja));
  }
  return Json{{"scenario", s.scenario},
              {"runs", s.rows.size()},
              {"converged", s.converged},
              {"diverged", s.diverged},
              {"undecided", s.undecided},
              {"errored", s.errored},
              {"stable_fraction", s.stable_fraction},
              {"attractors", attractors},
              {"rows", rows}};
}

void apply_override(Json& spec, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    fail("override '" + std::string(assignment) + "' must look like key=value");
  }
  std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  if (path.find('.') == std::string::npos && path != "input" && path != "x0" && path != "name") {
    path = "params." + path;
  }

  Json* node = &spec;
  for (const auto& part : split(path, '.')) {
    if (node->is_object()) {
      auto it = node->find(part);
      if (it == node->end()) fail("override path '" + path + "' does not exist");
      node = &*it;
    } else if (node->is_array()) {
      std::size_t idx = 0;
      const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
      if (ec != std::errc() || p != part.data() + part.size() || idx >= node->size()) {
        fail("override path '" + path + "' has a bad index '" + part + "'");
      }
      node = &(*node)[idx];
    } else {
      fail("override path '" + path + "' does not exist");
    }
  }
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  *node = std::move(value);

  if (auto it = spec.find("vary"); it != spec.end() && it->is_array()) {
    auto& vary = *it;
    for (std::size_t i = vary.size(); i-- > 0;) {
      if (vary[i].value("path", "") == path) vary.erase(i);
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
  const auto n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  std::string line = "t";
  for (Eigen::Index i = 0; i < n; ++i) line += ",x" + std::to_string(i + 1);
  line += ",y\n";
  out << line;
  for (std::size_t r = 0; r < trajectory.size(); ++r) {
    line = format_double(trajectory.times[r]);
    const auto& x = trajectory.states[r];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      line += ',';
      line += format_double(x[i]);
    }
    line += ',';
    line += format_double(trajectory.output[r]);
    line += '\n';
    out << line;
  }
}

std::string to_csv(const Trajectory& trajectory) {
  std::ostringstream os;
  write_csv(os, trajectory);
  return os.str();
}

Trajectory parse_csv(std::string_view text) {
  Trajectory t;
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) fail("CSV row is not newline-terminated");
    line = text.substr(pos, nl - pos);
    pos = nl + 1;
    return true;
  };
  std::string_view header;
  if (!next_line(header)) fail("CSV is empty");
  const auto cols = split(header, ',');
  if (cols.size() < 3 || cols.front() != "t" || cols.back() != "y") {
    fail("CSV header must be t,x1,...,xn,y");
  }
  const auto n = static_cast<Eigen::Index>(cols.size() - 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (cols[static_cast<std::size_t>(i) + 1] != "x" + std::to_string(i + 1)) {
      fail("CSV header must be t,x1,...,xn,y");
    }
  }
  std::string_view line;
  while (next_line(line)) {
    const auto fields = split(line, ',');
    if (fields.size() != cols.size()) fail("CSV row has the wrong number of fields");
    std::vector<double> v(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& f = fields[i];
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v[i]);
      if (ec != std::errc() || p != f.data() + f.size()) fail("bad CSV number '" + f + "'");
    }
    t.times.push_back(v.front());
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = v[static_cast<std::size_t>(i) + 1];
    t.states.push_back(std::move(x));
    t.output.push_back(v.back());
  }
  return t;
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], r[c].size());
    }
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < cells.size() ? cells[c] : "";
      line += cell;
      if (c + 1 < width.size()) line += std::string(width[c] - cell.size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + '\n';
  };
  std::string out = emit(header);
  std::string rule;
  for (std::size_t c = 0; c < width.size(); ++c) {
    rule += std::string(width[c], '-');
    if (c + 1 < width.size()) rule += "  ";
  }
  out += rule + '\n';
  for (const auto& r : rows) out += emit(r);
  return out;
}

}  // namespace umbilic
