#include "nanorod/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nanorod/fields.hpp"

namespace nanorod {

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line(line) {}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  return true;
}

double parse_number(const std::string& s, int line) {
  const std::string t = trim(s);
  double v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError("not a number: '" + t + "'", line);
  if (!std::isfinite(v)) throw ConfigError("non-finite number: '" + t + "'", line);
  return v;
}

// strips a trailing comment that is not inside a string
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("missing value", line);
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError("unterminated string", line);
    const std::string inner = v.substr(1, v.size() - 2);
    if (inner.find('"') != std::string::npos) throw ConfigError("stray quote in string", line);
    return inner;
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError("unterminated list", line);
    std::vector<double> out;
    const std::string inner = trim(v.substr(1, v.size() - 2));
    if (inner.empty()) return out;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
    if (inner.back() == ',') throw ConfigError("trailing comma in list", line);
    return out;
  }
  return parse_number(v, line);
}

const char* type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "number";
    case 1: return "string";
    default: return "list";
  }
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile f;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_name(section)) throw ConfigError("invalid section name '" + section + "'", line);
      if (f.sections_.count(section)) throw ConfigError("duplicate section [" + section + "]", line);
      f.sections_[section] = line;
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    if (!valid_name(key)) throw ConfigError("invalid key '" + key + "'", line);
    const std::string full = section.empty() ? key : section + "." + key;
    if (f.entries_.count(full)) throw ConfigError("duplicate key '" + full + "'", line);
    f.entries_[full] = {parse_value(s.substr(eq + 1), line), line};
  }
  return f;
}

bool ConfigFile::has_section(const std::string& section) const { return sections_.count(section) > 0; }

const ConfigEntry& ConfigFile::at(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double ConfigFile::number(const std::string& key) const {
  const ConfigEntry& e = at(key);
  if (const double* v = std::get_if<double>(&e.value)) return *v;
  throw ConfigError("key '" + key + "' expects a number, got a " + type_name(e.value), e.line);
}

int ConfigFile::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError("key '" + key + "' expects an integer", line(key));
  return static_cast<int>(v);
}

std::string ConfigFile::string(const std::string& key) const {
  const ConfigEntry& e = at(key);
  if (const std::string* v = std::get_if<std::string>(&e.value)) return *v;
  throw ConfigError("key '" + key + "' expects a string, got a " + type_name(e.value), e.line);
}

std::vector<double> ConfigFile::list(const std::string& key) const {
  const ConfigEntry& e = at(key);
  if (const auto* v = std::get_if<std::vector<double>>(&e.value)) return *v;
  if (const double* v = std::get_if<double>(&e.value)) return {*v};
  throw ConfigError("key '" + key + "' expects a list, got a " + type_name(e.value), e.line);
}

int ConfigFile::line(const std::string& key) const { return at(key).line; }

std::vector<std::string> ConfigFile::keys() const {
  std::vector<std::string> k;
  for (const auto& [name, e] : entries_) k.push_back(name);
  return k;
}

const char* task_name(Task t) {
  switch (t) {
    case Task::Validate: return "validate";
    case Task::KernelsCheck: return "kernels-check";
    case Task::OracleCompare: return "oracle-compare";
    case Task::Scan: return "scan";
    case Task::Probe: return "probe";
    case Task::MeshDump: return "mesh-dump";
  }
  return "?";
}

Task parse_task(const std::string& s) {
  for (Task t : {Task::Validate, Task::KernelsCheck, Task::OracleCompare, Task::Scan, Task::Probe, Task::MeshDump})
    if (s == task_name(t)) return t;
  throw ConfigError("unknown task '" + s + "'");
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> k = {
      "task", "output", "seed", "threads", "case", "param", "values", "omega", "deltas", "ring_factor",
      "ring_points", "max_rel_l2", "min_ratio", "density", "x0", "theta", "level", "r_in", "r_out", "dump_operator",
      "material.lambda", "material.mu", "contrast.c0", "contrast.varrho", "rod.L", "rod.delta",
      "field.H0", "field.H1", "mesh.n_axial", "mesh.n_theta", "mesh.n_cap"};
  return k;
}

template <class F>
auto keyed(const ConfigFile& f, const std::string& key, F&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what(), f.line(key));
  }
}

bool needs_rod(Task t) { return t != Task::Validate && t != Task::KernelsCheck; }

}  // namespace

RunConfig run_config_from_text(const std::string& text, bool strict, std::vector<ConfigWarning>* warnings) {
  const ConfigFile f = ConfigFile::parse(text);
  for (const std::string& k : f.keys())
    if (!known_keys().count(k)) {
      if (strict) throw ConfigError("unknown key '" + k + "'", f.line(k));
      if (warnings) warnings->push_back({k, f.line(k)});
    }

  RunConfig rc;
  rc.task = keyed(f, "task", [&] { return parse_task(f.string("task")); });
  if (f.has("output")) rc.output = f.string("output");
  if (f.has("seed")) {
    const double s = f.number("seed");
    if (s < 0 || s != std::floor(s)) throw ConfigError("seed must be a non-negative integer", f.line("seed"));
    rc.seed = static_cast<unsigned long long>(s);
  }
  if (f.has("threads")) rc.threads = f.integer("threads");

  const double lam = f.has("material.lambda") ? f.number("material.lambda") : 1.0;
  const double mu = f.has("material.mu") ? f.number("material.mu") : 1.0;
  rc.material = keyed(f, f.has("material.mu") ? "material.mu" : "material.lambda",
                      [&] { return make_material(lam, mu); });

  if (f.has("rod.L") || f.has("rod.delta") || f.has_section("rod") || needs_rod(rc.task)) {
    const double L = f.number("rod.L");
    const double d = f.number("rod.delta");
    rc.rod = keyed(f, "rod.delta", [&] { return build_rod(L, d); });
    rc.rod_given = true;
  }

  if (f.has("contrast.c0") || f.has("contrast.varrho")) {
    const double c0 = f.number("contrast.c0");
    const double vr = f.has("contrast.varrho") ? f.number("contrast.varrho") : 0.0;
    rc.c = cplx(c0, vr);
    // c = 1 has no lambda1 but is the trivial oracle-compare configuration
    if (rc.task != Task::OracleCompare || *rc.c != cplx(1.0))
      keyed(f, "contrast.c0", [&] { return contrast(*rc.c); });
  }
  if (f.has("case")) {
    const int k = f.integer("case");
    if (k < 1 || k > 4) throw ConfigError("case must be 1, 2, 3 or 4", f.line("case"));
    rc.resonance = static_cast<ResonanceKind>(k - 1);
  }

  if (f.has("field.H0")) rc.H0 = f.string("field.H0");
  if (f.has("field.H1")) rc.H1 = f.string("field.H1");
  keyed(f, f.has("field.H0") ? "field.H0" : "task", [&] { return builtin_field(rc.H0); });
  keyed(f, f.has("field.H1") ? "field.H1" : "task", [&] { return builtin_field(rc.H1); });

  if (f.has("mesh.n_axial")) {
    for (double v : f.list("mesh.n_axial")) {
      if (v != std::floor(v) || v < 4 || static_cast<int>(v) % kPanelOrder != 0)
        throw ConfigError("mesh.n_axial must hold positive multiples of 4", f.line("mesh.n_axial"));
      rc.n_axial_list.push_back(static_cast<int>(v));
    }
    if (rc.n_axial_list.empty()) throw ConfigError("mesh.n_axial must not be empty", f.line("mesh.n_axial"));
    rc.mesh.n_axial = rc.n_axial_list.front();
  }
  if (f.has("mesh.n_theta")) rc.mesh.n_theta = f.integer("mesh.n_theta");
  if (f.has("mesh.n_cap")) rc.mesh.n_cap = f.integer("mesh.n_cap");
  if (rc.mesh.n_axial < 4 || rc.mesh.n_axial % kPanelOrder != 0)
    throw ConfigError("mesh.n_axial must be a positive multiple of 4", f.has("mesh.n_axial") ? f.line("mesh.n_axial") : 0);
  if (rc.mesh.n_theta < 8 || rc.mesh.n_theta % 2 != 0)
    throw ConfigError("mesh.n_theta must be even and >= 8", f.has("mesh.n_theta") ? f.line("mesh.n_theta") : 0);
  if (rc.mesh.n_cap < 2) throw ConfigError("mesh.n_cap must be >= 2", f.has("mesh.n_cap") ? f.line("mesh.n_cap") : 0);

  if (f.has("omega")) rc.omega = f.number("omega");
  if (rc.omega < 0) throw ConfigError("omega must be non-negative", f.line("omega"));

  if (rc.task == Task::Scan) {
    if (!rc.resonance) throw ConfigError("missing required key 'case'");
    rc.scan.param = keyed(f, "param", [&] { return parse_scan_param(f.string("param")); });
    rc.scan.values = f.list("values");
    if (rc.scan.values.empty()) throw ConfigError("values must not be empty", f.line("values"));
    if (rc.c) {
      rc.scan.c0 = rc.c->real();
      if (rc.c->imag() != 0.0) rc.scan.varrho = rc.c->imag();
    }
  }
  if (f.has("level")) rc.scan.shell.level = f.integer("level");
  if (f.has("r_in")) rc.scan.shell.r_in = f.number("r_in");
  if (f.has("r_out")) rc.scan.shell.r_out = f.number("r_out");
  if (!(rc.scan.shell.r_in > 0 && rc.scan.shell.r_out > rc.scan.shell.r_in))
    throw ConfigError("shell needs 0 < r_in < r_out", f.has("r_in") ? f.line("r_in") : 0);
  if (rc.scan.shell.level < 0 || rc.scan.shell.level > 4)
    throw ConfigError("level must be in [0, 4]", f.line("level"));

  if (rc.task == Task::OracleCompare) {
    if (!rc.c) throw ConfigError("missing required key 'contrast.c0'");
    rc.deltas = f.has("deltas") ? f.list("deltas") : std::vector<double>{rc.rod.delta};
    if (rc.n_axial_list.size() > 1 && rc.n_axial_list.size() != rc.deltas.size())
      throw ConfigError("mesh.n_axial needs one entry or one per delta", f.line("mesh.n_axial"));
    for (double d : rc.deltas)
      if (!(d > 0 && d < rc.rod.L / 2)) throw ConfigError("deltas must lie in (0, L/2)", f.line("deltas"));
  }
  if (f.has("ring_factor")) rc.ring_factor = f.number("ring_factor");
  if (f.has("ring_points")) rc.ring_points = f.integer("ring_points");
  if (f.has("max_rel_l2")) rc.max_rel_l2 = f.number("max_rel_l2");
  if (f.has("min_ratio")) rc.min_ratio = f.number("min_ratio");
  if (rc.ring_factor <= 1.0) throw ConfigError("ring_factor must exceed 1", f.line("ring_factor"));
  if (rc.ring_points < 4) throw ConfigError("ring_points must be >= 4", f.line("ring_points"));

  if (f.has("density")) rc.density = f.string("density");
  if (f.has("x0")) rc.x0 = f.number("x0");
  if (f.has("theta")) rc.theta = f.number("theta");
  if (rc.n_axial_list.size() > 1 && rc.task != Task::OracleCompare)
    throw ConfigError("a list of mesh.n_axial values is only meaningful for oracle-compare", f.line("mesh.n_axial"));
  if (rc.task == Task::Probe) {
    const std::string& d = rc.density;
    const bool a1 = d == "e1" || d == "e2" || d == "e3";
    const bool a2 = d.size() == 3 && d[0] == 'R' && d[1] >= '1' && d[1] <= '3' && d[2] >= '1' && d[2] <= '3';
    if (!a1 && !a2) throw ConfigError("density must be e1, e2, e3 or Rij", f.has("density") ? f.line("density") : 0);
    if (!(std::abs(rc.x0) < rc.rod.L / 2)) throw ConfigError("x0 must lie inside the rod", f.line("x0"));
  }

  if (f.has("dump_operator")) {
    rc.dump_operator = f.string("dump_operator");
    if (rc.dump_operator != "none" && rc.dump_operator != "single_layer" && rc.dump_operator != "np_star")
      throw ConfigError("dump_operator must be none, single_layer or np_star", f.line("dump_operator"));
  }
  return rc;
}

RunConfig load_run_config(const std::string& path, bool strict, std::vector<ConfigWarning>* warnings) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_text(ss.str(), strict, warnings);
}

}  // namespace nanorod
