#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nanorod/geometry.hpp"
#include "nanorod/material.hpp"
#include "nanorod/resonance.hpp"

namespace nanorod {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0);
  int line;
};

using ConfigValue = std::variant<double, std::string, std::vector<double>>;

struct ConfigEntry {
  ConfigValue value;
  int line = 0;
};

// `[section]` headers and `key = value` lines. Values are numbers, double-quoted strings or
// number lists `[a, b, c]`; `#` starts a comment. Keys before the first header belong to the
// root section and are addressed without a prefix, others as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  bool has_section(const std::string& section) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  std::string string(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  int line(const std::string& key) const;
  std::vector<std::string> keys() const;

 private:
  const ConfigEntry& at(const std::string& key) const;
  std::map<std::string, ConfigEntry> entries_;
  std::map<std::string, int> sections_;
};

enum class Task { Validate, KernelsCheck, OracleCompare, Scan, Probe, MeshDump };
const char* task_name(Task t);
Task parse_task(const std::string& s);

struct RunConfig {
  Task task = Task::Validate;
  LameMaterial material;
  std::optional<cplx> c;                  // contrast.c0 + i contrast.varrho
  std::optional<ResonanceKind> resonance;  // root `case`
  RodGeometry rod;
  bool rod_given = false;
  std::string H0 = "quad_a", H1 = "zero";
  MeshResolution mesh;
  std::vector<int> n_axial_list;  // oracle-compare may give one n_axial per delta
  double omega = 0.0;

  ScanSpec scan;

  // oracle-compare: probe ring of radius ring_factor * delta at each delta
  std::vector<double> deltas;
  double ring_factor = 10.0;
  int ring_points = 32;
  // optional tolerances; a violated one makes the task fail
  std::optional<double> max_rel_l2, min_ratio;

  // probe: "e1" | "e2" | "e3" for A1, "Rij" for A2
  std::string density = "e1";
  double x0 = 0.0, theta = 0.0;

  // mesh-dump: "none" | "single_layer" | "np_star"
  std::string dump_operator = "none";

  std::string output = "out";
  unsigned long long seed = 1;
  int threads = 0;
};

struct ConfigWarning {
  std::string key;
  int line;
};

// Unknown keys throw in strict mode and are returned as warnings otherwise.
RunConfig run_config_from_text(const std::string& text, bool strict, std::vector<ConfigWarning>* warnings = nullptr);
RunConfig load_run_config(const std::string& path, bool strict, std::vector<ConfigWarning>* warnings = nullptr);

}  // namespace nanorod
