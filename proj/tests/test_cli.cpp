#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nanorod/cli.hpp"
#include "nanorod/io.hpp"
#include "nanorod/potentials.hpp"

using namespace nanorod;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("nanorod_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
  std::string file(const std::string& n) const { return (path / n).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_text(const std::string& text, const TempDir& dir, std::string* out_text = nullptr,
             std::string* err_text = nullptr) {
  const std::string cfg = dir.file("run.cfg");
  write_text(cfg, text);
  std::ostringstream out, err;
  CliOverrides ov;
  ov.out = dir.file("out");
  const int rc = run_config(cfg, true, std::nullopt, ov, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

nlohmann::json summary(const TempDir& dir) { return nlohmann::json::parse(slurp(dir.file("out/summary.json"))); }

}  // namespace

TEST_CASE("config parser") {
  const ConfigFile f = ConfigFile::parse(
      "task = \"scan\"  # trailing comment\n"
      "values = [10, 1e2, 1000]\n"
      "\n"
      "[material]\n"
      "lambda = 2\n"
      "mu = 1.5\n");
  CHECK(f.string("task") == "scan");
  CHECK(f.list("values") == std::vector<double>{10, 100, 1000});
  CHECK(f.number("material.lambda") == 2.0);
  CHECK(f.list("material.mu") == std::vector<double>{1.5});
  CHECK(f.line("material.mu") == 6);
  CHECK(f.has_section("material"));
  CHECK_FALSE(f.has_section("rod"));
  CHECK_THROWS_AS(f.integer("material.mu"), ConfigError);
  CHECK_THROWS_AS(f.number("task"), ConfigError);
}

TEST_CASE("config parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      ConfigFile::parse(text);
    } catch (const ConfigError& e) {
      return e.line;
    }
    return -1;
  };
  CHECK(line_of("a = 1\n[rod\nL = 2\n") == 2);
  CHECK(line_of("a = 1\nb = \n") == 2);
  CHECK(line_of("a = 1\n\n\nnot a pair\n") == 4);
  CHECK(line_of("a = 1\na = 2\n") == 2);
  CHECK(line_of("x = [1, two]\n") == 1);
  CHECK(line_of("s = \"open\n") == 1);
  try {
    ConfigFile::parse("ok = 1\n[rod\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
  }
}

TEST_CASE("run config validation") {
  try {
    run_config_from_text("task = \"oracle-compare\"\n[rod]\nL = 2\n", true);
    FAIL("missing delta accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing required key 'rod.delta'") != std::string::npos);
  }
  CHECK_THROWS_AS(run_config_from_text("task = \"validate\"\nfoo = 1\n", true), ConfigError);
  std::vector<ConfigWarning> w;
  const RunConfig rc = run_config_from_text("task = \"validate\"\nfoo = 1\n", false, &w);
  REQUIRE(w.size() == 1);
  CHECK(w[0].key == "foo");
  CHECK(w[0].line == 2);
  CHECK(rc.task == Task::Validate);
  CHECK_FALSE(rc.rod_given);
  CHECK_THROWS_AS(run_config_from_text("task = \"explode\"\n", true), ConfigError);
  CHECK_THROWS_AS(run_config_from_text("task = \"scan\"\n[rod]\nL = 2\ndelta = 0.1\n", true), ConfigError);
  CHECK_THROWS_AS(run_config_from_text("task = \"validate\"\n[material]\nlambda = -1\nmu = 1\n", true),
                  ConfigError);
  CHECK_THROWS_AS(run_config_from_text("task = \"probe\"\ndensity = \"e4\"\n[rod]\nL = 2\ndelta = 0.1\n", true),
                  ConfigError);
  const RunConfig s = run_config_from_text(
      "task = \"scan\"\ncase = 4\nparam = \"c0\"\nvalues = [10, 100, 1000]\n[rod]\nL = 2\ndelta = 0.1\n", true);
  CHECK(s.resonance == ResonanceKind::Case4);
  CHECK(s.scan.param == ScanParam::C0);
  CHECK(s.scan.values.size() == 3);
  CHECK(parse_task("kernels-check") == Task::KernelsCheck);
  CHECK(std::string(task_name(Task::MeshDump)) == "mesh-dump");
}

TEST_CASE("writers") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  ScanTable t;
  t.rows = {{10, 1.5, 0.1, 2.0}, {100, 150, 10, 2.0}};
  const std::string csv = scan_csv(t);
  CHECK(csv.rfind("param,energy,tail_bound,cond_estimate\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  SlopeFit f;
  f.slope = 2;
  f.window_lo = 10;
  f.window_hi = 1000;
  f.points = 3;
  const nlohmann::json j = nlohmann::json::parse(fit_json(f));
  CHECK(j["slope"] == 2.0);
  CHECK(j["window"][1] == 1000.0);
  CHECK(j["admissible"] == false);
  for (const char* k : {"slope", "intercept", "r2", "window"}) CHECK(j.contains(k));
  std::vector<CompareRow> rows{{Vec3(0, 1, 0), Eigen::Vector3cd(1, 0, 0), Eigen::Vector3cd(1.1, 0, 0)}};
  CHECK(compare_csv(rows).rfind(
            "x1,x2,x3,re_ux,re_uy,re_uz,im_ux,im_uy,im_uz,asym_ux,asym_uy,asym_uz,abs_diff\n", 0) == 0);
  CHECK(relative_l2(rows) == doctest::Approx(0.1));
  rows[0].numeric.setZero();
  rows[0].asymptotic.setZero();
  CHECK(relative_l2(rows) == 0.0);
}

TEST_CASE("validate task") {
  TempDir d("validate");
  std::string out;
  CHECK(run_text("task = \"validate\"\n[mesh]\nn_axial = 16\nn_theta = 8\nn_cap = 4\n", d, &out) == kExitOk);
  CHECK(out.rfind("validate: PASS", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 1);
  CHECK(summary(d)["pass"] == true);
}

TEST_CASE("missing key exits with a config error") {
  TempDir d("missing");
  std::string err;
  CHECK(run_text("task = \"probe\"\n[rod]\nL = 2\n", d, nullptr, &err) == kExitConfig);
  CHECK(err.find("missing required key 'rod.delta'") != std::string::npos);
  CHECK(run_text("task = \"validate\"\nthreds = 2\n", d, nullptr, &err) == kExitConfig);
  CHECK(err.find("line 2") != std::string::npos);
}

TEST_CASE("subcommand must match the config task") {
  TempDir d("mismatch");
  write_text(d.file("v.cfg"), "task = \"validate\"\n");
  std::ostringstream out, err;
  CHECK(run_config(d.file("v.cfg"), false, Task::Scan, {}, out, err) == kExitConfig);
  CHECK(run_config(d.file("nope.cfg"), false, std::nullopt, {}, out, err) == kExitConfig);
}

TEST_CASE("scan task writes csv and fit") {
  TempDir d("scan");
  std::string out;
  const std::string cfg =
      "task = \"scan\"\ncase = 4\nparam = \"c0\"\nvalues = [10, 100, 1000]\n"
      "[field]\nH0 = \"lin_rot\"\n[material]\nlambda = 1\nmu = 1\n[rod]\nL = 2\ndelta = 0.1\n";
  CHECK(run_text(cfg, d, &out) == kExitOk);
  const std::string csv = slurp(d.file("out/scan.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  const nlohmann::json fit = nlohmann::json::parse(slurp(d.file("out/fit.json")));
  CHECK(fit["points"] == 3);
  CHECK(fit["admissible"] == false);
  CHECK(out.find("admissible=no") != std::string::npos);

  // identical config gives bit-identical output
  TempDir d2("scan2");
  CHECK(run_text(cfg, d2) == kExitOk);
  CHECK(slurp(d2.file("out/scan.csv")) == csv);
  CHECK(slurp(d2.file("out/fit.json")) == slurp(d.file("out/fit.json")));
}

TEST_CASE("oracle-compare trivial configurations") {
  TempDir d("oracle");
  const std::string base =
      "task = \"oracle-compare\"\ndeltas = [0.1]\nring_points = 8\nmax_rel_l2 = 1e-8\n"
      "[rod]\nL = 2\ndelta = 0.1\n[mesh]\nn_axial = 16\nn_theta = 8\nn_cap = 4\n";
  CHECK(run_text(base + "[contrast]\nc0 = 1\nvarrho = 0\n", d) == kExitOk);
  CHECK(summary(d)["rel_l2"] == 0.0);
  CHECK(run_text(base + "[field]\nH0 = \"rigid_rot\"\n[contrast]\nc0 = 2\nvarrho = 0\n", d) == kExitOk);
  const std::string csv = slurp(d.file("out/compare.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("oracle-compare reports tolerance failures") {
  TempDir d("oracle_tol");
  std::string out;
  const std::string cfg =
      "task = \"oracle-compare\"\ndeltas = [0.1]\nring_points = 8\nmax_rel_l2 = 1e-6\n"
      "[contrast]\nc0 = 2\nvarrho = 0\n[rod]\nL = 2\ndelta = 0.1\n[mesh]\nn_axial = 16\nn_theta = 8\nn_cap = 4\n";
  CHECK(run_text(cfg, d, &out) == kExitTolerance);
  CHECK(out.rfind("oracle-compare: FAIL", 0) == 0);
  CHECK(summary(d)["pass"] == false);
}

TEST_CASE("probe and mesh-dump tasks") {
  TempDir d("probe");
  CHECK(run_text("task = \"probe\"\ndensity = \"e1\"\ntheta = 0.3\n[rod]\nL = 2\ndelta = 0.1\n", d) == kExitOk);
  const nlohmann::json j = summary(d);
  CHECK(j["operator"] == "A1");
  CHECK(j["rho"].size() == 12);
  CHECK(j["b"][0].get<double>() == doctest::Approx(j["reference_b"][0].get<double>()).epsilon(0.02));

  TempDir m("dump");
  std::string out;
  CHECK(run_text("task = \"mesh-dump\"\ndump_operator = \"single_layer\"\n[rod]\nL = 2\ndelta = 0.1\n"
                 "[mesh]\nn_axial = 4\nn_theta = 8\nn_cap = 2\n",
                 m, &out) == kExitOk);
  std::string kind;
  const MatXc s = load_binary(m.file("out/operator.bin"), &kind);
  CHECK(kind == "single_layer");
  const std::string mesh = slurp(m.file("out/mesh.csv"));
  CHECK(s.rows() == 3 * (std::count(mesh.begin(), mesh.end(), '\n') - 1));
  CHECK(out.find("operator=operator.bin") != std::string::npos);
}

TEST_CASE("overrides") {
  TempDir d("override");
  const std::string cfg = d.file("k.cfg");
  write_text(cfg, "task = \"kernels-check\"\noutput = \"unused\"\n");
  std::ostringstream out, err;
  CliOverrides ov;
  ov.out = d.file("o");
  ov.seed = 99;
  ov.threads = 1;
  CHECK(run_config(cfg, true, Task::KernelsCheck, ov, out, err) == kExitOk);
  CHECK(fs::exists(d.file("o/summary.json")));
  CHECK_FALSE(fs::exists("unused"));
}
