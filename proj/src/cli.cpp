#include "nanorod/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "nanorod/diagnostics.hpp"
#include "nanorod/io.hpp"

namespace nanorod {

namespace {

using json = nlohmann::ordered_json;

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_json(const std::string& dir, const std::string& name, const json& j) {
  write_text(path_in(dir, name), j.dump(2) + "\n");
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

constexpr double kKernelTol = 1e-5;
constexpr double kFieldTol = 1e-10;
constexpr double kJumpTol = 0.05;
constexpr double kRigidTol = 1e-12;
constexpr double kSeriesTol = 1e-8;
constexpr double kTractionTol = 1e-10;

int task_validate(const RunConfig& rc, std::ostream& out) {
  json j;
  bool ok = true;

  const std::vector<Vec3> pts = random_points(20, 0.5, 2.0, rc.seed);
  double kres = 0;
  for (double w : {0.0, 0.1, 0.5})
    for (const Vec3& p : pts) kres = std::max(kres, kernel_lame_residual(rc.material, w, p));
  j["kernel_residual"] = kres;
  ok &= kres <= kKernelTol;

  double fres = 0;
  for (const char* name : {"quad_a", "quad_b", "lin_rot", "rigid_rot"})
    fres = std::max(fres, lame_residual(rc.material, builtin_field(name), pts));
  j["field_residual"] = fres;
  ok &= fres <= kFieldTol;

  const RodGeometry rod = rc.rod_given ? rc.rod : build_rod(2.0, 0.1);
  SurfaceContext ctx(mesh_surface(rod, rc.mesh.n_axial, rc.mesh.n_theta, rc.mesh.n_cap), {}, rc.threads);
  const JumpReport jr = jump_reconstruction(rc.material, ctx, smooth_random_density(ctx.mesh(), rc.seed), 2.0, 4);
  j["jump_rel_l2"] = jr.rel_l2;
  j["jump_nodes"] = jr.nodes;
  ok &= jr.rel_l2 <= kJumpTol;

  const cplx l1 = rc.c ? contrast(*rc.c).lambda1 : cplx(1.5, 0.0);
  const BackgroundField rig = builtin_field("rigid_rot");
  double rres = 0;
  for (double y1 : {-0.5 * rod.L, 0.0, 0.3 * rod.L}) {
    rres = std::max(rres, density_G(rc.material, l1, rig, y1).norm());
    rres = std::max(rres, density_R(rc.material, l1, rig, y1).norm());
  }
  const EndpointMoments em = endpoint_moments(rc.material, l1, rig, zero_field(), 0.0, rod);
  rres = std::max({rres, em.M_P.norm(), em.M_Q.norm()});
  j["rigid_residual"] = rres;
  ok &= rres <= kRigidTol;
  j["pass"] = ok;
  write_json(rc.output, "summary.json", j);

  out << "validate: " << verdict(ok) << " kernel=" << format_double(kres) << " field=" << format_double(fres)
      << " jump=" << format_double(jr.rel_l2) << " rigid=" << format_double(rres) << '\n';
  return ok ? kExitOk : kExitTolerance;
}

int task_kernels_check(const RunConfig& rc, std::ostream& out) {
  json j;
  const std::vector<Vec3> pts = random_points(50, 0.5, 2.0, rc.seed);
  double kel = 0, kup = 0;
  for (const Vec3& p : pts) kel = std::max(kel, kernel_lame_residual(rc.material, 0.0, p));
  for (double w : {0.1, 0.5})
    for (const Vec3& p : pts) kup = std::max(kup, kernel_lame_residual(rc.material, w, p));

  // series and closed forms on both sides of the switch radius
  double series = 0;
  for (double w : {0.1, 0.5, 2.0})
    for (double r : {0.5 * kSeriesSwitch, kSeriesSwitch, 2.0 * kSeriesSwitch}) {
      const RadialParts<cplx> a = kupradze_parts_closed(rc.material, w, r);
      const RadialParts<cplx> b = kupradze_parts_series(rc.material, w, r, kSeriesTerms);
      const double scale = std::abs(a.f) + std::abs(a.g);
      series = std::max(series, (std::abs(a.f - b.f) + std::abs(a.g - b.g)) / scale);
    }

  double trac = 0;
  const std::vector<Vec3> nus = random_points(50, 1.0, 1.0, rc.seed + 1);
  for (size_t i = 0; i < pts.size(); ++i) {
    const Mat3 a = gamma2_traction_closed(rc.material, pts[i], nus[i]);
    const Mat3 b = traction_kernel(rc.material, pts[i], nus[i], KernelKind::Gamma2);
    trac = std::max(trac, (a - b).norm() / b.norm());
  }

  const bool ok = kel <= kKernelTol && kup <= kKernelTol && series <= kSeriesTol && trac <= kTractionTol;
  j["kelvin_residual"] = kel;
  j["kupradze_residual"] = kup;
  j["series_closed_defect"] = series;
  j["gamma2_traction_defect"] = trac;
  j["pass"] = ok;
  write_json(rc.output, "summary.json", j);
  out << "kernels-check: " << verdict(ok) << " kelvin=" << format_double(kel) << " kupradze=" << format_double(kup)
      << " series=" << format_double(series) << " gamma2_traction=" << format_double(trac) << '\n';
  return ok ? kExitOk : kExitTolerance;
}

int task_oracle_compare(const RunConfig& rc, std::ostream& out) {
  const BackgroundField H0 = builtin_field(rc.H0), H1 = builtin_field(rc.H1);
  std::vector<size_t> order(rc.deltas.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rc.deltas[a] > rc.deltas[b]; });

  json j;
  j["c"] = {rc.c->real(), rc.c->imag()};
  j["omega"] = rc.omega;
  json runs = json::array();
  std::vector<double> ds, errs;
  std::vector<CompareRow> finest;
  for (size_t idx : order) {
    const double d = rc.deltas[idx];
    MeshResolution res = rc.mesh;
    if (rc.n_axial_list.size() > 1) res.n_axial = rc.n_axial_list[idx];
    const RodGeometry rod = build_rod(rc.rod.L, d);
    const OracleComparison cmp =
        compare_oracle(rc.material, *rc.c, rc.omega, H0, H1, rod, res, rc.ring_factor, rc.ring_points, rc.threads);
    std::ostringstream name;
    name << "compare_" << runs.size() << ".csv";
    write_text(path_in(rc.output, name.str()), compare_csv(cmp.rows));
    runs.push_back({{"delta", d},
                    {"mesh", {res.n_axial, res.n_theta, res.n_cap}},
                    {"unknowns", cmp.unknowns},
                    {"rel_l2", cmp.rel_l2},
                    {"cond_estimate", cmp.cond_estimate},
                    {"csv", name.str()}});
    ds.push_back(d);
    errs.push_back(cmp.rel_l2);
    finest = cmp.rows;
  }
  write_text(path_in(rc.output, "compare.csv"), compare_csv(finest));
  j["runs"] = runs;

  // err(2 delta) / err(delta) for every halving pair, the finest pair last
  json ratios = json::array();
  std::optional<double> halving;
  for (size_t a = 0; a < ds.size(); ++a)
    for (size_t b = a + 1; b < ds.size(); ++b)
      if (std::abs(ds[a] / ds[b] - 2.0) < 0.02) {
        const double r = errs[b] > 0 ? errs[a] / errs[b] : std::numeric_limits<double>::infinity();
        ratios.push_back({{"coarse", ds[a]}, {"fine", ds[b]}, {"ratio", r}});
        halving = r;
      }
  j["halving_ratios"] = ratios;
  j["halving_ratio"] = halving ? json(*halving) : json(nullptr);
  j["rel_l2"] = errs.back();

  bool ok = true;
  if (rc.max_rel_l2) ok &= errs.back() <= *rc.max_rel_l2;
  if (rc.min_ratio) ok &= halving && *halving >= *rc.min_ratio;
  j["pass"] = ok;
  write_json(rc.output, "summary.json", j);
  out << "oracle-compare: " << verdict(ok) << " deltas=" << ds.size() << " rel_l2=" << format_double(errs.back())
      << " halving_ratio=" << (halving ? format_double(*halving) : std::string("n/a")) << '\n';
  return ok ? kExitOk : kExitTolerance;
}

int task_scan(const RunConfig& rc, std::ostream& out) {
  const BackgroundField H0 = builtin_field(rc.H0);
  ScanSpec spec = rc.scan;
  spec.shell.threads = rc.threads;
  const ScanTable t = blowup_scan(*rc.resonance, rc.material, rc.rod, H0, spec);
  write_text(path_in(rc.output, "scan.csv"), scan_csv(t));
  write_text(path_in(rc.output, "fit.json"), fit_json(t.fit));
  json j;
  j["case"] = case_name(t.kind);
  j["param"] = scan_param_name(t.param);
  j["rows"] = t.rows.size();
  j["base_energy"] = t.base_energy;
  j["density_sup"] = t.density_sup;
  j["detected"] = t.detected;
  j["slope"] = t.fit.slope;
  j["admissible"] = t.fit.admissible;
  write_json(rc.output, "summary.json", j);
  out << "scan: " << case_name(t.kind) << " param=" << scan_param_name(t.param) << " rows=" << t.rows.size()
      << " slope=" << format_double(t.fit.slope) << " r2=" << format_double(t.fit.r2)
      << " admissible=" << (t.fit.admissible ? "yes" : "no") << '\n';
  return kExitOk;
}

int task_probe(const RunConfig& rc, std::ostream& out) {
  const std::vector<double> rho = probe_window(rc.rod, rc.x0);
  const std::string& d = rc.density;
  SingularityFit fit;
  Eigen::Vector3d reference = Eigen::Vector3d::Zero();
  json j;
  if (d[0] == 'e') {
    const int k = d[1] - '1';
    const Vec3c e = Vec3c::Unit(k);
    fit = probe_A1(rc.rod, rc.material, [e](double) { return e; }, rc.x0, rho, rc.theta);
    reference(k) = k == 0 ? -2.0 * (alpha1(rc.material) + alpha2(rc.material)) : -2.0 * alpha1(rc.material);
    j["operator"] = "A1";
    j["model"] = "a + b ln(rho)";
  } else {
    const int r = d[1] - '1', c = d[2] - '1';
    Mat3 E = Mat3::Zero();
    E(r, c) = 1.0;
    const Mat3c Ec = E.cast<cplx>();
    fit = probe_A2(rc.rod, rc.material, [Ec](double) { return Ec; }, rc.x0, rho, rc.theta);
    reference = a2_direction(rc.material, E, rc.theta);
    j["operator"] = "A2";
    j["model"] = "a + b / rho";
  }
  j["density"] = d;
  j["x0"] = rc.x0;
  j["theta"] = rc.theta;
  j["rho"] = fit.rho;
  json vals = json::array();
  for (const auto& v : fit.values) vals.push_back({v(0), v(1), v(2)});
  j["values"] = vals;
  j["a"] = {fit.a(0), fit.a(1), fit.a(2)};
  j["b"] = {fit.b(0), fit.b(1), fit.b(2)};
  j["reference_b"] = {reference(0), reference(1), reference(2)};
  j["r2"] = fit.r2;
  j["poor"] = fit.poor;
  write_json(rc.output, "summary.json", j);
  out << "probe: " << j["operator"].get<std::string>() << " density=" << d << " b=(" << format_double(fit.b(0))
      << ", " << format_double(fit.b(1)) << ", " << format_double(fit.b(2)) << ") r2=" << format_double(fit.r2)
      << (fit.poor ? " poor-fit" : "") << '\n';
  return kExitOk;
}

int task_mesh_dump(const RunConfig& rc, std::ostream& out) {
  SurfaceContext ctx(mesh_surface(rc.rod, rc.mesh.n_axial, rc.mesh.n_theta, rc.mesh.n_cap), {}, rc.threads);
  write_text(path_in(rc.output, "mesh.csv"), mesh_csv(ctx.mesh()));
  std::string dumped = "none";
  if (rc.dump_operator == "single_layer") {
    dump_binary(path_in(rc.output, "operator.bin"), assemble_single_layer(rc.material, ctx), "single_layer");
    dumped = "operator.bin";
  } else if (rc.dump_operator == "np_star") {
    dump_binary(path_in(rc.output, "operator.bin"), assemble_np_star(rc.material, ctx), "np_star");
    dumped = "operator.bin";
  }
  out << "mesh-dump: nodes=" << ctx.mesh().size() << " area=" << format_double(ctx.mesh().total_weight())
      << " operator=" << dumped << '\n';
  return kExitOk;
}

}  // namespace

int run_task(RunConfig rc, const CliOverrides& ov, std::ostream& out, std::ostream& err) {
  if (ov.out) rc.output = *ov.out;
  if (ov.threads) rc.threads = *ov.threads;
  if (ov.seed) rc.seed = *ov.seed;
  try {
    ensure_directory(rc.output);
    switch (rc.task) {
      case Task::Validate: return task_validate(rc, out);
      case Task::KernelsCheck: return task_kernels_check(rc, out);
      case Task::OracleCompare: return task_oracle_compare(rc, out);
      case Task::Scan: return task_scan(rc, out);
      case Task::Probe: return task_probe(rc, out);
      case Task::MeshDump: return task_mesh_dump(rc, out);
    }
  } catch (const std::exception& e) {
    err << task_name(rc.task) << ": error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

int run_config(const std::string& path, bool strict, std::optional<Task> expected, const CliOverrides& ov,
               std::ostream& out, std::ostream& err) {
  RunConfig rc;
  try {
    std::vector<ConfigWarning> warnings;
    rc = load_run_config(path, strict, &warnings);
    for (const ConfigWarning& w : warnings)
      err << path << ": line " << w.line << ": warning: unknown key '" << w.key << "' ignored\n";
    if (expected && *expected != rc.task)
      throw ConfigError(std::string("config task is '") + task_name(rc.task) + "', subcommand is '" +
                        task_name(*expected) + "'");
  } catch (const ConfigError& e) {
    err << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  return run_task(rc, ov, out, err);
}

}  // namespace nanorod
