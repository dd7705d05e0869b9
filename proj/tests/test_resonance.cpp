#include <cmath>
#include <random>

#include "doctest.h"
#include "nanorod/diagnostics.hpp"
#include "nanorod/resonance.hpp"

using namespace nanorod;

namespace {

const LameMaterial kUnit{1.0, 1.0};

template <class F>
Vec3c simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  Vec3c s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * (h / 3.0);
}

std::vector<Vec3> exterior_points(const RodGeometry& rod, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> x1(-2.0, 2.0), r(2 * rod.delta, 2.0), t(0, 2 * kPi);
  std::vector<Vec3> pts;
  while (static_cast<int>(pts.size()) < n) {
    const double a = x1(rng), rr = r(rng), th = t(rng);
    const Vec3 x(a, rr * std::cos(th), rr * std::sin(th));
    if (axis_distance(rod, x) > 2 * rod.delta) pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("resonant lambda1 and c0 of each case") {
  const LameMaterial m = make_material(2, 1);
  CHECK(case_lambda1(ResonanceKind::Case1, m).real() == doctest::Approx(-1.0 / 8));
  CHECK(case_lambda1(ResonanceKind::Case2, m).real() == doctest::Approx(-0.25));
  CHECK(case_lambda1(ResonanceKind::Case3, m) == cplx(0.0));
  CHECK(case_lambda1(ResonanceKind::Case4, m) == cplx(0.5));
  for (ResonanceKind k : {ResonanceKind::Case1, ResonanceKind::Case2, ResonanceKind::Case3}) {
    const cplx back = contrast_from_lambda1(case_lambda1(k, m));
    CHECK(back.real() == doctest::Approx(case_c0(k, m)));
  }
  CHECK(case_c0(ResonanceKind::Case1, m) == doctest::Approx(-0.6));
  CHECK(case_c0(ResonanceKind::Case3, m) == doctest::Approx(-1.0));
  CHECK_THROWS(case_c0(ResonanceKind::Case4, m));
  CHECK(std::string(case_name(ResonanceKind::Case3)) == "case3");
}

TEST_CASE("case densities at sample points") {
  const LameMaterial m2 = make_material(2, 1);
  const CaseDensities c2 =
      case_densities(ResonanceKind::Case2, m2, case_lambda1(ResonanceKind::Case2, m2), builtin_field("quad_b"), 0.5);
  CHECK((c2.R + 0.5 * kPi * Mat3c::Identity()).norm() < 1e-13);
  CHECK(c2.G.norm() == 0.0);
  const CaseDensities c3 = case_densities(ResonanceKind::Case3, kUnit, 0.0, builtin_field("quad_a"), 0.5);
  CHECK((c3.R.col(1) - Vec3c(2 * kPi, 0, 0)).norm() < 1e-13);
  const RodGeometry rod = build_rod(2, 0.1);
  const CaseDensities c4 = case_densities(ResonanceKind::Case4, kUnit, 0.5, builtin_field("lin_rot"), 0.2, &rod);
  CHECK(c4.G.norm() == 0.0);
  CHECK((c4.C_P - Vec3c(0, 2, 0)).norm() < 1e-15);
  CHECK((c4.C_Q - Vec3c(0, 2, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(case_densities(ResonanceKind::Case2, make_material(0.05, 1), -0.01, builtin_field("quad_b"), 0.0),
                  std::invalid_argument);
}

TEST_CASE("rigid motions have no singular part") {
  const RodGeometry rod = build_rod(2, 0.1);
  const LameMaterial m = make_material(2, 1);
  const BackgroundField rr = builtin_field("rigid_rot");
  for (ResonanceKind k : {ResonanceKind::Case1, ResonanceKind::Case2, ResonanceKind::Case3, ResonanceKind::Case4}) {
    CHECK(case_density_sup(k, m, rr, rod) == 0.0);
    for (const Vec3& x : exterior_points(rod, 5, 3)) CHECK(singular_field(k, rod, m, rr, x).norm() == 0.0);
  }
}

TEST_CASE("case 4 closed form for lin_rot") {
  const RodGeometry rod = build_rod(2, 0.1);
  const BackgroundField lr = builtin_field("lin_rot");
  for (const Vec3& x : exterior_points(rod, 50, 7)) {
    const Vec3 ref = 2 * kPi * kUnit.mu * (kelvin(kUnit, x - rod.Q) - kelvin(kUnit, x - rod.P)) * Vec3::UnitY();
    CHECK((singular_field(ResonanceKind::Case4, rod, kUnit, lr, x) - ref.cast<cplx>()).norm() <= 1e-10);
  }
  for (const Vec3& x : {Vec3(0, 0.5, 0.2), Vec3(0, -1.0, 0.7)})
    CHECK(std::abs(singular_field(ResonanceKind::Case4, rod, kUnit, lr, x)(1)) < 1e-15);
}

TEST_CASE("case 2 singular field against brute-force quadrature") {
  const RodGeometry rod = build_rod(2, 0.1);
  const LameMaterial m = make_material(2, 1);
  const BackgroundField qb = builtin_field("quad_b");
  const cplx l1 = case_lambda1(ResonanceKind::Case2, m);
  for (const Vec3& x : {Vec3(0.2, 0.5, 0.1), Vec3(1.3, -0.2, 0.4)}) {
    const Vec3c ref = -simpson(
        [&](double y) {
          const KernelGrad<double> g = kelvin_grad(m, x - Vec3(y, 0, 0));
          const Mat3c r = case_densities(ResonanceKind::Case2, m, l1, qb, y).R;
          return (g.d[1].cast<cplx>() * r.col(1) + g.d[2].cast<cplx>() * r.col(2)).eval();
        },
        -1.0, 1.0, 200000);
    CHECK((singular_field(ResonanceKind::Case2, rod, m, qb, x) - ref).norm() < 1e-9);
  }
}

TEST_CASE("singular field gradients") {
  const RodGeometry rod = build_rod(2, 0.1);
  const LameMaterial m = make_material(2, 1);
  const Vec3 x(0.4, 0.3, -0.2);
  for (ResonanceKind k : {ResonanceKind::Case1, ResonanceKind::Case3, ResonanceKind::Case4}) {
    const BackgroundField f = builtin_field(k == ResonanceKind::Case4 ? "lin_rot" : "quad_a");
    const Mat3c g = singular_field_grad(k, rod, m, f, x);
    const Mat3c fd = fd_gradient([&](const Vec3& p) { return singular_field(k, rod, m, f, p); }, x, 1e-3);
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("singular scalars") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 100; ++i) {
    const cplx c(u(rng), u(rng));
    CHECK(std::abs(singular_scalar(ResonanceKind::Case4, kUnit, c) - (c - 1.0)) <= 1e-12 * std::abs(c - 1.0));
  }
  const LameMaterial m = make_material(2, 1);
  const double c0 = case_c0(ResonanceKind::Case1, m);
  const cplx a1 = case1_a1(m);
  double prev = 1e300;
  for (double r : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double gap = std::abs(singular_scalar(ResonanceKind::Case1, m, cplx(c0, r)) * r - a1);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-5);
  CHECK(std::abs(singular_scalar(ResonanceKind::Case3, kUnit, cplx(-1.0, 1e-3)) * 1e-3) ==
        doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("energy prefactors") {
  const LameMaterial m = make_material(2, 1);
  CHECK(energy_prefactor(ResonanceKind::Case1, m, 0, 1e-2, 0.1) ==
        doctest::Approx(4 * 16 * 1e-4 / (625 * 1e-4)).epsilon(1e-13));
  CHECK(energy_prefactor(ResonanceKind::Case2, m, 0, 0.5, 0.2) ==
        doctest::Approx(4 * 256 * 0.0016 / (81 * 0.25)).epsilon(1e-13));
  CHECK(energy_prefactor(ResonanceKind::Case3, m, -1, 0.1, 0.1) == doctest::Approx(16 * 1e-4 / 0.01));
  CHECK(energy_prefactor(ResonanceKind::Case4, m, 11, 0, 0.1) == doctest::Approx(100 * 1e-4));
}

TEST_CASE("case 1 bracket") {
  const LameMaterial m = make_material(2, 1);
  for (double l1 : {1.5, -0.3, 3.0}) CHECK(std::abs(case1_bracket(m, l1)) < 1e-12);
  const CaseDensities d = case_densities(ResonanceKind::Case1, m, case_lambda1(ResonanceKind::Case1, m),
                                         builtin_field("quad_a"), 0.3);
  CHECK(d.G.allFinite());
}

TEST_CASE("energy functional") {
  const RodGeometry rod = build_rod(2, 0.1);
  const ShellSpec shell{0.2, 5.0, false, 1, 0};
  FieldFn zero;
  zero.value = [](const Vec3&) { return Vec3c::Zero().eval(); };
  zero.gradient = [](const Vec3&) { return Mat3c::Zero().eval(); };
  CHECK(energy(kUnit, rod, zero, shell).energy == 0.0);
  const FieldFn u = singular_fieldfn(ResonanceKind::Case4, rod, kUnit, builtin_field("lin_rot"));
  FieldFn u3;
  u3.value = [&](const Vec3& x) { return (3.0 * u.value(x)).eval(); };
  u3.gradient = [&](const Vec3& x) { return (3.0 * u.gradient(x)).eval(); };
  const EnergyResult e1 = energy(kUnit, rod, u, shell);
  CHECK(e1.energy > 0);
  CHECK(e1.tail_bound >= 0);
  CHECK(energy(kUnit, rod, u3, shell).energy == doctest::Approx(9 * e1.energy).epsilon(1e-12));
  ShellSpec finer = shell;
  finer.level = 2;
  CHECK(std::abs(energy(kUnit, rod, u, finer).energy / e1.energy - 1.0) < 0.01);
  // the difference-quotient path agrees with the analytic gradient
  FieldFn fd = u;
  fd.gradient = nullptr;
  CHECK(energy(kUnit, rod, fd, shell).energy == doctest::Approx(e1.energy).epsilon(1e-6));
  CHECK_THROWS_AS(energy(kUnit, rod, u, ShellSpec{0.5, 0.4, false, 1, 0}), ShellSpecError);
  CHECK_THROWS_AS(energy(kUnit, rod, u, ShellSpec{0.05, 1.0, true, 1, 0}), ShellSpecError);
}

TEST_CASE("log-log fit") {
  std::vector<double> x, y;
  for (int i = 0; i < 6; ++i) {
    x.push_back(std::pow(10.0, -i * 0.5));
    y.push_back(3.0 * std::pow(x.back(), -2.0));
  }
  const SlopeFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.admissible);
  CHECK(f.window_lo == doctest::Approx(std::pow(10.0, -2.5)));
  CHECK_FALSE(fit_loglog({1, 2, 3}, {1, 4, 9}).admissible);
  CHECK_THROWS_AS(fit_loglog({1, 2}, {1, -1}), DegenerateFitError);
  CHECK_THROWS_AS(fit_loglog({2, 2}, {1, 3}), DegenerateFitError);
  CHECK(parse_scan_param("varrho") == ScanParam::Varrho);
  CHECK_THROWS(parse_scan_param("eps"));
}

TEST_CASE("blow-up scans") {
  const RodGeometry rod = build_rod(2, 0.1);
  ScanSpec s;
  s.param = ScanParam::C0;
  s.values = {10, 30, 100, 300, 1000};
  const ScanTable c4 = blowup_scan(ResonanceKind::Case4, kUnit, rod, builtin_field("lin_rot"), s);
  CHECK(c4.detected);
  CHECK(c4.fit.admissible);
  CHECK(c4.fit.slope == doctest::Approx(2.0).epsilon(0.025));

  s.param = ScanParam::Varrho;
  s.values = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  s.c0 = -1.0;
  const ScanTable c3 = blowup_scan(ResonanceKind::Case3, kUnit, rod, builtin_field("quad_a"), s);
  CHECK(c3.fit.slope == doctest::Approx(-2.0).epsilon(0.025));
  for (const ScanRow& r : c3.rows) CHECK(r.cond_estimate > 0);

  ScanSpec bad;
  bad.param = ScanParam::Delta;
  bad.values = {0.3};
  bad.shell = ShellSpec{0.5, 5.0, true, 1, 0};
  CHECK_THROWS_AS(blowup_scan(ResonanceKind::Case4, kUnit, rod, builtin_field("lin_rot"), bad), ShellSpecError);
}

TEST_CASE("concentration near the endpoints") {
  const RodGeometry rod = build_rod(2, 0.05);
  const FieldFn u = singular_fieldfn(ResonanceKind::Case4, rod, kUnit, builtin_field("lin_rot"));
  const ConcentrationProfile p = concentration_profile(u, rod, rod.delta);
  CHECK(p.t.size() == 64);
  CHECK(p.ratio > 3);
  // on the line x2 = 0 the mid-rod value cancels exactly, so the ratio is infinite at every offset
  CHECK(p.mid < 1e-15);
  const ConcentrationProfile p2 = concentration_profile(u, rod, 2 * rod.delta);
  const ConcentrationProfile ph = concentration_profile(u, rod, 0.5 * rod.delta);
  CHECK(p2.endpoint_max < p.endpoint_max);
  CHECK(p.endpoint_max < ph.endpoint_max);
  FieldFn c;
  c.value = [](const Vec3&) { return Vec3c(1, 2, 0); };
  CHECK(concentration_profile(c, rod, rod.delta).ratio == doctest::Approx(1.0));
  CHECK_THROWS(concentration_profile(c, rod, 0.0));
}

TEST_CASE("vanishing case densities give a vanishing singular field") {
  const RodGeometry rod = build_rod(2, 0.1);
  const LameMaterial m = make_material(2, 1);
  // quad_b is harmonic and divergence-free, and lin_rot has constant strain
  for (ResonanceKind k : {ResonanceKind::Case1, ResonanceKind::Case2, ResonanceKind::Case3, ResonanceKind::Case4})
    for (const char* n : {"quad_a", "quad_b", "lin_rot", "rigid_rot"}) {
      const BackgroundField f = builtin_field(n);
      if (case_density_sup(k, m, f, rod) >= 1e-12) continue;
      for (const Vec3& x : exterior_points(rod, 4, 11)) CHECK(singular_field(k, rod, m, f, x).norm() < 1e-10);
    }
}
