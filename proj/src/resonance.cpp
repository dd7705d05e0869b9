#include "nanorod/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nanorod/surface_quadrature.hpp"

namespace nanorod {

namespace {

Mat3c to_c(const Mat3& m) { return m.cast<cplx>(); }
Vec3c to_c(const Vec3& v) { return v.cast<cplx>(); }

// num / den where both vanish together at a double resonance; `limit` is the value of the ratio there
cplx guarded_ratio(cplx num, cplx den, double limit) {
  if (std::abs(den) < kExactResonance && std::abs(num) < kExactResonance) return limit;
  if (std::abs(den) < kExactResonance) throw ResonantDenominatorError("case density denominator vanishes");
  return num / den;
}

void check_case2_material(const LameMaterial& mat) {
  if (mat.lambda <= 0.1 * mat.mu) throw std::invalid_argument("Case 2 requires lambda > 0.1 mu");
}

double energy_density(const LameMaterial& mat, const Mat3c& g) {
  const Mat3c e = 0.5 * (g + g.transpose());
  const cplx tr = e.trace();
  return mat.lambda * std::norm(tr) + 2.0 * mat.mu * e.squaredNorm();
}

std::vector<double> graded_edges(double lo, double hi, double h0, double hmax) {
  const double mid = 0.5 * (lo + hi);
  std::vector<double> left{lo};
  double x = lo, h = h0;
  while (x + h < mid - 0.25 * h) {
    x += h;
    left.push_back(x);
    h = std::min(2 * h, hmax);
  }
  std::vector<double> e = left;
  e.push_back(mid);
  for (auto it = left.rbegin(); it != left.rend(); ++it) e.push_back(lo + hi - *it);
  return e;
}

struct QuadPoint {
  Vec3 x;
  double w;
};

void composite_gauss(const std::vector<double>& edges, int q, std::vector<double>& x, std::vector<double>& w) {
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const GaussRule g = gauss_legendre(q, edges[p], edges[p + 1]);
    x.insert(x.end(), g.x.begin(), g.x.end());
    w.insert(w.end(), g.w.begin(), g.w.end());
  }
}

std::vector<double> uniform_edges(double lo, double hi, int n) {
  std::vector<double> e;
  for (int i = 0; i <= n; ++i) e.push_back(lo + (hi - lo) * i / n);
  return e;
}

// Capsule shell a <= dist(x, axis segment) <= b. Cylinder part, then both hemispherical ends.
std::vector<QuadPoint> shell_points(const RodGeometry& rod, double a, double b, int level) {
  const int q = 4 + 2 * level, nt = 16 + 8 * level;
  const double h = 0.5 * rod.L;
  std::vector<double> xs, xw, ss, sw, ps, pw;
  composite_gauss(graded_edges(-h, h, 0.5 * a, rod.L / 8), q, xs, xw);
  const int nr = std::max(2, static_cast<int>(std::ceil(std::log(b / a) / 0.5)));
  composite_gauss(uniform_edges(std::log(a), std::log(b), nr), q, ss, sw);
  composite_gauss(uniform_edges(0.0, 0.5 * kPi, 3), q, ps, pw);
  const double dt = 2 * kPi / nt;
  std::vector<QuadPoint> pts;
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ss.size(); ++j) {
      const double r = std::exp(ss[j]), wr = sw[j] * r * r;  // rho drho = rho^2 ds
      for (int k = 0; k < nt; ++k) {
        const double t = (k + 0.5) * dt;
        pts.push_back({Vec3(xs[i], r * std::cos(t), r * std::sin(t)), xw[i] * wr * dt});
      }
    }
  for (int side = 0; side < 2; ++side) {
    const double sgn = side == 0 ? -1.0 : 1.0;
    for (size_t j = 0; j < ss.size(); ++j) {
      const double r = std::exp(ss[j]), wr = sw[j] * r * r * r;  // r^2 dr = r^3 ds
      for (size_t i = 0; i < ps.size(); ++i) {
        const double sp = std::sin(ps[i]), cp = std::cos(ps[i]);
        for (int k = 0; k < nt; ++k) {
          const double t = (k + 0.5) * dt;
          pts.push_back({Vec3(sgn * (h + r * cp), r * sp * std::cos(t), r * sp * std::sin(t)),
                         wr * pw[i] * sp * dt});
        }
      }
    }
  }
  return pts;
}

// Surface rule on the outer capsule with the 1/dist^4 tail weights folded in.
std::vector<QuadPoint> tail_points(const RodGeometry& rod, double b, int level) {
  const int q = 4 + 2 * level, nt = 16 + 8 * level;
  const double h = 0.5 * rod.L;
  std::vector<double> xs, xw, ps, pw;
  composite_gauss(uniform_edges(-h, h, 8), q, xs, xw);
  composite_gauss(uniform_edges(0.0, 0.5 * kPi, 3), q, ps, pw);
  const double dt = 2 * kPi / nt;
  std::vector<QuadPoint> pts;
  for (size_t i = 0; i < xs.size(); ++i)
    for (int k = 0; k < nt; ++k) {
      const double t = (k + 0.5) * dt;
      pts.push_back({Vec3(xs[i], b * std::cos(t), b * std::sin(t)), xw[i] * b * dt * 0.5 * b});
    }
  for (int side = 0; side < 2; ++side) {
    const double sgn = side == 0 ? -1.0 : 1.0;
    for (size_t i = 0; i < ps.size(); ++i) {
      const double sp = std::sin(ps[i]), cp = std::cos(ps[i]);
      for (int k = 0; k < nt; ++k) {
        const double t = (k + 0.5) * dt;
        pts.push_back({Vec3(sgn * (h + b * cp), b * sp * std::cos(t), b * sp * std::sin(t)),
                       b * b * pw[i] * sp * dt * b});
      }
    }
  }
  return pts;
}

double integrate_points(const LameMaterial& mat, const FieldFn& u, const std::vector<QuadPoint>& pts, double h,
                        int threads) {
  std::vector<double> vals(pts.size());
  parallel_for(static_cast<int>(pts.size()), thread_count(threads), [&](int i, int) {
    const Mat3c g = u.gradient ? u.gradient(pts[i].x) : fd_gradient(u.value, pts[i].x, h);
    vals[i] = energy_density(mat, g) * pts[i].w;
  });
  double s = 0;
  for (double v : vals) {
    if (!std::isfinite(v)) throw ShellSpecError("non-finite energy integrand; shell too close to the axis");
    s += v;
  }
  return s;
}

}  // namespace

const char* case_name(ResonanceKind k) {
  switch (k) {
    case ResonanceKind::Case1: return "case1";
    case ResonanceKind::Case2: return "case2";
    case ResonanceKind::Case3: return "case3";
    case ResonanceKind::Case4: return "case4";
  }
  return "?";
}

cplx case_lambda1(ResonanceKind k, const LameMaterial& mat) {
  const double lp = mat.lambda + 2 * mat.mu;
  switch (k) {
    case ResonanceKind::Case1: return -mat.mu / (2 * lp);
    case ResonanceKind::Case2: return -mat.lambda / (2 * lp);
    case ResonanceKind::Case3: return 0.0;
    case ResonanceKind::Case4: return 0.5;
  }
  return 0.0;
}

double case_c0(ResonanceKind k, const LameMaterial& mat) {
  const std::array<ContrastDescriptor, 4> r = resonance_values(mat);
  const ContrastDescriptor& d = r[static_cast<int>(k)];
  if (d.symbolic_infinity) throw std::invalid_argument("Case 4 has no finite resonant c0");
  return d.c0;
}

CaseDensities case_densities(ResonanceKind k, const LameMaterial& mat, cplx lambda1, const BackgroundField& f,
                             double y1, const RodGeometry* rod) {
  const double lam = mat.lambda, mu = mat.mu, lp = lam + 2 * mu;
  const DerivativePack p = derivative_pack(f, Vec3(y1, 0, 0));
  const Mat3c B = to_c(matrix_B()), C = to_c(matrix_C()), I = Mat3c::Identity();
  const Vec3c lap_t = to_c(Vec3(p.laplacian - p.d2_axis + p.grad_div_B));
  const cplx s = 2.0 * lambda1 - 1.0;
  CaseDensities d;
  switch (k) {
    case ResonanceKind::Case1: {
      const cplx l1 = 1.0 / (2.0 * lambda1 * lp - mu);
      d.G = 4 * kPi * mu * mu * l1 * (lp + (lam + mu) / s) * B * to_c(p.grad_div_B);
      d.G -= (mu * mu * kPi / lambda1) * B * to_c(p.B_contract);
      d.G -= (mu * mu * kPi / (lambda1 * s)) * B * lap_t;
      d.G -= (2 * mu * mu * kPi / s) * C * to_c(p.curl_e1_grad);
      const cplx q = guarded_ratio(lam - mu, 2.0 * lp * lambda1 + lam, 1.0);
      d.R = -2 * kPi * mu * lp * q * p.div_B * I - (mu * mu * kPi / lambda1) * B * to_c(p.grad_sym);
      break;
    }
    case ResonanceKind::Case2: {
      check_case2_material(mat);
      const cplx q = guarded_ratio(mu * (lam - mu), lam * (2.0 * lp * lambda1 + mu), -mu / lam);
      d.R = kPi * (p.div - q * p.div_B) * I;
      break;
    }
    case ResonanceKind::Case3: {
      const cplx l2 = 1.0 / (2.0 * lambda1 * lp + mu);
      const Mat3c proj = I - mu * l2 * B;
      d.G = mu * kPi * proj * to_c(p.B_contract) + (mu * kPi / s) * proj * lap_t;
      d.R = mu * kPi * proj * to_c(p.grad_sym);
      break;
    }
    case ResonanceKind::Case4: {
      const cplx l1 = 1.0 / (2.0 * lambda1 * lp - mu), l2 = 1.0 / (2.0 * lambda1 * lp + mu);
      const Mat3c proj = I - mu * l2 * B;
      d.G = kPi * (lam + mu) * l1 * B * (lam * to_c(p.grad_div) + 2 * mu * mu * l2 * to_c(p.grad_div_B));
      d.G += (mu * kPi / (2.0 * lambda1)) * proj * lap_t;
      d.G -= kPi * mu * mu * l2 * C * to_c(p.curl_e1_grad);
      if (rod) {
        d.C_P = to_c(endpoint_bracket(mat, f, rod->P));
        d.C_Q = to_c(endpoint_bracket(mat, f, rod->Q));
      }
      break;
    }
  }
  return d;
}

Vec3c singular_field(ResonanceKind k, const RodGeometry& rod, const LameMaterial& mat, const BackgroundField& f,
                     const Vec3& x) {
  const cplx l1 = case_lambda1(k, mat);
  auto G = [&](double y) { return case_densities(k, mat, l1, f, y).G; };
  auto R = [&](double y) { return case_densities(k, mat, l1, f, y).R; };
  Vec3c u = Vec3c::Zero();
  if (k != ResonanceKind::Case2) u += lineop_A1(rod, mat, G, x);
  if (k != ResonanceKind::Case4) u -= lineop_A2(rod, mat, R, x);
  if (k == ResonanceKind::Case4) {
    u -= kPi * (to_c(kelvin(mat, x - rod.P)) * to_c(endpoint_bracket(mat, f, rod.P)));
    u += kPi * (to_c(kelvin(mat, x - rod.Q)) * to_c(endpoint_bracket(mat, f, rod.Q)));
  }
  return u;
}

Mat3c singular_field_grad(ResonanceKind k, const RodGeometry& rod, const LameMaterial& mat,
                          const BackgroundField& f, const Vec3& x) {
  const cplx l1 = case_lambda1(k, mat);
  auto G = [&](double y) { return case_densities(k, mat, l1, f, y).G; };
  auto R = [&](double y) { return case_densities(k, mat, l1, f, y).R; };
  Mat3c g = Mat3c::Zero();
  if (k != ResonanceKind::Case2) g += lineop_A1_grad(rod, mat, G, x);
  if (k != ResonanceKind::Case4) {
    auto a2 = [&](const Vec3& y) -> Vec3c { return lineop_A2(rod, mat, R, y); };
    g -= fd_gradient(a2, x, 1e-4 * rod.delta);
  } else {
    const Vec3 cp = endpoint_bracket(mat, f, rod.P), cq = endpoint_bracket(mat, f, rod.Q);
    const KernelGrad<double> gp = kelvin_grad(mat, x - rod.P), gq = kelvin_grad(mat, x - rod.Q);
    for (int j = 0; j < 3; ++j) g.col(j) += to_c(Vec3(kPi * (gq.d[j] * cq - gp.d[j] * cp)));
  }
  return g;
}

double case_density_sup(ResonanceKind k, const LameMaterial& mat, const BackgroundField& f, const RodGeometry& rod) {
  const cplx l1 = case_lambda1(k, mat);
  double sup = 0;
  const int n = 33;
  for (int i = 0; i < n; ++i) {
    const double y = -0.5 * rod.L + rod.L * i / (n - 1);
    const CaseDensities d = case_densities(k, mat, l1, f, y, &rod);
    sup = std::max({sup, d.G.norm(), d.R.col(1).norm(), d.R.col(2).norm(), d.C_P.norm(), d.C_Q.norm()});
  }
  return sup;
}

cplx singular_scalar(ResonanceKind k, const LameMaterial& mat, cplx c) {
  const Contrast ct = contrast(c);
  const double lam = mat.lambda, mu = mat.mu, lp = lam + 2 * mu;
  const cplx l1 = ct.lambda1;
  switch (k) {
    case ResonanceKind::Case1: return 1.0 / (2.0 * l1 * lp + mu);
    case ResonanceKind::Case2: return 2 * lam * lp / (2.0 * lp * l1 + lam);
    case ResonanceKind::Case3: return 1.0 / l1;
    case ResonanceKind::Case4: return 1.0 / (l1 - 0.5);
  }
  return 0.0;
}

double energy_prefactor(ResonanceKind k, const LameMaterial& mat, double c0, double varrho, double delta) {
  const double lam = mat.lambda, mu = mat.mu, lp = lam + 2 * mu;
  const double d4 = std::pow(delta, 4);
  switch (k) {
    case ResonanceKind::Case1: return 4 * lp * lp * d4 / (std::pow(lam + 3 * mu, 4) * varrho * varrho);
    case ResonanceKind::Case2:
      return lam * lam * std::pow(lp, 4) * d4 / (std::pow(lam + mu, 4) * varrho * varrho);
    case ResonanceKind::Case3: return 16 * d4 / ((c0 + 1) * (c0 + 1) + varrho * varrho);
    case ResonanceKind::Case4: return std::norm(cplx(c0, varrho) - 1.0) * d4;
  }
  return 0.0;
}

cplx case1_a1(const LameMaterial& mat) {
  const double lp = mat.lambda + 2 * mat.mu, l3 = mat.lambda + 3 * mat.mu;
  return cplx(0, 2 * lp / (l3 * l3));
}

double case1_bracket(const LameMaterial& mat, double lambda1) {
  const double lam = mat.lambda, mu = mat.mu, lp = lam + 2 * mu;
  const double l1 = 1.0 / (2 * lambda1 * lp - mu);
  return -8 * kPi * mu * mu * (l1 * lp + (l1 * (lam + mu) - 1) / (2 * lambda1 - 1));
}

FieldFn singular_fieldfn(ResonanceKind k, const RodGeometry& rod, const LameMaterial& mat, const BackgroundField& f) {
  FieldFn u;
  u.value = [=](const Vec3& x) { return singular_field(k, rod, mat, f, x); };
  u.gradient = [=](const Vec3& x) { return singular_field_grad(k, rod, mat, f, x); };
  return u;
}

EnergyResult energy(const LameMaterial& mat, const RodGeometry& rod, const FieldFn& u, const ShellSpec& shell) {
  const double shift = shell.from_axis ? 0.0 : rod.delta;
  const double a = shell.r_in + shift, b = shell.r_out + shift;
  if (!(shell.r_in > 0) || !(b > a)) throw ShellSpecError("shell needs 0 < r_in < r_out");
  if (a <= rod.delta) throw ShellSpecError("shell intersects the inclusion");
  const double h = 1e-4 * rod.delta;
  const std::vector<QuadPoint> pts = shell_points(rod, a, b, shell.level);
  EnergyResult r;
  r.points = static_cast<long>(pts.size());
  r.energy = integrate_points(mat, u, pts, h, shell.threads);
  r.tail_bound = integrate_points(mat, u, tail_points(rod, b, shell.level), h, shell.threads);
  return r;
}

const char* scan_param_name(ScanParam p) {
  switch (p) {
    case ScanParam::C0: return "c0";
    case ScanParam::Varrho: return "varrho";
    case ScanParam::Delta: return "delta";
  }
  return "?";
}

ScanParam parse_scan_param(const std::string& s) {
  if (s == "c0") return ScanParam::C0;
  if (s == "varrho") return ScanParam::Varrho;
  if (s == "delta") return ScanParam::Delta;
  throw std::invalid_argument("unknown scan parameter: " + s);
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DegenerateFitError("slope fit needs matching data");
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw DegenerateFitError("slope fit needs positive data");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const int n = static_cast<int>(lx.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw DegenerateFitError("slope fit needs distinct abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  f.window_lo = *std::min_element(x.begin(), x.end());
  f.window_hi = *std::max_element(x.begin(), x.end());
  f.points = n;
  f.admissible = n >= 5 && f.window_hi >= 100 * f.window_lo;
  return f;
}

ScanTable blowup_scan(ResonanceKind k, const LameMaterial& mat, const RodGeometry& rod, const BackgroundField& f,
                      const ScanSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("scan needs parameter values");
  ScanTable t;
  t.kind = k;
  t.param = spec.param;
  const double c0_fixed =
      std::isnan(spec.c0) ? (k == ResonanceKind::Case4 ? 100.0 : case_c0(k, mat)) : spec.c0;
  t.density_sup = case_density_sup(k, mat, f, rod);
  t.detected = t.density_sup > 1e-12;
  const FieldFn u = singular_fieldfn(k, rod, mat, f);
  // B0 does not depend on delta; the energy only changes when the shell does
  std::map<std::pair<double, double>, EnergyResult> cache;
  for (double v : spec.values) {
    RodGeometry r = rod;
    double c0 = c0_fixed, varrho = spec.varrho;
    switch (spec.param) {
      case ScanParam::C0: c0 = v; break;
      case ScanParam::Varrho: varrho = v; break;
      case ScanParam::Delta: r = build_rod(rod.L, v); break;
    }
    const double dist_in = spec.shell.from_axis ? spec.shell.r_in - r.delta : spec.shell.r_in;
    if (dist_in < 2 * r.delta - 1e-15) throw ShellSpecError("energy shell must keep dist >= 2 delta");
    const double shift = spec.shell.from_axis ? 0.0 : r.delta;
    const auto key = std::make_pair(spec.shell.r_in + shift, spec.shell.r_out + shift);
    auto it = cache.find(key);
    if (it == cache.end()) {
      ShellSpec s = spec.shell;
      s.from_axis = true;
      s.r_in = key.first;
      s.r_out = key.second;
      it = cache.emplace(key, energy(mat, r, u, s)).first;
    }
    const double pre = energy_prefactor(k, mat, c0, varrho, r.delta);
    const cplx c(c0, varrho);
    const double amp = std::abs(c - 1.0) < 1e-300 ? 0.0 : std::abs(singular_scalar(k, mat, c));
    t.rows.push_back({v, pre * it->second.energy, pre * it->second.tail_bound, amp});
    t.base_energy = it->second.energy;
  }
  std::vector<double> xs, ys;
  for (const ScanRow& row : t.rows) {
    xs.push_back(row.param);
    ys.push_back(row.energy);
  }
  if (xs.size() >= 2) t.fit = fit_loglog(xs, ys);
  return t;
}

ConcentrationProfile concentration_profile(const FieldFn& u, const RodGeometry& rod, double offset, double kappa) {
  if (!(offset > 0)) throw std::invalid_argument("concentration offset must be positive");
  ConcentrationProfile p;
  const double lo = -0.5 * rod.L - 5 * rod.delta, hi = 0.5 * rod.L + 5 * rod.delta, z = rod.delta + offset;
  for (int i = 0; i < 64; ++i) {
    const double t = lo + (hi - lo) * i / 63;
    const double m = u.value(Vec3(t, 0, z)).norm();
    p.t.push_back(t);
    p.magnitude.push_back(m);
    if (std::abs(t - rod.P(0)) <= kappa * rod.delta || std::abs(t - rod.Q(0)) <= kappa * rod.delta)
      p.endpoint_max = std::max(p.endpoint_max, m);
  }
  p.mid = u.value(Vec3(0, 0, z)).norm();
  p.ratio = p.mid > 0 ? p.endpoint_max / p.mid : std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace nanorod
