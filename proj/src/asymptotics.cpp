#include "nanorod/asymptotics.hpp"

#include <algorithm>
#include <cmath>

namespace nanorod {

namespace {

void check_lambda1(cplx lambda1) {
  if (std::abs(lambda1) < kExactResonance || std::abs(2.0 * lambda1 - 1.0) < kExactResonance)
    throw ResonantDenominatorError("lambda1 = 0 or 1/2 makes the density coefficients singular");
}

Mat3c to_c(const Mat3& m) { return m.cast<cplx>(); }
Vec3c to_c(const Vec3& v) { return v.cast<cplx>(); }

void check_off_axis(const RodGeometry& rod, const Vec3& x) {
  if (std::abs(x(0)) <= 0.5 * rod.L && std::hypot(x(1), x(2)) < 1e-14)
    throw SingularEvaluationError("line operator evaluated on the axis segment");
}

std::vector<double> axis_breaks(const RodGeometry& rod, const Vec3& x) {
  const double rho = std::hypot(x(1), x(2));
  std::vector<double> b;
  for (double s : {-10.0, -1.0, 0.0, 1.0, 10.0}) b.push_back(x(0) + s * rho);
  b.erase(std::remove_if(b.begin(), b.end(), [&](double t) { return t <= -0.5 * rod.L || t >= 0.5 * rod.L; }),
          b.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

struct LinFit {
  double a, b, r2, sst;
};

LinFit fit_line(const std::vector<double>& t, const std::vector<double>& v) {
  const int n = static_cast<int>(t.size());
  double mt = 0, mv = 0;
  for (int i = 0; i < n; ++i) {
    mt += t[i] / n;
    mv += v[i] / n;
  }
  double stt = 0, stv = 0, svv = 0;
  for (int i = 0; i < n; ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    stv += (t[i] - mt) * (v[i] - mv);
    svv += (v[i] - mv) * (v[i] - mv);
  }
  LinFit f;
  f.b = stv / stt;
  f.a = mv - f.b * mt;
  f.sst = svv;
  double res = 0;
  for (int i = 0; i < n; ++i) {
    const double e = v[i] - f.a - f.b * t[i];
    res += e * e;
  }
  f.r2 = svv > 0 ? 1.0 - res / svv : 1.0;
  return f;
}

template <class Eval>
SingularityFit probe(double x0, const std::vector<double>& rho, double theta, Eval&& eval, bool inverse) {
  if (rho.size() < 3) throw std::invalid_argument("singularity probe needs at least 3 radii");
  SingularityFit out;
  out.rho = rho;
  std::vector<double> t;
  for (double r : rho) {
    if (!(r > 0)) throw std::invalid_argument("probe radii must be positive");
    const Vec3 x(x0, r * std::cos(theta), r * std::sin(theta));
    out.values.push_back(eval(x).real());
    t.push_back(inverse ? 1.0 / r : std::log(r));
  }
  LinFit fits[3];
  double sst_max = 0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> v;
    for (const auto& val : out.values) v.push_back(val(c));
    fits[c] = fit_line(t, v);
    out.a(c) = fits[c].a;
    out.b(c) = fits[c].b;
    sst_max = std::max(sst_max, fits[c].sst);
  }
  // components that only carry rounding noise do not enter the fit quality
  for (const LinFit& f : fits)
    if (f.sst > 1e-10 * sst_max) out.r2 = std::min(out.r2, f.r2);
  out.poor = out.r2 < 0.999;
  return out;
}

}  // namespace

Vec3c density_G(const LameMaterial& mat, cplx lambda1, const BackgroundField& f, double y1) {
  check_lambda1(lambda1);
  const DerivedConstants dc = derived_constants(mat, lambda1, 0.0);
  const double lam = mat.lambda, mu = mat.mu;
  const DerivativePack p = derivative_pack(f, Vec3(y1, 0, 0));
  const Mat3c B = to_c(matrix_B()), C = to_c(matrix_C());
  const Mat3c proj = Mat3c::Identity() - mu * dc.l2 * B;
  const cplx s = 2.0 * lambda1 - 1.0;
  Vec3c g = 2.0 * kPi * ((lam + 2 * mu) + (lam + mu) / s) * dc.l1 * B *
            (lam * to_c(p.grad_div) + 2.0 * mu * mu * dc.l2 * to_c(p.grad_div_B));
  g += (mu * kPi / lambda1) * proj * to_c(p.B_contract);
  g += (mu * kPi / (lambda1 * s)) * proj * to_c(Vec3(p.laplacian - p.d2_axis + p.grad_div_B));
  g -= (2.0 * kPi * mu * mu / s) * dc.l2 * C * to_c(p.curl_e1_grad);
  return g;
}

Mat3c density_R(const LameMaterial& mat, cplx lambda1, const BackgroundField& f, double y1) {
  check_lambda1(lambda1);
  const DerivedConstants dc = derived_constants(mat, lambda1, 0.0);
  const double mu = mat.mu;
  const DerivativePack p = derivative_pack(f, Vec3(y1, 0, 0));
  const Mat3c proj = Mat3c::Identity() - mu * dc.l2 * to_c(matrix_B());
  Mat3c r = (dc.l01 * p.div + dc.l02 * p.div_B) * Mat3c::Identity();
  r += (mu / lambda1) * proj * to_c(p.grad_sym);
  return kPi * r;
}

AxialDensity sample_density(const LameMaterial& mat, cplx lambda1, const BackgroundField& f, const RodGeometry& rod,
                            int n) {
  if (n < 2) throw std::invalid_argument("axial density needs at least 2 samples");
  AxialDensity d;
  for (int i = 0; i < n; ++i) {
    const double y = -0.5 * rod.L + rod.L * i / (n - 1);
    d.grid.push_back(y);
    d.G.push_back(density_G(mat, lambda1, f, y));
    d.R.push_back(density_R(mat, lambda1, f, y));
  }
  return d;
}

Vec3c lineop_A1(const RodGeometry& rod, const LameMaterial& mat, const AxialVector& phi, const Vec3& x,
                const AdaptiveOptions& opt) {
  check_off_axis(rod, x);
  auto f = [&](double y) -> Vec3c { return to_c(kelvin(mat, x - Vec3(y, 0, 0))).eval() * phi(y); };
  return integrate_adaptive<Vec3c>(f, -0.5 * rod.L, 0.5 * rod.L, opt, axis_breaks(rod, x));
}

Vec3c lineop_A2(const RodGeometry& rod, const LameMaterial& mat, const AxialMatrix& N, const Vec3& x,
                const AdaptiveOptions& opt) {
  check_off_axis(rod, x);
  auto f = [&](double y) -> Vec3c {
    const KernelGrad<double> g = kelvin_grad(mat, x - Vec3(y, 0, 0));
    const Mat3c n = N(y);
    return to_c(g.d[1]) * n.col(1) + to_c(g.d[2]) * n.col(2);
  };
  return integrate_adaptive<Vec3c>(f, -0.5 * rod.L, 0.5 * rod.L, opt, axis_breaks(rod, x));
}

Mat3c lineop_A1_grad(const RodGeometry& rod, const LameMaterial& mat, const AxialVector& phi, const Vec3& x,
                     const AdaptiveOptions& opt) {
  check_off_axis(rod, x);
  auto f = [&](double y) -> Mat3c {
    const KernelGrad<double> g = kelvin_grad(mat, x - Vec3(y, 0, 0));
    const Vec3c p = phi(y);
    Mat3c m;
    for (int j = 0; j < 3; ++j) m.col(j) = to_c(g.d[j]) * p;
    return m;
  };
  return integrate_adaptive<Mat3c>(f, -0.5 * rod.L, 0.5 * rod.L, opt, axis_breaks(rod, x));
}

Mat3c fd_gradient(const std::function<Vec3c(const Vec3&)>& u, const Vec3& x, double h) {
  Mat3c g;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e(j) = h;
    g.col(j) = (8.0 * (u(x + e) - u(x - e)) - (u(x + 2 * e) - u(x - 2 * e))) / (12.0 * h);
  }
  return g;
}

Vec3c scattered_field(const RodGeometry& rod, const LameMaterial& mat, const Contrast& k, double omega,
                      const BackgroundField& H0, const BackgroundField& H1, const Vec3& x) {
  const cplx l1 = k.lambda1;
  const double d2 = rod.delta * rod.delta;
  const BackgroundField H = omega == 0.0 ? H0 : H0.plus(H1.scaled(omega));
  auto G = [&](double y) -> Vec3c {
    Vec3c g = density_G(mat, l1, H0, y);
    if (omega != 0.0) g += omega * density_G(mat, l1, H1, y);
    return g;
  };
  auto R = [&](double y) -> Mat3c {
    Mat3c r = density_R(mat, l1, H0, y);
    if (omega != 0.0) r += omega * density_R(mat, l1, H1, y);
    return r;
  };
  const cplx end = kPi * d2 / (l1 - 0.5);
  Vec3c u = d2 * lineop_A1(rod, mat, G, x) - d2 * lineop_A2(rod, mat, R, x);
  u -= end * (to_c(kelvin(mat, x - rod.P)) * to_c(endpoint_bracket(mat, H, rod.P)));
  u += end * (to_c(kelvin(mat, x - rod.Q)) * to_c(endpoint_bracket(mat, H, rod.Q)));
  if (omega != 0.0) {
    const cplx a3 = alpha3(mat);
    const GaussRule gl = gauss_legendre(64, -0.5 * rod.L, 0.5 * rod.L);
    Vec3c ig = Vec3c::Zero();
    for (size_t i = 0; i < gl.x.size(); ++i) ig += gl.w[i] * density_G(mat, l1, H0, gl.x[i]);
    u += a3 * omega * d2 * ig;
    u -= a3 * omega * end * to_c(endpoint_bracket(mat, H0, rod.P));
    u += a3 * omega * end * to_c(endpoint_bracket(mat, H0, rod.Q));
  }
  return u;
}

std::vector<double> probe_window(const RodGeometry& rod, double x0) {
  const double s = 0.5 * rod.L - std::abs(x0);
  if (!(s > 0)) throw std::invalid_argument("probe abscissa must lie inside the axis");
  std::vector<double> r;
  for (int i = 0; i < 12; ++i) r.push_back(s * std::pow(10.0, -4.0 + 2.0 * i / 11.0));
  return r;
}

SingularityFit probe_A1(const RodGeometry& rod, const LameMaterial& mat, const AxialVector& phi, double x0,
                        const std::vector<double>& rho, double theta) {
  return probe(x0, rho, theta, [&](const Vec3& x) { return lineop_A1(rod, mat, phi, x); }, false);
}

SingularityFit probe_A2(const RodGeometry& rod, const LameMaterial& mat, const AxialMatrix& N, double x0,
                        const std::vector<double>& rho, double theta) {
  return probe(x0, rho, theta, [&](const Vec3& x) { return lineop_A2(rod, mat, N, x); }, true);
}

Eigen::Vector3d a2_direction(const LameMaterial& mat, const Mat3& R, double theta) {
  const double lam = mat.lambda, mu = mat.mu;
  const double L = (lam + 3 * mu) / (lam + mu);
  const double c = std::cos(theta), s = std::sin(theta);
  const double k = (lam + mu) / (4 * kPi * mu * (lam + 2 * mu));
  const double R12 = R(0, 1), R13 = R(0, 2), R22 = R(1, 1), R23 = R(1, 2), R32 = R(2, 1), R33 = R(2, 2);
  Eigen::Vector3d a;
  a(0) = -(R12 * c + R13 * s) / (2 * kPi * mu);
  a(1) = k * (R22 * (-L * c + 2 * c * s * s) + R32 * (s - 2 * c * c * s) + R23 * (-L * s - 2 * s * c * c) +
              R33 * (c - 2 * c * s * s));
  a(2) = k * (R22 * (s - 2 * c * c * s) + R32 * (-L * c - 2 * c * s * s) + R23 * (c - 2 * c * s * s) +
              R33 * (-L * s + 2 * s * c * c));
  return a;
}

}  // namespace nanorod
