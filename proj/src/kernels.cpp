#include "nanorod/kernels.hpp"

#include <cmath>

namespace nanorod {

namespace {

void check_r(double n) {
  if (!(n >= 1e-300)) throw SingularEvaluationError("kernel evaluated at |r| < 1e-300");
}

// derivatives of exp(i k r) / r
struct OutgoingDerivs {
  cplx q, q1, q2, q3;
};

OutgoingDerivs outgoing(cplx k, double r) {
  const cplx i(0, 1);
  const cplx e = std::exp(i * k * r);
  const double r2 = r * r, r3 = r2 * r, r4 = r3 * r;
  OutgoingDerivs d;
  d.q = e / r;
  d.q1 = e * (i * k / r - 1.0 / r2);
  d.q2 = e * (-k * k / r - 2.0 * i * k / r2 + 2.0 / r3);
  d.q3 = e * (-i * k * k * k / r + 3.0 * k * k / r2 + 6.0 * i * k / r3 - 6.0 / r4);
  return d;
}

}  // namespace

RadialParts<double> kelvin_parts(const LameMaterial& mat, double r) {
  const double a1 = alpha1(mat), a2 = alpha2(mat);
  return {a1 / r, -a1 / (r * r), a2 / r, -a2 / (r * r)};
}

RadialParts<double> gamma2_parts(const LameMaterial& mat, double r) {
  const double a4 = alpha4(mat), a5 = alpha5(mat);
  return {a4 * r, a4, a5 * r, a5};
}

RadialParts<cplx> kupradze_parts_closed(const LameMaterial& mat, cplx omega, double r) {
  const double cs = std::sqrt(mat.mu), cp = std::sqrt(mat.lambda + 2.0 * mat.mu);
  const cplx ks = omega / cs, kp = omega / cp;
  const OutgoingDerivs s = outgoing(ks, r), p = outgoing(kp, r);
  const cplx h1 = p.q1 - s.q1, h2 = p.q2 - s.q2, h3 = p.q3 - s.q3;
  const cplx w = 1.0 / (4.0 * kPi * omega * omega);
  const double m = 1.0 / (4.0 * kPi * mat.mu);
  RadialParts<cplx> out;
  out.f = -s.q * m + w * h1 / r;
  out.fp = -s.q1 * m + w * (h2 / r - h1 / (r * r));
  out.g = w * (h2 - h1 / r);
  out.gp = w * (h3 - h2 / r + h1 / (r * r));
  return out;
}

RadialParts<cplx> kupradze_parts_series(const LameMaterial& mat, cplx omega, double r, int n_terms) {
  const double cs = std::sqrt(mat.mu), cp = std::sqrt(mat.lambda + 2.0 * mat.mu);
  const cplx i(0, 1);
  RadialParts<cplx> out{0.0, 0.0, 0.0, 0.0};
  cplx in = 1.0, wn = 1.0;  // i^n, omega^n
  double fact = 1.0, rn = 1.0 / r;  // n!, r^(n-1)
  double csn = cs * cs, cpn = cp * cp;  // c^(n+2)
  for (int n = 0; n < n_terms; ++n) {
    const cplx common = in * wn / ((n + 2.0) * fact);
    const cplx a = common * ((n + 1.0) / csn + 1.0 / cpn);
    const cplx b = common * (n - 1.0) * (1.0 / csn - 1.0 / cpn);
    const double drn = (n - 1.0) * rn / r;  // d/dr r^(n-1)
    out.f += -a * rn / (4.0 * kPi);
    out.fp += -a * drn / (4.0 * kPi);
    out.g += b * rn / (4.0 * kPi);
    out.gp += b * drn / (4.0 * kPi);
    in *= i;
    wn *= omega;
    fact *= (n + 1.0);
    rn *= r;
    csn *= cs;
    cpn *= cp;
  }
  return out;
}

double kupradze_series_tail(const LameMaterial& mat, cplx omega, double r, int n_terms) {
  const double cs = std::sqrt(mat.mu);
  double fact = 1.0;
  for (int k = 2; k <= n_terms; ++k) fact *= k;
  return std::pow(std::abs(omega) * r / cs, n_terms) / fact * (n_terms + 1.0) / (n_terms + 2.0);
}

RadialParts<cplx> kupradze_parts(const LameMaterial& mat, cplx omega, double r) {
  if (omega == cplx(0.0)) {
    const RadialParts<double> k = kelvin_parts(mat, r);
    return {k.f, k.fp, k.g, k.gp};
  }
  if (std::abs(omega) * r < kSeriesSwitch) return kupradze_parts_series(mat, omega, r, kSeriesTerms);
  return kupradze_parts_closed(mat, omega, r);
}

Mat3 kelvin(const LameMaterial& mat, const Vec3& r) {
  const double n = r.norm();
  check_r(n);
  return radial_value(kelvin_parts(mat, n), r);
}

KernelGrad<double> kelvin_grad(const LameMaterial& mat, const Vec3& r) {
  const double n = r.norm();
  check_r(n);
  return radial_grad(kelvin_parts(mat, n), r);
}

Mat3c kupradze_c(const LameMaterial& mat, cplx omega, const Vec3& r) {
  const double n = r.norm();
  check_r(n);
  if (omega == cplx(0.0)) return kelvin(mat, r).cast<cplx>();
  return radial_value(kupradze_parts(mat, omega, n), r);
}

Mat3c kupradze(const LameMaterial& mat, double omega, const Vec3& r) {
  if (omega < 0) throw std::invalid_argument("kupradze: omega must be non-negative");
  return kupradze_c(mat, omega, r);
}

KernelGrad<cplx> kupradze_grad(const LameMaterial& mat, cplx omega, const Vec3& r) {
  const double n = r.norm();
  check_r(n);
  return radial_grad(kupradze_parts(mat, omega, n), r);
}

Mat3 gamma2(const LameMaterial& mat, const Vec3& r) {
  const double n = r.norm();
  if (n == 0.0) return Mat3::Zero();
  return radial_value(gamma2_parts(mat, n), r);
}

KernelGrad<double> gamma2_grad(const LameMaterial& mat, const Vec3& r) {
  const double n = r.norm();
  check_r(n);
  return radial_grad(gamma2_parts(mat, n), r);
}

Mat3 traction_kernel(const LameMaterial& mat, const Vec3& r, const Vec3& nu, KernelKind which) {
  if (which == KernelKind::Kelvin) return traction_from_grad(mat, kelvin_grad(mat, r), nu);
  return traction_from_grad(mat, gamma2_grad(mat, r), nu);
}

Mat3c traction_kupradze(const LameMaterial& mat, cplx omega, const Vec3& r, const Vec3& nu) {
  return traction_from_grad(mat, kupradze_grad(mat, omega, r), nu);
}

Mat3 gamma2_traction_closed(const LameMaterial& mat, const Vec3& r, const Vec3& nu) {
  const double lam = mat.lambda, mu = mat.mu, a4 = alpha4(mat), a5 = alpha5(mat);
  const double n = r.norm();
  check_r(n);
  const double rn = r.dot(nu);
  Mat3 t = (lam * a4 + (3.0 * lam + 2.0 * mu) * a5) * (nu * r.transpose()) / n;
  t += mu * (a4 + a5) * ((r * nu.transpose()) / n + (rn / n) * Mat3::Identity());
  t -= 2.0 * mu * a5 * rn * (r * r.transpose()) / (n * n * n);
  return t;
}

}  // namespace nanorod
