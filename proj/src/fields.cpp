#include "nanorod/fields.hpp"

#include <cmath>
#include <random>

namespace nanorod {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// d^{a} d^{b} ... of a monomial, via repeated power rule
double mono_deriv(const Monomial& m, const Vec3& x, std::array<int, 3> order) {
  double c = m.coef;
  std::array<int, 3> p = m.power;
  for (int k = 0; k < 3; ++k) {
    for (int t = 0; t < order[k]; ++t) {
      if (p[k] == 0) return 0.0;
      c *= p[k];
      --p[k];
    }
  }
  return c * ipow(x(0), p[0]) * ipow(x(1), p[1]) * ipow(x(2), p[2]);
}

}  // namespace

BackgroundField::BackgroundField(std::string name, std::vector<Monomial> terms)
    : name_(std::move(name)), terms_(std::move(terms)) {
  for (const Monomial& m : terms_) {
    if (m.component < 0 || m.component > 2) throw FieldError("monomial component out of range");
    for (int p : m.power)
      if (p < 0) throw FieldError("negative monomial exponent");
  }
}

int BackgroundField::degree() const {
  int d = 0;
  for (const Monomial& m : terms_) d = std::max(d, m.power[0] + m.power[1] + m.power[2]);
  return d;
}

Vec3 BackgroundField::value(const Vec3& x) const {
  Vec3 v = Vec3::Zero();
  for (const Monomial& m : terms_) v(m.component) += mono_deriv(m, x, {0, 0, 0});
  return v;
}

Mat3 BackgroundField::gradient(const Vec3& x) const {
  Mat3 g = Mat3::Zero();
  for (const Monomial& m : terms_)
    for (int j = 0; j < 3; ++j) {
      std::array<int, 3> o{0, 0, 0};
      o[j] = 1;
      g(m.component, j) += mono_deriv(m, x, o);
    }
  return g;
}

std::array<Mat3, 3> BackgroundField::hessian(const Vec3& x) const {
  std::array<Mat3, 3> h{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  for (const Monomial& m : terms_)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        std::array<int, 3> o{0, 0, 0};
        o[j] += 1;
        o[k] += 1;
        h[m.component](j, k) += mono_deriv(m, x, o);
      }
  return h;
}

BackgroundField BackgroundField::scaled(double s) const {
  std::vector<Monomial> t = terms_;
  for (Monomial& m : t) m.coef *= s;
  return BackgroundField(name_, t);
}

BackgroundField BackgroundField::plus(const BackgroundField& o) const {
  std::vector<Monomial> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return BackgroundField(name_ + "+" + o.name_, t);
}

BackgroundField zero_field() { return BackgroundField("zero", {}); }

BackgroundField builtin_field(const std::string& name) {
  if (name == "zero") return zero_field();
  if (name == "quad_a")
    return BackgroundField(name, {{0, {1, 1, 0}, 2.0}, {1, {2, 0, 0}, 1.0}, {1, {0, 2, 0}, -1.0}});
  if (name == "quad_b")
    return BackgroundField(name, {{0, {2, 0, 0}, 1.0}, {0, {0, 2, 0}, -1.0}, {1, {1, 1, 0}, -2.0}});
  if (name == "lin_rot") return BackgroundField(name, {{0, {0, 1, 0}, 1.0}, {1, {1, 0, 0}, 1.0}});
  if (name == "rigid_rot") return BackgroundField(name, {{0, {0, 1, 0}, 1.0}, {1, {1, 0, 0}, -1.0}});
  throw FieldError("unknown background field: " + name);
}

Vec3 lame_operator(const LameMaterial& mat, const BackgroundField& f, const Vec3& x) {
  const std::array<Mat3, 3> h = f.hessian(x);
  Vec3 lap, gd = Vec3::Zero();
  for (int i = 0; i < 3; ++i) lap(i) = h[i].trace();
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) gd(j) += h[i](i, j);
  return mat.mu * lap + (mat.lambda + mat.mu) * gd;
}

double lame_residual(const LameMaterial& mat, const BackgroundField& f, const std::vector<Vec3>& pts) {
  double r = 0;
  for (const Vec3& x : pts) r = std::max(r, lame_operator(mat, f, x).norm());
  return r;
}

BackgroundField custom_polynomial(const std::vector<Monomial>& terms, const LameMaterial& mat,
                                  const std::string& name) {
  BackgroundField f(name, terms);
  if (f.degree() > 3) throw FieldError("custom polynomial exceeds total degree 3");
  // the residual is affine for degree <= 3, so a handful of points decides it
  std::vector<Vec3> pts{Vec3::Zero(), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(-0.7, 0.3, 0.9)};
  const double res = lame_residual(mat, f, pts);
  if (res > 1e-10) throw FieldError("custom polynomial violates the static Lame equation (residual " +
                                    std::to_string(res) + ")");
  return f;
}

Vec3 field_traction(const LameMaterial& mat, const BackgroundField& f, const Vec3& x, const Vec3& nu) {
  const Mat3 g = f.gradient(x);
  return mat.lambda * g.trace() * nu + mat.mu * (g + g.transpose()) * nu;
}

Mat3 matrix_B() {
  Mat3 b = Mat3::Zero();
  b(1, 1) = b(2, 2) = 1.0;
  return b;
}

Mat3 matrix_C() {
  Mat3 c = Mat3::Zero();
  c(1, 2) = 1.0;
  c(2, 1) = -1.0;
  return c;
}

DerivativePack derivative_pack(const BackgroundField& f, const Vec3& z) {
  DerivativePack p;
  const Mat3 g = f.gradient(z);
  const std::array<Mat3, 3> h = f.hessian(z);
  p.div = g.trace();
  p.div_B = g(1, 1) + g(2, 2);
  p.grad_sym = g + g.transpose();
  for (int i = 0; i < 3; ++i) {
    p.laplacian(i) = h[i].trace();
    p.d2_axis(i) = h[i](0, 0);
  }
  for (int j = 0; j < 3; ++j) {
    p.grad_div(j) = h[0](0, j) + h[1](1, j) + h[2](2, j);
    p.grad_div_B(j) = h[1](1, j) + h[2](2, j);
    p.curl_e1_grad(j) = h[2](j, 1) - h[1](j, 2);
    p.B_contract(j) = h[1](1, j) + h[j](1, 1) + h[2](2, j) + h[j](2, 2);
  }
  return p;
}

Vec3 endpoint_bracket(const LameMaterial& mat, const BackgroundField& f, const Vec3& x) {
  const Mat3 g = f.gradient(x);
  const Vec3 e1(1, 0, 0);
  return mat.lambda * g.trace() * e1 + mat.mu * (g + g.transpose()) * e1;
}

}  // namespace nanorod
