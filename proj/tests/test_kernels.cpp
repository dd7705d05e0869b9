#include <cmath>

#include "doctest.h"
#include "nanorod/diagnostics.hpp"
#include "nanorod/kernels.hpp"

using namespace nanorod;

namespace {

const LameMaterial kUnit{1.0, 1.0};

// traction of a generic kernel from central differences of its columns
template <class F>
Mat3 fd_traction(const LameMaterial& mat, F&& kern, const Vec3& r, const Vec3& nu, double h) {
  Mat3 d[3];
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = Vec3::Unit(k) * h;
    d[k] = (kern(r + e) - kern(r - e)) / (2 * h);
  }
  Mat3 t;
  for (int j = 0; j < 3; ++j) {
    const double div = d[0](0, j) + d[1](1, j) + d[2](2, j);
    for (int i = 0; i < 3; ++i) {
      double s = mat.lambda * div * nu(i);
      for (int k = 0; k < 3; ++k) s += mat.mu * (d[k](i, j) + d[i](k, j)) * nu(k);
      t(i, j) = s;
    }
  }
  return t;
}

}  // namespace

TEST_CASE("kelvin closed-form values") {
  const Mat3 g = kelvin(kUnit, Vec3(1, 0, 0));
  CHECK(g(0, 0) == doctest::Approx(-1.0 / (4 * kPi)).epsilon(1e-14));
  CHECK(g(1, 1) == doctest::Approx(-1.0 / (6 * kPi)).epsilon(1e-14));
  CHECK(g(2, 2) == doctest::Approx(-1.0 / (6 * kPi)).epsilon(1e-14));
  CHECK(std::abs(g(0, 1)) + std::abs(g(0, 2)) + std::abs(g(1, 2)) == 0.0);
  CHECK_THROWS_AS(kelvin(kUnit, Vec3(0, 0, 0)), SingularEvaluationError);
}

TEST_CASE("kelvin symmetry and homogeneity") {
  const LameMaterial m = make_material(1.7, 0.6);
  for (const Vec3& r : random_points(30, 0.3, 3.0, 5)) {
    const Mat3 g = kelvin(m, r);
    CHECK((g - g.transpose()).norm() <= 1e-14 * g.norm());
    CHECK((kelvin(m, 2.5 * r) - g / 2.5).norm() <= 1e-14 * g.norm());
    CHECK((kelvin(m, -r) - g).norm() <= 1e-15 * g.norm());
    const KernelGrad<double> a = kelvin_grad(m, r), b = kelvin_grad(m, 0.5 * r);
    for (int k = 0; k < 3; ++k) CHECK((b.d[k] - 4.0 * a.d[k]).norm() <= 1e-13 * a.d[k].norm());
  }
}

TEST_CASE("kelvin gradient against finite differences") {
  CHECK(kelvin_grad(kUnit, Vec3(1, 0, 0)).d[0](0, 0) == doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-14));
  const LameMaterial m = make_material(0.8, 1.3);
  const double h = 1e-5;
  for (const Vec3& r : random_points(20, 0.5, 2.0, 9)) {
    const KernelGrad<double> g = kelvin_grad(m, r);
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = Vec3::Unit(k) * h;
      const Mat3 fd = (kelvin(m, r + e) - kelvin(m, r - e)) / (2 * h);
      CHECK((fd - g.d[k]).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("kupradze at zero frequency is kelvin") {
  const LameMaterial m = make_material(2, 1);
  for (const Vec3& r : random_points(10, 0.1, 3.0, 2)) {
    const Mat3c k = kupradze(m, 0.0, r);
    CHECK((k - kelvin(m, r).cast<cplx>()).norm() <= 1e-14 * kelvin(m, r).norm());
  }
}

TEST_CASE("kupradze against its low-frequency expansion") {
  const double w = 0.01;
  const Vec3 r(1, 0, 0);
  Mat3c ref = kelvin(kUnit, r).cast<cplx>() + (w * w) * gamma2(kUnit, r).cast<cplx>();
  ref.diagonal().array() += w * alpha3(kUnit);
  CHECK((kupradze(kUnit, w, r) - ref).cwiseAbs().maxCoeff() < 5e-7);
}

TEST_CASE("kupradze closed form and series agree") {
  const LameMaterial m = make_material(1, 1);
  for (double r : {0.5, 1.0, 2.0}) {
    const double w = 0.05 / r;
    const RadialParts<cplx> a = kupradze_parts_closed(m, w, r), b = kupradze_parts_series(m, w, r, 12);
    CHECK(std::abs(a.f - b.f) <= 1e-10 * std::abs(a.f));
    CHECK(std::abs(a.g - b.g) <= 1e-10 * std::abs(a.g));
    CHECK(std::abs(a.fp - b.fp) <= 1e-10 * std::abs(a.fp));
    CHECK(std::abs(a.gp - b.gp) <= 1e-10 * std::abs(a.gp));
  }
  // on the switch boundary
  for (double w : {0.1, 0.5, 1.0}) {
    const double r = kSeriesSwitch / w;
    const RadialParts<cplx> a = kupradze_parts_closed(m, w, r), b = kupradze_parts_series(m, w, r, kSeriesTerms);
    CHECK(std::abs(a.f - b.f) <= 1e-10 * std::abs(a.f));
    CHECK(std::abs(a.g - b.g) <= 1e-10 * std::abs(a.g));
    CHECK(kupradze_series_tail(m, w, r, kSeriesTerms) < 1e-16);
  }
}

TEST_CASE("kupradze symmetry and gradient") {
  const LameMaterial m = make_material(1.2, 0.9);
  const double h = 1e-5;
  for (const Vec3& r : random_points(20, 0.2, 2.0, 4)) {
    for (double w : {0.3, 2.0}) {
      const Mat3c k = kupradze(m, w, r);
      CHECK((k - k.transpose()).norm() <= 1e-14 * k.norm());
      const KernelGrad<cplx> g = kupradze_grad(m, w, r);
      for (int c = 0; c < 3; ++c) {
        const Vec3 e = Vec3::Unit(c) * h;
        const Mat3c fd = (kupradze(m, w, r + e) - kupradze(m, w, r - e)) / (2 * h);
        CHECK((fd - g.d[c]).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }
}

TEST_CASE("kernel PDE residuals") {
  const LameMaterial m = make_material(1, 1);
  for (const Vec3& r : random_points(50, 0.5, 2.0, 17)) {
    CHECK(kernel_lame_residual(m, 0.0, r) <= 1e-5);
    CHECK(kernel_lame_residual(m, 0.1, r) <= 1e-5);
    CHECK(kernel_lame_residual(m, 0.5, r) <= 1e-5);
  }
}

TEST_CASE("gamma2 values and homogeneity") {
  const Mat3 g = gamma2(kUnit, Vec3(1, 0, 0));
  CHECK(g(0, 0) == doctest::Approx(0.0221049).epsilon(1e-5));
  CHECK(g(1, 1) == doctest::Approx(0.0309468).epsilon(1e-5));
  CHECK(g(0, 0) == doctest::Approx(alpha4(kUnit) + alpha5(kUnit)).epsilon(1e-14));
  CHECK(gamma2(kUnit, Vec3(0, 0, 0)).norm() == 0.0);
  for (const Vec3& r : random_points(10, 0.1, 2.0, 8))
    CHECK((gamma2(kUnit, 3.0 * r) - 3.0 * gamma2(kUnit, r)).norm() <= 1e-14 * gamma2(kUnit, r).norm());
}

TEST_CASE("traction kernels") {
  const LameMaterial m = make_material(1, 1);
  const Mat3 t = traction_kernel(m, Vec3(1, 0, 0), Vec3(1, 0, 0), KernelKind::Gamma2);
  const double a4 = alpha4(m), a5 = alpha5(m);
  CHECK(t(0, 0) == doctest::Approx(m.lambda * (a4 + 3 * a5) + 2 * m.mu * (a4 + a5)).epsilon(1e-13));

  const LameMaterial m2 = make_material(2.1, 0.7);
  const std::vector<Vec3> rs = random_points(20, 0.5, 2.0, 21), nus = random_points(20, 1.0, 1.0, 22);
  for (size_t i = 0; i < rs.size(); ++i) {
    const Vec3& r = rs[i];
    const Vec3& nu = nus[i];
    const Mat3 tk = traction_kernel(m2, r, nu, KernelKind::Kelvin);
    CHECK((traction_kernel(m2, 2.0 * r, nu, KernelKind::Kelvin) - tk / 4.0).norm() <= 1e-13 * tk.norm());
    const Mat3 fk = fd_traction(m2, [&](const Vec3& x) { return kelvin(m2, x); }, r, nu, 1e-5);
    CHECK((fk - tk).cwiseAbs().maxCoeff() < 1e-7);
    const Mat3 t2 = traction_kernel(m2, r, nu, KernelKind::Gamma2);
    const Mat3 f2 = fd_traction(m2, [&](const Vec3& x) { return gamma2(m2, x); }, r, nu, 1e-5);
    CHECK((f2 - t2).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((gamma2_traction_closed(m2, r, nu) - t2).norm() <= 1e-12 * t2.norm());
    const Mat3c tw = traction_kupradze(m2, 0.0, r, nu);
    CHECK((tw - tk.cast<cplx>()).norm() <= 1e-13 * tk.norm());
  }
}
