#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "nanorod/material.hpp"

namespace nanorod {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;

class SingularEvaluationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <class T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

// d[k](i, j) = d/dx_k of K_ij
template <class T>
struct KernelGrad {
  std::array<Mat3T<T>, 3> d;
};

// Isotropic kernel K(r) = f(|r|) I + g(|r|) rhat rhat^T with radial derivatives.
template <class T>
struct RadialParts {
  T f, fp, g, gp;
};

constexpr double kSeriesSwitch = 1e-2;
constexpr int kSeriesTerms = 16;

template <class T>
Mat3T<T> radial_value(const RadialParts<T>& p, const Vec3& r) {
  const double n = r.norm();
  const Vec3 e = r / n;
  Mat3T<T> m = (e * e.transpose()).template cast<T>() * p.g;
  m.diagonal().array() += p.f;
  return m;
}

template <class T>
KernelGrad<T> radial_grad(const RadialParts<T>& p, const Vec3& r) {
  const double n = r.norm();
  const Vec3 e = r / n;
  KernelGrad<T> out;
  for (int k = 0; k < 3; ++k) {
    Mat3T<T>& m = out.d[k];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double dei = ((i == k) - e(i) * e(k)) / n;
        const double dej = ((j == k) - e(j) * e(k)) / n;
        T v = p.gp * (e(k) * e(i) * e(j)) + p.g * (dei * e(j) + e(i) * dej);
        if (i == j) v += p.fp * e(k);
        m(i, j) = v;
      }
  }
  return out;
}

// Columnwise conormal derivative: lambda (div col) nu + mu (grad col + grad col^T) nu.
template <class T>
Mat3T<T> traction_from_grad(const LameMaterial& mat, const KernelGrad<T>& g, const Vec3& nu) {
  Mat3T<T> t;
  for (int j = 0; j < 3; ++j) {
    T div = g.d[0](0, j) + g.d[1](1, j) + g.d[2](2, j);
    for (int i = 0; i < 3; ++i) {
      T s = mat.lambda * div * nu(i);
      for (int k = 0; k < 3; ++k) s += mat.mu * (g.d[k](i, j) + g.d[i](k, j)) * nu(k);
      t(i, j) = s;
    }
  }
  return t;
}

RadialParts<double> kelvin_parts(const LameMaterial& mat, double r);
RadialParts<double> gamma2_parts(const LameMaterial& mat, double r);
// Kupradze radial parts for a possibly complex frequency; series below the switch.
RadialParts<cplx> kupradze_parts(const LameMaterial& mat, cplx omega, double r);
RadialParts<cplx> kupradze_parts_closed(const LameMaterial& mat, cplx omega, double r);
RadialParts<cplx> kupradze_parts_series(const LameMaterial& mat, cplx omega, double r, int n_terms);
// magnitude of the first omitted series term relative to the leading term
double kupradze_series_tail(const LameMaterial& mat, cplx omega, double r, int n_terms);

Mat3 kelvin(const LameMaterial& mat, const Vec3& r);
KernelGrad<double> kelvin_grad(const LameMaterial& mat, const Vec3& r);
Mat3c kupradze(const LameMaterial& mat, double omega, const Vec3& r);
Mat3c kupradze_c(const LameMaterial& mat, cplx omega, const Vec3& r);
KernelGrad<cplx> kupradze_grad(const LameMaterial& mat, cplx omega, const Vec3& r);
Mat3 gamma2(const LameMaterial& mat, const Vec3& r);
KernelGrad<double> gamma2_grad(const LameMaterial& mat, const Vec3& r);

enum class KernelKind { Kelvin, Gamma2 };

Mat3 traction_kernel(const LameMaterial& mat, const Vec3& r, const Vec3& nu, KernelKind which);
Mat3c traction_kupradze(const LameMaterial& mat, cplx omega, const Vec3& r, const Vec3& nu);

// The explicit four-term expression for the conormal derivative of Gamma2.
Mat3 gamma2_traction_closed(const LameMaterial& mat, const Vec3& r, const Vec3& nu);

}  // namespace nanorod
