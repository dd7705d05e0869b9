#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "nanorod/material.hpp"

namespace nanorod {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class FieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Monomial {
  int component;             // 0, 1, 2
  std::array<int, 3> power;  // exponents of x1, x2, x3
  double coef;
};

// Polynomial background field with exact derivatives.
class BackgroundField {
 public:
  BackgroundField() = default;
  BackgroundField(std::string name, std::vector<Monomial> terms);

  const std::string& name() const { return name_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  int degree() const;

  Vec3 value(const Vec3& x) const;
  // (grad H)_{ij} = d_j H_i
  Mat3 gradient(const Vec3& x) const;
  // hessian[i](j, k) = d_j d_k H_i
  std::array<Mat3, 3> hessian(const Vec3& x) const;

  BackgroundField scaled(double s) const;
  BackgroundField plus(const BackgroundField& o) const;

 private:
  std::string name_ = "zero";
  std::vector<Monomial> terms_;
};

BackgroundField zero_field();
BackgroundField builtin_field(const std::string& name);
// Validates mu*Lap H + (lambda+mu) grad div H = 0 to 1e-10 for the material.
BackgroundField custom_polynomial(const std::vector<Monomial>& terms, const LameMaterial& mat,
                                  const std::string& name = "custom_polynomial");

Vec3 lame_operator(const LameMaterial& mat, const BackgroundField& f, const Vec3& x);
double lame_residual(const LameMaterial& mat, const BackgroundField& f, const std::vector<Vec3>& pts);

Vec3 field_traction(const LameMaterial& mat, const BackgroundField& f, const Vec3& x, const Vec3& nu);

struct DerivativePack {
  double div = 0;
  Mat3 grad_sym = Mat3::Zero();
  Vec3 laplacian = Vec3::Zero();
  Vec3 d2_axis = Vec3::Zero();
  Vec3 grad_div = Vec3::Zero();
  Vec3 grad_div_B = Vec3::Zero();
  Vec3 curl_e1_grad = Vec3::Zero();
  Vec3 B_contract = Vec3::Zero();
  double div_B = 0;  // div(B H)
};

DerivativePack derivative_pack(const BackgroundField& f, const Vec3& z);

// constant matrices B = diag(0,1,1) and C
Mat3 matrix_B();
Mat3 matrix_C();

// lambda (div H) e1 + 2 mu (sym grad H) e1 at x
Vec3 endpoint_bracket(const LameMaterial& mat, const BackgroundField& f, const Vec3& x);

}  // namespace nanorod
