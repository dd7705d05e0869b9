#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "nanorod/fields.hpp"
#include "nanorod/geometry.hpp"
#include "nanorod/kernels.hpp"
#include "nanorod/material.hpp"
#include "nanorod/quadrature.hpp"

namespace nanorod {

using Vec3c = Eigen::Vector3cd;

using AxialVector = std::function<Vec3c(double)>;
using AxialMatrix = std::function<Mat3c(double)>;

struct AxialDensity {
  std::vector<double> grid;
  std::vector<Vec3c> G;
  std::vector<Mat3c> R;
};

// Densities of the scattered-field formula at z_y = (y1, 0, 0).
Vec3c density_G(const LameMaterial& mat, cplx lambda1, const BackgroundField& f, double y1);
Mat3c density_R(const LameMaterial& mat, cplx lambda1, const BackgroundField& f, double y1);
// n >= 2 uniform samples including both endpoints
AxialDensity sample_density(const LameMaterial& mat, cplx lambda1, const BackgroundField& f, const RodGeometry& rod,
                            int n);

// Line operators over the axis [-L/2, L/2]. Throw SingularEvaluationError on the closed axis segment.
Vec3c lineop_A1(const RodGeometry& rod, const LameMaterial& mat, const AxialVector& phi, const Vec3& x,
                const AdaptiveOptions& opt = {});
Vec3c lineop_A2(const RodGeometry& rod, const LameMaterial& mat, const AxialMatrix& N, const Vec3& x,
                const AdaptiveOptions& opt = {});
// (grad)_{ij} = d_j of component i, from analytic kernel derivatives
Mat3c lineop_A1_grad(const RodGeometry& rod, const LameMaterial& mat, const AxialVector& phi, const Vec3& x,
                     const AdaptiveOptions& opt = {});

// Fourth-order central differences of a vector field, (grad)_{ij} = d_j u_i.
Mat3c fd_gradient(const std::function<Vec3c(const Vec3&)>& u, const Vec3& x, double h);

// Leading-order scattered field u - H outside D.
Vec3c scattered_field(const RodGeometry& rod, const LameMaterial& mat, const Contrast& k, double omega,
                      const BackgroundField& H0, const BackgroundField& H1, const Vec3& x);

struct SingularityFit {
  std::vector<double> rho;
  std::vector<Eigen::Vector3d> values;
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double r2 = 1;      // smallest over components that vary across the window
  bool poor = false;  // r2 < 0.999
};

// 12 log-spaced radii in [1e-4, 1e-2] * (L/2 - |x0|)
std::vector<double> probe_window(const RodGeometry& rod, double x0);

// Real parts of A1[phi] at (x0, rho cos t, rho sin t) fitted to a + b ln(rho).
SingularityFit probe_A1(const RodGeometry& rod, const LameMaterial& mat, const AxialVector& phi, double x0,
                        const std::vector<double>& rho, double theta);
// Real parts of A2[N] fitted to a + b / rho.
SingularityFit probe_A2(const RodGeometry& rod, const LameMaterial& mat, const AxialMatrix& N, double x0,
                        const std::vector<double>& rho, double theta);

// The 1/rho direction vector A(theta) of A2 for a constant density R.
Eigen::Vector3d a2_direction(const LameMaterial& mat, const Mat3& R, double theta);

}  // namespace nanorod
