#pragma once

#include "nanorod/potentials.hpp"

namespace nanorod {

// Lateral half-surface coordinates: the upper half is (x1, d cos t, d sin t) and the
// lower half (x1, -d cos t, -d sin t), both with t in (0, pi).
struct HalfCoord {
  double x1, theta;
  bool upper;
};

HalfCoord half_coord(const RodGeometry& rod, const Vec3& x);

// Kernel of D_ij (i, j in {1, 2}; 1 = lower, 2 = upper) with respect to d theta2 d y1.
Mat3 d_kernel(const LameMaterial& mat, double delta, int i, int j, double x1, double theta1, double y1, double theta2);

// f_H at a lateral point: traction of H evaluated with the axis gradient and the
// half-surface normal (0, cos t, sin t).
Vec3 f_H(const LameMaterial& mat, const BackgroundField& H, const HalfCoord& c);

struct FourierBlockResult {
  VecXc psi;  // 3 * n_lateral entries, lateral node order of the mesh
  double cond_estimate = 0;
};

// Solves the 2 x 2 block system on the lateral surface with RHS (-f_H, f_H).
// The delta-order term g_H is not included.
FourierBlockResult fourier_block_solve(const LameMaterial& mat, cplx lambda1, const BackgroundField& H,
                                       const SurfaceContext& ctx, const SolveOptions& opt = {});

}  // namespace nanorod
