#pragma once

#include <cstdint>
#include <vector>

#include "nanorod/asymptotics.hpp"
#include "nanorod/io.hpp"
#include "nanorod/potentials.hpp"
#include "nanorod/resonance.hpp"

namespace nanorod {

// Points with uniformly distributed direction and |r| uniform in [r_min, r_max].
std::vector<Vec3> random_points(int n, double r_min, double r_max, std::uint64_t seed);

// Residual of mu Lap u + (lambda+mu) grad div u + omega^2 u on the kernel columns at r, from
// Richardson-extrapolated central differences of kernel values with step h_rel |r|. Relative to
// the column-wise sum of the magnitudes of the three terms; omega = 0 selects the Kelvin matrix.
double kernel_lame_residual(const LameMaterial& mat, double omega, const Vec3& r, double h_rel = 1e-2);

struct JumpReport {
  double rel_l2 = 0;
  int nodes = 0;
};

// phi recovered as the difference of exterior and interior conormal derivatives of S_D[phi],
// evaluated at x +- h nu with h in {2 h0, h0}, h0 = h_rel delta, then extrapolated in h.
// Only lateral nodes with |x1| <= L/2 - band delta are used, every `stride`-th axial station.
JumpReport jump_reconstruction(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi, double band,
                               int stride, double h_rel = 0.02);

struct ExpansionReport {
  std::vector<double> omega, res_s, res_k;
  SlopeFit fit_s, fit_k;
};

// ||(S^w - S - w S1 - w^2 S2) phi|| and ||(K*(w) - K* - w^2 K2) phi|| summed over the densities.
// The remainders are integrated as single kernels on the shared quadrature of the mesh.
ExpansionReport omega_expansion(const LameMaterial& mat, const SurfaceContext& ctx, const std::vector<double>& omegas,
                                const std::vector<VecX>& densities);

struct HStarRatio {
  double discrete = 0, predicted = 0, ratio = 0;
};

// Discrete ||e1||^2 in H* against 8 pi^2 delta^2 |ln delta| (-(alpha1 + alpha2)) L.
HStarRatio hstar_e1_ratio(const LameMaterial& mat, const SurfaceContext& ctx);

struct OracleComparison {
  std::vector<CompareRow> rows;
  double rel_l2 = 0;
  double cond_estimate = 0;
  int unknowns = 0;
};

// Nystrom exterior field S_D[psi] against the asymptotic scattered field on the ring
// {x1 = 0, |x'| = ring_factor delta}.
OracleComparison compare_oracle(const LameMaterial& mat, cplx c, double omega, const BackgroundField& H0,
                                const BackgroundField& H1, const RodGeometry& rod, const MeshResolution& res,
                                double ring_factor, int ring_points, int threads = 0);

}  // namespace nanorod
