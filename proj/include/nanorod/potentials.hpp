#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nanorod/fields.hpp"
#include "nanorod/geometry.hpp"
#include "nanorod/kernels.hpp"
#include "nanorod/material.hpp"
#include "nanorod/surface_quadrature.hpp"

namespace nanorod {

using VecX = Eigen::VectorXd;
using VecXc = Eigen::VectorXcd;
using MatX = Eigen::MatrixXd;
using MatXc = Eigen::MatrixXcd;

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllConditionedError : public std::runtime_error {
 public:
  IllConditionedError(const std::string& what, double cond) : std::runtime_error(what), cond(cond) {}
  double cond;
};

constexpr int kMaxUnknowns = 12000;
constexpr double kConditionGuard = 1e12;

enum class OperatorKind { SingleLayer, NPStar, SystemA };
const char* operator_kind_name(OperatorKind k);

// Mesh plus the near-field machinery shared by every operator on it.
class SurfaceContext {
 public:
  explicit SurfaceContext(SurfaceMesh mesh, NearFieldOptions opt = {}, int threads = 0);
  const SurfaceMesh& mesh() const { return mesh_; }
  const SurfaceInterpolator& interp() const { return interp_; }
  const NearFieldOptions& options() const { return opt_; }
  const std::vector<double>& sizes() const { return sizes_; }
  int threads() const { return threads_; }
  int unknowns() const { return 3 * mesh_.size(); }

 private:
  SurfaceMesh mesh_;
  SurfaceInterpolator interp_;
  NearFieldOptions opt_;
  std::vector<double> sizes_;
  int threads_;
};

// Dense Nystrom matrices. Complex frequency allowed for the interior wavenumber.
MatX assemble_single_layer(const LameMaterial& mat, const SurfaceContext& ctx);
MatXc assemble_single_layer(const LameMaterial& mat, cplx omega, const SurfaceContext& ctx);
MatX assemble_np_star(const LameMaterial& mat, const SurfaceContext& ctx);
MatXc assemble_np_star(const LameMaterial& mat, cplx omega, const SurfaceContext& ctx);
// S_{D,2} (kernel Gamma2) and K_{D,2} (conormal derivative of Gamma2)
MatX assemble_gamma2_single(const LameMaterial& mat, const SurfaceContext& ctx);
MatX assemble_gamma2_np(const LameMaterial& mat, const SurfaceContext& ctx);

// Matrix-free applications with the same quadrature as the assembled matrices.
VecX apply_single_layer(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi);
VecX apply_np_star(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi);

// S_{D,1}[phi] = alpha3 * int phi, the same vector at every node
VecXc apply_s1(const LameMaterial& mat, const SurfaceMesh& mesh, const VecXc& phi);

// Off-surface evaluations.
Vec3 single_layer(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi, const Vec3& x);
Eigen::Vector3cd single_layer(const LameMaterial& mat, double omega, const SurfaceContext& ctx,
                              const VecXc& phi, const Vec3& x);
// conormal derivative of S_D[phi] at an off-surface point with direction nu
Vec3 single_layer_traction(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi, const Vec3& x,
                           const Vec3& nu);

// Nodal samples of background fields.
VecX sample_field(const SurfaceMesh& mesh, const BackgroundField& f);
VecX sample_traction(const LameMaterial& mat, const SurfaceMesh& mesh, const BackgroundField& f);

struct TransmissionResult {
  VecXc phi;  // interior density (empty for the reduced static solve)
  VecXc psi;
  double cond_estimate = 0;
  bool reduced = false;
};

struct SolveOptions {
  bool throw_if_ill_conditioned = true;
};

TransmissionResult solve_transmission(const LameMaterial& mat, const Contrast& k, double omega,
                                      const SurfaceContext& ctx, const BackgroundField& H0,
                                      const BackgroundField& H1, const SolveOptions& opt = {});
// Reduced static solve with a precomputed K*.
TransmissionResult solve_static_reduced(const MatX& kstar, cplx lambda1, const VecX& traction,
                                        const SolveOptions& opt = {});

VecX weights3(const SurfaceMesh& mesh);
double hstar_inner(const SurfaceMesh& mesh, const VecX& a, const VecX& s_b);
double hstar_norm(const LameMaterial& mat, const SurfaceContext& ctx, const VecX& phi);

struct SpectralReport {
  double radius = 0;  // max |eig| of K*
  double max_imag = 0;
  double min_real = 0, max_real = 0;
  // extremal eigenvalues of the H*-symmetric part of K*
  double sym_min = 0, sym_max = 0;
  double adjoint_defect = 0;  // relative Frobenius norm of the H*-antisymmetric part
};
SpectralReport hstar_spectrum(const MatX& S, const MatX& K, const SurfaceMesh& mesh);

// ||(-1/2 + K*) S^{-1} v|| / ||S^{-1} v|| in the weighted L2 norm
double rigid_annihilation_residual(const LameMaterial& mat, const SurfaceContext& ctx, const BackgroundField& v);

struct EndpointMoments {
  Eigen::Vector3cd M_P, M_Q;
};
EndpointMoments endpoint_moments(const LameMaterial& mat, cplx lambda1, const BackgroundField& H0,
                                 const BackgroundField& H1, double omega, const RodGeometry& rod);

// sum_i w_i psi_i over nodes where mask is set
Eigen::Vector3cd masked_integral(const SurfaceMesh& mesh, const VecXc& psi, const std::vector<bool>& mask);

double weighted_l2(const SurfaceMesh& mesh, const VecXc& v, const std::vector<bool>* mask = nullptr);

VecX smooth_random_density(const SurfaceMesh& mesh, unsigned long long seed);

// Binary dump: "NRDUMP1\0", int64 rows, int64 cols, int32 complex flag, 32-byte kind tag, then
// little-endian float64 data (column-major; complex as interleaved re, im).
void dump_binary(const std::string& path, const MatX& m, const std::string& kind);
void dump_binary(const std::string& path, const MatXc& m, const std::string& kind);
MatXc load_binary(const std::string& path, std::string* kind = nullptr);

}  // namespace nanorod
