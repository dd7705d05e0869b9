#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nanorod/asymptotics.hpp"

namespace nanorod {

class ShellSpecError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DegenerateFitError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

const char* case_name(ResonanceKind k);

// lambda1 at the resonance limit of each case
cplx case_lambda1(ResonanceKind k, const LameMaterial& mat);
// resonant real part of c; Case 4 has none and throws
double case_c0(ResonanceKind k, const LameMaterial& mat);

struct CaseDensities {
  Vec3c G = Vec3c::Zero();
  Mat3c R = Mat3c::Zero();
  Vec3c C_P = Vec3c::Zero(), C_Q = Vec3c::Zero();  // Case 4 only
};

// Coefficient densities of the singular part at z_y = (y1, 0, 0). The endpoint brackets need the rod.
CaseDensities case_densities(ResonanceKind k, const LameMaterial& mat, cplx lambda1, const BackgroundField& f,
                             double y1, const RodGeometry* rod = nullptr);

// Leading singular field B0 of the case, at the case's resonance limit.
Vec3c singular_field(ResonanceKind k, const RodGeometry& rod, const LameMaterial& mat, const BackgroundField& f,
                     const Vec3& x);
// (grad)_{ij} = d_j B0_i. Kelvin and A1 parts are analytic, the A2 part uses fourth-order differences.
Mat3c singular_field_grad(ResonanceKind k, const RodGeometry& rod, const LameMaterial& mat,
                          const BackgroundField& f, const Vec3& x);

// sup over the axis of |G|, |R e2|, |R e3| and, for Case 4, |C_P|, |C_Q|
double case_density_sup(ResonanceKind k, const LameMaterial& mat, const BackgroundField& f, const RodGeometry& rod);

// Exact singular scalar at contrast c: l2, 2 lambda (lambda+2mu) / (2(lambda+2mu) lambda1 + lambda), 1/lambda1,
// (lambda1 - 1/2)^{-1}.
cplx singular_scalar(ResonanceKind k, const LameMaterial& mat, cplx c);
// Energy prefactor of the asymptotic equivalence at c = c0 + i varrho.
double energy_prefactor(ResonanceKind k, const LameMaterial& mat, double c0, double varrho, double delta);

// a1 = 2i(lambda+2mu)/(lambda+3mu)^2
cplx case1_a1(const LameMaterial& mat);
// -8 pi mu^2 [l1 (lambda+2mu) + (l1 (lambda+mu) - 1)/(2 lambda1 - 1)]
double case1_bracket(const LameMaterial& mat, double lambda1);

struct FieldFn {
  std::function<Vec3c(const Vec3&)> value;
  std::function<Mat3c(const Vec3&)> gradient;  // optional
};

FieldFn singular_fieldfn(ResonanceKind k, const RodGeometry& rod, const LameMaterial& mat, const BackgroundField& f);

// Shell {r_in <= dist <= r_out}; dist is the distance to D, or to the axis segment when from_axis is set.
struct ShellSpec {
  double r_in = 0.2, r_out = 5.0;
  bool from_axis = false;
  int level = 1;
  int threads = 0;
};

struct EnergyResult {
  double energy = 0;
  double tail_bound = 0;
  long points = 0;
};

EnergyResult energy(const LameMaterial& mat, const RodGeometry& rod, const FieldFn& u, const ShellSpec& shell);

enum class ScanParam { C0, Varrho, Delta };
const char* scan_param_name(ScanParam p);
ScanParam parse_scan_param(const std::string& s);

struct ScanSpec {
  ScanParam param = ScanParam::Varrho;
  std::vector<double> values;
  // parameters held fixed; c0 defaults to the case's resonant value when NaN
  double c0 = std::numeric_limits<double>::quiet_NaN();
  double varrho = 1e-3;
  ShellSpec shell{0.5, 5.0, true, 1, 0};
};

struct ScanRow {
  double param, energy, tail_bound, cond_estimate;
};

struct SlopeFit {
  double slope = 0, intercept = 0, r2 = 0;
  double window_lo = 0, window_hi = 0;
  int points = 0;
  bool admissible = false;  // >= 5 points over >= 2 decades
};

struct ScanTable {
  ResonanceKind kind;
  ScanParam param;
  std::vector<ScanRow> rows;
  SlopeFit fit;
  double base_energy = 0;  // E(B0) on the shell
  double density_sup = 0;
  bool detected = false;  // case densities not identically zero
};

// log-log least squares over positive data
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

ScanTable blowup_scan(ResonanceKind k, const LameMaterial& mat, const RodGeometry& rod, const BackgroundField& f,
                      const ScanSpec& spec);

struct ConcentrationProfile {
  std::vector<double> t, magnitude;
  double mid = 0, endpoint_max = 0;
  double ratio = 0;  // +inf when the mid-rod value vanishes
};

ConcentrationProfile concentration_profile(const FieldFn& u, const RodGeometry& rod, double offset,
                                           double kappa = 2.0);

}  // namespace nanorod
