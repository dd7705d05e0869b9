#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace nanorod {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

class ConvexityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateContrastError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ResonantDenominatorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct LameMaterial {
  double lambda = 1.0;
  double mu = 1.0;
};

LameMaterial make_material(double lambda, double mu);

struct Contrast {
  cplx c;
  double c0 = 0.0;
  double varrho = 0.0;
  cplx lambda1;
};

Contrast contrast(cplx c);

// Inverse of the lambda1 map: c = (2 lambda1 + 1) / (2 lambda1 - 1).
cplx contrast_from_lambda1(cplx lambda1);

struct DerivedConstants {
  double c_s = 0, c_p = 0;
  double k_s = 0, k_p = 0;
  double alpha1 = 0, alpha2 = 0;
  cplx alpha3;
  double alpha4 = 0, alpha5 = 0;
  cplx l1, l2, l01, l02;
  // smallest |denominator| among l1, l2, l01/l02, and whether it is in the
  // near-resonant band (1e-13, 1e-6]
  double min_denominator = 0;
  bool near_resonant = false;
};

constexpr double kExactResonance = 1e-13;
constexpr double kNearResonance = 1e-6;

// alpha constants only; never throws for admissible materials
double alpha1(const LameMaterial& m);
double alpha2(const LameMaterial& m);
cplx alpha3(const LameMaterial& m);
double alpha4(const LameMaterial& m);
double alpha5(const LameMaterial& m);

DerivedConstants derived_constants(const LameMaterial& m, cplx lambda1, double omega);

enum class ResonanceKind { Case1, Case2, Case3, Case4 };

struct ContrastDescriptor {
  ResonanceKind kind;
  bool symbolic_infinity = false;
  double c0 = 0.0;  // meaningless when symbolic_infinity
  std::string label() const;
};

std::array<ContrastDescriptor, 4> resonance_values(const LameMaterial& m);

}  // namespace nanorod
