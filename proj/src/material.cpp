#include "nanorod/material.hpp"

#include <algorithm>
#include <cmath>

namespace nanorod {

LameMaterial make_material(double lambda, double mu) {
  if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
    throw ConvexityError("strong convexity violated: need mu > 0 and 3*lambda + 2*mu > 0");
  return {lambda, mu};
}

Contrast contrast(cplx c) {
  if (c == cplx(1.0, 0.0)) throw DegenerateContrastError("contrast c = 1 describes no inclusion");
  Contrast k;
  k.c = c;
  k.c0 = c.real();
  k.varrho = c.imag();
  k.lambda1 = (c + 1.0) / (2.0 * (c - 1.0));
  return k;
}

cplx contrast_from_lambda1(cplx lambda1) { return (2.0 * lambda1 + 1.0) / (2.0 * lambda1 - 1.0); }

double alpha1(const LameMaterial& m) {
  return -(1.0 / (8.0 * kPi)) * (1.0 / m.mu + 1.0 / (m.lambda + 2.0 * m.mu));
}

double alpha2(const LameMaterial& m) {
  return -(1.0 / (8.0 * kPi)) * (1.0 / m.mu - 1.0 / (m.lambda + 2.0 * m.mu));
}

cplx alpha3(const LameMaterial& m) {
  const double lp = m.lambda + 2.0 * m.mu;
  return cplx(0.0, -1.0 / (12.0 * kPi)) * (2.0 / std::pow(m.mu, 1.5) + 1.0 / std::pow(lp, 1.5));
}

double alpha4(const LameMaterial& m) {
  const double lp = m.lambda + 2.0 * m.mu;
  return (1.0 / (32.0 * kPi)) * (3.0 / (m.mu * m.mu) + 1.0 / (lp * lp));
}

double alpha5(const LameMaterial& m) {
  const double lp = m.lambda + 2.0 * m.mu;
  return -(1.0 / (32.0 * kPi)) * (1.0 / (m.mu * m.mu) - 1.0 / (lp * lp));
}

DerivedConstants derived_constants(const LameMaterial& m, cplx lambda1, double omega) {
  DerivedConstants d;
  const double lam = m.lambda, mu = m.mu, lp = lam + 2.0 * mu;
  d.c_s = std::sqrt(mu);
  d.c_p = std::sqrt(lp);
  d.k_s = omega / d.c_s;
  d.k_p = omega / d.c_p;
  d.alpha1 = alpha1(m);
  d.alpha2 = alpha2(m);
  d.alpha3 = alpha3(m);
  d.alpha4 = alpha4(m);
  d.alpha5 = alpha5(m);

  const cplx den1 = 2.0 * lambda1 * lp - mu;
  const cplx den2 = 2.0 * lambda1 * lp + mu;
  const cplx den0 = 2.0 * lp * lambda1 + lam;
  d.min_denominator = std::min({std::abs(den1), std::abs(den2), std::abs(den0)});
  if (d.min_denominator < kExactResonance)
    throw ResonantDenominatorError("exact resonance: a denominator of l1, l2, l01, l02 vanishes; "
                                   "use the resonance decomposition");
  d.near_resonant = d.min_denominator <= kNearResonance;
  d.l1 = 1.0 / den1;
  d.l2 = 1.0 / den2;
  d.l01 = 2.0 * lam * lp / den0;
  d.l02 = -2.0 * mu * (lam - mu) * lp / (den2 * den0);
  return d;
}

std::string ContrastDescriptor::label() const {
  switch (kind) {
    case ResonanceKind::Case1: return "case1";
    case ResonanceKind::Case2: return "case2";
    case ResonanceKind::Case3: return "case3";
    case ResonanceKind::Case4: return "case4";
  }
  return "unknown";
}

std::array<ContrastDescriptor, 4> resonance_values(const LameMaterial& m) {
  const double lam = m.lambda, mu = m.mu;
  return {ContrastDescriptor{ResonanceKind::Case1, false, -(lam + mu) / (lam + 3.0 * mu)},
          ContrastDescriptor{ResonanceKind::Case2, false, -mu / (lam + mu)},
          ContrastDescriptor{ResonanceKind::Case3, false, -1.0},
          ContrastDescriptor{ResonanceKind::Case4, true, 0.0}};
}

}  // namespace nanorod
