#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace nanorod {

struct GaussRule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [a, b], ascending.
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Lagrange basis values at t for the given nodes.
void lagrange_basis(const double* nodes, int n, double t, double* out);

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 40;
  int max_intervals = 20000;
};

namespace detail {
extern const double kKronrodX[8];
extern const double kKronrodW[8];
extern const double kGaussW[4];

template <class T>
double value_norm(const T& v) {
  if constexpr (std::is_arithmetic_v<T>)
    return std::abs(v);
  else if constexpr (requires { v.norm(); })
    return v.norm();
  else
    return std::abs(v);
}

template <class T>
T zero_like(const T& v) {
  if constexpr (std::is_arithmetic_v<T>)
    return T(0);
  else if constexpr (requires { T::Zero(); })
    return T::Zero();
  else
    return v * 0.0;
}
}  // namespace detail

// G7K15 on one interval; returns (K15 value, |K15 - G7| error norm)
template <class T, class F>
std::pair<T, double> gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T k = fc * detail::kKronrodW[7];
  T g = fc * 0.0;
  for (int i = 0; i < 7; ++i) {
    const double dx = h * detail::kKronrodX[i];
    T f1 = f(c - dx), f2 = f(c + dx);
    k += (f1 + f2) * detail::kKronrodW[i];
    if (i % 2 == 1) g += (f1 + f2) * detail::kGaussW[i / 2];
  }
  g += fc * detail::kGaussW[3];
  k *= h;
  g *= h;
  return {k, detail::value_norm<T>(k - g)};
}

// Globally adaptive Gauss-Kronrod (G7K15) with interval bisection.
// `breaks` are optional interior points where the integrand is not smooth.
template <class T, class F>
T integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {},
                     const std::vector<double>& breaks = {}, double* err_out = nullptr) {
  struct Piece {
    double a, b;
    T val;
    double err;
    int depth;
  };
  std::vector<double> pts{a};
  for (double t : breaks)
    if (t > a && t < b) pts.push_back(t);
  pts.push_back(b);
  std::vector<Piece> pieces;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    auto [v, e] = gk15<T>(f, pts[i], pts[i + 1]);
    pieces.push_back({pts[i], pts[i + 1], v, e, 0});
  }
  auto total = [&]() {
    T s = pieces[0].val;
    for (size_t i = 1; i < pieces.size(); ++i) s += pieces[i].val;
    return s;
  };
  for (;;) {
    double err = 0;
    size_t worst = 0;
    for (size_t i = 0; i < pieces.size(); ++i) {
      err += pieces[i].err;
      if (pieces[i].err > pieces[worst].err) worst = i;
    }
    const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::value_norm<T>(total()));
    if (err <= tol || static_cast<int>(pieces.size()) >= opt.max_intervals ||
        pieces[worst].depth >= opt.max_depth) {
      if (err_out) *err_out = err;
      return total();
    }
    Piece p = pieces[worst];
    const double m = 0.5 * (p.a + p.b);
    auto [v1, e1] = gk15<T>(f, p.a, m);
    auto [v2, e2] = gk15<T>(f, m, p.b);
    pieces[worst] = {p.a, m, v1, e1, p.depth + 1};
    pieces.push_back({m, p.b, v2, e2, p.depth + 1});
  }
}

}  // namespace nanorod
