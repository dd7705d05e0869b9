#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <thread>
#include <vector>

#include "nanorod/geometry.hpp"
#include "nanorod/kernels.hpp"
#include "nanorod/quadrature.hpp"

namespace nanorod {

// Local polynomial interpolation of nodal densities inside each cell:
// lateral cells use the 4 Gauss nodes of their axial panel, cap cells all polar
// nodes; both use a 5-point periodic stencil in theta.
class SurfaceInterpolator {
 public:
  static constexpr int kThetaStencil = 5;

  explicit SurfaceInterpolator(const SurfaceMesh& mesh);
  int stencil_size(int cell) const;
  // writes node indices of the stencil of `cell`
  void stencil(int cell, int* nodes) const;
  void basis(int cell, double u, double v, double* out) const;

 private:
  const SurfaceMesh* mesh_;
};

struct NearFieldOptions {
  double eta = 3.0;      // cell is near when dist < eta * size
  double eta_sub = 2.0;  // quadtree leaf criterion
  double eta_far = 20.0;  // beyond eta_far * size the nodal rule is used
  int q_leaf = 4;
  int q_mid = 2;
  int q_duffy = 24;
  int max_depth = 16;
};

double cell_size(const SurfaceMesh& mesh, const Cell& c);

int thread_count(int requested);

template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i, 0);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      for (int i = t; i < n; i += threads) f(i, t);
    });
  for (auto& th : pool) th.join();
}

template <class T>
using RowBlock = Eigen::Matrix<T, 3, Eigen::Dynamic>;

namespace detail {

const GaussRule& cached_rule(int q);

// Accumulates int_cell K(y) phi(y) dA into per-stencil 3x3 blocks.
template <class T, class K>
class CellIntegrator {
 public:
  CellIntegrator(const SurfaceMesh& m, const SurfaceInterpolator& interp, const NearFieldOptions& opt)
      : m_(m), interp_(interp), opt_(opt) {}

  void begin(int cell) {
    cell_ = cell;
    ns_ = interp_.stencil_size(cell);
    nodes_.resize(ns_);
    interp_.stencil(cell, nodes_.data());
    acc_.assign(ns_, Mat3T<T>::Zero());
    basis_.resize(ns_);
  }

  void add_point(const K& k, double u, double v, double w) {
    const Cell& c = m_.cells[cell_];
    const PatchPoint pp = patch_map(m_.rod, c.patch, u, v);
    const Mat3T<T> kv = k(pp.x, pp.normal) * (w * pp.jacobian);
    interp_.basis(cell_, u, v, basis_.data());
    for (int s = 0; s < ns_; ++s)
      if (basis_[s] != 0.0) acc_[s] += kv * basis_[s];
  }

  void box_rule(const K& k, double u0, double u1, double v0, double v1) { box_rule(k, u0, u1, v0, v1, opt_.q_leaf); }

  void box_rule(const K& k, double u0, double u1, double v0, double v1, int q) {
    const GaussRule& g = cached_rule(q);
    const double cu = 0.5 * (u0 + u1), hu = 0.5 * (u1 - u0), cv = 0.5 * (v0 + v1), hv = 0.5 * (v1 - v0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        add_point(k, cu + hu * g.x[a], cv + hv * g.x[b], g.w[a] * g.w[b] * hu * hv);
  }

  void quadtree(const K& k, const Vec3& x, double u0, double u1, double v0, double v1, int depth) {
    if (u1 <= u0 || v1 <= v0) return;
    const Cell& c = m_.cells[cell_];
    const double cu = 0.5 * (u0 + u1), cv = 0.5 * (v0 + v1);
    double su, sv;
    box_extent(c.patch, u0, u1, v0, v1, su, sv);
    const double s = std::hypot(su, sv);
    const double dist = (x - patch_map(m_.rod, c.patch, cu, cv).x).norm();
    if (dist > opt_.eta_sub * s || depth >= opt_.max_depth) {
      box_rule(k, u0, u1, v0, v1);
      return;
    }
    const bool split_u = su >= 0.5 * sv, split_v = sv >= 0.5 * su;
    if (split_u && split_v) {
      quadtree(k, x, u0, cu, v0, cv, depth + 1);
      quadtree(k, x, cu, u1, v0, cv, depth + 1);
      quadtree(k, x, u0, cu, cv, v1, depth + 1);
      quadtree(k, x, cu, u1, cv, v1, depth + 1);
    } else if (split_u) {
      quadtree(k, x, u0, cu, v0, v1, depth + 1);
      quadtree(k, x, cu, u1, v0, v1, depth + 1);
    } else {
      quadtree(k, x, u0, u1, v0, cv, depth + 1);
      quadtree(k, x, u0, u1, cv, v1, depth + 1);
    }
  }

  // target sits at parameter point (ui, vi) inside the cell
  void self_cell(const K& k, const Vec3& x, double ui, double vi) {
    const Cell& c = m_.cells[cell_];
    const double a = std::min(ui - c.u0, c.u1 - ui), b = std::min(vi - c.v0, c.v1 - vi);
    const double cu[4] = {ui - a, ui + a, ui + a, ui - a}, cv[4] = {vi - b, vi - b, vi + b, vi + b};
    const GaussRule& g = cached_rule(opt_.q_duffy);
    for (int t = 0; t < 4; ++t) {
      const int t1 = (t + 1) % 4;
      const double e1u = cu[t] - ui, e1v = cv[t] - vi, e2u = cu[t1] - cu[t], e2v = cv[t1] - cv[t];
      const double det = std::abs(e1u * e2v - e1v * e2u);
      for (int i = 0; i < opt_.q_duffy; ++i) {
        const double s = 0.5 * (1.0 + g.x[i]), ws = 0.5 * g.w[i];
        for (int j = 0; j < opt_.q_duffy; ++j) {
          const double tt = 0.5 * (1.0 + g.x[j]), wt = 0.5 * g.w[j];
          const double du = s * (e1u + tt * e2u), dv = s * (e1v + tt * e2v);
          const double w = 0.5 * ws * wt * s * det;
          add_point(k, ui + du, vi + dv, w);
          add_point(k, ui - du, vi - dv, w);
        }
      }
    }
    quadtree(k, x, c.u0, ui - a, c.v0, c.v1, 0);
    quadtree(k, x, ui + a, c.u1, c.v0, c.v1, 0);
    quadtree(k, x, ui - a, ui + a, vi + b, c.v1, 0);
    quadtree(k, x, ui - a, ui + a, c.v0, vi - b, 0);
  }

  template <class Row>
  void flush(Row& row) const {
    for (int s = 0; s < ns_; ++s) row.template block<3, 3>(0, 3 * nodes_[s]) += acc_[s];
  }

 private:
  void box_extent(Patch p, double u0, double u1, double v0, double v1, double& su, double& sv) const {
    const double d = m_.rod.delta;
    if (p == Patch::Lateral) {
      su = u1 - u0;
      sv = d * (v1 - v0);
    } else {
      su = d * (u1 - u0);
      sv = d * std::sin(std::min(u1, 0.5 * kPi)) * (v1 - v0);
    }
  }

  const SurfaceMesh& m_;
  const SurfaceInterpolator& interp_;
  const NearFieldOptions& opt_;
  int cell_ = 0, ns_ = 0;
  std::vector<int> nodes_;
  std::vector<Mat3T<T>> acc_;
  std::vector<double> basis_;
};

}  // namespace detail

// One 3 x 3N row block of a surface integral operator at target x.
// KernelFactory(x) returns a callable k(y, nu_y) -> Mat3T<T>.
// self_node >= 0 marks x as that mesh node (singular cell treatment).
template <class T, class K>
void integrate_row(const SurfaceMesh& m, const SurfaceInterpolator& interp, const K& k, const Vec3& x,
                   int self_node, const NearFieldOptions& opt, RowBlock<T>& row,
                   const std::vector<double>& sizes) {
  row.setZero(3, 3 * m.size());
  detail::CellIntegrator<T, K> ci(m, interp, opt);
  for (int j = 0; j < m.size(); ++j) {
    const SurfacePoint& y = m.nodes[j];
    if (j == self_node) {
      ci.begin(j);
      ci.self_cell(k, x, y.u, y.v);
      ci.flush(row);
      continue;
    }
    const double dist = (x - y.position).norm();
    if (dist < opt.eta * sizes[j]) {
      const Cell& c = m.cells[j];
      ci.begin(j);
      ci.quadtree(k, x, c.u0, c.u1, c.v0, c.v1, 0);
      ci.flush(row);
    } else if (dist < opt.eta_far * sizes[j]) {
      const Cell& c = m.cells[j];
      ci.begin(j);
      ci.box_rule(k, c.u0, c.u1, c.v0, c.v1, opt.q_mid);
      ci.flush(row);
    } else {
      row.template block<3, 3>(0, 3 * j) += k(y.position, y.normal) * m.weights[j];
    }
  }
}

std::vector<double> cell_sizes(const SurfaceMesh& m);

}  // namespace nanorod
