#include "nanorod/surface_quadrature.hpp"

#include <map>
#include <mutex>

namespace nanorod {

SurfaceInterpolator::SurfaceInterpolator(const SurfaceMesh& mesh) : mesh_(&mesh) {}

int SurfaceInterpolator::stencil_size(int cell) const {
  const int per_theta = cell < mesh_->n_lateral() ? kPanelOrder : mesh_->res.n_cap;
  return per_theta * kThetaStencil;
}

void SurfaceInterpolator::stencil(int cell, int* nodes) const {
  const SurfaceMesh& m = *mesh_;
  const int nt = m.res.n_theta;
  if (cell < m.n_lateral()) {
    const int ia = cell / nt, it = cell % nt, p0 = (ia / kPanelOrder) * kPanelOrder;
    for (int a = 0; a < kPanelOrder; ++a)
      for (int t = 0; t < kThetaStencil; ++t)
        nodes[a * kThetaStencil + t] = m.lateral_index(p0 + a, ((it + t - 2) % nt + nt) % nt);
    return;
  }
  const int local = cell - m.n_lateral(), side = local / m.n_cap_nodes(), it = local % nt;
  for (int a = 0; a < m.res.n_cap; ++a)
    for (int t = 0; t < kThetaStencil; ++t)
      nodes[a * kThetaStencil + t] = m.cap_index(side, a, ((it + t - 2) % nt + nt) % nt);
}

void SurfaceInterpolator::basis(int cell, double u, double v, double* out) const {
  const SurfaceMesh& m = *mesh_;
  const int nt = m.res.n_theta;
  double bu[64], bv[kThetaStencil];
  int nu;
  int it;
  if (cell < m.n_lateral()) {
    const int ia = cell / nt, p0 = (ia / kPanelOrder) * kPanelOrder;
    it = cell % nt;
    nu = kPanelOrder;
    lagrange_basis(m.axial_nodes.data() + p0, nu, u, bu);
  } else {
    it = (cell - m.n_lateral()) % nt;
    nu = m.res.n_cap;
    lagrange_basis(m.cap_nodes.data(), nu, u, bu);
  }
  static const double off[kThetaStencil] = {-2, -1, 0, 1, 2};
  const double s = (v - (it + 0.5) * m.h_theta) / m.h_theta;
  lagrange_basis(off, kThetaStencil, s, bv);
  for (int a = 0; a < nu; ++a)
    for (int t = 0; t < kThetaStencil; ++t) out[a * kThetaStencil + t] = bu[a] * bv[t];
}

double cell_size(const SurfaceMesh& mesh, const Cell& c) {
  const double d = mesh.rod.delta;
  double su, sv;
  if (c.patch == Patch::Lateral) {
    su = c.u1 - c.u0;
    sv = d * (c.v1 - c.v0);
  } else {
    su = d * (c.u1 - c.u0);
    sv = d * std::sin(std::min(c.u1, 0.5 * kPi)) * (c.v1 - c.v0);
  }
  return std::hypot(su, sv);
}

std::vector<double> cell_sizes(const SurfaceMesh& m) {
  std::vector<double> s(m.size());
  for (int j = 0; j < m.size(); ++j) s[j] = cell_size(m, m.cells[j]);
  return s;
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

namespace detail {

const GaussRule& cached_rule(int q) {
  static std::mutex mu;
  static std::map<int, GaussRule> rules;
  std::lock_guard<std::mutex> lock(mu);
  auto it = rules.find(q);
  if (it == rules.end()) it = rules.emplace(q, gauss_legendre(q)).first;
  return it->second;
}

}  // namespace detail

}  // namespace nanorod
