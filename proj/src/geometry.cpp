#include "nanorod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nanorod/material.hpp"
#include "nanorod/quadrature.hpp"

namespace nanorod {

RodGeometry build_rod(double L, double delta) {
  if (!(L > 0.0)) throw GeometryError("rod length must be positive");
  if (!(delta > 0.0)) throw GeometryError("rod radius must be positive");
  if (delta >= 0.5 * L) throw GeometryError("aspect violation: delta >= L/2, thin-rod asymptotics invalid");
  RodGeometry r;
  r.L = L;
  r.delta = delta;
  r.P = Vec3(-0.5 * L, 0, 0);
  r.Q = Vec3(0.5 * L, 0, 0);
  r.regime_warning = delta / L > 0.25;
  return r;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::LateralLower: return "lateral_lower";
    case Region::LateralUpper: return "lateral_upper";
    case Region::CapLeft: return "cap_left";
    case Region::CapRight: return "cap_right";
  }
  return "?";
}

PatchPoint patch_map(const RodGeometry& rod, Patch patch, double u, double v) {
  const double d = rod.delta, cv = std::cos(v), sv = std::sin(v);
  PatchPoint p;
  if (patch == Patch::Lateral) {
    p.x = Vec3(u, d * cv, d * sv);
    p.normal = Vec3(0, cv, sv);
    p.jacobian = d;
    return p;
  }
  const double su = std::sin(u), cu = std::cos(u);
  const double s = patch == Patch::CapLeft ? -1.0 : 1.0;
  p.normal = Vec3(s * cu, su * cv, su * sv);
  p.x = (patch == Patch::CapLeft ? rod.P : rod.Q) + d * p.normal;
  p.jacobian = d * d * su;
  return p;
}

namespace {

std::vector<double> cumulative_breaks(double a, const std::vector<double>& w) {
  std::vector<double> b{a};
  for (double wi : w) b.push_back(b.back() + wi);
  return b;
}

}  // namespace

double SurfaceMesh::total_weight() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

SurfaceMesh mesh_surface(const RodGeometry& rod, int n_axial, int n_theta, int n_cap) {
  if (n_axial < 4 || n_theta < 8 || n_theta % 2 != 0 || n_cap < 2)
    throw GeometryError("mesh resolution below minimum: need n_axial >= 4, even n_theta >= 8, n_cap >= 2");
  if (n_axial % kPanelOrder != 0) throw GeometryError("n_axial must be a multiple of the panel order 4");
  SurfaceMesh m;
  m.rod = rod;
  m.res = {n_axial, n_theta, n_cap};
  const double a = -0.5 * rod.L, b = 0.5 * rod.L;
  const int n_panels = n_axial / kPanelOrder;

  m.panel_breaks.clear();
  if (n_axial >= 32) {
    const int base = n_panels - 4;
    const double h = rod.L / base;
    m.panel_breaks = {a, a + 0.25 * h, a + 0.5 * h};
    for (int i = 1; i < base; ++i) m.panel_breaks.push_back(a + i * h);
    m.panel_breaks.push_back(b - 0.5 * h);
    m.panel_breaks.push_back(b - 0.25 * h);
    m.panel_breaks.push_back(b);
  } else {
    for (int i = 0; i <= n_panels; ++i) m.panel_breaks.push_back(a + rod.L * i / n_panels);
  }

  for (int p = 0; p + 1 < static_cast<int>(m.panel_breaks.size()); ++p) {
    const GaussRule g = gauss_legendre(kPanelOrder, m.panel_breaks[p], m.panel_breaks[p + 1]);
    for (int k = 0; k < kPanelOrder; ++k) {
      m.axial_nodes.push_back(g.x[k]);
      m.axial_weights.push_back(g.w[k]);
    }
  }
  m.axial_cell_breaks = cumulative_breaks(a, m.axial_weights);
  m.axial_cell_breaks.back() = b;

  const GaussRule gc = gauss_legendre(n_cap, 0.0, 0.5 * kPi);
  m.cap_nodes = gc.x;
  m.cap_weights = gc.w;
  m.cap_cell_breaks = cumulative_breaks(0.0, gc.w);
  m.cap_cell_breaks.back() = 0.5 * kPi;

  m.h_theta = 2.0 * kPi / n_theta;
  const double ht = m.h_theta;

  for (int ia = 0; ia < n_axial; ++ia) {
    for (int it = 0; it < n_theta; ++it) {
      const double th = (it + 0.5) * ht;
      const PatchPoint pp = patch_map(rod, Patch::Lateral, m.axial_nodes[ia], th);
      m.nodes.push_back({pp.x, pp.normal, th < kPi ? Region::LateralUpper : Region::LateralLower,
                         m.axial_nodes[ia], th});
      m.weights.push_back(m.axial_weights[ia] * pp.jacobian * ht);
      m.cells.push_back({Patch::Lateral, m.axial_cell_breaks[ia], m.axial_cell_breaks[ia + 1], th - 0.5 * ht,
                         th + 0.5 * ht, ia / kPanelOrder});
    }
  }
  for (int side = 0; side < 2; ++side) {
    const Patch patch = side == 0 ? Patch::CapLeft : Patch::CapRight;
    for (int ip = 0; ip < n_cap; ++ip) {
      for (int it = 0; it < n_theta; ++it) {
        const double th = (it + 0.5) * ht;
        const PatchPoint pp = patch_map(rod, patch, m.cap_nodes[ip], th);
        m.nodes.push_back({pp.x, pp.normal, side == 0 ? Region::CapLeft : Region::CapRight, m.cap_nodes[ip], th});
        m.weights.push_back(m.cap_weights[ip] * pp.jacobian * ht);
        m.cells.push_back({patch, m.cap_cell_breaks[ip], m.cap_cell_breaks[ip + 1], th - 0.5 * ht, th + 0.5 * ht, -1});
      }
    }
  }
  return m;
}

AxisProjection project_axis(const RodGeometry& rod, const Vec3& x) {
  const double h = 0.5 * rod.L;
  AxisProjection p;
  p.z = Vec3(std::clamp(x(0), -h, h), 0, 0);
  p.cap = std::abs(x(0)) > h;
  return p;
}

double axis_distance(const RodGeometry& rod, const Vec3& x) { return (x - project_axis(rod, x).z).norm(); }

RegionMasks region_masks(const RodGeometry& rod, const SurfaceMesh& mesh, double kappa) {
  RegionMasks r;
  r.near_P.assign(mesh.size(), false);
  r.near_Q.assign(mesh.size(), false);
  for (int i = 0; i < mesh.size(); ++i) {
    const SurfacePoint& n = mesh.nodes[i];
    if (!is_lateral(n.region)) continue;
    const Vec3 z = project_axis(rod, n.position).z;
    r.near_P[i] = (z - rod.P).norm() <= kappa * rod.delta;
    r.near_Q[i] = (z - rod.Q).norm() <= kappa * rod.delta;
  }
  return r;
}

std::string mesh_csv(const SurfaceMesh& mesh) {
  std::ostringstream os;
  os << "x1,x2,x3,nx,ny,nz,weight,region\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (int i = 0; i < mesh.size(); ++i) {
    const SurfacePoint& n = mesh.nodes[i];
    for (int k = 0; k < 3; ++k) put(n.position(k)), os << ',';
    for (int k = 0; k < 3; ++k) put(n.normal(k)), os << ',';
    put(mesh.weights[i]);
    os << ',' << region_name(n.region) << '\n';
  }
  return os.str();
}

}  // namespace nanorod
