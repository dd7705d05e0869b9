#include <cmath>

#include "doctest.h"
#include "nanorod/geometry.hpp"
#include "nanorod/material.hpp"

using namespace nanorod;

namespace {
double area(double L, double d) { return 2 * kPi * d * L + 4 * kPi * d * d; }
}  // namespace

TEST_CASE("build_rod endpoints and regime") {
  const RodGeometry r = build_rod(2, 0.1);
  CHECK((r.P - Vec3(-1, 0, 0)).norm() == 0.0);
  CHECK((r.Q - Vec3(1, 0, 0)).norm() == 0.0);
  CHECK_FALSE(r.regime_warning);
  const RodGeometry w = build_rod(1, 0.49);
  CHECK(w.regime_warning);
  CHECK_THROWS_AS(build_rod(1, 0.6), GeometryError);
  CHECK_THROWS_AS(build_rod(1, 0.5), GeometryError);
  CHECK_THROWS_AS(build_rod(-1, 0.1), GeometryError);
  CHECK_THROWS_AS(build_rod(1, 0.0), GeometryError);
}

TEST_CASE("mesh area and resolution checks") {
  const RodGeometry r = build_rod(2, 0.1);
  const SurfaceMesh m = mesh_surface(r, 32, 16, 8);
  CHECK(std::abs(m.total_weight() - 1.38230) < 1e-5);
  CHECK(std::abs(m.total_weight() - area(2, 0.1)) < 1e-6);
  CHECK_THROWS_AS(mesh_surface(r, 2, 16, 8), GeometryError);
  CHECK_THROWS_AS(mesh_surface(r, 32, 7, 8), GeometryError);
  CHECK_THROWS_AS(mesh_surface(r, 32, 15, 8), GeometryError);
  CHECK_THROWS_AS(mesh_surface(r, 32, 16, 1), GeometryError);
  CHECK_THROWS_AS(mesh_surface(r, 30, 16, 8), GeometryError);
  for (double w : m.weights) CHECK(w > 0);
}

TEST_CASE("area error under refinement") {
  const RodGeometry r = build_rod(2, 0.1);
  // the lateral rule is exact in y1, so n_axial refinement stays at roundoff
  const double e32 = std::abs(mesh_surface(r, 32, 16, 8).total_weight() - area(2, 0.1));
  const double e64 = std::abs(mesh_surface(r, 64, 16, 8).total_weight() - area(2, 0.1));
  CHECK(e32 < 1e-12);
  CHECK(e64 < 1e-12);
  // caps carry the quadrature error: it falls with n_cap at order >= 2
  double prev = 1e300;
  for (int nc : {2, 3, 4}) {
    const double e = std::abs(mesh_surface(r, 32, 16, nc).total_weight() - area(2, 0.1));
    CHECK(e < prev);
    if (prev < 1e300 && e > 1e-15) CHECK(std::log(prev / e) / std::log((nc) / (nc - 1.0)) >= 2.0);
    prev = e;
  }
}

TEST_CASE("nodes lie on the surface with analytic normals") {
  const RodGeometry r = build_rod(2, 0.1);
  const SurfaceMesh m = mesh_surface(r, 32, 16, 8);
  int lateral = 0;
  for (const SurfacePoint& p : m.nodes) {
    CHECK(std::abs(p.normal.norm() - 1.0) < 1e-14);
    const Vec3& x = p.position;
    if (is_lateral(p.region)) {
      ++lateral;
      CHECK(std::abs(std::hypot(x(1), x(2)) - 0.1) < 1e-12);
      CHECK(std::abs(p.normal(0)) < 1e-15);
      CHECK((p.normal - Vec3(0, x(1), x(2)) / 0.1).norm() < 1e-12);
      CHECK(std::abs(x(0)) <= 1.0);
    } else {
      const Vec3 c = p.region == Region::CapLeft ? r.P : r.Q;
      CHECK(std::abs((x - c).norm() - 0.1) < 1e-12);
      CHECK((p.normal - (x - c) / 0.1).norm() < 1e-12);
      if (p.region == Region::CapLeft) CHECK(x(0) <= r.P(0) + 1e-15);
      if (p.region == Region::CapRight) CHECK(x(0) >= r.Q(0) - 1e-15);
    }
  }
  CHECK(lateral == m.n_lateral());
}

TEST_CASE("region tags follow the half-cylinders") {
  const SurfaceMesh m = mesh_surface(build_rod(2, 0.1), 16, 16, 4);
  for (const SurfacePoint& p : m.nodes) {
    if (p.region == Region::LateralUpper) CHECK(p.position(2) >= -1e-15);
    if (p.region == Region::LateralLower) CHECK(p.position(2) <= 1e-15);
  }
}

TEST_CASE("project_axis") {
  const RodGeometry r = build_rod(2, 0.1);
  AxisProjection a = project_axis(r, Vec3(0.3, 0.1 * std::cos(1.0), 0.1 * std::sin(1.0)));
  CHECK((a.z - Vec3(0.3, 0, 0)).norm() < 1e-15);
  CHECK_FALSE(a.cap);
  a = project_axis(r, Vec3(1.05, 0, 0.05));
  CHECK((a.z - r.Q).norm() == 0.0);
  CHECK(a.cap);
  a = project_axis(r, Vec3(0, 0, 0));
  CHECK(a.z.norm() == 0.0);
  CHECK(axis_distance(r, Vec3(1.3, 0.4, 0)) == doctest::Approx(0.5));
  CHECK(axis_distance(r, Vec3(0.2, 0.3, 0.4)) == doctest::Approx(0.5));
}

TEST_CASE("region masks") {
  const RodGeometry r = build_rod(2, 0.1);
  const SurfaceMesh m = mesh_surface(r, 32, 16, 8);
  const RegionMasks k2 = region_masks(r, m, 2.0);
  int nP = 0, nQ = 0;
  for (int i = 0; i < m.size(); ++i) {
    const SurfacePoint& p = m.nodes[i];
    if (!is_lateral(p.region)) {
      CHECK_FALSE(k2.near_P[i]);
      CHECK_FALSE(k2.near_Q[i]);
      continue;
    }
    const double y1 = p.position(0);
    CHECK(k2.near_P[i] == (y1 <= -0.8));
    CHECK(k2.near_Q[i] == (y1 >= 0.8));
    nP += k2.near_P[i];
    nQ += k2.near_Q[i];
  }
  CHECK(nP > 0);
  CHECK(nP == nQ);

  const RegionMasks tiny = region_masks(r, m, 1e-9);
  for (int i = 0; i < m.size(); ++i) CHECK_FALSE((tiny.near_P[i] || tiny.near_Q[i]));

  // mirror symmetry y1 -> -y1 on the lateral grid
  for (int ia = 0; ia < m.res.n_axial; ++ia)
    for (int it = 0; it < m.res.n_theta; ++it)
      CHECK(k2.near_P[m.lateral_index(ia, it)] == k2.near_Q[m.lateral_index(m.res.n_axial - 1 - ia, it)]);

  for (double kappa : {1.0, 2.0, 4.0}) {
    const RegionMasks rm = region_masks(r, m, kappa);
    for (int i = 0; i < m.n_lateral(); ++i)
      if (std::abs(m.nodes[i].position(0)) <= 1.0 - 2 * kappa * 0.1) CHECK_FALSE((rm.near_P[i] || rm.near_Q[i]));
  }
}

TEST_CASE("endpoint refinement of the axial grid") {
  const SurfaceMesh m = mesh_surface(build_rod(2, 0.1), 32, 16, 4);
  const auto& b = m.panel_breaks;
  REQUIRE(b.size() >= 3);
  CHECK(b.front() == doctest::Approx(-1.0));
  CHECK(b.back() == doctest::Approx(1.0));
  // panels next to the endpoints are shorter than the middle ones
  const double first = b[1] - b[0], mid = b[b.size() / 2 + 1] - b[b.size() / 2];
  CHECK(first < mid);
  for (size_t i = 1; i < m.axial_nodes.size(); ++i) CHECK(m.axial_nodes[i] > m.axial_nodes[i - 1]);
}

TEST_CASE("mesh csv export") {
  const SurfaceMesh m = mesh_surface(build_rod(2, 0.1), 4, 8, 2);
  const std::string csv = mesh_csv(m);
  CHECK(csv.rfind("x1,x2,x3,nx,ny,nz,weight,region\n", 0) == 0);
  size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == static_cast<size_t>(m.size()) + 1);
}
