#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace nanorod {

using Vec3 = Eigen::Vector3d;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RodGeometry {
  double L = 2.0;
  double delta = 0.1;
  Vec3 P = Vec3(-1, 0, 0);
  Vec3 Q = Vec3(1, 0, 0);
  bool regime_warning = false;  // delta / L > 0.25
};

RodGeometry build_rod(double L, double delta);

enum class Region : int { LateralLower = 0, LateralUpper = 1, CapLeft = 2, CapRight = 3 };

const char* region_name(Region r);
inline bool is_lateral(Region r) { return r == Region::LateralLower || r == Region::LateralUpper; }

// Smooth parameter patches: 0 = lateral (y1, theta), 1 = left cap, 2 = right cap (phi, theta).
// phi is the polar angle measured from the outward axis direction at the endpoint.
enum class Patch : int { Lateral = 0, CapLeft = 1, CapRight = 2 };

struct PatchPoint {
  Vec3 x;
  Vec3 normal;
  double jacobian;
};

PatchPoint patch_map(const RodGeometry& rod, Patch patch, double u, double v);

struct SurfacePoint {
  Vec3 position;
  Vec3 normal;
  Region region;
  double u = 0, v = 0;  // (y1, theta) on the lateral surface, (phi, theta) on caps
};

struct MeshResolution {
  int n_axial = 32, n_theta = 16, n_cap = 8;
};

struct Cell {
  Patch patch;
  double u0, u1, v0, v1;
  int panel;  // axial panel for lateral cells, -1 for caps
};

struct SurfaceMesh {
  RodGeometry rod;
  MeshResolution res;
  std::vector<SurfacePoint> nodes;
  std::vector<double> weights;
  std::vector<Cell> cells;

  // axial structure of the lateral patch
  std::vector<double> panel_breaks;           // size n_panels + 1
  std::vector<double> axial_nodes;            // size n_axial
  std::vector<double> axial_weights;
  std::vector<double> axial_cell_breaks;      // size n_axial + 1
  std::vector<double> cap_nodes, cap_weights, cap_cell_breaks;  // polar direction
  double h_theta = 0;

  int n_lateral() const { return res.n_axial * res.n_theta; }
  int n_cap_nodes() const { return res.n_cap * res.n_theta; }
  int size() const { return static_cast<int>(nodes.size()); }

  // node index helpers
  int lateral_index(int ia, int it) const { return ia * res.n_theta + it; }
  int cap_index(int side, int ip, int it) const {
    return n_lateral() + side * n_cap_nodes() + ip * res.n_theta + it;
  }
  double total_weight() const;
};

constexpr int kPanelOrder = 4;

SurfaceMesh mesh_surface(const RodGeometry& rod, int n_axial, int n_theta, int n_cap);

struct AxisProjection {
  Vec3 z;
  bool cap = false;  // true when x lies beyond an endpoint
};

AxisProjection project_axis(const RodGeometry& rod, const Vec3& x);

struct RegionMasks {
  std::vector<bool> near_P, near_Q;
};

RegionMasks region_masks(const RodGeometry& rod, const SurfaceMesh& mesh, double kappa);

// distance from x to the closed axis segment [P, Q]
double axis_distance(const RodGeometry& rod, const Vec3& x);

std::string mesh_csv(const SurfaceMesh& mesh);

}  // namespace nanorod
