#pragma once

#include <utility>
#include <vector>

#include "islab/common.hpp"

namespace islab {

enum class ShapeKind { Ball, Box, BallUnion };

/// Geometry description of the support domain. A Ball is (center, radius),
/// a Box is (center, half_extent), a BallUnion is a list of (center, radius)
/// pairs whose union must be connected with connected complement.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Ball;
  Vec3 center = Vec3::Zero();
  Real radius = 1.0;
  Vec3 half_extent = Vec3::Ones();
  std::vector<std::pair<Vec3, Real>> balls;

  static ShapeSpec ball(const Vec3& c, Real r);
  static ShapeSpec box(const Vec3& c, const Vec3& half);
  static ShapeSpec ball_union(std::vector<std::pair<Vec3, Real>> parts);
};

bool point_inside(const ShapeSpec& shape, const Vec3& x);

/// Lower bound on the distance from x to the boundary, positive inside,
/// nonpositive outside. Exact for Ball and Box, conservative in overlap
/// regions of BallUnion.
Real inside_distance(const ShapeSpec& shape, const Vec3& x);

/// Closest point on the boundary (used when coupling volume grids to the
/// surface mesh). Exact for Ball/Box, nearest-sphere projection for unions.
Vec3 project_to_boundary(const ShapeSpec& shape, const Vec3& x);

Real analytic_diameter(const ShapeSpec& shape);
Real analytic_area(const ShapeSpec& shape);

/// Surface quadrature: nodes, outward unit normals, an orthonormal tangent
/// pair per node, and weights summing to the surface area.
struct BoundaryMesh {
  Eigen::Matrix3Xd nodes;
  Eigen::Matrix3Xd normals;
  Eigen::Matrix3Xd tangent1;
  Eigen::Matrix3Xd tangent2;
  Eigen::VectorXd weights;

  Index size() const { return nodes.cols(); }
  Real area() const { return weights.sum(); }
};

/// Axis-aligned voxel lattice; fields live at cell centers.
struct VoxelGrid {
  Vec3 origin = Vec3::Zero();  // corner of cell (0,0,0)
  Real h = 1.0;
  Eigen::Array3i n = Eigen::Array3i::Zero();

  Index cells() const { return Index(n[0]) * n[1] * n[2]; }
  Index flat(int i, int j, int k) const {
    return (Index(k) * n[1] + j) * n[0] + i;
  }
  Vec3 center(int i, int j, int k) const {
    return origin + h * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  Vec3 center(Index flat_idx) const {
    const int i = static_cast<int>(flat_idx % n[0]);
    const int j = static_cast<int>((flat_idx / n[0]) % n[1]);
    const int k = static_cast<int>(flat_idx / (Index(n[0]) * n[1]));
    return center(i, j, k);
  }
  Real cell_volume() const { return h * h * h; }
};

struct Domain {
  ShapeSpec shape;
  Real h = 0.0;
  VoxelGrid grid;
  std::vector<char> inside;            // cell-center classification
  Eigen::VectorXd boundary_distance;   // inside_distance at cell centers
  Real diameter = 0.0;                 // sup |x - y| over the closure
  Real embed_side = 0.0;               // periodic box side used by norms
  BoundaryMesh mesh;

  Real standoff() const { return 2.0 * h; }
  bool in_support(Index cell) const {
    return inside[static_cast<std::size_t>(cell)] &&
           boundary_distance[cell] >= standoff();
  }
};

/// Voxelizes the shape at spacing h and builds the surface quadrature.
/// mesh_nodes is the Fibonacci point count per sphere; boxes use per-face
/// grids of roughly the same node budget.
Domain build_domain(const ShapeSpec& shape, Real h, int mesh_nodes = 2000);

/// Diameter estimated from mesh node pairs; used to validate the analytic
/// value at build time.
Real mesh_diameter_estimate(const BoundaryMesh& mesh);

/// Equal-area Fibonacci point set on a sphere.
BoundaryMesh fibonacci_sphere_mesh(const Vec3& center, Real radius, int n);

}  // namespace islab
