#include "islab/kirchhoff.hpp"

#include <cmath>

#include "islab/domain.hpp"

namespace islab {

SampledField sample_field(const std::vector<Bump>& bumps, const VoxelGrid& grid) {
  SampledField f;
  f.grid = grid;
  f.values.setZero(grid.cells(), 3);
  parallel_for(0, grid.cells(), [&](Index c) {
    const Vec3 v = evaluate_bumps(bumps, grid.center(c));
    f.values.row(c) = v.transpose();
  });
  return f;
}

namespace {

inline Real region_weight(Real r, Real t, Real cs, Real cp) {
  if (t <= 0.0 || r >= cp * t) return 0.0;
  if (r < cs * t) return (cp - cs) / cs;
  return (cp * t - r) / r;
}

}  // namespace

Vec3 kirchhoff_potential(const SampledField& f, const Vec3& x, Real t,
                         const ElasticParams& ep) {
  if (t <= 0.0) return Vec3::Zero();
  const Real cs = ep.cs(), cp = ep.cp();
  const Real scale = f.grid.cell_volume() / (cp * cp - cs * cs);
  Vec3 acc = Vec3::Zero();
  const Index cells = f.grid.cells();
  for (Index c = 0; c < cells; ++c) {
    const Vec3 v = f.values.row(c);
    if (v.isZero(0.0)) continue;
    const Real r = (x - f.grid.center(c)).norm();
    const Real w = region_weight(r, t, cs, cp);
    if (w != 0.0) acc += w * v;
  }
  return scale * acc;
}

Vec3 elastic_propagator(const std::vector<Bump>& g, const Vec3& x, Real t,
                        const ElasticParams& ep, int sphere_nodes, int shell_layers) {
  if (t <= 0.0) return Vec3::Zero();
  ep.validate();
  const Real cs = ep.cs(), cp = ep.cp();
  const BoundaryMesh sphere = fibonacci_sphere_mesh(Vec3::Zero(), 1.0, sphere_nodes);

  Vec3 acc = Vec3::Zero();
  for (Index i = 0; i < sphere.size(); ++i) {
    const Vec3 n = sphere.normals.col(i);
    const Real w = sphere.weights[i];  // unit-sphere patch area
    const Vec3 gp = evaluate_bumps(g, x + cp * t * n);
    const Vec3 gs = evaluate_bumps(g, x + cs * t * n);
    // dS / (c t)^2 cancels the sphere radius, leaving the patch area w
    acc += w * (n * n.dot(gp) + (gs - n * n.dot(gs)));
  }
  // near-field shell, midpoint rule in radius
  const Real dr = (cp - cs) * t / shell_layers;
  for (int q = 0; q < shell_layers; ++q) {
    const Real r = cs * t + (q + 0.5) * dr;
    for (Index i = 0; i < sphere.size(); ++i) {
      const Vec3 n = sphere.normals.col(i);
      const Vec3 gv = evaluate_bumps(g, x + r * n);
      acc += (sphere.weights[i] * dr / r) * (3.0 * n * n.dot(gv) - gv);
    }
  }
  return (t / (4.0 * kPi)) * acc;
}

Vec3 kirchhoff_displacement(const std::vector<Bump>& f0, const std::vector<Bump>& f1,
                            const Vec3& x, Real t, const ElasticParams& ep, Real dt_fd,
                            int sphere_nodes) {
  require(dt_fd > 0, "kirchhoff_displacement: bad stencil spacing");
  if (t < 0.0) return Vec3::Zero();
  Vec3 u = Vec3::Zero();
  if (!f0.empty()) {
    const Vec3 plus = elastic_propagator(f0, x, t + dt_fd, ep, sphere_nodes);
    const Vec3 minus = elastic_propagator(f0, x, t - dt_fd, ep, sphere_nodes);
    u += (plus - minus) / (2.0 * dt_fd);
  }
  if (!f1.empty()) u -= elastic_propagator(f1, x, t, ep, sphere_nodes);
  return u;
}

}  // namespace islab
