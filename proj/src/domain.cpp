#include "islab/domain.hpp"

#include <algorithm>
#include <cmath>

namespace islab {

ShapeSpec ShapeSpec::ball(const Vec3& c, Real r) {
  ShapeSpec s;
  s.kind = ShapeKind::Ball;
  s.center = c;
  s.radius = r;
  return s;
}

ShapeSpec ShapeSpec::box(const Vec3& c, const Vec3& half) {
  ShapeSpec s;
  s.kind = ShapeKind::Box;
  s.center = c;
  s.half_extent = half;
  return s;
}

ShapeSpec ShapeSpec::ball_union(std::vector<std::pair<Vec3, Real>> parts) {
  ShapeSpec s;
  s.kind = ShapeKind::BallUnion;
  s.balls = std::move(parts);
  if (!s.balls.empty()) s.center = s.balls.front().first;
  return s;
}

bool point_inside(const ShapeSpec& shape, const Vec3& x) {
  return inside_distance(shape, x) > 0.0;
}

Real inside_distance(const ShapeSpec& shape, const Vec3& x) {
  switch (shape.kind) {
    case ShapeKind::Ball:
      return shape.radius - (x - shape.center).norm();
    case ShapeKind::Box: {
      const Vec3 d = shape.half_extent - (x - shape.center).cwiseAbs();
      return d.minCoeff();
    }
    case ShapeKind::BallUnion: {
      Real best = -std::numeric_limits<Real>::infinity();
      for (const auto& [c, r] : shape.balls) best = std::max(best, r - (x - c).norm());
      return best;
    }
  }
  return -1.0;
}

Vec3 project_to_boundary(const ShapeSpec& shape, const Vec3& x) {
  switch (shape.kind) {
    case ShapeKind::Ball: {
      const Vec3 d = x - shape.center;
      const Real r = d.norm();
      const Vec3 dir = r < 1e-14 ? Vec3::UnitX() : Vec3(d / r);
      return shape.center + shape.radius * dir;
    }
    case ShapeKind::Box: {
      // push out along the axis with the smallest clearance
      const Vec3 rel = x - shape.center;
      Vec3 p = rel.cwiseMax(-shape.half_extent).cwiseMin(shape.half_extent);
      int axis = 0;
      Real best = std::numeric_limits<Real>::infinity();
      for (int a = 0; a < 3; ++a) {
        const Real gap = shape.half_extent[a] - std::abs(p[a]);
        if (gap < best) {
          best = gap;
          axis = a;
        }
      }
      p[axis] = std::copysign(shape.half_extent[axis], p[axis] == 0.0 ? 1.0 : p[axis]);
      return shape.center + p;
    }
    case ShapeKind::BallUnion: {
      Vec3 best_point = x;
      Real best_dist = std::numeric_limits<Real>::infinity();
      for (const auto& [c, r] : shape.balls) {
        Vec3 d = x - c;
        const Real nrm = d.norm();
        const Vec3 p = c + r * (nrm < 1e-14 ? Vec3::UnitX() : Vec3(d / nrm));
        const Real dist = (p - x).norm();
        if (dist < best_dist && inside_distance(shape, p) <= 1e-12) {
          best_dist = dist;
          best_point = p;
        }
      }
      return best_point;
    }
  }
  return x;
}

Real analytic_diameter(const ShapeSpec& shape) {
  switch (shape.kind) {
    case ShapeKind::Ball:
      return 2.0 * shape.radius;
    case ShapeKind::Box:
      return 2.0 * shape.half_extent.norm();
    case ShapeKind::BallUnion: {
      Real d = 0.0;
      for (const auto& [ci, ri] : shape.balls) {
        d = std::max(d, 2.0 * ri);
        for (const auto& [cj, rj] : shape.balls)
          d = std::max(d, (ci - cj).norm() + ri + rj);
      }
      return d;
    }
  }
  return 0.0;
}

namespace {

// Area of the spherical cap of ball (c, r) hidden inside ball (co, ro).
Real hidden_cap_area(const Vec3& c, Real r, const Vec3& co, Real ro) {
  const Real d = (c - co).norm();
  if (d >= r + ro) return 0.0;                // disjoint
  if (d + r <= ro) return 4.0 * kPi * r * r;  // fully swallowed
  // intersection circle at distance t from c along the center line
  const Real t = (d * d + r * r - ro * ro) / (2.0 * d);
  return 2.0 * kPi * r * (r - t);
}

}  // namespace

Real analytic_area(const ShapeSpec& shape) {
  switch (shape.kind) {
    case ShapeKind::Ball:
      return 4.0 * kPi * shape.radius * shape.radius;
    case ShapeKind::Box: {
      const Vec3 e = 2.0 * shape.half_extent;
      return 2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]);
    }
    case ShapeKind::BallUnion: {
      Real area = 0.0;
      for (std::size_t i = 0; i < shape.balls.size(); ++i) {
        Real exposed = 4.0 * kPi * shape.balls[i].second * shape.balls[i].second;
        for (std::size_t j = 0; j < shape.balls.size(); ++j) {
          if (i == j) continue;
          exposed -= hidden_cap_area(shape.balls[i].first, shape.balls[i].second,
                                     shape.balls[j].first, shape.balls[j].second);
        }
        area += std::max(exposed, 0.0);
      }
      return area;
    }
  }
  return 0.0;
}

namespace {

void orthonormal_tangents(const Vec3& n, Vec3& t1, Vec3& t2) {
  const Vec3 seed = std::abs(n[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  t1 = n.cross(seed).normalized();
  t2 = n.cross(t1);
}

BoundaryMesh box_mesh(const ShapeSpec& shape, int nodes_budget) {
  const Vec3 e = 2.0 * shape.half_extent;
  const Real area = analytic_area(shape);
  BoundaryMesh mesh;
  std::vector<Vec3> pts, nrm;
  std::vector<Real> w;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = -1; side <= 1; side += 2) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      const Real face_area = e[u] * e[v];
      // per-face budget proportional to area
      const int target = std::max(4, static_cast<int>(std::lround(
                                          nodes_budget * face_area / area)));
      const Real aspect = e[u] / e[v];
      int mu = std::max(2, static_cast<int>(std::lround(std::sqrt(target * aspect))));
      int mv = std::max(2, static_cast<int>(std::lround(Real(target) / mu)));
      const Real cell = face_area / (Real(mu) * mv);
      for (int a = 0; a < mu; ++a) {
        for (int b = 0; b < mv; ++b) {
          Vec3 p = shape.center;
          p[axis] += side * shape.half_extent[axis];
          p[u] += -shape.half_extent[u] + (a + 0.5) * e[u] / mu;
          p[v] += -shape.half_extent[v] + (b + 0.5) * e[v] / mv;
          Vec3 normal = Vec3::Zero();
          normal[axis] = side;
          pts.push_back(p);
          nrm.push_back(normal);
          w.push_back(cell);
        }
      }
    }
  }
  const Index m = static_cast<Index>(pts.size());
  mesh.nodes.resize(3, m);
  mesh.normals.resize(3, m);
  mesh.tangent1.resize(3, m);
  mesh.tangent2.resize(3, m);
  mesh.weights.resize(m);
  for (Index i = 0; i < m; ++i) {
    mesh.nodes.col(i) = pts[static_cast<std::size_t>(i)];
    mesh.normals.col(i) = nrm[static_cast<std::size_t>(i)];
    Vec3 t1, t2;
    orthonormal_tangents(nrm[static_cast<std::size_t>(i)], t1, t2);
    mesh.tangent1.col(i) = t1;
    mesh.tangent2.col(i) = t2;
    mesh.weights[i] = w[static_cast<std::size_t>(i)];
  }
  return mesh;
}

BoundaryMesh union_mesh(const ShapeSpec& shape, int nodes_per_ball) {
  std::vector<Vec3> pts, nrm;
  std::vector<Real> w;
  for (std::size_t b = 0; b < shape.balls.size(); ++b) {
    const auto& [c, r] = shape.balls[b];
    BoundaryMesh part = fibonacci_sphere_mesh(c, r, nodes_per_ball);
    for (Index i = 0; i < part.size(); ++i) {
      const Vec3 p = part.nodes.col(i);
      bool hidden = false;
      for (std::size_t o = 0; o < shape.balls.size(); ++o) {
        if (o == b) continue;
        if ((p - shape.balls[o].first).norm() < shape.balls[o].second - 1e-12) {
          hidden = true;
          break;
        }
      }
      if (!hidden) {
        pts.push_back(p);
        nrm.push_back(part.normals.col(i));
        w.push_back(part.weights[i]);
      }
    }
  }
  BoundaryMesh mesh;
  const Index m = static_cast<Index>(pts.size());
  mesh.nodes.resize(3, m);
  mesh.normals.resize(3, m);
  mesh.tangent1.resize(3, m);
  mesh.tangent2.resize(3, m);
  mesh.weights.resize(m);
  for (Index i = 0; i < m; ++i) {
    mesh.nodes.col(i) = pts[static_cast<std::size_t>(i)];
    mesh.normals.col(i) = nrm[static_cast<std::size_t>(i)];
    Vec3 t1, t2;
    orthonormal_tangents(nrm[static_cast<std::size_t>(i)], t1, t2);
    mesh.tangent1.col(i) = t1;
    mesh.tangent2.col(i) = t2;
    mesh.weights[i] = w[static_cast<std::size_t>(i)];
  }
  return mesh;
}

}  // namespace

BoundaryMesh fibonacci_sphere_mesh(const Vec3& center, Real radius, int n) {
  require(n >= 8, "fibonacci_sphere_mesh: need at least 8 nodes");
  BoundaryMesh mesh;
  mesh.nodes.resize(3, n);
  mesh.normals.resize(3, n);
  mesh.tangent1.resize(3, n);
  mesh.tangent2.resize(3, n);
  mesh.weights.resize(n);
  const Real golden = (1.0 + std::sqrt(5.0)) / 2.0;
  const Real w = 4.0 * kPi * radius * radius / n;
  for (int i = 0; i < n; ++i) {
    const Real z = 1.0 - (2.0 * i + 1.0) / n;
    const Real rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Real phi = 2.0 * kPi * std::fmod(i / golden, 1.0);
    const Vec3 normal(rho * std::cos(phi), rho * std::sin(phi), z);
    mesh.normals.col(i) = normal;
    mesh.nodes.col(i) = center + radius * normal;
    Vec3 t1, t2;
    orthonormal_tangents(normal, t1, t2);
    mesh.tangent1.col(i) = t1;
    mesh.tangent2.col(i) = t2;
    mesh.weights[i] = w;
  }
  return mesh;
}

Real mesh_diameter_estimate(const BoundaryMesh& mesh) {
  Real best = 0.0;
  const Index m = mesh.size();
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      best = std::max(best, (mesh.nodes.col(i) - mesh.nodes.col(j)).norm());
  return best;
}

namespace {

void shape_bounding_box(const ShapeSpec& shape, Vec3& lo, Vec3& hi) {
  switch (shape.kind) {
    case ShapeKind::Ball:
      lo = shape.center - Vec3::Constant(shape.radius);
      hi = shape.center + Vec3::Constant(shape.radius);
      return;
    case ShapeKind::Box:
      lo = shape.center - shape.half_extent;
      hi = shape.center + shape.half_extent;
      return;
    case ShapeKind::BallUnion: {
      lo = Vec3::Constant(std::numeric_limits<Real>::infinity());
      hi = -lo;
      for (const auto& [c, r] : shape.balls) {
        lo = lo.cwiseMin(c - Vec3::Constant(r));
        hi = hi.cwiseMax(c + Vec3::Constant(r));
      }
      return;
    }
  }
}

bool shape_valid(const ShapeSpec& shape) {
  switch (shape.kind) {
    case ShapeKind::Ball:
      return shape.radius > 0.0;
    case ShapeKind::Box:
      return shape.half_extent.minCoeff() > 0.0;
    case ShapeKind::BallUnion:
      if (shape.balls.empty()) return false;
      for (const auto& [c, r] : shape.balls)
        if (!(r > 0.0)) return false;
      return true;
  }
  return false;
}

}  // namespace

Domain build_domain(const ShapeSpec& shape, Real h, int mesh_nodes) {
  require(h > 0.0, "build_domain: spacing must be positive");
  require(shape_valid(shape), "build_domain: degenerate shape");

  Domain dom;
  dom.shape = shape;
  dom.h = h;
  dom.diameter = analytic_diameter(shape);

  Vec3 lo, hi;
  shape_bounding_box(shape, lo, hi);
  // one cell of padding so boundary cells are never clipped
  lo -= Vec3::Constant(h);
  hi += Vec3::Constant(h);
  dom.grid.origin = lo;
  dom.grid.h = h;
  for (int a = 0; a < 3; ++a)
    dom.grid.n[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / h)));

  const Index cells = dom.grid.cells();
  dom.inside.assign(static_cast<std::size_t>(cells), 0);
  dom.boundary_distance.resize(cells);
  parallel_for(0, cells, [&](Index c) {
    const Real d = inside_distance(shape, dom.grid.center(c));
    dom.boundary_distance[c] = d;
    dom.inside[static_cast<std::size_t>(c)] = d > 0.0 ? 1 : 0;
  });

  dom.embed_side = 2.0 * (hi - lo).maxCoeff();

  switch (shape.kind) {
    case ShapeKind::Ball:
      dom.mesh = fibonacci_sphere_mesh(shape.center, shape.radius, mesh_nodes);
      break;
    case ShapeKind::Box:
      dom.mesh = box_mesh(shape, mesh_nodes);
      break;
    case ShapeKind::BallUnion:
      dom.mesh = union_mesh(shape, mesh_nodes);
      break;
  }
  return dom;
}

}  // namespace islab
