#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islab/sobolev.hpp"

using namespace islab;

namespace {

VoxelGrid cube_grid(int n, Real h) {
  VoxelGrid g;
  g.origin = Vec3::Zero();
  g.h = h;
  g.n.setConstant(n);
  return g;
}

Eigen::VectorXd gaussian_field(const VoxelGrid& g, Real sigma) {
  Eigen::VectorXd f(g.cells());
  const Vec3 center = g.origin + 0.5 * g.h * g.n.cast<Real>().matrix();
  for (Index c = 0; c < g.cells(); ++c) {
    const Real r = (g.center(c) - center).norm();
    f[c] = std::exp(-0.5 * r * r / (sigma * sigma));
  }
  return f;
}

}  // namespace

TEST_CASE("order zero reproduces the voxel L2 sum") {
  const VoxelGrid g = cube_grid(20, 0.05);
  const Eigen::VectorXd f = gaussian_field(g, 0.2);
  const Real direct = std::sqrt(g.cell_volume() * f.squaredNorm());
  CHECK(sobolev_norm(f, g, 0.0) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("pure mode picks up the symbol") {
  // a lattice mode of the periodic box itself (embed factor 1)
  const VoxelGrid g = cube_grid(24, 0.08);
  const Real L = g.n[0] * g.h;
  const Real amp = 0.75;
  const Vec3 xi = (2.0 * kPi / L) * Vec3(3, 1, 0);
  Eigen::MatrixXcd f(g.cells(), 1);
  for (Index c = 0; c < g.cells(); ++c) {
    const Vec3 rel = g.center(c) - g.origin - Vec3::Constant(0.5 * g.h);
    f(c, 0) = amp * std::exp(Complex(0, 1) * xi.dot(rel));
  }
  SobolevTransform t(f, g, 1);
  const Real symbol = std::sqrt(1.0 + xi.squaredNorm());
  CHECK(t.norm(1.0) / t.norm(0.0) == doctest::Approx(symbol).epsilon(1e-10));
  CHECK(t.norm(2.0) / t.norm(0.0) == doctest::Approx(symbol * symbol).epsilon(1e-10));
  // s = 0 keeps the plain L2 mass of the mode
  const Real l2 = amp * std::sqrt(L * L * L);
  CHECK(t.norm(0.0) == doctest::Approx(l2).epsilon(1e-10));
}

TEST_CASE("first-order norm matches a finite-difference gradient oracle") {
  const VoxelGrid g = cube_grid(28, 1.0 / 14.0);
  const Eigen::VectorXd f = gaussian_field(g, 0.25);
  const SobolevTransform t(Eigen::MatrixXd(f), g);

  // centered-difference gradient, zero outside
  Real grad_sq = 0.0;
  const auto at = [&](int i, int j, int k) -> Real {
    if (i < 0 || j < 0 || k < 0 || i >= g.n[0] || j >= g.n[1] || k >= g.n[2]) return 0.0;
    return f[g.flat(i, j, k)];
  };
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        const Real gx = (at(i + 1, j, k) - at(i - 1, j, k)) / (2 * g.h);
        const Real gy = (at(i, j + 1, k) - at(i, j - 1, k)) / (2 * g.h);
        const Real gz = (at(i, j, k + 1) - at(i, j, k - 1)) / (2 * g.h);
        grad_sq += gx * gx + gy * gy + gz * gz;
      }
  grad_sq *= g.cell_volume();
  const Real h1_oracle = std::sqrt(t.norm(0.0) * t.norm(0.0) + grad_sq);
  CHECK(t.norm(1.0) == doctest::Approx(h1_oracle).epsilon(0.05));
}

TEST_CASE("monotone in the order and absolutely homogeneous") {
  const VoxelGrid g = cube_grid(18, 0.06);
  const Eigen::VectorXd f = gaussian_field(g, 0.15);
  const SobolevTransform t(Eigen::MatrixXd(f), g);
  Real last = 0.0;
  for (const Real s : {-1.0, -0.5, 0.0, 0.7, 1.0, 2.0, 3.0}) {
    const Real v = t.norm(s);
    CHECK(v >= last);
    last = v;
  }
  const Real alpha = -3.7;
  const SobolevTransform ts(Eigen::MatrixXd(alpha * f), g);
  CHECK(ts.norm(1.0) == doctest::Approx(std::abs(alpha) * t.norm(1.0)).epsilon(1e-12));
  CHECK_THROWS(t.norm(5.0));
}

TEST_CASE("source norm aggregates") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 10.0, 200);
  SourceSpec spec;
  Bump b;
  b.width = 0.2;
  b.cut_radius = 0.5;
  spec.f0.push_back(b);
  Bump c = b;
  c.amplitude = Vec3(0.5, 0, 0);
  spec.f1.push_back(c);
  const SourcePair src = rasterize_source(spec, dom);
  const SourceNorms n = compute_source_norms(src);
  CHECK(n.M0 == doctest::Approx(n.f0_norm(0) + n.f1_norm(0)));
  CHECK(n.M1 == doctest::Approx(n.f0_norm(1) + n.f1_norm(0)));
  CHECK(n.M2 == doctest::Approx(n.f0_norm(2) + n.f1_norm(1)));
  CHECK(n.M2e == doctest::Approx(n.f0_norm(2) + n.f1_norm(2)));
  CHECK(n.M3 == doctest::Approx(n.f0_norm(3) + n.f1_norm(3)));
  CHECK(n.f0_norm(-1) <= n.f0_norm(0));
  CHECK(n.f1_norm(0) == doctest::Approx(0.5 * n.f0_norm(0)).epsilon(1e-12));
}
