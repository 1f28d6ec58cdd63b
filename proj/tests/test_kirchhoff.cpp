#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islab/fdtd.hpp"
#include "islab/kirchhoff.hpp"

using namespace islab;

namespace {

const ElasticParams kUnit{1.0, 1.0, 1.0};

VoxelGrid source_grid(int n, Real half) {
  VoxelGrid g;
  g.h = 2.0 * half / n;
  g.origin = -Vec3::Constant(half);
  g.n.setConstant(n);
  return g;
}

std::vector<Bump> smooth_bump(const Vec3& amp, Real sigma, Real cut) {
  Bump b;
  b.width = sigma;
  b.cut_radius = cut;
  b.amplitude = amp;
  return {b};
}

}  // namespace

TEST_CASE("potential of the zero field vanishes, and at t <= 0") {
  const VoxelGrid g = source_grid(24, 0.6);
  SampledField zero{g, Eigen::MatrixXd::Zero(g.cells(), 3)};
  CHECK(kirchhoff_potential(zero, Vec3(0.2, 0, 0), 0.7, kUnit).norm() == 0.0);

  const SampledField f = sample_field(smooth_bump(Vec3(1, 0, 0), 0.12, 0.48), g);
  CHECK(kirchhoff_potential(f, Vec3(0.1, 0, 0), 0.0, kUnit).norm() == 0.0);
  CHECK(kirchhoff_potential(f, Vec3(0.1, 0, 0), -0.4, kUnit).norm() == 0.0);
  CHECK(kirchhoff_displacement({}, {}, Vec3(0.1, 0, 0), 0.5, kUnit).norm() == 0.0);
  CHECK(kirchhoff_displacement(smooth_bump(Vec3(1, 0, 0), 0.1, 0.4), {},
                               Vec3(0.1, 0, 0), -0.2, kUnit)
            .norm() == 0.0);
}

TEST_CASE("potential regions grow with the two speeds") {
  // for small t the potential is supported where the fast ball reaches
  const VoxelGrid g = source_grid(32, 0.5);
  const SampledField f = sample_field(smooth_bump(Vec3(1, 0, 0), 0.1, 0.35), g);
  const Real t = 0.1;
  const Vec3 inside = Vec3(0.35 + kUnit.cp() * t - 0.05, 0, 0);
  const Vec3 outside = Vec3(0.35 + kUnit.cp() * t + 0.05, 0, 0);
  CHECK(kirchhoff_potential(f, inside, t, kUnit).norm() > 0.0);
  CHECK(kirchhoff_potential(f, outside, t, kUnit).norm() == 0.0);
}

TEST_CASE("propagator small-time limit recovers the velocity data") {
  const auto bumps = smooth_bump(Vec3(1.0, 0.4, -0.2), 0.15, 0.55);
  for (const Vec3& x : {Vec3(0.0, 0.0, 0.0), Vec3(0.1, -0.05, 0.02)}) {
    const Vec3 expected = evaluate_bumps(bumps, x);
    for (const Real t : {0.01, 0.02}) {
      const Vec3 got = elastic_propagator(bumps, x, t, kUnit);
      CHECK((got / t - expected).norm() < 0.02 * expected.norm());
    }
  }
}

TEST_CASE("displacement small-time limit recovers the initial data") {
  // U(x, t) = f0(x) + O(t^2); at cp t / sigma ~ 0.25 the physical correction
  // is a few percent, so the check discriminates normalization errors only
  const auto bumps = smooth_bump(Vec3(1.0, 0.4, -0.2), 0.15, 0.55);
  for (const Vec3& x : {Vec3(0.0, 0.0, 0.0), Vec3(0.1, -0.05, 0.02)}) {
    const Vec3 expected = evaluate_bumps(bumps, x);
    const Vec3 got = kirchhoff_displacement(bumps, {}, x, 0.02, kUnit, 0.006);
    CHECK((got - expected).norm() < 0.05 * expected.norm());
  }
}

TEST_CASE("causality outside the fast cone") {
  const auto bumps = smooth_bump(Vec3(0.5, 1.0, 0.2), 0.12, 0.45);
  const Real t = 0.25;
  const Vec3 far = Vec3(1.0, 0.6, 0.3).normalized() * (0.45 + kUnit.cp() * t + 0.15);
  const Vec3 u = kirchhoff_displacement(bumps, {}, far, t, kUnit, 0.01);
  const Vec3 center = kirchhoff_displacement(bumps, {}, Vec3::Zero(), t, kUnit, 0.01);
  CHECK(u.norm() < 1e-6 * center.norm());
}

TEST_CASE("matches the elastodynamic solver at probe points") {
  const auto bumps = smooth_bump(Vec3(1.0, -0.5, 0.3), 0.14, 0.5);
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 8.0, 64);
  FdtdConfig cfg;
  cfg.box_cells = 96;
  cfg.box_half_width = 2.2;
  cfg.t_end = 0.55;
  cfg.snapshot_times = {0.3, 0.5};
  const FdtdResult res = fdtd_elastic_forward(bumps, {}, kUnit, dom.mesh, Vec3::Zero(), cfg);
  REQUIRE(res.snapshots.size() == 2);

  int agreeing = 0;
  Rng rng(3);
  for (int q = 0; q < 4; ++q) {
    const Vec3 x(0.5 * (rng.uniform() - 0.5), 0.5 * (rng.uniform() - 0.5),
                 0.5 * (rng.uniform() - 0.5));
    for (std::size_t snap = 0; snap < 2; ++snap) {
      Vec3 fd;
      for (int comp = 0; comp < 3; ++comp)
        fd[comp] = sample_trilinear(res.snapshots[snap].col(comp), res.box, x);
      const Vec3 kv =
          kirchhoff_displacement(bumps, {}, x, res.snapshot_times[snap], kUnit, 0.02);
      if ((kv - fd).norm() <= 0.05 * std::max(fd.norm(), 1e-9)) ++agreeing;
    }
  }
  CHECK(agreeing >= 7);  // 8 probes, allow one borderline
}
