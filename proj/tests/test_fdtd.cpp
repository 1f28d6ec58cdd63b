#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islab/fdtd.hpp"
#include "islab/io.hpp"

using namespace islab;

namespace {

const ElasticParams kUnit{1.0, 1.0, 1.0};

VoxelGrid small_box(int n, Real half) {
  VoxelGrid g;
  g.h = 2.0 * half / n;
  g.origin = -Vec3::Constant(half);
  g.n.setConstant(n);
  return g;
}

Eigen::VectorXd centered_gaussian(const VoxelGrid& g, Real sigma) {
  Eigen::VectorXd f(g.cells());
  for (Index c = 0; c < g.cells(); ++c) {
    const Real r2 = g.center(c).squaredNorm();
    f[c] = std::exp(-0.5 * r2 / (sigma * sigma));
  }
  return f;
}

}  // namespace

TEST_CASE("scalar leapfrog conserves the discrete energy") {
  const VoxelGrid box = small_box(40, 1.0);
  const Real dt = 0.9 * box.h / std::sqrt(3.0);
  ScalarLeapfrog lf(box, 1.0, dt);
  lf.set_initial(centered_gaussian(box, 0.12), Eigen::VectorXd::Zero(box.cells()));
  const Real e0 = lf.discrete_energy();
  for (int n = 0; n < 40; ++n) lf.step();  // wave still inside the box
  CHECK(lf.discrete_energy() == doctest::Approx(e0).epsilon(1e-10));
  CHECK(e0 > 0.0);
}

TEST_CASE("elastic leapfrog conserves the discrete energy") {
  const VoxelGrid box = small_box(36, 1.0);
  const Real dt = 0.9 * box.h / (std::sqrt(3.0) * kUnit.cp());
  ElasticLeapfrog lf(box, kUnit, dt);
  Eigen::MatrixXd f0(box.cells(), 3);
  f0.col(0) = centered_gaussian(box, 0.12);
  f0.col(1) = 0.3 * centered_gaussian(box, 0.15);
  f0.col(2).setZero();
  lf.set_initial(f0, Eigen::MatrixXd::Zero(box.cells(), 3));
  const Real e0 = lf.discrete_energy();
  for (int n = 0; n < 30; ++n) lf.step();
  CHECK(lf.discrete_energy() == doctest::Approx(e0).epsilon(1e-10));
}

TEST_CASE("leapfrog reversibility recovers the initial data") {
  const VoxelGrid box = small_box(32, 1.0);
  const Real dt = 0.9 * box.h / std::sqrt(3.0);
  const Eigen::VectorXd f0 = centered_gaussian(box, 0.15);
  Eigen::VectorXd f1 = 0.4 * centered_gaussian(box, 0.2);
  ScalarLeapfrog lf(box, 1.0, dt);
  lf.set_initial(f0, f1);
  const int n_steps = 30;
  for (int n = 0; n < n_steps; ++n) lf.step();
  lf.reverse();
  for (int n = 0; n < n_steps; ++n) lf.step();
  // state is now (prev, cur) = (U(dt), U(0))
  const Real scale = f0.cwiseAbs().maxCoeff();
  CHECK((lf.current() - f0).cwiseAbs().maxCoeff() < 1e-10 * scale);
  // invert the Taylor first step for the initial velocity
  Eigen::VectorXd lap(box.cells());
  lap.setZero();
  lf.apply_laplacian(lf.current(), lap);
  const Eigen::VectorXd f1_rec =
      (lf.current() - lf.previous()) / dt + (0.5 * dt) * lap;
  CHECK((f1_rec - f1).cwiseAbs().maxCoeff() < 1e-10 * f1.cwiseAbs().maxCoeff());
}

TEST_CASE("elastic reversibility") {
  const VoxelGrid box = small_box(28, 1.0);
  const Real dt = 0.9 * box.h / (std::sqrt(3.0) * kUnit.cp());
  Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(box.cells(), 3);
  f0.col(1) = centered_gaussian(box, 0.15);
  ElasticLeapfrog lf(box, kUnit, dt);
  lf.set_initial(f0, Eigen::MatrixXd::Zero(box.cells(), 3));
  for (int n = 0; n < 24; ++n) lf.step();
  lf.reverse();
  for (int n = 0; n < 24; ++n) lf.step();
  CHECK((lf.current() - f0).cwiseAbs().maxCoeff() < 1e-10 * f0.cwiseAbs().maxCoeff());
}

TEST_CASE("discrete solenoidal and gradient channels stay closed") {
  // free-space property; the box is sized so that neither the physical
  // front nor the 2-cell-per-step stencil precursor touches the walls
  const VoxelGrid box = small_box(32, 1.4);
  const Real dt = 0.9 * box.h / (std::sqrt(3.0) * kUnit.cp());
  const Real inv2h = 1.0 / (2.0 * box.h);
  const int nx = box.n[0];
  const Index sx = 1, sy = nx, sz = Index(nx) * nx;
  Eigen::VectorXd pot(box.cells());
  for (Index c = 0; c < box.cells(); ++c) {
    const Real r = box.center(c).norm();
    pot[c] = r < 0.4 ? std::exp(-0.5 * r * r / (0.08 * 0.08)) : 0.0;
  }

  const auto centered_grad = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(box.cells(), 3);
    for (Index k = 1; k < nx - 1; ++k)
      for (Index j = 1; j < nx - 1; ++j)
        for (Index i = 1; i < nx - 1; ++i) {
          const Index c = k * sz + j * sy + i;
          g(c, 0) = (p[c + sx] - p[c - sx]) * inv2h;
          g(c, 1) = (p[c + sy] - p[c - sy]) * inv2h;
          g(c, 2) = (p[c + sz] - p[c - sz]) * inv2h;
        }
    return g;
  };

  SUBCASE("curl of a discrete potential: divergence stays at roundoff") {
    // f0 = curl_h(A) with A = (0, 0, pot)
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(box.cells(), 3);
    a.col(2) = pot;
    Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(box.cells(), 3);
    for (Index k = 1; k < nx - 1; ++k)
      for (Index j = 1; j < nx - 1; ++j)
        for (Index i = 1; i < nx - 1; ++i) {
          const Index c = k * sz + j * sy + i;
          f0(c, 0) = (a(c + sy, 2) - a(c - sy, 2)) * inv2h;
          f0(c, 1) = -(a(c + sx, 2) - a(c - sx, 2)) * inv2h;
        }
    ElasticLeapfrog lf(box, kUnit, dt);
    lf.set_initial(f0, Eigen::MatrixXd::Zero(box.cells(), 3));
    for (int n = 0; n < 8; ++n) lf.step();
    const Real curl_scale = lf.curl().cwiseAbs().maxCoeff();
    CHECK(curl_scale > 0.0);  // shear channel alive
    CHECK(lf.divergence().cwiseAbs().maxCoeff() < 1e-6 * curl_scale);
  }

  SUBCASE("gradient data: curl stays at roundoff") {
    const Eigen::MatrixXd f0 = centered_grad(pot);
    ElasticLeapfrog lf(box, kUnit, dt);
    lf.set_initial(f0, Eigen::MatrixXd::Zero(box.cells(), 3));
    for (int n = 0; n < 8; ++n) lf.step();
    const Real div_scale = lf.divergence().cwiseAbs().maxCoeff();
    CHECK(div_scale > 0.0);
    CHECK(lf.curl().cwiseAbs().maxCoeff() < 1e-6 * div_scale);
  }
}

TEST_CASE("zero sources propagate to zero traces") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 8.0, 150);
  FdtdConfig cfg;
  cfg.box_cells = 32;
  cfg.box_half_width = 2.2;
  cfg.t_end = 0.5;
  const FdtdResult res = fdtd_scalar_forward({}, {}, dom.mesh, Vec3::Zero(), cfg);
  CHECK(res.trace.values.cwiseAbs().maxCoeff() == 0.0);
  const FdtdResult eres = fdtd_elastic_forward({}, {}, kUnit, dom.mesh, Vec3::Zero(), cfg);
  CHECK(eres.trace.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("light-cone containment is enforced") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 8.0, 100);
  Bump b;
  b.width = 0.2;
  b.cut_radius = 0.5;
  FdtdConfig cfg;
  cfg.box_cells = 32;
  cfg.box_half_width = 2.0;
  cfg.t_end = 5.0;  // cone escapes the box
  CHECK_THROWS(fdtd_scalar_forward({b}, {}, dom.mesh, Vec3::Zero(), cfg));
  cfg.cfl = 1.4;
  cfg.t_end = 0.5;
  CHECK_THROWS(fdtd_scalar_forward({b}, {}, dom.mesh, Vec3::Zero(), cfg));
}

TEST_CASE("scalar duality: trace transform matches the quadrature sweep") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 16.0, 400);
  SourceSpec spec;
  Bump b;
  b.width = 0.22;
  b.cut_radius = 0.6;
  spec.f0.push_back(b);
  const SourcePair src = rasterize_source(spec, dom);

  const Real T = 4.0 * dom.diameter;
  const FrequencyGrid grid = make_frequency_grid(4.0, kPi / T);
  const FrequencySweep sweep = forward_sweep(src, dom.mesh, grid);

  FdtdConfig cfg;
  cfg.box_cells = 72;
  cfg.box_half_width = 3.0;
  cfg.t_end = dom.diameter + 0.2;
  const FdtdResult res = fdtd_scalar_forward(spec.f0, spec.f1, dom.mesh, Vec3::Zero(), cfg);
  const FrequencySweep from_time = sweep_from_trace(res.trace, grid);

  // relative L2 mismatch over the middle half of the band
  Real num = 0.0, den = 0.0;
  for (int j = 0; j < grid.count; ++j) {
    const Real omega = grid.omega(j);
    if (omega < 0.25 * grid.omega_max() || omega > 0.75 * grid.omega_max()) continue;
    num += (from_time.values.col(j) - sweep.values.col(j)).squaredNorm();
    den += sweep.values.col(j).squaredNorm();
  }
  CHECK(den > 0.0);
  CHECK(std::sqrt(num / den) < 0.02);
}

TEST_CASE("huygens: scalar trace dies after the diameter") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 16.0, 300);
  SourceSpec spec;
  Bump b;
  b.width = 0.2;
  b.cut_radius = 0.8;  // full 4 sigma so the truncation ring stays quiet
  spec.f0.push_back(b);
  FdtdConfig cfg;
  cfg.box_cells = 80;
  cfg.box_half_width = 3.5;
  cfg.t_end = dom.diameter + 0.4;
  const FdtdResult res = fdtd_scalar_forward(spec.f0, spec.f1, dom.mesh, Vec3::Zero(), cfg);
  CHECK(huygens_residual(res.trace, dom.mesh.weights, dom.diameter) < 1e-3);
}

TEST_CASE("backward solve: zero data reconstructs zero") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 12.0, 200);
  const BackwardStencil cells = classify_backward_cells(dom, false);
  CHECK(!cells.injection.empty());
  CHECK(!cells.interior.empty());
  const Real dt = 0.9 * dom.grid.h / std::sqrt(3.0);
  const int steps = 40;
  const Eigen::MatrixXd injected =
      Eigen::MatrixXd::Zero(static_cast<Index>(cells.injection.size()), steps + 1);
  const BackwardResult rec = fdtd_scalar_backward(dom, cells, injected, dt, steps);
  CHECK(rec.f0.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rec.f1.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary-data reconstruction of a gaussian (coarse smoke)") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 2.0 / 40.0, 900);
  SourceSpec spec;
  Bump b;
  b.width = 0.25;
  b.cut_radius = 0.7;
  spec.f0.push_back(b);
  const SourcePair truth = rasterize_source(spec, dom);

  // band wide enough that the spectral truncation sits below the grid error
  const Real T = 4.0 * dom.diameter;
  const FrequencyGrid grid = make_frequency_grid(12.0, kPi / T);
  const FrequencySweep sweep = forward_sweep(truth, dom.mesh, grid);

  const BackwardStencil cells = classify_backward_cells(dom, false);
  const SurfaceInterp interp = build_surface_interp(dom.mesh, cells.injection_points);

  const Real dt = 0.9 * dom.grid.h / std::sqrt(3.0);
  const int steps = static_cast<int>(std::ceil((dom.diameter + 0.1) / dt));
  Eigen::VectorXd times(steps + 1);
  for (int n = 0; n <= steps; ++n) times[n] = n * dt;
  const Eigen::MatrixXd mesh_series = synthesize_at_times(sweep, grid.omega_max(), times);
  Eigen::MatrixXd injected(static_cast<Index>(cells.injection.size()), steps + 1);
  for (Index q = 0; q < injected.rows(); ++q) {
    injected.row(q).setZero();
    for (int w = 0; w < interp.weights.cols(); ++w)
      injected.row(q) += interp.weights(q, w) * mesh_series.row(interp.neighbors(q, w));
  }

  const BackwardResult rec = fdtd_scalar_backward(dom, cells, injected, dt, steps);
  Real num = 0.0, den = 0.0;
  for (Index c = 0; c < dom.grid.cells(); ++c) {
    if (!dom.in_support(c)) continue;
    num += (rec.f0(c, 0) - truth.f0(c, 0)) * (rec.f0(c, 0) - truth.f0(c, 0));
    den += truth.f0(c, 0) * truth.f0(c, 0);
  }
  const Real rel = std::sqrt(num / den);
  CHECK(rel < 0.15);  // coarse grid; the acceptance run tightens this
}
