#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islab/time_synthesis.hpp"

using namespace islab;

namespace {

struct Setup {
  Domain dom;
  SourcePair src;
  FrequencyGrid grid;
  FrequencySweep sweep;
};

Setup make_setup() {
  Setup s{build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 10.0, 250), {}, {}, {}};
  SourceSpec spec;
  Bump b;
  b.width = 0.2;
  b.cut_radius = 0.55;
  b.center = Vec3(0.04, -0.03, 0.05);
  spec.f0.push_back(b);
  s.src = rasterize_source(spec, s.dom);
  // T = 4 D, domega = pi / T
  const Real T = 4.0 * s.dom.diameter;
  s.grid = make_frequency_grid(6.0, kPi / T);
  s.sweep = forward_sweep(s.src, s.dom.mesh, s.grid);
  return s;
}

}  // namespace

TEST_CASE("zero sweep synthesizes a zero trace") {
  const Setup s = make_setup();
  FrequencySweep zero = s.sweep;
  zero.values.setZero();
  const TimeTrace trace = trace_from_sweep(zero, s.grid.omega_max());
  CHECK(trace.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("synthesis round trip is exact on the paired grids") {
  const Setup s = make_setup();
  const TimeTrace trace = trace_from_sweep(s.sweep, s.grid.omega_max());
  const FrequencySweep back = sweep_from_trace(trace, s.grid);
  const Real scale = s.sweep.values.cwiseAbs().maxCoeff();
  CHECK((back.values - s.sweep.values).cwiseAbs().maxCoeff() < 1e-9 * scale);

  // band-limited synthesis recovers the bins below the cut
  const Real kcut = 0.5 * s.grid.omega_max();
  const TimeTrace cut = trace_from_sweep(s.sweep, kcut);
  const FrequencySweep back2 = sweep_from_trace(cut, s.grid);
  for (int j = 0; j < s.grid.count; ++j) {
    const Real omega = s.grid.omega(j);
    const Real diff = (back2.values.col(j) - s.sweep.values.col(j)).cwiseAbs().maxCoeff();
    if (omega <= kcut)
      CHECK(diff < 1e-9 * scale);
    else
      CHECK(back2.values.col(j).cwiseAbs().maxCoeff() < 1e-9 * scale);
  }
}

TEST_CASE("parseval ratio is one for transform pairs") {
  const Setup s = make_setup();
  const TimeTrace trace = trace_from_sweep(s.sweep, s.grid.omega_max());
  const Real ratio = parseval_ratio(s.sweep, trace, s.dom.mesh.weights);
  CHECK(ratio == doctest::Approx(1.0).epsilon(1e-6));

  // omega^2-weighted form against the spectral time derivative
  const Real ratio_dt =
      parseval_ratio(s.sweep, trace, s.dom.mesh.weights,
                     std::numeric_limits<Real>::infinity(), true);
  CHECK(ratio_dt == doctest::Approx(1.0).epsilon(1e-6));

  // truncated-band bookkeeping stays exact
  const Real kcut = 0.4 * s.grid.omega_max();
  const TimeTrace cut = trace_from_sweep(s.sweep, kcut);
  CHECK(parseval_ratio(s.sweep, cut, s.dom.mesh.weights, kcut) ==
        doctest::Approx(1.0).epsilon(1e-6));

  // zero data is flagged as undefined
  FrequencySweep zero = s.sweep;
  zero.values.setZero();
  const TimeTrace ztrace = trace_from_sweep(zero, kcut);
  CHECK(std::isnan(parseval_ratio(zero, ztrace, s.dom.mesh.weights)));
}

TEST_CASE("huygens residual falls as the band grows") {
  const Setup s = make_setup();
  const Real D = s.dom.diameter;
  std::vector<Real> residuals;
  for (const Real frac : {0.25, 0.5, 1.0}) {
    const TimeTrace trace = trace_from_sweep(s.sweep, frac * s.grid.omega_max());
    residuals.push_back(huygens_residual(trace, s.dom.mesh.weights, D));
  }
  CHECK(residuals[1] < residuals[0]);
  CHECK(residuals[2] < residuals[1]);
}

TEST_CASE("synthesis at arbitrary times matches the uniform trace") {
  const Setup s = make_setup();
  const TimeTrace trace = trace_from_sweep(s.sweep, s.grid.omega_max());
  Eigen::VectorXd times(3);
  times << 0.0, 7 * trace.dt, 13 * trace.dt;
  const Eigen::MatrixXd vals = synthesize_at_times(s.sweep, s.grid.omega_max(), times);
  for (int q = 0; q < 3; ++q) {
    const int n = static_cast<int>(std::lround(times[q] / trace.dt));
    CHECK((vals.col(q) - trace.values.col(n)).cwiseAbs().maxCoeff() <
          1e-12 * trace.values.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("nonuniform or empty input rejected") {
  const Setup s = make_setup();
  FrequencySweep bad = s.sweep;
  bad.grid.count = 0;
  CHECK_THROWS(trace_from_sweep(bad, 1.0));
  TimeTrace empty;
  CHECK_THROWS(sweep_from_trace(empty, s.grid));
}
