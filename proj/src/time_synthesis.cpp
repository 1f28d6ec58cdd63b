#include "islab/time_synthesis.hpp"

#include <cmath>

namespace islab {

namespace {

Real band_factor(Real omega, Real k_cut, bool taper) {
  if (omega > k_cut + 1e-12) return 0.0;
  if (!taper) return 1.0;
  const Real roll = 0.8 * k_cut;
  if (omega <= roll) return 1.0;
  return 0.5 * (1.0 + std::cos(kPi * (omega - roll) / (k_cut - roll)));
}

}  // namespace

TimeTrace trace_from_sweep(const FrequencySweep& sweep, Real k_cut, int oversample,
                           bool cosine_taper) {
  require(sweep.grid.count > 0 && sweep.grid.domega > 0, "trace_from_sweep: empty sweep");
  require(k_cut > 0, "trace_from_sweep: k_cut must be positive");
  const int m = sweep.grid.count;
  const Real domega = sweep.grid.domega;
  const Real period = 2.0 * kPi / domega;
  int nt = std::max(2, oversample) * (2 * m + 2);
  if (nt % 2) ++nt;
  const Real dt = period / nt;

  TimeTrace trace;
  trace.dt = dt;
  trace.arity = sweep.arity;
  trace.nodes = sweep.nodes;
  trace.values.setZero(sweep.values.rows(), nt);

  // U(t) = -(domega / pi) Re sum_j u_j e^{-i omega_j t}; the DC bin is zero.
  std::vector<Real> gain(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    gain[static_cast<std::size_t>(j)] = band_factor(sweep.grid.omega(j), k_cut, cosine_taper);

  const Real scale = -domega / kPi;
  parallel_for(0, sweep.values.rows(), [&](Index row) {
    for (int n = 0; n < nt; ++n) {
      const Real t = dt * n;
      Real acc = 0.0;
      for (int j = 0; j < m; ++j) {
        const Real g = gain[static_cast<std::size_t>(j)];
        if (g == 0.0) continue;
        const Real phase = sweep.grid.omega(j) * t;
        const Complex u = sweep.values(row, j);
        acc += g * (u.real() * std::cos(phase) + u.imag() * std::sin(phase));
      }
      trace.values(row, n) = scale * acc;
    }
  });
  return trace;
}

Eigen::MatrixXd synthesize_at_times(const FrequencySweep& sweep, Real k_cut,
                                    const Eigen::VectorXd& times) {
  const int m = sweep.grid.count;
  const Real scale = -sweep.grid.domega / kPi;
  Eigen::MatrixXd out(sweep.values.rows(), times.size());
  parallel_for(0, sweep.values.rows(), [&](Index row) {
    for (Index n = 0; n < times.size(); ++n) {
      Real acc = 0.0;
      for (int j = 0; j < m; ++j) {
        const Real omega = sweep.grid.omega(j);
        if (omega > k_cut + 1e-12) break;
        const Real phase = omega * times[n];
        const Complex u = sweep.values(row, j);
        acc += u.real() * std::cos(phase) + u.imag() * std::sin(phase);
      }
      out(row, n) = scale * acc;
    }
  });
  return out;
}

FrequencySweep sweep_from_trace(const TimeTrace& trace, const FrequencyGrid& grid) {
  require(trace.dt > 0 && trace.samples() > 1, "sweep_from_trace: empty trace");
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.arity = trace.arity;
  sweep.nodes = trace.nodes;
  sweep.values.setZero(trace.values.rows(), grid.count);
  const int nt = trace.samples();
  parallel_for(0, trace.values.rows(), [&](Index row) {
    for (int j = 0; j < grid.count; ++j) {
      const Real omega = grid.omega(j);
      Complex acc(0, 0);
      for (int n = 0; n < nt; ++n) {
        const Real phase = omega * trace.dt * n;
        acc += trace.values(row, n) * Complex(std::cos(phase), std::sin(phase));
      }
      sweep.values(row, j) = -trace.dt * acc;
    }
  });
  return sweep;
}

Real parseval_ratio(const FrequencySweep& sweep, const TimeTrace& trace,
                    const Eigen::VectorXd& weights, Real k_cut,
                    bool use_time_derivative) {
  require(weights.size() == sweep.nodes, "parseval_ratio: weight count mismatch");
  require(sweep.nodes == trace.nodes && sweep.arity == trace.arity,
          "parseval_ratio: sweep and trace grids do not match");

  Real num = 0.0;
  for (int j = 0; j < sweep.grid.count; ++j) {
    const Real omega = sweep.grid.omega(j);
    if (omega > k_cut + 1e-12) break;
    const Real wfreq = use_time_derivative ? omega * omega : 1.0;
    Real shell = 0.0;
    for (Index node = 0; node < sweep.nodes; ++node) {
      Real acc = 0.0;
      for (int c = 0; c < sweep.arity; ++c)
        acc += std::norm(sweep.values(node * sweep.arity + c, j));
      shell += weights[node] * acc;
    }
    num += wfreq * shell;
  }
  num *= 2.0 * sweep.grid.domega;  // both symmetric bins

  Eigen::MatrixXd tvals;
  if (use_time_derivative) {
    // spectral derivative of the synthesized trace
    FrequencySweep dsweep = sweep;
    for (int j = 0; j < sweep.grid.count; ++j)
      dsweep.values.col(j) *= Complex(0, -sweep.grid.omega(j));
    Eigen::VectorXd times(trace.samples());
    for (int n = 0; n < trace.samples(); ++n) times[n] = trace.dt * n;
    tvals = synthesize_at_times(dsweep, k_cut, times);
  } else {
    tvals = trace.values;
  }
  Real den = 0.0;
  for (Index node = 0; node < trace.nodes; ++node) {
    Real acc = 0.0;
    for (int c = 0; c < trace.arity; ++c)
      acc += tvals.row(node * trace.arity + c).squaredNorm();
    den += weights[node] * acc;
  }
  den *= 2.0 * kPi * trace.dt;

  if (num == 0.0 && den == 0.0) return std::numeric_limits<Real>::quiet_NaN();
  return num / den;
}

Real huygens_residual(const TimeTrace& trace, const Eigen::VectorXd& weights,
                      Real t_after) {
  require(weights.size() == trace.nodes, "huygens_residual: weight count mismatch");
  Real tail = 0.0, total = 0.0;
  for (int n = 0; n < trace.samples(); ++n) {
    const Real t = trace.dt * n;
    Real shell = 0.0;
    for (Index node = 0; node < trace.nodes; ++node) {
      Real acc = 0.0;
      for (int c = 0; c < trace.arity; ++c) {
        const Real v = trace.values(node * trace.arity + c, n);
        acc += v * v;
      }
      shell += weights[node] * acc;
    }
    total += shell;
    if (t > t_after) tail += shell;
  }
  if (total == 0.0) return 0.0;
  return std::sqrt(tail / total);
}

}  // namespace islab
