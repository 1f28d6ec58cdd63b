#pragma once

#include "islab/helmholtz.hpp"

namespace islab {

/// Real boundary history U(x_i, t_n) on a uniform time grid starting at 0.
/// Traces synthesized from a sweep cover one full period 2 pi / domega of
/// the discrete transform pairing.
struct TimeTrace {
  Eigen::MatrixXd values;  // (nodes * arity) x nt
  Real dt = 0.0;
  int arity = 1;
  Index nodes = 0;

  int samples() const { return static_cast<int>(values.cols()); }
  Real t_end() const { return dt * (samples() - 1); }
};

/// Scale tying the radiating frequency-domain field to the unitary
/// transform of the causal time-domain field: u = kDualityScale * F[U].
/// Equivalently u(x, omega) = -Integral U(x, t) e^{i omega t} dt.
inline const Real kDualityScale = -std::sqrt(2.0 * kPi);

/// Inverse synthesis of the conjugate-symmetric extension, hard-truncated
/// at k_cut (cosine roll-off over the top 20% of the band when requested).
/// The time grid is the exact transform pair of the frequency grid, so a
/// forward transform recovers the sweep at interior bins to roundoff.
TimeTrace trace_from_sweep(const FrequencySweep& sweep, Real k_cut,
                           int oversample = 2, bool cosine_taper = false);

/// Synthesis sampled at arbitrary times (used to feed solvers without
/// time interpolation).
Eigen::MatrixXd synthesize_at_times(const FrequencySweep& sweep, Real k_cut,
                                    const Eigen::VectorXd& times);

/// Forward map of a uniform trace onto the given frequency grid.
FrequencySweep sweep_from_trace(const TimeTrace& trace, const FrequencyGrid& grid);

/// Weighted spectral-to-time energy ratio; 1 within roundoff for transform
/// pairs. NaN for identically zero data. With use_time_derivative the
/// comparison is between omega^2-weighted spectra and the spectral time
/// derivative of the trace.
Real parseval_ratio(const FrequencySweep& sweep, const TimeTrace& trace,
                    const Eigen::VectorXd& weights,
                    Real k_cut = std::numeric_limits<Real>::infinity(),
                    bool use_time_derivative = false);

/// || U ||_{L2(t > t_after)} / || U ||_{L2}, node-weighted.
Real huygens_residual(const TimeTrace& trace, const Eigen::VectorXd& weights,
                      Real t_after);

}  // namespace islab
