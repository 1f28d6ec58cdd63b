#pragma once

#include <optional>

#include "islab/elastic.hpp"
#include "islab/sobolev.hpp"

namespace islab {

/// Weight applied inside the band functionals: plain |u|^2, omega^2 |u|^2,
/// or the tangential-gradient product.
enum class BandWeight { Value, Omega2, Tangential };

/// Membership test for the quarter-plane sector |arg k| < pi/4.
struct SectorPoint {
  Complex k;
  bool inside() const { return k.real() > 0.0 && std::abs(k.imag()) < k.real(); }
};

/// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

// ---------------------------------------------------------------------------
// band functionals
// ---------------------------------------------------------------------------

/// Band functional of a stored sweep for real 0 < k <= omega_max: the
/// doubled trapezoid of the weighted squared surface norm over [0, k].
/// Tangential weight expects `sweep` to hold Cartesian gradients (arity 3
/// per scalar component) and projects out the normal direction per node.
Real band_functional_sweep(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                           BandWeight weight, Real k);

/// Line-integral evaluation along the segment 0 -> k (complex k allowed),
/// Gauss-Legendre in the segment parameter, fresh forward evaluations at
/// +/- omega. Entire in k.
Complex band_functional_path(const SourcePair& source, const BoundaryMesh& mesh,
                             BandWeight weight, Complex k, int gl_nodes = 64);

Complex band_functional_path_elastic(const SourcePair& source, const BoundaryMesh& mesh,
                                     BandWeight weight, Complex k, const ElasticParams& ep,
                                     int gl_nodes = 64);

/// Doubled trapezoid of the weighted spectrum over [k, omega_max]; requires
/// omega_max >= 4 k.
Real tail_integral(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                   BandWeight weight, Real k);

/// Cartesian-gradient sweeps backing the Tangential weight (arity 3 and 9).
FrequencySweep forward_grad_sweep(const SourcePair& source, const BoundaryMesh& mesh,
                                  const FrequencyGrid& grid);
FrequencySweep forward_grad_sweep_elastic(const SourcePair& source, const BoundaryMesh& mesh,
                                          const FrequencyGrid& grid, const ElasticParams& ep);

// ---------------------------------------------------------------------------
// explicit sector bounds
// ---------------------------------------------------------------------------

/// 8 pi |dOmega| D (|k|^a ||f1||^2 + |k|^b / b ||f0||^2) e^{2 D |k2|} with
/// the order pattern of the three functionals.
Real sector_bound_scalar(BandWeight weight, Complex k, const SourceNorms& norms,
                         Real boundary_area, Real diameter);

/// Elastic counterpart with H2/H3 norms, exponent 2 D |k2| / cs, and a
/// calibrated leading constant.
Real sector_bound_elastic(BandWeight weight, Complex k, const SourceNorms& norms,
                          const ElasticParams& ep, Real diameter, Real calibrated_c);

// ---------------------------------------------------------------------------
// harmonic measure of [0, K] in the slit sector
// ---------------------------------------------------------------------------

/// 1/2 below 2^{1/4} K, else (1/pi) ((k/K)^4 - 1)^{-1/2}.
Real slit_measure_lower(Real k, Real K);

struct WosEstimate {
  Real value = 0.0;
  Real std_error = 0.0;
  std::uint64_t walks = 0;
};

/// Walk-on-spheres estimate: Brownian paths absorbed on the slit (success)
/// or the sector rays (failure). Counter-based per-walk seeding makes the
/// result independent of scheduling.
WosEstimate slit_measure_wos(Complex start, Real K, std::uint64_t n_walks,
                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// truncation rule and continuation bound
// ---------------------------------------------------------------------------

/// K^{2/3} E^{1/4} when 2^{1/4} K^{1/3} < E^{1/4}, else K.
Real truncation_wavenumber(Real K, Real E);

/// log of C e^{2(D+1)k} eps^{2 mu(k)} M^2 (mu from the lower bound); the
/// plain value overflows for large k D, so comparisons run in logs.
Real continuation_bound_log(Real k, Real K, Real eps, Real m_norm_sq, Real diameter,
                            Real calibrated_c);
Real continuation_bound(Real k, Real K, Real eps, Real m_norm_sq, Real diameter,
                        Real calibrated_c);

// ---------------------------------------------------------------------------
// data norms
// ---------------------------------------------------------------------------

struct DataNorms {
  Real eps0_sq = 0.0;              // value functional at K
  Real i1 = 0.0, i2 = 0.0;         // omega^2 and tangential pieces at K
  Real eps1_sq = 0.0;              // i1 + i2
  Real eps1_full_sq = 0.0;         // i1 + i2 + eps0_sq (full H1 trace form)
  std::optional<Real> E0, E1;      // -log eps, present only when eps < 1
};

/// grad_sweep may be empty (nodes == 0); the tangential pieces are skipped.
DataNorms compute_data_norms(const FrequencySweep& value_sweep,
                             const FrequencySweep& grad_sweep, const BoundaryMesh& mesh,
                             Real K);

}  // namespace islab
