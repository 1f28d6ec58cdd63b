#pragma once

#include <iosfwd>
#include <string>

#include "islab/fdtd.hpp"
#include "islab/kirchhoff.hpp"
#include "islab/spectral.hpp"

namespace islab {

enum class PhysicsKind { Scalar, Elastic };

/// Batch configuration; everything an experiment needs is in here so runs
/// are reproducible from the file alone.
struct ExperimentConfig {
  PhysicsKind physics = PhysicsKind::Scalar;
  ElasticParams elastic;

  ShapeSpec shape = ShapeSpec::ball(Vec3::Zero(), 1.0);
  int grid_cells = 48;       // reconstruction grid across the domain box
  int refined_grid_cells = 0;  // optional refinement stage
  int mesh_nodes = 1500;

  SourceSpec source;

  Real omega_max = 0.0;      // band (0, omega_max]
  Real domega = 0.0;         // 0 selects pi / (4 D / c_min)

  std::vector<Real> k_ladder;  // empty selects {2,4,8,16,32} / D
  Real epsilon_target = 1e-2;
  Real normalize_eps0 = 0.5;   // full-band data norm after source scaling

  int fdtd_box_cells = 64;
  Real cfl = 0.9;

  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int threads = 0;

  Real c_min() const {
    return physics == PhysicsKind::Elastic ? elastic.cs() : 1.0;
  }
  Real c_max() const {
    return physics == PhysicsKind::Elastic ? elastic.cp() : 1.0;
  }
  void validate() const;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig from_json_text(const std::string& text);
  /// Canonical serialization; losslessly round-trips through from_json_text
  /// and is the byte string the config hash covers.
  std::string canonical_json() const;
  std::string hash() const;
};

struct ReportRow {
  Real K = 0;
  Real epsilon = 0;   // sqrt of the value functional of the noisy data at K
  Real E = 0;         // -ln epsilon (NaN when epsilon >= 1)
  Real k_trunc = 0;
  Real err_l2_f0 = 0, err_hm1_f1 = 0, err_h1_f0 = 0, err_l2_f1 = 0;  // relative
  Real ceiling = 0;   // calibrated theorem right-hand side (absolute)
  Real lhs_sq = 0;    // measured |df0|_0^2 + |df1|_-1^2 (absolute)
  Real wall_s = 0;
  bool ok = true;
  std::string note;
};

struct ExperimentReport {
  std::string config_hash;
  std::string version;
  std::string physics;
  Real diameter = 0;
  Real epsilon_target = 0;
  Real noise_floor_rel = 0;      // pure-noise reconstruction norm, relative
  Real noiseless_floor_rel = 0;  // noiseless full-band error at the top K
  Real plateau_floor_rel = 0;    // max of the two, the plateau reference
  Real calibrated_ceiling_c = 0;
  Real m1 = 0, m2e = 0;       // a priori norms entering the ceilings
  std::vector<ReportRow> rows;
};

/// Complex Gaussian perturbation, conjugate-symmetric by construction and
/// rescaled so its full-band value functional equals eps_target exactly.
FrequencySweep add_noise(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                         Real eps_target, std::uint64_t seed);

/// Prepared forward problem: domain, rasterized (normalized) source, norms,
/// full-band sweep. Shared by the pipeline stages.
struct ForwardData {
  Domain domain;
  SourcePair source;
  SourceNorms norms;
  FrequencyGrid grid;
  FrequencySweep sweep;
  Real normalization = 1.0;  // factor applied to the source description
};

ForwardData prepare_forward(const ExperimentConfig& config);

/// Backward reconstruction from (possibly noisy) boundary data truncated at
/// k_cut; returns fields on the domain grid.
BackwardResult reconstruct(const ExperimentConfig& config, const Domain& domain,
                           const FrequencySweep& data, Real k_cut);

struct ReconstructionErrors {
  Real l2_f0 = 0, h1_f0 = 0, hm1_f1 = 0, l2_f1 = 0;  // relative
  Real lhs_sq = 0;                                   // absolute pairing
};

ReconstructionErrors reconstruction_errors(const Domain& domain, const SourcePair& truth,
                                           const SourceNorms& truth_norms,
                                           const BackwardResult& rec);

/// End-to-end K ladder: noise injection, truncation, synthesis, backward
/// solve, error norms, theorem ceilings.
ExperimentReport run_sweep(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// bound-verification suites
// ---------------------------------------------------------------------------

struct BoundCheckRow {
  std::string functional;
  Real k_re = 0, k_im = 0;
  Real value = 0;   // |I|
  Real bound = 0;
  Real ratio = 0;   // value / bound
  bool pass = false;
};

struct BoundSuiteResult {
  std::vector<BoundCheckRow> rows;
  bool all_pass = true;
  Real elastic_c = 0;  // calibrated constant used for the elastic rows
};

/// Lemma-style sector checks at pseudo-random sector points, the harmonic
/// measure Monte Carlo against the closed-form lower bound, and the
/// continuation bound at real k > K.
BoundSuiteResult verify_bounds_suite(const ExperimentConfig& config,
                                     int points_per_functional = 100,
                                     std::uint64_t wos_walks = 100000);

struct DualityResult {
  Real rel_l2_midband = 0;  // trace-transform vs quadrature sweep
  Real tolerance = 0;
  bool pass = false;
};

DualityResult check_duality(const ExperimentConfig& config);

struct HuygensResult {
  Real trace_residual = 0;      // after D / c_min
  Real cone_leak = 0;           // elastic only: sup outside the fast cone
  Real trace_tolerance = 0;
  Real cone_tolerance = 0;
  bool pass = false;
};

HuygensResult check_huygens(const ExperimentConfig& config);

}  // namespace islab
