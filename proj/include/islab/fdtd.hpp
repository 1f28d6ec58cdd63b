#pragma once

#include "islab/elastic.hpp"
#include "islab/time_synthesis.hpp"

namespace islab {

/// Trilinear sample of a cell-centered field; clamps to the grid interior.
Real sample_trilinear(const Eigen::VectorXd& field, const VoxelGrid& grid, const Vec3& p);

/// Bump sums evaluated at every cell center (component `comp` of the
/// amplitude), without any support mask.
Eigen::VectorXd rasterize_bumps_on_grid(const std::vector<Bump>& bumps,
                                        const VoxelGrid& grid, int comp);

// ---------------------------------------------------------------------------
// scalar wave equation, second-order leapfrog on a cell-centered cube
// ---------------------------------------------------------------------------

class ScalarLeapfrog {
 public:
  ScalarLeapfrog(const VoxelGrid& box, Real c, Real dt);

  /// State (U, dU/dt) = (f0, -f1) at t = 0; performs the Taylor first step.
  void set_initial(const Eigen::VectorXd& f0, const Eigen::VectorXd& f1);

  void step();
  /// Swaps the two stored levels so subsequent steps run backward in time.
  void reverse();

  const Eigen::VectorXd& current() const { return cur_; }
  const Eigen::VectorXd& previous() const { return prev_; }
  Eigen::VectorXd& mutable_current() { return cur_; }
  Real dt() const { return dt_; }
  const VoxelGrid& box() const { return box_; }

  /// Leapfrog-compatible discrete energy, conserved to roundoff while the
  /// field stays away from the box walls.
  Real discrete_energy() const;

  /// Compact 7-point Laplacian on interior cells (exposed for the exact
  /// initial-velocity inversion in reversal harnesses).
  void apply_laplacian(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    laplacian(in, out);
  }

 private:
  void laplacian(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;
  VoxelGrid box_;
  Real c_, dt_;
  Eigen::VectorXd prev_, cur_, scratch_;
};

class ElasticLeapfrog {
 public:
  ElasticLeapfrog(const VoxelGrid& box, const ElasticParams& ep, Real dt);

  void set_initial(const Eigen::MatrixXd& f0, const Eigen::MatrixXd& f1);
  void step();
  void reverse();

  const Eigen::MatrixXd& current() const { return cur_; }
  const Eigen::MatrixXd& previous() const { return prev_; }
  Eigen::MatrixXd& mutable_current() { return cur_; }
  Real dt() const { return dt_; }
  const VoxelGrid& box() const { return box_; }
  Real discrete_energy() const;

  /// Centered-difference divergence and curl of the current level.
  Eigen::VectorXd divergence() const;
  Eigen::MatrixXd curl() const;

  /// mu Lap + (lambda + mu) grad div with the scheme's stencils.
  void apply_lame_operator(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const {
    apply_operator(in, out);
  }

 private:
  void apply_operator(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const;
  VoxelGrid box_;
  ElasticParams ep_;
  Real dt_;
  Eigen::MatrixXd prev_, cur_, scratch_;
  mutable Eigen::VectorXd div_scratch_;
};

// ---------------------------------------------------------------------------
// free-space forward drivers
// ---------------------------------------------------------------------------

struct FdtdConfig {
  int box_cells = 64;          // cells per axis
  Real box_half_width = 0.0;   // box is centered on the domain center
  Real cfl = 0.9;              // dt = cfl * h / (sqrt(3) c_max)
  Real t_end = 0.0;
  std::vector<Real> snapshot_times;
  bool record_energy = false;
};

struct FdtdResult {
  TimeTrace trace;                        // sampled at the mesh nodes
  std::vector<Eigen::MatrixXd> snapshots; // cells x arity
  std::vector<Real> snapshot_times;
  VoxelGrid box;
  std::vector<Real> energy;               // per step when recorded
};

/// Propagates (f0, -f1) initial data in free space and records the
/// boundary-mesh trace. The box must contain the c_max * t_end light cone
/// of the bump supports; violations are rejected up front.
FdtdResult fdtd_scalar_forward(const std::vector<Bump>& f0, const std::vector<Bump>& f1,
                               const BoundaryMesh& mesh, const Vec3& box_center,
                               const FdtdConfig& config);

FdtdResult fdtd_elastic_forward(const std::vector<Bump>& f0, const std::vector<Bump>& f1,
                                const ElasticParams& ep, const BoundaryMesh& mesh,
                                const Vec3& box_center, const FdtdConfig& config);

// ---------------------------------------------------------------------------
// backward Dirichlet solves on the domain grid
// ---------------------------------------------------------------------------

/// Grid cells receiving Dirichlet injection (inside cells whose stencil
/// reaches outside) and the interior update set. For the elastic solver the
/// wide grad-div composition needs two cells of clearance; cells with only
/// one cell of clearance form a fringe updated with the compact-diagonal
/// variant of the operator, keeping the injected (biased) ring one cell
/// thick.
struct BackwardStencil {
  std::vector<Index> interior;
  std::vector<Index> fringe;
  std::vector<Index> injection;
  std::vector<Vec3> injection_points;  // cell centers projected to the boundary
};

BackwardStencil classify_backward_cells(const Domain& domain, bool elastic);

/// Inverse-distance interpolation weights from boundary-mesh nodes to the
/// injection points (k nearest nodes each).
struct SurfaceInterp {
  Eigen::MatrixXd weights;   // points x k
  Eigen::MatrixXi neighbors; // points x k
};

SurfaceInterp build_surface_interp(const BoundaryMesh& mesh,
                                   const std::vector<Vec3>& points, int k = 4);

struct BackwardResult {
  Eigen::MatrixXd f0;  // cells x arity on the domain grid
  Eigen::MatrixXd f1;
  Real dt = 0.0;
  int steps = 0;
};

/// Solves the wave equation backward from a zero state at t_end with the
/// injected Dirichlet history, and reads off (U, -dU/dt) at t = 0.
/// `injected` has one row per injection cell and steps+2 columns; column n
/// holds the value at t = n dt (the extra column past t_end is unused
/// padding so callers can share series layouts).
BackwardResult fdtd_scalar_backward(const Domain& domain, const BackwardStencil& cells,
                                    const Eigen::MatrixXd& injected, Real dt, int steps);

BackwardResult fdtd_elastic_backward(const Domain& domain, const ElasticParams& ep,
                                     const BackwardStencil& cells,
                                     const Eigen::MatrixXd& injected, Real dt, int steps);

// ---------------------------------------------------------------------------
// wavefront diagnostics
// ---------------------------------------------------------------------------

struct SpeedEstimate {
  Real pressure = 0.0;  // from the divergence channel
  Real shear = 0.0;     // from the curl channel
};

/// Tracks the outermost shell-profile peak of |div U| and |curl U| (above a
/// fraction of the global peak) and regresses front radius against time.
SpeedEstimate curl_div_probe(const std::vector<Eigen::MatrixXd>& snapshots,
                             const std::vector<Real>& times, const VoxelGrid& box,
                             const Vec3& origin, Real threshold = 0.05);

}  // namespace islab
