#pragma once

#include <array>

#include "islab/source.hpp"

namespace islab {

/// Discrete H^s machinery. Fields supported in the domain are zero-padded
/// into a periodic cube of twice the grid extent; norms are read off the
/// discrete spectrum with the symbol (1 + |xi|^2)^(s/2). The normalization
/// makes s = 0 reproduce the plain L2 voxel sum.
class SobolevTransform {
 public:
  SobolevTransform(const Eigen::MatrixXd& fields, const VoxelGrid& grid,
                   int embed_factor = 2);
  SobolevTransform(const Eigen::MatrixXcd& fields, const VoxelGrid& grid,
                   int embed_factor = 2);

  /// (sum_xi (1+|xi|^2)^s |ghat|^2)^(1/2); s in [-1, 3].
  Real norm(Real s) const;

  Real embed_side() const { return embed_side_; }
  int embed_n() const { return n_; }

 private:
  void init(const Eigen::MatrixXcd& fields, const VoxelGrid& grid, int embed_factor);
  Eigen::VectorXd power_;   // |ghat|^2 summed over components
  Eigen::VectorXd xi_sq_;   // |xi|^2 per spectral bin
  Real scale_ = 1.0;        // h^3 / N^3
  Real embed_side_ = 0.0;
  int n_ = 0;
};

Real sobolev_norm(const Eigen::VectorXd& field, const VoxelGrid& grid, Real s);
Real sobolev_norm(const Eigen::MatrixXd& fields, const VoxelGrid& grid, Real s);

/// Norms of both source fields at the orders the stability functionals use,
/// plus the aggregate constants.
struct SourceNorms {
  // index i holds order s = i - 1, i.e. s in {-1, 0, 1, 2, 3}
  std::array<Real, 5> f0{};
  std::array<Real, 5> f1{};
  Real M0 = 0, M1 = 0, M2 = 0, M2e = 0, M3 = 0;

  static int order_index(int s) { return s + 1; }
  Real f0_norm(int s) const { return f0[static_cast<std::size_t>(order_index(s))]; }
  Real f1_norm(int s) const { return f1[static_cast<std::size_t>(order_index(s))]; }
};

SourceNorms compute_source_norms(const SourcePair& source);

namespace detail {
/// In-place forward DFT of an n^3 cube stored as i + n*(j + n*k).
void fft3(std::vector<Complex>& data, int n);
}

}  // namespace islab
