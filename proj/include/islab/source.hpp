#pragma once

#include <vector>

#include "islab/domain.hpp"

namespace islab {

enum class BumpKind {
  Gaussian,  // amp * exp(-r^2 / (2 sigma^2)), truncated at cut_radius
  Power,     // amp * (1 - (r/a)^2)^p inside radius a, zero outside
};

/// Analytic radial bump. `amplitude` carries one entry per field component;
/// scalar sources use amplitude[0] only.
struct Bump {
  BumpKind kind = BumpKind::Gaussian;
  Vec3 center = Vec3::Zero();
  Real width = 0.2;        // sigma for Gaussian, support radius for Power
  Real exponent = 1.0;     // Power only
  Real cut_radius = 0.0;   // Gaussian truncation; 0 means 4*sigma
  Vec3 amplitude = Vec3::UnitX();

  Real support_radius() const;
  Real profile(Real r) const;  // radial factor
};

struct SourceSpec {
  int arity = 1;  // 1 scalar, 3 elastic
  std::vector<Bump> f0;
  std::vector<Bump> f1;
};

/// Voxelized source pair on the domain grid. Fields are identically zero
/// outside the support mask (interior cells with standoff clearance).
struct SourcePair {
  VoxelGrid grid;
  int arity = 1;
  Eigen::MatrixXd f0;  // cells x arity
  Eigen::MatrixXd f1;
  std::vector<char> mask;

  Index cells() const { return grid.cells(); }
  bool is_zero() const;
};

/// Pointwise analytic evaluation of a bump sum (one component set per call).
Vec3 evaluate_bumps(const std::vector<Bump>& bumps, const Vec3& x);

/// Rasterizes the description onto the domain grid. Throws if any bump
/// support gets closer to the boundary than the standoff margin.
SourcePair rasterize_source(const SourceSpec& spec, const Domain& domain);

void scale_source(SourcePair& source, Real factor);

}  // namespace islab
