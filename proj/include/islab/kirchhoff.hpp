#pragma once

#include "islab/elastic.hpp"

namespace islab {

/// Smooth vector field sampled on a voxel grid (cells x 3).
struct SampledField {
  VoxelGrid grid;
  Eigen::MatrixXd values;
};

SampledField sample_field(const std::vector<Bump>& bumps, const VoxelGrid& grid);

/// Retarded volume potential
///   V(F)(x,t) = (cp^2 - cs^2)^-1 [ (cp - cs)/cs Int_{|x-y|<cs t} F dy
///              + Int_{cs t<|x-y|<cp t} (cp t - |x-y|)/|x-y| F dy ],
/// zero for t <= 0. The radial weight is continuous across both region
/// boundaries, so voxel sums stay differentiable in t up to O(h^2) kinks.
Vec3 kirchhoff_potential(const SampledField& f, const Vec3& x, Real t,
                         const ElasticParams& ep);

/// Spherical-means propagator of the elastodynamic system: the solution
/// with data (0, g) evaluated by quadrature over the fast and slow spheres
/// plus the near-field shell between them,
///   (K g)(x,t) = t/(4 pi) [ Oint_{cp t} nn^T g dS / (cp t)^2
///               + Oint_{cs t} (I - nn^T) g dS / (cs t)^2
///               + Int_{cs t < r < cp t} (3 nn^T - I) g / r^3 dy ].
/// g is evaluated analytically from the bump description.
Vec3 elastic_propagator(const std::vector<Bump>& g, const Vec3& x, Real t,
                        const ElasticParams& ep, int sphere_nodes = 1500,
                        int shell_layers = 48);

/// Pointwise solution of the elastodynamic initial value problem with data
/// (U, dU/dt)(0) = (f0, -f1):  U = d/dt (K f0) - K f1, the time derivative
/// by centered differences of spacing dt_fd. Independent of the volume
/// solvers; used to cross-validate them.
Vec3 kirchhoff_displacement(const std::vector<Bump>& f0, const std::vector<Bump>& f1,
                            const Vec3& x, Real t, const ElasticParams& ep,
                            Real dt_fd = 0.02, int sphere_nodes = 1500);

}  // namespace islab
