#pragma once

#include "islab/domain.hpp"
#include "islab/source.hpp"

namespace islab {

/// Uniform wave-number grid on (0, omega_max]; omega_j = (j+1) * domega.
struct FrequencyGrid {
  Real domega = 0.0;
  int count = 0;

  Real omega(int j) const { return domega * (j + 1); }
  Real omega_max() const { return domega * count; }
  /// Index of the largest omega <= k (or -1).
  int truncation_index(Real k) const {
    const int j = static_cast<int>(std::floor(k / domega + 1e-9)) - 1;
    return std::min(j, count - 1);
  }
};

FrequencyGrid make_frequency_grid(Real omega_max, Real domega);

/// Dense boundary data u(x_i, omega_j). Rows are node-major with `arity`
/// components per node; negative frequencies are implied by conjugation.
struct FrequencySweep {
  FrequencyGrid grid;
  int arity = 1;
  Index nodes = 0;
  Eigen::MatrixXcd values;  // (nodes * arity) x count

  Complex value(Index node, int comp, int j) const {
    return values(node * arity + comp, j);
  }
};

/// Outgoing point kernel e^{ikr} / (4 pi r).
Complex green_helmholtz(Real r, Complex k);

/// Cartesian gradient of the kernel in x for d = x - y.
Vec3c green_helmholtz_grad(const Vec3& d, Complex k);

/// Boundary value of the radiating field of (f0, f1): midpoint quadrature of
/// (f1 + i k f0) against the kernel, weight h^3 per voxel.
Complex forward_field(const SourcePair& source, const Vec3& x, Complex k);

/// Gradient counterpart (exact kernel gradients, same quadrature).
Vec3c forward_field_grad(const SourcePair& source, const Vec3& x, Complex k);

FrequencySweep forward_sweep(const SourcePair& source, const BoundaryMesh& mesh,
                             const FrequencyGrid& grid);

}  // namespace islab
