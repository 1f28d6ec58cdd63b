#pragma once

#include <array>

#include "islab/helmholtz.hpp"

namespace islab {

struct ElasticParams {
  Real lambda = 1.0;
  Real mu = 1.0;
  Real rho = 1.0;

  Real cp() const { return std::sqrt((lambda + 2.0 * mu) / rho); }
  Real cs() const { return std::sqrt(mu / rho); }
  void validate() const {
    require(mu > 0.0 && lambda + mu > 0.0 && rho > 0.0,
            "elastic parameters violate ellipticity");
  }
};

namespace detail {
/// Remainder functions of the exponential series, entire in z:
///   E_0(z) = (e^z - 1 - z) / z^2,  E_n = d^n E_0 / dz^n.
/// Small |z| uses the power series (terms below 1e-18 dropped), large |z|
/// the closed forms; the switch radius keeps both branches stable.
Complex exp_rem2(Complex z, int deriv);
}  // namespace detail

/// (e^{ikr/cs} - e^{ikr/cp} - ik(1/cs - 1/cp) r) / k^2, the entire-in-k
/// regularization of the fundamental-matrix bracket. Limit at k = 0 is
/// -r^2 (cs^-2 - cp^-2) / 2.
Complex phi_regularized_bracket(Real r, Complex k, const ElasticParams& ep);

/// Radial form Phi = a(r) I + b(r) xhat xhat^T together with the radial
/// derivatives of the coefficients (needed for kernel gradients).
struct PhiRadial {
  Complex a, b;
  Complex da, db;
};

PhiRadial phi_radial(Real r, Complex k, const ElasticParams& ep);

/// Fundamental matrix of the radiating Lame system at x - y = d.
Mat3c phi_matrix(const Vec3& d, Complex k, const ElasticParams& ep);

/// grad[l] = partial_l Phi (3x3 each).
std::array<Mat3c, 3> phi_matrix_grad(const Vec3& d, Complex k, const ElasticParams& ep);

/// Boundary value of the radiating elastic field: midpoint quadrature of
/// Phi(x - y) (f1 + i k f0).
Vec3c forward_field_elastic(const SourcePair& source, const Vec3& x, Complex k,
                            const ElasticParams& ep);

/// d(u_j)/d(x_l) by exact kernel gradients, for tangential-trace functionals.
Mat3c forward_field_elastic_grad(const SourcePair& source, const Vec3& x, Complex k,
                                 const ElasticParams& ep);

/// Second evaluation route for twice differentiable sources: the Hessian is
/// moved onto the source, leaving the scalar regularized kernel against
/// grad div f. Used as a cross-check of the direct quadrature.
class ElasticIbpEvaluator {
 public:
  ElasticIbpEvaluator(const SourcePair& source, const ElasticParams& ep);
  Vec3c operator()(const Vec3& x, Complex k) const;

 private:
  VoxelGrid grid_;
  ElasticParams ep_;
  Eigen::MatrixXd f0_, f1_;            // cells x 3
  Eigen::MatrixXd graddiv0_, graddiv1_;  // centered differences, cells x 3
};

/// Validates the smoothness contract (Gaussian bumps or Power bumps with
/// exponent >= 2) before building the evaluator.
Vec3c forward_field_elastic_ibp(const SourcePair& source, const SourceSpec& described_by,
                                const Vec3& x, Complex k, const ElasticParams& ep);

FrequencySweep forward_sweep_elastic(const SourcePair& source, const BoundaryMesh& mesh,
                                     const FrequencyGrid& grid, const ElasticParams& ep);

}  // namespace islab
