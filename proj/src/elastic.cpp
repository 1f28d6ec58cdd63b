#include "islab/elastic.hpp"

#include <cmath>

namespace islab {

namespace detail {

namespace {

Complex exp_rem2_series(Complex z, int n) {
  // E_n(z) = sum_{j>=0} ((j+n)! / j!) z^j / (j+n+2)!
  Complex term = 1.0;
  for (int f = 1; f <= n + 2; ++f) term /= Real(f);
  for (int f = 2; f <= n; ++f) term *= Real(f);  // n! / (n+2)!
  Complex acc = term;
  for (int j = 0; j < 80; ++j) {
    term *= z * Real(j + n + 1) / (Real(j + 1) * Real(j + n + 3));
    acc += term;
    if (std::abs(term) < 1e-18) break;
  }
  return acc;
}

Complex exp_rem2_direct(Complex z, int n) {
  const Complex ez = std::exp(z);
  const Complex z2 = z * z;
  switch (n) {
    case 0:
      return (ez - 1.0 - z) / z2;
    case 1:
      return (ez * (z - 2.0) + z + 2.0) / (z2 * z);
    case 2:
      return (ez * (z2 - 4.0 * z + 6.0) - 2.0 * z - 6.0) / (z2 * z2);
    case 3:
      return (ez * (z2 * z - 6.0 * z2 + 18.0 * z - 24.0) + 6.0 * z + 24.0) /
             (z2 * z2 * z);
  }
  throw std::invalid_argument("exp_rem2: derivative order out of range");
}

}  // namespace

Complex exp_rem2(Complex z, int deriv) {
  require(deriv >= 0 && deriv <= 3, "exp_rem2: derivative order out of range");
  // The direct form of E_0 is stable down to |z| ~ 1e-2; the higher
  // derivatives cancel more strongly and switch later.
  const Real sw = deriv == 0 ? 1e-2 : 0.9;
  if (std::abs(z) < sw) return exp_rem2_series(z, deriv);
  return exp_rem2_direct(z, deriv);
}

}  // namespace detail

Complex phi_regularized_bracket(Real r, Complex k, const ElasticParams& ep) {
  require(r > 0.0, "phi_regularized_bracket: r must be positive");
  const Real cs = ep.cs(), cp = ep.cp();
  const Complex ikr = Complex(0, 1) * k * r;
  const Complex g0 = detail::exp_rem2(ikr / cs, 0) / (cs * cs) -
                     detail::exp_rem2(ikr / cp, 0) / (cp * cp);
  return -r * r * g0;
}

namespace {

struct KernelStack {
  Complex a, b, da, db;
};

KernelStack kernel_stack(Real r, Complex k, const ElasticParams& ep, bool with_grad) {
  const Real cs = ep.cs(), cp = ep.cp();
  const Complex ik = Complex(0, 1) * k;
  const Complex zs = ik * r / cs;
  const Complex zp = ik * r / cp;

  const Complex g0 = detail::exp_rem2(zs, 0) / (cs * cs) - detail::exp_rem2(zp, 0) / (cp * cp);
  const Complex g1 = ik * (detail::exp_rem2(zs, 1) / (cs * cs * cs) -
                           detail::exp_rem2(zp, 1) / (cp * cp * cp));
  const Complex g2 = ik * ik * (detail::exp_rem2(zs, 2) / (cs * cs * cs * cs) -
                                detail::exp_rem2(zp, 2) / (cp * cp * cp * cp));

  // q(r) = -r g0(r) / (4 pi); the Hessian of q is the regularized part of Phi
  const Real c4pi = 1.0 / (4.0 * kPi);
  const Complex q1 = -(g0 + r * g1) * c4pi;
  const Complex q2 = -(2.0 * g1 + r * g2) * c4pi;

  const Complex gs = std::exp(zs) / (4.0 * kPi * cs * cs * r);

  KernelStack st;
  st.a = gs + q1 / r;
  st.b = q2 - q1 / r;
  st.da = Complex(0, 0);
  st.db = Complex(0, 0);
  if (with_grad) {
    const Complex g3 = ik * ik * ik *
                       (detail::exp_rem2(zs, 3) / (cs * cs * cs * cs * cs) -
                        detail::exp_rem2(zp, 3) / (cp * cp * cp * cp * cp));
    const Complex q3 = -(3.0 * g2 + r * g3) * c4pi;
    const Complex dgs = gs * (ik / cs - 1.0 / r);
    st.da = dgs + q2 / r - q1 / (r * r);
    st.db = q3 - q2 / r + q1 / (r * r);
  }
  return st;
}

}  // namespace

PhiRadial phi_radial(Real r, Complex k, const ElasticParams& ep) {
  require(r > 0.0, "phi_radial: r must be positive");
  ep.validate();
  const KernelStack st = kernel_stack(r, k, ep, true);
  return PhiRadial{st.a, st.b, st.da, st.db};
}

Mat3c phi_matrix(const Vec3& d, Complex k, const ElasticParams& ep) {
  const Real r = d.norm();
  require(r > 0.0, "phi_matrix: x - y must be nonzero");
  const KernelStack st = kernel_stack(r, k, ep, false);
  const Vec3 u = d / r;
  Mat3c phi = st.a * Mat3c::Identity();
  phi += st.b * (u * u.transpose()).cast<Complex>();
  return phi;
}

std::array<Mat3c, 3> phi_matrix_grad(const Vec3& d, Complex k, const ElasticParams& ep) {
  const Real r = d.norm();
  require(r > 0.0, "phi_matrix_grad: x - y must be nonzero");
  const KernelStack st = kernel_stack(r, k, ep, true);
  const Vec3 u = d / r;
  std::array<Mat3c, 3> grad;
  for (int l = 0; l < 3; ++l) {
    Mat3c m = (st.da * u[l]) * Mat3c::Identity();
    for (int j = 0; j < 3; ++j)
      for (int mcol = 0; mcol < 3; ++mcol) {
        Complex v = st.db * u[l] * u[j] * u[mcol];
        Real geom = -2.0 * u[l] * u[j] * u[mcol];
        if (l == j) geom += u[mcol];
        if (l == mcol) geom += u[j];
        v += st.b * geom / r;
        m(j, mcol) += v;
      }
    grad[static_cast<std::size_t>(l)] = m;
  }
  return grad;
}

Vec3c forward_field_elastic(const SourcePair& source, const Vec3& x, Complex k,
                            const ElasticParams& ep) {
  require(source.arity == 3, "forward_field_elastic: expects a vector source");
  ep.validate();
  const Index cells = source.cells();
  const Complex ik = Complex(0, 1) * k;
  Vec3c acc = Vec3c::Zero();
  for (Index c = 0; c < cells; ++c) {
    const Vec3 a0 = source.f0.row(c);
    const Vec3 a1 = source.f1.row(c);
    if (a0.isZero(0.0) && a1.isZero(0.0)) continue;
    const Vec3c fy = a1.cast<Complex>() + ik * a0.cast<Complex>();
    acc += phi_matrix(x - source.grid.center(c), k, ep) * fy;
  }
  return acc * source.grid.cell_volume();
}

Mat3c forward_field_elastic_grad(const SourcePair& source, const Vec3& x, Complex k,
                                 const ElasticParams& ep) {
  require(source.arity == 3, "forward_field_elastic_grad: expects a vector source");
  const Index cells = source.cells();
  const Complex ik = Complex(0, 1) * k;
  Mat3c acc = Mat3c::Zero();  // acc(j, l) = d u_j / d x_l
  for (Index c = 0; c < cells; ++c) {
    const Vec3 a0 = source.f0.row(c);
    const Vec3 a1 = source.f1.row(c);
    if (a0.isZero(0.0) && a1.isZero(0.0)) continue;
    const Vec3c fy = a1.cast<Complex>() + ik * a0.cast<Complex>();
    const auto grad = phi_matrix_grad(x - source.grid.center(c), k, ep);
    for (int l = 0; l < 3; ++l) acc.col(l) += grad[static_cast<std::size_t>(l)] * fy;
  }
  return acc * source.grid.cell_volume();
}

namespace {

// Centered-difference grad(div f) on the voxel grid, zero outside.
Eigen::MatrixXd grad_div_field(const Eigen::MatrixXd& f, const VoxelGrid& grid) {
  const Index cells = grid.cells();
  Eigen::VectorXd div = Eigen::VectorXd::Zero(cells);
  const Real inv2h = 1.0 / (2.0 * grid.h);
  const auto at = [&](const Eigen::MatrixXd& fld, int i, int j, int k, int comp) -> Real {
    if (i < 0 || j < 0 || k < 0 || i >= grid.n[0] || j >= grid.n[1] || k >= grid.n[2])
      return 0.0;
    return fld(grid.flat(i, j, k), comp);
  };
  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i)
        div[grid.flat(i, j, k)] =
            (at(f, i + 1, j, k, 0) - at(f, i - 1, j, k, 0) + at(f, i, j + 1, k, 1) -
             at(f, i, j - 1, k, 1) + at(f, i, j, k + 1, 2) - at(f, i, j, k - 1, 2)) *
            inv2h;
  Eigen::MatrixXd gd = Eigen::MatrixXd::Zero(cells, 3);
  const auto atdiv = [&](int i, int j, int k) -> Real {
    if (i < 0 || j < 0 || k < 0 || i >= grid.n[0] || j >= grid.n[1] || k >= grid.n[2])
      return 0.0;
    return div[grid.flat(i, j, k)];
  };
  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i) {
        const Index c = grid.flat(i, j, k);
        gd(c, 0) = (atdiv(i + 1, j, k) - atdiv(i - 1, j, k)) * inv2h;
        gd(c, 1) = (atdiv(i, j + 1, k) - atdiv(i, j - 1, k)) * inv2h;
        gd(c, 2) = (atdiv(i, j, k + 1) - atdiv(i, j, k - 1)) * inv2h;
      }
  return gd;
}

}  // namespace

ElasticIbpEvaluator::ElasticIbpEvaluator(const SourcePair& source, const ElasticParams& ep)
    : grid_(source.grid), ep_(ep), f0_(source.f0), f1_(source.f1) {
  require(source.arity == 3, "ElasticIbpEvaluator: expects a vector source");
  graddiv0_ = grad_div_field(f0_, grid_);
  graddiv1_ = grad_div_field(f1_, grid_);
}

Vec3c ElasticIbpEvaluator::operator()(const Vec3& x, Complex k) const {
  const Real cs = ep_.cs(), cp = ep_.cp();
  const Complex ik = Complex(0, 1) * k;
  const Index cells = grid_.cells();
  Vec3c acc = Vec3c::Zero();
  for (Index c = 0; c < cells; ++c) {
    const Vec3 a0 = f0_.row(c);
    const Vec3 a1 = f1_.row(c);
    const Vec3 gd0 = graddiv0_.row(c);
    const Vec3 gd1 = graddiv1_.row(c);
    if (a0.isZero(0.0) && a1.isZero(0.0) && gd0.isZero(0.0) && gd1.isZero(0.0)) continue;
    const Real r = (x - grid_.center(c)).norm();
    const Complex zs = ik * r / cs;
    const Complex gs = std::exp(zs) / (4.0 * kPi * cs * cs * r);
    const Complex g0 = detail::exp_rem2(zs, 0) / (cs * cs) -
                       detail::exp_rem2(ik * r / cp, 0) / (cp * cp);
    const Complex psi = -r * g0;  // bracket / (k^2 r)
    acc += gs * (a1.cast<Complex>() + ik * a0.cast<Complex>());
    acc += (psi / (4.0 * kPi)) * (gd1.cast<Complex>() + ik * gd0.cast<Complex>());
  }
  return acc * grid_.cell_volume();
}

Vec3c forward_field_elastic_ibp(const SourcePair& source, const SourceSpec& described_by,
                                const Vec3& x, Complex k, const ElasticParams& ep) {
  const auto smooth = [](const std::vector<Bump>& bumps) {
    for (const Bump& b : bumps)
      if (b.kind == BumpKind::Power && b.exponent < 2.0) return false;
    return true;
  };
  require(smooth(described_by.f0) && smooth(described_by.f1),
          "forward_field_elastic_ibp: source must be twice differentiable");
  return ElasticIbpEvaluator(source, ep)(x, k);
}

FrequencySweep forward_sweep_elastic(const SourcePair& source, const BoundaryMesh& mesh,
                                     const FrequencyGrid& grid, const ElasticParams& ep) {
  require(source.arity == 3, "forward_sweep_elastic: expects a vector source");
  ep.validate();
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.arity = 3;
  sweep.nodes = mesh.size();
  sweep.values.setZero(sweep.nodes * 3, grid.count);

  std::vector<Vec3> ys;
  std::vector<Vec3> w0, w1;
  const Index cells = source.cells();
  for (Index c = 0; c < cells; ++c) {
    const Vec3 a0 = source.f0.row(c);
    const Vec3 a1 = source.f1.row(c);
    if (a0.isZero(0.0) && a1.isZero(0.0)) continue;
    ys.push_back(source.grid.center(c));
    w0.push_back(a0);
    w1.push_back(a1);
  }
  const Index m = static_cast<Index>(ys.size());
  if (m == 0) return sweep;
  const Real vol = source.grid.cell_volume();

  const Index jobs = sweep.nodes * grid.count;
  parallel_for(0, jobs, [&](Index job) {
    const Index node = job / grid.count;
    const int j = static_cast<int>(job % grid.count);
    const Complex k(grid.omega(j), 0.0);
    const Complex ik = Complex(0, 1) * k;
    const Vec3 x = mesh.nodes.col(node);
    Vec3c acc = Vec3c::Zero();
    for (Index q = 0; q < m; ++q) {
      const std::size_t qq = static_cast<std::size_t>(q);
      const Vec3 d = x - ys[qq];
      const Real r = d.norm();
      const KernelStack st = kernel_stack(r, k, ep, false);
      const Vec3 u = d / r;
      const Vec3c fy = w1[qq].cast<Complex>() + ik * w0[qq].cast<Complex>();
      // u is real, so dot() introduces no conjugation here
      acc += st.a * fy + st.b * u.cast<Complex>().dot(fy) * u.cast<Complex>();
    }
    for (int comp = 0; comp < 3; ++comp)
      sweep.values(node * 3 + comp, j) = vol * acc[comp];
  });
  return sweep;
}

}  // namespace islab
