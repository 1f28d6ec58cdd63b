#include "islab/spectral.hpp"

#include <atomic>
#include <cmath>

namespace islab {

void gauss_legendre01(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  require(n >= 2, "gauss_legendre01: need at least 2 nodes");
  nodes.resize(n);
  weights.resize(n);
  // Newton on P_n over [-1, 1], then map to [0, 1]
  for (int i = 0; i < n; ++i) {
    Real x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Real p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const Real dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * pp * pp);
  }
}

// ---------------------------------------------------------------------------
// band functionals
// ---------------------------------------------------------------------------

namespace {

// node-weighted squared surface norm of one frequency column, with the
// tangential projector applied when the sweep holds gradients
Real surface_sq(const FrequencySweep& sweep, const BoundaryMesh& mesh, BandWeight weight,
                int j) {
  const Index nodes = sweep.nodes;
  Real acc = 0.0;
  if (weight != BandWeight::Tangential) {
    for (Index i = 0; i < nodes; ++i) {
      Real s = 0.0;
      for (int c = 0; c < sweep.arity; ++c)
        s += std::norm(sweep.values(i * sweep.arity + c, j));
      acc += mesh.weights[i] * s;
    }
    return acc;
  }
  // gradient sweep: arity = 3 * value components; project out the normal
  require(sweep.arity % 3 == 0, "tangential functional expects a gradient sweep");
  const int vcomps = sweep.arity / 3;
  for (Index i = 0; i < nodes; ++i) {
    const Vec3 n = mesh.normals.col(i);
    Real s = 0.0;
    for (int vc = 0; vc < vcomps; ++vc) {
      Vec3c g;
      for (int l = 0; l < 3; ++l) g[l] = sweep.values(i * sweep.arity + vc * 3 + l, j);
      const Vec3c gt = g - n.cast<Complex>() * (n.cast<Complex>().dot(g));
      s += gt.squaredNorm();
    }
    acc += mesh.weights[i] * s;
  }
  return acc;
}

Real freq_weight(BandWeight weight, Real omega) {
  return weight == BandWeight::Omega2 ? omega * omega : 1.0;
}

}  // namespace

namespace {

// weighted integrand at grid index j
Real grid_integrand(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                    BandWeight weight, int j) {
  return freq_weight(weight, sweep.grid.omega(j)) * surface_sq(sweep, mesh, weight, j);
}

// linear interpolation of the integrand at arbitrary omega in (0, omega_max]
Real interp_integrand(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                      BandWeight weight, Real omega, Real g0) {
  const Real domega = sweep.grid.domega;
  const Real s = omega / domega - 1.0;  // grid coordinate of omega
  if (s <= 0.0)
    return g0 + (grid_integrand(sweep, mesh, weight, 0) - g0) * (omega / domega);
  const int j = std::min(static_cast<int>(std::floor(s)), sweep.grid.count - 2);
  const Real frac = s - j;
  return (1.0 - frac) * grid_integrand(sweep, mesh, weight, j) +
         frac * grid_integrand(sweep, mesh, weight, j + 1);
}

// extrapolated omega -> 0 limit of the integrand (zero under omega^2 weight)
Real dc_integrand(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                  BandWeight weight) {
  if (weight == BandWeight::Omega2 || sweep.grid.count < 2) return 0.0;
  return std::max(0.0, 2.0 * grid_integrand(sweep, mesh, weight, 0) -
                           grid_integrand(sweep, mesh, weight, 1));
}

}  // namespace

Real band_functional_sweep(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                           BandWeight weight, Real k) {
  require(k > 0.0, "band functional: k must be positive");
  require(k <= sweep.grid.omega_max() + 1e-9, "band functional: k beyond the sweep");
  const Real domega = sweep.grid.domega;
  const Real g0 = dc_integrand(sweep, mesh, weight);
  const int jk = sweep.grid.truncation_index(k);
  // trapezoid over the grid nodes in [0, k], then the partial cell up to k
  Real acc = 0.5 * g0;
  Real g_last = g0;
  Real omega_last = 0.0;
  for (int j = 0; j <= jk; ++j) {
    g_last = grid_integrand(sweep, mesh, weight, j);
    omega_last = sweep.grid.omega(j);
    acc += (j == jk) ? 0.5 * g_last : g_last;
  }
  Real integral = domega * acc;
  if (k > omega_last + 1e-12) {
    const Real gk = interp_integrand(sweep, mesh, weight, k, g0);
    integral += 0.5 * (k - omega_last) * (g_last + gk);
  }
  return 2.0 * integral;
}

Real tail_integral(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                   BandWeight weight, Real k) {
  require(k > 0.0, "tail_integral: k must be positive");
  require(sweep.grid.omega_max() >= 4.0 * k - 1e-9,
          "tail_integral: sweep band must extend to at least 4k");
  const Real domega = sweep.grid.domega;
  const int jk = sweep.grid.truncation_index(k);
  const Real omega_jk = sweep.grid.omega(jk);
  Real integral = 0.0;
  int j_begin = jk;
  if (k > omega_jk + 1e-12) {
    // partial cell from k to the next grid node
    const Real g0 = dc_integrand(sweep, mesh, weight);
    const Real gk = interp_integrand(sweep, mesh, weight, k, g0);
    const Real g_next = grid_integrand(sweep, mesh, weight, jk + 1);
    integral += 0.5 * (sweep.grid.omega(jk + 1) - k) * (gk + g_next);
    j_begin = jk + 1;
  }
  Real acc = 0.0;
  for (int j = j_begin; j < sweep.grid.count; ++j) {
    const Real g = grid_integrand(sweep, mesh, weight, j);
    acc += (j == j_begin || j == sweep.grid.count - 1) ? 0.5 * g : g;
  }
  integral += domega * acc;
  return 2.0 * integral;
}

namespace {

// integrand F(omega) = sum_i w_i < field(x_i, omega), field(x_i, -omega) >
// (bilinear, no conjugation; reduces to |.|^2 on the real axis)
template <typename EvalPair>
Complex path_integral(BandWeight weight, Complex k, int gl_nodes, const BoundaryMesh& mesh,
                      const EvalPair& eval) {
  require(k.real() > 0.0, "band functional: Re k must be positive");
  Eigen::VectorXd s, w;
  gauss_legendre01(gl_nodes, s, w);
  std::vector<Complex> partial(static_cast<std::size_t>(gl_nodes));
  parallel_for(0, gl_nodes, [&](Index q) {
    const Complex omega = k * s[q];
    const Real fw = weight == BandWeight::Omega2 ? 1.0 : 0.0;
    Complex acc(0, 0);
    for (Index i = 0; i < mesh.size(); ++i)
      acc += mesh.weights[i] * eval(i, omega);
    if (fw != 0.0) acc *= omega * omega;
    partial[static_cast<std::size_t>(q)] = w[q] * acc;
  });
  Complex total(0, 0);
  for (int q = 0; q < gl_nodes; ++q) total += partial[static_cast<std::size_t>(q)];
  return 2.0 * k * total;
}

}  // namespace

Complex band_functional_path(const SourcePair& source, const BoundaryMesh& mesh,
                             BandWeight weight, Complex k, int gl_nodes) {
  require(source.arity == 1, "band_functional_path: scalar source expected");
  if (weight != BandWeight::Tangential) {
    const auto eval = [&](Index i, Complex omega) -> Complex {
      const Vec3 x = mesh.nodes.col(i);
      return forward_field(source, x, omega) * forward_field(source, x, -omega);
    };
    return path_integral(weight, k, gl_nodes, mesh, eval);
  }
  const auto eval = [&](Index i, Complex omega) -> Complex {
    const Vec3 x = mesh.nodes.col(i);
    const Vec3 n = mesh.normals.col(i);
    const Vec3c gp = forward_field_grad(source, x, omega);
    const Vec3c gm = forward_field_grad(source, x, -omega);
    // bilinear product of the tangential projections
    const Vec3c tp = gp - n.cast<Complex>() * (n.cast<Complex>().dot(gp));
    const Vec3c tm = gm - n.cast<Complex>() * (n.cast<Complex>().dot(gm));
    return tp(0) * tm(0) + tp(1) * tm(1) + tp(2) * tm(2);
  };
  return path_integral(weight, k, gl_nodes, mesh, eval);
}

Complex band_functional_path_elastic(const SourcePair& source, const BoundaryMesh& mesh,
                                     BandWeight weight, Complex k, const ElasticParams& ep,
                                     int gl_nodes) {
  require(source.arity == 3, "band_functional_path_elastic: vector source expected");
  if (weight != BandWeight::Tangential) {
    const auto eval = [&](Index i, Complex omega) -> Complex {
      const Vec3 x = mesh.nodes.col(i);
      const Vec3c up = forward_field_elastic(source, x, omega, ep);
      const Vec3c um = forward_field_elastic(source, x, -omega, ep);
      return up(0) * um(0) + up(1) * um(1) + up(2) * um(2);
    };
    return path_integral(weight, k, gl_nodes, mesh, eval);
  }
  const auto eval = [&](Index i, Complex omega) -> Complex {
    const Vec3 x = mesh.nodes.col(i);
    const Mat3c pn = Mat3c::Identity() -
                     (mesh.normals.col(i) * mesh.normals.col(i).transpose()).cast<Complex>();
    const Mat3c gp = forward_field_elastic_grad(source, x, omega, ep) * pn;
    const Mat3c gm = forward_field_elastic_grad(source, x, -omega, ep) * pn;
    Complex acc(0, 0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) acc += gp(a, b) * gm(a, b);
    return acc;
  };
  return path_integral(weight, k, gl_nodes, mesh, eval);
}

FrequencySweep forward_grad_sweep(const SourcePair& source, const BoundaryMesh& mesh,
                                  const FrequencyGrid& grid) {
  require(source.arity == 1, "forward_grad_sweep: scalar source expected");
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.arity = 3;
  sweep.nodes = mesh.size();
  sweep.values.setZero(sweep.nodes * 3, grid.count);
  const Index jobs = sweep.nodes * grid.count;
  parallel_for(0, jobs, [&](Index job) {
    const Index node = job / grid.count;
    const int j = static_cast<int>(job % grid.count);
    const Vec3c g = forward_field_grad(source, mesh.nodes.col(node),
                                       Complex(grid.omega(j), 0.0));
    for (int l = 0; l < 3; ++l) sweep.values(node * 3 + l, j) = g[l];
  });
  return sweep;
}

FrequencySweep forward_grad_sweep_elastic(const SourcePair& source, const BoundaryMesh& mesh,
                                          const FrequencyGrid& grid,
                                          const ElasticParams& ep) {
  require(source.arity == 3, "forward_grad_sweep_elastic: vector source expected");
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.arity = 9;
  sweep.nodes = mesh.size();
  sweep.values.setZero(sweep.nodes * 9, grid.count);
  const Index jobs = sweep.nodes * grid.count;
  parallel_for(0, jobs, [&](Index job) {
    const Index node = job / grid.count;
    const int j = static_cast<int>(job % grid.count);
    const Mat3c g = forward_field_elastic_grad(source, mesh.nodes.col(node),
                                               Complex(grid.omega(j), 0.0), ep);
    for (int vc = 0; vc < 3; ++vc)
      for (int l = 0; l < 3; ++l) sweep.values(node * 9 + vc * 3 + l, j) = g(vc, l);
  });
  return sweep;
}

// ---------------------------------------------------------------------------
// sector bounds
// ---------------------------------------------------------------------------

Real sector_bound_scalar(BandWeight weight, Complex k, const SourceNorms& norms,
                         Real boundary_area, Real diameter) {
  const Real ak = std::abs(k);
  const Real lead = 8.0 * kPi * boundary_area * diameter;
  const Real expo = std::exp(2.0 * diameter * std::abs(k.imag()));
  Real poly = 0.0;
  switch (weight) {
    case BandWeight::Value:
      poly = ak * norms.f1_norm(0) * norms.f1_norm(0) +
             std::pow(ak, 3) / 3.0 * norms.f0_norm(0) * norms.f0_norm(0);
      break;
    case BandWeight::Omega2:
      poly = std::pow(ak, 3) / 3.0 * norms.f1_norm(0) * norms.f1_norm(0) +
             std::pow(ak, 5) / 5.0 * norms.f0_norm(0) * norms.f0_norm(0);
      break;
    case BandWeight::Tangential:
      poly = ak * norms.f1_norm(1) * norms.f1_norm(1) +
             std::pow(ak, 3) / 3.0 * norms.f0_norm(1) * norms.f0_norm(1);
      break;
  }
  return lead * poly * expo;
}

Real sector_bound_elastic(BandWeight weight, Complex k, const SourceNorms& norms,
                          const ElasticParams& ep, Real diameter, Real calibrated_c) {
  const Real ak = std::abs(k);
  const Real expo = std::exp(2.0 * diameter * std::abs(k.imag()) / ep.cs());
  Real poly = 0.0;
  switch (weight) {
    case BandWeight::Value:
      poly = ak * norms.f1_norm(2) * norms.f1_norm(2) +
             std::pow(ak, 3) * norms.f0_norm(2) * norms.f0_norm(2);
      break;
    case BandWeight::Omega2:
      poly = std::pow(ak, 3) * norms.f1_norm(2) * norms.f1_norm(2) +
             std::pow(ak, 5) * norms.f0_norm(2) * norms.f0_norm(2);
      break;
    case BandWeight::Tangential:
      poly = ak * norms.f1_norm(3) * norms.f1_norm(3) +
             std::pow(ak, 3) * norms.f0_norm(3) * norms.f0_norm(3);
      break;
  }
  return calibrated_c * poly * expo;
}

// ---------------------------------------------------------------------------
// harmonic measure
// ---------------------------------------------------------------------------

Real slit_measure_lower(Real k, Real K) {
  require(k > 0.0 && K > 0.0, "slit_measure_lower: positive arguments expected");
  const Real threshold = std::pow(2.0, 0.25) * K;
  if (k < threshold) return 0.5;
  const Real q = std::pow(k / K, 4) - 1.0;
  return 1.0 / (kPi * std::sqrt(q));
}

namespace {

inline Real dist_to_slit(Real x, Real y, Real K) {
  if (x <= K) return std::abs(y);
  return std::hypot(x - K, y);
}

inline Real dist_to_rays(Real x, Real y) { return (x - std::abs(y)) / std::sqrt(2.0); }

}  // namespace

WosEstimate slit_measure_wos(Complex start, Real K, std::uint64_t n_walks,
                             std::uint64_t seed) {
  require(K > 0.0, "slit_measure_wos: K must be positive");
  const Real x0 = start.real(), y0 = start.imag();
  require(x0 > std::abs(y0), "slit_measure_wos: start point outside the sector");
  require(dist_to_slit(x0, y0, K) > 0.0, "slit_measure_wos: start point on the slit");
  require(n_walks > 0, "slit_measure_wos: need at least one walk");

  const Real shell = 1e-4 * K;
  std::atomic<std::uint64_t> hits{0};
  parallel_for_ranges(0, static_cast<Index>(n_walks), [&](Index lo, Index hi) {
    std::uint64_t local = 0;
    for (Index wi = lo; wi < hi; ++wi) {
      std::uint64_t stream = seed;
      (void)splitmix64(stream);
      stream += static_cast<std::uint64_t>(wi) * 0x9e3779b97f4a7c15ULL;
      Rng rng(splitmix64(stream));
      Real x = x0, y = y0;
      for (int step = 0; step < 100000; ++step) {
        const Real ds = dist_to_slit(x, y, K);
        const Real dr = dist_to_rays(x, y);
        const Real r = std::min(ds, dr);
        if (r < shell) {
          if (ds <= dr) ++local;
          break;
        }
        const Real a = 2.0 * kPi * rng.uniform();
        x += r * std::cos(a);
        y += r * std::sin(a);
      }
    }
    hits.fetch_add(local);
  });
  WosEstimate est;
  est.walks = n_walks;
  est.value = static_cast<Real>(hits.load()) / static_cast<Real>(n_walks);
  est.std_error = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) /
                            static_cast<Real>(n_walks));
  return est;
}

// ---------------------------------------------------------------------------
// truncation rule, continuation bound
// ---------------------------------------------------------------------------

Real truncation_wavenumber(Real K, Real E) {
  require(K > 1.0, "truncation_wavenumber: requires K > 1");
  require(E > 0.0, "truncation_wavenumber: requires E > 0");
  const Real lhs = std::pow(2.0, 0.25) * std::cbrt(K);
  const Real rhs = std::pow(E, 0.25);
  if (lhs < rhs) return std::pow(K, 2.0 / 3.0) * rhs;
  return K;
}

Real continuation_bound_log(Real k, Real K, Real eps, Real m_norm_sq, Real diameter,
                            Real calibrated_c) {
  require(k > K, "continuation_bound: k must exceed the band limit");
  require(eps > 0.0 && eps < 1.0, "continuation_bound: requires 0 < eps < 1");
  require(m_norm_sq > 0.0, "continuation_bound: vanishing a priori norm");
  const Real mu = slit_measure_lower(k, K);
  return std::log(calibrated_c) + 2.0 * (diameter + 1.0) * k + 2.0 * mu * std::log(eps) +
         std::log(m_norm_sq);
}

Real continuation_bound(Real k, Real K, Real eps, Real m_norm_sq, Real diameter,
                        Real calibrated_c) {
  return std::exp(continuation_bound_log(k, K, eps, m_norm_sq, diameter, calibrated_c));
}

// ---------------------------------------------------------------------------
// data norms
// ---------------------------------------------------------------------------

DataNorms compute_data_norms(const FrequencySweep& value_sweep,
                             const FrequencySweep& grad_sweep, const BoundaryMesh& mesh,
                             Real K) {
  DataNorms norms;
  norms.eps0_sq = band_functional_sweep(value_sweep, mesh, BandWeight::Value, K);
  norms.i1 = band_functional_sweep(value_sweep, mesh, BandWeight::Omega2, K);
  if (grad_sweep.nodes > 0) {
    norms.i2 = band_functional_sweep(grad_sweep, mesh, BandWeight::Tangential, K);
    norms.eps1_sq = norms.i1 + norms.i2;
    norms.eps1_full_sq = norms.eps1_sq + norms.eps0_sq;
    if (norms.eps1_sq > 0.0 && norms.eps1_sq < 1.0)
      norms.E1 = -0.5 * std::log(norms.eps1_sq);
  }
  if (norms.eps0_sq > 0.0 && norms.eps0_sq < 1.0)
    norms.E0 = -0.5 * std::log(norms.eps0_sq);
  return norms;
}

}  // namespace islab
