#include "islab/helmholtz.hpp"

#include <cmath>

namespace islab {

FrequencyGrid make_frequency_grid(Real omega_max, Real domega) {
  require(domega > 0.0 && omega_max >= domega, "frequency grid: bad spacing");
  FrequencyGrid g;
  g.domega = domega;
  g.count = static_cast<int>(std::floor(omega_max / domega + 1e-9));
  return g;
}

Complex green_helmholtz(Real r, Complex k) {
  require(r > 0.0, "green_helmholtz: r must be positive");
  return std::exp(Complex(0, 1) * k * r) / (4.0 * kPi * r);
}

Vec3c green_helmholtz_grad(const Vec3& d, Complex k) {
  const Real r = d.norm();
  require(r > 0.0, "green_helmholtz_grad: r must be positive");
  // d/dr [e^{ikr}/(4 pi r)] = (ik - 1/r) G
  const Complex g = std::exp(Complex(0, 1) * k * r) / (4.0 * kPi * r);
  const Complex radial = (Complex(0, 1) * k - 1.0 / r) * g / r;
  return radial * d.cast<Complex>();
}

Complex forward_field(const SourcePair& source, const Vec3& x, Complex k) {
  require(source.arity == 1, "forward_field: expects a scalar source");
  const Index cells = source.cells();
  const Complex ik = Complex(0, 1) * k;
  Complex acc(0, 0);
  for (Index c = 0; c < cells; ++c) {
    const Real a0 = source.f0(c, 0);
    const Real a1 = source.f1(c, 0);
    if (a0 == 0.0 && a1 == 0.0) continue;
    const Real r = (x - source.grid.center(c)).norm();
    acc += (a1 + ik * a0) * std::exp(ik * r) / r;
  }
  return acc * (source.grid.cell_volume() / (4.0 * kPi));
}

Vec3c forward_field_grad(const SourcePair& source, const Vec3& x, Complex k) {
  require(source.arity == 1, "forward_field_grad: expects a scalar source");
  const Index cells = source.cells();
  const Complex ik = Complex(0, 1) * k;
  Vec3c acc = Vec3c::Zero();
  for (Index c = 0; c < cells; ++c) {
    const Real a0 = source.f0(c, 0);
    const Real a1 = source.f1(c, 0);
    if (a0 == 0.0 && a1 == 0.0) continue;
    const Vec3 d = x - source.grid.center(c);
    const Real r = d.norm();
    const Complex g = std::exp(ik * r) / r;
    const Complex radial = (ik - 1.0 / r) * g / r;
    acc += (a1 + ik * a0) * radial * d.cast<Complex>();
  }
  return acc * (source.grid.cell_volume() / (4.0 * kPi));
}

FrequencySweep forward_sweep(const SourcePair& source, const BoundaryMesh& mesh,
                             const FrequencyGrid& grid) {
  require(source.arity == 1, "forward_sweep: expects a scalar source");
  FrequencySweep sweep;
  sweep.grid = grid;
  sweep.arity = 1;
  sweep.nodes = mesh.size();
  sweep.values.setZero(sweep.nodes, grid.count);

  // Gather the supported voxels once; entries are then an independent map
  // over (node, frequency) pairs with a fixed accumulation order.
  std::vector<Vec3> ys;
  std::vector<Real> w0, w1;
  const Index cells = source.cells();
  for (Index c = 0; c < cells; ++c) {
    const Real a0 = source.f0(c, 0);
    const Real a1 = source.f1(c, 0);
    if (a0 == 0.0 && a1 == 0.0) continue;
    ys.push_back(source.grid.center(c));
    w0.push_back(a0);
    w1.push_back(a1);
  }
  const Index m = static_cast<Index>(ys.size());
  if (m == 0) return sweep;
  const Real vol = source.grid.cell_volume() / (4.0 * kPi);

  const Index jobs = sweep.nodes * grid.count;
  parallel_for(0, jobs, [&](Index job) {
    const Index node = job / grid.count;
    const int j = static_cast<int>(job % grid.count);
    const Real omega = grid.omega(j);
    const Vec3 x = mesh.nodes.col(node);
    Complex acc(0, 0);
    for (Index q = 0; q < m; ++q) {
      const Real r = (x - ys[static_cast<std::size_t>(q)]).norm();
      const Real phase = omega * r;
      const Complex e(std::cos(phase), std::sin(phase));
      acc += Complex(w1[static_cast<std::size_t>(q)],
                     omega * w0[static_cast<std::size_t>(q)]) *
             e / r;
    }
    sweep.values(node, j) = acc * vol;
  });
  return sweep;
}

}  // namespace islab
