#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "islab/elastic.hpp"

using namespace islab;

namespace {

const ElasticParams kUnit{1.0, 1.0, 1.0};  // cp = sqrt(3), cs = 1

SourcePair vector_bump(const Domain& dom, const Vec3& amp, Real sigma, Real cut) {
  SourceSpec spec;
  spec.arity = 3;
  Bump b;
  b.width = sigma;
  b.cut_radius = cut;
  b.center = Vec3(0.03, -0.05, 0.04);
  b.amplitude = amp;
  spec.f0.push_back(b);
  return rasterize_source(spec, dom);
}

}  // namespace

TEST_CASE("regularized bracket small-argument limit") {
  const Real cs = kUnit.cs(), cp = kUnit.cp();
  const Real gamma = 1.0 / (cs * cs) - 1.0 / (cp * cp);
  for (const Real r : {0.3, 1.0, 2.7}) {
    const Complex tiny = phi_regularized_bracket(r, Complex(1e-6 / r, 0), kUnit);
    const Real limit = -r * r * gamma / 2.0;
    CHECK(tiny.real() == doctest::Approx(limit).epsilon(1e-5));
    const Complex zero = phi_regularized_bracket(r, Complex(0, 0), kUnit);
    CHECK(zero.real() == doctest::Approx(limit).epsilon(1e-14));
    CHECK(zero.imag() == 0.0);
  }
}

TEST_CASE("bracket vanishes for equal speeds") {
  ElasticParams equal;
  equal.lambda = -1.0;  // hypothetical cs = cp probe, bypasses ellipticity
  equal.mu = 1.0;
  equal.rho = 1.0;
  CHECK(equal.cs() == doctest::Approx(equal.cp()));
  for (const Real r : {0.2, 1.0})
    for (const Complex k : {Complex(0.5, 0), Complex(2.0, 1.0)})
      CHECK(std::abs(phi_regularized_bracket(r, k, equal)) < 1e-16);
}

TEST_CASE("series and direct branches agree across the switch") {
  const Real r = 1.0;
  const Real cs = kUnit.cs();
  // |k| r / cs around the switch radius 1e-2
  for (const Real scale : {0.97, 0.999999999, 1.0, 1.000000001, 1.03}) {
    const Complex k1(1e-2 * cs * scale / r, 0);
    const Complex k2 = k1 * (1.0 + 1e-9);
    const Complex b1 = phi_regularized_bracket(r, k1, kUnit);
    const Complex b2 = phi_regularized_bracket(r, k2, kUnit);
    CHECK(std::abs(b1 - b2) / std::abs(b1) < 1e-6);
  }
  // spec'd probe deep in the series branch
  const Complex a = phi_regularized_bracket(1.0, Complex(1e-3, 0), kUnit);
  const Complex b = phi_regularized_bracket(1.0, Complex(1e-3 * (1.0 + 1e-9), 0), kUnit);
  CHECK(std::abs(a - b) / std::abs(a) < 1e-6);
}

TEST_CASE("fundamental matrix symmetry") {
  const Vec3 d(0.4, -0.7, 0.2);
  const Complex k(1.7, 0.3);
  const Mat3c phi = phi_matrix(d, k, kUnit);
  const Mat3c phi_flip = phi_matrix(-d, k, kUnit);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(phi(i, j) - phi(j, i)) < 1e-13 * std::abs(phi(i, j)) + 1e-16);
      CHECK(std::abs(phi(i, j) - phi_flip(i, j)) < 1e-13 * std::abs(phi(i, j)) + 1e-16);
    }
}

TEST_CASE("static limit reproduces the Kelvin-type matrix") {
  const Real cs = kUnit.cs(), cp = kUnit.cp();
  const Real gamma = 1.0 / (cs * cs) - 1.0 / (cp * cp);
  for (const Vec3& d : {Vec3(0.5, 0.1, -0.3), Vec3(-0.2, 0.9, 0.4)}) {
    const Real r = d.norm();
    const Vec3 u = d / r;
    const Mat3c phi0 = phi_matrix(d, Complex(0, 0), kUnit);
    Mat3 expected = Mat3::Identity() / (4.0 * kPi * cs * cs * r);
    expected -= gamma / (8.0 * kPi) *
                (Mat3::Identity() / r - (u * u.transpose()) / r);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(phi0(i, j).imag()) < 1e-14);
        CHECK(phi0(i, j).real() == doctest::Approx(expected(i, j)).epsilon(1e-10));
      }
  }
}

TEST_CASE("regularized kernel growth bound") {
  // |bracket / (k^2 4 pi r)| <= C e^{|k2| r / cs} / r with one fitted C
  Rng rng(42);
  const auto sample = [&](int n, Real& worst) {
    worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Real r = 0.05 + 2.0 * rng.uniform();
      const Real k1 = 0.05 + 4.0 * rng.uniform();
      const Real k2 = (2.0 * rng.uniform() - 1.0) * k1;
      const Complex k(k1, k2);
      const Real lhs = std::abs(phi_regularized_bracket(r, k, kUnit)) / (4.0 * kPi * r);
      const Real rhs = std::exp(std::abs(k2) * r / kUnit.cs()) / r;
      worst = std::max(worst, lhs / rhs);
    }
  };
  Real fit = 0.0, verify = 0.0;
  sample(200, fit);
  const Real C = 1.5 * fit;
  sample(400, verify);
  CHECK(verify <= C);
}

TEST_CASE("analytic in k across the switch (Cauchy-Riemann)") {
  const Vec3 d(0.6, 0.2, -0.1);
  const Real r = d.norm();
  const Real step = 1e-4;
  for (const Real kmag : {0.8e-2 * kUnit.cs() / r, 1.2e-2 * kUnit.cs() / r, 1.5}) {
    const Complex k(kmag, 0.3 * kmag);
    const Mat3c pxp = phi_matrix(d, k + Complex(step, 0), kUnit);
    const Mat3c pxm = phi_matrix(d, k - Complex(step, 0), kUnit);
    const Mat3c pyp = phi_matrix(d, k + Complex(0, step), kUnit);
    const Mat3c pym = phi_matrix(d, k - Complex(0, step), kUnit);
    const Mat3c dre = (pxp - pxm) / (2 * step);
    const Mat3c dim = (pyp - pym) / (2 * step);
    const Mat3c cr = dre + Complex(0, 1) * dim;  // d/d(conj k), zero if analytic
    CHECK(cr.cwiseAbs().maxCoeff() < 1e-6 * dre.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("single-voxel source extracts a matrix column") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 8.0, 200);
  SourcePair src;
  src.grid = dom.grid;
  src.arity = 3;
  src.f0.setZero(dom.grid.cells(), 3);
  src.f1.setZero(dom.grid.cells(), 3);
  const Index c0 = dom.grid.flat(4, 4, 4);
  src.f1(c0, 0) = 1.0;
  const Vec3 x(1.6, 0.3, 0.2);
  const Complex k(1.9, 0);
  const Vec3c u = forward_field_elastic(src, x, k, kUnit);
  const Vec3c expected =
      dom.grid.cell_volume() * phi_matrix(x - dom.grid.center(c0), k, kUnit).col(0);
  CHECK((u - expected).norm() < 1e-13 * expected.norm());
}

TEST_CASE("direct and integration-by-parts routes agree") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 16.0, 200);
  SourceSpec spec;
  spec.arity = 3;
  Bump b;
  b.width = 0.16;
  b.cut_radius = 0.48;
  b.center = Vec3(0.02, 0.03, -0.01);
  b.amplitude = Vec3(1.0, -0.4, 0.6);
  spec.f0.push_back(b);
  const SourcePair src = rasterize_source(spec, dom);
  for (const Complex k : {Complex(1.2, 0), Complex(2.5, 0.5)}) {
    const Vec3 x(1.3, -0.5, 0.6);
    const Vec3c direct = forward_field_elastic(src, x, k, kUnit);
    const Vec3c ibp = forward_field_elastic_ibp(src, spec, x, k, kUnit);
    CHECK((direct - ibp).norm() / direct.norm() < 0.01);
  }

  // non-smooth power bump rejected
  SourceSpec rough = spec;
  rough.f0[0].kind = BumpKind::Power;
  rough.f0[0].exponent = 0.5;
  CHECK_THROWS(forward_field_elastic_ibp(src, rough, Vec3(1.3, 0, 0), Complex(1, 0), kUnit));

  // zero source maps to zero
  SourceSpec empty;
  empty.arity = 3;
  const SourcePair zsrc = rasterize_source(empty, dom);
  CHECK(forward_field_elastic(zsrc, Vec3(1.5, 0, 0), Complex(1, 0), kUnit).norm() == 0.0);
  CHECK(forward_field_elastic_ibp(zsrc, empty, Vec3(1.5, 0, 0), Complex(1, 0), kUnit).norm() ==
        0.0);
}

TEST_CASE("divergence-free source reduces to the shear kernel") {
  // f = curl(A) with A = a g(r): grad div f vanishes, so the regularized
  // part drops and only the shear scalar kernel survives
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 16.0, 200);
  const Vec3 a(0.3, 1.0, -0.2);
  const Real sigma = 0.16;
  const Real cut = 0.5;
  SourcePair src;
  src.grid = dom.grid;
  src.arity = 3;
  src.f0.setZero(dom.grid.cells(), 3);
  src.f1.setZero(dom.grid.cells(), 3);
  for (Index c = 0; c < dom.grid.cells(); ++c) {
    const Vec3 y = dom.grid.center(c);
    const Real r = y.norm();
    if (r >= cut) continue;
    // curl(a g) = grad(g) x a
    const Real gp = -r / (sigma * sigma) * std::exp(-0.5 * r * r / (sigma * sigma));
    const Vec3 grad = r > 1e-14 ? Vec3(gp * y / r) : Vec3::Zero();
    src.f1.row(c) = grad.cross(a).transpose();
  }
  const Vec3 x(1.4, 0.2, -0.6);
  const Complex k(1.6, 0);
  const Vec3c full = ElasticIbpEvaluator(src, kUnit)(x, k);
  // shear-kernel-only integral
  Vec3c shear = Vec3c::Zero();
  const Complex ik = Complex(0, 1) * k;
  for (Index c = 0; c < dom.grid.cells(); ++c) {
    const Vec3 f1 = src.f1.row(c);
    if (f1.isZero(0.0)) continue;
    const Real r = (x - dom.grid.center(c)).norm();
    shear += std::exp(ik * r / kUnit.cs()) / (4.0 * kPi * kUnit.cs() * kUnit.cs() * r) *
             f1.cast<Complex>();
  }
  shear *= dom.grid.cell_volume();
  CHECK((full - shear).norm() / shear.norm() < 0.02);
}

TEST_CASE("conjugate symmetry of the elastic field") {
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 10.0, 150);
  const SourcePair src = vector_bump(dom, Vec3(0.8, 0.1, -0.5), 0.2, 0.5);
  const Vec3 x(1.5, 0.4, 0.1);
  for (const Real w : {0.9, 2.3}) {
    const Vec3c up = forward_field_elastic(src, x, Complex(w, 0), kUnit);
    const Vec3c um = forward_field_elastic(src, x, Complex(-w, 0), kUnit);
    CHECK((um - up.conjugate()).norm() < 1e-12 * up.norm());
  }
}

TEST_CASE("pressure and shear phases travel at their own speeds") {
  // single-voxel source; fit the radial phase slope of div u and curl u
  const Domain dom = build_domain(ShapeSpec::ball(Vec3::Zero(), 1.0), 1.0 / 8.0, 100);
  SourcePair src;
  src.grid = dom.grid;
  src.arity = 3;
  src.f0.setZero(dom.grid.cells(), 3);
  src.f1.setZero(dom.grid.cells(), 3);
  src.f1(dom.grid.flat(4, 4, 4), 0) = 1.0;
  const Vec3 y0 = dom.grid.center(dom.grid.flat(4, 4, 4));
  const Real k = 2.0;
  const Real D = dom.diameter;
  const Vec3 dir = Vec3(0.2, 0.9, 0.37).normalized();
  const Real eps = 1e-4;

  const auto div_at = [&](Real r) {
    Complex acc(0, 0);
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = y0 + r * dir, xm = y0 + r * dir;
      xp[a] += eps;
      xm[a] -= eps;
      acc += (forward_field_elastic(src, xp, Complex(k, 0), kUnit)[a] -
              forward_field_elastic(src, xm, Complex(k, 0), kUnit)[a]) /
             (2 * eps);
    }
    return acc;
  };
  const auto curl_at = [&](Real r) {
    Mat3c grad;
    for (int a = 0; a < 3; ++a) {
      Vec3 xp = y0 + r * dir, xm = y0 + r * dir;
      xp[a] += eps;
      xm[a] -= eps;
      grad.col(a) = (forward_field_elastic(src, xp, Complex(k, 0), kUnit) -
                     forward_field_elastic(src, xm, Complex(k, 0), kUnit)) /
                    (2 * eps);
    }
    return Complex(grad(2, 1) - grad(1, 2));  // x component of curl
  };

  // spacing small enough that the shear phase advances less than pi per step
  std::vector<Real> radii;
  for (int q = 0; q <= 24; ++q) radii.push_back((5.0 + 5.0 * q / 24.0) * D);
  Real slope_div = 0.0, slope_curl = 0.0;
  for (std::size_t q = 0; q + 1 < radii.size(); ++q) {
    const Real dr = radii[q + 1] - radii[q];
    slope_div += std::arg(div_at(radii[q + 1]) / div_at(radii[q])) / dr;
    slope_curl += std::arg(curl_at(radii[q + 1]) / curl_at(radii[q])) / dr;
  }
  slope_div /= static_cast<Real>(radii.size() - 1);
  slope_curl /= static_cast<Real>(radii.size() - 1);
  // d(phase)/dr = k / c
  CHECK(slope_div == doctest::Approx(k / kUnit.cp()).epsilon(0.02));
  CHECK(slope_curl == doctest::Approx(k / kUnit.cs()).epsilon(0.02));
}
