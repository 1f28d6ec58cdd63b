#include "islab/sobolev.hpp"

#include <cmath>

#include <unsupported/Eigen/FFT>

namespace islab {

namespace detail {

void fft3(std::vector<Complex>& data, int n) {
  Eigen::FFT<Real> fft;
  std::vector<Complex> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  const Index nn = Index(n) * n;

  // x lines are contiguous
  for (Index line = 0; line < nn; ++line) {
    Complex* p = data.data() + line * n;
    std::copy(p, p + n, in.begin());
    fft.fwd(out, in);
    std::copy(out.begin(), out.end(), p);
  }
  // y lines, stride n
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < n; ++i) {
      Complex* base = data.data() + k * nn + i;
      for (int j = 0; j < n; ++j) in[static_cast<std::size_t>(j)] = base[Index(j) * n];
      fft.fwd(out, in);
      for (int j = 0; j < n; ++j) base[Index(j) * n] = out[static_cast<std::size_t>(j)];
    }
  }
  // z lines, stride n^2
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      Complex* base = data.data() + j * n + i;
      for (int k = 0; k < n; ++k) in[static_cast<std::size_t>(k)] = base[Index(k) * nn];
      fft.fwd(out, in);
      for (int k = 0; k < n; ++k) base[Index(k) * nn] = out[static_cast<std::size_t>(k)];
    }
  }
}

}  // namespace detail

void SobolevTransform::init(const Eigen::MatrixXcd& fields, const VoxelGrid& grid,
                            int embed_factor) {
  require(embed_factor >= 1, "SobolevTransform: bad embedding factor");
  const int n = embed_factor * grid.n.maxCoeff();
  n_ = n;
  embed_side_ = n * grid.h;
  const Index bins = Index(n) * n * n;
  scale_ = grid.cell_volume() / static_cast<Real>(bins);

  power_.setZero(bins);
  std::vector<Complex> cube(static_cast<std::size_t>(bins));
  for (Index comp = 0; comp < fields.cols(); ++comp) {
    std::fill(cube.begin(), cube.end(), Complex(0, 0));
    for (int k = 0; k < grid.n[2]; ++k)
      for (int j = 0; j < grid.n[1]; ++j)
        for (int i = 0; i < grid.n[0]; ++i) {
          const Index dst = i + Index(n) * (j + Index(n) * k);
          cube[static_cast<std::size_t>(dst)] = fields(grid.flat(i, j, k), comp);
        }
    detail::fft3(cube, n);
    for (Index b = 0; b < bins; ++b)
      power_[b] += std::norm(cube[static_cast<std::size_t>(b)]);
  }

  xi_sq_.resize(bins);
  const Real dxi = 2.0 * kPi / embed_side_;
  Eigen::VectorXd axis_sq(n);
  for (int m = 0; m < n; ++m) {
    const int mm = m <= n / 2 ? m : m - n;
    axis_sq[m] = dxi * dxi * Real(mm) * Real(mm);
  }
  Index b = 0;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i, ++b)
        xi_sq_[b] = axis_sq[i] + axis_sq[j] + axis_sq[k];
}

SobolevTransform::SobolevTransform(const Eigen::MatrixXd& fields, const VoxelGrid& grid,
                                   int embed_factor) {
  init(fields.cast<Complex>(), grid, embed_factor);
}

SobolevTransform::SobolevTransform(const Eigen::MatrixXcd& fields, const VoxelGrid& grid,
                                   int embed_factor) {
  init(fields, grid, embed_factor);
}

Real SobolevTransform::norm(Real s) const {
  require(s >= -1.0 - 1e-12 && s <= 3.0 + 1e-12, "sobolev norm order outside [-1, 3]");
  Real acc = 0.0;
  for (Index b = 0; b < power_.size(); ++b)
    acc += std::pow(1.0 + xi_sq_[b], s) * power_[b];
  return std::sqrt(scale_ * acc);
}

Real sobolev_norm(const Eigen::VectorXd& field, const VoxelGrid& grid, Real s) {
  return SobolevTransform(Eigen::MatrixXd(field), grid).norm(s);
}

Real sobolev_norm(const Eigen::MatrixXd& fields, const VoxelGrid& grid, Real s) {
  return SobolevTransform(fields, grid).norm(s);
}

SourceNorms compute_source_norms(const SourcePair& source) {
  SourceNorms norms;
  const SobolevTransform t0(source.f0, source.grid);
  const SobolevTransform t1(source.f1, source.grid);
  for (int s = -1; s <= 3; ++s) {
    norms.f0[static_cast<std::size_t>(SourceNorms::order_index(s))] = t0.norm(s);
    norms.f1[static_cast<std::size_t>(SourceNorms::order_index(s))] = t1.norm(s);
  }
  norms.M0 = norms.f0_norm(0) + norms.f1_norm(0);
  norms.M1 = norms.f0_norm(1) + norms.f1_norm(0);
  norms.M2 = norms.f0_norm(2) + norms.f1_norm(1);
  norms.M2e = norms.f0_norm(2) + norms.f1_norm(2);
  norms.M3 = norms.f0_norm(3) + norms.f1_norm(3);
  return norms;
}

}  // namespace islab
