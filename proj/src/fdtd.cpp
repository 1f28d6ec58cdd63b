#include "islab/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace islab {

Real sample_trilinear(const Eigen::VectorXd& field, const VoxelGrid& grid, const Vec3& p) {
  Vec3 s = (p - grid.origin) / grid.h - Vec3::Constant(0.5);
  int base[3];
  Real frac[3];
  for (int a = 0; a < 3; ++a) {
    const Real clamped = std::clamp(s[a], 0.0, Real(grid.n[a] - 1) - 1e-12);
    base[a] = std::max(0, std::min(static_cast<int>(std::floor(clamped)), grid.n[a] - 2));
    frac[a] = clamped - base[a];
  }
  Real acc = 0.0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        const Real w = (dx ? frac[0] : 1 - frac[0]) * (dy ? frac[1] : 1 - frac[1]) *
                       (dz ? frac[2] : 1 - frac[2]);
        acc += w * field[grid.flat(base[0] + dx, base[1] + dy, base[2] + dz)];
      }
  return acc;
}

Eigen::VectorXd rasterize_bumps_on_grid(const std::vector<Bump>& bumps,
                                        const VoxelGrid& grid, int comp) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(grid.cells());
  parallel_for(0, grid.cells(), [&](Index c) {
    out[c] = evaluate_bumps(bumps, grid.center(c))[comp];
  });
  return out;
}

// ---------------------------------------------------------------------------
// scalar solver
// ---------------------------------------------------------------------------

ScalarLeapfrog::ScalarLeapfrog(const VoxelGrid& box, Real c, Real dt)
    : box_(box), c_(c), dt_(dt) {
  require(c > 0 && dt > 0, "ScalarLeapfrog: bad parameters");
  require(dt <= box.h / (std::sqrt(3.0) * c) + 1e-12, "ScalarLeapfrog: CFL violated");
  prev_.setZero(box.cells());
  cur_.setZero(box.cells());
  scratch_.setZero(box.cells());
}

void ScalarLeapfrog::laplacian(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real inv_h2 = 1.0 / (box_.h * box_.h);
  const Real* src = in.data();
  Real* dst = out.data();
  parallel_for(1, nz - 1, [&](Index k) {
    for (Index j = 1; j < ny - 1; ++j) {
      const Index row = k * sz + j * sy;
      for (Index i = 1; i < nx - 1; ++i) {
        const Index c = row + i;
        dst[c] = (src[c + sx] + src[c - sx] + src[c + sy] + src[c - sy] +
                  src[c + sz] + src[c - sz] - 6.0 * src[c]) *
                 inv_h2;
      }
    }
  });
}

void ScalarLeapfrog::set_initial(const Eigen::VectorXd& f0, const Eigen::VectorXd& f1) {
  require(f0.size() == box_.cells() && f1.size() == box_.cells(),
          "ScalarLeapfrog: field size mismatch");
  prev_ = f0;
  scratch_.setZero();
  laplacian(prev_, scratch_);
  cur_ = prev_ - dt_ * f1 + (0.5 * dt_ * dt_ * c_ * c_) * scratch_;
}

void ScalarLeapfrog::step() {
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real a = (c_ * dt_ / box_.h) * (c_ * dt_ / box_.h);
  const Real* u = cur_.data();
  Real* w = prev_.data();  // overwritten with the next level
  parallel_for(1, nz - 1, [&](Index k) {
    for (Index j = 1; j < ny - 1; ++j) {
      const Index row = k * sz + j * sy;
      for (Index i = 1; i < nx - 1; ++i) {
        const Index c = row + i;
        w[c] = 2.0 * u[c] - w[c] +
               a * (u[c + sx] + u[c - sx] + u[c + sy] + u[c - sy] + u[c + sz] +
                    u[c - sz] - 6.0 * u[c]);
      }
    }
  });
  prev_.swap(cur_);
}

void ScalarLeapfrog::reverse() { prev_.swap(cur_); }

Real ScalarLeapfrog::discrete_energy() const {
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real h3 = box_.cell_volume();
  const Real kin = (cur_ - prev_).squaredNorm() / (dt_ * dt_);
  Real pot = 0.0;
  const Real* a = prev_.data();
  const Real* b = cur_.data();
  const Index strides[3] = {sx, sy, sz};
  for (int axis = 0; axis < 3; ++axis) {
    const Index s = strides[axis];
    const int lim[3] = {axis == 0 ? nx - 1 : nx, axis == 1 ? ny - 1 : ny,
                        axis == 2 ? nz - 1 : nz};
    for (Index k = 0; k < lim[2]; ++k)
      for (Index j = 0; j < lim[1]; ++j)
        for (Index i = 0; i < lim[0]; ++i) {
          const Index c = k * sz + j * sy + i;
          pot += (a[c + s] - a[c]) * (b[c + s] - b[c]);
        }
  }
  pot *= c_ * c_ / (box_.h * box_.h);
  return 0.5 * h3 * (kin + pot);
}

// ---------------------------------------------------------------------------
// elastic solver
// ---------------------------------------------------------------------------

ElasticLeapfrog::ElasticLeapfrog(const VoxelGrid& box, const ElasticParams& ep, Real dt)
    : box_(box), ep_(ep), dt_(dt) {
  ep.validate();
  require(dt > 0, "ElasticLeapfrog: bad time step");
  require(dt <= box.h / (std::sqrt(3.0) * ep.cp()) + 1e-12,
          "ElasticLeapfrog: CFL violated");
  prev_.setZero(box.cells(), 3);
  cur_.setZero(box.cells(), 3);
  scratch_.setZero(box.cells(), 3);
  div_scratch_.setZero(box.cells());
}

namespace {

void centered_divergence(const Eigen::MatrixXd& u, const VoxelGrid& box,
                         Eigen::VectorXd& div) {
  const int nx = box.n[0], ny = box.n[1], nz = box.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real inv2h = 1.0 / (2.0 * box.h);
  parallel_for(1, nz - 1, [&](Index k) {
    for (Index j = 1; j < ny - 1; ++j) {
      const Index row = k * sz + j * sy;
      for (Index i = 1; i < nx - 1; ++i) {
        const Index c = row + i;
        div[c] = (u(c + sx, 0) - u(c - sx, 0) + u(c + sy, 1) - u(c - sy, 1) +
                  u(c + sz, 2) - u(c - sz, 2)) *
                 inv2h;
      }
    }
  });
}

}  // namespace

Eigen::VectorXd ElasticLeapfrog::divergence() const {
  Eigen::VectorXd div = Eigen::VectorXd::Zero(box_.cells());
  centered_divergence(cur_, box_, div);
  return div;
}

Eigen::MatrixXd ElasticLeapfrog::curl() const {
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(box_.cells(), 3);
  const Real inv2h = 1.0 / (2.0 * box_.h);
  const auto& u = cur_;
  parallel_for(1, nz - 1, [&](Index k) {
    for (Index j = 1; j < ny - 1; ++j) {
      const Index row = k * sz + j * sy;
      for (Index i = 1; i < nx - 1; ++i) {
        const Index c = row + i;
        out(c, 0) = (u(c + sy, 2) - u(c - sy, 2) - u(c + sz, 1) + u(c - sz, 1)) * inv2h;
        out(c, 1) = (u(c + sz, 0) - u(c - sz, 0) - u(c + sx, 2) + u(c - sx, 2)) * inv2h;
        out(c, 2) = (u(c + sx, 1) - u(c - sx, 1) - u(c + sy, 0) + u(c - sy, 0)) * inv2h;
      }
    }
  });
  return out;
}

void ElasticLeapfrog::apply_operator(const Eigen::MatrixXd& in, Eigen::MatrixXd& out) const {
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real inv_h2 = 1.0 / (box_.h * box_.h);
  const Real inv2h = 1.0 / (2.0 * box_.h);
  const Real mu = ep_.mu, lm = ep_.lambda + ep_.mu;

  centered_divergence(in, box_, div_scratch_);
  const auto& div = div_scratch_;
  const Index strides[3] = {sx, sy, sz};
  parallel_for(2, nz - 2, [&](Index k) {
    for (Index j = 2; j < ny - 2; ++j) {
      const Index row = k * sz + j * sy;
      for (Index i = 2; i < nx - 2; ++i) {
        const Index c = row + i;
        for (int comp = 0; comp < 3; ++comp) {
          const Real lap = (in(c + sx, comp) + in(c - sx, comp) + in(c + sy, comp) +
                            in(c - sy, comp) + in(c + sz, comp) + in(c - sz, comp) -
                            6.0 * in(c, comp)) *
                           inv_h2;
          const Index s = strides[comp];
          const Real gd = (div[c + s] - div[c - s]) * inv2h;
          out(c, comp) = mu * lap + lm * gd;
        }
      }
    }
  });
}

void ElasticLeapfrog::set_initial(const Eigen::MatrixXd& f0, const Eigen::MatrixXd& f1) {
  require(f0.rows() == box_.cells() && f1.rows() == box_.cells() && f0.cols() == 3 &&
              f1.cols() == 3,
          "ElasticLeapfrog: field size mismatch");
  prev_ = f0;
  scratch_.setZero();
  apply_operator(prev_, scratch_);
  cur_ = prev_ - dt_ * f1 + (0.5 * dt_ * dt_ / ep_.rho) * scratch_;
}

void ElasticLeapfrog::step() {
  apply_operator(cur_, scratch_);
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sy = nx, sz = Index(nx) * ny;
  const Real a = dt_ * dt_ / ep_.rho;
  parallel_for(2, nz - 2, [&](Index k) {
    for (Index j = 2; j < ny - 2; ++j) {
      const Index row = k * sz + j * sy;
      for (Index i = 2; i < nx - 2; ++i) {
        const Index c = row + i;
        for (int comp = 0; comp < 3; ++comp)
          prev_(c, comp) = 2.0 * cur_(c, comp) - prev_(c, comp) + a * scratch_(c, comp);
      }
    }
  });
  prev_.swap(cur_);
}

void ElasticLeapfrog::reverse() { prev_.swap(cur_); }

Real ElasticLeapfrog::discrete_energy() const {
  const int nx = box_.n[0], ny = box_.n[1], nz = box_.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real h3 = box_.cell_volume();
  const Real kin = ep_.rho * (cur_ - prev_).squaredNorm() / (dt_ * dt_);

  Real pot_mu = 0.0;
  const Index strides[3] = {sx, sy, sz};
  for (int axis = 0; axis < 3; ++axis) {
    const Index s = strides[axis];
    const int lim[3] = {axis == 0 ? nx - 1 : nx, axis == 1 ? ny - 1 : ny,
                        axis == 2 ? nz - 1 : nz};
    for (Index k = 0; k < lim[2]; ++k)
      for (Index j = 0; j < lim[1]; ++j)
        for (Index i = 0; i < lim[0]; ++i) {
          const Index c = k * sz + j * sy + i;
          for (int comp = 0; comp < 3; ++comp)
            pot_mu += (prev_(c + s, comp) - prev_(c, comp)) *
                      (cur_(c + s, comp) - cur_(c, comp));
        }
  }
  pot_mu *= ep_.mu / (box_.h * box_.h);

  Eigen::VectorXd da = Eigen::VectorXd::Zero(box_.cells());
  Eigen::VectorXd db = Eigen::VectorXd::Zero(box_.cells());
  centered_divergence(prev_, box_, da);
  centered_divergence(cur_, box_, db);
  const Real pot_div = (ep_.lambda + ep_.mu) * da.dot(db);

  return 0.5 * h3 * (kin + pot_mu + pot_div);
}

// ---------------------------------------------------------------------------
// forward drivers
// ---------------------------------------------------------------------------

namespace {

VoxelGrid make_box(const Vec3& center, const FdtdConfig& cfg) {
  require(cfg.box_half_width > 0 && cfg.box_cells >= 8, "fdtd: bad box");
  require(cfg.cfl > 0 && cfg.cfl <= 1.0, "fdtd: CFL factor must be in (0, 1]");
  VoxelGrid box;
  box.h = 2.0 * cfg.box_half_width / cfg.box_cells;
  box.origin = center - Vec3::Constant(cfg.box_half_width);
  box.n.setConstant(cfg.box_cells);
  return box;
}

void check_containment(const std::vector<Bump>& bumps, const Vec3& center,
                       const FdtdConfig& cfg, Real c_max, Real h) {
  for (const Bump& b : bumps) {
    const Real reach = (b.center - center).cwiseAbs().maxCoeff() + b.support_radius() +
                       c_max * cfg.t_end;
    require(reach <= cfg.box_half_width - 2.0 * h,
            "fdtd: light cone reaches the computational box wall");
  }
}

// fixed trilinear stencils for the mesh nodes
struct TraceRecorder {
  std::vector<std::array<int, 3>> base;
  std::vector<std::array<Real, 3>> frac;

  TraceRecorder(const BoundaryMesh& mesh, const VoxelGrid& grid) {
    base.resize(static_cast<std::size_t>(mesh.size()));
    frac.resize(static_cast<std::size_t>(mesh.size()));
    for (Index m = 0; m < mesh.size(); ++m) {
      const Vec3 s = (mesh.nodes.col(m) - grid.origin) / grid.h - Vec3::Constant(0.5);
      for (int a = 0; a < 3; ++a) {
        const Real clamped = std::clamp(s[a], 0.0, Real(grid.n[a] - 1) - 1e-12);
        int b = std::max(0, std::min(static_cast<int>(std::floor(clamped)), grid.n[a] - 2));
        base[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)] = b;
        frac[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)] = clamped - b;
      }
    }
  }

  template <typename FieldLike>
  void record(const FieldLike& field, const VoxelGrid& grid, int comp, int arity,
              int step, Eigen::MatrixXd& out) const {
    const Index m = static_cast<Index>(base.size());
    for (Index node = 0; node < m; ++node) {
      const auto& b = base[static_cast<std::size_t>(node)];
      const auto& f = frac[static_cast<std::size_t>(node)];
      Real acc = 0.0;
      for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const Real w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) *
                           (dz ? f[2] : 1 - f[2]);
            acc += w * field(grid.flat(b[0] + dx, b[1] + dy, b[2] + dz));
          }
      out(node * arity + comp, step) = acc;
    }
  }
};

}  // namespace

FdtdResult fdtd_scalar_forward(const std::vector<Bump>& f0, const std::vector<Bump>& f1,
                               const BoundaryMesh& mesh, const Vec3& box_center,
                               const FdtdConfig& cfg) {
  FdtdResult result;
  result.box = make_box(box_center, cfg);
  const Real c = 1.0;
  check_containment(f0, box_center, cfg, c, result.box.h);
  check_containment(f1, box_center, cfg, c, result.box.h);

  const Real dt = cfg.cfl * result.box.h / (std::sqrt(3.0) * c);
  const int steps = static_cast<int>(std::ceil(cfg.t_end / dt));

  ScalarLeapfrog solver(result.box, c, dt);
  solver.set_initial(rasterize_bumps_on_grid(f0, result.box, 0),
                     rasterize_bumps_on_grid(f1, result.box, 0));

  TraceRecorder rec(mesh, result.box);
  result.trace.dt = dt;
  result.trace.arity = 1;
  result.trace.nodes = mesh.size();
  result.trace.values.setZero(mesh.size(), steps + 1);

  std::vector<Real> want = cfg.snapshot_times;
  std::sort(want.begin(), want.end());
  std::size_t next_snap = 0;

  // solver levels are (prev = t - dt, cur = t); step n stores time n * dt
  rec.record(solver.previous(), result.box, 0, 1, 0, result.trace.values);
  for (int n = 1; n <= steps; ++n) {
    rec.record(solver.current(), result.box, 0, 1, n, result.trace.values);
    while (next_snap < want.size() && want[next_snap] <= n * dt + 1e-12) {
      result.snapshots.emplace_back(solver.current());
      result.snapshot_times.push_back(n * dt);
      ++next_snap;
    }
    if (cfg.record_energy) result.energy.push_back(solver.discrete_energy());
    if (n < steps) solver.step();
  }
  return result;
}

FdtdResult fdtd_elastic_forward(const std::vector<Bump>& f0, const std::vector<Bump>& f1,
                                const ElasticParams& ep, const BoundaryMesh& mesh,
                                const Vec3& box_center, const FdtdConfig& cfg) {
  ep.validate();
  FdtdResult result;
  result.box = make_box(box_center, cfg);
  check_containment(f0, box_center, cfg, ep.cp(), result.box.h);
  check_containment(f1, box_center, cfg, ep.cp(), result.box.h);

  const Real dt = cfg.cfl * result.box.h / (std::sqrt(3.0) * ep.cp());
  const int steps = static_cast<int>(std::ceil(cfg.t_end / dt));

  ElasticLeapfrog solver(result.box, ep, dt);
  Eigen::MatrixXd init0(result.box.cells(), 3), init1(result.box.cells(), 3);
  for (int comp = 0; comp < 3; ++comp) {
    init0.col(comp) = rasterize_bumps_on_grid(f0, result.box, comp);
    init1.col(comp) = rasterize_bumps_on_grid(f1, result.box, comp);
  }
  solver.set_initial(init0, init1);

  TraceRecorder rec(mesh, result.box);
  result.trace.dt = dt;
  result.trace.arity = 3;
  result.trace.nodes = mesh.size();
  result.trace.values.setZero(mesh.size() * 3, steps + 1);

  std::vector<Real> want = cfg.snapshot_times;
  std::sort(want.begin(), want.end());
  std::size_t next_snap = 0;

  for (int comp = 0; comp < 3; ++comp)
    rec.record(init0.col(comp), result.box, comp, 3, 0, result.trace.values);
  for (int n = 1; n <= steps; ++n) {
    for (int comp = 0; comp < 3; ++comp)
      rec.record(solver.current().col(comp), result.box, comp, 3, n, result.trace.values);
    while (next_snap < want.size() && want[next_snap] <= n * dt + 1e-12) {
      result.snapshots.emplace_back(solver.current());
      result.snapshot_times.push_back(n * dt);
      ++next_snap;
    }
    if (cfg.record_energy) result.energy.push_back(solver.discrete_energy());
    if (n < steps) solver.step();
  }
  return result;
}

// ---------------------------------------------------------------------------
// backward solves
// ---------------------------------------------------------------------------

BackwardStencil classify_backward_cells(const Domain& domain, bool elastic) {
  const VoxelGrid& g = domain.grid;
  std::vector<std::array<int, 3>> compact_offsets;  // axis and diagonal, reach 1
  std::vector<std::array<int, 3>> wide_offsets;     // adds the +-2e reach
  for (int a = 0; a < 3; ++a)
    for (int s = -1; s <= 1; s += 2) {
      std::array<int, 3> o{0, 0, 0};
      o[static_cast<std::size_t>(a)] = s;
      compact_offsets.push_back(o);
      if (elastic) {
        o[static_cast<std::size_t>(a)] = 2 * s;
        wide_offsets.push_back(o);
      }
    }
  if (elastic) {
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        for (int sa = -1; sa <= 1; sa += 2)
          for (int sb = -1; sb <= 1; sb += 2) {
            std::array<int, 3> o{0, 0, 0};
            o[static_cast<std::size_t>(a)] = sa;
            o[static_cast<std::size_t>(b)] = sb;
            compact_offsets.push_back(o);
          }
  }

  const auto cell_inside = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= g.n[0] || j >= g.n[1] || k >= g.n[2])
      return false;
    return domain.inside[static_cast<std::size_t>(g.flat(i, j, k))] != 0;
  };
  const auto all_inside = [&](int i, int j, int k,
                              const std::vector<std::array<int, 3>>& offsets) {
    for (const auto& o : offsets)
      if (!cell_inside(i + o[0], j + o[1], k + o[2])) return false;
    return true;
  };

  BackwardStencil st;
  for (int k = 0; k < g.n[2]; ++k)
    for (int j = 0; j < g.n[1]; ++j)
      for (int i = 0; i < g.n[0]; ++i) {
        if (!cell_inside(i, j, k)) continue;
        const Index c = g.flat(i, j, k);
        if (!all_inside(i, j, k, compact_offsets)) {
          st.injection.push_back(c);
          st.injection_points.push_back(project_to_boundary(domain.shape, g.center(c)));
        } else if (elastic && !all_inside(i, j, k, wide_offsets)) {
          st.fringe.push_back(c);
        } else {
          st.interior.push_back(c);
        }
      }
  return st;
}

SurfaceInterp build_surface_interp(const BoundaryMesh& mesh,
                                   const std::vector<Vec3>& points, int k) {
  const Index np = static_cast<Index>(points.size());
  const int kk = std::min<int>(k, static_cast<int>(mesh.size()));
  SurfaceInterp interp;
  interp.weights.setZero(np, kk);
  interp.neighbors.setZero(np, kk);
  parallel_for(0, np, [&](Index p) {
    std::vector<std::pair<Real, int>> dist;
    dist.reserve(static_cast<std::size_t>(mesh.size()));
    for (Index m = 0; m < mesh.size(); ++m)
      dist.emplace_back((mesh.nodes.col(m) - points[static_cast<std::size_t>(p)]).norm(),
                        static_cast<int>(m));
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    Real wsum = 0.0;
    for (int q = 0; q < kk; ++q) {
      const Real w = 1.0 / (dist[static_cast<std::size_t>(q)].first + 1e-12);
      interp.weights(p, q) = w;
      interp.neighbors(p, q) = dist[static_cast<std::size_t>(q)].second;
      wsum += w;
    }
    interp.weights.row(p) /= wsum;
  });
  return interp;
}

BackwardResult fdtd_scalar_backward(const Domain& domain, const BackwardStencil& cells,
                                    const Eigen::MatrixXd& injected, Real dt, int steps) {
  const Index nc = static_cast<Index>(cells.injection.size());
  require(injected.rows() == nc, "backward solve: injection row count mismatch");
  require(injected.cols() >= steps + 1, "backward solve: injection series too short");
  require(steps >= 3, "backward solve: too few steps");
  if (dt * steps < domain.diameter - 1e-12)
    std::fprintf(stderr,
                 "warning: backward window %.3g shorter than the crossing time %.3g; "
                 "reconstruction bias expected\n",
                 dt * steps, domain.diameter);

  ScalarLeapfrog lf(domain.grid, 1.0, dt);
  lf.set_initial(Eigen::VectorXd::Zero(domain.grid.cells()),
                 Eigen::VectorXd::Zero(domain.grid.cells()));
  const auto inject = [&](int forward_step) {
    auto& field = lf.mutable_current();
    for (Index q = 0; q < nc; ++q)
      field[cells.injection[static_cast<std::size_t>(q)]] = injected(q, forward_step);
  };

  // levels (prev, cur) = (U(t_end), U(t_end - dt)), both zero interior
  inject(steps);
  lf.reverse();
  inject(steps - 1);
  for (int m = 1; m < steps; ++m) {
    lf.step();
    inject(steps - m - 1);
  }
  // cur = U(0), prev = U(dt)
  const Eigen::VectorXd u0 = lf.current();
  const Eigen::VectorXd u1 = lf.previous();
  lf.reverse();
  lf.step();
  inject(2);
  const Eigen::VectorXd u2 = lf.current();  // U(2 dt)

  const Index cellsn = domain.grid.cells();
  BackwardResult out;
  out.dt = dt;
  out.steps = steps;
  out.f0.setZero(cellsn, 1);
  out.f1.setZero(cellsn, 1);
  for (Index c = 0; c < cellsn; ++c) {
    if (!domain.inside[static_cast<std::size_t>(c)]) continue;
    out.f0(c, 0) = u0[c];
    out.f1(c, 0) = -(-3.0 * u0[c] + 4.0 * u1[c] - u2[c]) / (2.0 * dt);
  }
  return out;
}

namespace {

// mu Lap + (lambda + mu) grad div with compact diagonal second differences,
// evaluated on a cell list (one-cell reach; used on the backward fringe)
void compact_lame_next(const ElasticParams& ep, const VoxelGrid& g,
                       const std::vector<Index>& cells, const Eigen::MatrixXd& prev,
                       const Eigen::MatrixXd& cur, Real dt, Eigen::MatrixXd& next) {
  const Index sx = 1, sy = g.n[0], sz = Index(g.n[0]) * g.n[1];
  const Index strides[3] = {sx, sy, sz};
  const Real inv_h2 = 1.0 / (g.h * g.h);
  const Real inv4h2 = 0.25 * inv_h2;
  const Real mu = ep.mu, lm = ep.lambda + ep.mu;
  const Real a = dt * dt / ep.rho;
  next.resize(static_cast<Index>(cells.size()), 3);
  parallel_for(0, static_cast<Index>(cells.size()), [&](Index q) {
    const Index c = cells[static_cast<std::size_t>(q)];
    for (int comp = 0; comp < 3; ++comp) {
      Real lap = -6.0 * cur(c, comp);
      for (const Index s : strides) lap += cur(c + s, comp) + cur(c - s, comp);
      lap *= inv_h2;
      // sum_m d_comp d_m u_m with compact diagonals
      const Index sc = strides[comp];
      Real gd = (cur(c + sc, comp) - 2.0 * cur(c, comp) + cur(c - sc, comp)) * inv_h2;
      for (int m = 0; m < 3; ++m) {
        if (m == comp) continue;
        const Index sm = strides[m];
        gd += (cur(c + sc + sm, m) - cur(c + sc - sm, m) - cur(c - sc + sm, m) +
               cur(c - sc - sm, m)) *
              inv4h2;
      }
      next(q, comp) = 2.0 * cur(c, comp) - prev(c, comp) + a * (mu * lap + lm * gd);
    }
  });
}

}  // namespace

BackwardResult fdtd_elastic_backward(const Domain& domain, const ElasticParams& ep,
                                     const BackwardStencil& cells,
                                     const Eigen::MatrixXd& injected, Real dt, int steps) {
  const Index nc = static_cast<Index>(cells.injection.size());
  require(injected.rows() == nc * 3, "backward solve: injection row count mismatch");
  require(injected.cols() >= steps + 1, "backward solve: injection series too short");
  require(steps >= 3, "backward solve: too few steps");
  if (dt * steps < domain.diameter / ep.cs() - 1e-12)
    std::fprintf(stderr,
                 "warning: backward window %.3g shorter than the crossing time %.3g; "
                 "reconstruction bias expected\n",
                 dt * steps, domain.diameter / ep.cs());

  ElasticLeapfrog lf(domain.grid, ep, dt);
  lf.set_initial(Eigen::MatrixXd::Zero(domain.grid.cells(), 3),
                 Eigen::MatrixXd::Zero(domain.grid.cells(), 3));
  const auto inject = [&](int forward_step) {
    auto& field = lf.mutable_current();
    for (Index q = 0; q < nc; ++q)
      for (int a = 0; a < 3; ++a)
        field(cells.injection[static_cast<std::size_t>(q)], a) =
            injected(q * 3 + a, forward_step);
  };

  Eigen::MatrixXd fringe_next;
  const auto step_with_fringe = [&]() {
    compact_lame_next(ep, domain.grid, cells.fringe, lf.previous(), lf.current(), dt,
                      fringe_next);
    lf.step();
    auto& field = lf.mutable_current();
    for (Index q = 0; q < static_cast<Index>(cells.fringe.size()); ++q)
      for (int a = 0; a < 3; ++a)
        field(cells.fringe[static_cast<std::size_t>(q)], a) = fringe_next(q, a);
  };

  inject(steps);
  lf.reverse();
  inject(steps - 1);
  for (int m = 1; m < steps; ++m) {
    step_with_fringe();
    inject(steps - m - 1);
  }
  const Eigen::MatrixXd u0 = lf.current();
  const Eigen::MatrixXd u1 = lf.previous();
  lf.reverse();
  step_with_fringe();
  inject(2);
  const Eigen::MatrixXd u2 = lf.current();

  const Index cellsn = domain.grid.cells();
  BackwardResult out;
  out.dt = dt;
  out.steps = steps;
  out.f0.setZero(cellsn, 3);
  out.f1.setZero(cellsn, 3);
  for (Index c = 0; c < cellsn; ++c) {
    if (!domain.inside[static_cast<std::size_t>(c)]) continue;
    for (int a = 0; a < 3; ++a) {
      out.f0(c, a) = u0(c, a);
      out.f1(c, a) = -(-3.0 * u0(c, a) + 4.0 * u1(c, a) - u2(c, a)) / (2.0 * dt);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// wavefront diagnostics
// ---------------------------------------------------------------------------

namespace {

// radius of the outgoing front, taken as the outermost shell-profile peak
// above `threshold` of the global peak, with parabolic subcell refinement
Real front_radius(const Eigen::VectorXd& magnitude, const VoxelGrid& grid,
                  const Vec3& origin, Real threshold) {
  const Real rmax = 0.5 * grid.h * grid.n.cast<Real>().matrix().norm();
  const int bins = std::max(4, static_cast<int>(std::floor(rmax / grid.h)));
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins);
  Eigen::VectorXd cnt = Eigen::VectorXd::Zero(bins);
  for (Index c = 0; c < grid.cells(); ++c) {
    const Real r = (grid.center(c) - origin).norm();
    const int b = static_cast<int>(r / grid.h);
    if (b >= bins) continue;
    sum[b] += magnitude[c];
    cnt[b] += 1.0;
  }
  Eigen::VectorXd prof(bins);
  for (int b = 0; b < bins; ++b) prof[b] = cnt[b] > 0 ? sum[b] / cnt[b] : 0.0;
  const Real peak = prof.maxCoeff();
  if (peak <= 0) return 0.0;
  const Real thr = threshold * peak;
  for (int b = bins - 2; b >= 1; --b) {
    if (prof[b] >= thr && prof[b] >= prof[b - 1] && prof[b] >= prof[b + 1]) {
      const Real den = prof[b - 1] - 2.0 * prof[b] + prof[b + 1];
      Real shift = 0.0;
      if (den < 0.0) shift = std::clamp(0.5 * (prof[b - 1] - prof[b + 1]) / den, -0.5, 0.5);
      return (b + 0.5 + shift) * grid.h;
    }
  }
  return 0.0;
}

Real fit_slope(const std::vector<Real>& x, const std::vector<Real>& y) {
  const Real n = static_cast<Real>(x.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const Real den = n * sxx - sx * sx;
  require(std::abs(den) > 1e-30, "fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

}  // namespace

SpeedEstimate curl_div_probe(const std::vector<Eigen::MatrixXd>& snapshots,
                             const std::vector<Real>& times, const VoxelGrid& box,
                             const Vec3& origin, Real threshold) {
  require(snapshots.size() == times.size(), "curl_div_probe: time list mismatch");
  require(snapshots.size() >= 3, "curl_div_probe: need at least three snapshots");

  const int nx = box.n[0], ny = box.n[1], nz = box.n[2];
  const Index sx = 1, sy = nx, sz = Index(nx) * ny;
  const Real inv2h = 1.0 / (2.0 * box.h);

  std::vector<Real> rdiv, rcurl;
  for (const auto& u : snapshots) {
    Eigen::VectorXd divmag = Eigen::VectorXd::Zero(box.cells());
    Eigen::VectorXd curlmag = Eigen::VectorXd::Zero(box.cells());
    for (Index k = 1; k < nz - 1; ++k)
      for (Index j = 1; j < ny - 1; ++j)
        for (Index i = 1; i < nx - 1; ++i) {
          const Index c = k * sz + j * sy + i;
          const Real dv = (u(c + sx, 0) - u(c - sx, 0) + u(c + sy, 1) - u(c - sy, 1) +
                           u(c + sz, 2) - u(c - sz, 2)) *
                          inv2h;
          const Real cx = (u(c + sy, 2) - u(c - sy, 2) - u(c + sz, 1) + u(c - sz, 1)) * inv2h;
          const Real cy = (u(c + sz, 0) - u(c - sz, 0) - u(c + sx, 2) + u(c - sx, 2)) * inv2h;
          const Real cz = (u(c + sx, 1) - u(c - sx, 1) - u(c + sy, 0) + u(c - sy, 0)) * inv2h;
          divmag[c] = std::abs(dv);
          curlmag[c] = std::sqrt(cx * cx + cy * cy + cz * cz);
        }
    rdiv.push_back(front_radius(divmag, box, origin, threshold));
    rcurl.push_back(front_radius(curlmag, box, origin, threshold));
  }
  SpeedEstimate est;
  est.pressure = fit_slope(times, rdiv);
  est.shear = fit_slope(times, rcurl);
  return est;
}

}  // namespace islab
