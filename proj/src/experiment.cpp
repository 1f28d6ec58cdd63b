#include "islab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "islab/time_synthesis.hpp"
#include "islab/version.hpp"

namespace islab {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

void ExperimentConfig::validate() const {
  require(grid_cells >= 8, "config: grid_cells too small");
  require(mesh_nodes >= 16, "config: mesh_nodes too small");
  require(omega_max > 0.0, "config: omega_max must be positive");
  require(epsilon_target >= 0.0, "config: negative noise level");
  require(normalize_eps0 > 0.0, "config: normalize_eps0 must be positive");
  require(cfl > 0.0 && cfl <= 1.0, "config: cfl must be in (0, 1]");
  if (physics == PhysicsKind::Elastic) {
    elastic.validate();
    require(source.arity == 3, "config: elastic physics needs a vector source");
  } else {
    require(source.arity == 1, "config: scalar physics needs a scalar source");
  }
  const Real D = analytic_diameter(shape);
  const Real dom_limit = kPi * c_min() / (4.0 * D);
  if (domega > 0.0)
    require(domega <= dom_limit + 1e-12,
            "config: domega exceeds the synthesis Nyquist limit pi/T");
  for (Real K : k_ladder)
    require(K > 0.0 && K <= omega_max + 1e-12, "config: ladder K outside the band");
}

namespace {

ojson vec3_json(const Vec3& v) { return ojson::array({v[0], v[1], v[2]}); }

Vec3 parse_vec3(const nlohmann::json& j) {
  require(j.is_array() && j.size() == 3, "config: expected a 3-vector");
  return Vec3(j[0].get<Real>(), j[1].get<Real>(), j[2].get<Real>());
}

ojson bump_json(const Bump& b) {
  ojson j;
  j["kind"] = b.kind == BumpKind::Gaussian ? "gaussian" : "power";
  j["center"] = vec3_json(b.center);
  if (b.kind == BumpKind::Gaussian) {
    j["sigma"] = b.width;
    j["cut_radius"] = b.cut_radius;
  } else {
    j["radius"] = b.width;
    j["exponent"] = b.exponent;
  }
  j["amplitude"] = vec3_json(b.amplitude);
  return j;
}

Bump parse_bump(const nlohmann::json& j) {
  Bump b;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    b.kind = BumpKind::Gaussian;
    b.width = j.at("sigma").get<Real>();
    b.cut_radius = j.value("cut_radius", 0.0);
  } else if (kind == "power") {
    b.kind = BumpKind::Power;
    b.width = j.at("radius").get<Real>();
    b.exponent = j.value("exponent", 1.0);
  } else {
    throw std::invalid_argument("config: unknown bump kind '" + kind + "'");
  }
  if (j.contains("center")) b.center = parse_vec3(j.at("center"));
  if (j.contains("amplitude")) {
    const auto& a = j.at("amplitude");
    require(a.is_array() && (a.size() == 1 || a.size() == 3),
            "config: amplitude must have 1 or 3 entries");
    b.amplitude = Vec3::Zero();
    for (std::size_t q = 0; q < a.size(); ++q) b.amplitude[static_cast<int>(q)] = a[q].get<Real>();
  }
  return b;
}

}  // namespace

std::string ExperimentConfig::canonical_json() const {
  ojson j;
  j["physics"] = physics == PhysicsKind::Elastic ? "elastic" : "scalar";
  if (physics == PhysicsKind::Elastic)
    j["elastic"] = {{"lambda", elastic.lambda}, {"mu", elastic.mu}, {"rho", elastic.rho}};
  ojson dom;
  switch (shape.kind) {
    case ShapeKind::Ball:
      dom["shape"] = "ball";
      dom["center"] = vec3_json(shape.center);
      dom["radius"] = shape.radius;
      break;
    case ShapeKind::Box:
      dom["shape"] = "box";
      dom["center"] = vec3_json(shape.center);
      dom["half_extent"] = vec3_json(shape.half_extent);
      break;
    case ShapeKind::BallUnion: {
      dom["shape"] = "ball_union";
      ojson balls = ojson::array();
      for (const auto& [c, r] : shape.balls)
        balls.push_back(ojson{{"center", vec3_json(c)}, {"radius", r}});
      dom["balls"] = balls;
      break;
    }
  }
  dom["grid_cells"] = grid_cells;
  if (refined_grid_cells > 0) dom["refined_grid_cells"] = refined_grid_cells;
  dom["mesh_nodes"] = mesh_nodes;
  j["domain"] = dom;

  ojson src;
  src["arity"] = source.arity;
  ojson f0 = ojson::array(), f1 = ojson::array();
  for (const Bump& b : source.f0) f0.push_back(bump_json(b));
  for (const Bump& b : source.f1) f1.push_back(bump_json(b));
  src["f0"] = f0;
  src["f1"] = f1;
  j["source"] = src;

  j["band"] = {{"omega_max", omega_max}, {"domega", domega}};
  j["k_ladder"] = k_ladder;
  j["noise"] = epsilon_target;
  j["normalize_eps0"] = normalize_eps0;
  j["fdtd_box_cells"] = fdtd_box_cells;
  j["cfl"] = cfl;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["threads"] = threads;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  const std::string phys = j.value("physics", std::string("scalar"));
  if (phys == "elastic")
    cfg.physics = PhysicsKind::Elastic;
  else if (phys == "scalar")
    cfg.physics = PhysicsKind::Scalar;
  else
    throw std::invalid_argument("config: unknown physics '" + phys + "'");
  if (j.contains("elastic")) {
    const auto& e = j.at("elastic");
    cfg.elastic.lambda = e.value("lambda", 1.0);
    cfg.elastic.mu = e.value("mu", 1.0);
    cfg.elastic.rho = e.value("rho", 1.0);
  }
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    const std::string kind = d.value("shape", std::string("ball"));
    if (kind == "ball") {
      cfg.shape = ShapeSpec::ball(d.contains("center") ? parse_vec3(d.at("center"))
                                                       : Vec3::Zero(),
                                  d.value("radius", 1.0));
    } else if (kind == "box") {
      cfg.shape = ShapeSpec::box(
          d.contains("center") ? parse_vec3(d.at("center")) : Vec3::Zero(),
          d.contains("half_extent") ? parse_vec3(d.at("half_extent"))
                                    : Vec3::Constant(0.5));
    } else if (kind == "ball_union") {
      std::vector<std::pair<Vec3, Real>> balls;
      for (const auto& bj : d.at("balls"))
        balls.emplace_back(parse_vec3(bj.at("center")), bj.at("radius").get<Real>());
      cfg.shape = ShapeSpec::ball_union(std::move(balls));
    } else {
      throw std::invalid_argument("config: unknown shape '" + kind + "'");
    }
    cfg.grid_cells = d.value("grid_cells", 48);
    cfg.refined_grid_cells = d.value("refined_grid_cells", 0);
    cfg.mesh_nodes = d.value("mesh_nodes", 1500);
  }
  if (j.contains("source")) {
    const auto& s = j.at("source");
    cfg.source.arity = s.value("arity", cfg.physics == PhysicsKind::Elastic ? 3 : 1);
    if (s.contains("f0"))
      for (const auto& bj : s.at("f0")) cfg.source.f0.push_back(parse_bump(bj));
    if (s.contains("f1"))
      for (const auto& bj : s.at("f1")) cfg.source.f1.push_back(parse_bump(bj));
  } else {
    cfg.source.arity = cfg.physics == PhysicsKind::Elastic ? 3 : 1;
  }
  if (j.contains("band")) {
    cfg.omega_max = j.at("band").value("omega_max", 0.0);
    cfg.domega = j.at("band").value("domega", 0.0);
  }
  if (j.contains("k_ladder"))
    for (const auto& kj : j.at("k_ladder")) cfg.k_ladder.push_back(kj.get<Real>());
  cfg.epsilon_target = j.value("noise", 1e-2);
  cfg.normalize_eps0 = j.value("normalize_eps0", 0.5);
  cfg.fdtd_box_cells = j.value("fdtd_box_cells", 64);
  cfg.cfl = j.value("cfl", 0.9);
  cfg.seed = j.value("seed", std::uint64_t(1));
  cfg.output_dir = j.value("output_dir", std::string("out"));
  cfg.threads = j.value("threads", 0);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "config: cannot open file");
  std::stringstream buf;
  buf << is.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::hash() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json())));
  return buf;
}

// ---------------------------------------------------------------------------
// noise
// ---------------------------------------------------------------------------

FrequencySweep add_noise(const FrequencySweep& sweep, const BoundaryMesh& mesh,
                         Real eps_target, std::uint64_t seed) {
  require(eps_target >= 0.0, "add_noise: negative target");
  if (eps_target == 0.0) return sweep;
  FrequencySweep noise = sweep;
  std::uint64_t state = seed;
  Rng rng(splitmix64(state));
  for (Index r = 0; r < noise.values.rows(); ++r)
    for (int j = 0; j < noise.grid.count; ++j)
      noise.values(r, j) = Complex(rng.normal(), rng.normal());
  const Real measured =
      std::sqrt(band_functional_sweep(noise, mesh, BandWeight::Value,
                                      noise.grid.omega_max()));
  require(measured > 0.0, "add_noise: degenerate perturbation");
  noise.values *= eps_target / measured;
  FrequencySweep out = sweep;
  out.values += noise.values;
  return out;
}

// ---------------------------------------------------------------------------
// forward preparation and reconstruction
// ---------------------------------------------------------------------------

namespace {

Real shape_extent(const ShapeSpec& shape) {
  Vec3 lo, hi;
  switch (shape.kind) {
    case ShapeKind::Ball:
      return 2.0 * shape.radius;
    case ShapeKind::Box:
      return 2.0 * shape.half_extent.maxCoeff();
    case ShapeKind::BallUnion: {
      lo = Vec3::Constant(std::numeric_limits<Real>::infinity());
      hi = -lo;
      for (const auto& [c, r] : shape.balls) {
        lo = lo.cwiseMin(c - Vec3::Constant(r));
        hi = hi.cwiseMax(c + Vec3::Constant(r));
      }
      return (hi - lo).maxCoeff();
    }
  }
  return 0.0;
}

FrequencyGrid config_grid(const ExperimentConfig& cfg, Real diameter) {
  const Real dom =
      cfg.domega > 0.0 ? cfg.domega : kPi * cfg.c_min() / (4.0 * diameter);
  return make_frequency_grid(cfg.omega_max, dom);
}

FrequencySweep config_sweep(const ExperimentConfig& cfg, const SourcePair& src,
                            const BoundaryMesh& mesh, const FrequencyGrid& grid) {
  return cfg.physics == PhysicsKind::Elastic
             ? forward_sweep_elastic(src, mesh, grid, cfg.elastic)
             : forward_sweep(src, mesh, grid);
}

}  // namespace

ForwardData prepare_forward(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.threads > 0) set_worker_threads(cfg.threads);
  ForwardData fd;
  const Real h = shape_extent(cfg.shape) / cfg.grid_cells;
  fd.domain = build_domain(cfg.shape, h, cfg.mesh_nodes);
  fd.source = rasterize_source(cfg.source, fd.domain);
  fd.grid = config_grid(cfg, fd.domain.diameter);
  fd.sweep = config_sweep(cfg, fd.source, fd.domain.mesh, fd.grid);

  // nondimensionalize so the full-band data norm sits below one
  const Real eps_full = std::sqrt(band_functional_sweep(
      fd.sweep, fd.domain.mesh, BandWeight::Value, fd.grid.omega_max()));
  if (eps_full > 0.0) {
    fd.normalization = cfg.normalize_eps0 / eps_full;
    scale_source(fd.source, fd.normalization);
    fd.sweep.values *= fd.normalization;
  }
  fd.norms = compute_source_norms(fd.source);
  return fd;
}

BackwardResult reconstruct(const ExperimentConfig& cfg, const Domain& domain,
                           const FrequencySweep& data, Real k_cut) {
  const bool elastic = cfg.physics == PhysicsKind::Elastic;
  const BackwardStencil cells = classify_backward_cells(domain, elastic);
  const SurfaceInterp interp = build_surface_interp(domain.mesh, cells.injection_points);

  const Real dt = cfg.cfl * domain.grid.h / (std::sqrt(3.0) * cfg.c_max());
  const Real t_final = domain.diameter / cfg.c_min() + 6.0 * dt;
  const int steps = static_cast<int>(std::ceil(t_final / dt));

  Eigen::VectorXd times(steps + 1);
  for (int n = 0; n <= steps; ++n) times[n] = n * dt;
  const Eigen::MatrixXd mesh_series = synthesize_at_times(data, k_cut, times);

  const int arity = data.arity;
  Eigen::MatrixXd injected(static_cast<Index>(cells.injection.size()) * arity, steps + 1);
  parallel_for(0, static_cast<Index>(cells.injection.size()), [&](Index q) {
    for (int a = 0; a < arity; ++a) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(steps + 1);
      for (int w = 0; w < interp.weights.cols(); ++w)
        row += interp.weights(q, w) *
               mesh_series.row(Index(interp.neighbors(q, w)) * arity + a);
      injected.row(q * arity + a) = row;
    }
  });

  return elastic ? fdtd_elastic_backward(domain, cfg.elastic, cells, injected, dt, steps)
                 : fdtd_scalar_backward(domain, cells, injected, dt, steps);
}

ReconstructionErrors reconstruction_errors(const Domain& domain, const SourcePair& truth,
                                           const SourceNorms& truth_norms,
                                           const BackwardResult& rec) {
  const Index cells = domain.grid.cells();
  const int arity = static_cast<int>(truth.f0.cols());
  Eigen::MatrixXd diff0 = Eigen::MatrixXd::Zero(cells, arity);
  Eigen::MatrixXd diff1 = Eigen::MatrixXd::Zero(cells, arity);
  for (Index c = 0; c < cells; ++c) {
    if (!domain.in_support(c)) continue;
    diff0.row(c) = rec.f0.row(c) - truth.f0.row(c);
    diff1.row(c) = rec.f1.row(c) - truth.f1.row(c);
  }
  const SobolevTransform t0(diff0, domain.grid);
  const SobolevTransform t1(diff1, domain.grid);

  const Real den_f0_l2 = std::max(truth_norms.f0_norm(0), 1e-300);
  const Real den_f0_h1 = std::max(truth_norms.f0_norm(1), 1e-300);
  const Real den_f1_m1 =
      truth_norms.f1_norm(-1) > 1e-14 ? truth_norms.f1_norm(-1) : den_f0_l2;
  const Real den_f1_l2 =
      truth_norms.f1_norm(0) > 1e-14 ? truth_norms.f1_norm(0) : den_f0_l2;

  ReconstructionErrors err;
  const Real d0_l2 = t0.norm(0.0);
  const Real d1_m1 = t1.norm(-1.0);
  err.l2_f0 = d0_l2 / den_f0_l2;
  err.h1_f0 = t0.norm(1.0) / den_f0_h1;
  err.hm1_f1 = d1_m1 / den_f1_m1;
  err.l2_f1 = t1.norm(0.0) / den_f1_l2;
  err.lhs_sq = d0_l2 * d0_l2 + d1_m1 * d1_m1;
  return err;
}

// ---------------------------------------------------------------------------
// the K ladder
// ---------------------------------------------------------------------------

namespace {

Real theorem_ceiling(Real c_cal, Real eps_sq, Real m_sq, Real K, Real E) {
  const Real gain = std::isfinite(E) && E > 0.0 ? 1.0 + std::pow(K, 4.0 / 3.0) * std::sqrt(E)
                                                : 1.0;
  return c_cal * (eps_sq + m_sq / gain);
}

}  // namespace

ExperimentReport run_sweep(const ExperimentConfig& cfg) {
  using clock = std::chrono::steady_clock;
  ExperimentReport report;
  report.config_hash = cfg.hash();
  report.version = kVersion;
  report.physics = cfg.physics == PhysicsKind::Elastic ? "elastic" : "scalar";
  report.epsilon_target = cfg.epsilon_target;

  const ForwardData fd = prepare_forward(cfg);
  report.diameter = fd.domain.diameter;
  report.m1 = fd.norms.M1;
  report.m2e = fd.norms.M2e;
  const Real m_sq = cfg.physics == PhysicsKind::Elastic
                        ? fd.norms.M2e * fd.norms.M2e
                        : fd.norms.M1 * fd.norms.M1;

  std::vector<Real> ladder = cfg.k_ladder;
  if (ladder.empty())
    for (const Real q : {2.0, 4.0, 8.0, 16.0, 32.0})
      ladder.push_back(q / fd.domain.diameter);
  for (const Real K : ladder)
    require(K <= fd.grid.omega_max() + 1e-9, "run_sweep: ladder K beyond the band");

  const auto row_errors = [&](const FrequencySweep& data, Real k_cut) {
    const BackwardResult rec = reconstruct(cfg, fd.domain, data, k_cut);
    return reconstruction_errors(fd.domain, fd.source, fd.norms, rec);
  };

  // pure-noise floor at the widest band: the norm of the reconstruction of
  // noise alone, relative to the true source scale
  if (cfg.epsilon_target > 0.0) {
    FrequencySweep silent = fd.sweep;
    silent.values.setZero();
    std::uint64_t s = cfg.seed;
    splitmix64(s);
    const FrequencySweep noise_only =
        add_noise(silent, fd.domain.mesh, cfg.epsilon_target, s ^ 0x9e3779b9ULL);
    const BackwardResult rec = reconstruct(cfg, fd.domain, noise_only, ladder.back());
    Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(rec.f0.rows(), rec.f0.cols());
    for (Index c = 0; c < fd.domain.grid.cells(); ++c)
      if (fd.domain.in_support(c)) masked.row(c) = rec.f0.row(c);
    report.noise_floor_rel =
        sobolev_norm(masked, fd.domain.grid, 0.0) / std::max(fd.norms.f0_norm(0), 1e-300);
  }

  // discretization floor: noiseless full-band reconstruction at the top K
  report.noiseless_floor_rel = row_errors(fd.sweep, ladder.back()).l2_f0;
  report.plateau_floor_rel = std::max(report.noise_floor_rel, report.noiseless_floor_rel);

  // ceiling constant from a small seed battery
  {
    Real worst = 0.0;
    const std::vector<Real> battery_k = {ladder.front(), ladder[ladder.size() / 2],
                                         ladder.back()};
    for (std::uint64_t bs = 1; bs <= 2; ++bs) {
      for (const Real K : battery_k) {
        const FrequencySweep noisy = add_noise(fd.sweep, fd.domain.mesh,
                                               cfg.epsilon_target, cfg.seed + 7000 + bs);
        const Real eps_sq =
            band_functional_sweep(noisy, fd.domain.mesh, BandWeight::Value, K);
        const Real E = eps_sq < 1.0 ? -std::log(std::sqrt(eps_sq))
                                    : std::numeric_limits<Real>::quiet_NaN();
        const ReconstructionErrors err = row_errors(noisy, K);
        const Real rhs = theorem_ceiling(1.0, eps_sq, m_sq, K, E);
        if (rhs > 0.0) worst = std::max(worst, err.lhs_sq / rhs);
      }
    }
    report.calibrated_ceiling_c = 1.5 * worst;
  }

  for (std::size_t idx = 0; idx < ladder.size(); ++idx) {
    const auto t_start = clock::now();
    ReportRow row;
    row.K = ladder[idx];
    try {
      std::uint64_t s = cfg.seed + idx;
      const FrequencySweep noisy =
          add_noise(fd.sweep, fd.domain.mesh, cfg.epsilon_target, splitmix64(s));
      const Real eps_sq =
          band_functional_sweep(noisy, fd.domain.mesh, BandWeight::Value, row.K);
      row.epsilon = std::sqrt(eps_sq);
      row.E = row.epsilon < 1.0 ? -std::log(row.epsilon)
                                : std::numeric_limits<Real>::quiet_NaN();
      if (!(row.epsilon < 1.0)) row.note = "eps >= 1";
      row.k_trunc = row.K > 1.0 && std::isfinite(row.E) && row.E > 0.0
                        ? truncation_wavenumber(row.K, row.E)
                        : row.K;
      const ReconstructionErrors err = row_errors(noisy, row.K);
      row.err_l2_f0 = err.l2_f0;
      row.err_hm1_f1 = err.hm1_f1;
      row.err_h1_f0 = err.h1_f0;
      row.err_l2_f1 = err.l2_f1;
      row.lhs_sq = err.lhs_sq;
      row.ceiling = theorem_ceiling(report.calibrated_ceiling_c, eps_sq, m_sq, row.K, row.E);
      row.ok = true;
    } catch (const std::exception& ex) {
      row.ok = false;
      row.note = ex.what();
    }
    row.wall_s = std::chrono::duration<Real>(clock::now() - t_start).count();
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// bound-verification suites
// ---------------------------------------------------------------------------

namespace {

// one pass over the Gauss-Legendre segment evaluating all three functionals
std::array<Complex, 3> sector_functionals(const ExperimentConfig& cfg,
                                          const SourcePair& src, const BoundaryMesh& mesh,
                                          Complex k, int gl_nodes) {
  Eigen::VectorXd s, w;
  gauss_legendre01(gl_nodes, s, w);
  std::vector<std::array<Complex, 3>> partial(static_cast<std::size_t>(gl_nodes));
  const bool elastic = cfg.physics == PhysicsKind::Elastic;
  parallel_for(0, gl_nodes, [&](Index q) {
    const Complex omega = k * s[q];
    Complex acc0(0, 0), acc2(0, 0);
    for (Index i = 0; i < mesh.size(); ++i) {
      const Vec3 x = mesh.nodes.col(i);
      const Vec3 n = mesh.normals.col(i);
      if (!elastic) {
        const Complex up = forward_field(src, x, omega);
        const Complex um = forward_field(src, x, -omega);
        acc0 += mesh.weights[i] * up * um;
        const Vec3c gp = forward_field_grad(src, x, omega);
        const Vec3c gm = forward_field_grad(src, x, -omega);
        const Vec3c tp = gp - n.cast<Complex>() * n.cast<Complex>().dot(gp);
        const Vec3c tm = gm - n.cast<Complex>() * n.cast<Complex>().dot(gm);
        acc2 += mesh.weights[i] * (tp(0) * tm(0) + tp(1) * tm(1) + tp(2) * tm(2));
      } else {
        const Mat3c pn =
            Mat3c::Identity() - (n * n.transpose()).cast<Complex>();
        const Mat3c gp = forward_field_elastic_grad(src, x, omega, cfg.elastic);
        const Mat3c gm = forward_field_elastic_grad(src, x, -omega, cfg.elastic);
        const Vec3c up = forward_field_elastic(src, x, omega, cfg.elastic);
        const Vec3c um = forward_field_elastic(src, x, -omega, cfg.elastic);
        acc0 += mesh.weights[i] * (up(0) * um(0) + up(1) * um(1) + up(2) * um(2));
        const Mat3c tp = gp * pn, tm = gm * pn;
        Complex frob(0, 0);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) frob += tp(a, b) * tm(a, b);
        acc2 += mesh.weights[i] * frob;
      }
    }
    partial[static_cast<std::size_t>(q)] = {w[q] * acc0, w[q] * omega * omega * acc0,
                                            w[q] * acc2};
  });
  std::array<Complex, 3> total{Complex(0, 0), Complex(0, 0), Complex(0, 0)};
  for (const auto& p : partial)
    for (int j = 0; j < 3; ++j) total[static_cast<std::size_t>(j)] += p[static_cast<std::size_t>(j)];
  for (auto& v : total) v *= 2.0 * k;
  return total;
}

const char* functional_name(const ExperimentConfig& cfg, int j) {
  static const char* scalar_names[3] = {"I0", "I1", "I2"};
  static const char* elastic_names[3] = {"I0e", "I1e", "I2e"};
  return cfg.physics == PhysicsKind::Elastic ? elastic_names[j] : scalar_names[j];
}

}  // namespace

BoundSuiteResult verify_bounds_suite(const ExperimentConfig& cfg, int points_per_functional,
                                     std::uint64_t wos_walks) {
  BoundSuiteResult result;
  const ForwardData fd = prepare_forward(cfg);
  const Real D = fd.domain.diameter;
  const Real area = fd.domain.mesh.area();
  const bool elastic = cfg.physics == PhysicsKind::Elastic;
  const BandWeight weights3[3] = {BandWeight::Value, BandWeight::Omega2,
                                  BandWeight::Tangential};

  const int gl_nodes = 64;
  const Real k_hi = 0.6 * fd.grid.omega_max();
  std::uint64_t state = cfg.seed ^ 0x5eedb07d5eedb07dULL;
  Rng rng(splitmix64(state));

  // calibrate the elastic constant on a small disjoint battery
  if (elastic) {
    Real worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      const Real k1 = 0.3 + (k_hi - 0.3) * rng.uniform();
      const Real k2 = (2.0 * rng.uniform() - 1.0) * 0.9 * k1;
      const auto vals = sector_functionals(cfg, fd.source, fd.domain.mesh,
                                           Complex(k1, k2), 32);
      for (int j = 0; j < 3; ++j) {
        const Real shape = sector_bound_elastic(weights3[j], Complex(k1, k2), fd.norms,
                                                cfg.elastic, D, 1.0);
        if (shape > 0.0)
          worst = std::max(worst, std::abs(vals[static_cast<std::size_t>(j)]) / shape);
      }
    }
    result.elastic_c = 1.5 * worst;
  }

  for (int p = 0; p < points_per_functional; ++p) {
    const Real k1 = 0.3 + (k_hi - 0.3) * rng.uniform();
    const Real k2 = (2.0 * rng.uniform() - 1.0) * 0.95 * k1;
    const Complex k(k1, k2);
    const auto vals = sector_functionals(cfg, fd.source, fd.domain.mesh, k, gl_nodes);
    for (int j = 0; j < 3; ++j) {
      BoundCheckRow row;
      row.functional = functional_name(cfg, j);
      row.k_re = k1;
      row.k_im = k2;
      row.value = std::abs(vals[static_cast<std::size_t>(j)]);
      row.bound = elastic ? sector_bound_elastic(weights3[j], k, fd.norms, cfg.elastic, D,
                                                 result.elastic_c)
                          : sector_bound_scalar(weights3[j], k, fd.norms, area, D);
      row.ratio = row.value / row.bound;
      row.pass = row.value <= row.bound;
      result.all_pass = result.all_pass && row.pass;
      result.rows.push_back(row);
    }
  }

  // harmonic-measure Monte Carlo against the closed-form lower bound
  const Real K = cfg.k_ladder.empty() ? 2.0 / D : cfg.k_ladder.back();
  for (int p = 0; p < 20; ++p) {
    const Real k = K * (1.0 + 3.0 * (p + 0.5) / 20.0);
    const WosEstimate est = slit_measure_wos(Complex(k, 0.0), K, wos_walks,
                                             cfg.seed + 31 * p);
    BoundCheckRow row;
    row.functional = "harmonic_measure";
    row.k_re = k;
    row.value = est.value;
    row.bound = slit_measure_lower(k, K);
    row.ratio = row.bound > 0.0 ? row.value / row.bound : 0.0;
    row.pass = est.value >= row.bound - 3.0 * est.std_error;
    result.all_pass = result.all_pass && row.pass;
    result.rows.push_back(row);
  }
  {
    // slit and ray boundary limits
    const WosEstimate slit =
        slit_measure_wos(Complex(0.5 * K, 1e-6 * K), K, wos_walks, cfg.seed + 977);
    BoundCheckRow srow;
    srow.functional = "harmonic_measure_slit_limit";
    srow.k_re = 0.5 * K;
    srow.k_im = 1e-6 * K;
    srow.value = slit.value;
    srow.bound = 1.0;
    srow.ratio = slit.value;
    srow.pass = std::abs(slit.value - 1.0) <= 3.0 * slit.std_error + 1e-3;
    result.all_pass = result.all_pass && srow.pass;
    result.rows.push_back(srow);
    const WosEstimate ray =
        slit_measure_wos(Complex(2.0 * K, 2.0 * K - 1e-6 * K), K, wos_walks,
                         cfg.seed + 979);
    BoundCheckRow rrow;
    rrow.functional = "harmonic_measure_ray_limit";
    rrow.k_re = 2.0 * K;
    rrow.k_im = 2.0 * K - 1e-6 * K;
    rrow.value = ray.value;
    rrow.bound = 0.0;
    rrow.ratio = 0.0;
    rrow.pass = ray.value <= 3.0 * ray.std_error + 1e-3;
    result.all_pass = result.all_pass && rrow.pass;
    result.rows.push_back(rrow);
  }

  // continuation bound at real k beyond the band
  {
    const Real eps_sq =
        band_functional_sweep(fd.sweep, fd.domain.mesh, BandWeight::Value, K);
    if (eps_sq > 0.0 && eps_sq < 1.0) {
      const Real m_sq = elastic ? fd.norms.M2e * fd.norms.M2e
                                : std::pow(fd.norms.f0_norm(0) + fd.norms.f1_norm(0), 2);
      // calibrate across the verification range, then verify at other points
      Real c_cont = 0.0;
      for (const Real factor : {1.15, 1.45, 1.9}) {
        const Real k = factor * K;
        const auto vals = sector_functionals(cfg, fd.source, fd.domain.mesh,
                                             Complex(k, 0), gl_nodes);
        const Real logv = std::log(std::abs(vals[0]));
        const Real logb = continuation_bound_log(k, K, std::sqrt(eps_sq), m_sq, D, 1.0);
        c_cont = std::max(c_cont, std::exp(logv - logb));
      }
      c_cont *= 1.5;
      for (const Real factor : {1.2, 1.5, 2.0}) {
        const Real k = factor * K;
        const auto vals = sector_functionals(cfg, fd.source, fd.domain.mesh,
                                             Complex(k, 0), gl_nodes);
        BoundCheckRow row;
        row.functional = "continuation_I0";
        row.k_re = k;
        row.value = std::abs(vals[0]);
        const Real logb =
            continuation_bound_log(k, K, std::sqrt(eps_sq), m_sq, D, c_cont);
        row.bound = logb < 700.0 ? std::exp(logb) : std::numeric_limits<Real>::infinity();
        row.ratio = std::exp(std::log(row.value) - logb);
        row.pass = row.ratio <= 1.0;
        result.all_pass = result.all_pass && row.pass;
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// duality and huygens checks
// ---------------------------------------------------------------------------

namespace {

struct FdtdSetup {
  FdtdConfig cfg;
  Real t_end = 0;
};

FdtdSetup fdtd_setup(const ExperimentConfig& cfg, const Domain& domain, Real extra_time) {
  Real supp_reach = 0.0, supp_radius = 0.0;
  for (const auto* bumps : {&cfg.source.f0, &cfg.source.f1})
    for (const Bump& b : *bumps) {
      supp_reach = std::max(supp_reach,
                            (b.center - domain.shape.center).norm() + b.support_radius());
      supp_radius = std::max(supp_radius, b.support_radius());
    }
  Real mesh_reach = 0.0;
  for (Index i = 0; i < domain.mesh.size(); ++i)
    mesh_reach = std::max(mesh_reach,
                          (domain.mesh.nodes.col(i) - domain.shape.center).norm());
  FdtdSetup setup;
  setup.t_end = (mesh_reach + supp_reach) / cfg.c_min() + extra_time;
  setup.cfg.box_cells = cfg.fdtd_box_cells;
  setup.cfg.cfl = cfg.cfl;
  setup.cfg.t_end = setup.t_end;
  const Real reach = supp_reach + cfg.c_max() * setup.t_end;
  // keep the light cone at least two cells away from the walls
  setup.cfg.box_half_width = reach / (1.0 - 6.0 / cfg.fdtd_box_cells);
  return setup;
}

}  // namespace

DualityResult check_duality(const ExperimentConfig& cfg) {
  const ForwardData fd = prepare_forward(cfg);
  const FdtdSetup setup = fdtd_setup(cfg, fd.domain, 0.1 * fd.domain.diameter);

  // the solver propagates the normalized source, so rescale the bump list
  // by comparing rasterizations
  FdtdResult res;
  if (cfg.physics == PhysicsKind::Elastic)
    res = fdtd_elastic_forward(cfg.source.f0, cfg.source.f1, cfg.elastic, fd.domain.mesh,
                               fd.domain.shape.center, setup.cfg);
  else
    res = fdtd_scalar_forward(cfg.source.f0, cfg.source.f1, fd.domain.mesh,
                              fd.domain.shape.center, setup.cfg);
  const FrequencySweep from_time = sweep_from_trace(res.trace, fd.grid);

  // the sweep was rescaled during normalization; apply the same factor to
  // the raw-bump solver output before comparing
  const SourcePair raw = rasterize_source(cfg.source, fd.domain);
  Real scale = 1.0;
  const Real raw_max = raw.f0.cwiseAbs().maxCoeff() + raw.f1.cwiseAbs().maxCoeff();
  const Real nrm_max =
      fd.source.f0.cwiseAbs().maxCoeff() + fd.source.f1.cwiseAbs().maxCoeff();
  if (raw_max > 0.0) scale = nrm_max / raw_max;

  Real num = 0.0, den = 0.0;
  for (int j = 0; j < fd.grid.count; ++j) {
    const Real omega = fd.grid.omega(j);
    if (omega < 0.25 * fd.grid.omega_max() || omega > 0.75 * fd.grid.omega_max())
      continue;
    num += (scale * from_time.values.col(j) - fd.sweep.values.col(j)).squaredNorm();
    den += fd.sweep.values.col(j).squaredNorm();
  }
  DualityResult out;
  out.rel_l2_midband = den > 0.0 ? std::sqrt(num / den) : 0.0;
  out.tolerance = cfg.physics == PhysicsKind::Elastic ? 0.03 : 0.02;
  out.pass = out.rel_l2_midband < out.tolerance && den > 0.0;
  return out;
}

HuygensResult check_huygens(const ExperimentConfig& cfg) {
  const Real h = shape_extent(cfg.shape) / cfg.grid_cells;
  const Domain domain = build_domain(cfg.shape, h, cfg.mesh_nodes);
  const Real D = domain.diameter;
  FdtdSetup setup = fdtd_setup(cfg, domain, 0.25 * D / cfg.c_min());

  HuygensResult out;
  out.trace_tolerance = cfg.physics == PhysicsKind::Elastic ? 1e-2 : 1e-3;
  out.cone_tolerance = 1e-6;

  if (cfg.physics == PhysicsKind::Elastic) {
    // early snapshot for the fast-cone containment check
    const Real t_snap = 0.4 * D / cfg.c_max();
    setup.cfg.snapshot_times = {t_snap};
    const FdtdResult res = fdtd_elastic_forward(cfg.source.f0, cfg.source.f1, cfg.elastic,
                                                domain.mesh, domain.shape.center,
                                                setup.cfg);
    out.trace_residual = huygens_residual(res.trace, domain.mesh.weights, D / cfg.c_min());
    const Eigen::MatrixXd& snap = res.snapshots.front();
    const Real peak = snap.cwiseAbs().maxCoeff();
    Real leak = 0.0;
    const Real radius = cfg.c_max() * t_snap + D;
    for (Index c = 0; c < res.box.cells(); ++c) {
      if ((res.box.center(c) - domain.shape.center).norm() <= radius) continue;
      leak = std::max(leak, snap.row(c).cwiseAbs().maxCoeff());
    }
    out.cone_leak = peak > 0.0 ? leak / peak : 0.0;
    out.pass = out.trace_residual < out.trace_tolerance && out.cone_leak < out.cone_tolerance;
  } else {
    const FdtdResult res = fdtd_scalar_forward(cfg.source.f0, cfg.source.f1, domain.mesh,
                                               domain.shape.center, setup.cfg);
    out.trace_residual = huygens_residual(res.trace, domain.mesh.weights, D);
    out.cone_leak = 0.0;
    out.pass = out.trace_residual < out.trace_tolerance;
  }
  return out;
}

}  // namespace islab
