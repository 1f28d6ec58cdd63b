// islab: multi-frequency inverse source laboratory.
//
// Subcommands: synth, noise, reconstruct, sweep-k, verify-bounds,
// check-duality, check-huygens, report. Exit codes: 0 success,
// 2 verification-suite failure, 1 error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "islab/experiment.hpp"
#include "islab/io.hpp"
#include "islab/report.hpp"
#include "islab/version.hpp"

namespace {

using namespace islab;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int threads = 0;
};

ExperimentConfig load_config(const GlobalArgs& args) {
  if (args.config_path.empty())
    throw std::invalid_argument("missing --config <path.json>");
  ExperimentConfig cfg = ExperimentConfig::load(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.threads > 0) cfg.threads = args.threads;
  if (cfg.threads > 0) set_worker_threads(cfg.threads);
  cfg.validate();
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir + "/" + name;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "cannot open output file");
  os << content;
}

int cmd_synth(const ExperimentConfig& cfg) {
  const ForwardData fd = prepare_forward(cfg);
  write_sweep(out_path(cfg, "sweep.bin"), fd.sweep);
  std::printf("synth: %lld nodes x %d frequencies (arity %d) -> %s\n",
              static_cast<long long>(fd.sweep.nodes), fd.sweep.grid.count, fd.sweep.arity,
              out_path(cfg, "sweep.bin").c_str());
  return 0;
}

int cmd_noise(const ExperimentConfig& cfg, const std::string& input) {
  const std::string in = input.empty() ? out_path(cfg, "sweep.bin") : input;
  const FrequencySweep sweep = read_sweep(in);
  // only the surface quadrature is needed to calibrate the perturbation
  const Real extent = analytic_diameter(cfg.shape);
  const Domain dom = build_domain(cfg.shape, extent / cfg.grid_cells, cfg.mesh_nodes);
  require(dom.mesh.size() == sweep.nodes, "noise: sweep does not match the config mesh");
  const FrequencySweep noisy = add_noise(sweep, dom.mesh, cfg.epsilon_target, cfg.seed);
  write_sweep(out_path(cfg, "sweep_noisy.bin"), noisy);
  std::printf("noise: eps_target=%g seed=%llu -> %s\n", cfg.epsilon_target,
              static_cast<unsigned long long>(cfg.seed),
              out_path(cfg, "sweep_noisy.bin").c_str());
  return 0;
}

int cmd_reconstruct(const ExperimentConfig& cfg, const std::string& input, Real k_cut) {
  const ForwardData fd = prepare_forward(cfg);
  FrequencySweep data = fd.sweep;
  if (!input.empty()) data = read_sweep(input);
  require(data.nodes == fd.domain.mesh.size(),
          "reconstruct: sweep does not match the config mesh");
  const Real cut = k_cut > 0.0 ? k_cut : fd.grid.omega_max();
  const BackwardResult rec = reconstruct(cfg, fd.domain, data, cut);
  const ReconstructionErrors err =
      reconstruction_errors(fd.domain, fd.source, fd.norms, rec);

  std::vector<Eigen::MatrixXd> fields = {rec.f0, rec.f1};
  write_snapshots(out_path(cfg, "reconstruction.bin"), fields, {0.0, 0.0},
                  fd.domain.grid);
  nlohmann::ordered_json j;
  j["k_cut"] = cut;
  j["err_l2_f0"] = err.l2_f0;
  j["err_h1_f0"] = err.h1_f0;
  j["err_hm1_f1"] = err.hm1_f1;
  j["err_l2_f1"] = err.l2_f1;
  write_text(out_path(cfg, "reconstruction.json"), j.dump(2) + "\n");
  std::printf("reconstruct: k_cut=%g err_l2_f0=%.4g err_h1_f0=%.4g\n", cut, err.l2_f0,
              err.h1_f0);
  return 0;
}

int cmd_sweep_k(const ExperimentConfig& cfg) {
  const ExperimentReport report = run_sweep(cfg);
  emit_report(report, cfg.output_dir, "report");
  bool all_ok = true;
  for (const ReportRow& r : report.rows) {
    std::printf("K=%-8.4g eps=%-10.4g err_l2_f0=%-10.4g ceiling_ok=%d %s\n", r.K,
                r.epsilon, r.err_l2_f0, r.lhs_sq <= r.ceiling ? 1 : 0, r.note.c_str());
    all_ok = all_ok && r.ok;
  }
  std::printf("report written to %s/report.{csv,json,svg}\n", cfg.output_dir.c_str());
  return all_ok ? 0 : 2;
}

int cmd_verify_bounds(const ExperimentConfig& cfg, int points, std::uint64_t walks) {
  const BoundSuiteResult result = verify_bounds_suite(cfg, points, walks);
  write_text(out_path(cfg, "bounds.csv"), bound_rows_csv(result));
  int violations = 0;
  for (const BoundCheckRow& r : result.rows)
    if (!r.pass) ++violations;
  std::printf("verify-bounds: %zu checks, %d violations -> %s\n", result.rows.size(),
              violations, out_path(cfg, "bounds.csv").c_str());
  return result.all_pass ? 0 : 2;
}

int cmd_check_duality(const ExperimentConfig& cfg) {
  const DualityResult r = check_duality(cfg);
  std::printf("check-duality: mid-band relative L2 = %.4g (tolerance %.4g) -> %s\n",
              r.rel_l2_midband, r.tolerance, r.pass ? "pass" : "FAIL");
  return r.pass ? 0 : 2;
}

int cmd_check_huygens(const ExperimentConfig& cfg) {
  const HuygensResult r = check_huygens(cfg);
  std::printf("check-huygens: trace residual %.4g (tol %.4g)", r.trace_residual,
              r.trace_tolerance);
  if (r.cone_tolerance > 0 && r.cone_leak > 0)
    std::printf(", cone leak %.4g (tol %.4g)", r.cone_leak, r.cone_tolerance);
  std::printf(" -> %s\n", r.pass ? "pass" : "FAIL");
  return r.pass ? 0 : 2;
}

int cmd_report(const ExperimentConfig& cfg, const std::string& input) {
  const std::string in = input.empty() ? out_path(cfg, "report.json") : input;
  std::ifstream is(in);
  require(is.good(), "report: cannot open input json");
  std::stringstream buf;
  buf << is.rdbuf();
  const ExperimentReport report = parse_report_json(buf.str());
  emit_report(report, cfg.output_dir, "report");
  std::printf("report: re-emitted %zu rows to %s\n", report.rows.size(),
              cfg.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-frequency inverse source laboratory"};
  app.set_version_flag("--version", islab::kVersion);
  app.require_subcommand(1);

  GlobalArgs args;
  std::uint64_t seed_arg = 0;
  auto* seed_opt = app.add_option("--seed", seed_arg, "override the config seed");
  app.add_option("--config", args.config_path, "experiment config (json)");
  app.add_option("--out", args.out_dir, "output directory override");
  app.add_option("--threads", args.threads, "worker thread count");

  std::string input_path;
  double k_cut = 0.0;
  int bound_points = 100;
  std::uint64_t wos_walks = 100000;

  auto* synth = app.add_subcommand("synth", "forward boundary data");
  auto* noise = app.add_subcommand("noise", "inject calibrated noise into a sweep");
  noise->add_option("--in", input_path, "input sweep (default <out>/sweep.bin)");
  auto* rec = app.add_subcommand("reconstruct", "backward-solve source recovery");
  rec->add_option("--in", input_path, "input sweep (default: synthesize)");
  rec->add_option("--k", k_cut, "band truncation (default: full band)");
  auto* sweepk = app.add_subcommand("sweep-k", "K-ladder stability experiment");
  auto* bounds = app.add_subcommand("verify-bounds", "sector/measure/continuation checks");
  bounds->add_option("--points", bound_points, "sector points per functional");
  bounds->add_option("--walks", wos_walks, "Monte Carlo walks per measure point");
  auto* duality = app.add_subcommand("check-duality", "solver vs quadrature mid-band");
  auto* huygens = app.add_subcommand("check-huygens", "trace support checks");
  auto* report = app.add_subcommand("report", "re-emit csv/svg from a report json");
  report->add_option("--in", input_path, "report json (default <out>/report.json)");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) args.seed = seed_arg;

  try {
    const islab::ExperimentConfig cfg = load_config(args);
    if (synth->parsed()) return cmd_synth(cfg);
    if (noise->parsed()) return cmd_noise(cfg, input_path);
    if (rec->parsed()) return cmd_reconstruct(cfg, input_path, k_cut);
    if (sweepk->parsed()) return cmd_sweep_k(cfg);
    if (bounds->parsed()) return cmd_verify_bounds(cfg, bound_points, wos_walks);
    if (duality->parsed()) return cmd_check_duality(cfg);
    if (huygens->parsed()) return cmd_check_huygens(cfg);
    if (report->parsed()) return cmd_report(cfg, input_path);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 1;
}
