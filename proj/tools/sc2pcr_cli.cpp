// Command-line front end: register, synth, ambiguity, bench.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sc2pcr/core.hpp"
#include "sc2pcr/harness/bench.hpp"
#include "sc2pcr/harness/io.hpp"
#include "sc2pcr/harness/metrics.hpp"
#include "sc2pcr/harness/scene.hpp"
#include "sc2pcr/parallel.hpp"
#include "sc2pcr/pipeline.hpp"
#include "sc2pcr/theory.hpp"

namespace {

using namespace sc2pcr;
using namespace sc2pcr::harness;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;

struct RegisterArgs {
  std::string corrs;
  std::string gt;
  std::string config;
  std::string out;
  std::string ranking = "sc2";
  std::optional<double> d_thr, tau, seed_ratio, nms_radius;
  std::optional<std::size_t> k1, k2;
  bool timings = false;
};

struct SynthArgs {
  SceneParams params;
  std::string out;
  bool binary = false;
};

struct AmbiguityArgs {
  std::size_t n = 1000;
  double alpha = 0.01;
  double p = 0.2;
  std::size_t trials = 200000;
  std::uint64_t seed = 1;
  bool full = false;
};

struct BenchArgs {
  std::string suite;
  std::string out_csv;
  std::string trials_csv;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

int run_register(const RegisterArgs& a) {
  RegistrationConfig cfg;
  if (!a.config.empty()) cfg = config_from_json(read_json(a.config));
  if (a.d_thr) {
    cfg.d_thr = *a.d_thr;
    if (!a.tau && a.config.empty()) cfg.tau = *a.d_thr;
    if (!a.nms_radius && a.config.empty()) cfg.nms_radius = *a.d_thr;
  }
  if (a.tau) cfg.tau = *a.tau;
  if (a.seed_ratio) cfg.seed_ratio = *a.seed_ratio;
  if (a.nms_radius) cfg.nms_radius = *a.nms_radius;
  if (a.k1) cfg.k1 = *a.k1;
  if (a.k2) cfg.k2 = *a.k2;
  cfg.validate();

  RegisterOptions opts;
  if (a.ranking == "sc") opts.ranking = NeighborRanking::kFirstOrder;

  const CorrespondenceSet corrs = read_correspondences(a.corrs);
  const RegistrationResult result = register_correspondences(corrs, cfg, opts);
  nlohmann::json j = result_to_json(result, cfg);

  if (!a.gt.empty()) {
    const GroundTruth gt = read_ground_truth(a.gt);
    nlohmann::json eval;
    const TrialErrors e{rotation_error(result.transform.rotation(), gt.transform.rotation()),
                        translation_error(result.transform.translation(), gt.transform.translation())};
    eval["re_deg"] = e.rotation_deg;
    eval["te_m"] = e.translation_m;
    eval["success_indoor"] = is_registered(e, kIndoorThresholds);
    eval["success_outdoor"] = is_registered(e, kOutdoorThresholds);
    if (gt.inlier_indices) {
      InlierMask truth(corrs.size());
      for (std::size_t i : *gt.inlier_indices) {
        if (i >= corrs.size()) throw std::invalid_argument("ground-truth inlier index out of range");
        truth.bits[i] = true;
      }
      const InlierPrf prf = inlier_prf(result.inlier_mask, truth);
      eval["ip"] = prf.precision;
      eval["ir"] = prf.recall;
      eval["f1"] = prf.f1;
    }
    j["evaluation"] = eval;
  }
  write_output(a.out, j.dump(2) + "\n");

  if (a.timings) {
    const StageTimings& t = result.timings;
    std::cerr << fmt::format("compatibility {:.4f}s  seeding {:.4f}s  hypotheses {:.4f}s  selection {:.4f}s  total {:.4f}s\n",
                             t.compatibility_s, t.seeding_s, t.hypotheses_s, t.selection_s, t.total_s);
  }
  return kExitOk;
}

int run_synth(const SynthArgs& a) {
  const SyntheticScene scene = generate_scene(a.params);
  {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    if (a.binary) {
      write_correspondences_binary(out, scene.corrs);
    } else {
      write_correspondences_text(out, scene.corrs);
    }
    if (!out) throw std::runtime_error("write failed for " + a.out);
  }
  nlohmann::json gt = transform_to_json(scene.gt_transform);
  gt["inlier_indices"] = scene.gt_inliers.indices();
  gt["params"] = {{"n", a.params.n},
                  {"inlier_ratio", a.params.inlier_ratio},
                  {"noise", a.params.noise_sigma},
                  {"box", a.params.box_extent},
                  {"seed", a.params.seed}};
  write_text_file(a.out + ".gt.json", gt.dump(2) + "\n");
  return kExitOk;
}

int run_ambiguity(const AmbiguityArgs& a) {
  const theory::AmbiguityModel model{a.n, a.alpha, a.p};
  model.validate();
  const double sc = theory::sc_ambiguity(a.p);
  const theory::McEstimate sc_mc = theory::mc_ambiguity_sc(a.p, a.trials, a.seed);
  const theory::ThresholdSensitivity s = theory::sc2_ambiguity_sensitivity(model);
  const theory::McEstimate sc2_mc = a.full ? theory::mc_ambiguity_sc2_full(model, a.trials, a.seed)
                                           : theory::mc_ambiguity_sc2(model, a.trials, a.seed);

  fmt::print("N={} alpha={} p={} inliers={} trials={} seed={}\n", a.n, a.alpha, a.p, model.inlier_count(), a.trials,
             a.seed);
  fmt::print("first-order   analytic {:.6f}   mc {:.6f} +- {:.6f}\n", sc, sc_mc.estimate, sc_mc.std_error);
  fmt::print("second-order  analytic {:.6f}   mc {:.6f} +- {:.6f}\n", s.rounded, sc2_mc.estimate, sc2_mc.std_error);
  if (s.differs()) {
    fmt::print("second-order  threshold floor {:.6f}  ceil {:.6f}\n", s.floor_value, s.ceil_value);
  }
  return kExitOk;
}

int run_bench_cmd(const BenchArgs& a) {
  const SuiteConfig suite = suite_from_json(read_json(a.suite));
  const BenchResult result = run_bench(suite);
  write_output(a.out_csv, bench_summary_csv(result));
  if (!a.trials_csv.empty()) write_text_file(a.trials_csv, bench_trials_csv(result));
  if (!a.out_csv.empty() && a.out_csv != "-") {
    for (const EvalReport& r : result.reports) {
      fmt::print("{:>6} {:>7}  RR {:.3f}  RE {:.3f}  TE {:.4f}  F1 {:.3f}\n", r.bucket, r.method, r.recall,
                 r.mean_re_deg, r.mean_te_m, r.mean_f1);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust point cloud registration from putative correspondences"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "Worker threads (default: SC2_THREADS or all cores)")->check(CLI::PositiveNumber);

  RegisterArgs reg;
  CLI::App* reg_cmd = app.add_subcommand("register", "Estimate the rigid transform of a correspondence file");
  reg_cmd->add_option("--corrs", reg.corrs, "Correspondence file (text or binary)")->required()->check(CLI::ExistingFile);
  reg_cmd->add_option("--gt", reg.gt, "Ground-truth transform JSON; adds an evaluation block")->check(CLI::ExistingFile);
  reg_cmd->add_option("--config", reg.config, "Registration config JSON")->check(CLI::ExistingFile);
  reg_cmd->add_option("--out", reg.out, "Result JSON (default: stdout)");
  reg_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  reg_cmd->add_option("--d-thr", reg.d_thr, "Compatibility threshold (m)");
  reg_cmd->add_option("--tau", reg.tau, "Inlier residual threshold (m)");
  reg_cmd->add_option("--seed-ratio", reg.seed_ratio, "Fraction of correspondences kept as seeds");
  reg_cmd->add_option("--nms-radius", reg.nms_radius, "Seed suppression radius (m)");
  reg_cmd->add_option("--k1", reg.k1, "Stage-1 consensus size");
  reg_cmd->add_option("--k2", reg.k2, "Stage-2 consensus size");
  reg_cmd->add_option("--ranking", reg.ranking, "Stage-1 neighbour ranking")->check(CLI::IsMember({"sc2", "sc"}));
  reg_cmd->add_flag("--timings", reg.timings, "Print stage timings to stderr");

  SynthArgs syn;
  CLI::App* syn_cmd = app.add_subcommand("synth", "Write a synthetic correspondence set and its ground truth");
  syn_cmd->add_option("--n", syn.params.n, "Number of correspondences")->capture_default_str();
  syn_cmd->add_option("--inlier-ratio", syn.params.inlier_ratio, "Inlier fraction")->capture_default_str();
  syn_cmd->add_option("--noise", syn.params.noise_sigma, "Inlier noise sigma (m)")->capture_default_str();
  syn_cmd->add_option("--box", syn.params.box_extent, "Scene cube edge (m)")->capture_default_str();
  syn_cmd->add_option("--seed", syn.params.seed, "Random seed")->capture_default_str();
  syn_cmd->add_option("--out", syn.out, "Output correspondence file; ground truth goes to <out>.gt.json")->required();
  syn_cmd->add_flag("--binary", syn.binary, "Write the binary format");

  AmbiguityArgs amb;
  CLI::App* amb_cmd = app.add_subcommand("ambiguity", "Analytic and Monte Carlo ambiguity probabilities");
  amb_cmd->add_option("--n", amb.n, "Number of correspondences")->capture_default_str();
  amb_cmd->add_option("--alpha", amb.alpha, "Inlier ratio")->capture_default_str();
  amb_cmd->add_option("--p", amb.p, "Outlier compatibility probability")->capture_default_str();
  amb_cmd->add_option("--trials", amb.trials, "Monte Carlo trials")->capture_default_str()->check(CLI::PositiveNumber);
  amb_cmd->add_option("--seed", amb.seed, "Random seed")->capture_default_str();
  amb_cmd->add_flag("--full", amb.full, "Simulate full compatibility matrices (slow, small N)");

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run a synthetic benchmark suite");
  bench_cmd->add_option("--suite", bench.suite, "Suite JSON")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out-csv", bench.out_csv, "Per-bucket summary CSV (default: stdout)");
  bench_cmd->add_option("--trials-csv", bench.trials_csv, "Per-trial CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (threads) set_num_threads(*threads);
    if (reg_cmd->parsed()) return run_register(reg);
    if (syn_cmd->parsed()) return run_synth(syn);
    if (amb_cmd->parsed()) return run_ambiguity(amb);
    if (bench_cmd->parsed()) return run_bench_cmd(bench);
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate input: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
