#include "sc2pcr/harness/bench.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "sc2pcr/compat.hpp"
#include "sc2pcr/harness/baselines.hpp"
#include "sc2pcr/harness/io.hpp"
#include "sc2pcr/parallel.hpp"
#include "sc2pcr/rng.hpp"

namespace sc2pcr::harness {

std::vector<Bucket> default_buckets() {
  return {{"<1%", 0.005, 0.01},  {"1-2%", 0.01, 0.02},  {"2-4%", 0.02, 0.04},
          {"4-6%", 0.04, 0.06}, {"6-10%", 0.06, 0.10}, {">10%", 0.10, 0.20}};
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kSc2:
      return "sc2";
    case Method::kScGuided:
      return "sc";
    case Method::kRansac:
      return "ransac";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "sc2") return Method::kSc2;
  if (s == "sc") return Method::kScGuided;
  if (s == "ransac") return Method::kRansac;
  throw std::invalid_argument("unknown method \"" + s + "\" (expected sc2, sc or ransac)");
}

void SuiteConfig::validate() const {
  if (trials_per_bucket == 0) throw std::invalid_argument("suite needs at least one trial per bucket");
  if (n < 3) throw std::invalid_argument("suite needs N >= 3");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw std::invalid_argument("noise must be >= 0");
  if (!(box_extent > 0.0) || !std::isfinite(box_extent)) throw std::invalid_argument("box must be positive");
  if (buckets.empty()) throw std::invalid_argument("suite needs at least one bucket");
  for (const Bucket& b : buckets) {
    if (!(b.lo > 0.0 && b.lo <= b.hi && b.hi <= 1.0)) {
      throw std::invalid_argument("bucket \"" + b.label + "\" needs 0 < lo <= hi <= 1");
    }
  }
  if (methods.empty()) throw std::invalid_argument("suite needs at least one method");
  if (ransac_iterations == 0) throw std::invalid_argument("ransac_iterations must be positive");
  if (!(thresholds.rotation_deg > 0.0 && thresholds.translation_m > 0.0)) {
    throw std::invalid_argument("recall thresholds must be positive");
  }
  registration.validate();
}

SuiteConfig suite_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("suite must be a JSON object");
  SuiteConfig s;
  try {
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) s.trials_per_bucket = j.at("trials").get<std::size_t>();
    if (j.contains("n")) s.n = j.at("n").get<std::size_t>();
    if (j.contains("noise")) s.noise_sigma = j.at("noise").get<double>();
    if (j.contains("box")) s.box_extent = j.at("box").get<double>();
    if (j.contains("ransac_iterations")) s.ransac_iterations = j.at("ransac_iterations").get<std::size_t>();
    if (j.contains("re_thresh")) s.thresholds.rotation_deg = j.at("re_thresh").get<double>();
    if (j.contains("te_thresh")) s.thresholds.translation_m = j.at("te_thresh").get<double>();
    if (j.contains("buckets")) {
      s.buckets.clear();
      for (const auto& b : j.at("buckets")) {
        s.buckets.push_back({b.at("label").get<std::string>(), b.at("lo").get<double>(), b.at("hi").get<double>()});
      }
    }
    if (j.contains("methods")) {
      s.methods.clear();
      for (const auto& m : j.at("methods")) s.methods.push_back(method_from_string(m.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad suite value: ") + e.what());
  }
  if (j.contains("config")) s.registration = config_from_json(j.at("config"));
  s.validate();
  return s;
}

SceneParams trial_scene(const SuiteConfig& suite, std::size_t bucket, std::size_t trial) {
  RandomStream rng(suite.seed, (static_cast<std::uint64_t>(bucket) << 32) | static_cast<std::uint64_t>(trial));
  const Bucket& b = suite.buckets.at(bucket);
  SceneParams p;
  p.n = suite.n;
  p.inlier_ratio = b.lo == b.hi ? b.lo : rng.uniform(b.lo, b.hi);
  p.noise_sigma = suite.noise_sigma;
  p.box_extent = suite.box_extent;
  p.seed = rng.next_u64();
  return p;
}

namespace {

RegistrationResult run_method(Method m, const SyntheticScene& scene, const SuiteConfig& suite) {
  switch (m) {
    case Method::kSc2:
      return register_correspondences(scene.corrs, suite.registration);
    case Method::kScGuided:
      return sc_guided_register(scene.corrs, suite.registration);
    case Method::kRansac:
      return ransac_register(scene.corrs, suite.ransac_iterations, suite.registration.tau, scene.params.seed);
  }
  throw std::logic_error("unhandled method");
}

TrialRow evaluate(Method m, const SyntheticScene& scene, const SuiteConfig& suite, const Bucket& bucket,
                  std::size_t trial) {
  TrialRow row;
  row.method = to_string(m);
  row.bucket = bucket.label;
  row.trial = trial;
  row.inlier_ratio = scene.params.inlier_ratio;
  const auto start = std::chrono::steady_clock::now();
  try {
    const RegistrationResult r = run_method(m, scene, suite);
    row.errors.rotation_deg = rotation_error(r.transform.rotation(), scene.gt_transform.rotation());
    row.errors.translation_m = translation_error(r.transform.translation(), scene.gt_transform.translation());
    row.prf = inlier_prf(r.inlier_mask, scene.gt_inliers);
    row.inlier_count = r.inlier_count;
  } catch (const DegenerateError&) {
    row.errors.rotation_deg = std::numeric_limits<double>::infinity();
    row.errors.translation_m = std::numeric_limits<double>::infinity();
    row.prf = inlier_prf(InlierMask(scene.corrs.size()), scene.gt_inliers);
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  row.success = is_registered(row.errors, suite.thresholds);
  return row;
}

}  // namespace

BenchResult run_bench(const SuiteConfig& suite) {
  suite.validate();
  const std::size_t n_buckets = suite.buckets.size();
  const std::size_t n_methods = suite.methods.size();
  const std::size_t per_bucket = suite.trials_per_bucket;
  const std::size_t total = n_buckets * per_bucket;

  // rows[(bucket * n_methods + method) * per_bucket + trial]
  std::vector<TrialRow> rows(total * n_methods);
  std::exception_ptr failure;
  const auto st = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic, 1) num_threads(num_threads())
  for (std::ptrdiff_t k = 0; k < st; ++k) {
    const std::size_t b = static_cast<std::size_t>(k) / per_bucket;
    const std::size_t t = static_cast<std::size_t>(k) % per_bucket;
    try {
      const SyntheticScene scene = generate_scene(trial_scene(suite, b, t));
      for (std::size_t m = 0; m < n_methods; ++m) {
        rows[(b * n_methods + m) * per_bucket + t] = evaluate(suite.methods[m], scene, suite, suite.buckets[b], t);
      }
    } catch (...) {
#pragma omp critical(sc2pcr_bench_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  BenchResult result;
  for (std::size_t b = 0; b < n_buckets; ++b) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      const auto first = rows.begin() + static_cast<std::ptrdiff_t>((b * n_methods + m) * per_bucket);
      std::vector<TrialRow> group(std::make_move_iterator(first),
                                  std::make_move_iterator(first + static_cast<std::ptrdiff_t>(per_bucket)));
      EvalReport report = summarize(std::move(group), suite.thresholds);
      report.method = to_string(suite.methods[m]);
      report.bucket = suite.buckets[b].label;
      result.reports.push_back(std::move(report));
    }
  }
  return result;
}

std::string bench_summary_csv(const BenchResult& result) {
  std::string out = "bucket,method,trials,successes,recall,mean_re_deg,mean_te_m,mean_ip,mean_ir,mean_f1\n";
  for (const EvalReport& r : result.reports) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{},{},{}\n", r.bucket, r.method, r.trials,
                   r.successes, r.recall, r.mean_re_deg, r.mean_te_m, r.mean_ip, r.mean_ir, r.mean_f1);
  }
  return out;
}

std::string bench_trials_csv(const BenchResult& result) {
  std::string out = "bucket,method,trial,inlier_ratio,re_deg,te_m,success,ip,ir,f1,inlier_count\n";
  for (const EvalReport& r : result.reports) {
    for (const TrialRow& row : r.rows) {
      fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{},{},{},{}\n", row.bucket, row.method,
                     row.trial, row.inlier_ratio, row.errors.rotation_deg, row.errors.translation_m,
                     row.success ? 1 : 0, row.prf.precision, row.prf.recall, row.prf.f1, row.inlier_count);
    }
  }
  return out;
}

GeometricAmbiguity geometric_ambiguity_sc2(const SceneParams& base, double d_thr, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  if (!(d_thr > 0.0)) throw std::invalid_argument("d_thr must be positive");
  const auto n_in = std::llround(static_cast<double>(base.n) * base.inlier_ratio);
  if (n_in < 2 || static_cast<std::size_t>(n_in) >= base.n) {
    throw std::invalid_argument("scene needs two inliers and one outlier");
  }
  const auto st = static_cast<std::ptrdiff_t>(trials);
  std::size_t hits = 0;
  std::size_t pair_checks = 0;
  std::size_t pair_passes = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : hits, pair_checks, pair_passes) \
    num_threads(num_threads())
  for (std::ptrdiff_t k = 0; k < st; ++k) {
    RandomStream rng(base.seed, static_cast<std::uint64_t>(k));
    SceneParams params = base;
    params.seed = rng.next_u64();
    const SyntheticScene scene = generate_scene(params);
    const std::vector<std::size_t> inliers = scene.gt_inliers.indices();
    std::vector<std::size_t> outliers;
    for (std::size_t i = 0; i < scene.corrs.size(); ++i) {
      if (!scene.gt_inliers.bits[i]) outliers.push_back(i);
    }
    const HardCompat compat = hard_compatibility(scene.corrs, d_thr);
    const std::size_t i = inliers[rng.below(inliers.size())];
    std::size_t j = i;
    while (j == i) j = inliers[rng.below(inliers.size())];
    const std::size_t o = outliers[rng.below(outliers.size())];
    const std::vector<std::int32_t> row = sc2_row(compat, i);
    if (compat(i, o) && row[o] > row[j]) ++hits;
    for (std::size_t v : outliers) {
      if (v == o) continue;
      ++pair_checks;
      pair_passes += compat(o, v) ? 1 : 0;
    }
  }
  GeometricAmbiguity g;
  g.trials = trials;
  g.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  g.std_error = std::sqrt(g.estimate * (1.0 - g.estimate) / static_cast<double>(trials));
  g.empirical_p = pair_checks == 0 ? 0.0 : static_cast<double>(pair_passes) / static_cast<double>(pair_checks);
  return g;
}

}  // namespace sc2pcr::harness
