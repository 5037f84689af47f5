#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sc2pcr/harness/metrics.hpp"
#include "sc2pcr/harness/scene.hpp"
#include "sc2pcr/pipeline.hpp"

namespace sc2pcr::harness {

/// Inlier ratios are drawn uniformly from [lo, hi) for every trial.
struct Bucket {
  std::string label;
  double lo = 0.0;
  double hi = 0.0;
};

/// The six low-inlier-ratio groups: <1%, 1-2%, 2-4%, 4-6%, 6-10%, >10%.
std::vector<Bucket> default_buckets();

enum class Method { kSc2, kScGuided, kRansac };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::size_t trials_per_bucket = 20;
  std::size_t n = 1000;
  double noise_sigma = 0.01;
  double box_extent = 10.0;
  std::vector<Bucket> buckets = default_buckets();
  std::vector<Method> methods{Method::kSc2, Method::kScGuided, Method::kRansac};
  std::size_t ransac_iterations = 1000;
  RegistrationConfig registration;
  RecallThresholds thresholds = kIndoorThresholds;

  void validate() const;
};

/// Suite JSON keys: "seed", "trials", "n", "noise", "box", "buckets"
/// ([{"label", "lo", "hi"}]), "methods" (["sc2", "sc", "ransac"]),
/// "ransac_iterations", "re_thresh", "te_thresh", "config" (registration
/// config object). Missing keys keep their defaults.
SuiteConfig suite_from_json(const nlohmann::json& j);

struct BenchResult {
  /// One report per (bucket, method), bucket-major in suite order.
  std::vector<EvalReport> reports;
};

/// Scene seed and inlier ratio of trial `trial` in bucket `bucket`.
SceneParams trial_scene(const SuiteConfig& suite, std::size_t bucket, std::size_t trial);

/// Runs every method on every generated scene. A method that throws
/// DegenerateError on a scene records a failed trial with infinite errors.
BenchResult run_bench(const SuiteConfig& suite);

/// One row per (bucket, method). Wall-clock figures are left out so reruns
/// produce identical bytes.
std::string bench_summary_csv(const BenchResult& result);
/// One row per (bucket, method, trial).
std::string bench_trials_csv(const BenchResult& result);

/// Geometry-level check of the second-order ambiguity: builds synthetic
/// scenes, picks two ground-truth inliers and one outlier, and compares
/// their SC2 entries. Also reports the empirical pass rate of unrelated
/// pairs (the model's p) for feeding the analytic formula.
struct GeometricAmbiguity {
  double estimate = 0.0;
  double std_error = 0.0;
  double empirical_p = 0.0;
  std::size_t trials = 0;
};
GeometricAmbiguity geometric_ambiguity_sc2(const SceneParams& base, double d_thr, std::size_t trials);

}  // namespace sc2pcr::harness
