// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/LU>
#include <fmt/format.h>

#include "../test_util.hpp"
#include "sc2pcr/compat.hpp"
#include "sc2pcr/harness/baselines.hpp"
#include "sc2pcr/harness/bench.hpp"
#include "sc2pcr/harness/io.hpp"
#include "sc2pcr/harness/metrics.hpp"
#include "sc2pcr/harness/scene.hpp"
#include "sc2pcr/parallel.hpp"
#include "sc2pcr/pipeline.hpp"
#include "sc2pcr/solver.hpp"
#include "sc2pcr/theory.hpp"

namespace {

using namespace sc2pcr;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- 1: matrix identities ------------------------------------------------

Outcome matrix_identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<std::size_t> nd(3, 256);
  std::uniform_real_distribution<double> thr(0.05, 0.5), ratio(0.05, 0.9);
  std::size_t hard_mismatch = 0, soft_mismatch = 0, invariant_fail = 0;
  double worst_rel = 0.0;
  for (int inst = 0; inst < 500; ++inst) {
    const std::size_t n = nd(gen);
    const double d_thr = thr(gen);
    const auto n_in = static_cast<std::size_t>(ratio(gen) * static_cast<double>(n));
    const CorrespondenceSet c = testing::planted_set(gen, testing::random_transform(gen), n, n_in, 1.0, d_thr / 4);
    const auto dist = testing::oracle_dist(c);

    testing::BoolMatrix b(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) b[i][j] = (i != j && dist[i][j] <= d_thr) ? 1 : 0;
    }
    const HardCompat hard = hard_compatibility(c, d_thr);
    const SC2Matrix sc2 = sc2_matrix(hard);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // Pairs sitting on the threshold up to rounding may legitimately flip.
        if (std::fabs(dist[i][j] - d_thr) < 1e-12) continue;
        if (hard(i, j) != static_cast<bool>(b[i][j])) ++hard_mismatch;
      }
    }
    // SC2 exactness is checked against the oracle on the library's own graph.
    testing::BoolMatrix lib(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) lib[i][j] = hard(i, j) ? 1 : 0;
    }
    const auto exact = testing::oracle_sc2(lib);
    for (std::size_t i = 0; i < n; ++i) {
      if (sc2(i, i) != 0) ++invariant_fail;
      for (std::size_t j = 0; j < n; ++j) {
        if (sc2(i, j) != exact[i][j]) ++hard_mismatch;
        if (sc2(i, j) != sc2(j, i) || sc2(i, j) < 0 || sc2(i, j) > static_cast<long>(n) - 2) ++invariant_fail;
      }
    }

    const SoftCompat soft = soft_compatibility(distance_difference_matrix(c), d_thr);
    const SoftCompat raw = soft_sc2(soft, false);
    const SoftCompat norm = soft_sc2(soft, true);
    std::vector<std::vector<double>> soft_m(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) soft_m[i][j] = soft(i, j);
    }
    const auto soft_ref = testing::oracle_soft_sc2(soft_m);
    long double mx = 0.0L;
    for (const auto& row : soft_ref) mx = std::max(mx, *std::max_element(row.begin(), row.end()));
    for (std::size_t i = 0; i < n; ++i) {
      if (soft(i, i) != 0.0 || norm(i, i) != 0.0) ++invariant_fail;
      for (std::size_t j = 0; j < n; ++j) {
        const long double want = soft_ref[i][j];
        const double rel = want == 0.0L ? std::fabs(raw(i, j))
                                        : static_cast<double>(std::fabs((raw(i, j) - want) / want));
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-12) ++soft_mismatch;
        if (mx > 0.0L) {
          const long double wn = want / mx;
          const double reln = wn == 0.0L ? std::fabs(norm(i, j)) : static_cast<double>(std::fabs((norm(i, j) - wn) / wn));
          if (reln > 1e-12) ++soft_mismatch;
        }
        if (soft(i, j) != soft(j, i) || soft(i, j) < 0.0 || soft(i, j) > 1.0) ++invariant_fail;
        if (norm(i, j) != norm(j, i) || norm(i, j) < 0.0 || norm(i, j) > 1.0) ++invariant_fail;
        if (raw(i, j) > 0.0 && !hard(i, j)) ++invariant_fail;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {hard_mismatch == 0 && soft_mismatch == 0 && invariant_fail == 0 && secs < 30.0,
          fmt::format("sc2 mismatches {}, soft mismatches {} (worst rel {:.2e}), invariant failures {}, {:.1f} s",
                      hard_mismatch, soft_mismatch, worst_rel, invariant_fail, secs)};
}

// ---- 2: first-order ambiguity --------------------------------------------

Outcome first_order_ambiguity() {
  const auto t0 = Clock::now();
  const theory::McEstimate e = theory::mc_ambiguity_sc(0.2, 1000000, 1);
  const double secs = seconds_since(t0);
  const bool ok = std::fabs(e.estimate - 0.1) <= 3 * e.std_error && secs < 10.0;
  return {ok, fmt::format("MC {:.5f} +- {:.5f} vs 0.1, {:.1f} s", e.estimate, e.std_error, secs)};
}

// ---- 3: second-order ambiguity grid --------------------------------------

Outcome second_order_grid() {
  const auto t0 = Clock::now();
  const std::vector<std::size_t> ns{1000, 2500, 5000};
  const std::vector<double> alphas{0.005, 0.01, 0.02, 0.05};
  bool agree = true, monotone = true;
  std::string worst;
  double worst_gap = -1.0;
  std::vector<std::vector<double>> analytic(ns.size(), std::vector<double>(alphas.size()));
  for (std::size_t a = 0; a < ns.size(); ++a) {
    for (std::size_t b = 0; b < alphas.size(); ++b) {
      const theory::AmbiguityModel m{ns[a], alphas[b], 0.2};
      const double v = theory::sc2_ambiguity(m);
      const theory::McEstimate mc = theory::mc_ambiguity_sc2(m, 200000, 3000 + 10 * a + b);
      analytic[a][b] = v;
      const double diff = std::fabs(v - mc.estimate);
      const double allowed = 3 * mc.std_error + 0.02;
      if (diff > allowed) agree = false;
      if (diff - allowed > worst_gap) {
        worst_gap = diff - allowed;
        worst = fmt::format("N={} a={}: {:.4f} vs MC {:.4f}", ns[a], alphas[b], v, mc.estimate);
      }
    }
  }
  for (std::size_t a = 0; a < ns.size(); ++a) {
    for (std::size_t b = 0; b < alphas.size(); ++b) {
      if (a > 0 && analytic[a][b] > analytic[a - 1][b]) monotone = false;
      if (b > 0 && analytic[a][b] > analytic[a][b - 1]) monotone = false;
    }
  }
  const double near_zero = analytic[2][1];
  const double secs = seconds_since(t0);
  return {agree && monotone && near_zero < 0.01 && secs < 300.0,
          fmt::format("12 configs agree: {}, monotone: {}, value at (5000, 0.01) {:.5f}, tightest {}, {:.1f} s",
                      agree ? "yes" : "no", monotone ? "yes" : "no", near_zero, worst, secs)};
}

// ---- 4: toy example ------------------------------------------------------

Outcome toy_example() {
  const auto t0 = Clock::now();
  const CorrespondenceSet c = testing::toy_scene();
  const HardCompat hard = hard_compatibility(c, 0.1);
  const SC2Matrix sc2 = sc2_matrix(hard);
  long in_min = 1 << 30, out_max = 0;
  bool outliers_touch_inliers = true;
  for (std::size_t o = 5; o < 7; ++o) {
    bool any = false;
    for (std::size_t i = 0; i < 5; ++i) any |= hard(o, i);
    outliers_touch_inliers &= any;
  }
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      if (i == j) continue;
      if (i < 5 && j < 5) {
        in_min = std::min<long>(in_min, sc2(i, j));
      } else {
        out_max = std::max<long>(out_max, sc2(i, j));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {in_min >= 3 && out_max <= 1 && outliers_touch_inliers && secs < 1.0,
          fmt::format("min inlier-pair SC2 {}, max outlier SC2 {}, outliers compatible with an inlier: {}", in_min,
                      out_max, outliers_touch_inliers ? "yes" : "no")};
}

// ---- 5: exact recovery ---------------------------------------------------

Outcome exact_recovery() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(1005);
  std::uniform_real_distribution<double> wd(0.01, 1.0);
  std::uniform_int_distribution<std::size_t> nd(3, 200);
  double worst_r = 0.0, worst_t = 0.0;
  bool proper = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransform truth = testing::random_transform(gen, 10.0);
    const std::size_t n = nd(gen);
    const CorrespondenceSet c = testing::planted_set(gen, truth, n, n, 5.0);
    std::vector<double> w(n);
    for (double& x : w) x = wd(gen);
    const RigidTransform est = weighted_svd(c, w).transform;
    worst_r = std::max(worst_r, rotation_angle_between(est.rotation(), truth.rotation()));
    worst_t = std::max(worst_t, (est.translation() - truth.translation()).norm());
    proper &= std::fabs(est.rotation().determinant() - 1.0) < 1e-12;
  }
  const double secs = seconds_since(t0);
  return {worst_r < 1e-9 && worst_t < 1e-9 && proper && secs < 10.0,
          fmt::format("worst rotation {:.2e} rad, worst translation {:.2e} m, det +1: {}, {:.1f} s", worst_r,
                      worst_t, proper ? "yes" : "no", secs)};
}

// ---- 6 and 7: synthetic recall -------------------------------------------

constexpr harness::RecallThresholds kDeskThresholds{5.0, 0.3};

harness::SyntheticScene desk_scene(double ratio, std::uint64_t trial) {
  harness::SceneParams p;
  p.n = 1000;
  p.inlier_ratio = ratio;
  p.noise_sigma = 0.01;
  p.box_extent = 10.0;
  p.seed = (ratio < 0.015 ? 610000 : 620000) + trial;
  return harness::generate_scene(p);
}

bool succeeded(const RegistrationResult& r, const harness::SyntheticScene& s) {
  return harness::is_registered(
      {harness::rotation_error(r.transform.rotation(), s.gt_transform.rotation()),
       harness::translation_error(r.transform.translation(), s.gt_transform.translation())},
      kDeskThresholds);
}

double register_recall(double ratio) {
  int ok = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const harness::SyntheticScene s = desk_scene(ratio, t);
    try {
      ok += succeeded(register_correspondences(s.corrs, {}), s) ? 1 : 0;
    } catch (const DegenerateError&) {
    }
  }
  return ok / 200.0;
}

Outcome desk_recall() {
  const auto t0 = Clock::now();
  const double r2 = register_recall(0.02);
  const double r1 = register_recall(0.01);
  const double secs = seconds_since(t0);
  return {r2 >= 0.95 && r1 >= 0.80 && secs < 300.0,
          fmt::format("recall {:.3f} at 2%, {:.3f} at 1%, {:.1f} s", r2, r1, secs)};
}

Outcome baseline_ordering() {
  const auto t0 = Clock::now();
  int sc2_ok = 0, sc_ok = 0, ransac_ok = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    const harness::SyntheticScene s = desk_scene(0.02, t);
    try {
      sc2_ok += succeeded(register_correspondences(s.corrs, {}), s) ? 1 : 0;
    } catch (const DegenerateError&) {
    }
    try {
      sc_ok += succeeded(harness::sc_guided_register(s.corrs, {}), s) ? 1 : 0;
    } catch (const DegenerateError&) {
    }
    ransac_ok += succeeded(harness::ransac_register(s.corrs, 1000, 0.1, t), s) ? 1 : 0;
  }
  const double a = sc2_ok / 200.0, b = sc_ok / 200.0, c = ransac_ok / 200.0;
  const double secs = seconds_since(t0);
  return {a - c >= 0.20 && a >= b && secs < 600.0,
          fmt::format("recall register {:.3f}, first-order guided {:.3f}, ransac@1000 {:.3f}, {:.1f} s", a, b, c,
                      secs)};
}

// ---- 8: performance ------------------------------------------------------

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

Outcome performance() {
  harness::SceneParams p;
  p.n = 5000;
  p.inlier_ratio = 0.05;
  p.seed = 808;
  const harness::SyntheticScene s = harness::generate_scene(p);
  const HardCompat hard = hard_compatibility(s.corrs, 0.1);
  double one = 0.0, eight = 0.0, full = 0.0;
  {
    ScopedThreads t(1);
    one = best_of(3, [&] { (void)sc2_matrix(hard); });
    full = best_of(2, [&] { (void)register_correspondences(s.corrs, {}); });
  }
  {
    ScopedThreads t(8);
    eight = best_of(3, [&] { (void)sc2_matrix(hard); });
  }
  const unsigned cores = std::thread::hardware_concurrency();
  return {one < 2.0 && eight < 0.6 && full < 5.0,
          fmt::format("sc2_matrix N=5000: {:.3f} s at 1 thread, {:.3f} s at 8 threads ({} hardware threads "
                      "available); register N=5000: {:.3f} s at 1 thread",
                      one, eight, cores, full)};
}

// ---- 9: determinism ------------------------------------------------------

Outcome determinism() {
  harness::SceneParams p;
  p.n = 2000;
  p.inlier_ratio = 0.03;
  p.seed = 909;
  const harness::SyntheticScene s = harness::generate_scene(p);
  harness::SuiteConfig suite;
  suite.seed = 9;
  suite.trials_per_bucket = 4;
  suite.n = 500;
  suite.ransac_iterations = 200;
  std::string json1, json8, sum1, sum8, rows1, rows8;
  {
    ScopedThreads t(1);
    json1 = harness::result_to_json(register_correspondences(s.corrs, {}), {}).dump();
    const harness::BenchResult b = harness::run_bench(suite);
    sum1 = harness::bench_summary_csv(b);
    rows1 = harness::bench_trials_csv(b);
  }
  {
    ScopedThreads t(8);
    json8 = harness::result_to_json(register_correspondences(s.corrs, {}), {}).dump();
    const harness::BenchResult b = harness::run_bench(suite);
    sum8 = harness::bench_summary_csv(b);
    rows8 = harness::bench_trials_csv(b);
  }
  const bool ok = json1 == json8 && sum1 == sum8 && rows1 == rows8;
  return {ok, fmt::format("register JSON identical: {}, bench CSVs identical: {} ({} + {} bytes)",
                          json1 == json8 ? "yes" : "no", sum1 == sum8 && rows1 == rows8 ? "yes" : "no",
                          sum1.size(), rows1.size())};
}

// ---- 10: metric thresholds -----------------------------------------------

Outcome metric_thresholds() {
  using harness::kIndoorThresholds;
  using harness::kOutdoorThresholds;
  const bool constants = kIndoorThresholds.rotation_deg == 15.0 && kIndoorThresholds.translation_m == 0.30 &&
                         kOutdoorThresholds.rotation_deg == 5.0 && kOutdoorThresholds.translation_m == 0.60;
  // Boundaries are inclusive: (15, 0.30) is indoor-only, (5.0, 0.60) outdoor-only.
  const std::vector<harness::TrialErrors> rows{{15.0, 0.30}, {15.5, 0.1}, {4.9, 0.59},
                                               {5.0, 0.61}, {10.0, 0.2}, {5.0, 0.60}};
  const double indoor = harness::registration_recall(rows, kIndoorThresholds);
  const double outdoor = harness::registration_recall(rows, kOutdoorThresholds);
  const bool recall_ok = indoor == 2.0 / 6.0 && outdoor == 2.0 / 6.0;
  return {constants && recall_ok, fmt::format("indoor (15 deg, 0.30 m), outdoor (5 deg, 0.60 m); recall check "
                                              "indoor {} outdoor {}",
                                              indoor, outdoor)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"matrix identities", matrix_identities},
      {"first-order ambiguity", first_order_ambiguity},
      {"second-order ambiguity grid", second_order_grid},
      {"toy scene SC2 separation", toy_example},
      {"weighted SVD exact recovery", exact_recovery},
      {"synthetic registration recall", desk_recall},
      {"baseline ordering", baseline_ordering},
      {"performance", performance},
      {"determinism across thread counts", determinism},
      {"metric thresholds", metric_thresholds},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
