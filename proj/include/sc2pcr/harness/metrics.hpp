#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sc2pcr/core.hpp"

namespace sc2pcr::harness {

/// A trial counts as registered when RE <= rotation_deg and TE <= translation_m.
struct RecallThresholds {
  double rotation_deg = 15.0;
  double translation_m = 0.30;
};

/// Indoor benchmark criterion (15 deg, 30 cm).
inline constexpr RecallThresholds kIndoorThresholds{15.0, 0.30};
/// Outdoor benchmark criterion (5 deg, 60 cm).
inline constexpr RecallThresholds kOutdoorThresholds{5.0, 0.60};

/// Isotropic rotation error in degrees: arccos((trace(Rgt^T Rest) - 1) / 2).
double rotation_error(const Eigen::Matrix3d& estimate, const Eigen::Matrix3d& ground_truth);

/// ||t_est - t_gt||.
double translation_error(const Eigen::Vector3d& estimate, const Eigen::Vector3d& ground_truth);

struct TrialErrors {
  double rotation_deg = 0.0;
  double translation_m = 0.0;
};

bool is_registered(const TrialErrors& e, RecallThresholds thresholds);

/// Fraction of trials within both thresholds.
double registration_recall(std::span<const TrialErrors> trials, RecallThresholds thresholds);

struct InlierPrf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Set when the corresponding denominator was zero and 0 was reported.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

InlierPrf inlier_prf(const InlierMask& predicted, const InlierMask& ground_truth);

/// One method on one synthetic instance.
struct TrialRow {
  std::string method;
  std::string bucket;
  std::size_t trial = 0;
  double inlier_ratio = 0.0;
  TrialErrors errors;
  bool success = false;
  InlierPrf prf;
  std::size_t inlier_count = 0;
  double seconds = 0.0;
};

/// Aggregate over trials. Mean RE / TE are taken over successful trials
/// only; IP / IR / F1 are averaged over all trials.
struct EvalReport {
  std::string method;
  std::string bucket;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double recall = 0.0;
  double mean_re_deg = 0.0;
  double mean_te_m = 0.0;
  double mean_ip = 0.0;
  double mean_ir = 0.0;
  double mean_f1 = 0.0;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
  std::vector<TrialRow> rows;
};

/// Throws std::invalid_argument on an empty row set.
EvalReport summarize(std::vector<TrialRow> rows, RecallThresholds thresholds);

}  // namespace sc2pcr::harness
