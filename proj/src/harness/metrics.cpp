#include "sc2pcr/harness/metrics.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace sc2pcr::harness {

double rotation_error(const Eigen::Matrix3d& estimate, const Eigen::Matrix3d& ground_truth) {
  if (!RigidTransform::is_rotation(estimate) || !RigidTransform::is_rotation(ground_truth)) {
    throw std::invalid_argument("rotation_error expects proper rotation matrices");
  }
  // atan2 form of arccos((tr - 1) / 2); identical value, stable near 0 and pi.
  return rotation_angle_between(estimate, ground_truth) * 180.0 / std::numbers::pi;
}

double translation_error(const Eigen::Vector3d& estimate, const Eigen::Vector3d& ground_truth) {
  return (estimate - ground_truth).norm();
}

bool is_registered(const TrialErrors& e, RecallThresholds thresholds) {
  return e.rotation_deg <= thresholds.rotation_deg && e.translation_m <= thresholds.translation_m;
}

double registration_recall(std::span<const TrialErrors> trials, RecallThresholds thresholds) {
  if (trials.empty()) throw std::invalid_argument("registration_recall on an empty trial set");
  if (!(thresholds.rotation_deg > 0.0) || !(thresholds.translation_m > 0.0)) {
    throw std::invalid_argument("recall thresholds must be positive");
  }
  const auto ok = std::count_if(trials.begin(), trials.end(),
                                [&](const TrialErrors& e) { return is_registered(e, thresholds); });
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

InlierPrf inlier_prf(const InlierMask& predicted, const InlierMask& ground_truth) {
  if (predicted.size() != ground_truth.size()) throw std::invalid_argument("inlier masks differ in length");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted.bits[i];
    const bool g = ground_truth.bits[i];
    tp += (p && g) ? 1 : 0;
    fp += (p && !g) ? 1 : 0;
    fn += (!p && g) ? 1 : 0;
  }
  InlierPrf out;
  if (tp + fp == 0) {
    out.precision_undefined = true;
  } else {
    out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    out.recall_undefined = true;
  } else {
    out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  } else {
    out.f1_undefined = true;
  }
  return out;
}

EvalReport summarize(std::vector<TrialRow> rows, RecallThresholds thresholds) {
  if (rows.empty()) throw std::invalid_argument("cannot summarize an empty trial set");
  EvalReport r;
  r.method = rows.front().method;
  r.bucket = rows.front().bucket;
  r.trials = rows.size();
  double re = 0.0, te = 0.0;
  for (auto& row : rows) {
    row.success = is_registered(row.errors, thresholds);
    if (row.success) {
      ++r.successes;
      re += row.errors.rotation_deg;
      te += row.errors.translation_m;
    }
    r.mean_ip += row.prf.precision;
    r.mean_ir += row.prf.recall;
    r.mean_f1 += row.prf.f1;
    r.mean_seconds += row.seconds;
    r.max_seconds = std::max(r.max_seconds, row.seconds);
  }
  const auto n = static_cast<double>(r.trials);
  r.recall = static_cast<double>(r.successes) / n;
  if (r.successes > 0) {
    r.mean_re_deg = re / static_cast<double>(r.successes);
    r.mean_te_m = te / static_cast<double>(r.successes);
  }
  r.mean_ip /= n;
  r.mean_ir /= n;
  r.mean_f1 /= n;
  r.mean_seconds /= n;
  r.rows = std::move(rows);
  return r;
}

}  // namespace sc2pcr::harness
