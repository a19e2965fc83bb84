#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casd/types.hpp"

// Metrics against ground truth. The evaluation unit is the (segment,
// candidate-track) pair; when frame counts are known each unit is weighted
// by them to approximate box-level scores.

namespace casd::eval {

struct ConfusionCounts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;
};

struct ConfusionReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
  std::vector<std::string> warnings;
};

// TP: predicted track equals the true one. A wrong track counts as both FP
// (for the predicted boxes) and FN (for the missed true boxes). Records
// flagged off-screen count as no prediction.
ConfusionReport confusion_metrics(const std::vector<AssignmentRecord>& predictions,
                                  const GroundTruth& gt,
                                  const CandidateMap& candidates,
                                  const std::map<TrackId, std::int64_t>& track_weights = {});

struct RankedPrediction {
  std::string unit_id;
  double score = 0.0;
  bool label = false;
  double weight = 1.0;
};

// One unit per (segment, candidate track): the predicted track keeps its
// row-correlation score (also when later flagged off-screen), every other
// candidate box scores -1, the floor of the correlation range.
std::vector<RankedPrediction> build_ranked_units(
    const std::vector<AssignmentRecord>& predictions, const GroundTruth& gt,
    const CandidateMap& candidates,
    const std::map<TrackId, std::int64_t>& track_weights = {});

// Non-interpolated AP over the score-descending ranking (ties broken by
// unit id).
double average_precision(std::vector<RankedPrediction> ranked);

// Unweighted mean of per-video APs.
double mean_average_precision(const std::vector<std::vector<RankedPrediction>>& per_video);

struct RocCurvePoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct RocResult {
  double auc = 0.0;
  std::vector<RocCurvePoint> points;
};

// Trapezoidal ROC over "score >= threshold => positive". Tied scores are
// grouped, which makes the area equal the midrank U statistic divided by
// n1*n2.
RocResult roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

enum class MannWhitneyMethod { kAuto, kExact, kNormal };

struct MannWhitneyResult {
  double u = 0.0;       // U statistic of the first sample, midrank ties
  double p_value = 1.0; // two-sided
  bool exact = false;
};

// Exact conditional (tie-aware) null distribution when n1*n2 <= 400 under
// kAuto, otherwise normal approximation with tie and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                                 MannWhitneyMethod method = MannWhitneyMethod::kAuto);

struct EvaluationReport {
  ConfusionReport confusion;
  double map = 0.0;
  std::optional<double> auroc;                     // off-screen classification
  std::optional<MannWhitneyResult> separation;     // on- vs off-screen scores
};

// Full report for one video worth of assignments.
EvaluationReport evaluate(const std::vector<AssignmentRecord>& predictions,
                          const GroundTruth& gt, const CandidateMap& candidates,
                          const std::map<TrackId, std::int64_t>& track_weights = {});

}  // namespace casd::eval
