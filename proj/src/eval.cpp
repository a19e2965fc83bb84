#include "casd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "casd/error.hpp"

namespace casd::eval {
namespace {

double weight_of(const std::map<TrackId, std::int64_t>& weights, const TrackId& track) {
  auto it = weights.find(track);
  return it == weights.end() ? 1.0 : static_cast<double>(it->second);
}

const std::optional<TrackId>& ground_truth_of(const GroundTruth& gt, const SegmentId& seg) {
  auto it = gt.entries.find(seg);
  if (it == gt.entries.end())
    throw MissingGroundTruth("no ground truth for segment \"" + seg + "\"");
  return it->second;
}

}  // namespace

ConfusionReport confusion_metrics(const std::vector<AssignmentRecord>& predictions,
                                  const GroundTruth& gt, const CandidateMap& candidates,
                                  const std::map<TrackId, std::int64_t>& track_weights) {
  ConfusionReport report;
  for (const auto& record : predictions) {
    const auto& truth = ground_truth_of(gt, record.segment_id);
    std::optional<TrackId> predicted;
    if (!record.offscreen && record.track_id) predicted = record.track_id;

    if (predicted) {
      auto list = candidates.entries.find(record.segment_id);
      if (list != candidates.entries.end() &&
          std::find(list->second.begin(), list->second.end(), *predicted) ==
              list->second.end())
        throw ValidationError("predicted track \"" + *predicted +
                              "\" is not a candidate of segment \"" + record.segment_id +
                              "\"");
    }

    if (predicted && truth) {
      if (*predicted == *truth) {
        report.counts.tp += weight_of(track_weights, *predicted);
      } else {
        report.counts.fp += weight_of(track_weights, *predicted);
        report.counts.fn += weight_of(track_weights, *truth);
      }
    } else if (predicted && !truth) {
      report.counts.fp += weight_of(track_weights, *predicted);
    } else if (!predicted && truth) {
      report.counts.fn += weight_of(track_weights, *truth);
    } else {
      report.counts.tn += 1.0;
    }
  }

  const double tp = report.counts.tp;
  if (tp + report.counts.fp > 0.0) {
    report.precision = tp / (tp + report.counts.fp);
  } else {
    report.precision = 0.0;
    report.warnings.push_back("no positive predictions; precision undefined, reported as 0");
  }
  if (tp + report.counts.fn > 0.0) {
    report.recall = tp / (tp + report.counts.fn);
  } else {
    report.recall = 0.0;
    report.warnings.push_back("no positive ground truth; recall undefined, reported as 0");
  }
  report.f1 = (report.precision + report.recall > 0.0)
                  ? 2.0 * report.precision * report.recall /
                        (report.precision + report.recall)
                  : 0.0;
  return report;
}

std::vector<RankedPrediction> build_ranked_units(
    const std::vector<AssignmentRecord>& predictions, const GroundTruth& gt,
    const CandidateMap& candidates, const std::map<TrackId, std::int64_t>& track_weights) {
  std::vector<RankedPrediction> units;
  for (const auto& record : predictions) {
    const auto& truth = ground_truth_of(gt, record.segment_id);
    auto list = candidates.entries.find(record.segment_id);
    if (list == candidates.entries.end())
      throw ValidationError("segment \"" + record.segment_id + "\" has no candidate list");
    for (const auto& track : list->second) {
      RankedPrediction unit;
      unit.unit_id = record.segment_id + "::" + track;
      unit.label = truth && *truth == track;
      unit.weight = weight_of(track_weights, track);
      unit.score = (record.track_id && *record.track_id == track) ? record.score : -1.0;
      units.push_back(std::move(unit));
    }
  }
  return units;
}

double average_precision(std::vector<RankedPrediction> ranked) {
  double total_positive_weight = 0.0;
  for (const auto& unit : ranked)
    if (unit.label) total_positive_weight += unit.weight;
  if (total_positive_weight <= 0.0)
    throw NoPositives("average precision needs at least one positive unit");

  std::sort(ranked.begin(), ranked.end(),
            [](const RankedPrediction& a, const RankedPrediction& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.unit_id < b.unit_id;
            });

  // Extended-precision accumulation: the terms are small rationals and the
  // final double then carries the correctly rounded sum (the worked
  // three-unit ranking lands on 5/6 bit-exactly).
  double cumulative = 0.0;
  double cumulative_positive = 0.0;
  long double ap = 0.0L;
  for (const auto& unit : ranked) {
    cumulative += unit.weight;
    if (!unit.label) continue;
    cumulative_positive += unit.weight;
    const long double precision_at_k =
        static_cast<long double>(cumulative_positive) / cumulative;
    const long double recall_step =
        static_cast<long double>(unit.weight) / total_positive_weight;
    ap += precision_at_k * recall_step;
  }
  return static_cast<double>(ap);
}

double mean_average_precision(const std::vector<std::vector<RankedPrediction>>& per_video) {
  if (per_video.empty()) throw EmptySample("no videos to average");
  double acc = 0.0;
  for (const auto& video : per_video) acc += average_precision(video);
  return acc / static_cast<double>(per_video.size());
}

RocResult roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size())
    throw LengthMismatch("roc_auc: scores and labels differ in length");
  std::size_t n_pos = 0, n_neg = 0;
  for (bool label : labels) (label ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) throw SingleClass("roc_auc needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocResult result;
  result.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  double auc = 0.0;
  double prev_tpr = 0.0, prev_fpr = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // consume the whole tie group at once
    for (; i < order.size() && scores[order[i]] == threshold; ++i)
      (labels[order[i]] ? tp : fp) += 1;
    const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
    auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    result.points.push_back({threshold, tpr, fpr});
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  result.auc = auc;
  return result;
}

namespace {

struct RankSummary {
  double u1 = 0.0;            // midrank U of the first sample
  double tie_term = 0.0;      // sum of t^3 - t over tie groups
  std::vector<std::pair<double, std::size_t>> groups;  // (value, size), ascending
};

RankSummary summarize_ranks(std::span<const double> x, std::span<const double> y) {
  std::vector<std::pair<double, int>> pooled;  // (value, sample index)
  pooled.reserve(x.size() + y.size());
  for (double v : x) pooled.emplace_back(v, 0);
  for (double v : y) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());

  RankSummary summary;
  double r1 = 0.0;
  std::size_t i = 0;
  std::size_t consumed = 0;
  while (i < pooled.size()) {
    const double value = pooled[i].first;
    std::size_t count = 0, count_x = 0;
    for (; i < pooled.size() && pooled[i].first == value; ++i) {
      ++count;
      if (pooled[i].second == 0) ++count_x;
    }
    const double midrank =
        static_cast<double>(consumed) + (static_cast<double>(count) + 1.0) / 2.0;
    r1 += static_cast<double>(count_x) * midrank;
    consumed += count;
    const double t = static_cast<double>(count);
    summary.tie_term += t * t * t - t;
    summary.groups.emplace_back(value, count);
  }
  const double n1 = static_cast<double>(x.size());
  summary.u1 = r1 - n1 * (n1 + 1.0) / 2.0;
  return summary;
}

// Exact conditional two-sided p-value: distribution of 2*U over all ways of
// labelling the pooled multiset, counted by dynamic programming over tie
// groups. Doubled U values keep the state space integral under midranks.
double exact_p_value(const RankSummary& summary, std::size_t n1, std::size_t n2) {
  const std::size_t u2_max = 2 * n1 * n2;
  std::vector<double> ways((n1 + 1) * (u2_max + 1), 0.0);
  auto at = [&](std::vector<double>& v, std::size_t a, std::size_t u2) -> double& {
    return v[a * (u2_max + 1) + u2];
  };
  ways[0] = 1.0;
  std::vector<double> next(ways.size());

  // Binomial coefficients up to the largest tie group.
  std::size_t max_group = 1;
  for (const auto& [value, size] : summary.groups) max_group = std::max(max_group, size);
  std::vector<std::vector<double>> binom(max_group + 1);
  for (std::size_t s = 0; s <= max_group; ++s) {
    binom[s].assign(s + 1, 1.0);
    for (std::size_t j = 1; j < s; ++j) binom[s][j] = binom[s - 1][j - 1] + binom[s - 1][j];
  }

  std::size_t processed = 0;
  for (const auto& [value, size] : summary.groups) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t a = 0; a <= std::min(n1, processed); ++a) {
      const std::size_t y_before = processed - a;
      if (y_before > n2) continue;
      for (std::size_t u2 = 0; u2 <= u2_max; ++u2) {
        const double w = at(ways, a, u2);
        if (w == 0.0) continue;
        const std::size_t j_max = std::min(size, n1 - a);
        for (std::size_t j = 0; j <= j_max; ++j) {
          // j members of this tie group go to sample 1, the rest to sample
          // 2; the sample-2 budget keeps u2 within bounds.
          if (y_before + (size - j) > n2) continue;
          // each new sample-1 member beats every earlier sample-2 item and
          // half-ties within its group
          const std::size_t du2 = 2 * j * y_before + j * (size - j);
          at(next, a + j, u2 + du2) += w * binom[size][j];
        }
      }
    }
    ways.swap(next);
    processed += size;
  }

  const double mu2 = static_cast<double>(n1) * static_cast<double>(n2);
  const double observed_dev = std::abs(2.0 * summary.u1 - mu2);
  double total = 0.0, extreme = 0.0;
  for (std::size_t u2 = 0; u2 <= u2_max; ++u2) {
    const double w = at(ways, n1, u2);
    total += w;
    // 1e-9 slack keeps exactly-symmetric deviations inside the tail
    if (std::abs(static_cast<double>(u2) - mu2) >= observed_dev - 1e-9) extreme += w;
  }
  return std::min(1.0, extreme / total);
}

double normal_p_value(const RankSummary& summary, std::size_t n1, std::size_t n2) {
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double n = dn1 + dn2;
  const double mu = dn1 * dn2 / 2.0;
  const double variance =
      dn1 * dn2 / 12.0 * ((n + 1.0) - summary.tie_term / (n * (n - 1.0)));
  if (variance <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(summary.u1 - mu) - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y,
                                 MannWhitneyMethod method) {
  if (x.empty() || y.empty()) throw EmptySample("mann_whitney_u: empty sample");
  const RankSummary summary = summarize_ranks(x, y);
  MannWhitneyResult result;
  result.u = summary.u1;
  const std::size_t product = x.size() * y.size();
  const bool use_exact = method == MannWhitneyMethod::kExact ||
                         (method == MannWhitneyMethod::kAuto && product <= 400);
  if (use_exact) {
    result.exact = true;
    result.p_value = exact_p_value(summary, x.size(), y.size());
  } else {
    result.exact = false;
    result.p_value = normal_p_value(summary, x.size(), y.size());
  }
  return result;
}

EvaluationReport evaluate(const std::vector<AssignmentRecord>& predictions,
                          const GroundTruth& gt, const CandidateMap& candidates,
                          const std::map<TrackId, std::int64_t>& track_weights) {
  EvaluationReport report;
  report.confusion = confusion_metrics(predictions, gt, candidates, track_weights);
  report.map = average_precision(build_ranked_units(predictions, gt, candidates, track_weights));

  // Off-screen classification quality, when both classes exist: lower row
  // correlation must rank truly off-screen segments first.
  std::vector<double> on_scores, off_scores;
  std::vector<double> negated;
  std::vector<bool> off_labels;
  for (const auto& record : predictions) {
    const auto& truth = ground_truth_of(gt, record.segment_id);
    (truth ? on_scores : off_scores).push_back(record.score);
    negated.push_back(-record.score);
    off_labels.push_back(!truth.has_value());
  }
  if (!on_scores.empty() && !off_scores.empty()) {
    report.auroc = roc_auc(negated, off_labels).auc;
    report.separation = mann_whitney_u(on_scores, off_scores);
  }
  return report;
}

}  // namespace casd::eval
