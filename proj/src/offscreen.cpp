#include "casd/offscreen.hpp"

#include <algorithm>
#include <set>

#include "casd/error.hpp"

namespace casd::offscreen {

std::vector<SegmentScore> score_segments(const DistanceMatrix& sd, const DistanceMatrix& fd,
                                         DiagonalPolicy policy) {
  if (sd.order != fd.order)
    throw OrderMismatch("distance matrices have different segment orders");
  std::vector<SegmentScore> scores;
  scores.reserve(sd.order.size());
  for (std::size_t i = 0; i < sd.order.size(); ++i) {
    std::optional<std::size_t> exclude;
    if (policy == DiagonalPolicy::kExclude) exclude = i;
    scores.push_back({sd.order[i], row_pearson(sd.values.row(i), fd.values.row(i), exclude)});
  }
  return scores;
}

ClassifyResult classify_offscreen(std::vector<AssignmentRecord> records, double tau) {
  if (!(tau >= -1.0 && tau <= 1.0)) throw InvalidParameter("tau must be in [-1, 1]");
  ClassifyResult result;
  for (auto& record : records) {
    if (!record.offscreen && record.score < tau) {
      record.offscreen = true;
      ++result.removed;
    }
  }
  result.records = std::move(records);
  return result;
}

std::vector<RocPoint> roc_table(const std::vector<AssignmentRecord>& records,
                                const GroundTruth& gt) {
  std::size_t n_off = 0, n_on = 0;
  std::vector<std::pair<double, bool>> scored;  // (score, truly off-screen)
  scored.reserve(records.size());
  for (const auto& record : records) {
    auto it = gt.entries.find(record.segment_id);
    if (it == gt.entries.end())
      throw MissingGroundTruth("no ground truth for segment \"" + record.segment_id + "\"");
    const bool off = !it->second.has_value();
    scored.emplace_back(record.score, off);
    (off ? n_off : n_on) += 1;
  }
  if (n_off == 0 || n_on == 0)
    throw SingleClass("ROC sweep needs both on-screen and off-screen segments");

  std::set<double> taus{-1.0, 1.0};
  for (const auto& [score, off] : scored) taus.insert(score);

  std::vector<RocPoint> points;
  points.reserve(taus.size());
  for (double tau : taus) {
    std::size_t tp = 0, fp = 0;
    for (const auto& [score, off] : scored) {
      if (score < tau) (off ? tp : fp) += 1;
    }
    points.push_back({tau, static_cast<double>(tp) / static_cast<double>(n_off),
                      static_cast<double>(fp) / static_cast<double>(n_on)});
  }
  return points;
}

}  // namespace casd::offscreen
