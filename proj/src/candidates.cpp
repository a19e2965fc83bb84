#include "casd/candidates.hpp"

#include <algorithm>

#include "casd/error.hpp"

namespace casd {

double overlap_duration(const TimeInterval& a, const TimeInterval& b) {
  const double lo = std::max(a.start, b.start);
  const double hi = std::min(a.end, b.end);
  return std::max(0.0, hi - lo);
}

CandidateMap build_candidate_map(const std::vector<SpeechSegment>& segments,
                                 const std::vector<FaceTrack>& tracks,
                                 double min_overlap) {
  if (min_overlap < 0.0) throw InvalidParameter("min_overlap must be >= 0");
  CandidateMap map;
  for (const auto& seg : segments) {
    std::vector<TrackId> candidates;
    for (const auto& track : tracks) {
      if (overlap_duration(seg.interval, track.interval) > min_overlap)
        candidates.push_back(track.id);
    }
    if (candidates.empty()) {
      map.purged.push_back(seg.id);
      continue;
    }
    std::sort(candidates.begin(), candidates.end());
    map.entries.emplace(seg.id, std::move(candidates));
  }
  return map;
}

}  // namespace casd
