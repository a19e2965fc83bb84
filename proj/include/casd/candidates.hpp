#pragma once

#include <vector>

#include "casd/types.hpp"

namespace casd {

// For each segment, gather the tracks whose temporal intersection with it
// exceeds min_overlap seconds (strictly; touching endpoints never qualify).
// Candidate lists are ordered by track id. Segments left with no candidate
// are recorded in `purged` (input order) and get no entry.
CandidateMap build_candidate_map(const std::vector<SpeechSegment>& segments,
                                 const std::vector<FaceTrack>& tracks,
                                 double min_overlap = 0.0);

// Intersection duration of two intervals, >= 0.
double overlap_duration(const TimeInterval& a, const TimeInterval& b);

}  // namespace casd
