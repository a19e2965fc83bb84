#pragma once

#include <string>
#include <vector>

#include "casd/types.hpp"

// Speaker-homogeneous proxy segmentation: split raw voice-activity intervals
// at shot boundaries, then cap every piece at a maximum duration. Pure
// interval arithmetic; embeddings are attached elsewhere.

namespace casd::preprocess {

struct RawVadRegion {
  TimeInterval interval;
};

struct ShotBoundaryList {
  std::vector<double> times;  // strictly increasing, non-negative
};

// Splits each region at every boundary strictly inside it. Boundaries at
// region edges do not split. Total covered duration is preserved.
std::vector<TimeInterval> split_by_boundaries(const std::vector<RawVadRegion>& regions,
                                              const ShotBoundaryList& boundaries);

// Left-to-right chunks of exactly max_dur with the remainder last.
// Concatenation of the outputs reproduces each input exactly.
std::vector<TimeInterval> split_max_duration(const std::vector<TimeInterval>& intervals,
                                             double max_dur);

// Drops intervals shorter than min_duration (default keeps everything).
std::vector<TimeInterval> filter_min_duration(const std::vector<TimeInterval>& intervals,
                                              double min_duration);

// vad.jsonl: {"start": number, "end": number} per line, sorted and
// non-overlapping. shots.json: {"boundaries": [number, ...]}.
std::vector<RawVadRegion> load_vad(const std::string& path);
ShotBoundaryList load_shots(const std::string& path);

// Writes the segments.jsonl schema without embeddings, ids generated in
// temporal order.
void save_intervals_as_segments(const std::string& path,
                                const std::vector<TimeInterval>& intervals);

}  // namespace casd::preprocess
