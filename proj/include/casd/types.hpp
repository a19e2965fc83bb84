#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace casd {

using SegmentId = std::string;
using TrackId = std::string;

// Identity embedding. Never re-normalized on ingestion; cosine distance
// normalizes internally.
struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
};

// Half-open in spirit: start < end, duration strictly positive.
struct TimeInterval {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

// Speaker-homogeneous voiced interval with its speaker-identity embedding.
struct SpeechSegment {
  SegmentId id;
  TimeInterval interval;
  EmbeddingVector embedding;
};

// Contiguous appearance of one face, embedded by the (frame-averaged)
// face-identity representation.
struct FaceTrack {
  TrackId id;
  TimeInterval interval;
  EmbeddingVector embedding;
  std::optional<std::int64_t> frame_count;
};

// Per segment: the temporally overlapping candidate tracks, ordered by track
// id. Segments with no overlapping track are purged and excluded from all
// downstream analysis.
struct CandidateMap {
  std::map<SegmentId, std::vector<TrackId>> entries;
  std::vector<SegmentId> purged;
};

// nullopt marks an off-screen speaker.
struct GroundTruth {
  std::map<SegmentId, std::optional<TrackId>> entries;
};

// One line of assignments.jsonl. A record removed by the off-screen stage
// keeps its stage-1 track and score (used for ranking-based evaluation) and
// carries offscreen=true; such records count as no-assignment for F1.
struct AssignmentRecord {
  SegmentId segment_id;
  std::optional<TrackId> track_id;
  double score = 0.0;
  bool offscreen = false;
};

}  // namespace casd
