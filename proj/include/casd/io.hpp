#pragma once

#include <string>
#include <vector>

#include "casd/types.hpp"

// JSON-Lines readers and writers for the on-disk formats:
//   segments.jsonl     {"id", "start", "end", "embedding": [..]}
//   tracks.jsonl       same, plus optional "frames": [[..],..] and
//                      "frame_count"; with "frames" present the track
//                      embedding is their arithmetic mean
//   groundtruth.jsonl  {"segment_id", "track_id": string|null}
//   assignments.jsonl  {"segment_id", "track_id": string|null, "score",
//                       optional "offscreen": bool}
// Readers validate record syntax (ParseError with line number) and domain
// invariants (ValidationError naming the offending id). Loaded lists come
// back sorted by start time.

namespace casd::io {

std::vector<SpeechSegment> load_segments(const std::string& path);
std::vector<FaceTrack> load_tracks(const std::string& path);
GroundTruth load_ground_truth(const std::string& path);
std::vector<AssignmentRecord> load_assignments(const std::string& path);

// Pin file: groundtruth.jsonl schema with non-null track ids.
std::map<SegmentId, TrackId> load_pins(const std::string& path);

void save_segments(const std::string& path, const std::vector<SpeechSegment>& segments);
void save_tracks(const std::string& path, const std::vector<FaceTrack>& tracks);
void save_ground_truth(const std::string& path, const GroundTruth& gt);
void save_assignments(const std::string& path, const std::vector<AssignmentRecord>& records);

}  // namespace casd::io
