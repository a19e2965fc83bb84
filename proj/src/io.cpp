#include "casd/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "casd/error.hpp"
#include "json.hpp"

namespace casd::io {
namespace {

using nlohmann::ordered_json;

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  return out;
}

ordered_json parse_line(const std::string& path, std::size_t line_no,
                        const std::string& line) {
  ordered_json record = ordered_json::parse(line, nullptr, false);
  if (record.is_discarded() || !record.is_object())
    throw ParseError(path, line_no, "malformed JSON record");
  return record;
}

double require_number(const ordered_json& record, const char* key,
                      const std::string& path, std::size_t line_no) {
  if (!record.contains(key) || !record.at(key).is_number())
    throw ParseError(path, line_no, std::string("missing or non-numeric \"") + key + "\"");
  return record.at(key).get<double>();
}

std::string require_string(const ordered_json& record, const char* key,
                           const std::string& path, std::size_t line_no) {
  if (!record.contains(key) || !record.at(key).is_string())
    throw ParseError(path, line_no, std::string("missing or non-string \"") + key + "\"");
  return record.at(key).get<std::string>();
}

std::vector<double> read_vector(const ordered_json& value, const std::string& path,
                                std::size_t line_no) {
  if (!value.is_array() || value.empty())
    throw ParseError(path, line_no, "embedding must be a non-empty array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) throw ParseError(path, line_no, "embedding entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_embedding(const EmbeddingVector& e, const std::string& id) {
  double norm_sq = 0.0;
  for (double v : e.values) {
    if (!std::isfinite(v))
      throw ValidationError("non-finite embedding value for id \"" + id + "\"");
    norm_sq += v * v;
  }
  if (norm_sq == 0.0)
    throw ValidationError("zero-norm embedding for id \"" + id + "\"");
}

void check_interval(const TimeInterval& t, const std::string& id) {
  if (!std::isfinite(t.start) || !std::isfinite(t.end))
    throw ValidationError("non-finite interval for id \"" + id + "\"");
  if (t.start < 0.0 || !(t.start < t.end))
    throw ValidationError("invalid interval for id \"" + id +
                          "\" (need 0 <= start < end)");
}

template <typename Item>
void finish_load(std::vector<Item>& items) {
  std::set<std::string> seen;
  std::size_t dim = 0;
  for (const auto& item : items) {
    if (!seen.insert(item.id).second)
      throw ValidationError("duplicate id \"" + item.id + "\"");
    if (dim == 0) dim = item.embedding.dim();
    if (item.embedding.dim() != dim)
      throw ValidationError("inconsistent embedding dimension at id \"" + item.id +
                            "\" (" + std::to_string(item.embedding.dim()) + " vs " +
                            std::to_string(dim) + ")");
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
    return a.id < b.id;
  });
}

ordered_json embedding_to_json(const EmbeddingVector& e) {
  return ordered_json(e.values);
}

}  // namespace

std::vector<SpeechSegment> load_segments(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<SpeechSegment> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const ordered_json record = parse_line(path, line_no, line);
    SpeechSegment seg;
    seg.id = require_string(record, "id", path, line_no);
    seg.interval.start = require_number(record, "start", path, line_no);
    seg.interval.end = require_number(record, "end", path, line_no);
    if (!record.contains("embedding"))
      throw ParseError(path, line_no, "missing \"embedding\"");
    seg.embedding.values = read_vector(record.at("embedding"), path, line_no);
    check_interval(seg.interval, seg.id);
    check_embedding(seg.embedding, seg.id);
    out.push_back(std::move(seg));
  }
  finish_load(out);
  return out;
}

std::vector<FaceTrack> load_tracks(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<FaceTrack> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const ordered_json record = parse_line(path, line_no, line);
    FaceTrack track;
    track.id = require_string(record, "id", path, line_no);
    track.interval.start = require_number(record, "start", path, line_no);
    track.interval.end = require_number(record, "end", path, line_no);

    if (record.contains("frames")) {
      const auto& frames = record.at("frames");
      if (!frames.is_array() || frames.empty())
        throw ParseError(path, line_no, "\"frames\" must be a non-empty array");
      std::vector<double> mean;
      for (const auto& frame : frames) {
        std::vector<double> f = read_vector(frame, path, line_no);
        if (mean.empty()) mean.assign(f.size(), 0.0);
        if (f.size() != mean.size())
          throw ValidationError("inconsistent frame embedding dimension for id \"" +
                                track.id + "\"");
        for (std::size_t i = 0; i < f.size(); ++i) mean[i] += f[i];
      }
      for (double& v : mean) v /= static_cast<double>(frames.size());
      // With per-frame data the track embedding is their mean; an embedding
      // field, if also present, must agree.
      if (record.contains("embedding")) {
        const std::vector<double> given = read_vector(record.at("embedding"), path, line_no);
        if (given.size() != mean.size())
          throw ValidationError("embedding/frames dimension mismatch for id \"" +
                                track.id + "\"");
        for (std::size_t i = 0; i < mean.size(); ++i) {
          if (std::abs(given[i] - mean[i]) > 1e-6)
            throw ValidationError("embedding does not equal frame mean for id \"" +
                                  track.id + "\"");
        }
      }
      track.embedding.values = std::move(mean);
      track.frame_count = static_cast<std::int64_t>(frames.size());
    } else {
      if (!record.contains("embedding"))
        throw ParseError(path, line_no, "missing \"embedding\" (and no \"frames\")");
      track.embedding.values = read_vector(record.at("embedding"), path, line_no);
    }

    if (record.contains("frame_count")) {
      if (!record.at("frame_count").is_number_integer())
        throw ParseError(path, line_no, "\"frame_count\" must be an integer");
      const std::int64_t n = record.at("frame_count").get<std::int64_t>();
      if (n <= 0) throw ValidationError("non-positive frame_count for id \"" + track.id + "\"");
      if (track.frame_count && *track.frame_count != n)
        throw ValidationError("frame_count disagrees with frames length for id \"" +
                              track.id + "\"");
      track.frame_count = n;
    }

    check_interval(track.interval, track.id);
    check_embedding(track.embedding, track.id);
    out.push_back(std::move(track));
  }
  finish_load(out);
  return out;
}

GroundTruth load_ground_truth(const std::string& path) {
  auto in = open_for_read(path);
  GroundTruth gt;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const ordered_json record = parse_line(path, line_no, line);
    const std::string seg = require_string(record, "segment_id", path, line_no);
    if (!record.contains("track_id"))
      throw ParseError(path, line_no, "missing \"track_id\"");
    std::optional<TrackId> track;
    if (!record.at("track_id").is_null()) {
      if (!record.at("track_id").is_string())
        throw ParseError(path, line_no, "\"track_id\" must be a string or null");
      track = record.at("track_id").get<std::string>();
    }
    if (!gt.entries.emplace(seg, std::move(track)).second)
      throw ValidationError("duplicate ground-truth entry for segment \"" + seg + "\"");
  }
  return gt;
}

std::vector<AssignmentRecord> load_assignments(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<AssignmentRecord> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const ordered_json record = parse_line(path, line_no, line);
    AssignmentRecord rec;
    rec.segment_id = require_string(record, "segment_id", path, line_no);
    if (!record.contains("track_id"))
      throw ParseError(path, line_no, "missing \"track_id\"");
    if (!record.at("track_id").is_null()) {
      if (!record.at("track_id").is_string())
        throw ParseError(path, line_no, "\"track_id\" must be a string or null");
      rec.track_id = record.at("track_id").get<std::string>();
    }
    rec.score = require_number(record, "score", path, line_no);
    if (record.contains("offscreen")) {
      if (!record.at("offscreen").is_boolean())
        throw ParseError(path, line_no, "\"offscreen\" must be a boolean");
      rec.offscreen = record.at("offscreen").get<bool>();
    }
    if (!seen.insert(rec.segment_id).second)
      throw ValidationError("duplicate assignment for segment \"" + rec.segment_id + "\"");
    out.push_back(std::move(rec));
  }
  return out;
}

std::map<SegmentId, TrackId> load_pins(const std::string& path) {
  const GroundTruth gt = load_ground_truth(path);
  std::map<SegmentId, TrackId> pins;
  for (const auto& [seg, track] : gt.entries) {
    if (!track)
      throw ValidationError("pin for segment \"" + seg + "\" must name a track");
    pins.emplace(seg, *track);
  }
  return pins;
}

void save_segments(const std::string& path, const std::vector<SpeechSegment>& segments) {
  auto out = open_for_write(path);
  for (const auto& seg : segments) {
    ordered_json record;
    record["id"] = seg.id;
    record["start"] = seg.interval.start;
    record["end"] = seg.interval.end;
    record["embedding"] = embedding_to_json(seg.embedding);
    out << record.dump() << '\n';
  }
}

void save_tracks(const std::string& path, const std::vector<FaceTrack>& tracks) {
  auto out = open_for_write(path);
  for (const auto& track : tracks) {
    ordered_json record;
    record["id"] = track.id;
    record["start"] = track.interval.start;
    record["end"] = track.interval.end;
    record["embedding"] = embedding_to_json(track.embedding);
    if (track.frame_count) record["frame_count"] = *track.frame_count;
    out << record.dump() << '\n';
  }
}

void save_ground_truth(const std::string& path, const GroundTruth& gt) {
  auto out = open_for_write(path);
  for (const auto& [seg, track] : gt.entries) {
    ordered_json record;
    record["segment_id"] = seg;
    if (track)
      record["track_id"] = *track;
    else
      record["track_id"] = nullptr;
    out << record.dump() << '\n';
  }
}

void save_assignments(const std::string& path, const std::vector<AssignmentRecord>& records) {
  auto out = open_for_write(path);
  for (const auto& rec : records) {
    ordered_json record;
    record["segment_id"] = rec.segment_id;
    if (rec.track_id)
      record["track_id"] = *rec.track_id;
    else
      record["track_id"] = nullptr;
    record["score"] = rec.score;
    if (rec.offscreen) record["offscreen"] = true;
    out << record.dump() << '\n';
  }
}

}  // namespace casd::io
