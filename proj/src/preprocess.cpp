#include "casd/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "casd/error.hpp"
#include "json.hpp"

namespace casd::preprocess {
namespace {

void check_regions(const std::vector<RawVadRegion>& regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& t = regions[i].interval;
    if (!std::isfinite(t.start) || !std::isfinite(t.end) || t.start < 0.0 || !(t.start < t.end))
      throw ValidationError("invalid VAD region at index " + std::to_string(i));
    if (i > 0 && regions[i - 1].interval.end > t.start)
      throw ValidationError("VAD regions must be sorted and non-overlapping (index " +
                            std::to_string(i) + ")");
  }
}

void check_boundaries(const ShotBoundaryList& boundaries) {
  for (std::size_t i = 0; i < boundaries.times.size(); ++i) {
    const double t = boundaries.times[i];
    if (!std::isfinite(t) || t < 0.0)
      throw ValidationError("shot boundaries must be finite and non-negative");
    if (i > 0 && !(boundaries.times[i - 1] < t))
      throw ValidationError("shot boundaries must be strictly increasing");
  }
}

}  // namespace

std::vector<TimeInterval> split_by_boundaries(const std::vector<RawVadRegion>& regions,
                                              const ShotBoundaryList& boundaries) {
  check_regions(regions);
  check_boundaries(boundaries);
  std::vector<TimeInterval> out;
  for (const auto& region : regions) {
    const auto& t = region.interval;
    double cursor = t.start;
    // boundaries strictly inside (start, end); edges do not split
    auto it = std::upper_bound(boundaries.times.begin(), boundaries.times.end(), t.start);
    for (; it != boundaries.times.end() && *it < t.end; ++it) {
      out.push_back({cursor, *it});
      cursor = *it;
    }
    out.push_back({cursor, t.end});
  }
  return out;
}

std::vector<TimeInterval> split_max_duration(const std::vector<TimeInterval>& intervals,
                                             double max_dur) {
  if (!(max_dur > 0.0)) throw InvalidParameter("max_dur must be > 0");
  std::vector<TimeInterval> out;
  for (const auto& t : intervals) {
    const double dur = t.duration();
    // Chunk boundaries are computed as start + i*max_dur (not accumulated)
    // so concatenation reproduces the input exactly; the 1e-12 slack stops a
    // representation-noise sliver chunk when dur is a near-exact multiple.
    const auto chunks = static_cast<std::size_t>(
        std::max(1.0, std::ceil(dur / max_dur - 1e-12)));
    for (std::size_t i = 0; i < chunks; ++i) {
      const double lo = t.start + static_cast<double>(i) * max_dur;
      const double hi = (i + 1 == chunks) ? t.end : t.start + static_cast<double>(i + 1) * max_dur;
      out.push_back({lo, hi});
    }
  }
  return out;
}

std::vector<TimeInterval> filter_min_duration(const std::vector<TimeInterval>& intervals,
                                              double min_duration) {
  if (min_duration < 0.0) throw InvalidParameter("min_duration must be >= 0");
  std::vector<TimeInterval> out;
  for (const auto& t : intervals)
    if (t.duration() >= min_duration) out.push_back(t);
  return out;
}

std::vector<RawVadRegion> load_vad(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<RawVadRegion> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object() || !record.contains("start") ||
        !record.contains("end") || !record["start"].is_number() || !record["end"].is_number())
      throw ParseError(path, line_no, "expected {\"start\": number, \"end\": number}");
    out.push_back({{record["start"].get<double>(), record["end"].get<double>()}});
  }
  std::sort(out.begin(), out.end(), [](const RawVadRegion& a, const RawVadRegion& b) {
    return a.interval.start < b.interval.start;
  });
  check_regions(out);
  return out;
}

ShotBoundaryList load_shots(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("boundaries") ||
      !doc["boundaries"].is_array())
    throw ParseError("malformed shots file (expected {\"boundaries\": [..]}): " + path);
  ShotBoundaryList list;
  for (const auto& v : doc["boundaries"]) {
    if (!v.is_number()) throw ParseError("non-numeric shot boundary in " + path);
    list.times.push_back(v.get<double>());
  }
  std::sort(list.times.begin(), list.times.end());
  check_boundaries(list);
  return list;
}

void save_intervals_as_segments(const std::string& path,
                                const std::vector<TimeInterval>& intervals) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  char id[32];
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    std::snprintf(id, sizeof(id), "s%06zu", i);
    nlohmann::ordered_json record;
    record["id"] = id;
    record["start"] = intervals[i].start;
    record["end"] = intervals[i].end;
    out << record.dump() << '\n';
  }
}

}  // namespace casd::preprocess
