#include <algorithm>

#include "casd/candidates.hpp"
#include "casd/error.hpp"
#include "casd/io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace casd;

TEST_CASE("load_segments parses and sorts valid records") {
  test_util::TempDir dir;
  const auto path = dir.file("segments.jsonl");
  test_util::write_file(path,
                        R"({"id":"b","start":2.0,"end":3.0,"embedding":[0.0,1.0]})"
                        "\n"
                        R"({"id":"a","start":0.5,"end":1.5,"embedding":[1.0,0.0]})"
                        "\n");
  const auto segments = io::load_segments(path);
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].id == "a");
  CHECK(segments[1].id == "b");
  CHECK(segments[0].interval.start == 0.5);
  CHECK(segments[0].embedding.dim() == 2);
}

TEST_CASE("load_segments rejects malformed and invalid records") {
  test_util::TempDir dir;
  const auto path = dir.file("segments.jsonl");

  SUBCASE("malformed json names the line") {
    test_util::write_file(path, "{\"id\":\"a\",\"start\":0.0\n");
    try {
      io::load_segments(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
  }
  SUBCASE("zero-norm embedding names the id") {
    test_util::write_file(path, R"({"id":"z","start":0.0,"end":1.0,"embedding":[0.0,0.0]})"
                                "\n");
    try {
      io::load_segments(path);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("\"z\"") != std::string::npos);
    }
  }
  SUBCASE("non-finite embedding rejected") {
    test_util::write_file(path, R"({"id":"n","start":0.0,"end":1.0,"embedding":[1e999,0.0]})"
                                "\n");
    CHECK_THROWS_AS(io::load_segments(path), ParseError);
  }
  SUBCASE("mixed dimensions rejected") {
    test_util::write_file(path,
                          R"({"id":"a","start":0.0,"end":1.0,"embedding":[1.0,0.0]})"
                          "\n"
                          R"({"id":"b","start":1.0,"end":2.0,"embedding":[1.0,0.0,0.0]})"
                          "\n");
    try {
      io::load_segments(path);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("inconsistent embedding dimension") !=
            std::string::npos);
    }
  }
  SUBCASE("duplicate ids rejected") {
    test_util::write_file(path,
                          R"({"id":"a","start":0.0,"end":1.0,"embedding":[1.0]})"
                          "\n"
                          R"({"id":"a","start":1.0,"end":2.0,"embedding":[1.0]})"
                          "\n");
    CHECK_THROWS_AS(io::load_segments(path), ValidationError);
  }
  SUBCASE("interval invariant start < end") {
    test_util::write_file(path, R"({"id":"a","start":2.0,"end":2.0,"embedding":[1.0]})"
                                "\n");
    CHECK_THROWS_AS(io::load_segments(path), ValidationError);
  }
}

TEST_CASE("load_tracks averages per-frame embeddings") {
  test_util::TempDir dir;
  const auto path = dir.file("tracks.jsonl");
  test_util::write_file(path,
                        R"({"id":"t0","start":0.0,"end":1.0,"frames":[[1.0,0.0],[0.0,1.0]]})"
                        "\n");
  const auto tracks = io::load_tracks(path);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].embedding.values[0] == doctest::Approx(0.5));
  CHECK(tracks[0].embedding.values[1] == doctest::Approx(0.5));
  REQUIRE(tracks[0].frame_count.has_value());
  CHECK(*tracks[0].frame_count == 2);
}

TEST_CASE("load_tracks rejects embedding contradicting frames") {
  test_util::TempDir dir;
  const auto path = dir.file("tracks.jsonl");
  test_util::write_file(
      path,
      R"({"id":"t0","start":0.0,"end":1.0,"embedding":[9.0,9.0],"frames":[[1.0,0.0],[0.0,1.0]]})"
      "\n");
  CHECK_THROWS_AS(io::load_tracks(path), ValidationError);
}

TEST_CASE("segments round-trip through save and load unchanged") {
  test_util::TempDir dir;
  const auto path = dir.file("segments.jsonl");
  std::vector<SpeechSegment> original{
      {"a", {0.25, 1.75}, {{0.123456789012345, -1.5, 2.25}}},
      {"b", {2.0, 2.5}, {{-0.75, 0.1, 1e-8}}},
  };
  io::save_segments(path, original);
  const auto loaded = io::load_segments(path);
  REQUIRE(loaded.size() == original.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].id == original[i].id);
    CHECK(loaded[i].interval.start == original[i].interval.start);
    CHECK(loaded[i].interval.end == original[i].interval.end);
    CHECK(loaded[i].embedding.values == original[i].embedding.values);
  }
  // and the serialized bytes are stable
  io::save_segments(dir.file("again.jsonl"), loaded);
  CHECK(test_util::read_file(path) == test_util::read_file(dir.file("again.jsonl")));
}

TEST_CASE("ground truth loader handles null and strings") {
  test_util::TempDir dir;
  const auto path = dir.file("gt.jsonl");
  test_util::write_file(path,
                        R"({"segment_id":"a","track_id":"t1"})"
                        "\n"
                        R"({"segment_id":"b","track_id":null})"
                        "\n");
  const auto gt = io::load_ground_truth(path);
  REQUIRE(gt.entries.size() == 2);
  CHECK(gt.entries.at("a") == std::optional<TrackId>("t1"));
  CHECK_FALSE(gt.entries.at("b").has_value());
}

TEST_CASE("candidate map overlap rules") {
  std::vector<SpeechSegment> segments{{"s0", {1.0, 2.0}, {{1.0}}}};
  std::vector<FaceTrack> tracks{
      {"t_in", {1.5, 3.0}, {{1.0}}, std::nullopt},
      {"t_touch", {2.0, 3.0}, {{1.0}}, std::nullopt},
      {"t_out", {5.0, 6.0}, {{1.0}}, std::nullopt},
  };

  const auto map = build_candidate_map(segments, tracks);
  REQUIRE(map.entries.count("s0") == 1);
  // 0.5 s of overlap qualifies; a touching endpoint does not
  CHECK(map.entries.at("s0") == std::vector<TrackId>{"t_in"});
  CHECK(map.purged.empty());
}

TEST_CASE("segments with no candidates are purged") {
  std::vector<SpeechSegment> segments{{"s0", {0.0, 1.0}, {{1.0}}},
                                      {"s1", {10.0, 11.0}, {{1.0}}}};
  std::vector<FaceTrack> tracks{{"t0", {0.0, 1.0}, {{1.0}}, std::nullopt}};
  const auto map = build_candidate_map(segments, tracks);
  CHECK(map.entries.count("s0") == 1);
  CHECK(map.purged == std::vector<SegmentId>{"s1"});

  // purged and entries partition the input ids
  std::vector<SegmentId> all;
  for (const auto& [id, list] : map.entries) all.push_back(id);
  all.insert(all.end(), map.purged.begin(), map.purged.end());
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<SegmentId>{"s0", "s1"});
}

TEST_CASE("min_overlap raises the qualification bar") {
  std::vector<SpeechSegment> segments{{"s0", {0.0, 1.0}, {{1.0}}}};
  std::vector<FaceTrack> tracks{{"t0", {0.5, 2.0}, {{1.0}}, std::nullopt}};
  CHECK(build_candidate_map(segments, tracks, 0.25).entries.count("s0") == 1);
  CHECK(build_candidate_map(segments, tracks, 0.5).entries.count("s0") == 0);
  CHECK(build_candidate_map(segments, tracks, 0.5).purged.size() == 1);
}

TEST_CASE("candidate lists are ordered by track id") {
  std::vector<SpeechSegment> segments{{"s0", {0.0, 1.0}, {{1.0}}}};
  std::vector<FaceTrack> tracks{
      {"t_b", {0.0, 1.0}, {{1.0}}, std::nullopt},
      {"t_a", {0.0, 1.0}, {{1.0}}, std::nullopt},
  };
  const auto map = build_candidate_map(segments, tracks);
  CHECK(map.entries.at("s0") == std::vector<TrackId>{"t_a", "t_b"});
}
