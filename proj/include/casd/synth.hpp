#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "casd/solver.hpp"
#include "casd/types.hpp"

// Synthetic scenarios with controllable difficulty, plus an exhaustive
// assignment oracle. Characters get one unit direction per modality;
// segment and track embeddings are that direction nudged by noise on the
// sphere.

namespace casd::synth {

struct ScenarioConfig {
  int num_characters = 4;        // C >= 2 (speaking characters)
  int num_segments = 50;         // N >= 3
  int candidates_per_segment = 3;  // k >= 1
  int audio_dim = 64;
  int visual_dim = 64;
  double audio_noise = 0.0;      // perturbation norm before renormalizing
  double visual_noise = 0.0;
  double offscreen_fraction = 0.0;        // [0, 1)
  double background_face_fraction = 0.0;  // [0, 1): distractors drawn from
                                          // never-speaking characters
  double min_separation = 0.5;   // min pairwise cosine distance of directions
  std::uint64_t seed = 0;
};

struct SyntheticScenario {
  std::vector<SpeechSegment> segments;
  std::vector<FaceTrack> tracks;
  CandidateMap candidates;
  GroundTruth ground_truth;
  std::map<SegmentId, std::string> segment_character;
  std::map<TrackId, std::string> track_character;
};

// On-screen segments carry their character's track among the candidates;
// off-screen segments get distractor tracks only and a null ground truth.
// Deterministic per seed.
SyntheticScenario generate_scenario(const ScenarioConfig& config);

// Panel-discussion failure mode: characters 0 and 1 co-occur in every one
// of their candidate lists and never appear elsewhere, and their visual
// identities sit crosswise in a visual geometry that otherwise mirrors the
// audio geometry. Without pins the optimizer confidently swaps the pair;
// pinned ground-truth anchors flip it back.
struct ColumbiaConfig {
  int num_characters = 5;  // >= 4: the pair plus at least two identifiable
  int num_segments = 150;
  int embedding_dim = 32;  // shared by both modalities
  double audio_noise = 0.05;
  double visual_noise = 0.05;
  std::uint64_t seed = 0;
};

SyntheticScenario generate_columbia_scenario(const ColumbiaConfig& config);

struct OracleResult {
  std::vector<std::int32_t> assignment;  // per segment, track index
  double objective = 0.0;
};

// Exhaustive maximization of the assignment objective over the candidate
// product space (at most max_states states, else TooLarge). Ties go to the
// lexicographically smallest track-index tuple. Every state is evaluated by
// full matrix reconstruction, independently of the solver's incremental
// path.
OracleResult brute_force_oracle(const PartitionProblem& problem,
                                DiagonalPolicy policy = DiagonalPolicy::kInclude,
                                std::uint64_t max_states = 1000000);

}  // namespace casd::synth
