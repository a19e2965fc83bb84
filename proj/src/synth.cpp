#include "casd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "casd/error.hpp"
#include "casd/kernels.hpp"

namespace casd::synth {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> unit_vector(std::mt19937_64& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (;;) {
    for (double& x : v) x = gaussian(rng);
    const double norm = std::sqrt(kernels::sum_sq(v));
    if (norm > 1e-12) {
      for (double& x : v) x /= norm;
      return v;
    }
  }
}

// Noise model: direction nudged by a perturbation of exact norm sigma, then
// renormalized, so sigma is the intra-character spread on the sphere.
std::vector<double> perturbed(std::mt19937_64& rng, const std::vector<double>& mu,
                              double sigma) {
  if (sigma == 0.0) return mu;
  std::vector<double> v = unit_vector(rng, static_cast<int>(mu.size()));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mu[i] + sigma * v[i];
  const double norm = std::sqrt(kernels::sum_sq(v));
  for (double& x : v) x /= norm;
  return v;
}

double direction_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return 1.0 - kernels::dot(a, b);
}

std::vector<std::vector<double>> separated_directions(std::mt19937_64& rng, int count,
                                                      int dim, double min_separation) {
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  int attempts = 0;
  while (static_cast<int>(dirs.size()) < count) {
    if (++attempts > 100000)
      throw InvalidParameter("cannot place " + std::to_string(count) +
                             " directions with the requested separation in dimension " +
                             std::to_string(dim));
    std::vector<double> candidate = unit_vector(rng, dim);
    bool ok = true;
    for (const auto& d : dirs) {
      if (direction_distance(candidate, d) < min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) dirs.push_back(std::move(candidate));
  }
  return dirs;
}

std::string format_id(const char* prefix, std::size_t a) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s%05zu", prefix, a);
  return buffer;
}

std::string track_id_for(std::size_t segment, std::size_t slot) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "t%05zu_%zu", segment, slot);
  return buffer;
}

void check_common(int characters, int segments, int k) {
  if (characters < 2) throw InvalidParameter("need at least 2 characters");
  if (segments < 3) throw InvalidParameter("need at least 3 segments");
  if (k < 1) throw InvalidParameter("need at least 1 candidate per segment");
}

// Appends one segment with its candidate tracks. slot_characters[i] names
// the character whose visual direction backs slot i; true_slot < 0 marks an
// off-screen segment.
void emit_segment(SyntheticScenario& scenario, std::mt19937_64& rng, std::size_t index,
                  const std::string& speaker, const std::vector<double>& audio_dir,
                  double audio_noise,
                  const std::vector<std::string>& slot_characters,
                  const std::vector<const std::vector<double>*>& slot_dirs,
                  double visual_noise, int true_slot) {
  const double start = static_cast<double>(index);
  SpeechSegment segment;
  segment.id = format_id("s", index);
  segment.interval = {start, start + 0.9};
  segment.embedding.values = perturbed(rng, audio_dir, audio_noise);
  scenario.segment_character.emplace(segment.id, speaker);

  std::vector<TrackId> candidate_ids;
  for (std::size_t slot = 0; slot < slot_characters.size(); ++slot) {
    FaceTrack track;
    track.id = track_id_for(index, slot);
    track.interval = segment.interval;
    track.embedding.values = perturbed(rng, *slot_dirs[slot], visual_noise);
    scenario.track_character.emplace(track.id, slot_characters[slot]);
    candidate_ids.push_back(track.id);
    scenario.tracks.push_back(std::move(track));
  }
  std::sort(candidate_ids.begin(), candidate_ids.end());
  scenario.candidates.entries.emplace(segment.id, std::move(candidate_ids));

  if (true_slot >= 0)
    scenario.ground_truth.entries.emplace(segment.id,
                                          track_id_for(index, static_cast<std::size_t>(true_slot)));
  else
    scenario.ground_truth.entries.emplace(segment.id, std::nullopt);

  scenario.segments.push_back(std::move(segment));
}

}  // namespace

SyntheticScenario generate_scenario(const ScenarioConfig& config) {
  check_common(config.num_characters, config.num_segments, config.candidates_per_segment);
  if (config.audio_dim < 1 || config.visual_dim < 1)
    throw InvalidParameter("embedding dimensions must be >= 1");
  if (config.audio_noise < 0.0 || config.visual_noise < 0.0)
    throw InvalidParameter("noise must be >= 0");
  if (config.offscreen_fraction < 0.0 || config.offscreen_fraction >= 1.0)
    throw InvalidParameter("offscreen_fraction must be in [0, 1)");
  if (config.background_face_fraction < 0.0 || config.background_face_fraction >= 1.0)
    throw InvalidParameter("background_face_fraction must be in [0, 1)");
  const int C = config.num_characters;
  const int k = config.candidates_per_segment;

  std::mt19937_64 rng(config.seed);
  SyntheticScenario scenario;

  const auto audio_dirs =
      separated_directions(rng, C, config.audio_dim, config.min_separation);
  const int background =
      config.background_face_fraction > 0.0
          ? std::max(1, static_cast<int>(std::lround(C * config.background_face_fraction)))
          : 0;
  const auto visual_dirs =
      separated_directions(rng, C + background, config.visual_dim, config.min_separation);

  std::vector<std::string> names;
  for (int c = 0; c < C; ++c) names.push_back(format_id("c", static_cast<std::size_t>(c)));
  for (int b = 0; b < background; ++b)
    names.push_back(format_id("bg", static_cast<std::size_t>(b)));

  for (int n = 0; n < config.num_segments; ++n) {
    const int speaker = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(C)));
    const bool offscreen = uniform01(rng) < config.offscreen_fraction;

    // Pick a character for each candidate slot; the true character fills
    // exactly one slot unless the speaker is off-screen.
    std::vector<int> slot_chars;
    const int distractors = offscreen ? k : k - 1;
    for (int d = 0; d < distractors; ++d) {
      if (background > 0 && uniform01(rng) < config.background_face_fraction) {
        slot_chars.push_back(C + static_cast<int>(uniform_index(
                                     rng, static_cast<std::size_t>(background))));
      } else {
        int other = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(C - 1)));
        if (other >= speaker) ++other;
        slot_chars.push_back(other);
      }
    }
    if (!offscreen) slot_chars.push_back(speaker);
    // Fisher-Yates so the true slot position carries no information.
    for (std::size_t i = slot_chars.size(); i > 1; --i)
      std::swap(slot_chars[i - 1], slot_chars[uniform_index(rng, i)]);

    int true_slot = -1;
    std::vector<std::string> slot_names;
    std::vector<const std::vector<double>*> slot_dirs;
    for (std::size_t slot = 0; slot < slot_chars.size(); ++slot) {
      if (!offscreen && slot_chars[slot] == speaker) true_slot = static_cast<int>(slot);
      slot_names.push_back(names[static_cast<std::size_t>(slot_chars[slot])]);
      slot_dirs.push_back(&visual_dirs[static_cast<std::size_t>(slot_chars[slot])]);
    }

    emit_segment(scenario, rng, static_cast<std::size_t>(n),
                 names[static_cast<std::size_t>(speaker)],
                 audio_dirs[static_cast<std::size_t>(speaker)], config.audio_noise,
                 slot_names, slot_dirs, config.visual_noise, true_slot);
  }
  return scenario;
}

SyntheticScenario generate_columbia_scenario(const ColumbiaConfig& config) {
  check_common(config.num_characters, config.num_segments, 2);
  if (config.num_characters < 4)
    throw InvalidParameter("the degenerate preset needs at least 4 characters");
  if (config.embedding_dim < 2) throw InvalidParameter("embedding_dim must be >= 2");

  std::mt19937_64 rng(config.seed);
  SyntheticScenario scenario;
  const int C = config.num_characters;

  const auto audio_dirs = separated_directions(rng, C, config.embedding_dim, 0.5);

  // Visual geometry mirroring the audio geometry: coordinates permuted and
  // sign-flipped (an orthogonal map, so all pairwise distances carry over),
  // then the pair's directions are crossed. Co-occurrence denies the
  // optimizer any anchor that would expose the swap.
  std::vector<std::size_t> perm(static_cast<std::size_t>(config.embedding_dim));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
  std::vector<double> signs(perm.size());
  for (double& s : signs) s = (rng() & 1) ? 1.0 : -1.0;

  std::vector<std::vector<double>> visual_dirs(static_cast<std::size_t>(C));
  for (int c = 0; c < C; ++c) {
    std::vector<double> v(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
      v[i] = signs[i] * audio_dirs[static_cast<std::size_t>(c)][perm[i]];
    visual_dirs[static_cast<std::size_t>(c)] = std::move(v);
  }
  std::swap(visual_dirs[0], visual_dirs[1]);

  std::vector<std::string> names;
  for (int c = 0; c < C; ++c) names.push_back(format_id("c", static_cast<std::size_t>(c)));

  for (int n = 0; n < config.num_segments; ++n) {
    const int speaker = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(C)));
    std::vector<int> slot_chars;
    if (speaker <= 1) {
      slot_chars = {0, 1};
    } else {
      int other = 2 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(C - 3)));
      if (other >= speaker) ++other;
      slot_chars = {speaker, other};
    }
    for (std::size_t i = slot_chars.size(); i > 1; --i)
      std::swap(slot_chars[i - 1], slot_chars[uniform_index(rng, i)]);

    int true_slot = -1;
    std::vector<std::string> slot_names;
    std::vector<const std::vector<double>*> slot_dirs;
    for (std::size_t slot = 0; slot < slot_chars.size(); ++slot) {
      if (slot_chars[slot] == speaker) true_slot = static_cast<int>(slot);
      slot_names.push_back(names[static_cast<std::size_t>(slot_chars[slot])]);
      slot_dirs.push_back(&visual_dirs[static_cast<std::size_t>(slot_chars[slot])]);
    }

    emit_segment(scenario, rng, static_cast<std::size_t>(n),
                 names[static_cast<std::size_t>(speaker)],
                 audio_dirs[static_cast<std::size_t>(speaker)], config.audio_noise,
                 slot_names, slot_dirs, config.visual_noise, true_slot);
  }
  return scenario;
}

OracleResult brute_force_oracle(const PartitionProblem& problem, DiagonalPolicy policy,
                                std::uint64_t max_states) {
  const std::size_t n = problem.segment_ids.size();
  if (n == 0) throw InvalidParameter("empty problem");
  double states = 1.0;
  for (const auto& list : problem.candidates) {
    if (list.empty()) throw ValidationError("empty candidate list");
    states *= static_cast<double>(list.size());
    if (states > static_cast<double>(max_states))
      throw TooLarge("assignment space exceeds " + std::to_string(max_states) + " states");
  }

  std::vector<std::size_t> odometer(n, 0);
  std::vector<std::int32_t> assignment(n);
  SquareMatrix fd(n);
  OracleResult best;
  bool first = true;

  for (;;) {
    for (std::size_t i = 0; i < n; ++i) assignment[i] = problem.candidates[i][odometer[i]];
    for (std::size_t i = 0; i < n; ++i) {
      fd.at(i, i) = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = problem.track_distance.at(assignment[i], assignment[j]);
        fd.at(i, j) = d;
        fd.at(j, i) = d;
      }
    }
    const double objective = corr_objective(problem.sd, fd, policy);
    // Strict improvement keeps the earliest (lexicographically smallest)
    // maximizer.
    if (first || objective > best.objective) {
      best.objective = objective;
      best.assignment = assignment;
      first = false;
    }

    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++odometer[pos] < problem.candidates[pos].size()) break;
      odometer[pos] = 0;
      if (pos == 0) return best;
    }
  }
}

}  // namespace casd::synth
