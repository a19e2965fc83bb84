#include "casd/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include "casd/error.hpp"
#include "casd/kernels.hpp"

namespace casd {
namespace {

void check_config(const SolverConfig& config) {
  if (config.partition_size < 3)
    throw InvalidParameter("partition_size must be >= 3");
  if (config.max_epochs < 1) throw InvalidParameter("max_epochs must be >= 1");
  if (config.restarts < 1) throw InvalidParameter("restarts must be >= 1");
  if (config.convergence_eps < 0.0 || config.tie_eps < 0.0)
    throw InvalidParameter("tolerances must be >= 0");
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Engine output reduced modulo n; the modulo bias at 64 bits is irrelevant
// and the draw sequence stays platform-independent.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

}  // namespace

PartitionPlan partition_segments(const std::vector<SegmentId>& ordered_ids,
                                 std::size_t partition_size) {
  if (partition_size < 3) throw InvalidParameter("partition_size must be >= 3");
  const std::size_t n = ordered_ids.size();
  if (n < 3) throw InvalidParameter("need at least 3 segments to partition");
  PartitionPlan plan;
  for (std::size_t begin = 0; begin < n; begin += partition_size) {
    const std::size_t end = std::min(n, begin + partition_size);
    plan.partitions.emplace_back(ordered_ids.begin() + begin, ordered_ids.begin() + end);
  }
  if (plan.partitions.size() > 1 && plan.partitions.back().size() < 3) {
    auto tail = std::move(plan.partitions.back());
    plan.partitions.pop_back();
    auto& prev = plan.partitions.back();
    prev.insert(prev.end(), tail.begin(), tail.end());
  }
  return plan;
}

PartitionProblem build_partition_problem(const std::vector<SpeechSegment>& segments,
                                         const std::vector<FaceTrack>& tracks,
                                         const CandidateMap& candidates,
                                         const PinSet& pins,
                                         std::span<const SegmentId> partition_ids) {
  std::unordered_map<std::string, const SpeechSegment*> segment_by_id;
  for (const auto& s : segments) segment_by_id.emplace(s.id, &s);
  std::unordered_map<std::string, const FaceTrack*> track_by_id;
  for (const auto& t : tracks) track_by_id.emplace(t.id, &t);

  PartitionProblem problem;
  problem.segment_ids.assign(partition_ids.begin(), partition_ids.end());

  std::set<TrackId> used_tracks;
  for (const auto& seg_id : problem.segment_ids) {
    auto it = candidates.entries.find(seg_id);
    if (it == candidates.entries.end() || it->second.empty())
      throw ValidationError("segment \"" + seg_id + "\" has no candidate tracks");
    for (const auto& track_id : it->second) {
      if (!track_by_id.count(track_id))
        throw ValidationError("candidate track \"" + track_id + "\" not found");
      used_tracks.insert(track_id);
    }
  }
  problem.track_ids.assign(used_tracks.begin(), used_tracks.end());
  std::unordered_map<std::string, std::int32_t> track_index;
  for (std::size_t i = 0; i < problem.track_ids.size(); ++i)
    track_index.emplace(problem.track_ids[i], static_cast<std::int32_t>(i));

  std::vector<EmbeddingVector> segment_embeddings;
  segment_embeddings.reserve(problem.segment_ids.size());
  for (const auto& seg_id : problem.segment_ids) {
    auto it = segment_by_id.find(seg_id);
    if (it == segment_by_id.end())
      throw ValidationError("unknown segment id \"" + seg_id + "\"");
    segment_embeddings.push_back(it->second->embedding);
  }
  problem.sd = build_distance_matrix(segment_embeddings,
                                     {problem.segment_ids.begin(), problem.segment_ids.end()})
                   .values;

  const std::size_t n_tracks = problem.track_ids.size();
  if (n_tracks == 1) {
    problem.track_distance = SquareMatrix(1);
  } else {
    std::vector<EmbeddingVector> track_embeddings;
    track_embeddings.reserve(n_tracks);
    for (const auto& track_id : problem.track_ids)
      track_embeddings.push_back(track_by_id.at(track_id)->embedding);
    problem.track_distance =
        build_distance_matrix(track_embeddings,
                              {problem.track_ids.begin(), problem.track_ids.end()})
            .values;
  }

  problem.candidates.reserve(problem.segment_ids.size());
  problem.pinned.assign(problem.segment_ids.size(), -1);
  for (std::size_t i = 0; i < problem.segment_ids.size(); ++i) {
    const auto& list = candidates.entries.at(problem.segment_ids[i]);
    std::vector<std::int32_t> indices;
    indices.reserve(list.size());
    for (const auto& track_id : list) indices.push_back(track_index.at(track_id));
    std::sort(indices.begin(), indices.end());
    problem.candidates.push_back(std::move(indices));

    auto pin = pins.find(problem.segment_ids[i]);
    if (pin != pins.end()) {
      auto idx = track_index.find(pin->second);
      if (idx == track_index.end() ||
          !std::binary_search(problem.candidates[i].begin(), problem.candidates[i].end(),
                              idx->second))
        throw PinConflict("pinned track \"" + pin->second +
                          "\" is not a candidate of segment \"" + problem.segment_ids[i] +
                          "\"");
      problem.pinned[i] = idx->second;
    }
  }
  return problem;
}

ObjectiveCache::ObjectiveCache(const SquareMatrix& sd, SquareMatrix fd,
                               DiagonalPolicy policy)
    : sd_(&sd), fd_(std::move(fd)), policy_(policy), n_(sd.size()) {
  if (fd_.size() != n_) throw OrderMismatch("SD and FD sizes differ");
  if (n_ < (policy == DiagonalPolicy::kExclude ? 3u : 2u))
    throw TooFewElements("objective cache needs at least 2 rows (3 when excluding the diagonal)");
  n_terms_ = static_cast<double>(policy_ == DiagonalPolicy::kExclude ? n_ - 1 : n_);
  sx_.resize(n_);
  sxx_.resize(n_);
  sy_.resize(n_);
  syy_.resize(n_);
  sxy_.resize(n_);
  // Diagonals are zero in both matrices, so the diagonal-exclusion policy
  // only changes the term count, never the sums.
  for (std::size_t j = 0; j < n_; ++j) {
    sx_[j] = kernels::sum(sd_->row(j));
    sxx_[j] = kernels::sum_sq(sd_->row(j));
    sy_[j] = kernels::sum(fd_.row(j));
    syy_[j] = kernels::sum_sq(fd_.row(j));
    sxy_[j] = kernels::dot(sd_->row(j), fd_.row(j));
  }
  objective_ = kernels::pearson_sum(sx_, sxx_, sy_, syy_, sxy_, n_terms_) /
               static_cast<double>(n_);
}

double ObjectiveCache::row_correlation(std::size_t row) const {
  return kernels::pearson_from_moments(sx_[row], sxx_[row], sy_[row], syy_[row],
                                       sxy_[row], n_terms_);
}

double ObjectiveCache::row_term(std::size_t i, std::span<const double> column) const {
  const double ry = kernels::sum(column);
  const double ryy = kernels::sum_sq(column);
  const double rxy = kernels::dot(sd_->row(i), column);
  return kernels::pearson_from_moments(sx_[i], sxx_[i], ry, ryy, rxy, n_terms_);
}

double ObjectiveCache::probe_column(std::size_t i, std::span<const double> column) const {
  if (column.size() != n_ || i >= n_)
    throw InvalidParameter("probe_column: bad index or column size");
  if (column[i] != 0.0) throw InvalidParameter("probe_column: column[i] must be 0");
  const double others = kernels::probe_pearson_sum(
      sx_, sxx_, sy_, syy_, sxy_, column, fd_.row(i), sd_->row(i), n_terms_, i);
  return (others + row_term(i, column)) / static_cast<double>(n_);
}

void ObjectiveCache::set_column(std::size_t i, std::span<const double> column) {
  if (column.size() != n_ || i >= n_)
    throw InvalidParameter("set_column: bad index or column size");
  if (column[i] != 0.0) throw InvalidParameter("set_column: column[i] must be 0");
  kernels::apply_column_delta(sy_, syy_, sxy_, column, fd_.row(i), sd_->row(i));
  for (std::size_t m = 0; m < n_; ++m) {
    fd_.at(i, m) = column[m];
    fd_.at(m, i) = column[m];
  }
  sy_[i] = kernels::sum(column);
  syy_[i] = kernels::sum_sq(column);
  sxy_[i] = kernels::dot(sd_->row(i), column);
  objective_ = kernels::pearson_sum(sx_, sxx_, sy_, syy_, sxy_, n_terms_) /
               static_cast<double>(n_);
}

void ObjectiveCache::verify(double tol) const {
  for (std::size_t j = 0; j < n_; ++j) {
    const double sy = kernels::sum(fd_.row(j));
    const double syy = kernels::sum_sq(fd_.row(j));
    const double sxy = kernels::dot(sd_->row(j), fd_.row(j));
    if (std::abs(sy - sy_[j]) > tol || std::abs(syy - syy_[j]) > tol ||
        std::abs(sxy - sxy_[j]) > tol)
      throw CacheInconsistency("stale moments at row " + std::to_string(j));
  }
  const double reference = corr_objective(*sd_, fd_, policy_);
  if (std::abs(reference - objective_) > tol)
    throw CacheInconsistency("cached objective drifted from full recomputation");
}

std::vector<std::int32_t> random_init(const PartitionProblem& problem, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::int32_t> assignment(problem.segment_ids.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (problem.pinned[i] >= 0) {
      assignment[i] = problem.pinned[i];
      continue;
    }
    const auto& list = problem.candidates[i];
    assignment[i] = list[uniform_index(rng, list.size())];
  }
  return assignment;
}

std::map<SegmentId, TrackId> random_assignment(const CandidateMap& candidates,
                                               const PinSet& pins, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<SegmentId, TrackId> out;
  for (const auto& [seg_id, list] : candidates.entries) {
    auto pin = pins.find(seg_id);
    if (pin != pins.end()) {
      if (std::find(list.begin(), list.end(), pin->second) == list.end())
        throw PinConflict("pinned track \"" + pin->second +
                          "\" is not a candidate of segment \"" + seg_id + "\"");
      out.emplace(seg_id, pin->second);
      continue;
    }
    out.emplace(seg_id, list[uniform_index(rng, list.size())]);
  }
  return out;
}

OptimizeResult optimize_partition(const PartitionProblem& problem,
                                  std::vector<std::int32_t> init,
                                  const SolverConfig& config) {
  check_config(config);
  const std::size_t n = problem.segment_ids.size();
  if (init.size() != n) throw InvalidParameter("init size does not match partition");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(problem.candidates[i].begin(), problem.candidates[i].end(),
                            init[i]))
      throw ValidationError("init assigns a non-candidate track to segment \"" +
                            problem.segment_ids[i] + "\"");
    if (problem.pinned[i] >= 0 && init[i] != problem.pinned[i])
      throw PinConflict("init violates pin of segment \"" + problem.segment_ids[i] + "\"");
  }

  const auto& td = problem.track_distance;
  SquareMatrix fd(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) fd.at(i, j) = td.at(init[i], init[j]);
  for (std::size_t i = 0; i < n; ++i) fd.at(i, i) = 0.0;

  ObjectiveCache cache(problem.sd, std::move(fd), config.diagonal_policy);

  OptimizeResult result;
  result.epoch_history.push_back(cache.objective());

  std::vector<double> column(n);
  std::vector<double> probe_values;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double epoch_start = cache.objective();
    for (std::size_t i = 0; i < n; ++i) {
      if (problem.pinned[i] >= 0) continue;
      const auto& list = problem.candidates[i];
      if (list.size() <= 1) continue;
      const std::int32_t incumbent = init[i];

      probe_values.assign(list.size(), -std::numeric_limits<double>::infinity());
      double best_value = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < list.size(); ++c) {
        const std::int32_t t = list[c];
        if (t == incumbent) continue;
        for (std::size_t j = 0; j < n; ++j) column[j] = td.at(t, init[j]);
        column[i] = 0.0;
        probe_values[c] = cache.probe_column(i, column);
        best_value = std::max(best_value, probe_values[c]);
      }
      // Switch only on a strict improvement over the incumbent; among
      // candidates tied at the top, the smallest track id (= index) wins.
      if (best_value > cache.objective() + config.tie_eps) {
        std::size_t chosen = list.size();
        for (std::size_t c = 0; c < list.size(); ++c) {
          if (probe_values[c] >= best_value - config.tie_eps) {
            chosen = c;
            break;
          }
        }
        const std::int32_t t = list[chosen];
        for (std::size_t j = 0; j < n; ++j) column[j] = td.at(t, init[j]);
        column[i] = 0.0;
        cache.set_column(i, column);
        init[i] = t;
      }
    }
    const double epoch_end = cache.objective();
    result.epoch_history.push_back(epoch_end);
    if (epoch_end - epoch_start < config.convergence_eps) {
      result.converged = true;
      break;
    }
  }

  result.assignment = std::move(init);
  result.objective = cache.objective();
  result.row_correlation.resize(n);
  for (std::size_t j = 0; j < n; ++j) result.row_correlation[j] = cache.row_correlation(j);
  return result;
}

Stage1Result solve_stage1(const std::vector<SpeechSegment>& segments,
                          const std::vector<FaceTrack>& tracks,
                          const CandidateMap& candidates, const PinSet& pins,
                          const SolverConfig& config) {
  check_config(config);

  // Unpurged segments in temporal order.
  std::vector<const SpeechSegment*> ordered;
  ordered.reserve(segments.size());
  for (const auto& s : segments)
    if (candidates.entries.count(s.id)) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SpeechSegment* a, const SpeechSegment* b) {
                     if (a->interval.start != b->interval.start)
                       return a->interval.start < b->interval.start;
                     return a->id < b->id;
                   });
  if (ordered.size() != candidates.entries.size())
    throw ValidationError("candidate map references segments that were not provided");

  for (const auto& [seg_id, track_id] : pins) {
    if (!candidates.entries.count(seg_id))
      throw PinConflict("pin references unknown or purged segment \"" + seg_id + "\"");
    (void)track_id;  // membership checked during problem construction
  }

  std::vector<SegmentId> ordered_ids;
  ordered_ids.reserve(ordered.size());
  for (const auto* s : ordered) ordered_ids.push_back(s->id);

  const PartitionPlan plan = partition_segments(ordered_ids, config.partition_size);
  const std::size_t n_partitions = plan.partitions.size();

  struct PartitionOutcome {
    OptimizeResult best;
    PartitionRun run;
  };
  std::vector<PartitionOutcome> outcomes(n_partitions);

  auto run_partition = [&](std::size_t p) {
    const PartitionProblem problem =
        build_partition_problem(segments, tracks, candidates, pins, plan.partitions[p]);
    PartitionOutcome outcome;
    outcome.run.segment_ids = problem.segment_ids;
    for (int r = 0; r < config.restarts; ++r) {
      const std::uint64_t restart_seed = mix64(mix64(config.seed, p), static_cast<std::uint64_t>(r));
      OptimizeResult result =
          optimize_partition(problem, random_init(problem, restart_seed), config);
      outcome.run.restart_objectives.push_back(result.objective);
      if (r == 0 || result.objective > outcome.best.objective) {
        outcome.best = std::move(result);
        outcome.run.best_restart = r;
      }
    }
    outcome.run.objective = outcome.best.objective;
    outcome.run.epoch_history = outcome.best.epoch_history;
    outcome.run.converged = outcome.best.converged;
    outcomes[p] = std::move(outcome);
    return problem.track_ids;
  };

  // Track-id tables per partition, filled by the workers.
  std::vector<std::vector<TrackId>> track_tables(n_partitions);

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.workers, n_partitions));
  if (n_workers == 1) {
    for (std::size_t p = 0; p < n_partitions; ++p) track_tables[p] = run_partition(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t p = next.fetch_add(1);
        if (p >= n_partitions) return;
        try {
          track_tables[p] = run_partition(p);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  Stage1Result result;
  result.partitions.reserve(n_partitions);
  for (std::size_t p = 0; p < n_partitions; ++p) {
    const auto& outcome = outcomes[p];
    for (std::size_t i = 0; i < outcome.run.segment_ids.size(); ++i) {
      AssignmentRecord record;
      record.segment_id = outcome.run.segment_ids[i];
      record.track_id = track_tables[p][static_cast<std::size_t>(outcome.best.assignment[i])];
      record.score = outcome.best.row_correlation[i];
      result.records.push_back(std::move(record));
    }
    result.partitions.push_back(outcome.run);
  }
  return result;
}

}  // namespace casd
