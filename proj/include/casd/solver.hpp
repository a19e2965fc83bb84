#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "casd/identity.hpp"
#include "casd/types.hpp"

// Stage 1: coordinate-ascent assignment of one face track (per speech
// segment) maximizing the mean row-wise correlation between the speech- and
// face-identity distance matrices. Segments are processed in contiguous
// temporal partitions of at most `partition_size`, each optimized
// independently.

namespace casd {

using PinSet = std::map<SegmentId, TrackId>;

struct SolverConfig {
  std::size_t partition_size = 500;  // L, >= 3
  int max_epochs = 50;
  double convergence_eps = 1e-9;
  double tie_eps = 1e-12;
  std::uint64_t seed = 0;
  DiagonalPolicy diagonal_policy = DiagonalPolicy::kInclude;
  int restarts = 1;
  std::size_t workers = 1;
};

struct PartitionPlan {
  std::vector<std::vector<SegmentId>> partitions;
};

// Contiguous temporal partitions: all of size L except possibly the last;
// a last partition smaller than 3 is merged into its predecessor.
PartitionPlan partition_segments(const std::vector<SegmentId>& ordered_ids,
                                 std::size_t partition_size);

// One partition reduced to dense indices. Track indices are assigned in
// ascending track-id order, so index comparisons reproduce id tie-breaking.
struct PartitionProblem {
  std::vector<SegmentId> segment_ids;               // temporal order
  SquareMatrix sd;                                  // segment-segment distances
  std::vector<std::vector<std::int32_t>> candidates;  // per segment, ascending
  std::vector<std::int32_t> pinned;                 // track index or -1
  std::vector<TrackId> track_ids;                   // ascending
  SquareMatrix track_distance;                      // track-track distances
};

PartitionProblem build_partition_problem(const std::vector<SpeechSegment>& segments,
                                         const std::vector<FaceTrack>& tracks,
                                         const CandidateMap& candidates,
                                         const PinSet& pins,
                                         std::span<const SegmentId> partition_ids);

// Maintains FD and the per-row correlation moments so that replacing one
// segment's assigned face (one row+column of FD) costs O(N). The committed
// objective always equals a full recomputation to well under 1e-9.
class ObjectiveCache {
 public:
  ObjectiveCache(const SquareMatrix& sd, SquareMatrix fd, DiagonalPolicy policy);

  std::size_t size() const { return n_; }
  double objective() const { return objective_; }
  double row_correlation(std::size_t row) const;

  // Objective if row/column i of FD were replaced by `column` (column[i]
  // must be 0). Does not mutate.
  double probe_column(std::size_t i, std::span<const double> column) const;

  // Commits the replacement.
  void set_column(std::size_t i, std::span<const double> column);

  const SquareMatrix& fd() const { return fd_; }

  // Debug self-check: recompute all moments and the objective from scratch
  // and throw CacheInconsistency beyond `tol`.
  void verify(double tol = 1e-9) const;

 private:
  const SquareMatrix* sd_;
  SquareMatrix fd_;
  DiagonalPolicy policy_;
  std::size_t n_ = 0;
  double n_terms_ = 0.0;
  std::vector<double> sx_, sxx_;       // fixed moments of SD rows
  std::vector<double> sy_, syy_, sxy_;  // moments tracking FD
  double objective_ = 0.0;

  double row_term(std::size_t i, std::span<const double> column) const;
};

// Uniform random candidate per unpinned segment; pins are honored verbatim.
// Deterministic for a fixed seed.
std::vector<std::int32_t> random_init(const PartitionProblem& problem, std::uint64_t seed);

// CandidateMap-level variant used for random-baseline comparisons.
std::map<SegmentId, TrackId> random_assignment(const CandidateMap& candidates,
                                               const PinSet& pins, std::uint64_t seed);

struct OptimizeResult {
  std::vector<std::int32_t> assignment;
  double objective = 0.0;
  std::vector<double> epoch_history;  // objective at init, then after each epoch
  bool converged = false;
  std::vector<double> row_correlation;
};

// Coordinate ascent over segments in temporal order. A candidate replaces
// the incumbent only when it improves the objective by more than tie_eps;
// among tied non-incumbents the smallest track id wins.
OptimizeResult optimize_partition(const PartitionProblem& problem,
                                  std::vector<std::int32_t> init,
                                  const SolverConfig& config);

struct PartitionRun {
  std::vector<SegmentId> segment_ids;
  double objective = 0.0;
  std::vector<double> epoch_history;
  bool converged = false;
  int best_restart = 0;
  std::vector<double> restart_objectives;
};

struct Stage1Result {
  std::vector<AssignmentRecord> records;  // temporal order; score = row correlation
  std::vector<PartitionRun> partitions;
};

// Full stage 1: partition, run `restarts` seeded random initializations per
// partition (best objective wins, first on ties) with partition-level
// parallelism over `workers`. Results are identical for any worker count.
Stage1Result solve_stage1(const std::vector<SpeechSegment>& segments,
                          const std::vector<FaceTrack>& tracks,
                          const CandidateMap& candidates, const PinSet& pins,
                          const SolverConfig& config);

}  // namespace casd
