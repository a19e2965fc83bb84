#pragma once

#include <vector>

#include "casd/identity.hpp"
#include "casd/types.hpp"

// Stage 2: segments whose assigned face shows too little row-wise
// correlation with the speech-identity structure are declared off-screen
// and lose their face assignment.

namespace casd::offscreen {

struct SegmentScore {
  SegmentId segment_id;
  double row_correlation = 0.0;
};

// Row-wise correlations between matching rows, order preserved.
std::vector<SegmentScore> score_segments(const DistanceMatrix& sd, const DistanceMatrix& fd,
                                         DiagonalPolicy policy = DiagonalPolicy::kInclude);

struct ClassifyResult {
  std::vector<AssignmentRecord> records;
  std::size_t removed = 0;
};

// Marks every record with score < tau as off-screen. Purely subtractive:
// no other choice changes; flagged records keep track and score for
// ranking-based evaluation downstream.
ClassifyResult classify_offscreen(std::vector<AssignmentRecord> records, double tau);

struct RocPoint {
  double tau = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

// Sweep of the threshold rule "row correlation < tau => off-screen" against
// ground truth (positive class = truly off-screen). One point per distinct
// score plus the [-1, 1] endpoints.
std::vector<RocPoint> roc_table(const std::vector<AssignmentRecord>& records,
                                const GroundTruth& gt);

}  // namespace casd::offscreen
