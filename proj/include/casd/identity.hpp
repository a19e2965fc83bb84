#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casd/types.hpp"

// Embedding geometry and the cross-modal objective: cosine distances, the
// speech/face identity distance matrices, row-wise Pearson correlation and
// its mean, Corr(FD).

namespace casd {

// Dense row-major square matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_, n_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * n_, n_}; }
  const std::vector<double>& data() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Identity distance matrix with the segment order that fixes row/column
// meaning. Symmetric, zero diagonal, entries in [0, 2].
struct DistanceMatrix {
  SquareMatrix values;
  std::vector<std::string> order;
};

// Whether the (always zero) diagonal entry participates in each row
// correlation. Include is the literal reading of the objective.
enum class DiagonalPolicy { kInclude, kExclude };

enum class Metric { kCosineDistance, kCosineSimilarity };

// 1 - u.v/(|u||v|), clamped into [0, 2].
double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v);
double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v);

// Pairwise matrix over the given embeddings; order names the rows.
DistanceMatrix build_distance_matrix(std::span<const EmbeddingVector> embeddings,
                                     std::vector<std::string> order,
                                     Metric metric = Metric::kCosineDistance);

// Sample Pearson correlation, optionally excluding one index from both
// vectors. Returns 0 when either side has (numerically) zero variance.
double row_pearson(std::span<const double> x, std::span<const double> y,
                   std::optional<std::size_t> exclude_index = std::nullopt);

// Mean of row-wise correlations between matching rows.
double corr_objective(const SquareMatrix& sd, const SquareMatrix& fd,
                      DiagonalPolicy policy = DiagonalPolicy::kInclude);
double corr_objective(const DistanceMatrix& sd, const DistanceMatrix& fd,
                      DiagonalPolicy policy = DiagonalPolicy::kInclude);

// CSV dump of a matrix with its order as header row (debugging aid).
void write_matrix_csv(const std::string& path, const DistanceMatrix& m);

}  // namespace casd
