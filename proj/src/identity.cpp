#include "casd/identity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "casd/error.hpp"
#include "casd/kernels.hpp"

namespace casd {
namespace {

// Relative guard separating true zero variance from the rounding noise a
// centered pass leaves on a constant vector.
constexpr double kTwoPassGuard = 1e-24;

double norm_of(const EmbeddingVector& v) {
  return std::sqrt(kernels::sum_sq(v.values));
}

}  // namespace

double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim())
    throw DimensionMismatch("embedding dimensions differ: " + std::to_string(u.dim()) +
                            " vs " + std::to_string(v.dim()));
  const double nu = norm_of(u);
  const double nv = norm_of(v);
  if (nu == 0.0 || nv == 0.0) throw ZeroNorm("cosine distance undefined for zero-norm embedding");
  const double sim = kernels::dot(u.values, v.values) / (nu * nv);
  return std::clamp(sim, -1.0, 1.0);
}

double cosine_distance(const EmbeddingVector& u, const EmbeddingVector& v) {
  return std::clamp(1.0 - cosine_similarity(u, v), 0.0, 2.0);
}

DistanceMatrix build_distance_matrix(std::span<const EmbeddingVector> embeddings,
                                     std::vector<std::string> order, Metric metric) {
  const std::size_t n = embeddings.size();
  if (n < 2) throw TooFewElements("need at least 2 embeddings, got " + std::to_string(n));
  if (order.size() != n)
    throw OrderMismatch("order size does not match embedding count");
  const std::size_t dim = embeddings[0].dim();
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (embeddings[i].dim() != dim)
      throw DimensionMismatch("inconsistent embedding dimension at \"" + order[i] + "\"");
    norms[i] = norm_of(embeddings[i]);
    if (norms[i] == 0.0) throw ZeroNorm("zero-norm embedding at \"" + order[i] + "\"");
  }

  DistanceMatrix m;
  m.values = SquareMatrix(n);
  m.order = std::move(order);
  const double self = (metric == Metric::kCosineDistance) ? 0.0 : 1.0;
  for (std::size_t i = 0; i < n; ++i) m.values.at(i, i) = self;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sim = std::clamp(
          kernels::dot(embeddings[i].values, embeddings[j].values) / (norms[i] * norms[j]),
          -1.0, 1.0);
      const double value =
          (metric == Metric::kCosineDistance) ? std::clamp(1.0 - sim, 0.0, 2.0) : sim;
      m.values.at(i, j) = value;
      m.values.at(j, i) = value;
    }
  }
  return m;
}

double row_pearson(std::span<const double> x, std::span<const double> y,
                   std::optional<std::size_t> exclude_index) {
  if (x.size() != y.size())
    throw LengthMismatch("row_pearson: lengths differ (" + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()) + ")");
  const std::size_t len = x.size();
  const std::size_t min_len = exclude_index ? 3 : 2;
  if (len < min_len) throw InvalidParameter("row_pearson: too few elements");
  if (exclude_index && *exclude_index >= len)
    throw InvalidParameter("row_pearson: exclude index out of range");

  const double n = static_cast<double>(exclude_index ? len - 1 : len);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (exclude_index && i == *exclude_index) continue;
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double dxx = 0.0, dyy = 0.0, dxy = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (exclude_index && i == *exclude_index) continue;
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    dxx += dx * dx;
    dyy += dy * dy;
    dxy += dx * dy;
  }
  if (dxx <= kTwoPassGuard * n * mx * mx || dxx <= 0.0) return 0.0;
  if (dyy <= kTwoPassGuard * n * my * my || dyy <= 0.0) return 0.0;
  return std::clamp(dxy / std::sqrt(dxx * dyy), -1.0, 1.0);
}

double corr_objective(const SquareMatrix& sd, const SquareMatrix& fd,
                      DiagonalPolicy policy) {
  if (sd.size() != fd.size()) throw OrderMismatch("matrix sizes differ");
  const std::size_t n = sd.size();
  if (n < (policy == DiagonalPolicy::kExclude ? 3u : 2u))
    throw TooFewElements("objective needs at least 2 segments (3 when excluding the diagonal)");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> exclude;
    if (policy == DiagonalPolicy::kExclude) exclude = i;
    acc += row_pearson(sd.row(i), fd.row(i), exclude);
  }
  return acc / static_cast<double>(n);
}

double corr_objective(const DistanceMatrix& sd, const DistanceMatrix& fd,
                      DiagonalPolicy policy) {
  if (sd.order != fd.order)
    throw OrderMismatch("distance matrices have different segment orders");
  return corr_objective(sd.values, fd.values, policy);
}

void write_matrix_csv(const std::string& path, const DistanceMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  for (std::size_t i = 0; i < m.order.size(); ++i)
    out << (i ? "," : "") << m.order[i];
  out << '\n';
  out.precision(17);
  const std::size_t n = m.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << m.values.at(i, j);
    out << '\n';
  }
}

}  // namespace casd
