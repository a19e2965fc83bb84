#include <cmath>
#include <cstddef>

#include "casd/kernels.hpp"
#include "kernels_internal.hpp"

// Reference implementations. Plain loops, fixed left-to-right accumulation.

namespace casd::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

void apply_column_delta_scalar(double* sy, double* syy, double* sxy,
                               const double* new_col, const double* old_col,
                               const double* x_col, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const double d = new_col[j] - old_col[j];
    sy[j] += d;
    syy[j] += new_col[j] * new_col[j] - old_col[j] * old_col[j];
    sxy[j] += x_col[j] * d;
  }
}

double pearson_sum_scalar(const double* sx, const double* sxx, const double* sy,
                          const double* syy, const double* sxy, double n_terms,
                          std::size_t n_rows, std::size_t skip_row) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n_rows; ++j) {
    if (j == skip_row) continue;
    acc += pearson_from_moments(sx[j], sxx[j], sy[j], syy[j], sxy[j], n_terms);
  }
  return acc;
}

double probe_pearson_sum_scalar(const double* sx, const double* sxx,
                                const double* sy, const double* syy,
                                const double* sxy, const double* new_col,
                                const double* old_col, const double* x_col,
                                double n_terms, std::size_t n_rows,
                                std::size_t skip_row) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n_rows; ++j) {
    if (j == skip_row) continue;
    const double d = new_col[j] - old_col[j];
    const double ny = sy[j] + d;
    const double nyy = syy[j] + (new_col[j] * new_col[j] - old_col[j] * old_col[j]);
    const double nxy = sxy[j] + x_col[j] * d;
    acc += pearson_from_moments(sx[j], sxx[j], ny, nyy, nxy, n_terms);
  }
  return acc;
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend backend{
      "scalar",          dot_scalar,         sum_scalar,
      sum_sq_scalar,     apply_column_delta_scalar,
      pearson_sum_scalar, probe_pearson_sum_scalar,
  };
  return backend;
}

}  // namespace casd::kernels::detail
