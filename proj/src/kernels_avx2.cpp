#include "casd/kernels.hpp"
#include "kernels_internal.hpp"

// AVX2 variants. Per-row arithmetic mirrors the scalar reference operation
// for operation (mul/sub/add, correctly-rounded sqrt and div), so individual
// row values match the scalar backend bitwise; only reduction order differs.
// FMA is used solely inside dot/sum_sq accumulators.

#ifdef CASD_BUILD_AVX2

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace casd::kernels::detail {
namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail = std::fma(a[i], b[i], tail);
  return hsum(acc) + tail;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += a[i];
  return hsum(acc) + tail;
}

double sum_sq_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail = std::fma(a[i], a[i], tail);
  return hsum(acc) + tail;
}

void apply_column_delta_avx2(double* sy, double* syy, double* sxy,
                             const double* new_col, const double* old_col,
                             const double* x_col, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d nc = _mm256_loadu_pd(new_col + j);
    const __m256d oc = _mm256_loadu_pd(old_col + j);
    const __m256d xc = _mm256_loadu_pd(x_col + j);
    const __m256d d = _mm256_sub_pd(nc, oc);
    _mm256_storeu_pd(sy + j, _mm256_add_pd(_mm256_loadu_pd(sy + j), d));
    const __m256d dsq = _mm256_sub_pd(_mm256_mul_pd(nc, nc), _mm256_mul_pd(oc, oc));
    _mm256_storeu_pd(syy + j, _mm256_add_pd(_mm256_loadu_pd(syy + j), dsq));
    _mm256_storeu_pd(sxy + j,
                     _mm256_add_pd(_mm256_loadu_pd(sxy + j), _mm256_mul_pd(xc, d)));
  }
  for (; j < n; ++j) {
    const double d = new_col[j] - old_col[j];
    sy[j] += d;
    syy[j] += new_col[j] * new_col[j] - old_col[j] * old_col[j];
    sxy[j] += x_col[j] * d;
  }
}

// Lane-wise pearson_from_moments; lanes with degenerate variance (or the
// skipped row) come out as exact zeros.
__m256d pearson_lanes(__m256d sx, __m256d sxx, __m256d sy, __m256d syy,
                      __m256d sxy, __m256d n, __m256d guard) {
  const __m256d sx2 = _mm256_mul_pd(sx, sx);
  const __m256d sy2 = _mm256_mul_pd(sy, sy);
  const __m256d nsxx = _mm256_mul_pd(n, sxx);
  const __m256d nsyy = _mm256_mul_pd(n, syy);
  const __m256d var_x = _mm256_sub_pd(nsxx, sx2);
  const __m256d var_y = _mm256_sub_pd(nsyy, sy2);
  const __m256d guard_x = _mm256_mul_pd(guard, _mm256_add_pd(nsxx, sx2));
  const __m256d guard_y = _mm256_mul_pd(guard, _mm256_add_pd(nsyy, sy2));
  const __m256d keep =
      _mm256_and_pd(_mm256_cmp_pd(var_x, guard_x, _CMP_GT_OQ),
                    _mm256_cmp_pd(var_y, guard_y, _CMP_GT_OQ));
  const __m256d num =
      _mm256_sub_pd(_mm256_mul_pd(n, sxy), _mm256_mul_pd(sx, sy));
  const __m256d den = _mm256_sqrt_pd(_mm256_mul_pd(var_x, var_y));
  const __m256d r =
      _mm256_min_pd(_mm256_max_pd(_mm256_div_pd(num, den), _mm256_set1_pd(-1.0)),
                    _mm256_set1_pd(1.0));
  return _mm256_and_pd(keep, r);
}

__m256d skip_mask(std::size_t j, std::size_t skip_row) {
  const __m256d idx = _mm256_set_pd(static_cast<double>(j + 3), static_cast<double>(j + 2),
                                    static_cast<double>(j + 1), static_cast<double>(j));
  const __m256d skip = _mm256_set1_pd(static_cast<double>(skip_row));
  return _mm256_cmp_pd(idx, skip, _CMP_NEQ_OQ);
}

double pearson_sum_avx2(const double* sx, const double* sxx, const double* sy,
                        const double* syy, const double* sxy, double n_terms,
                        std::size_t n_rows, std::size_t skip_row) {
  const __m256d n = _mm256_set1_pd(n_terms);
  const __m256d guard = _mm256_set1_pd(kVarianceGuard);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n_rows; j += 4) {
    __m256d r = pearson_lanes(_mm256_loadu_pd(sx + j), _mm256_loadu_pd(sxx + j),
                              _mm256_loadu_pd(sy + j), _mm256_loadu_pd(syy + j),
                              _mm256_loadu_pd(sxy + j), n, guard);
    if (skip_row >= j && skip_row < j + 4) r = _mm256_and_pd(r, skip_mask(j, skip_row));
    acc = _mm256_add_pd(acc, r);
  }
  double tail = 0.0;
  for (; j < n_rows; ++j) {
    if (j == skip_row) continue;
    tail += pearson_from_moments(sx[j], sxx[j], sy[j], syy[j], sxy[j], n_terms);
  }
  return hsum(acc) + tail;
}

double probe_pearson_sum_avx2(const double* sx, const double* sxx,
                              const double* sy, const double* syy,
                              const double* sxy, const double* new_col,
                              const double* old_col, const double* x_col,
                              double n_terms, std::size_t n_rows,
                              std::size_t skip_row) {
  const __m256d n = _mm256_set1_pd(n_terms);
  const __m256d guard = _mm256_set1_pd(kVarianceGuard);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n_rows; j += 4) {
    const __m256d nc = _mm256_loadu_pd(new_col + j);
    const __m256d oc = _mm256_loadu_pd(old_col + j);
    const __m256d d = _mm256_sub_pd(nc, oc);
    const __m256d ny = _mm256_add_pd(_mm256_loadu_pd(sy + j), d);
    const __m256d nyy = _mm256_add_pd(
        _mm256_loadu_pd(syy + j),
        _mm256_sub_pd(_mm256_mul_pd(nc, nc), _mm256_mul_pd(oc, oc)));
    const __m256d nxy = _mm256_add_pd(
        _mm256_loadu_pd(sxy + j), _mm256_mul_pd(_mm256_loadu_pd(x_col + j), d));
    __m256d r = pearson_lanes(_mm256_loadu_pd(sx + j), _mm256_loadu_pd(sxx + j),
                              ny, nyy, nxy, n, guard);
    if (skip_row >= j && skip_row < j + 4) r = _mm256_and_pd(r, skip_mask(j, skip_row));
    acc = _mm256_add_pd(acc, r);
  }
  double tail = 0.0;
  for (; j < n_rows; ++j) {
    if (j == skip_row) continue;
    const double d = new_col[j] - old_col[j];
    const double ny = sy[j] + d;
    const double nyy = syy[j] + (new_col[j] * new_col[j] - old_col[j] * old_col[j]);
    const double nxy = sxy[j] + x_col[j] * d;
    tail += pearson_from_moments(sx[j], sxx[j], ny, nyy, nxy, n_terms);
  }
  return hsum(acc) + tail;
}

}  // namespace

const Backend* avx2_backend() {
  static const Backend backend{
      "avx2",           dot_avx2,         sum_avx2,
      sum_sq_avx2,      apply_column_delta_avx2,
      pearson_sum_avx2, probe_pearson_sum_avx2,
  };
  return &backend;
}

}  // namespace casd::kernels::detail

#else

namespace casd::kernels::detail {
const Backend* avx2_backend() { return nullptr; }
}  // namespace casd::kernels::detail

#endif  // CASD_BUILD_AVX2
