#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops of the library: dot products for cosine
// distances and raw-moment Pearson reductions for the assignment objective.
// Each operation has a scalar reference implementation and an AVX2 variant;
// the active backend is selected once at runtime (see backend_name /
// set_backend). Variants are equivalence-tested against each other, not
// bitwise identical: accumulation order differs.

namespace casd::kernels {

inline constexpr std::size_t kNoSkip = static_cast<std::size_t>(-1);

// Relative guard under which a row variance is treated as zero. Raw-moment
// variances cancel to ~1e-16 of their operand scale on constant rows; the
// guard must sit well above that noise floor and well below any meaningful
// data variance.
inline constexpr double kVarianceGuard = 1e-13;

// Pearson correlation from raw moments over n terms, clamped into [-1, 1].
// Rows whose variance is zero (or indistinguishable from rounding noise)
// contribute 0.
inline double pearson_from_moments(double sx, double sxx, double sy, double syy,
                                   double sxy, double n) {
  const double var_x = n * sxx - sx * sx;
  const double var_y = n * syy - sy * sy;
  const double guard_x = kVarianceGuard * (n * sxx + sx * sx);
  const double guard_y = kVarianceGuard * (n * syy + sy * sy);
  if (var_x <= guard_x || var_y <= guard_y) return 0.0;
  const double r = (n * sxy - sx * sy) / std::sqrt(var_x * var_y);
  return r < -1.0 ? -1.0 : (r > 1.0 ? 1.0 : r);
}

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
double sum_sq(std::span<const double> a);

// In-place single-entry update of per-row moment arrays after one column of
// the Y matrix changed from old_col to new_col; x_col holds the matching
// column of the fixed X matrix.
//   sy[j]  += new_col[j] - old_col[j]
//   syy[j] += new_col[j]^2 - old_col[j]^2
//   sxy[j] += x_col[j] * (new_col[j] - old_col[j])
void apply_column_delta(std::span<double> sy, std::span<double> syy,
                        std::span<double> sxy, std::span<const double> new_col,
                        std::span<const double> old_col,
                        std::span<const double> x_col);

// Sum over rows of pearson_from_moments, optionally skipping one row.
double pearson_sum(std::span<const double> sx, std::span<const double> sxx,
                   std::span<const double> sy, std::span<const double> syy,
                   std::span<const double> sxy, double n_terms,
                   std::size_t skip_row = kNoSkip);

// As pearson_sum, but with the column delta (old_col -> new_col) applied on
// the fly to every row except skip_row. Hot path of the candidate argmax.
double probe_pearson_sum(std::span<const double> sx, std::span<const double> sxx,
                         std::span<const double> sy, std::span<const double> syy,
                         std::span<const double> sxy,
                         std::span<const double> new_col,
                         std::span<const double> old_col,
                         std::span<const double> x_col, double n_terms,
                         std::size_t skip_row);

// Active backend: "avx2" when the CPU and build support it, else "scalar".
// set_backend accepts "auto", "scalar" or "avx2" and returns false if the
// request cannot be honoured. The CASD_KERNEL environment variable applies
// the same override at startup.
std::string_view backend_name();
bool set_backend(std::string_view name);
bool avx2_available();

}  // namespace casd::kernels
