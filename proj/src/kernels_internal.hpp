#pragma once

#include <cstddef>

// Function-pointer table filled in by the scalar and AVX2 translation units
// and selected once by the dispatcher.

namespace casd::kernels::detail {

struct Backend {
  const char* name;
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sum_sq)(const double*, std::size_t);
  void (*apply_column_delta)(double*, double*, double*, const double*,
                             const double*, const double*, std::size_t);
  double (*pearson_sum)(const double*, const double*, const double*,
                        const double*, const double*, double, std::size_t,
                        std::size_t);
  double (*probe_pearson_sum)(const double*, const double*, const double*,
                              const double*, const double*, const double*,
                              const double*, const double*, double,
                              std::size_t, std::size_t);
};

const Backend& scalar_backend();

// Null when the binary was built without AVX2 support.
const Backend* avx2_backend();

}  // namespace casd::kernels::detail
