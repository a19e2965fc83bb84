#include "casd/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>

#include "kernels_internal.hpp"

namespace casd::kernels {
namespace {

using detail::Backend;

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Backend* pick_default() {
  const Backend* avx2 = detail::avx2_backend();
  if (const char* env = std::getenv("CASD_KERNEL")) {
    const std::string_view req(env);
    if (req == "scalar") return &detail::scalar_backend();
    if (req == "avx2" && avx2 != nullptr && cpu_has_avx2()) return avx2;
    // unknown or unavailable request falls through to auto
  }
  if (avx2 != nullptr && cpu_has_avx2()) return avx2;
  return &detail::scalar_backend();
}

std::atomic<const Backend*>& active() {
  static std::atomic<const Backend*> backend{pick_default()};
  return backend;
}

}  // namespace

std::string_view backend_name() { return active().load()->name; }

bool avx2_available() { return detail::avx2_backend() != nullptr && cpu_has_avx2(); }

bool set_backend(std::string_view name) {
  if (name == "scalar") {
    active().store(&detail::scalar_backend());
    return true;
  }
  if (name == "avx2") {
    if (!avx2_available()) return false;
    active().store(detail::avx2_backend());
    return true;
  }
  if (name == "auto") {
    active().store(avx2_available() ? detail::avx2_backend()
                                    : &detail::scalar_backend());
    return true;
  }
  return false;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().load()->dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) {
  return active().load()->sum(a.data(), a.size());
}

double sum_sq(std::span<const double> a) {
  return active().load()->sum_sq(a.data(), a.size());
}

void apply_column_delta(std::span<double> sy, std::span<double> syy,
                        std::span<double> sxy, std::span<const double> new_col,
                        std::span<const double> old_col,
                        std::span<const double> x_col) {
  const std::size_t n = sy.size();
  assert(syy.size() == n && sxy.size() == n && new_col.size() == n &&
         old_col.size() == n && x_col.size() == n);
  active().load()->apply_column_delta(sy.data(), syy.data(), sxy.data(),
                                      new_col.data(), old_col.data(),
                                      x_col.data(), n);
}

double pearson_sum(std::span<const double> sx, std::span<const double> sxx,
                   std::span<const double> sy, std::span<const double> syy,
                   std::span<const double> sxy, double n_terms,
                   std::size_t skip_row) {
  return active().load()->pearson_sum(sx.data(), sxx.data(), sy.data(),
                                      syy.data(), sxy.data(), n_terms,
                                      sx.size(), skip_row);
}

double probe_pearson_sum(std::span<const double> sx, std::span<const double> sxx,
                         std::span<const double> sy, std::span<const double> syy,
                         std::span<const double> sxy,
                         std::span<const double> new_col,
                         std::span<const double> old_col,
                         std::span<const double> x_col, double n_terms,
                         std::size_t skip_row) {
  return active().load()->probe_pearson_sum(
      sx.data(), sxx.data(), sy.data(), syy.data(), sxy.data(), new_col.data(),
      old_col.data(), x_col.data(), n_terms, sx.size(), skip_row);
}

}  // namespace casd::kernels
