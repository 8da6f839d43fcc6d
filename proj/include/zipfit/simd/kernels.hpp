#pragma once

// Data-parallel arithmetic kernels behind the distribution and fitting code.
//
// Every kernel has a scalar reference implementation built on <cmath> and,
// on x86-64, an AVX2/FMA variant with its own vectorized exp/log. The active
// table is picked once at startup from the CPU's capabilities; the
// ZIPFIT_SIMD environment variable ("scalar" or "avx2") overrides that
// choice. The two variants agree to within a few ulp per term; summation
// order differs, so reductions agree to ~1e-13 relative (~1e-12 over 1e5
// terms), not bitwise.

#include <cstdint>
#include <span>
#include <string_view>

namespace zipfit::simd {

// g(x) = c0 + log_coef*ln(x) + log2_coef*ln(x)^2 + lin_coef*x
struct LogQuadratic {
  double c0 = 0.0;
  double log_coef = 0.0;
  double log2_coef = 0.0;
  double lin_coef = 0.0;
};

// g(x) = c0 + log_coef*ln(x) - lambda*x^beta
struct LogStretched {
  double c0 = 0.0;
  double log_coef = 0.0;
  double lambda = 0.0;
  double beta = 1.0;
};

struct KernelTable {
  std::string_view name;

  /// Sum of exp(g(x)) over the integers first, first+1, ..., first+count-1.
  double (*sum_exp_log_quadratic)(std::int64_t first, std::int64_t count,
                                  const LogQuadratic& g);
  /// Same for the stretched form.
  double (*sum_exp_stretched)(std::int64_t first, std::int64_t count,
                              const LogStretched& g);
  /// Sum of w[i] * exp(scale * v[i]).
  double (*weighted_sum_exp)(std::span<const double> w,
                             std::span<const double> v, double scale);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  /// max |a[i] - b[i]|, 0 for empty input.
  double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
  /// Elementwise natural log; inputs must be positive and finite.
  void (*log)(std::span<const double> in, std::span<double> out);
  /// Elementwise exp; results below ~1e-308 flush to zero.
  void (*exp)(std::span<const double> in, std::span<double> out);
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

const KernelTable& active();
Isa active_isa();

/// Switch the active table. Throws std::runtime_error if `isa` is unavailable.
void select(Isa isa);

}  // namespace zipfit::simd
