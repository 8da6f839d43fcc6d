#include "simd/kernel_variants.hpp"

#include <algorithm>
#include <cmath>

namespace zipfit::simd::detail {
namespace {

double sum_exp_log_quadratic(std::int64_t first, std::int64_t count,
                             const LogQuadratic& g) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double x = static_cast<double>(first + i);
    const double l = std::log(x);
    acc += std::exp(g.c0 + l * (g.log_coef + l * g.log2_coef) + g.lin_coef * x);
  }
  return acc;
}

double sum_exp_stretched(std::int64_t first, std::int64_t count,
                         const LogStretched& g) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    const double l = std::log(static_cast<double>(first + i));
    acc += std::exp(g.c0 + g.log_coef * l - g.lambda * std::exp(g.beta * l));
  }
  return acc;
}

double weighted_sum_exp(std::span<const double> w, std::span<const double> v,
                        double scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::exp(scale * v[i]);
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void log_array(std::span<const double> in, std::span<double> out) {
  std::transform(in.begin(), in.end(), out.begin(), [](double x) { return std::log(x); });
}

void exp_array(std::span<const double> in, std::span<double> out) {
  std::transform(in.begin(), in.end(), out.begin(),
                 [](double x) { return x < kExpFlushArg ? 0.0 : std::exp(x); });
}

}  // namespace

const KernelTable kScalarTable{
    "scalar",           sum_exp_log_quadratic, sum_exp_stretched, weighted_sum_exp,
    dot,                max_abs_diff,          log_array,         exp_array,
};

}  // namespace zipfit::simd::detail
