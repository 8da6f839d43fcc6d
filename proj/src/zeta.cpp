#include <array>
#include <cmath>
#include <stdexcept>

#include "zipfit/dist.hpp"
#include "zipfit/simd/kernels.hpp"

namespace zipfit::dist {
namespace {

constexpr int kEulerMaclaurinTerms = 10;

// B_{2j} / (2j)!, j = 1..10
constexpr std::array<double, kEulerMaclaurinTerms> bernoulli_over_factorial() {
  constexpr std::array<double, kEulerMaclaurinTerms> b2j{
      1.0 / 6.0,       -1.0 / 30.0,   1.0 / 42.0,        -1.0 / 30.0,       5.0 / 66.0,
      -691.0 / 2730.0, 7.0 / 6.0,     -3617.0 / 510.0,   43867.0 / 798.0,   -174611.0 / 330.0};
  std::array<double, kEulerMaclaurinTerms> out{};
  double factorial = 1.0;
  for (int j = 1; j <= kEulerMaclaurinTerms; ++j) {
    factorial *= (2.0 * j - 1.0) * (2.0 * j);
    out[j - 1] = b2j[j - 1] / factorial;
  }
  return out;
}

constexpr auto kBernoulli = bernoulli_over_factorial();

}  // namespace

double log_hurwitz_zeta(double s, std::int64_t a) {
  if (!(s > 1.0) || !std::isfinite(s)) throw std::domain_error("hurwitz zeta requires s > 1");
  if (a < 1) throw std::domain_error("hurwitz zeta requires a >= 1");

  // Sum the first terms directly until the Euler-Maclaurin tail converges
  // to double precision; the shift grows with s because the correction
  // terms scale like (s/2 pi b)^(2j).
  const double log_a = std::log(static_cast<double>(a));
  const std::int64_t shift_to = 16 + static_cast<std::int64_t>(std::ceil(std::min(s, 1e6)));
  const std::int64_t direct = a < shift_to ? shift_to - a : 0;
  const std::int64_t b = a + direct;

  // Everything below is relative to a^-s.
  double sum = 0.0;
  if (direct > 0) {
    sum = simd::active().sum_exp_log_quadratic(a, direct, {s * log_a, -s, 0.0, 0.0});
  }

  const double bd = static_cast<double>(b);
  double bracket = bd / (s - 1.0) + 0.5;
  double rising = s;           // s (s+1) ... (s+2j-2)
  double inv_pow = 1.0 / bd;   // b^(1-2j)
  const double inv_b2 = inv_pow * inv_pow;
  for (int j = 0; j < kEulerMaclaurinTerms; ++j) {
    const double term = kBernoulli[j] * rising * inv_pow;
    bracket += term;
    if (std::abs(term) < 1e-17 * bracket) break;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    inv_pow *= inv_b2;
  }
  const double tail = std::exp(-s * (std::log(bd) - log_a)) * bracket;
  return -s * log_a + std::log(sum + tail);
}

double hurwitz_zeta(double s, std::int64_t a) { return std::exp(log_hurwitz_zeta(s, a)); }

}  // namespace zipfit::dist
