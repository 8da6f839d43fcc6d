#include "zipfit/dist.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "zipfit/simd/kernels.hpp"

namespace zipfit::dist {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Direct summation stops once the integral majorant of the remaining tail
// drops below this fraction of the running sum.
constexpr double kTailTolerance = 1e-13;
// Smallest direct-sum length before the Euler-Maclaurin tail may take over.
constexpr std::int64_t kEulerMaclaurinMin = 2048;
// Hard cap on direct summation.
constexpr std::int64_t kDirectMax = std::int64_t{1} << 22;
constexpr std::int64_t kMaxSupport = std::int64_t{1} << 53;

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_erfc(double z) {
  if (z < 25.0) return std::log(std::erfc(z));
  const double z2 = z * z;
  return -z2 - std::log(z) - 0.5 * std::log(std::numbers::pi) +
         std::log1p(-0.5 / z2 + 0.75 / (z2 * z2));
}

struct Derivatives {
  double d1, d2, d3;
};

Derivatives log_kernel_derivatives(const DistParams& p, double x) {
  const double x2 = x * x;
  const double x3 = x2 * x;
  switch (p.family) {
    case Family::power_law:
      return {-p.alpha / x, p.alpha / x2, -2.0 * p.alpha / x3};
    case Family::power_law_cutoff:
      return {-p.alpha / x - p.lambda, p.alpha / x2, -2.0 * p.alpha / x3};
    case Family::exponential:
      return {-p.lambda, 0.0, 0.0};
    case Family::stretched_exp: {
      const double b = p.beta;
      const double xb = std::pow(x, b);
      return {(b - 1.0) / x - p.lambda * b * xb / x,
              -(b - 1.0) / x2 - p.lambda * b * (b - 1.0) * xb / x2,
              2.0 * (b - 1.0) / x3 - p.lambda * b * (b - 1.0) * (b - 2.0) * xb / x3};
    }
    case Family::lognormal: {
      const double s2 = p.sigma * p.sigma;
      const double l = std::log(x) - p.mu;
      return {-(1.0 + l / s2) / x, (1.0 - (1.0 - l) / s2) / x2, (-2.0 + (3.0 - 2.0 * l) / s2) / x3};
    }
  }
  return {0.0, 0.0, 0.0};
}

// Continuous argmax of the log kernel on (0, inf), or 0 when it is
// decreasing everywhere.
double kernel_mode(const DistParams& p) {
  switch (p.family) {
    case Family::power_law_cutoff:
      return p.alpha < 0.0 ? -p.alpha / p.lambda : 0.0;
    case Family::stretched_exp:
      return p.beta > 1.0 ? std::pow((p.beta - 1.0) / (p.lambda * p.beta), 1.0 / p.beta) : 0.0;
    case Family::lognormal:
      return std::exp(p.mu - p.sigma * p.sigma);
    default:
      return 0.0;
  }
}

// sum_{x=first}^{first+count-1} exp(g(x) - shift)
double range_sum(const DistParams& p, std::int64_t first, std::int64_t count, double shift) {
  const auto& k = simd::active();
  switch (p.family) {
    case Family::power_law:
      return k.sum_exp_log_quadratic(first, count, {-shift, -p.alpha, 0.0, 0.0});
    case Family::power_law_cutoff:
      return k.sum_exp_log_quadratic(first, count, {-shift, -p.alpha, 0.0, -p.lambda});
    case Family::exponential:
      return k.sum_exp_log_quadratic(first, count, {-shift, 0.0, 0.0, -p.lambda});
    case Family::lognormal: {
      const double s2 = p.sigma * p.sigma;
      return k.sum_exp_log_quadratic(
          first, count, {-p.mu * p.mu / (2.0 * s2) - shift, -1.0 + p.mu / s2, -0.5 / s2, 0.0});
    }
    case Family::stretched_exp:
      return k.sum_exp_stretched(first, count, {-shift, p.beta - 1.0, p.lambda, p.beta});
  }
  return 0.0;
}

// ln of lambda^(alpha-1) Gamma(1-alpha, lambda m), by quadrature. x = m e^t
// turns the algebraic decay into exponential decay in t; the integrand is
// rescaled by its peak so large 1-alpha cannot overflow.
double cutoff_log_integral(const DistParams& p, double m) {
  const double a = 1.0 - p.alpha;
  const double lm = p.lambda * m;
  const double t_peak = a > lm ? std::log(a / lm) : 0.0;
  const double h_peak = a * t_peak - lm * std::expm1(t_peak);
  boost::math::quadrature::exp_sinh<double> integrator;
  const double value = integrator.integrate(
      [&](double t) { return std::exp(a * t - lm * std::expm1(t) - h_peak); }, 1e-14);
  return a * std::log(m) - lm + h_peak + std::log(value);
}

// ln of the integral of exp(g(x)) over [m, inf).
double log_tail_integral(const DistParams& p, double m) {
  switch (p.family) {
    case Family::power_law:
      return (1.0 - p.alpha) * std::log(m) - std::log(p.alpha - 1.0);
    case Family::exponential:
      return -p.lambda * m - std::log(p.lambda);
    case Family::stretched_exp:
      return -p.lambda * std::pow(m, p.beta) - std::log(p.lambda * p.beta);
    case Family::lognormal:
      return std::log(p.sigma * std::sqrt(2.0 * std::numbers::pi) * 0.5) +
             log_erfc((std::log(m) - p.mu) / (p.sigma * std::numbers::sqrt2));
    case Family::power_law_cutoff:
      if (p.lambda == 0.0) return (1.0 - p.alpha) * std::log(m) - std::log(p.alpha - 1.0);
      return cutoff_log_integral(p, m);
  }
  return -kInf;
}

// Euler-Maclaurin tail sum_{x>=m} exp(g(x) - shift) through the f''' term.
double euler_maclaurin_tail(const DistParams& p, double m, double shift) {
  const double f = std::exp(log_kernel(p, m) - shift);
  const auto [d1, d2, d3] = log_kernel_derivatives(p, m);
  const double integral = std::exp(log_tail_integral(p, m) - shift);
  return integral + 0.5 * f - d1 * f / 12.0 + (d3 + 3.0 * d1 * d2 + d1 * d1 * d1) * f / 720.0;
}

bool euler_maclaurin_accurate(const DistParams& p, double m) {
  const auto [d1, d2, d3] = log_kernel_derivatives(p, m);
  return std::abs(d1) <= 0.02 && std::abs(d2) <= 1e-4 && std::abs(d3) <= 1e-6;
}

// Largest log kernel value over integers >= from, used as the scale so that
// no summand exceeds 1.
double log_kernel_peak(const DistParams& p, std::int64_t from) {
  const double mode = kernel_mode(p);
  if (!(mode > static_cast<double>(from))) return log_kernel(p, static_cast<double>(from));
  if (mode >= static_cast<double>(kMaxSupport)) return log_kernel(p, mode);
  const double lo = std::floor(mode);
  return std::max(log_kernel(p, lo), log_kernel(p, lo + 1.0));
}

double log_tail_by_summation(const DistParams& p, std::int64_t from) {
  const double peak_x = std::max(kernel_mode(p), static_cast<double>(from));
  const double shift = log_kernel_peak(p, from);
  double sum = 0.0;
  std::int64_t x = from;
  std::int64_t block = 64;
  while (true) {
    sum += range_sum(p, x, block, shift);
    x += block;
    const double xd = static_cast<double>(x);
    if (xd - 1.0 >= peak_x) {
      // kernel is decreasing on [x-1, inf): the sum over x.. is below the integral from x-1
      const double bound = std::exp(log_tail_integral(p, xd - 1.0) - shift);
      if (bound <= kTailTolerance * sum) return shift + std::log(sum);
    }
    const std::int64_t summed = x - from;
    if ((summed >= kEulerMaclaurinMin && euler_maclaurin_accurate(p, xd)) || summed >= kDirectMax)
      return shift + std::log(sum + euler_maclaurin_tail(p, xd, shift));
    block = std::min<std::int64_t>(block * 2, 8192);
  }
}

// ln sum_{x=first}^{first+count-1} kernel(x)
double log_range_mass(const DistParams& p, std::int64_t first, std::int64_t count) {
  const double last = static_cast<double>(first + count - 1);
  double shift = std::max(log_kernel(p, static_cast<double>(first)), log_kernel(p, last));
  const double mode = kernel_mode(p);
  if (mode > static_cast<double>(first) && mode < last) shift = std::max(shift, log_kernel(p, mode));
  return shift + std::log(range_sum(p, first, count, shift));
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::power_law: return "power_law";
    case Family::power_law_cutoff: return "truncated_power_law";
    case Family::lognormal: return "lognormal";
    case Family::exponential: return "exponential";
    case Family::stretched_exp: return "stretched_exponential";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::power_law, Family::power_law_cutoff, Family::lognormal,
                   Family::exponential, Family::stretched_exp}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

DistParams DistParams::power_law(double alpha, std::int64_t x_min) {
  return {.family = Family::power_law, .alpha = alpha, .x_min = x_min};
}
DistParams DistParams::power_law_cutoff(double alpha, double lambda, std::int64_t x_min) {
  return {.family = Family::power_law_cutoff, .alpha = alpha, .lambda = lambda, .x_min = x_min};
}
DistParams DistParams::lognormal(double mu, double sigma, std::int64_t x_min) {
  return {.family = Family::lognormal, .mu = mu, .sigma = sigma, .x_min = x_min};
}
DistParams DistParams::exponential(double lambda, std::int64_t x_min) {
  return {.family = Family::exponential, .lambda = lambda, .x_min = x_min};
}
DistParams DistParams::stretched_exp(double lambda, double beta, std::int64_t x_min) {
  return {.family = Family::stretched_exp, .lambda = lambda, .beta = beta, .x_min = x_min};
}

bool is_normalizable(const DistParams& p) {
  if (p.x_min < 1) return false;
  switch (p.family) {
    case Family::power_law:
      return p.alpha > 1.0 && std::isfinite(p.alpha);
    case Family::power_law_cutoff:
      return std::isfinite(p.alpha) && std::isfinite(p.lambda) &&
             (p.lambda > 0.0 || (p.lambda == 0.0 && p.alpha > 1.0));
    case Family::exponential:
      return p.lambda > 0.0 && std::isfinite(p.lambda);
    case Family::stretched_exp:
      return p.lambda > 0.0 && std::isfinite(p.lambda) && p.beta > 0.0 && std::isfinite(p.beta);
    case Family::lognormal:
      return p.sigma > 0.0 && std::isfinite(p.sigma) && std::isfinite(p.mu);
  }
  return false;
}

void validate(const DistParams& p) {
  if (!is_normalizable(p))
    throw std::domain_error("non-normalizable parameters for " + std::string(to_string(p.family)));
}

double log_kernel(const DistParams& p, double x) {
  switch (p.family) {
    case Family::power_law:
      return -p.alpha * std::log(x);
    case Family::power_law_cutoff:
      return -p.alpha * std::log(x) - p.lambda * x;
    case Family::exponential:
      return -p.lambda * x;
    case Family::stretched_exp:
      return (p.beta - 1.0) * std::log(x) - p.lambda * std::pow(x, p.beta);
    case Family::lognormal: {
      const double l = std::log(x);
      return -l - (l - p.mu) * (l - p.mu) / (2.0 * p.sigma * p.sigma);
    }
  }
  return -kInf;
}

double log_tail_mass(const DistParams& p, std::int64_t from) {
  validate(p);
  if (from < 1) throw std::domain_error("tail sum must start at x >= 1");
  switch (p.family) {
    case Family::power_law:
      return log_hurwitz_zeta(p.alpha, from);
    case Family::power_law_cutoff:
      if (p.lambda == 0.0) return log_hurwitz_zeta(p.alpha, from);
      break;
    case Family::exponential:
      return -p.lambda * static_cast<double>(from) - std::log1p(-std::exp(-p.lambda));
    default:
      break;
  }
  return log_tail_by_summation(p, from);
}

double log_normalization(const DistParams& p) { return log_tail_mass(p, p.x_min); }

double normalization_constant(const DistParams& p) { return std::exp(log_normalization(p)); }

double log_pmf(const DistParams& p, std::int64_t x) { return Distribution(p).log_pmf(x); }

double ccdf(const DistParams& p, std::int64_t x) {
  validate(p);
  if (x < p.x_min) throw std::domain_error("ccdf evaluated below x_min");
  if (x == p.x_min) return 1.0;
  return std::min(1.0, std::exp(log_tail_mass(p, x) - log_normalization(p)));
}

std::vector<double> ccdf_at(const DistParams& p, std::span<const std::int64_t> xs) {
  validate(p);
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  if (!std::is_sorted(xs.begin(), xs.end())) throw std::invalid_argument("ccdf_at needs ascending points");
  if (xs.front() < p.x_min) throw std::domain_error("ccdf evaluated below x_min");

  // Beyond this gap a fresh tail sum is cheaper than summing the gap.
  const std::int64_t max_gap =
      (p.family == Family::power_law || p.family == Family::exponential) ? 16 : 2048;
  const double log_z = log_normalization(p);

  double log_tail = log_tail_mass(p, xs.back());
  for (std::size_t i = xs.size(); i-- > 0;) {
    if (i + 1 < xs.size() && xs[i] != xs[i + 1]) {
      const std::int64_t gap = xs[i + 1] - xs[i];
      log_tail = gap <= max_gap ? log_add_exp(log_tail, log_range_mass(p, xs[i], gap))
                                : log_tail_mass(p, xs[i]);
    }
    out[i] = xs[i] == p.x_min ? 1.0 : std::min(1.0, std::exp(log_tail - log_z));
  }
  return out;
}

Distribution::Distribution(const DistParams& p) : params_(p), log_z_(log_normalization(p)) {}

double Distribution::log_pmf(std::int64_t x) const {
  if (x < params_.x_min) throw std::domain_error("pmf evaluated below x_min");
  return log_kernel(params_, static_cast<double>(x)) - log_z_;
}

double Distribution::pmf(std::int64_t x) const { return std::exp(log_pmf(x)); }

PowerLawSampler::PowerLawSampler(double alpha, std::int64_t x_min)
    : alpha_(alpha), x_min_(x_min), log_z_(0.0) {
  validate(DistParams::power_law(alpha, x_min));
  log_z_ = log_hurwitz_zeta(alpha, x_min);

  constexpr std::int64_t kTable = 2048;
  table_.resize(kTable + 1);
  table_[kTable] = survival(x_min + kTable);
  for (std::int64_t i = kTable; i-- > 1;) {
    table_[i] = table_[i + 1] +
                std::exp(-alpha * std::log(static_cast<double>(x_min + i)) - log_z_);
  }
  table_[0] = 1.0;
}

double PowerLawSampler::survival(std::int64_t x) const {
  return std::exp(log_hurwitz_zeta(alpha_, x) - log_z_);
}

std::int64_t PowerLawSampler::invert(double v) const {
  // table_ is strictly decreasing; find the first index with table_[i] <= v.
  const auto it = std::partition_point(table_.begin() + 1, table_.end(),
                                       [v](double s) { return s > v; });
  if (it != table_.end()) return x_min_ + (it - table_.begin()) - 1;

  constexpr std::int64_t kCap = std::int64_t{1} << 60;
  std::int64_t lo = x_min_ + static_cast<std::int64_t>(table_.size()) - 1;  // survival(lo) > v
  std::int64_t hi = lo;
  while (true) {
    if (hi >= kCap / 2) return kCap;
    hi *= 2;
    if (survival(hi) <= v) break;
    lo = hi;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (survival(mid) <= v) hi = mid;
    else lo = mid;
  }
  return hi - 1;
}

std::vector<std::int64_t> sample_powerlaw(double alpha, std::int64_t x_min, std::size_t n,
                                          Rng& rng) {
  const PowerLawSampler sampler(alpha, x_min);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = sampler(rng);
  return out;
}

std::vector<std::int64_t> sample_powerlaw(double alpha, std::int64_t x_min, std::size_t n,
                                          std::uint64_t seed) {
  Rng rng(seed);
  return sample_powerlaw(alpha, x_min, n, rng);
}

std::vector<CcdfPoint> empirical_ccdf(std::span<const std::int64_t> data) {
  if (data.empty()) throw std::invalid_argument("empirical ccdf of empty data");
  std::vector<std::int64_t> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1])
      out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
  }
  return out;
}

}  // namespace zipfit::dist
