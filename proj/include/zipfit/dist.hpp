#pragma once

// Discrete heavy-tailed families on the integers x >= x_min.
//
//   power law             x^-alpha
//   power law w/ cutoff   x^-alpha exp(-lambda x)
//   exponential           exp(-lambda x)
//   stretched exponential x^(beta-1) exp(-lambda x^beta)
//   lognormal             (1/x) exp(-(ln x - mu)^2 / (2 sigma^2))
//
// Every family is normalized by summing its kernel over the integers, never
// by a continuous approximation.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zipfit/rng.hpp"

namespace zipfit::dist {

enum class Family { power_law, power_law_cutoff, lognormal, exponential, stretched_exp };

std::string_view to_string(Family f);
/// Inverse of to_string; throws std::invalid_argument on an unknown name.
Family family_from_string(std::string_view name);

struct DistParams {
  Family family = Family::power_law;
  double alpha = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  std::int64_t x_min = 1;

  static DistParams power_law(double alpha, std::int64_t x_min);
  static DistParams power_law_cutoff(double alpha, double lambda, std::int64_t x_min);
  static DistParams lognormal(double mu, double sigma, std::int64_t x_min);
  static DistParams exponential(double lambda, std::int64_t x_min);
  static DistParams stretched_exp(double lambda, double beta, std::int64_t x_min);

  bool operator==(const DistParams&) const = default;
};

/// True when the family's kernel is summable for these parameters.
bool is_normalizable(const DistParams& p);
/// Throws std::domain_error unless is_normalizable(p).
void validate(const DistParams& p);

/// ln of the unnormalized kernel at (real) x.
double log_kernel(const DistParams& p, double x);

/// Hurwitz zeta sum_{k>=0} (a+k)^-s for s > 1 and integer a >= 1, relative
/// error ~1e-15. Computed in log space so huge a or s do not underflow.
double log_hurwitz_zeta(double s, std::int64_t a);
double hurwitz_zeta(double s, std::int64_t a);

/// ln sum_{x >= from} kernel(x), from >= 1.
double log_tail_mass(const DistParams& p, std::int64_t from);

/// ln Z where Z = sum_{x >= x_min} kernel(x).
double log_normalization(const DistParams& p);
double normalization_constant(const DistParams& p);

/// ln P(X = x). Throws std::domain_error for x < x_min or invalid params.
double log_pmf(const DistParams& p, std::int64_t x);

/// P(X >= x), exactly 1 at x_min.
double ccdf(const DistParams& p, std::int64_t x);

/// P(X >= x) at every x of an ascending list (all >= x_min). Walks down
/// from the largest point, adding the kernel over short gaps, which is far
/// cheaper than one tail sum per point.
std::vector<double> ccdf_at(const DistParams& p, std::span<const std::int64_t> xs);

/// A parameter set with its normalization constant computed once.
class Distribution {
 public:
  explicit Distribution(const DistParams& p);

  const DistParams& params() const { return params_; }
  double log_z() const { return log_z_; }
  double log_pmf(std::int64_t x) const;
  double pmf(std::int64_t x) const;

 private:
  DistParams params_;
  double log_z_;
};

/// Exact inverse-CDF sampler for the discrete power law. The complementary
/// CDF over the first few thousand support points is tabulated; draws past
/// the table bracket by doubling and bisect on the Hurwitz zeta.
class PowerLawSampler {
 public:
  PowerLawSampler(double alpha, std::int64_t x_min);

  /// Smallest x with P(X >= x+1) <= v, i.e. the CDF inverse at u = 1 - v.
  std::int64_t invert(double v) const;

  std::int64_t operator()(Rng& rng) const { return invert(1.0 - uniform01(rng)); }

  double alpha() const { return alpha_; }
  std::int64_t x_min() const { return x_min_; }

 private:
  double survival(std::int64_t x) const;  // P(X >= x)

  double alpha_;
  std::int64_t x_min_;
  double log_z_;
  std::vector<double> table_;  // table_[i] = P(X >= x_min + i)
};

std::vector<std::int64_t> sample_powerlaw(double alpha, std::int64_t x_min, std::size_t n,
                                          std::uint64_t seed);
std::vector<std::int64_t> sample_powerlaw(double alpha, std::int64_t x_min, std::size_t n,
                                          Rng& rng);

struct CcdfPoint {
  std::int64_t x = 0;
  double ccdf = 0.0;
  bool operator==(const CcdfPoint&) const = default;
};

/// Fraction of observations >= x for each distinct x, ascending.
std::vector<CcdfPoint> empirical_ccdf(std::span<const std::int64_t> data);

}  // namespace zipfit::dist
