#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zipfit/dist.hpp"
#include "zipfit/sample.hpp"

namespace zipfit::fit {

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const Interval&) const = default;
};

struct FitConfig {
  std::size_t min_tail = 10;
};

struct FitResult {
  dist::DistParams params;
  double ks = 0.0;
  std::size_t n_tail = 0;
  double log_likelihood = 0.0;
  std::optional<Interval> alpha_ci;
  std::optional<Interval> xmin_ci;
  int n_boot = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // alpha pinned at the search bound
  bool converged = true;    // simplex search met its tolerance
  int evaluations = 0;

  bool operator==(const FitResult&) const = default;
};

inline constexpr double kAlphaLower = 1.0 + 1e-6;
inline constexpr double kAlphaUpper = 10.0;
inline constexpr double kAlphaTolerance = 1e-6;

/// Discrete power-law log-likelihood of n tail points with sum of logs
/// log_sum: -n ln zeta(alpha, x_min) - alpha log_sum.
double power_law_log_likelihood(double alpha, std::int64_t x_min, double n, double log_sum);

struct AlphaEstimate {
  double alpha = 0.0;
  double log_likelihood = 0.0;
  bool degenerate = false;
};

/// Exact discrete MLE of alpha over observations >= x_min.
/// Throws std::invalid_argument if no observation reaches x_min.
AlphaEstimate fit_alpha_given_xmin(const Sample& data, std::int64_t x_min);

/// 1 + n / sum ln(x / (x_min - 1/2)).
double alpha_approximation(const Sample& data, std::int64_t x_min);

/// max over distinct x >= x_min of |F_emp(x) - F_model(x)|.
double ks_distance(const Sample& data, const dist::DistParams& p);

/// Log-likelihood of the observations >= p.x_min under p.
double tail_log_likelihood(const Sample& data, const dist::DistParams& p);

/// Scans every distinct value as x_min and keeps the one with the smallest
/// KS distance (ties go to the smaller x_min). Throws std::invalid_argument
/// when no candidate leaves min_tail observations spread over at least two
/// distinct values.
FitResult fit_powerlaw(const Sample& data, const FitConfig& cfg = {});

/// Simplex MLE of an alternative family on the observations >= x_min.
FitResult fit_alternative(const Sample& data, std::int64_t x_min, dist::Family family);

struct BootstrapConfig {
  int n_boot = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  FitConfig fit;
};

struct BootstrapResult {
  Interval alpha_ci;
  Interval xmin_ci;
  std::vector<double> alphas;
  std::vector<double> xmins;
};

/// Nonparametric bootstrap over the full dataset with a refit of x_min and
/// alpha per replicate; percentile intervals. Replicate r draws from
/// derive_seed(seed, r), so results do not depend on the thread count.
BootstrapResult bootstrap_ci(const Sample& data, const BootstrapConfig& cfg);

/// Quantile with linear interpolation between order statistics (R type 7).
double percentile(std::vector<double> values, double q);

/// n draws with replacement from the multiset.
Sample resample(const Sample& data, Rng& rng);

}  // namespace zipfit::fit
