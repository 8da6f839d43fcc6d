#include "zipfit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "zipfit/optimize.hpp"
#include "zipfit/parallel.hpp"
#include "zipfit/simd/kernels.hpp"

namespace zipfit::fit {
namespace {

using dist::DistParams;
using dist::Family;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Weighted moments of the tail that every likelihood below is built from.
struct TailStats {
  std::size_t index = 0;
  double n = 0.0;
  double sum_log = 0.0;
  double mean_log = 0.0;
  double centered_log2 = 0.0;  // sum c (ln x - mean_log)^2
  double sum_x = 0.0;
  std::span<const double> weights;
  std::span<const double> log_values;
};

TailStats tail_stats(const Sample& data, std::int64_t x_min) {
  TailStats t;
  t.index = data.lower_index(x_min);
  t.n = static_cast<double>(data.tail_count(t.index));
  if (t.n == 0.0) throw std::invalid_argument("no observations at or above x_min");
  t.sum_log = data.tail_log_sum(t.index);
  t.mean_log = t.sum_log / t.n;
  t.weights = data.weights().subspan(t.index);
  t.log_values = data.log_values().subspan(t.index);
  const auto values = data.values().subspan(t.index);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = t.log_values[i] - t.mean_log;
    t.centered_log2 += t.weights[i] * d * d;
    t.sum_x += t.weights[i] * static_cast<double>(values[i]);
  }
  return t;
}

double kernel_sum(const TailStats& t, const DistParams& p) {
  switch (p.family) {
    case Family::power_law:
      return -p.alpha * t.sum_log;
    case Family::power_law_cutoff:
      return -p.alpha * t.sum_log - p.lambda * t.sum_x;
    case Family::exponential:
      return -p.lambda * t.sum_x;
    case Family::stretched_exp:
      return (p.beta - 1.0) * t.sum_log -
             p.lambda * simd::active().weighted_sum_exp(t.weights, t.log_values, p.beta);
    case Family::lognormal: {
      const double shift = t.mean_log - p.mu;
      return -t.sum_log - (t.centered_log2 + t.n * shift * shift) / (2.0 * p.sigma * p.sigma);
    }
  }
  return kNaN;
}

double log_likelihood(const TailStats& t, const DistParams& p) {
  if (!dist::is_normalizable(p)) return kNaN;
  try {
    return kernel_sum(t, p) - t.n * dist::log_normalization(p);
  } catch (const std::exception&) {
    return kNaN;
  }
}

double ks_from_index(const Sample& data, std::size_t index, const DistParams& p) {
  const auto values = data.values().subspan(index);
  const auto weights = data.weights().subspan(index);
  if (values.empty()) throw std::invalid_argument("no observations at or above x_min");
  std::vector<std::int64_t> next(values.size());
  std::transform(values.begin(), values.end(), next.begin(), [](std::int64_t x) { return x + 1; });
  const std::vector<double> upper = dist::ccdf_at(p, next);
  const double n = static_cast<double>(data.tail_count(index));
  double cum = 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cum += weights[i];
    d = std::max(d, std::abs(cum / n - (1.0 - upper[i])));
  }
  return d;
}

AlphaEstimate alpha_mle(std::int64_t x_min, double n, double log_sum) {
  const auto best = optimize::golden_section_maximize(
      [&](double a) { return power_law_log_likelihood(a, x_min, n, log_sum); }, kAlphaLower,
      kAlphaUpper, kAlphaTolerance);
  return {best.x, best.value, best.x > kAlphaUpper - 10.0 * kAlphaTolerance};
}

// Parameter vector <-> family parameters. Positive parameters live on a log
// scale; the cutoff rate is squared so that lambda = 0 stays reachable.
DistParams decode(Family family, std::span<const double> th, std::int64_t x_min) {
  switch (family) {
    case Family::lognormal:
      return DistParams::lognormal(th[0], std::exp(th[1]), x_min);
    case Family::exponential:
      return DistParams::exponential(std::exp(th[0]), x_min);
    case Family::stretched_exp:
      return DistParams::stretched_exp(std::exp(th[0]), std::exp(th[1]), x_min);
    case Family::power_law_cutoff:
      return DistParams::power_law_cutoff(th[0], th[1] * th[1], x_min);
    case Family::power_law:
      break;
  }
  throw std::invalid_argument("not an alternative family");
}

struct Start {
  std::vector<double> theta;
  std::vector<double> step;
};

std::vector<Start> starts_for(Family family, const TailStats& t, std::int64_t x_min) {
  const double xm = static_cast<double>(x_min);
  const double excess = std::max(t.sum_x / t.n - xm, 1e-3);
  std::vector<Start> out;
  switch (family) {
    case Family::lognormal: {
      const double sd = std::max(std::sqrt(t.centered_log2 / t.n), 0.1);
      const double m = t.mean_log;
      for (const auto& [mu, sigma] : {std::pair{m, sd}, std::pair{0.0, sd}, std::pair{m - 2.0 * sd * sd, 2.0 * sd},
                                      std::pair{-5.0, 3.0}, std::pair{std::log(xm), 1.0}})
        out.push_back({{mu, std::log(sigma)}, {0.5 * std::max(1.0, std::abs(mu)), 0.3}});
      break;
    }
    case Family::exponential: {
      const double lam = std::log1p(1.0 / excess);  // exact discrete MLE
      for (double f : {1.0, 0.1, 10.0, 0.5, 2.0}) out.push_back({{std::log(lam * f)}, {0.3}});
      break;
    }
    case Family::stretched_exp: {
      for (double beta : {1.0, 0.5, 0.2, 0.1, 0.8}) {
        const double mean_pow = simd::active().weighted_sum_exp(t.weights, t.log_values, beta) / t.n;
        const double gap = std::max(mean_pow - std::pow(xm, beta), 1e-6);
        out.push_back({{std::log(1.0 / gap), std::log(beta)}, {0.5, 0.3}});
      }
      break;
    }
    case Family::power_law_cutoff: {
      const double a = alpha_mle(x_min, t.n, t.sum_log).alpha;
      const double mean = t.sum_x / t.n;
      for (const auto& [alpha, lam] : {std::pair{a, 0.0}, std::pair{a, 0.01 / mean}, std::pair{a - 0.3, 0.1 / mean},
                                       std::pair{1.0, 1.0 / mean}, std::pair{0.5, 1.0 / mean}})
        out.push_back({{alpha, std::sqrt(lam)}, {0.1, 0.3 * std::sqrt(1.0 / mean)}});
      break;
    }
    case Family::power_law:
      throw std::invalid_argument("not an alternative family");
  }
  return out;
}

}  // namespace

double power_law_log_likelihood(double alpha, std::int64_t x_min, double n, double log_sum) {
  return -n * dist::log_hurwitz_zeta(alpha, x_min) - alpha * log_sum;
}

AlphaEstimate fit_alpha_given_xmin(const Sample& data, std::int64_t x_min) {
  const std::size_t j = data.lower_index(x_min);
  const double n = static_cast<double>(data.tail_count(j));
  if (n == 0.0) throw std::invalid_argument("no observations at or above x_min");
  return alpha_mle(x_min, n, data.tail_log_sum(j));
}

double alpha_approximation(const Sample& data, std::int64_t x_min) {
  const std::size_t j = data.lower_index(x_min);
  const double n = static_cast<double>(data.tail_count(j));
  if (n == 0.0) throw std::invalid_argument("no observations at or above x_min");
  const double shifted = data.tail_log_sum(j) - n * std::log(static_cast<double>(x_min) - 0.5);
  return 1.0 + n / shifted;
}

double ks_distance(const Sample& data, const DistParams& p) {
  return ks_from_index(data, data.lower_index(p.x_min), p);
}

double tail_log_likelihood(const Sample& data, const DistParams& p) {
  dist::validate(p);
  return kernel_sum(tail_stats(data, p.x_min), p) - static_cast<double>(data.tail_count(data.lower_index(p.x_min))) *
                                                        dist::log_normalization(p);
}

FitResult fit_powerlaw(const Sample& data, const FitConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("cannot fit an empty sample");
  if (data.distinct() < 2) throw std::invalid_argument("power-law fit needs at least two distinct values");
  const auto values = data.values();
  FitResult best;
  bool found = false;
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    const std::size_t n_tail = data.tail_count(j);
    if (n_tail < std::max<std::size_t>(cfg.min_tail, 1)) break;
    const auto est = alpha_mle(values[j], static_cast<double>(n_tail), data.tail_log_sum(j));
    const auto params = DistParams::power_law(est.alpha, values[j]);
    const double d = ks_from_index(data, j, params);
    if (!found || d < best.ks) {
      found = true;
      best.params = params;
      best.ks = d;
      best.n_tail = n_tail;
      best.log_likelihood = est.log_likelihood;
      best.degenerate = est.degenerate;
    }
  }
  if (!found) throw std::invalid_argument("no x_min candidate leaves enough tail observations");
  return best;
}

FitResult fit_alternative(const Sample& data, std::int64_t x_min, Family family) {
  if (family == Family::power_law) throw std::invalid_argument("use fit_powerlaw for the pure power law");
  const TailStats t = tail_stats(data, x_min);
  auto objective = [&](std::span<const double> th) { return -log_likelihood(t, decode(family, th, x_min)); };

  optimize::SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  std::vector<double> best_step;
  for (const auto& s : starts_for(family, t, x_min)) {
    auto r = optimize::nelder_mead_minimize(objective, s.theta, s.step);
    evaluations += r.evaluations;
    if (best.x.empty() || r.value < best.value) {
      best = std::move(r);
      best_step = s.step;
    }
  }
  // One restart from the winner guards against a collapsed simplex.
  auto polished = optimize::nelder_mead_minimize(objective, best.x, best_step);
  evaluations += polished.evaluations;
  if (polished.value <= best.value) best = std::move(polished);
  else best.converged = polished.converged && best.converged;

  FitResult out;
  out.params = decode(family, best.x, x_min);
  out.n_tail = static_cast<std::size_t>(t.n);
  out.log_likelihood = -best.value;
  out.converged = best.converged && std::isfinite(best.value);
  out.evaluations = evaluations;
  out.ks = std::isfinite(best.value) ? ks_from_index(data, t.index, out.params) : kNaN;
  return out;
}

Sample resample(const Sample& data, Rng& rng) {
  const auto values = data.values();
  const auto weights = data.weights();
  std::vector<std::uint64_t> cumulative(values.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < values.size(); ++i) cumulative[i] = total += static_cast<std::uint64_t>(weights[i]);
  std::vector<std::int64_t> counts(values.size(), 0);
  for (std::uint64_t k = 0; k < total; ++k) {
    const std::uint64_t u = uniform_below(rng, total);
    ++counts[static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin())];
  }
  return Sample::from_counts({values.begin(), values.end()}, std::move(counts));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

BootstrapResult bootstrap_ci(const Sample& data, const BootstrapConfig& cfg) {
  if (cfg.n_boot < 1) throw std::invalid_argument("bootstrap needs at least one replicate");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  constexpr int kMaxRetries = 10;
  BootstrapResult out;
  out.alphas.resize(static_cast<std::size_t>(cfg.n_boot));
  out.xmins.resize(static_cast<std::size_t>(cfg.n_boot));
  parallel_for(static_cast<std::size_t>(cfg.n_boot), cfg.threads, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    for (int attempt = 0;; ++attempt) {
      try {
        const FitResult f = fit_powerlaw(resample(data, rng), cfg.fit);
        out.alphas[r] = f.params.alpha;
        out.xmins[r] = static_cast<double>(f.params.x_min);
        return;
      } catch (const std::invalid_argument&) {
        if (attempt == kMaxRetries) throw std::runtime_error("bootstrap replicate failed after 10 redraws");
      }
    }
  });
  const double q = (1.0 - cfg.level) / 2.0;
  out.alpha_ci = {percentile(out.alphas, q), percentile(out.alphas, 1.0 - q)};
  out.xmin_ci = {percentile(out.xmins, q), percentile(out.xmins, 1.0 - q)};
  return out;
}

}  // namespace zipfit::fit
