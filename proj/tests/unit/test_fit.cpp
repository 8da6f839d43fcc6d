#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "../support/oracles.hpp"
#include "zipfit/fit.hpp"
#include "zipfit/optimize.hpp"

using namespace zipfit;
using namespace zipfit::fit;
using dist::DistParams;
using dist::Family;

namespace {

Sample sample_of(std::vector<std::int64_t> v) { return Sample(v); }

std::vector<std::int64_t> geometric(double q, std::int64_t x_min, std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = x_min + static_cast<std::int64_t>(std::floor(std::log1p(-u(g)) / std::log(q)));
  return out;
}

template <class Sampler>
std::vector<std::int64_t> draw(const Sampler& s, std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = s(g);
  return out;
}

}  // namespace

TEST(Optimize, GoldenSectionFindsParabolaPeak) {
  const auto r = optimize::golden_section_maximize([](double x) { return -(x - 2.3) * (x - 2.3); }, 1.0, 10.0, 1e-8);
  EXPECT_NEAR(r.x, 2.3, 1e-7);
}

TEST(Optimize, NelderMeadRosenbrock) {
  auto f = [](std::span<const double> x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); };
  const std::vector<double> step = {0.5, 0.5};
  const auto r = optimize::nelder_mead_minimize(f, {-1.2, 1.0}, step, {1e-14, 10000});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
  EXPECT_NEAR(r.x[1], 1.0, 2e-3);
}

TEST(Optimize, NelderMeadReportsBudgetExhaustion) {
  auto f = [](std::span<const double> x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); };
  const std::vector<double> step = {0.5, 0.5};
  const auto r = optimize::nelder_mead_minimize(f, {-1.2, 1.0}, step, {1e-14, 10});
  EXPECT_FALSE(r.converged);
  EXPECT_GE(r.evaluations, 10);
}

TEST(Optimize, NelderMeadTreatsNanAsInfeasible) {
  auto f = [](std::span<const double> x) { return x[0] < 0.0 ? std::nan("") : (x[0] - 1.0) * (x[0] - 1.0); };
  const std::vector<double> step = {2.0};
  const auto r = optimize::nelder_mead_minimize(f, {0.3}, step);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-3);
}

TEST(AlphaApproximation, HandValues) {
  EXPECT_NEAR(alpha_approximation(sample_of({1, 1, 1, 1}), 1), 1.0 + 1.0 / std::log(2.0), 1e-12);
  EXPECT_NEAR(alpha_approximation(sample_of({1, 1, 1, 1}), 1), 2.4427, 5e-5);
  EXPECT_NEAR(alpha_approximation(sample_of({5, 5, 5, 5}), 5), 1.0 + 1.0 / std::log(5.0 / 4.5), 1e-12);
  EXPECT_NEAR(alpha_approximation(sample_of({5, 5, 5, 5}), 5), 10.4912, 5e-5);
}

TEST(AlphaMle, PinnedAtBoundIsDegenerate) {
  const auto est = fit_alpha_given_xmin(sample_of({5, 5, 5, 5}), 5);
  EXPECT_TRUE(est.degenerate);
  EXPECT_NEAR(est.alpha, kAlphaUpper, 1e-5);
}

TEST(AlphaMle, EmptyTailThrows) {
  EXPECT_THROW(fit_alpha_given_xmin(sample_of({1, 2, 3}), 4), std::invalid_argument);
  EXPECT_THROW(alpha_approximation(sample_of({1, 2, 3}), 4), std::invalid_argument);
}

TEST(AlphaMle, RecoversExponentOnLargeSample) {
  const Sample s(dist::sample_powerlaw(2.5, 1, 100000, 11u));
  const auto est = fit_alpha_given_xmin(s, 1);
  EXPECT_GE(est.alpha, 2.45);
  EXPECT_LE(est.alpha, 2.55);
  EXPECT_FALSE(est.degenerate);
}

TEST(AlphaMle, LocalOptimalityProbe) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Sample s(dist::sample_powerlaw(1.4 + 0.3 * seed, seed, 3000, seed));
    const std::int64_t x_min = s.min();
    const auto est = fit_alpha_given_xmin(s, x_min);
    const double n = static_cast<double>(s.size());
    const double log_sum = s.tail_log_sum(0);
    for (double d : {-0.01, 0.01}) {
      // Likelihood written out with the GSL zeta.
      const double a = est.alpha + d;
      const double ll = -n * std::log(oracle::hzeta(a, x_min)) - a * log_sum;
      EXPECT_GE(est.log_likelihood, ll) << seed;
    }
  }
}

TEST(AlphaMle, ExactAndApproximationAgree) {
  const std::pair<double, std::int64_t> cases[] = {{2.0, 2}, {2.0, 5}, {2.0, 20}, {2.5, 5}, {2.5, 20}, {3.0, 10}};
  for (auto [alpha, x_min] : cases) {
    const Sample s(dist::sample_powerlaw(alpha, x_min, 20000, static_cast<std::uint64_t>(x_min)));
    EXPECT_LE(std::abs(fit_alpha_given_xmin(s, x_min).alpha - alpha_approximation(s, x_min)), 0.05)
        << alpha << " " << x_min;
  }
}

TEST(AlphaMle, ApproximationBiasAtSmallXmin) {
  // Large-n limit of the approximation at alpha = 2.5, x_min = 2 is about
  // 2.372, from E[ln(x / 1.5)] summed to convergence.
  const Sample s(dist::sample_powerlaw(2.5, 2, 200000, 3u));
  const double gap = alpha_approximation(s, 2) - fit_alpha_given_xmin(s, 2).alpha;
  EXPECT_NEAR(gap, -0.128, 0.01);
}

TEST(KsDistance, HandOracle) {
  const double c = 6.0 / (std::numbers::pi * std::numbers::pi);
  const double f1 = c, f2 = c * 1.25, f4 = c * (1.25 + 1.0 / 9.0 + 1.0 / 16.0);
  const double want = std::max({std::abs(0.5 - f1), std::abs(0.75 - f2), std::abs(1.0 - f4)});
  const double d = ks_distance(sample_of({1, 1, 2, 4}), DistParams::power_law(2.0, 1));
  EXPECT_NEAR(d, want, 1e-12);
  EXPECT_NEAR(d, 0.1345, 5e-4);
}

TEST(KsDistance, ZeroWhenCdfsCoincide) {
  // At alpha = 40 the mass beyond x_min is ~1e-12, so a sample sitting at
  // x_min matches the model CDF at every observed point.
  EXPECT_LT(ks_distance(sample_of({1, 1, 1, 1, 1}), DistParams::power_law(40.0, 1)), 1e-11);
}

TEST(KsDistance, AlwaysInUnitInterval) {
  std::mt19937_64 g(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int64_t> v(1 + g() % 50);
    for (auto& x : v) x = 1 + static_cast<std::int64_t>(g() % 100);
    const Sample s(v);
    const double alpha = 1.05 + 0.1 * static_cast<double>(g() % 60);
    const double d = ks_distance(s, DistParams::power_law(alpha, s.min()));
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
  EXPECT_THROW(ks_distance(sample_of({1, 2}), DistParams::power_law(2.0, 3)), std::invalid_argument);
}

TEST(FitPowerLaw, SingleValueIsAnError) {
  EXPECT_THROW(fit_powerlaw(sample_of(std::vector<std::int64_t>(100, 7))), std::invalid_argument);
}

TEST(FitPowerLaw, NoCandidateWithEnoughTailIsAnError) {
  EXPECT_THROW(fit_powerlaw(sample_of({1, 2, 3, 4, 5}), {10}), std::invalid_argument);
}

TEST(FitPowerLaw, RespectsTailFloorAndReportsFields) {
  const Sample s(dist::sample_powerlaw(2.0, 1, 5000, 3u));
  const auto f = fit_powerlaw(s, {50});
  EXPECT_GE(f.n_tail, 50u);
  EXPECT_EQ(f.params.family, Family::power_law);
  EXPECT_EQ(f.n_tail, s.tail_count(s.lower_index(f.params.x_min)));
  EXPECT_NEAR(f.ks, ks_distance(s, f.params), 1e-15);
  EXPECT_NEAR(f.log_likelihood, tail_log_likelihood(s, f.params), 1e-8 * std::abs(f.log_likelihood));
  EXPECT_FALSE(f.alpha_ci.has_value());
}

TEST(FitPowerLaw, ScanPicksMinimalKsWithSmallestTie) {
  const Sample s(dist::sample_powerlaw(2.2, 1, 3000, 17u));
  const auto f = fit_powerlaw(s, {10});
  for (std::size_t j = 0; j + 1 < s.distinct() && s.tail_count(j) >= 10; ++j) {
    const auto x_min = s.values()[j];
    const double d = ks_distance(s, DistParams::power_law(fit_alpha_given_xmin(s, x_min).alpha, x_min));
    if (x_min < f.params.x_min) EXPECT_GT(d, f.ks);
    else EXPECT_GE(d, f.ks);
  }
}

TEST(FitPowerLaw, PermutationInvariant) {
  auto v = dist::sample_powerlaw(2.0, 2, 4000, 21u);
  const auto a = fit_powerlaw(Sample(v));
  std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
  EXPECT_EQ(fit_powerlaw(Sample(v)), a);
}

TEST(FitAlternative, ExponentialOnGeometricData) {
  const Sample s(geometric(0.5, 1, 100000, 9));
  const auto f = fit_alternative(s, 1, Family::exponential);
  EXPECT_TRUE(f.converged);
  EXPECT_GE(f.params.lambda, 0.68);
  EXPECT_LE(f.params.lambda, 0.71);
}

TEST(FitAlternative, LognormalRecovery) {
  const auto sampler = oracle::kernel_sampler([](double x) { return oracle::k_lognormal(x, 2.0, 1.0); }, 1, 200000);
  const Sample s(draw(sampler, 20000, 4));
  const auto f = fit_alternative(s, 1, Family::lognormal);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.params.mu, 2.0, 0.05);
  EXPECT_NEAR(f.params.sigma, 1.0, 0.03);
}

TEST(FitAlternative, StretchedRecovery) {
  const auto sampler = oracle::kernel_sampler([](double x) { return oracle::k_stretched(x, 0.8, 0.5); }, 1, 200000);
  const Sample s(draw(sampler, 20000, 5));
  const auto f = fit_alternative(s, 1, Family::stretched_exp);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.params.beta, 0.5, 0.03);
  EXPECT_NEAR(f.params.lambda, 0.8, 0.05);
}

TEST(FitAlternative, CutoffRecovery) {
  const auto sampler = oracle::kernel_sampler([](double x) { return oracle::k_cutoff(x, 1.5, 0.01); }, 1, 20000);
  const Sample s(draw(sampler, 50000, 6));
  const auto f = fit_alternative(s, 1, Family::power_law_cutoff);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.params.alpha, 1.5, 0.03);
  EXPECT_NEAR(f.params.lambda, 0.01, 0.002);
}

TEST(FitAlternative, CutoffNeverWorseThanPowerLaw) {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Sample s(dist::sample_powerlaw(1.8 + 0.2 * seed, 1, 3000, seed + 100));
    const auto pl = fit_powerlaw(s);
    const auto cut = fit_alternative(s, pl.params.x_min, Family::power_law_cutoff);
    EXPECT_GE(cut.log_likelihood, pl.log_likelihood - 1e-6) << seed;
  }
}

TEST(FitAlternative, LikelihoodMatchesDirectSum) {
  const Sample s(dist::sample_powerlaw(2.0, 1, 2000, 8u));
  for (Family fam : {Family::lognormal, Family::exponential, Family::stretched_exp, Family::power_law_cutoff}) {
    const auto f = fit_alternative(s, 3, fam);
    const dist::Distribution d(f.params);
    double ll = 0.0;
    for (auto x : s.expand())
      if (x >= 3) ll += d.log_pmf(x);
    EXPECT_NEAR(f.log_likelihood, ll, 1e-8 * std::abs(ll)) << dist::to_string(fam);
    EXPECT_EQ(f.n_tail, s.tail_count(s.lower_index(3)));
  }
  EXPECT_THROW(fit_alternative(s, 3, Family::power_law), std::invalid_argument);
}

TEST(Percentile, TypeSevenInterpolation) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(percentile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 1.0), 4.0);
  // 21 replicates: the 97.5% point sits 0.5 of the way between the top two.
  std::vector<double> v(19, 2.0);
  v.push_back(15.0);
  v.push_back(17.1);
  EXPECT_NEAR(percentile(v, 0.975), 16.05, 1e-12);
  EXPECT_THROW(percentile({}, 0.5), std::invalid_argument);
}

TEST(Percentile, ConstantReplicatesCollapseToPoint) {
  const std::vector<double> same(1000, 3.0);
  EXPECT_EQ(percentile(same, 0.025), 3.0);
  EXPECT_EQ(percentile(same, 0.975), 3.0);
}

TEST(Resample, SameSizeAndSupport) {
  const Sample s(dist::sample_powerlaw(2.0, 1, 1000, 1u));
  Rng rng(3);
  const Sample r = resample(s, rng);
  EXPECT_EQ(r.size(), s.size());
  for (auto x : r.values()) EXPECT_TRUE(std::binary_search(s.values().begin(), s.values().end(), x));
}

TEST(Bootstrap, DeterministicAndThreadInvariant) {
  const Sample s(dist::sample_powerlaw(2.3, 1, 2000, 31u));
  BootstrapConfig cfg;
  cfg.n_boot = 60;
  cfg.seed = 77;
  cfg.threads = 1;
  const auto a = bootstrap_ci(s, cfg);
  cfg.threads = 4;
  const auto b = bootstrap_ci(s, cfg);
  EXPECT_EQ(a.alphas, b.alphas);
  EXPECT_EQ(a.xmins, b.xmins);
  EXPECT_EQ(a.alpha_ci, b.alpha_ci);
  cfg.seed = 78;
  EXPECT_NE(bootstrap_ci(s, cfg).alphas, a.alphas);
}

TEST(Bootstrap, IntervalContainsPointEstimate) {
  const Sample s(dist::sample_powerlaw(2.5, 1, 5000, 41u));
  const auto f = fit_powerlaw(s);
  BootstrapConfig cfg;
  cfg.n_boot = 200;
  cfg.seed = 5;
  const auto ci = bootstrap_ci(s, cfg);
  EXPECT_LE(ci.alpha_ci.low, f.params.alpha);
  EXPECT_GE(ci.alpha_ci.high, f.params.alpha);
  EXPECT_LE(ci.xmin_ci.low, ci.xmin_ci.high);
}

TEST(Bootstrap, AllEqualDataHasNoFit) {
  BootstrapConfig cfg;
  cfg.n_boot = 5;
  EXPECT_THROW(bootstrap_ci(sample_of(std::vector<std::int64_t>(50, 4)), cfg), std::runtime_error);
}
