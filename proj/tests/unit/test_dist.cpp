#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "../support/oracles.hpp"
#include "zipfit/dist.hpp"
#include "zipfit/simd/kernels.hpp"

using namespace zipfit;
using namespace zipfit::dist;

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

TEST(HurwitzZeta, MatchesGslAcrossGrid) {
  for (double s : {1.01, 1.1, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0, 30.0}) {
    for (std::int64_t a : {1, 2, 3, 10, 100, 10000, 1000000}) {
      const double want = oracle::hzeta(s, a);
      EXPECT_NEAR(hurwitz_zeta(s, a) / want, 1.0, 1e-12) << "s=" << s << " a=" << a;
    }
  }
}

TEST(HurwitzZeta, ZetaTwoIsPiSquaredOverSix) { EXPECT_NEAR(hurwitz_zeta(2.0, 1), kPi2Over6, 1e-15); }

TEST(HurwitzZeta, LogFormSurvivesUnderflow) {
  // 1e6^-300 underflows a double; the log form must not. Reference: the
  // leading Euler-Maclaurin terms, exact to ~1e-12 here.
  const double s = 300.0, a = 1e6;
  const double want = -s * std::log(a) + std::log(a / (s - 1.0) + 0.5 + s / (12.0 * a));
  EXPECT_NEAR(log_hurwitz_zeta(s, 1000000), want, 1e-10);
}

TEST(HurwitzZeta, RejectsDomain) {
  EXPECT_THROW(log_hurwitz_zeta(1.0, 1), std::domain_error);
  EXPECT_THROW(log_hurwitz_zeta(2.0, 0), std::domain_error);
}

TEST(LogPmf, PowerLawAlphaTwoAtOne) {
  EXPECT_NEAR(log_pmf(DistParams::power_law(2.0, 1), 1), std::log(6.0 / (std::numbers::pi * std::numbers::pi)), 1e-14);
  EXPECT_NEAR(log_pmf(DistParams::power_law(2.0, 1), 1), -0.4977, 5e-5);
}

TEST(LogPmf, ExponentialAtMinimumIsGeometricMass) {
  for (double lambda : {0.01, 0.3, 1.0, 4.0}) {
    EXPECT_NEAR(log_pmf(DistParams::exponential(lambda, 1), 1), std::log(-std::expm1(-lambda)), 1e-13) << lambda;
  }
}

TEST(LogPmf, ErrorsBelowSupportAndForDivergentPowerLaw) {
  EXPECT_THROW(log_pmf(DistParams::power_law(2.0, 3), 2), std::domain_error);
  EXPECT_THROW(log_pmf(DistParams::power_law(1.0, 1), 1), std::domain_error);
  EXPECT_THROW(log_pmf(DistParams::power_law(0.5, 1), 4), std::domain_error);
  EXPECT_THROW(log_pmf(DistParams::lognormal(0.0, 0.0, 1), 4), std::domain_error);
}

TEST(Normalization, ClosedForms) {
  EXPECT_NEAR(normalization_constant(DistParams::power_law(2.0, 1)), 1.644934, 1e-6);
  EXPECT_NEAR(normalization_constant(DistParams::exponential(1.0, 1)), 0.581977, 1e-6);
  EXPECT_NEAR(normalization_constant(DistParams::exponential(1.0, 1)), std::exp(-1.0) / (1.0 - std::exp(-1.0)), 1e-15);
}

TEST(Normalization, CutoffWithZeroRateEqualsPowerLaw) {
  for (double alpha : {1.2, 2.0, 3.5}) {
    for (std::int64_t x_min : {1, 7, 300}) {
      EXPECT_DOUBLE_EQ(log_normalization(DistParams::power_law_cutoff(alpha, 0.0, x_min)),
                       log_normalization(DistParams::power_law(alpha, x_min)));
    }
  }
}

namespace {

// Brute force to `to` plus a tail that is negligible for the chosen params.
double brute_log_z(const std::function<double(double)>& logk, std::int64_t x_min, std::int64_t to) {
  double shift = -INFINITY;
  for (std::int64_t x = x_min; x <= std::min<std::int64_t>(to, x_min + 100000); ++x)
    shift = std::max(shift, logk(static_cast<double>(x)));
  return shift + std::log(static_cast<double>(oracle::brute_sum(logk, x_min, to, shift)));
}

}  // namespace

TEST(Normalization, MatchesBruteForceForLightTails) {
  struct Case {
    DistParams p;
    std::function<double(double)> k;
  };
  const std::vector<Case> cases = {
      {DistParams::power_law_cutoff(1.5, 0.01, 1), [](double x) { return oracle::k_cutoff(x, 1.5, 0.01); }},
      {DistParams::power_law_cutoff(0.7, 0.002, 5), [](double x) { return oracle::k_cutoff(x, 0.7, 0.002); }},
      {DistParams::exponential(0.05, 3), [](double x) { return oracle::k_exponential(x, 0.05); }},
      {DistParams::stretched_exp(0.5, 0.5, 1), [](double x) { return oracle::k_stretched(x, 0.5, 0.5); }},
      {DistParams::stretched_exp(0.2, 1.3, 10), [](double x) { return oracle::k_stretched(x, 0.2, 1.3); }},
      {DistParams::lognormal(1.0, 0.8, 1), [](double x) { return oracle::k_lognormal(x, 1.0, 0.8); }},
      {DistParams::lognormal(4.0, 0.3, 20), [](double x) { return oracle::k_lognormal(x, 4.0, 0.3); }},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(log_normalization(c.p), brute_log_z(c.k, c.p.x_min, 2000000), 1e-11) << to_string(c.p.family);
  }
}

TEST(Normalization, AgreesBetweenKernelVariants) {
  if (simd::avx2_table() == nullptr) GTEST_SKIP();
  const std::vector<DistParams> ps = {DistParams::power_law(1.7, 3), DistParams::power_law_cutoff(1.2, 1e-4, 2),
                                      DistParams::lognormal(-3.0, 2.5, 1), DistParams::stretched_exp(0.3, 0.4, 4)};
  for (const auto& p : ps) {
    simd::select(simd::Isa::scalar);
    const double a = log_normalization(p);
    simd::select(simd::Isa::avx2);
    const double b = log_normalization(p);
    EXPECT_NEAR(a, b, 1e-12) << to_string(p.family);
  }
}

TEST(Nesting, TinyCutoffApproachesPowerLaw) {
  for (double alpha : {1.7, 2.0, 2.5, 3.5}) {
    const auto pl = DistParams::power_law(alpha, 2);
    const auto cut = DistParams::power_law_cutoff(alpha, 1e-12, 2);
    for (std::int64_t x : {2, 3, 10, 1000, 100000}) EXPECT_NEAR(log_pmf(cut, x), log_pmf(pl, x), 1e-6) << x;
  }
}

// Close to alpha = 1 a small cutoff moves Z by order lambda^(alpha-1):
// Z(lambda) = zeta(alpha, x_min) + Gamma(1-alpha) lambda^(alpha-1) + O(lambda).
TEST(Nesting, SmallRateExpansionNearAlphaOne) {
  for (double alpha : {1.1, 1.3, 1.5}) {
    for (double lambda : {1e-14, 1e-12, 1e-10, 1e-8}) {
      const std::int64_t x_min = 2;
      const double z = oracle::hzeta(alpha, x_min);
      const double want = std::log(z + std::tgamma(1.0 - alpha) * std::pow(lambda, alpha - 1.0));
      // The O(lambda) term is lambda * zeta(alpha - 1, 2), of order 3 lambda here.
      EXPECT_NEAR(log_normalization(DistParams::power_law_cutoff(alpha, lambda, x_min)), want, 1e-9 + 10.0 * lambda)
          << alpha << " " << lambda;
    }
  }
}

TEST(Ccdf, OneAtMinimumAndHandValue) {
  EXPECT_EQ(ccdf(DistParams::power_law(2.0, 1), 1), 1.0);
  EXPECT_NEAR(ccdf(DistParams::power_law(2.0, 1), 2), 1.0 - 6.0 / (std::numbers::pi * std::numbers::pi), 1e-14);
  EXPECT_NEAR(ccdf(DistParams::power_law(2.0, 1), 2), 0.39207, 5e-6);
  EXPECT_EQ(ccdf(DistParams::lognormal(1.0, 2.0, 9), 9), 1.0);
  EXPECT_THROW(ccdf(DistParams::power_law(2.0, 3), 1), std::domain_error);
}

TEST(Ccdf, BatchMatchesPointwiseAcrossGaps) {
  const std::vector<std::int64_t> xs = {4, 4, 5, 6, 9, 30, 31, 500, 3000, 3001, 9000, 100000, 2000000};
  const std::vector<DistParams> ps = {DistParams::power_law(1.8, 4), DistParams::power_law_cutoff(1.4, 1e-5, 4),
                                      DistParams::exponential(0.001, 4), DistParams::lognormal(2.0, 2.0, 4),
                                      DistParams::stretched_exp(0.4, 0.3, 4)};
  for (const auto& p : ps) {
    const auto batch = ccdf_at(p, xs);
    double prev = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double one = ccdf(p, xs[i]);
      EXPECT_NEAR(batch[i], one, 1e-12 + 1e-10 * one) << to_string(p.family) << " x=" << xs[i];
      EXPECT_LE(batch[i], prev);
      prev = batch[i];
    }
  }
}

TEST(Ccdf, BatchRejectsUnsortedOrBelowSupport) {
  const std::vector<std::int64_t> unsorted = {5, 4};
  const std::vector<std::int64_t> below = {1, 5};
  EXPECT_THROW(ccdf_at(DistParams::power_law(2.0, 2), unsorted), std::invalid_argument);
  EXPECT_THROW(ccdf_at(DistParams::power_law(2.0, 2), below), std::domain_error);
}

TEST(Sampler, InvertsAtTheExactBoundary) {
  const double alpha = 2.2;
  const std::int64_t x_min = 3;
  const PowerLawSampler s(alpha, x_min);
  const double z = oracle::hzeta(alpha, x_min);
  auto surv = [&](std::int64_t x) { return oracle::hzeta(alpha, x) / z; };
  for (std::int64_t x : {3, 4, 5, 50, 2049, 2050, 2051, 5000, 100000, 10000000}) {
    const double s_next = surv(x + 1);
    // Slightly above P(X >= x+1) the answer is x; slightly below it is beyond x.
    EXPECT_EQ(s.invert(s_next * (1.0 + 1e-9)), x) << x;
    EXPECT_GT(s.invert(s_next * (1.0 - 1e-9)), x) << x;
  }
}

TEST(Sampler, SmallestUniformGivesMinimum) {
  const PowerLawSampler s(2.5, 7);
  EXPECT_EQ(s.invert(1.0), 7);
  EXPECT_EQ(s.invert(std::nextafter(1.0, 0.0)), 7);
}

TEST(Sampler, DeterministicForSeed) {
  EXPECT_EQ(sample_powerlaw(2.5, 1, 1000, 42u), sample_powerlaw(2.5, 1, 1000, 42u));
  EXPECT_NE(sample_powerlaw(2.5, 1, 1000, 42u), sample_powerlaw(2.5, 1, 1000, 43u));
  EXPECT_THROW(sample_powerlaw(1.0, 1, 10, 1u), std::domain_error);
}

TEST(Sampler, MeanLogWithinThreeStandardErrors) {
  const double alpha = 2.5;
  // E[ln X] and E[(ln X)^2] by brute force to 1e6 plus the continuous tail.
  const double z = oracle::hzeta(alpha, 1);
  long double m1 = 0.0L, m2 = 0.0L;
  const std::int64_t n_terms = 1000000;
  for (std::int64_t x = n_terms; x >= 1; --x) {
    const double l = std::log(static_cast<double>(x));
    const double p = std::pow(static_cast<double>(x), -alpha) / z;
    m1 += p * l;
    m2 += p * l * l;
  }
  const double m = n_terms + 0.5, lm = std::log(m), a1 = alpha - 1.0;
  m1 += std::pow(m, -a1) * (lm / a1 + 1.0 / (a1 * a1)) / z;
  m2 += std::pow(m, -a1) * (lm * lm / a1 + 2.0 * lm / (a1 * a1) + 2.0 / (a1 * a1 * a1)) / z;
  const double mean = static_cast<double>(m1);
  const double sd = std::sqrt(static_cast<double>(m2) - mean * mean);

  const std::size_t n = 100000;
  const auto xs = sample_powerlaw(alpha, 1, n, 2024u);
  double acc = 0.0;
  for (auto x : xs) acc += std::log(static_cast<double>(x));
  EXPECT_NEAR(acc / n, mean, 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Sampler, ChiSquareOnHeadBins) {
  const double alpha = 2.5;
  const std::int64_t x_min = 1;
  const std::size_t n = 100000;
  const auto xs = sample_powerlaw(alpha, x_min, n, 7u);
  std::vector<double> observed(22, 0.0);
  for (auto x : xs) observed[static_cast<std::size_t>(std::min<std::int64_t>(x - x_min, 21))] += 1.0;
  const double z = oracle::hzeta(alpha, x_min);
  double stat = 0.0, head = 0.0;
  for (int i = 0; i < 21; ++i) {
    const double p = std::pow(static_cast<double>(x_min + i), -alpha) / z;
    head += p;
    stat += std::pow(observed[i] - n * p, 2) / (n * p);
  }
  const double tail = 1.0 - head;
  stat += std::pow(observed[21] - n * tail, 2) / (n * tail);
  EXPECT_GT(oracle::chisq_q(stat, 21.0), 0.01);
}

TEST(EmpiricalCcdf, HandExamples) {
  const std::vector<std::int64_t> a = {1, 1, 2, 4};
  const std::vector<CcdfPoint> want = {{1, 1.0}, {2, 0.5}, {4, 0.25}};
  EXPECT_EQ(empirical_ccdf(a), want);
  const std::vector<std::int64_t> b = {7};
  EXPECT_EQ(empirical_ccdf(b), (std::vector<CcdfPoint>{{7, 1.0}}));
  EXPECT_THROW(empirical_ccdf(std::vector<std::int64_t>{}), std::invalid_argument);
}

TEST(EmpiricalCcdf, NonIncreasing) {
  const auto xs = sample_powerlaw(1.9, 2, 5000, 99u);
  const auto pts = empirical_ccdf(xs);
  EXPECT_EQ(pts.front().ccdf, 1.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_LT(pts[i].ccdf, pts[i - 1].ccdf);
    EXPECT_GT(pts[i].x, pts[i - 1].x);
  }
}

TEST(Family, NamesRoundTrip) {
  for (Family f : {Family::power_law, Family::power_law_cutoff, Family::lognormal, Family::exponential,
                   Family::stretched_exp})
    EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_THROW(family_from_string("gamma"), std::invalid_argument);
}
