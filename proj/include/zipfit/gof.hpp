#pragma once

#include <cstdint>

#include "zipfit/fit.hpp"
#include "zipfit/rng.hpp"
#include "zipfit/sample.hpp"

namespace zipfit::gof {

inline constexpr double kPlausibleThreshold = 0.10;

struct GofResult {
  double p_value = 0.0;
  double d_observed = 0.0;
  int n_boot = 0;
  int exceed = 0;  // replicates with D >= d_observed
  std::uint64_t seed = 0;
  bool plausible = false;

  bool operator==(const GofResult&) const = default;
};

struct GofConfig {
  int n_boot = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  fit::FitConfig fit;
};

/// Synthetic dataset of the same size: each point comes from the fitted
/// power law with probability n_tail/n, otherwise uniformly from the
/// observed points below x_min.
Sample semiparametric_resample(const Sample& data, const fit::FitResult& fit, Rng& rng);

/// Bootstrap p-value: fraction of replicates (each refitted over x_min and
/// alpha) whose KS distance is at least the observed one.
GofResult gof_pvalue(const Sample& data, const fit::FitResult& fit, const GofConfig& cfg);

}  // namespace zipfit::gof
