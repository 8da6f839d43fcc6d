#include "zipfit/gof.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "zipfit/parallel.hpp"

namespace zipfit::gof {

namespace {

Sample draw(const Sample& data, const dist::PowerLawSampler& sampler, Rng& rng) {
  const std::size_t body_end = data.lower_index(sampler.x_min());
  const auto values = data.values();
  const auto weights = data.weights();
  std::vector<std::uint64_t> cumulative(body_end);
  std::uint64_t n_body = 0;
  for (std::size_t i = 0; i < body_end; ++i) cumulative[i] = n_body += static_cast<std::uint64_t>(weights[i]);

  const std::size_t n = data.size();
  const double tail_fraction = static_cast<double>(n - n_body) / static_cast<double>(n);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) {
    if (n_body == 0 || uniform01(rng) < tail_fraction) {
      x = sampler(rng);
    } else {
      const std::uint64_t u = uniform_below(rng, n_body);
      x = values[static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                          cumulative.begin())];
    }
  }
  return Sample(out);
}

}  // namespace

Sample semiparametric_resample(const Sample& data, const fit::FitResult& fit, Rng& rng) {
  return draw(data, dist::PowerLawSampler(fit.params.alpha, fit.params.x_min), rng);
}

GofResult gof_pvalue(const Sample& data, const fit::FitResult& fit, const GofConfig& cfg) {
  if (cfg.n_boot < 1) throw std::invalid_argument("goodness-of-fit needs at least one replicate");
  constexpr int kMaxRetries = 10;
  const dist::PowerLawSampler sampler(fit.params.alpha, fit.params.x_min);
  std::vector<double> distances(static_cast<std::size_t>(cfg.n_boot));
  parallel_for(distances.size(), cfg.threads, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    for (int attempt = 0;; ++attempt) {
      try {
        distances[r] = fit::fit_powerlaw(draw(data, sampler, rng), cfg.fit).ks;
        return;
      } catch (const std::invalid_argument&) {
        if (attempt == kMaxRetries) throw std::runtime_error("goodness-of-fit replicate failed after 10 redraws");
      }
    }
  });

  GofResult out;
  out.d_observed = fit.ks;
  out.n_boot = cfg.n_boot;
  out.seed = cfg.seed;
  out.exceed = static_cast<int>(std::count_if(distances.begin(), distances.end(),
                                              [&](double d) { return d >= fit.ks; }));
  out.p_value = static_cast<double>(out.exceed) / static_cast<double>(cfg.n_boot);
  out.plausible = out.p_value > kPlausibleThreshold;
  return out;
}

}  // namespace zipfit::gof
