#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zipfit/dist.hpp"
#include "zipfit/fit.hpp"
#include "zipfit/gof.hpp"
#include "zipfit/sample.hpp"

namespace zipfit::compare {

inline constexpr double kSignificance = 0.10;

enum class Favored { power_law, alternative, inconclusive };
enum class SupportLabel { none, moderate, good, with_cutoff };

std::string_view to_string(Favored f);
std::string_view to_string(SupportLabel s);
Favored favored_from_string(std::string_view name);
SupportLabel support_from_string(std::string_view name);

struct ComparisonResult {
  dist::Family alternative = dist::Family::lognormal;
  double lr = 0.0;  // power law minus alternative
  double p = 1.0;
  Favored favored = Favored::inconclusive;
  bool nested = false;

  bool operator==(const ComparisonResult&) const = default;
};

/// POWER_LAW when lr > 0 and p < 0.10, ALTERNATIVE when lr < 0 and p < 0.10.
Favored favored_for(double lr, double p);

/// Builds a result from an already computed (lr, p) pair.
ComparisonResult make_comparison(dist::Family alternative, double lr, double p);

/// Significance of a log-likelihood ratio. Non-nested: erfc(|lr| / (sigma sqrt(2n)))
/// with sigma the standard deviation of the pointwise differences. Nested:
/// chi-square with one degree of freedom at 2|lr|.
double lr_pvalue(double lr, double sigma, double n, bool nested);

/// Pointwise likelihood ratio of model a against model b over the
/// observations >= x_min (shared by both). The result's `alternative` is b's
/// family. Throws std::invalid_argument on mismatched x_min or fewer than two
/// tail observations.
ComparisonResult loglikelihood_ratio(const Sample& data, const fit::FitResult& a, const fit::FitResult& b);

/// One comparison per alternative in the order lognormal, exponential,
/// stretched exponential, truncated power law.
std::vector<ComparisonResult> compare_all(const Sample& data, const fit::FitResult& power_law,
                                          std::span<const fit::FitResult> alternatives);

inline constexpr dist::Family kAlternatives[] = {dist::Family::lognormal, dist::Family::exponential,
                                                 dist::Family::stretched_exp, dist::Family::power_law_cutoff};

/// Throws std::invalid_argument when no cutoff comparison is present.
SupportLabel classify_support(double gof_p, std::span<const ComparisonResult> comparisons);
SupportLabel classify_support(const gof::GofResult& gof, std::span<const ComparisonResult> comparisons);

/// One row of recorded test outcomes: a GoF p-value and an (lr, p) pair per
/// alternative, as printed in a results table.
struct ReplayRow {
  std::string label;
  double gof_p = 0.0;
  std::vector<ComparisonResult> comparisons;
};

/// CSV with a header naming at least `label`, `gof_p` and `<family>_lr`,
/// `<family>_p` for each alternative family. Other columns are ignored.
std::vector<ReplayRow> read_replay_table(std::istream& in);

}  // namespace zipfit::compare
