#include "zipfit/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <istream>
#include <sstream>
#include <string>

namespace zipfit::compare {

using dist::Family;

std::string_view to_string(Favored f) {
  switch (f) {
    case Favored::power_law: return "power_law";
    case Favored::alternative: return "alternative";
    case Favored::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(SupportLabel s) {
  switch (s) {
    case SupportLabel::none: return "none";
    case SupportLabel::moderate: return "moderate";
    case SupportLabel::good: return "good";
    case SupportLabel::with_cutoff: return "with_cutoff";
  }
  return "?";
}

Favored favored_from_string(std::string_view name) {
  for (auto f : {Favored::power_law, Favored::alternative, Favored::inconclusive})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown favored value: " + std::string(name));
}

SupportLabel support_from_string(std::string_view name) {
  for (auto s : {SupportLabel::none, SupportLabel::moderate, SupportLabel::good, SupportLabel::with_cutoff})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown support label: " + std::string(name));
}

Favored favored_for(double lr, double p) {
  if (p < kSignificance && lr > 0.0) return Favored::power_law;
  if (p < kSignificance && lr < 0.0) return Favored::alternative;
  return Favored::inconclusive;
}

ComparisonResult make_comparison(Family alternative, double lr, double p) {
  return {alternative, lr, p, favored_for(lr, p), alternative == Family::power_law_cutoff};
}

double lr_pvalue(double lr, double sigma, double n, bool nested) {
  if (nested) return std::erfc(std::sqrt(std::abs(lr)));
  if (sigma > 0.0) return std::erfc(std::abs(lr) / (sigma * std::sqrt(2.0 * n)));
  return lr == 0.0 ? 1.0 : 0.0;
}

ComparisonResult loglikelihood_ratio(const Sample& data, const fit::FitResult& a, const fit::FitResult& b) {
  if (a.params.x_min != b.params.x_min) throw std::invalid_argument("compared fits must share x_min");
  const std::size_t j = data.lower_index(a.params.x_min);
  const double n = static_cast<double>(data.tail_count(j));
  if (n < 2.0) throw std::invalid_argument("likelihood ratio needs at least two tail observations");

  const dist::Distribution da(a.params);
  const dist::Distribution db(b.params);
  const auto values = data.values().subspan(j);
  const auto weights = data.weights().subspan(j);
  std::vector<double> d(values.size());
  double lr = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    d[i] = da.log_pmf(values[i]) - db.log_pmf(values[i]);
    lr += weights[i] * d[i];
  }
  const double mean = lr / n;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) var += weights[i] * (d[i] - mean) * (d[i] - mean);
  const double sigma = std::sqrt(var / n);

  const auto fa = a.params.family;
  const auto fb = b.params.family;
  const bool nested = (fa == Family::power_law && fb == Family::power_law_cutoff) ||
                      (fa == Family::power_law_cutoff && fb == Family::power_law);
  const double p = lr_pvalue(lr, sigma, n, nested);
  return {fb, lr, p, favored_for(lr, p), nested};
}

std::vector<ComparisonResult> compare_all(const Sample& data, const fit::FitResult& power_law,
                                          std::span<const fit::FitResult> alternatives) {
  std::vector<ComparisonResult> out;
  for (Family family : kAlternatives) {
    const auto it = std::find_if(alternatives.begin(), alternatives.end(),
                                 [&](const fit::FitResult& f) { return f.params.family == family; });
    if (it == alternatives.end())
      throw std::invalid_argument("missing alternative fit: " + std::string(dist::to_string(family)));
    out.push_back(loglikelihood_ratio(data, power_law, *it));
  }
  return out;
}

SupportLabel classify_support(double gof_p, std::span<const ComparisonResult> comparisons) {
  const auto cutoff = std::find_if(comparisons.begin(), comparisons.end(),
                                   [](const ComparisonResult& c) { return c.alternative == Family::power_law_cutoff; });
  if (cutoff == comparisons.end()) throw std::invalid_argument("support classification needs the cutoff comparison");
  if (cutoff->lr < 0.0 && cutoff->p < kSignificance) return SupportLabel::with_cutoff;
  if (gof_p > gof::kPlausibleThreshold) {
    const bool all_rejected = std::all_of(comparisons.begin(), comparisons.end(), [](const ComparisonResult& c) {
      return c.alternative == Family::power_law_cutoff || c.favored == Favored::power_law;
    });
    return all_rejected ? SupportLabel::good : SupportLabel::moderate;
  }
  return SupportLabel::none;
}

SupportLabel classify_support(const gof::GofResult& gof, std::span<const ComparisonResult> comparisons) {
  return classify_support(gof.p_value, comparisons);
}

std::vector<ReplayRow> read_replay_table(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("replay table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("replay table lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t label_col = column("label");
  const std::size_t gof_col = column("gof_p");
  std::vector<std::pair<std::size_t, std::size_t>> cols;
  for (Family f : kAlternatives) {
    const std::string name(dist::to_string(f));
    cols.emplace_back(column(name + "_lr"), column(name + "_p"));
  }

  std::vector<ReplayRow> rows;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size())
      throw std::runtime_error("replay table line " + std::to_string(lineno) + " has the wrong field count");
    auto num = [&](std::size_t c) {
      try {
        return std::stod(fields[c]);
      } catch (const std::exception&) {
        throw std::runtime_error("bad number on replay table line " + std::to_string(lineno));
      }
    };
    ReplayRow row{fields[label_col], num(gof_col), {}};
    for (std::size_t k = 0; k < cols.size(); ++k)
      row.comparisons.push_back(make_comparison(kAlternatives[k], num(cols[k].first), num(cols[k].second)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace zipfit::compare
