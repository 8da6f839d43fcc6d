#include "zipfit/sample.hpp"

#include <algorithm>
#include <stdexcept>

#include "zipfit/simd/kernels.hpp"

namespace zipfit {

Sample::Sample(std::span<const std::int64_t> data) {
  if (data.empty()) throw std::invalid_argument("sample is empty");
  std::vector<std::int64_t> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw std::invalid_argument("sample values must be positive integers");
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    values_.push_back(sorted[i]);
    weights_.push_back(static_cast<double>(j - i));
    i = j;
  }
  finish();
}

Sample Sample::from_counts(std::vector<std::int64_t> values, std::vector<std::int64_t> counts) {
  if (values.size() != counts.size()) throw std::invalid_argument("values and counts differ in length");
  Sample s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (counts[i] < 0) throw std::invalid_argument("negative multiplicity");
    if (counts[i] == 0) continue;
    if (values[i] < 1) throw std::invalid_argument("sample values must be positive integers");
    if (!s.values_.empty() && values[i] <= s.values_.back())
      throw std::invalid_argument("values must be strictly ascending");
    s.values_.push_back(values[i]);
    s.weights_.push_back(static_cast<double>(counts[i]));
  }
  if (s.values_.empty()) throw std::invalid_argument("sample is empty");
  s.finish();
  return s;
}

void Sample::finish() {
  const std::size_t n = values_.size();
  std::vector<double> xs(values_.begin(), values_.end());
  log_values_.resize(n);
  simd::active().log(xs, log_values_);
  suffix_count_.assign(n + 1, 0);
  suffix_log_.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    suffix_count_[i] = suffix_count_[i + 1] + static_cast<std::size_t>(weights_[i]);
    suffix_log_[i] = suffix_log_[i + 1] + weights_[i] * log_values_[i];
  }
  total_ = suffix_count_[0];
}

std::size_t Sample::lower_index(std::int64_t x) const {
  return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), x) - values_.begin());
}

Sample Sample::tail(std::int64_t x_min) const {
  const std::size_t j = lower_index(x_min);
  Sample s;
  s.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(j), values_.end());
  s.weights_.assign(weights_.begin() + static_cast<std::ptrdiff_t>(j), weights_.end());
  s.finish();
  return s;
}

std::vector<std::int64_t> Sample::expand() const {
  std::vector<std::int64_t> out;
  out.reserve(total_);
  for (std::size_t i = 0; i < values_.size(); ++i)
    out.insert(out.end(), static_cast<std::size_t>(weights_[i]), values_[i]);
  return out;
}

}  // namespace zipfit
