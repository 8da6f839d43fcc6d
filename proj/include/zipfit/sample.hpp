#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace zipfit {

/// An integer multiset stored as ascending distinct values with their
/// multiplicities. Word-frequency data repeats small values heavily, so all
/// likelihood and KS work runs over the distinct values with counts as
/// weights. Suffix sums make any tail x >= x_min an O(1) view.
class Sample {
 public:
  Sample() = default;
  /// Throws std::invalid_argument if data is empty or holds a value < 1.
  explicit Sample(std::span<const std::int64_t> data);
  static Sample from_counts(std::vector<std::int64_t> values, std::vector<std::int64_t> counts);

  std::size_t size() const { return total_; }
  std::size_t distinct() const { return values_.size(); }
  bool empty() const { return total_ == 0; }

  std::span<const std::int64_t> values() const { return values_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> log_values() const { return log_values_; }

  std::int64_t min() const { return values_.front(); }
  std::int64_t max() const { return values_.back(); }

  /// Index of the first distinct value >= x (distinct() if none).
  std::size_t lower_index(std::int64_t x) const;

  /// Number of observations in distinct values [index, end).
  std::size_t tail_count(std::size_t index) const { return suffix_count_[index]; }
  /// Sum of ln x over observations in distinct values [index, end).
  double tail_log_sum(std::size_t index) const { return suffix_log_[index]; }

  /// Observations >= x_min as a Sample (empty Sample if none).
  Sample tail(std::int64_t x_min) const;

  /// The multiset written out in ascending order.
  std::vector<std::int64_t> expand() const;

  bool operator==(const Sample& other) const {
    return values_ == other.values_ && weights_ == other.weights_;
  }

 private:
  void finish();

  std::vector<std::int64_t> values_;
  std::vector<double> weights_;
  std::vector<double> log_values_;
  std::vector<std::size_t> suffix_count_;
  std::vector<double> suffix_log_;
  std::size_t total_ = 0;
};

}  // namespace zipfit
