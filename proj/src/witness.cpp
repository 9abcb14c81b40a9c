#include "recal/witness.hpp"

#include <cmath>
#include <stdexcept>

namespace recal {

WitnessVerdict classify(double previous_mean, double current_mean,
                        double delta) {
  return std::abs(current_mean - previous_mean) > delta
             ? WitnessVerdict::anomaly
             : WitnessVerdict::normal;
}

std::optional<WitnessVerdict> WitnessState::push_outcome(int n) {
  ones_ += static_cast<std::uint64_t>(n);
  count_ += 1;
  total_pushed_ += 1;
  if (count_ < window_size_) return std::nullopt;

  const double mean =
      static_cast<double>(ones_) / static_cast<double>(window_size_);
  const WitnessVerdict verdict =
      previous_mean_ ? classify(*previous_mean_, mean, delta_)
                     : WitnessVerdict::normal;
  previous_mean_ = mean;
  ones_ = 0;
  count_ = 0;
  return verdict;
}

double WitnessState::witness_value() const {
  if (total_pushed_ == 0)
    throw std::invalid_argument("witness_value: no outcomes pushed");
  if (count_ == 0) return *previous_mean_;
  return static_cast<double>(ones_) / static_cast<double>(count_);
}

}  // namespace recal
