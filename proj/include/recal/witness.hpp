#ifndef RECAL_WITNESS_HPP
#define RECAL_WITNESS_HPP

#include <cstdint>
#include <optional>

namespace recal {

enum class WitnessVerdict { normal, anomaly };

// Anomaly iff the window means differ by strictly more than delta.
WitnessVerdict classify(double previous_mean, double current_mean,
                        double delta);

// De-calibration witness: mean detector output over non-overlapping windows
// of `window_size` outcomes. Every completed window is compared against the
// previous one; the first window after a reset is the baseline and always
// reads normal.
class WitnessState {
 public:
  WitnessState(std::uint64_t window_size, double delta)
      : window_size_(window_size), delta_(delta) {}

  // Accumulate one detector outcome; returns a verdict exactly when this
  // outcome completes a window.
  std::optional<WitnessVerdict> push_outcome(int n);

  // Mean of the current (possibly partial) window; at a window boundary the
  // just-completed mean. Rejects a state with no outcomes pushed.
  double witness_value() const;

  std::optional<double> previous_mean() const { return previous_mean_; }
  std::uint64_t window_size() const { return window_size_; }

 private:
  std::uint64_t window_size_;
  double delta_;
  std::uint64_t ones_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t total_pushed_ = 0;
  std::optional<double> previous_mean_;
};

}  // namespace recal

#endif
