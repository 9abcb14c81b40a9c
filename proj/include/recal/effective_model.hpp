#ifndef RECAL_EFFECTIVE_MODEL_HPP
#define RECAL_EFFECTIVE_MODEL_HPP

#include <cstdint>

#include "recal/agent.hpp"
#include "recal/receiver.hpp"

namespace recal {

// Signal intensity inferred from theta=0 experiments; the single parameter of
// the agent's internal ideal-device model.
struct IntensityEstimate {
  double value = 0.0;        // estimated |alpha|^2
  double uncertainty = 0.0;  // reported as 1/sample_count
  std::uint64_t sample_count = 0;
};

// |alpha|^2 = -ln(zero_count / total) with a half-count clamp when no
// no-click outcomes were seen. Rejects total = 0.
IntensityEstimate estimate_intensity(std::uint64_t zero_count,
                                     std::uint64_t total);

// Seed value for the guess stage: the joint probability of outcome n under
// hypothesis khat on an ideal device, (1/2) p(n | k = khat, theta). The two
// n-branches of an entry sum to 1/2 exactly.
double q1_seed(const IntensityEstimate& est, double theta, int n, int khat);

// Seed value for the displacement stage: sum over outcomes of the best guess
// seed, which equals the ideal-device maximum-likelihood success probability
// at theta.
double q0_seed(const IntensityEstimate& est, double theta);

// Fresh Q-table holding the analytic seeds, all visit counts zero.
QTable seed_qtable(const IntensityEstimate& est, const DisplacementGrid& grid);

}  // namespace recal

#endif
