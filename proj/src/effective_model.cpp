#include "recal/effective_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recal {

IntensityEstimate estimate_intensity(std::uint64_t zero_count,
                                     std::uint64_t total) {
  if (total == 0) throw std::invalid_argument("estimate_intensity: total = 0");
  if (zero_count > total)
    throw std::invalid_argument("estimate_intensity: zero_count > total");
  // Half-count clamp keeps the estimate finite when every experiment clicked.
  const double zeros =
      zero_count == 0 ? 0.5 : static_cast<double>(zero_count);
  IntensityEstimate est;
  est.value = -std::log(zeros / static_cast<double>(total));
  if (est.value == 0.0) est.value = 0.0;  // normalize -0.0
  est.uncertainty = 1.0 / static_cast<double>(total);
  est.sample_count = total;
  return est;
}

double q1_seed(const IntensityEstimate& est, double theta, int n, int khat) {
  const double alpha = std::sqrt(est.value);
  const double amp = (khat == 0 ? alpha : -alpha) + theta;
  const double half_no_click = 0.5 * std::exp(-amp * amp);
  return n == 0 ? half_no_click : 0.5 - half_no_click;
}

double q0_seed(const IntensityEstimate& est, double theta) {
  double total = 0.0;
  for (int n = 0; n < 2; ++n)
    total += std::max(q1_seed(est, theta, n, 0), q1_seed(est, theta, n, 1));
  return total;
}

QTable seed_qtable(const IntensityEstimate& est, const DisplacementGrid& grid) {
  QTable table = QTable::uniform(grid);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double theta = grid.values[g];
    for (int n = 0; n < 2; ++n)
      for (int khat = 0; khat < 2; ++khat)
        table.q1[QTable::q1_index(g, n, khat)] = q1_seed(est, theta, n, khat);
    // Stored as the sum of the already-seeded entries so the identity
    // q0 = sum_n max_khat q1 holds bit-exactly on every seeded table.
    double q0 = 0.0;
    for (int n = 0; n < 2; ++n)
      q0 += std::max(table.q1_at(g, n, 0), table.q1_at(g, n, 1));
    table.q0[g] = q0;
  }
  return table;
}

}  // namespace recal
