#pragma once

#include <cstddef>
#include <vector>

namespace precodelab {

/// Time-frequency geometry of the band sharing one precoder. One TTI is 14
/// OFDM symbols of which one carries the pilots; a PRB is 12 subcarriers.
struct SubbandSpec {
  std::size_t n_prb = 8;
  std::size_t subcarriers_per_prb = 12;
  std::size_t symbols_per_tti = 14;
  std::size_t pilot_symbol_count = 1;
  std::vector<std::size_t> pilot_subcarrier_indices{0, 47, 95};
  /// Number of data REs actually simulated per TTI (Monte-Carlo budget).
  std::size_t data_re_budget = 2048;

  std::size_t n_subcarriers() const { return n_prb * subcarriers_per_prb; }
  void validate() const;
};

}  // namespace precodelab
