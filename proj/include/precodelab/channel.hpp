#pragma once

#include <cstdint>
#include <vector>

#include "precodelab/grid.hpp"
#include "precodelab/numerics.hpp"

namespace precodelab {

enum class ChannelModel { Flat, Tdl2 };

struct ChannelSpec {
  std::size_t n_tx = 4;
  std::size_t n_rx = 2;
  ChannelModel model = ChannelModel::Flat;
  double subcarrier_spacing = 30e3;
  std::vector<double> tap_delays{0.0, 400e-9};
  std::vector<double> tap_powers_db{0.0, 0.0};

  void validate() const;
  /// Linear tap powers normalized to sum to 1.
  std::vector<double> tap_powers_linear() const;
};

/// One block-fading realization: the channel matrices seen on the pilot REs
/// and the per-data-RE matrices used for transmission. Under the flat model
/// every entry is the same matrix; under Tdl2 there is one matrix per
/// subcarrier of the subband.
struct ChannelState {
  std::vector<CMat> pilot_channels;
  std::vector<CMat> data_channels;
  std::uint64_t tti_index = 0;
};

/// Flat Rayleigh block fading: a single n_rx x n_tx matrix with i.i.d.
/// CN(0, 1) entries shared by every RE of the TTI.
ChannelState sample_flat(const ChannelSpec& spec, Rng& rng);

/// Frequency response of a two-tap line at subcarrier k:
///   H(k) = G0 + G1 * exp(-j 2 pi k spacing tau1).
CMat tdl2_frequency_response(const CMat& g0, const CMat& g1, std::size_t k,
                             double subcarrier_spacing, double tau1);

/// Two-tap frequency-selective block fading over one subband. Tap matrices
/// are drawn i.i.d. CN(0, p_l) per entry with p_l the normalized tap powers;
/// pilot and data channels are the frequency response at the subband's pilot
/// and data subcarrier indices.
ChannelState sample_tdl2(const ChannelSpec& spec, const SubbandSpec& subband, Rng& rng);

}  // namespace precodelab
