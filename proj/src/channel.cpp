#include "precodelab/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace precodelab {

void SubbandSpec::validate() const {
  if (n_prb == 0 || subcarriers_per_prb == 0 || symbols_per_tti == 0)
    throw std::invalid_argument("SubbandSpec: counts must be positive");
  if (data_re_budget == 0) throw std::invalid_argument("SubbandSpec: data_re_budget must be >= 1");
  if (pilot_subcarrier_indices.empty())
    throw std::invalid_argument("SubbandSpec: need at least one pilot subcarrier");
  std::size_t prev = 0;
  bool first = true;
  for (std::size_t idx : pilot_subcarrier_indices) {
    if (idx >= n_subcarriers())
      throw std::invalid_argument("SubbandSpec: pilot subcarrier out of range");
    if (!first && idx <= prev)
      throw std::invalid_argument("SubbandSpec: pilot subcarriers must be strictly increasing");
    prev = idx;
    first = false;
  }
}

void ChannelSpec::validate() const {
  if (n_tx == 0 || n_rx == 0) throw std::invalid_argument("ChannelSpec: antenna counts must be >= 1");
  if (model == ChannelModel::Tdl2) {
    if (tap_delays.size() != tap_powers_db.size())
      throw std::invalid_argument("ChannelSpec: tap arrays must have equal length");
    if (tap_delays.size() != 2) throw std::invalid_argument("ChannelSpec: Tdl2 uses exactly two taps");
    if (subcarrier_spacing <= 0.0)
      throw std::invalid_argument("ChannelSpec: subcarrier spacing must be positive");
  }
}

std::vector<double> ChannelSpec::tap_powers_linear() const {
  std::vector<double> p(tap_powers_db.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::pow(10.0, tap_powers_db[i] / 10.0);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

ChannelState sample_flat(const ChannelSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.model != ChannelModel::Flat)
    throw std::invalid_argument("sample_flat: spec.model must be Flat");
  ChannelState state;
  CMat h = complex_gaussian(spec.n_rx, spec.n_tx, 1.0, rng);
  state.pilot_channels.push_back(h);
  state.data_channels.push_back(std::move(h));
  return state;
}

CMat tdl2_frequency_response(const CMat& g0, const CMat& g1, std::size_t k,
                             double subcarrier_spacing, double tau1) {
  const double phase = -2.0 * std::numbers::pi * static_cast<double>(k) * subcarrier_spacing * tau1;
  const cplx rot(std::cos(phase), std::sin(phase));
  CMat h(g0.rows, g0.cols);
  for (std::size_t i = 0; i < h.e.size(); ++i) h.e[i] = g0.e[i] + g1.e[i] * rot;
  return h;
}

ChannelState sample_tdl2(const ChannelSpec& spec, const SubbandSpec& subband, Rng& rng) {
  spec.validate();
  subband.validate();
  if (spec.model != ChannelModel::Tdl2)
    throw std::invalid_argument("sample_tdl2: spec.model must be Tdl2");
  const std::vector<double> powers = spec.tap_powers_linear();
  const double tau1 = spec.tap_delays[1];

  CMat g0 = complex_gaussian(spec.n_rx, spec.n_tx, powers[0], rng);
  CMat g1 = complex_gaussian(spec.n_rx, spec.n_tx, powers[1], rng);

  ChannelState state;
  state.pilot_channels.reserve(subband.pilot_subcarrier_indices.size());
  for (std::size_t k : subband.pilot_subcarrier_indices)
    state.pilot_channels.push_back(
        tdl2_frequency_response(g0, g1, k, spec.subcarrier_spacing, tau1));
  state.data_channels.reserve(subband.n_subcarriers());
  for (std::size_t k = 0; k < subband.n_subcarriers(); ++k)
    state.data_channels.push_back(
        tdl2_frequency_response(g0, g1, k, spec.subcarrier_spacing, tau1));
  return state;
}

}  // namespace precodelab
