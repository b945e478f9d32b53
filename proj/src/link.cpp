#include "precodelab/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace precodelab {

namespace {

constexpr double kMinBitSuccess = 0x1p-10;  // clamp for the log reward
constexpr double kLlrNoiseFloor = 1e-12;    // effective variance in noiseless mode

double abs2(cplx c) { return c.real() * c.real() + c.imag() * c.imag(); }

double log_sum_exp(const std::vector<double>& neg, const std::vector<std::size_t>& idx) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i : idx) mx = std::max(mx, neg[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (std::size_t i : idx) s += std::exp(neg[i] - mx);
  return mx + std::log(s);
}

/// Fills llrs[0..bits) for one RE. Distances are shared across bit positions.
void demap(cplx z, cplx h_eff, double noise_variance, const ModulationScheme& scheme,
           LlrMode mode, std::vector<double>& llrs) {
  const std::size_t m_ary = scheme.m_ary;
  std::vector<double> metric(m_ary);  // -|z - h x|^2 / sigma^2
  for (std::size_t i = 0; i < m_ary; ++i)
    metric[i] = -abs2(z - h_eff * scheme.points[i]) / noise_variance;
  llrs.resize(scheme.bits_per_symbol);
  for (std::size_t m = 0; m < scheme.bits_per_symbol; ++m) {
    if (mode == LlrMode::ExactLogSum) {
      llrs[m] = log_sum_exp(metric, scheme.set_bit0[m]) -
                log_sum_exp(metric, scheme.set_bit1[m]);
    } else {
      double best0 = -std::numeric_limits<double>::infinity();
      double best1 = best0;
      for (std::size_t i : scheme.set_bit0[m]) best0 = std::max(best0, metric[i]);
      for (std::size_t i : scheme.set_bit1[m]) best1 = std::max(best1, metric[i]);
      llrs[m] = best0 - best1;
    }
  }
}

}  // namespace

ModulationScheme ModulationScheme::qam(std::size_t m_ary) {
  if (m_ary != 4 && m_ary != 16)
    throw std::invalid_argument("ModulationScheme: only 4-QAM and 16-QAM are supported");
  ModulationScheme s;
  s.m_ary = m_ary;
  s.bits_per_symbol = (m_ary == 4) ? 2 : 4;
  s.points.resize(m_ary);
  for (std::size_t i = 0; i < m_ary; ++i) {
    if (m_ary == 4) {
      const int b0 = static_cast<int>((i >> 1) & 1u);
      const int b1 = static_cast<int>(i & 1u);
      s.points[i] = cplx(1 - 2 * b0, 1 - 2 * b1) / std::sqrt(2.0);
    } else {
      const int b0 = static_cast<int>((i >> 3) & 1u);
      const int b1 = static_cast<int>((i >> 2) & 1u);
      const int b2 = static_cast<int>((i >> 1) & 1u);
      const int b3 = static_cast<int>(i & 1u);
      s.points[i] = cplx((1 - 2 * b0) * (2 - (1 - 2 * b2)),
                         (1 - 2 * b1) * (2 - (1 - 2 * b3))) /
                    std::sqrt(10.0);
    }
  }
  s.set_bit0.resize(s.bits_per_symbol);
  s.set_bit1.resize(s.bits_per_symbol);
  for (std::size_t m = 1; m <= s.bits_per_symbol; ++m)
    for (std::size_t i = 0; i < m_ary; ++i)
      (s.bit_of(i, m) == 0 ? s.set_bit0 : s.set_bit1)[m - 1].push_back(i);
  return s;
}

Precoder Precoder::from_codeword(CVec w, std::size_t index) {
  Precoder p;
  p.w = std::move(w);
  p.origin = PrecoderOrigin::CodebookIndex;
  p.codebook_index = index;
  return p;
}

Precoder Precoder::continuous(CVec w) {
  Precoder p;
  p.w = std::move(w);
  p.origin = PrecoderOrigin::Continuous;
  return p;
}

double LinkConfig::noise_variance() const {
  if (noiseless) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

Observation observe(const ChannelState& state) {
  if (state.pilot_channels.empty())
    throw std::invalid_argument("observe: state has no pilot channels");
  Observation obs;
  for (const CMat& h : state.pilot_channels) {
    for (std::size_t c = 0; c < h.cols; ++c)
      for (std::size_t r = 0; r < h.rows; ++r) obs.values.push_back(h(r, c).real());
    for (std::size_t c = 0; c < h.cols; ++c)
      for (std::size_t r = 0; r < h.rows; ++r) obs.values.push_back(h(r, c).imag());
  }
  return obs;
}

CVec mrc(const CMat& h, const Precoder& w) {
  CVec hw = mat_vec(h, w.w);
  const double g = hw.norm();
  if (g == 0.0) throw std::runtime_error("mrc: degenerate beam (Hw = 0)");
  for (cplx& c : hw.e) c /= g;
  return hw;
}

double effective_gain(const CMat& h, const Precoder& w) {
  const CVec hw = mat_vec(h, w.w);
  double s = 0.0;
  for (cplx c : hw.e) s += abs2(c);
  return s;
}

double llr(cplx z, cplx h_eff, double noise_variance, const ModulationScheme& scheme,
           std::size_t m, LlrMode mode) {
  if (noise_variance <= 0.0) throw std::invalid_argument("llr: noise variance must be positive");
  if (m < 1 || m > scheme.bits_per_symbol) throw std::invalid_argument("llr: bit index out of range");
  std::vector<double> llrs;
  demap(z, h_eff, noise_variance, scheme, mode, llrs);
  return llrs[m - 1];
}

double reward_from_ber(double ber) {
  if (!(ber >= 0.0 && ber <= 1.0)) throw std::invalid_argument("reward_from_ber: ber outside [0,1]");
  return std::log2(std::max(1.0 - ber, kMinBitSuccess)) + 0.5;
}

Reward measure_ber(const ChannelState& state, const Precoder& w, const LinkConfig& cfg,
                   const SubbandSpec& subband, Rng& rng) {
  if (state.data_channels.empty())
    throw std::invalid_argument("measure_ber: state has no data channels");
  const ModulationScheme& scheme = cfg.modulation;
  const double sigma2 = cfg.noise_variance();
  if (sigma2 <= 0.0 && !cfg.noiseless)
    throw std::invalid_argument("measure_ber: noise variance must be positive");
  const double sigma2_llr = std::max(sigma2, kLlrNoiseFloor);

  // One combined-domain gain per distinct data channel.
  const std::size_t n_ch = state.data_channels.size();
  std::vector<double> gain(n_ch);
  for (std::size_t k = 0; k < n_ch; ++k) {
    const CVec hw = mat_vec(state.data_channels[k], w.w);
    gain[k] = hw.norm();
  }

  const std::size_t bits = scheme.bits_per_symbol;
  std::size_t errors = 0;
  std::vector<double> llrs;
  for (std::size_t i = 0; i < subband.data_re_budget; ++i) {
    const double h_eff = gain[i % n_ch];
    const std::size_t sym = rng.uniform_int(scheme.m_ary);
    if (h_eff == 0.0) {
      for (std::size_t m = 1; m <= bits; ++m)
        errors += (static_cast<int>(rng.uniform_int(2)) != scheme.bit_of(sym, m));
      continue;
    }
    const cplx nu = (sigma2 > 0.0) ? rng.complex_gaussian(sigma2) : cplx(0.0);
    const cplx z = h_eff * scheme.points[sym] + nu;
    demap(z, h_eff, sigma2_llr, scheme, cfg.llr_mode, llrs);
    for (std::size_t m = 1; m <= bits; ++m) {
      const int decided = llrs[m - 1] > 0.0 ? 0 : 1;
      errors += (decided != scheme.bit_of(sym, m));
    }
  }

  Reward r;
  r.ber = static_cast<double>(errors) /
          (static_cast<double>(subband.data_re_budget) * static_cast<double>(bits));
  r.value = reward_from_ber(r.ber);
  return r;
}

}  // namespace precodelab
