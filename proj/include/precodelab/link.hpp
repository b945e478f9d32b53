#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "precodelab/channel.hpp"
#include "precodelab/grid.hpp"
#include "precodelab/numerics.hpp"

namespace precodelab {

/// M-QAM constellation with unit average energy and a Gray bit map.
/// 4-QAM point:  ((1-2 b1) + j (1-2 b2)) / sqrt(2)
/// 16-QAM point: ((1-2 b1)(2-(1-2 b3)) + j (1-2 b2)(2-(1-2 b4))) / sqrt(10)
/// Bits are numbered m = 1..log2(M); a symbol index packs them MSB-first.
struct ModulationScheme {
  std::size_t m_ary = 16;
  std::size_t bits_per_symbol = 4;
  std::vector<cplx> points;                          // indexed by packed bits
  std::vector<std::vector<std::size_t>> set_bit0;    // per bit m: indices with b_m = 0
  std::vector<std::vector<std::size_t>> set_bit1;

  static ModulationScheme qam(std::size_t m_ary);
  int bit_of(std::size_t symbol_index, std::size_t m) const {
    return static_cast<int>((symbol_index >> (bits_per_symbol - m)) & 1u);
  }
};

enum class PrecoderOrigin { CodebookIndex, Continuous };

/// Unit-norm transmit weight vector; the agent's action.
struct Precoder {
  CVec w;
  PrecoderOrigin origin = PrecoderOrigin::Continuous;
  std::size_t codebook_index = 0;

  static Precoder from_codeword(CVec w, std::size_t index);
  static Precoder continuous(CVec w);
};

enum class LlrMode { ExactLogSum, MaxLog };

struct LinkConfig {
  double snr_db = 10.0;
  ModulationScheme modulation = ModulationScheme::qam(16);
  LlrMode llr_mode = LlrMode::ExactLogSum;
  bool noiseless = false;  // test mode: no noise is added, BER is exact

  /// 10^(-snr_db/10); signal power is 1 so rho = 1/sigma_n^2. Zero when noiseless.
  double noise_variance() const;
};

/// Real-valued network input: [vec(Re H), vec(Im H)] per pilot RE, in pilot
/// order, with column-major vectorization.
struct Observation {
  std::vector<double> values;
};

struct Reward {
  double value = 0.0;
  double ber = 0.0;
};

Observation observe(const ChannelState& state);

/// Maximal ratio combiner Hw/||Hw||. Throws if Hw = 0.
CVec mrc(const CMat& h, const Precoder& w);

/// |w† H† H w| = ||Hw||^2.
double effective_gain(const CMat& h, const Precoder& w);

/// Per-bit log-likelihood ratio of the combined observation z given effective
/// channel h_eff. Positive means bit 0 is more likely. m is 1-based.
double llr(cplx z, cplx h_eff, double noise_variance, const ModulationScheme& scheme,
           std::size_t m, LlrMode mode);

/// log2(max(1 - ber, 2^-10)) + 0.5.
double reward_from_ber(double ber);

/// Experimental BER of precoder w over the state's data REs: random payload
/// bits per RE, AWGN, MRC combining, per-bit LLR hard decisions. REs cycle
/// round-robin over state.data_channels. The chain is simulated in the
/// combined domain, z = ||Hw|| x + nu with nu ~ CN(0, sigma_n^2), which is the
/// exact distribution of the MRC output and keeps the result invariant to a
/// phase rotation of w under the same noise draw. An RE with Hw = 0 has its
/// bits decided by coin flips.
Reward measure_ber(const ChannelState& state, const Precoder& w, const LinkConfig& cfg,
                   const SubbandSpec& subband, Rng& rng);

}  // namespace precodelab
