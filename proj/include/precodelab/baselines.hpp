#pragma once

#include <utility>
#include <vector>

#include "precodelab/codebook.hpp"
#include "precodelab/link.hpp"
#include "precodelab/numerics.hpp"

namespace precodelab {

/// Spatial channel covariance averaged over the pilot REs of a subband.
struct CovarianceMatrix {
  CMat r;  // n_tx x n_tx Hermitian PSD
  std::size_t pilot_count = 0;
};

/// R = (1/P) sum_j H_j† H_j over the pilot channels.
CovarianceMatrix covariance(const std::vector<CMat>& pilot_channels);

/// Principal right singular vector of H (principal eigenvector of H†H).
Precoder svd_precoder(const CMat& h);

/// Principal eigenvector of the covariance matrix.
Precoder evd_precoder(const CovarianceMatrix& r);

/// Exhaustive codebook search with A = H†H (the wideband optimum).
std::pair<std::size_t, Precoder> wideband_codebook_opt(const CMat& h, const Codebook& cb);

/// Exhaustive codebook search with A = covariance of the pilots (the
/// conventional subband approximation).
std::pair<std::size_t, Precoder> subband_codebook_subopt(const std::vector<CMat>& pilot_channels,
                                                         const Codebook& cb);

}  // namespace precodelab
