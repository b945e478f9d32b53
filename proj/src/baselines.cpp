#include "precodelab/baselines.hpp"

#include <stdexcept>

namespace precodelab {

CovarianceMatrix covariance(const std::vector<CMat>& pilot_channels) {
  if (pilot_channels.empty()) throw std::invalid_argument("covariance: empty pilot list");
  const std::size_t n_tx = pilot_channels.front().cols;
  CMat r(n_tx, n_tx);
  for (const CMat& h : pilot_channels) {
    if (h.cols != n_tx || h.rows != pilot_channels.front().rows)
      throw std::invalid_argument("covariance: inconsistent pilot dimensions");
    const CMat g = gram(h);
    for (std::size_t k = 0; k < r.e.size(); ++k) r.e[k] += g.e[k];
  }
  const double inv = 1.0 / static_cast<double>(pilot_channels.size());
  for (cplx& c : r.e) c *= inv;
  // Force exact Hermitian symmetry against accumulation roundoff.
  for (std::size_t i = 0; i < n_tx; ++i) {
    r(i, i) = r(i, i).real();
    for (std::size_t j = i + 1; j < n_tx; ++j) {
      const cplx avg = 0.5 * (r(i, j) + std::conj(r(j, i)));
      r(i, j) = avg;
      r(j, i) = std::conj(avg);
    }
  }
  return {r, pilot_channels.size()};
}

Precoder svd_precoder(const CMat& h) {
  if (h.frobenius_norm() == 0.0) throw std::invalid_argument("svd_precoder: zero matrix");
  const Evd evd = hermitian_evd(gram(h));
  CVec w(h.cols);
  for (std::size_t k = 0; k < h.cols; ++k) w[k] = evd.eigenvectors(k, 0);
  return Precoder::continuous(std::move(w));
}

Precoder evd_precoder(const CovarianceMatrix& cov) {
  const Evd evd = hermitian_evd(cov.r);
  CVec w(cov.r.rows);
  for (std::size_t k = 0; k < cov.r.rows; ++k) w[k] = evd.eigenvectors(k, 0);
  return Precoder::continuous(std::move(w));
}

std::pair<std::size_t, Precoder> wideband_codebook_opt(const CMat& h, const Codebook& cb) {
  return exhaustive_search(gram(h), cb);
}

std::pair<std::size_t, Precoder> subband_codebook_subopt(const std::vector<CMat>& pilot_channels,
                                                         const Codebook& cb) {
  return exhaustive_search(covariance(pilot_channels).r, cb);
}

}  // namespace precodelab
