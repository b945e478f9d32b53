#include "precodelab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace precodelab {

namespace {

double abs2(cplx c) { return c.real() * c.real() + c.imag() * c.imag(); }

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double CVec::norm() const {
  double s = 0.0;
  for (cplx c : e) s += abs2(c);
  return std::sqrt(s);
}

bool CVec::all_finite() const {
  for (cplx c : e)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

CMat CMat::adjoint() const {
  CMat out(cols, rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

double CMat::frobenius_norm() const {
  double s = 0.0;
  for (cplx c : e) s += abs2(c);
  return std::sqrt(s);
}

bool CMat::all_finite() const {
  for (cplx c : e)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

CMat CMat::identity(std::size_t n) {
  CMat out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

bool operator==(const CVec& a, const CVec& b) { return a.e == b.e; }
bool operator==(const CMat& a, const CMat& b) {
  return a.rows == b.rows && a.cols == b.cols && a.e == b.e;
}

cplx inner(const CVec& a, const CVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

CVec mat_vec(const CMat& a, const CVec& x) {
  if (a.cols != x.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
  CVec y(a.rows);
  for (std::size_t r = 0; r < a.rows; ++r) {
    cplx s = 0.0;
    const cplx* row = a.e.data() + r * a.cols;
    for (std::size_t c = 0; c < a.cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

CMat mat_mul(const CMat& a, const CMat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("mat_mul: dimension mismatch");
  CMat out(a.rows, b.cols);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t k = 0; k < a.cols; ++k) {
      cplx av = a(r, k);
      for (std::size_t c = 0; c < b.cols; ++c) out(r, c) += av * b(k, c);
    }
  return out;
}

CMat gram(const CMat& a) {
  CMat out(a.cols, a.cols);
  for (std::size_t i = 0; i < a.cols; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) {
      cplx s = 0.0;
      for (std::size_t r = 0; r < a.rows; ++r) s += std::conj(a(r, i)) * a(r, j);
      out(i, j) = s;
    }
  return out;
}

CVec scaled(const CVec& v, cplx s) {
  CVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * s;
  return out;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0xD2B74407B1CE6E93ULL + 0x8BB84B93962EACC9ULL);
  engine_.seed(splitmix64(x));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_positive() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double Rng::gaussian() {
  double u1 = uniform_positive();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx Rng::complex_gaussian(double variance) {
  if (variance < 0.0) throw std::invalid_argument("complex_gaussian: negative variance");
  if (variance == 0.0) return 0.0;
  double u1 = uniform_positive();
  double u2 = uniform();
  double r = std::sqrt(-std::log(u1) * variance);  // radius for CN(0, variance)
  return {r * std::cos(2.0 * std::numbers::pi * u2),
          r * std::sin(2.0 * std::numbers::pi * u2)};
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  std::uint64_t mask = ~0ULL;
  if ((n & (n - 1)) == 0) return next_u64() & (n - 1);
  mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  std::uint64_t v;
  do {
    v = next_u64() & mask;
  } while (v >= n);
  return v;
}

CMat complex_gaussian(std::size_t rows, std::size_t cols, double variance, Rng& rng) {
  if (variance < 0.0) throw std::invalid_argument("complex_gaussian: negative variance");
  CMat out(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) out.e[i] = rng.complex_gaussian(variance);
  return out;
}

namespace {

double off_diagonal_norm(const CMat& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c)
      if (r != c) s += abs2(a(r, c));
  return std::sqrt(s);
}

}  // namespace

Evd hermitian_evd(const CMat& a) {
  if (a.rows != a.cols) throw std::invalid_argument("hermitian_evd: matrix not square");
  const std::size_t n = a.rows;
  if (n == 0 || n > 16) throw std::invalid_argument("hermitian_evd: dimension out of range");
  double scale = 0.0;
  for (cplx c : a.e) scale = std::max(scale, std::abs(c));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (std::abs(a(r, c) - std::conj(a(c, r))) > 1e-10 * std::max(1.0, scale))
        throw std::invalid_argument("hermitian_evd: matrix not Hermitian");

  CMat m = a;
  CMat v = CMat::identity(n);
  const double norm_a = m.frobenius_norm();

  for (int sweep = 0; sweep < 100 && norm_a > 0.0; ++sweep) {
    if (off_diagonal_norm(m) < 1e-12 * norm_a) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = m(p, q);
        const double rho = std::abs(apq);
        if (rho <= 1e-16 * norm_a) continue;
        const cplx alpha = apq / rho;  // phase of the pivot
        const double tau = (m(q, q).real() - m(p, p).real()) / (2.0 * rho);
        const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                      : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Unitary U = diag(1, conj(alpha)) embedded Givens: U[p][p]=c,
        // U[p][q]=-s, U[q][p]=s*conj(alpha), U[q][q]=c*conj(alpha).
        const cplx uqp = s * std::conj(alpha);
        const cplx uqq = c * std::conj(alpha);
        // Columns: M <- M U
        for (std::size_t r = 0; r < n; ++r) {
          const cplx mp = m(r, p), mq = m(r, q);
          m(r, p) = mp * c + mq * uqp;
          m(r, q) = mp * (-s) + mq * uqq;
        }
        // Rows: M <- U† M
        for (std::size_t col = 0; col < n; ++col) {
          const cplx mp = m(p, col), mq = m(q, col);
          m(p, col) = c * mp + std::conj(uqp) * mq;
          m(q, col) = -s * mp + std::conj(uqq) * mq;
        }
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        m(p, p) = m(p, p).real();
        m(q, q) = m(q, q).real();
        // Accumulate: V <- V U
        for (std::size_t r = 0; r < n; ++r) {
          const cplx vp = v(r, p), vq = v(r, q);
          v(r, p) = vp * c + vq * uqp;
          v(r, q) = vp * (-s) + vq * uqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return m(i, i).real() > m(j, j).real();
  });

  Evd out;
  out.eigenvalues.resize(n);
  out.eigenvectors = CMat(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = m(src, src).real();
    std::size_t imax = 0;
    double amax = -1.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double av = std::abs(v(r, src));
      if (av > amax) {
        amax = av;
        imax = r;
      }
    }
    cplx phase = (amax > 0.0) ? std::conj(v(imax, src)) / amax : cplx(1.0);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, src) * phase;
    out.eigenvectors(imax, k) = std::abs(out.eigenvectors(imax, k));
  }
  return out;
}

double chordal_distance(const CVec& w1, const CVec& w2) {
  if (w1.size() != w2.size()) throw std::invalid_argument("chordal_distance: length mismatch");
  if (std::abs(w1.norm() - 1.0) > 1e-9 || std::abs(w2.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("chordal_distance: inputs must be unit norm");
  const double c2 = abs2(inner(w1, w2));
  return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, c2)));
}

}  // namespace precodelab
