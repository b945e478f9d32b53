#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace precodelab {

using cplx = std::complex<double>;

/// Dense complex vector.
struct CVec {
  std::vector<cplx> e;

  CVec() = default;
  explicit CVec(std::size_t n) : e(n) {}
  CVec(std::initializer_list<cplx> init) : e(init) {}

  std::size_t size() const { return e.size(); }
  cplx& operator[](std::size_t i) { return e[i]; }
  const cplx& operator[](std::size_t i) const { return e[i]; }

  double norm() const;
  bool all_finite() const;
};

/// Dense complex matrix, row-major.
struct CMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> e;

  CMat() = default;
  CMat(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}

  cplx& operator()(std::size_t r, std::size_t c) { return e[r * cols + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return e[r * cols + c]; }

  CMat adjoint() const;
  double frobenius_norm() const;
  bool all_finite() const;

  static CMat identity(std::size_t n);
};

bool operator==(const CVec& a, const CVec& b);
bool operator==(const CMat& a, const CMat& b);

/// a† b (conjugate-linear in the first argument).
cplx inner(const CVec& a, const CVec& b);
CVec mat_vec(const CMat& a, const CVec& x);
CMat mat_mul(const CMat& a, const CMat& b);
/// A† A for a (rows x cols) matrix; result is cols x cols Hermitian.
CMat gram(const CMat& a);
CVec scaled(const CVec& v, cplx s);

/// Deterministic random source. The engine is std::mt19937_64 whose state is
/// derived from (seed, stream) through a splitmix64 mix, so distinct streams
/// of the same seed are decorrelated and every (seed, stream) pair replays the
/// same sequence. All variate transforms are implemented here (never through
/// std::*_distribution) so sequences do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform();
  /// Uniform on [0, 1) guaranteed > 0, for use under log().
  double uniform_positive();
  /// Standard normal via Box-Muller (cosine branch; the sine twin is dropped).
  double gaussian();
  /// CN(0, variance): independent N(0, variance/2) real and imaginary parts,
  /// drawn as one Box-Muller pair. variance = 0 consumes no draws.
  cplx complex_gaussian(double variance);
  /// Uniform integer in [0, n) by masked rejection (exact, unbiased).
  std::uint64_t uniform_int(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Matrix with i.i.d. CN(0, variance) entries, filled row by row.
CMat complex_gaussian(std::size_t rows, std::size_t cols, double variance, Rng& rng);

struct Evd {
  std::vector<double> eigenvalues;  // descending
  CMat eigenvectors;                // orthonormal columns, paired with eigenvalues
};

/// Eigendecomposition of a Hermitian matrix (dimension <= 16) by cyclic
/// complex Jacobi rotations. Converges when the off-diagonal Frobenius norm
/// drops below 1e-12 * ||A||_F, max 100 sweeps. Each eigenvector is phase
/// normalized so its largest-magnitude entry is real nonnegative.
Evd hermitian_evd(const CMat& a);

/// sqrt(1 - |w1† w2|^2) between unit vectors, clamped to [0, 1].
double chordal_distance(const CVec& w1, const CVec& w2);

}  // namespace precodelab
