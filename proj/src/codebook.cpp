#include "precodelab/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "precodelab/errors.hpp"

namespace precodelab {

namespace {

double abs2(cplx c) { return c.real() * c.real() + c.imag() * c.imag(); }

CVec random_unit_vector(std::size_t n, Rng& rng) {
  CVec v(n);
  double norm;
  do {
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.complex_gaussian(1.0);
    norm = v.norm();
  } while (norm < 1e-12);
  for (cplx& c : v.e) c /= norm;
  return v;
}

void renormalize(CVec& v) {
  const double n = v.norm();
  for (cplx& c : v.e) c /= n;
}

double min_pairwise_abs2(const std::vector<std::vector<double>>& g, std::size_t& pi,
                         std::size_t& pj) {
  // g holds |wi† wj|^2; the closest pair maximizes it.
  double worst = -1.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g[i][j] > worst) {
        worst = g[i][j];
        pi = i;
        pj = j;
      }
  return worst;
}

}  // namespace

Codebook generate_grassmannian(std::size_t n_tx, std::size_t n_words, std::uint64_t seed,
                               std::size_t iterations) {
  if (n_tx < 2) throw std::invalid_argument("generate_grassmannian: n_tx must be >= 2");
  if (n_words < 2) throw std::invalid_argument("generate_grassmannian: need at least 2 words");

  Rng rng(seed, 0);
  std::vector<CVec> words(n_words);
  for (CVec& w : words) w = random_unit_vector(n_tx, rng);

  std::vector<std::vector<double>> g(n_words, std::vector<double>(n_words, 0.0));
  auto refresh_row = [&](std::size_t i) {
    for (std::size_t j = 0; j < n_words; ++j) {
      if (j == i) continue;
      const double v = abs2(inner(words[i], words[j]));
      g[i][j] = v;
      g[j][i] = v;
    }
  };
  for (std::size_t i = 0; i < n_words; ++i) refresh_row(i);

  std::size_t pi = 0, pj = 1;
  double worst = min_pairwise_abs2(g, pi, pj);
  std::vector<CVec> best_words = words;
  double best_worst = worst;

  const double step_hi = 0.1, step_lo = 1e-3;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double frac = iterations > 1 ? static_cast<double>(it) / (iterations - 1) : 0.0;
    const double step = step_hi * std::pow(step_lo / step_hi, frac);

    // Push the closest pair apart: descend |wa† wb|^2 for each member.
    const cplx c = inner(words[pi], words[pj]);
    CVec wa = words[pi];
    CVec wb = words[pj];
    for (std::size_t k = 0; k < n_tx; ++k) {
      words[pi][k] = wa[k] - step * std::conj(c) * wb[k];
      words[pj][k] = wb[k] - step * c * wa[k];
    }
    renormalize(words[pi]);
    renormalize(words[pj]);
    refresh_row(pi);
    refresh_row(pj);

    worst = min_pairwise_abs2(g, pi, pj);
    if (worst < best_worst) {
      best_worst = worst;
      best_words = words;
    }
  }

  Codebook cb;
  cb.n_tx = n_tx;
  cb.words = std::move(best_words);
  cb.min_chordal_distance = std::sqrt(std::max(0.0, 1.0 - best_worst));
  cb.provenance = Codebook::Provenance::Generated;
  cb.seed = seed;
  return cb;
}

std::pair<std::size_t, Precoder> exhaustive_search(const CMat& a, const Codebook& cb) {
  if (a.rows != cb.n_tx || a.cols != cb.n_tx)
    throw std::invalid_argument("exhaustive_search: dimension mismatch");
  std::size_t best = 0;
  double best_gain = -1.0;
  for (std::size_t i = 0; i < cb.size(); ++i) {
    const CVec aw = mat_vec(a, cb.words[i]);
    const double gain = std::abs(inner(cb.words[i], aw));
    // Ties (within relative rounding noise) stay at the lowest index.
    if (gain > best_gain * (1.0 + 1e-12)) {
      best_gain = gain;
      best = i;
    }
  }
  return {best, cb.word(best)};
}

void save_codebook(const Codebook& cb, const std::string& path) {
  nlohmann::json j;
  j["n_tx"] = cb.n_tx;
  j["N"] = cb.size();
  j["min_chordal_distance"] = cb.min_chordal_distance;
  nlohmann::json words = nlohmann::json::array();
  for (const CVec& w : cb.words) {
    nlohmann::json entries = nlohmann::json::array();
    for (cplx c : w.e) entries.push_back({c.real(), c.imag()});
    words.push_back(std::move(entries));
  }
  j["words"] = std::move(words);
  std::ofstream out(path);
  if (!out) throw IoError("save_codebook: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("save_codebook: write failed for " + path);
}

Codebook load_codebook(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_codebook: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_codebook: malformed JSON in " + path + ": " + e.what());
  }

  Codebook cb;
  try {
    cb.n_tx = j.at("n_tx").get<std::size_t>();
    const std::size_t n = j.at("N").get<std::size_t>();
    cb.min_chordal_distance = j.at("min_chordal_distance").get<double>();
    const auto& words = j.at("words");
    if (words.size() != n)
      throw IoError("load_codebook: header N does not match word count");
    for (const auto& entries : words) {
      if (entries.size() != cb.n_tx)
        throw IoError("load_codebook: word length does not match n_tx");
      CVec w(cb.n_tx);
      for (std::size_t k = 0; k < cb.n_tx; ++k)
        w[k] = cplx(entries[k].at(0).get<double>(), entries[k].at(1).get<double>());
      if (std::abs(w.norm() - 1.0) > 1e-9)
        throw IoError("load_codebook: non-unit codeword");
      cb.words.push_back(std::move(w));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_codebook: malformed codebook " + path + ": " + e.what());
  }
  cb.provenance = Codebook::Provenance::LoadedFromFile;
  cb.path = path;
  return cb;
}

}  // namespace precodelab
