#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "precodelab/link.hpp"
#include "precodelab/numerics.hpp"

namespace precodelab {

/// Discrete precoder action set: a max-min chordal distance line packing.
struct Codebook {
  std::size_t n_tx = 0;
  std::vector<CVec> words;  // all unit norm
  double min_chordal_distance = 0.0;

  enum class Provenance { Generated, LoadedFromFile };
  Provenance provenance = Provenance::Generated;
  std::uint64_t seed = 0;
  std::string path;

  std::size_t size() const { return words.size(); }
  Precoder word(std::size_t index) const { return Precoder::from_codeword(words[index], index); }
};

/// Max-min packing by pairwise repulsion: start from random unit vectors and
/// repeatedly push the closest pair apart along the repulsion gradient with a
/// step size annealed from 0.1 down to 1e-3, keeping the best codebook seen.
Codebook generate_grassmannian(std::size_t n_tx, std::size_t n_words, std::uint64_t seed,
                               std::size_t iterations = 20000);

/// argmax over codewords of |w† A w| for Hermitian A; ties go to the lowest
/// index.
std::pair<std::size_t, Precoder> exhaustive_search(const CMat& a, const Codebook& cb);

void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace precodelab
