#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "groundkit/tensor.hpp"

namespace groundkit::phon {

// padded frame count of every synthesized utterance
constexpr int kFrames = 126;

// Articulatory feature inventory. Index 0 is the reserved blank with an
// all-zero feature vector; index 1 is the word-boundary pause.
struct PhonemeInventory {
  std::vector<std::string> symbols;
  std::vector<std::vector<double>> features;

  int size() const { return static_cast<int>(symbols.size()); }
  int feature_dim() const;
  int id_of(const std::string& symbol) const;  // -1 when unknown
  const std::vector<double>& features_of(int id) const;
  void validate() const;
};

// id of the pause phoneme in any valid inventory
constexpr int kPauseId = 1;

using Lexicon = std::map<std::string, std::vector<std::string>>;

// Inventory plus word pronunciations; serialized as one JSON document.
struct PhoneticModel {
  PhonemeInventory inventory;
  Lexicon lexicon;

  static PhoneticModel defaults();
  static PhoneticModel from_json(const std::string& json_text);
  static PhoneticModel from_json_file(const std::string& path);
  std::string to_json() const;
  void save_json_file(const std::string& path) const;

  std::vector<int> pronounce(const std::string& word) const;  // throws on unknown word
};

struct PhonemeSequence {
  std::vector<int> ids;  // inventory ids, blank never present
  std::string source_text;

  bool operator==(const PhonemeSequence& o) const { return ids == o.ids; }
};

struct AudioFeatures {
  num::Tensor frames;  // kFrames x feature_dim, zero past valid_length
  int valid_length = 0;
};

// Per-word pronunciations joined with the pause phoneme at word
// boundaries. Unknown words raise an error naming the word.
PhonemeSequence text_to_phonemes(const std::string& text, const PhoneticModel& model);

// Each phoneme emits its feature vector for a random 2..5 frame
// duration with element-wise Gaussian noise; deterministic per seed.
AudioFeatures synthesize_audio(const PhonemeSequence& seq, const PhonemeInventory& inv,
                               double noise_sigma, std::uint64_t seed);

// Weighted edit distance: substitution costs the Euclidean feature
// distance, insertion/deletion costs the feature norm plus 0.5.
double acoustic_distance(const PhonemeSequence& a, const PhonemeSequence& b,
                         const PhonemeInventory& inv);

struct ConfusablePair {
  std::string first;
  std::string second;
  double distance = 0.0;
};

// The k closest distinct word pairs of the vocabulary, ties broken
// lexicographically; returns all pairs when k exceeds the pair count.
std::vector<ConfusablePair> confusable_pairs(const std::vector<std::string>& vocabulary,
                                             const PhoneticModel& model, int k);

// 50 built-in words in five initial-phoneme groups, used by the latent
// visualization report.
std::vector<std::string> default_latent_word_bank();

}  // namespace groundkit::phon
