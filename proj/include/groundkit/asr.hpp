#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groundkit/checkpoint.hpp"
#include "groundkit/phonetics.hpp"
#include "groundkit/tape.hpp"

namespace groundkit::asr {

struct AsrConfig {
  int frames = phon::kFrames;
  int feature_dim = 13;
  int hidden = 32;   // latent width per step
  int kernel = 5;    // temporal window, odd
  int alphabet = 0;  // symbol count including the blank at 0
  std::uint64_t seed = 1;
};

struct Transcript {
  std::vector<int> ids;  // alphabet ids, never blank
  std::string text;      // symbol rendering
};

// Two same-padded temporal convolution layers with ReLU produce one
// latent vector per frame; a linear layer over the latents scores the
// alphabet plus blank.
struct AsrModel {
  AsrConfig cfg;
  num::Tensor conv1_w, conv1_b;  // (kernel*feature_dim) x hidden, hidden
  num::Tensor conv2_w, conv2_b;  // (kernel*hidden) x hidden, hidden
  num::Tensor dec_w, dec_b;      // hidden x alphabet, alphabet

  static AsrModel init(const AsrConfig& cfg);

  std::vector<num::Tensor*> parameters();
  std::vector<const num::Tensor*> parameters() const;
  static std::vector<std::string> parameter_names();
  num::NamedTensors named_parameters() const;
  void load_parameters(const num::NamedTensors& tensors);

  struct TapeNodes {
    int latents = -1;    // rows x hidden
    int log_probs = -1;  // rows x alphabet
    std::vector<int> params;
  };
  // records the forward pass over the first `rows` frames; params are
  // registered as gradient leaves when train is set
  TapeNodes forward(num::Tape& tape, const phon::AudioFeatures& audio, int rows,
                    bool train) const;

  // full-length per-step latents (frames x hidden)
  num::Tensor encode(const phon::AudioFeatures& audio) const;
  // per-step alphabet log distributions over the valid frames
  num::Tensor valid_log_probs(const phon::AudioFeatures& audio) const;
  // mean latent over the valid frames
  std::vector<double> pooled_latent(const phon::AudioFeatures& audio) const;
};

// per-frame argmax, collapse repeats, drop blanks
Transcript greedy_decode(const num::Tensor& log_probs,
                         const phon::PhonemeInventory& inv);

// Decoded phonemes split at pauses and snapped to the closest lexicon
// word by acoustic distance; segments farther than the threshold from
// every word are emitted as raw phoneme strings.
std::vector<std::string> decode_words(const AsrModel& model,
                                      const phon::AudioFeatures& audio,
                                      const phon::PhoneticModel& phonetics,
                                      double snap_threshold = 3.0);

double word_error_rate(const std::vector<std::string>& hypothesis,
                       const std::vector<std::string>& reference);

struct AsrSample {
  phon::AudioFeatures audio;
  std::vector<int> label;           // phoneme ids incl. pauses, no blanks
  std::vector<std::string> words;   // reference words for the error rate
};

struct AsrTrainConfig {
  int epochs = 12;
  int batch_size = 8;
  double lr = 3e-3;  // zero freezes the parameters
  double weight_decay = 0.0;
  // anneal the rate over the whole run; stabilizes the late epochs
  bool cosine_decay = true;
  double eta_min_frac = 0.02;
  std::uint64_t seed = 1;
};

struct AsrEpochStats {
  int epoch = 0;
  double mean_ctc_loss = 0.0;
  double greedy_word_error_rate = 0.0;
};

std::vector<AsrEpochStats> train_asr(AsrModel& model, const std::vector<AsrSample>& data,
                                     const AsrTrainConfig& cfg,
                                     const phon::PhoneticModel& phonetics);

// loss log CSV: epoch, mean_ctc_loss, greedy_word_error_rate
void save_loss_log(const std::string& path, const std::vector<AsrEpochStats>& stats);

}  // namespace groundkit::asr
