#include "groundkit/asr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "groundkit/optim.hpp"
#include "groundkit/rng.hpp"

namespace groundkit::asr {

AsrModel AsrModel::init(const AsrConfig& cfg) {
  if (cfg.alphabet < 2) throw std::invalid_argument("asr: alphabet too small");
  if (cfg.kernel < 1 || cfg.kernel % 2 == 0)
    throw std::invalid_argument("asr: kernel must be odd");
  AsrModel m;
  m.cfg = cfg;
  Rng rng(derive_seed(cfg.seed, 0xA5));
  m.conv1_w = num::Tensor::xavier(cfg.kernel * cfg.feature_dim, cfg.hidden, rng);
  m.conv1_b = num::Tensor::zeros({cfg.hidden});
  m.conv2_w = num::Tensor::xavier(cfg.kernel * cfg.hidden, cfg.hidden, rng);
  m.conv2_b = num::Tensor::zeros({cfg.hidden});
  // zero decoder start: uniform label posteriors give the lattice a
  // stable ramp-in
  m.dec_w = num::Tensor::zeros({cfg.hidden, cfg.alphabet});
  m.dec_b = num::Tensor::zeros({cfg.alphabet});
  return m;
}

std::vector<num::Tensor*> AsrModel::parameters() {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &dec_w, &dec_b};
}

std::vector<const num::Tensor*> AsrModel::parameters() const {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &dec_w, &dec_b};
}

std::vector<std::string> AsrModel::parameter_names() {
  return {"asr.conv1_w", "asr.conv1_b", "asr.conv2_w",
          "asr.conv2_b", "asr.dec_w",   "asr.dec_b"};
}

num::NamedTensors AsrModel::named_parameters() const {
  num::NamedTensors out;
  const auto names = parameter_names();
  const auto params = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) out.emplace_back(names[i], *params[i]);
  return out;
}

void AsrModel::load_parameters(const num::NamedTensors& tensors) {
  const auto names = parameter_names();
  const auto params = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    bool found = false;
    for (const auto& [name, tensor] : tensors) {
      if (name != names[i]) continue;
      if (tensor.shape != params[i]->shape)
        throw std::runtime_error("asr: checkpoint shape mismatch for " + name);
      *params[i] = tensor;
      found = true;
      break;
    }
    if (!found) throw std::runtime_error("asr: checkpoint missing " + names[i]);
  }
}

AsrModel::TapeNodes AsrModel::forward(num::Tape& tape, const phon::AudioFeatures& audio,
                                      int rows, bool train) const {
  if (audio.frames.rank() != 2 || audio.frames.rows() != cfg.frames)
    throw std::invalid_argument("asr: expected " + std::to_string(cfg.frames) +
                                " audio frames, got " + audio.frames.shape_str());
  if (audio.frames.cols() != cfg.feature_dim)
    throw std::invalid_argument("asr: feature dimension mismatch");
  if (rows < 1 || rows > cfg.frames) throw std::invalid_argument("asr: bad row count");

  TapeNodes nodes;
  auto param = [&](const num::Tensor& t) {
    num::Tensor copy = t;
    copy.requires_grad = train;
    const int id = tape.leaf(std::move(copy));
    nodes.params.push_back(id);
    return id;
  };
  const int w1 = param(conv1_w), b1 = param(conv1_b);
  const int w2 = param(conv2_w), b2 = param(conv2_b);
  const int wd = param(dec_w), bd = param(dec_b);

  num::Tensor input = audio.frames;
  input.requires_grad = false;
  int x = tape.constant(std::move(input));
  // keep the receptive-field tail so rows 0..rows-1 match the
  // full-length computation bit for bit (frames past valid_length are
  // zero either way)
  const int rows_in = std::min(cfg.frames, rows + (cfg.kernel - 1));
  if (rows_in < cfg.frames) x = tape.slice_rows(x, 0, rows_in);
  const int h1 = tape.relu(tape.add_bias(tape.matmul(tape.unfold1d(x, cfg.kernel), w1), b1));
  int latents =
      tape.relu(tape.add_bias(tape.matmul(tape.unfold1d(h1, cfg.kernel), w2), b2));
  if (rows_in > rows) latents = tape.slice_rows(latents, 0, rows);
  nodes.latents = latents;
  nodes.log_probs = tape.log_softmax_rows(tape.add_bias(tape.matmul(nodes.latents, wd), bd));
  return nodes;
}

num::Tensor AsrModel::encode(const phon::AudioFeatures& audio) const {
  num::Tape tape;
  const auto nodes = forward(tape, audio, cfg.frames, false);
  return tape.value(nodes.latents);
}

num::Tensor AsrModel::valid_log_probs(const phon::AudioFeatures& audio) const {
  if (audio.valid_length < 1) throw std::invalid_argument("asr: empty audio");
  num::Tape tape;
  const auto nodes = forward(tape, audio, audio.valid_length, false);
  return tape.value(nodes.log_probs);
}

std::vector<double> AsrModel::pooled_latent(const phon::AudioFeatures& audio) const {
  if (audio.valid_length < 1) throw std::invalid_argument("asr: empty audio");
  num::Tape tape;
  const auto nodes = forward(tape, audio, audio.valid_length, false);
  const int pooled = tape.mean_axis(nodes.latents, 0);
  return tape.value(pooled).data;
}

Transcript greedy_decode(const num::Tensor& log_probs, const phon::PhonemeInventory& inv) {
  if (log_probs.rank() != 2) throw std::invalid_argument("greedy_decode: rank-2 input");
  Transcript out;
  int prev = -1;
  for (int t = 0; t < log_probs.rows(); ++t) {
    int best = 0;
    for (int k = 1; k < log_probs.cols(); ++k)
      if (log_probs.at(t, k) > log_probs.at(t, best)) best = k;
    if (best != prev && best != 0) out.ids.push_back(best);
    prev = best;
  }
  for (int id : out.ids) out.text += inv.symbols[static_cast<std::size_t>(id)];
  return out;
}

namespace {

// pause-delimited segments snapped to the closest lexicon word; far
// segments are emitted as raw phoneme renderings
std::vector<std::string> snap_to_words(const std::vector<int>& decoded_ids,
                                       const phon::PhoneticModel& phonetics,
                                       double snap_threshold) {
  std::vector<std::vector<int>> segments(1);
  for (int id : decoded_ids) {
    if (id == phon::kPauseId) {
      if (!segments.back().empty()) segments.emplace_back();
    } else {
      segments.back().push_back(id);
    }
  }
  if (segments.back().empty()) segments.pop_back();

  std::vector<std::string> words;
  for (const auto& segment : segments) {
    phon::PhonemeSequence hyp{segment, ""};
    std::string best_word;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& [word, prons] : phonetics.lexicon) {
      phon::PhonemeSequence ref{phonetics.pronounce(word), word};
      const double d = phon::acoustic_distance(hyp, ref, phonetics.inventory);
      if (d < best_dist || (d == best_dist && word < best_word)) {
        best_dist = d;
        best_word = word;
      }
    }
    if (best_dist <= snap_threshold) {
      words.push_back(best_word);
    } else {
      std::string raw;
      for (int id : segment) raw += phonetics.inventory.symbols[static_cast<std::size_t>(id)];
      words.push_back(raw);
    }
  }
  return words;
}

}  // namespace

std::vector<std::string> decode_words(const AsrModel& model,
                                      const phon::AudioFeatures& audio,
                                      const phon::PhoneticModel& phonetics,
                                      double snap_threshold) {
  const Transcript transcript =
      greedy_decode(model.valid_log_probs(audio), phonetics.inventory);
  return snap_to_words(transcript.ids, phonetics, snap_threshold);
}

double word_error_rate(const std::vector<std::string>& hypothesis,
                       const std::vector<std::string>& reference) {
  if (reference.empty()) return hypothesis.empty() ? 0.0 : 1.0;
  const std::size_t n = hypothesis.size(), m = reference.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (hypothesis[i - 1] == reference[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(m);
}

std::vector<AsrEpochStats> train_asr(AsrModel& model, const std::vector<AsrSample>& data,
                                     const AsrTrainConfig& cfg,
                                     const phon::PhoneticModel& phonetics) {
  if (data.empty()) throw std::invalid_argument("train_asr: empty dataset");
  for (const auto& sample : data)
    if (num::ctc_min_frames(sample.label) > sample.audio.valid_length)
      throw std::invalid_argument("train_asr: transcript infeasible for audio length");

  auto params = model.parameters();
  auto state = num::AdamWState::init(params, cfg.weight_decay, cfg.lr);
  Rng shuffle_rng(derive_seed(cfg.seed, 0x5A));

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  const std::int64_t steps_per_epoch =
      (static_cast<std::int64_t>(data.size()) + cfg.batch_size - 1) / cfg.batch_size;
  num::CosineRestartSchedule sched;
  sched.eta_max = cfg.lr;
  sched.eta_min = cfg.lr * cfg.eta_min_frac;
  sched.t0 = static_cast<int>(std::max<std::int64_t>(1, steps_per_epoch * cfg.epochs));
  sched.t_mult = 1;
  std::int64_t step = 0;

  std::vector<AsrEpochStats> log;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    double wer_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      num::Tape tape;
      std::vector<int> param_ids;
      std::vector<int> losses;
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t b = start; b < end; ++b) {
        const AsrSample& sample = data[order[b]];
        try {
          const auto nodes =
              model.forward(tape, sample.audio, sample.audio.valid_length, cfg.lr > 0.0);
          if (param_ids.empty()) param_ids = nodes.params;
          losses.push_back(tape.ctc_loss(nodes.log_probs, sample.label));
          loss_sum += tape.value(losses.back()).data[0];

          const Transcript decoded =
              greedy_decode(tape.value(nodes.log_probs), phonetics.inventory);
          wer_sum += word_error_rate(snap_to_words(decoded.ids, phonetics, 3.0),
                                     sample.words);
        } catch (const std::runtime_error& e) {
          const std::string hint = sample.words.empty() ? "?" : sample.words.front();
          throw std::runtime_error("train_asr: sample " + std::to_string(order[b]) +
                                   " (starts '" + hint + "'): " + e.what());
        }
      }
      if (cfg.lr > 0.0) {
        int mean = losses[0];
        for (std::size_t i = 1; i < losses.size(); ++i) mean = tape.add(mean, losses[i]);
        mean = tape.scale(mean, 1.0 / static_cast<double>(losses.size()));
        const auto grads = tape.backward(mean);
        std::vector<const num::Tensor*> grad_ptrs;
        for (std::size_t p = 0; p < params.size(); ++p)
          grad_ptrs.push_back(&grads.at(param_ids[p]));
        const double lr = cfg.cosine_decay ? num::schedule_lr(sched, step) : cfg.lr;
        num::adamw_step(params, grad_ptrs, state, lr);
        ++step;
      }
    }
    log.push_back({epoch, loss_sum / static_cast<double>(data.size()),
                   wer_sum / static_cast<double>(data.size())});
  }
  return log;
}

void save_loss_log(const std::string& path, const std::vector<AsrEpochStats>& stats) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("asr: cannot write " + path);
  os << "epoch,mean_ctc_loss,greedy_word_error_rate\n";
  char buf[96];
  for (const auto& row : stats) {
    std::snprintf(buf, sizeof buf, "%d,%.9f,%.6f\n", row.epoch, row.mean_ctc_loss,
                  row.greedy_word_error_rate);
    os << buf;
  }
}

}  // namespace groundkit::asr
