#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "groundkit/app.hpp"
#include "groundkit/pca.hpp"
#include "groundkit/rng.hpp"

namespace groundkit::app {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream ss(text);
  std::string w;
  while (ss >> w) words.push_back(w);
  return words;
}

std::vector<std::string> vocabulary_words(const phon::PhoneticModel& phonetics) {
  std::set<std::string> words;
  for (const auto& [word, prons] : phonetics.lexicon) words.insert(word);
  for (const char* w : {"left", "right", "front", "behind", "near"}) words.insert(w);
  return {words.begin(), words.end()};
}

}  // namespace

ground::GrounderConfig grounder_config_for(const RunConfig& cfg, Variant v,
                                           std::uint64_t seed,
                                           const phon::PhoneticModel& phonetics,
                                           const data::ObjectVocabulary& vocab) {
  ground::GrounderConfig g;
  g.d_model = cfg.grounder.d_model;
  g.gat_dim = cfg.grounder.gat_dim;
  g.gat_layers = cfg.grounder.gat_layers;
  g.text_layers = cfg.grounder.text_layers;
  g.heads = cfg.grounder.heads;
  g.ffn_dim = cfg.grounder.ffn_dim;
  g.max_seq = cfg.grounder.max_seq;
  g.speech_dim = cfg.asr.hidden;
  g.seed = seed;
  g.class_names = vocab.class_names();
  g.vocab_words = vocabulary_words(phonetics);
  g.use_speech_token = v == Variant::fusion_full || v == Variant::fusion_no_speech;
  if (cfg.paper_dims) {
    g.apply_paper_dims();
    g.speech_dim = cfg.asr.hidden;  // recognizer width stays the source of truth
  }
  return g;
}

SeedArtifacts prepare_seed(const RunConfig& cfg, std::uint64_t seed,
                           const phon::PhoneticModel& phonetics,
                           const data::ObjectVocabulary& vocab,
                           const std::string& scratch_dir) {
  SeedArtifacts art;
  art.seed = seed;

  data::DatagenConfig dcfg = cfg.datagen;
  dcfg.seed = seed;
  art.dataset = data::build_dataset(vocab, data::CommandTemplate::defaults(), phonetics, dcfg);
  {
    const auto issues = data::lint_dataset(art.dataset.train, vocab);
    if (!issues.empty())
      throw std::runtime_error("prepare_seed: dataset lint failed: " + issues.front());
  }

  fs::create_directories(scratch_dir);
  const std::string train_path = scratch_dir + "/train.jsonl";
  const std::string test_path = scratch_dir + "/test.jsonl";
  data::save_dataset_jsonl(train_path, art.dataset.train);
  data::save_dataset_jsonl(test_path, art.dataset.test);
  art.dataset_hash = hash_file(train_path) + hash_file(test_path);

  // recognizer
  asr::AsrConfig acfg;
  acfg.feature_dim = phonetics.inventory.feature_dim();
  acfg.alphabet = phonetics.inventory.size();
  acfg.hidden = cfg.asr.hidden;
  acfg.seed = seed;
  art.asr_model = asr::AsrModel::init(acfg);

  std::vector<asr::AsrSample> asr_train;
  asr_train.reserve(art.dataset.train.size());
  for (const auto& s : art.dataset.train) {
    asr::AsrSample a;
    a.audio = s.audio;
    a.label = phon::text_to_phonemes(s.command_text, phonetics).ids;
    a.words = split_words(s.command_text);
    asr_train.push_back(std::move(a));
  }
  asr::AsrTrainConfig tcfg;
  tcfg.epochs = cfg.asr.epochs;
  tcfg.batch_size = cfg.asr.batch_size;
  tcfg.lr = cfg.asr.lr;
  tcfg.weight_decay = cfg.asr.weight_decay;
  tcfg.seed = seed;
  const auto asr_log = asr::train_asr(art.asr_model, asr_train, tcfg, phonetics);
  asr::save_loss_log(scratch_dir + "/asr_loss_log.csv", asr_log);
  save_asr_bundle(scratch_dir, art.asr_model, phonetics);

  // precompute grounder inputs; the token vocabulary is shared by every
  // variant configuration
  const auto vocab_words = vocabulary_words(phonetics);

  auto prepare = [&](const std::vector<data::GroundingSample>& samples,
                     std::vector<ground::GrounderSample>& full,
                     std::vector<ground::GrounderSample>& truth, double& wer_sum) {
    full.reserve(samples.size());
    truth.reserve(samples.size());
    for (const auto& s : samples) {
      const int target = vocab.class_index(s.target_class);
      if (target < 0) throw std::runtime_error("prepare_seed: unknown target class");

      const auto decoded_words =
          asr::decode_words(art.asr_model, s.audio, phonetics, cfg.snap_threshold);
      wer_sum += asr::word_error_rate(decoded_words, split_words(s.command_text));

      ground::GrounderSample g;
      g.graph = s.graph;
      g.target = target;
      std::string decoded_text;
      for (const auto& w : decoded_words)
        decoded_text += decoded_text.empty() ? w : " " + w;
      g.tokens = ground::tokenize_text(vocab_words, decoded_text);
      g.speech = art.asr_model.pooled_latent(s.audio);
      full.push_back(g);

      ground::GrounderSample t;
      t.graph = s.graph;
      t.target = target;
      t.tokens = ground::tokenize_text(vocab_words, s.command_text);
      truth.push_back(std::move(t));
    }
  };

  double train_wer = 0.0, test_wer = 0.0;
  prepare(art.dataset.train, art.train_full, art.train_truth, train_wer);
  prepare(art.dataset.test, art.test_full, art.test_truth, test_wer);
  art.test_wer = test_wer / static_cast<double>(art.dataset.test.size());
  return art;
}

VariantOutcome train_variant(const RunConfig& cfg, Variant v, const SeedArtifacts& art,
                             const phon::PhoneticModel& phonetics,
                             const data::ObjectVocabulary& vocab) {
  VariantOutcome outcome;
  try {
    auto model =
        ground::Grounder::init(grounder_config_for(cfg, v, art.seed, phonetics, vocab));

    auto adapt = [&](const std::vector<ground::GrounderSample>& base) {
      std::vector<ground::GrounderSample> out = base;
      for (auto& s : out) {
        switch (v) {
          case Variant::fusion_full:
            break;
          case Variant::fusion_no_speech:
            s.speech.assign(s.speech.size(), 0.0);  // slot kept, signal muted
            break;
          case Variant::text_asr:
          case Variant::text_reference:
            s.speech.clear();  // no slot in the sequence
            break;
        }
      }
      return out;
    };
    const bool use_truth = v == Variant::text_reference;
    const auto train_set = adapt(use_truth ? art.train_truth : art.train_full);
    const auto test_set = adapt(use_truth ? art.test_truth : art.test_full);

    ground::GrounderTrainConfig tcfg;
    tcfg.epochs = cfg.grounder.epochs;
    tcfg.batch_size = cfg.grounder.batch_size;
    tcfg.lr = cfg.grounder.lr;
    tcfg.weight_decay = cfg.grounder.weight_decay;
    tcfg.cosine_restarts = cfg.grounder.cosine_restarts;
    tcfg.restart_epochs = cfg.grounder.restart_epochs;
    tcfg.restart_mult = cfg.grounder.restart_mult;
    tcfg.eta_min_frac = cfg.grounder.eta_min_frac;
    tcfg.seed = art.seed;
    outcome.log = ground::train_grounder(model, train_set, test_set, tcfg);
    outcome.accuracy = outcome.log.back().test_accuracy * 100.0;
    outcome.model = std::make_shared<ground::Grounder>(model);
  } catch (const std::exception& e) {
    outcome.failed = true;
    outcome.error = e.what();
  }
  return outcome;
}

double AblationReport::mean_accuracy(Variant v) const {
  const std::string name = variant_name(v);
  double sum = 0.0;
  int n = 0;
  for (const auto& row : rows) {
    if (row.method != name || row.seed == "mean" || row.status != "ok") continue;
    sum += row.accuracy_pct;
    ++n;
  }
  return n ? sum / n : 0.0;
}

double AblationReport::mean_wer_pct() const {
  double sum = 0.0;
  int n = 0;
  std::set<std::string> seen;
  for (const auto& row : rows) {
    if (row.seed == "mean" || !seen.insert(row.seed).second) continue;
    sum += row.asr_wer_pct;
    ++n;
  }
  return n ? sum / n : 0.0;
}

AblationReport run_ablation(const RunConfig& cfg, const phon::PhoneticModel& phonetics,
                            const data::ObjectVocabulary& vocab, const std::string& out_dir) {
  fs::create_directories(out_dir);
  AblationReport report;

  for (std::uint64_t seed : cfg.seeds) {
    const std::string seed_dir = out_dir + "/seed_" + std::to_string(seed);
    const auto art = prepare_seed(cfg, seed, phonetics, vocab, seed_dir);

    for (Variant v : cfg.variants) {
      const auto outcome = train_variant(cfg, v, art, phonetics, vocab);

      AblationRow row;
      row.method = variant_name(v);
      row.input = variant_input_kind(v);
      row.seed = std::to_string(seed);
      row.sigma = cfg.datagen.noise_sigma;
      row.dataset_hash = art.dataset_hash;
      row.asr_wer_pct = art.test_wer * 100.0;
      if (outcome.failed) {
        row.status = "failed: " + outcome.error;
        row.accuracy_pct = 0.0;
      } else {
        row.accuracy_pct = outcome.accuracy;
        ground::save_metric_log(
            seed_dir + "/" + std::string(variant_name(v)) + "_metrics.csv", outcome.log);
        save_grounder_bundle(seed_dir, *outcome.model, variant_name(v));
      }
      report.rows.push_back(std::move(row));
    }
  }

  // per-variant means over seeds
  for (Variant v : cfg.variants) {
    AblationRow mean;
    mean.method = variant_name(v);
    mean.input = variant_input_kind(v);
    mean.seed = "mean";
    mean.sigma = cfg.datagen.noise_sigma;
    mean.dataset_hash = "-";
    mean.asr_wer_pct = report.mean_wer_pct();
    mean.accuracy_pct = report.mean_accuracy(v);
    report.rows.push_back(std::move(mean));
  }

  write_report_csv(out_dir + "/report.csv", report);
  write_report_md(out_dir + "/report.md", report, cfg);
  return report;
}

PcaReport run_pca_report(const asr::AsrModel& model, const phon::PhoneticModel& phonetics,
                         const std::vector<std::string>& words) {
  if (words.size() < 3)
    throw std::invalid_argument("run_pca_report: need at least three words");
  PcaReport report;
  num::Tensor latents = num::Tensor::zeros({static_cast<int>(words.size()), model.cfg.hidden});
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto ids = phonetics.pronounce(words[i]);
    phon::PhonemeSequence seq{ids, words[i]};
    // seed by word content: identical words get identical durations
    std::uint64_t word_hash = 0xcbf29ce484222325ULL;
    for (char c : words[i]) word_hash = (word_hash ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    const auto audio =
        phon::synthesize_audio(seq, phonetics.inventory, 0.0, derive_seed(0x9CA, word_hash));
    const auto pooled = model.pooled_latent(audio);
    for (int h = 0; h < model.cfg.hidden; ++h) latents.at(static_cast<int>(i), h) = pooled[static_cast<std::size_t>(h)];
    PcaPoint p;
    p.word = words[i];
    p.group = phonetics.inventory.symbols[static_cast<std::size_t>(ids.front())];
    report.points.push_back(std::move(p));
  }
  const auto pca = num::pca_top2(latents);
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    report.points[i].x = pca.projections.at(static_cast<int>(i), 0);
    report.points[i].y = pca.projections.at(static_cast<int>(i), 1);
  }

  double intra = 0.0, inter = 0.0;
  int n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < report.points.size(); ++i)
    for (std::size_t j = i + 1; j < report.points.size(); ++j) {
      const double dx = report.points[i].x - report.points[j].x;
      const double dy = report.points[i].y - report.points[j].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      if (report.points[i].group == report.points[j].group) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  report.intra_group_distance = n_intra ? intra / n_intra : 0.0;
  report.inter_group_distance = n_inter ? inter / n_inter : 0.0;
  report.ratio = report.inter_group_distance > 0.0
                     ? report.intra_group_distance / report.inter_group_distance
                     : 0.0;
  return report;
}

}  // namespace groundkit::app
