#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "groundkit/asr.hpp"
#include "groundkit/datagen.hpp"
#include "groundkit/grounder.hpp"

namespace groundkit::app {

// Grounding model variants compared by the ablation harness. The two
// text variants drop the speech slot from the fusion sequence; the
// muted variant keeps the slot but feeds zeros through it.
enum class Variant {
  text_asr,          // decoded text only
  text_reference,    // ground-truth text only
  fusion_no_speech,  // full architecture, speech token muted
  fusion_full,       // full architecture, pooled recognizer latents
};

const char* variant_name(Variant v);
const char* variant_input_kind(Variant v);
Variant variant_from_name(const std::string& name);

struct AsrSection {
  int hidden = 32;
  int epochs = 30;
  int batch_size = 8;
  double lr = 1.4e-2;
  double weight_decay = 0.0;
};

struct GrounderSection {
  int d_model = 64;
  int gat_dim = 32;
  int gat_layers = 2;
  int text_layers = 2;
  int heads = 4;
  int ffn_dim = 128;
  int max_seq = 16;
  int epochs = 30;
  int batch_size = 8;
  double lr = 1.2e-3;
  double weight_decay = 0.01;
  bool cosine_restarts = true;
  int restart_epochs = 10;
  int restart_mult = 2;
  double eta_min_frac = 0.01;
};

struct RunConfig {
  data::DatagenConfig datagen;
  AsrSection asr;
  GrounderSection grounder;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::vector<Variant> variants = {Variant::text_asr, Variant::text_reference,
                                   Variant::fusion_no_speech, Variant::fusion_full};
  bool paper_dims = false;
  double snap_threshold = 3.0;

  static RunConfig defaults();
  // strict parse: unknown keys anywhere are an error
  static RunConfig from_json(const std::string& json_text);
  static RunConfig from_json_file(const std::string& path);
  std::string to_json() const;
};

struct AblationRow {
  std::string method;
  std::string input;
  std::string seed;  // seed number, or "mean"
  double accuracy_pct = 0.0;
  std::string dataset_hash;
  double sigma = 0.0;
  double asr_wer_pct = 0.0;
  std::string status = "ok";
};

struct AblationReport {
  std::vector<AblationRow> rows;
  double mean_accuracy(Variant v) const;  // over the per-seed rows
  double mean_wer_pct() const;
};

// One seed's trained artifacts, reusable across criteria checks.
struct SeedArtifacts {
  std::uint64_t seed = 0;
  data::Dataset dataset;
  std::string dataset_hash;
  asr::AsrModel asr_model;
  double test_wer = 0.0;
  // per split, per sample: precomputed grounder inputs
  std::vector<ground::GrounderSample> train_full, test_full;      // decoded text + latents
  std::vector<ground::GrounderSample> train_truth, test_truth;    // reference text
};

// dataset generation + recognizer training + per-sample input
// precomputation for one seed
SeedArtifacts prepare_seed(const RunConfig& cfg, std::uint64_t seed,
                           const phon::PhoneticModel& phonetics,
                           const data::ObjectVocabulary& vocab,
                           const std::string& scratch_dir);

ground::GrounderConfig grounder_config_for(const RunConfig& cfg, Variant v,
                                           std::uint64_t seed,
                                           const phon::PhoneticModel& phonetics,
                                           const data::ObjectVocabulary& vocab);

struct VariantOutcome {
  double accuracy = 0.0;
  bool failed = false;
  std::string error;
  std::vector<ground::GrounderEpochStats> log;
  std::shared_ptr<ground::Grounder> model;  // null when training failed
};

VariantOutcome train_variant(const RunConfig& cfg, Variant v, const SeedArtifacts& seed_art,
                             const phon::PhoneticModel& phonetics,
                             const data::ObjectVocabulary& vocab);

// Full ablation over config seeds and variants; writes report.csv,
// report.md, per-variant metric logs and checkpoints under out_dir.
AblationReport run_ablation(const RunConfig& cfg, const phon::PhoneticModel& phonetics,
                            const data::ObjectVocabulary& vocab, const std::string& out_dir);

void write_report_csv(const std::string& path, const AblationReport& report);
void write_report_md(const std::string& path, const AblationReport& report,
                     const RunConfig& cfg);

struct PcaPoint {
  std::string word;
  std::string group;  // initial phoneme symbol
  double x = 0.0;
  double y = 0.0;
};

struct PcaReport {
  std::vector<PcaPoint> points;
  double intra_group_distance = 0.0;
  double inter_group_distance = 0.0;
  double ratio = 0.0;  // intra / inter
};

// Mean-pooled word latents projected to their top two principal
// components, grouped by initial phoneme.
PcaReport run_pca_report(const asr::AsrModel& model, const phon::PhoneticModel& phonetics,
                         const std::vector<std::string>& words);

void write_pca_csv(const std::string& path, const PcaReport& report);
void write_pca_svg(const std::string& path, const PcaReport& report);

// FNV-1a 64-bit over a file's bytes, hex-rendered
std::string hash_file(const std::string& path);

// model sidecar metadata, so checkpoints are loadable stand-alone
void save_asr_bundle(const std::string& dir, const asr::AsrModel& model,
                     const phon::PhoneticModel& phonetics);
asr::AsrModel load_asr_bundle(const std::string& dir, phon::PhoneticModel* phonetics_out);
void save_grounder_bundle(const std::string& dir, const ground::Grounder& model,
                          const std::string& tag);
ground::Grounder load_grounder_bundle(const std::string& dir, const std::string& tag);

}  // namespace groundkit::app
