#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "groundkit/phonetics.hpp"
#include "groundkit/scenegraph.hpp"

namespace groundkit::data {

struct CommandTemplate {
  std::vector<std::string> verbs;
  std::vector<std::string> prepositions;
  bool verb_first = true;  // "go to bike" vs "bike to go"

  static CommandTemplate defaults();
  std::string render(const std::string& verb, const std::string& preposition,
                     const std::string& name) const;
};

// Ten object classes with 2..8 synonym names each. Several cross-class
// name pairs are deliberate sound-alikes (pin/bin, cart/card, pane/pan).
struct ObjectVocabulary {
  struct ClassEntry {
    std::string class_name;
    std::vector<std::string> names;
  };
  std::vector<ClassEntry> classes;

  static ObjectVocabulary defaults();
  int class_index(const std::string& class_name) const;  // -1 when absent
  std::vector<std::string> class_names() const;
  std::vector<std::string> all_names() const;
  void validate(const phon::PhoneticModel& phonetics) const;
};

struct GroundingSample {
  phon::AudioFeatures audio;
  std::string command_text;
  scene::SceneGraph graph;
  std::string target_class;
  std::string target_node_id;
  // sorted (class, position quantized to 0.1 m) tuples, fixed at
  // generation time; supports utterance-disjoint dedup checks
  std::string graph_signature;
};

enum class SplitMode { name_disjoint, utterance_disjoint };

const char* split_mode_name(SplitMode mode);
SplitMode split_mode_from_name(const std::string& name);

struct DatagenConfig {
  int train_size = 1200;
  int test_size = 400;
  int commands_per_name = 40;  // at most |verbs| * |prepositions|
  double noise_sigma = 0.62;
  SplitMode split = SplitMode::utterance_disjoint;
  std::uint64_t seed = 1;
};

struct Dataset {
  std::vector<GroundingSample> train;
  std::vector<GroundingSample> test;
};

// Distinct verb-preposition combinations per name, sampled without
// replacement; returns (command text, class name) pairs.
std::vector<std::pair<std::string, std::string>> generate_commands(
    const ObjectVocabulary& vocab, const CommandTemplate& tmpl, int count_per_name,
    std::uint64_t seed);

struct SampledGraph {
  scene::SceneGraph graph;
  std::string target_node_id;
  std::string signature;
};

// Target plus 2..8 distractors of distinct classes, positions uniform
// in [-5,5]^2 at z=0, node ids shuffled before the graph is built.
SampledGraph sample_scene_graph(const ObjectVocabulary& vocab,
                                const std::string& target_class, Rng& rng);

// Samples are derived independently from (seed, split, index), so any
// parallel generation order produces the identical dataset.
Dataset build_dataset(const ObjectVocabulary& vocab, const CommandTemplate& tmpl,
                      const phon::PhoneticModel& phonetics, const DatagenConfig& cfg);

// Post-hoc invariant scan; returns human-readable violations (empty
// when the dataset is clean).
std::vector<std::string> lint_dataset(const std::vector<GroundingSample>& samples,
                                      const ObjectVocabulary& vocab);

// JSON Lines, one sample per line; only valid audio rows are stored.
void save_dataset_jsonl(const std::string& path, const std::vector<GroundingSample>& samples);
std::vector<GroundingSample> load_dataset_jsonl(const std::string& path, int feature_dim);

}  // namespace groundkit::data
