#include "groundkit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace groundkit::data {

CommandTemplate CommandTemplate::defaults() {
  CommandTemplate t;
  t.verbs = {"go", "move", "walk", "run", "drive", "head", "roll", "step"};
  t.prepositions = {"to", "toward", "near", "by", "at"};
  t.verb_first = true;
  return t;
}

std::string CommandTemplate::render(const std::string& verb, const std::string& preposition,
                                    const std::string& name) const {
  if (verb_first) return verb + " " + preposition + " " + name;
  return name + " " + preposition + " " + verb;
}

ObjectVocabulary ObjectVocabulary::defaults() {
  ObjectVocabulary v;
  v.classes = {
      {"bicycle", {"bicycle", "bike", "cycle", "pedal"}},
      {"sign", {"sign", "board", "pin", "marker"}},
      {"desk", {"desk", "table", "card", "stand"}},
      {"door", {"door", "gate", "portal"}},
      {"window", {"window", "pane", "glass"}},
      {"red box", {"red box", "pan", "carton"}},
      {"blue box", {"blue box", "bin", "crate"}},
      {"black box", {"black box", "chest", "trunk"}},
      {"car", {"car", "auto", "cart", "motor"}},
      {"suitcase", {"suitcase", "bag", "case", "sack"}},
  };
  return v;
}

int ObjectVocabulary::class_index(const std::string& class_name) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].class_name == class_name) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> ObjectVocabulary::class_names() const {
  std::vector<std::string> out;
  for (const auto& c : classes) out.push_back(c.class_name);
  return out;
}

std::vector<std::string> ObjectVocabulary::all_names() const {
  std::vector<std::string> out;
  for (const auto& c : classes)
    for (const auto& n : c.names) out.push_back(n);
  return out;
}

void ObjectVocabulary::validate(const phon::PhoneticModel& phonetics) const {
  if (classes.size() < 3)
    throw std::invalid_argument("vocabulary: need at least three classes");
  std::set<std::string> seen;
  for (const auto& c : classes) {
    if (c.names.size() < 2 || c.names.size() > 8)
      throw std::invalid_argument("vocabulary: class '" + c.class_name +
                                  "' must carry 2..8 names");
    for (const auto& name : c.names) {
      if (!seen.insert(name).second)
        throw std::invalid_argument("vocabulary: duplicate name '" + name + "'");
      std::istringstream words(name);
      std::string w;
      while (words >> w) (void)phonetics.pronounce(w);
    }
  }
}

const char* split_mode_name(SplitMode mode) {
  return mode == SplitMode::name_disjoint ? "name" : "utterance";
}

SplitMode split_mode_from_name(const std::string& name) {
  if (name == "name") return SplitMode::name_disjoint;
  if (name == "utterance") return SplitMode::utterance_disjoint;
  throw std::invalid_argument("split mode must be 'name' or 'utterance', got '" + name +
                              "'");
}

namespace {

std::vector<std::string> commands_for_name(const std::string& name,
                                           const CommandTemplate& tmpl, int count,
                                           std::uint64_t seed) {
  const int space =
      static_cast<int>(tmpl.verbs.size() * tmpl.prepositions.size());
  if (count > space)
    throw std::invalid_argument("generate_commands: requested " + std::to_string(count) +
                                " commands per name but only " + std::to_string(space) +
                                " verb-preposition combinations exist");
  std::vector<int> combos(static_cast<std::size_t>(space));
  for (int i = 0; i < space; ++i) combos[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(combos);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  const int preps = static_cast<int>(tmpl.prepositions.size());
  for (int i = 0; i < count; ++i) {
    const int v = combos[static_cast<std::size_t>(i)] / preps;
    const int p = combos[static_cast<std::size_t>(i)] % preps;
    out.push_back(tmpl.render(tmpl.verbs[static_cast<std::size_t>(v)],
                              tmpl.prepositions[static_cast<std::size_t>(p)], name));
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> generate_commands(
    const ObjectVocabulary& vocab, const CommandTemplate& tmpl, int count_per_name,
    std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> out;
  std::uint64_t name_counter = 0;
  for (const auto& cls : vocab.classes)
    for (const auto& name : cls.names) {
      for (auto& text :
           commands_for_name(name, tmpl, count_per_name, derive_seed(seed, name_counter)))
        out.emplace_back(std::move(text), cls.class_name);
      ++name_counter;
    }
  return out;
}

SampledGraph sample_scene_graph(const ObjectVocabulary& vocab,
                                const std::string& target_class, Rng& rng) {
  if (vocab.classes.size() < 3)
    throw std::invalid_argument("sample_scene_graph: need at least three classes");
  if (vocab.class_index(target_class) < 0)
    throw std::invalid_argument("sample_scene_graph: unknown class '" + target_class + "'");

  const int max_distractors =
      std::min(8, static_cast<int>(vocab.classes.size()) - 1);
  const int distractors = rng.uniform_int(2, max_distractors);

  std::vector<std::string> others;
  for (const auto& c : vocab.classes)
    if (c.class_name != target_class) others.push_back(c.class_name);
  rng.shuffle(others);

  std::vector<std::string> chosen = {target_class};
  chosen.insert(chosen.end(), others.begin(), others.begin() + distractors);
  rng.shuffle(chosen);  // node ids must not encode which object is the target

  scene::WorldModel world;
  std::string target_id;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    scene::ObjectRecord rec;
    rec.id = "o" + std::to_string(i);
    rec.object_class = chosen[i];
    rec.position = {rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), 0.0};
    if (chosen[i] == target_class) target_id = rec.id;
    world.ingest(rec);
  }

  SampledGraph out;
  out.graph = scene::build_scene_graph(world);
  out.target_node_id = target_id;

  std::vector<std::string> parts;
  for (const auto& [id, rec] : world.objects()) {
    const long qx = std::lround(rec.position[0] * 10.0);
    const long qy = std::lround(rec.position[1] * 10.0);
    parts.push_back(rec.object_class + "@" + std::to_string(qx) + "," + std::to_string(qy));
  }
  std::sort(parts.begin(), parts.end());
  for (const auto& p : parts) {
    if (!out.signature.empty()) out.signature += ";";
    out.signature += p;
  }
  return out;
}

namespace {

struct NamePools {
  // per class: usable names for this split
  std::vector<std::vector<std::string>> names;
  // per name: usable command texts for this split
  std::map<std::string, std::vector<std::string>> commands;
};

}  // namespace

Dataset build_dataset(const ObjectVocabulary& vocab, const CommandTemplate& tmpl,
                      const phon::PhoneticModel& phonetics, const DatagenConfig& cfg) {
  vocab.validate(phonetics);
  for (const auto& w : tmpl.verbs) (void)phonetics.pronounce(w);
  for (const auto& w : tmpl.prepositions) (void)phonetics.pronounce(w);
  if (cfg.train_size < 1 || cfg.test_size < 1)
    throw std::invalid_argument("build_dataset: split sizes must be positive");
  if (cfg.noise_sigma < 0.0)
    throw std::invalid_argument("build_dataset: negative noise sigma");
  if (cfg.split == SplitMode::name_disjoint)
    for (const auto& c : vocab.classes)
      if (c.names.size() < 2)
        throw std::invalid_argument(
            "build_dataset: name-disjoint split needs >= 2 names per class, class '" +
            c.class_name + "' has fewer");

  const int num_classes = static_cast<int>(vocab.classes.size());

  NamePools train_pool, test_pool;
  train_pool.names.resize(static_cast<std::size_t>(num_classes));
  test_pool.names.resize(static_cast<std::size_t>(num_classes));

  std::uint64_t name_counter = 0;
  for (int c = 0; c < num_classes; ++c) {
    const auto& entry = vocab.classes[static_cast<std::size_t>(c)];
    if (cfg.split == SplitMode::name_disjoint) {
      // held-out names: the last shuffled name of every class
      std::vector<std::string> shuffled = entry.names;
      Rng rng(derive_seed(cfg.seed, 0x1000 + static_cast<std::uint64_t>(c)));
      rng.shuffle(shuffled);
      test_pool.names[static_cast<std::size_t>(c)] = {shuffled.back()};
      shuffled.pop_back();
      train_pool.names[static_cast<std::size_t>(c)] = shuffled;
    } else {
      train_pool.names[static_cast<std::size_t>(c)] = entry.names;
      test_pool.names[static_cast<std::size_t>(c)] = entry.names;
    }
    for (const auto& name : entry.names) {
      auto commands =
          commands_for_name(name, tmpl, cfg.commands_per_name, derive_seed(cfg.seed, name_counter));
      ++name_counter;
      if (cfg.split == SplitMode::utterance_disjoint) {
        // held-out sentences: the last quarter of the shuffled pool
        const std::size_t test_count = std::max<std::size_t>(1, commands.size() / 4);
        const std::size_t train_count = commands.size() - test_count;
        if (train_count == 0)
          throw std::invalid_argument(
              "build_dataset: too few commands per name for an utterance-disjoint split");
        train_pool.commands[name] =
            std::vector<std::string>(commands.begin(), commands.begin() + static_cast<std::ptrdiff_t>(train_count));
        test_pool.commands[name] =
            std::vector<std::string>(commands.begin() + static_cast<std::ptrdiff_t>(train_count), commands.end());
      } else {
        train_pool.commands[name] = commands;
        test_pool.commands[name] = commands;
      }
    }
  }

  auto make_split = [&](const NamePools& pool, int size, std::uint64_t split_tag) {
    std::vector<GroundingSample> samples;
    samples.reserve(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
      Rng rng(derive_seed(derive_seed(cfg.seed, split_tag), static_cast<std::uint64_t>(i)));
      const int c = i % num_classes;  // class balance by round robin
      const auto& names = pool.names[static_cast<std::size_t>(c)];
      const std::string& name =
          names[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(names.size()) - 1))];
      const auto& commands = pool.commands.at(name);
      const std::string& text = commands[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(commands.size()) - 1))];

      GroundingSample sample;
      sample.command_text = text;
      sample.target_class = vocab.classes[static_cast<std::size_t>(c)].class_name;
      auto sampled = sample_scene_graph(vocab, sample.target_class, rng);
      sample.graph = std::move(sampled.graph);
      sample.target_node_id = sampled.target_node_id;
      sample.graph_signature = sampled.signature;
      const auto seq = phon::text_to_phonemes(text, phonetics);
      sample.audio =
          phon::synthesize_audio(seq, phonetics.inventory, cfg.noise_sigma, rng.next_u64());
      samples.push_back(std::move(sample));
    }
    return samples;
  };

  Dataset out;
  out.train = make_split(train_pool, cfg.train_size, 1);
  out.test = make_split(test_pool, cfg.test_size, 2);
  return out;
}

std::vector<std::string> lint_dataset(const std::vector<GroundingSample>& samples,
                                      const ObjectVocabulary& vocab) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string where = "sample " + std::to_string(i);
    if (s.graph.nodes.empty()) {
      issues.push_back(where + ": empty graph");
      continue;
    }
    if (vocab.class_index(s.target_class) < 0)
      issues.push_back(where + ": unknown target class '" + s.target_class + "'");
    const int target_idx = s.graph.node_index(s.target_node_id);
    if (target_idx < 0) {
      issues.push_back(where + ": target node id missing from graph");
    } else if (s.graph.nodes[static_cast<std::size_t>(target_idx)].text != s.target_class) {
      issues.push_back(where + ": target node class mismatch");
    }
    int count = 0;
    for (const auto& node : s.graph.nodes)
      if (node.text == s.target_class) ++count;
    if (count != 1)
      issues.push_back(where + ": target class appears " + std::to_string(count) +
                       " times, expected exactly once");
    if (s.graph.edges.size() !=
        s.graph.nodes.size() * (s.graph.nodes.size() - 1))
      issues.push_back(where + ": graph is not fully connected");
    if (s.audio.valid_length < 1 || s.audio.valid_length > phon::kFrames) {
      issues.push_back(where + ": bad valid_length");
    } else {
      for (int t = s.audio.valid_length; t < phon::kFrames; ++t)
        for (int c = 0; c < s.audio.frames.cols(); ++c)
          if (s.audio.frames.at(t, c) != 0.0) {
            issues.push_back(where + ": nonzero padding frame");
            t = phon::kFrames;
            break;
          }
      if (!s.audio.frames.all_finite()) issues.push_back(where + ": non-finite audio");
    }
  }
  return issues;
}

void save_dataset_jsonl(const std::string& path, const std::vector<GroundingSample>& samples) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("dataset: cannot write " + path);
  for (const auto& s : samples) {
    nlohmann::json doc;
    nlohmann::json frames = nlohmann::json::array();
    for (int t = 0; t < s.audio.valid_length; ++t) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < s.audio.frames.cols(); ++c) row.push_back(s.audio.frames.at(t, c));
      frames.push_back(std::move(row));
    }
    doc["audio"] = {{"frames", std::move(frames)}};
    doc["command_text"] = s.command_text;
    doc["graph"] = nlohmann::json::parse(scene::scene_graph_to_json(s.graph));
    doc["target_class"] = s.target_class;
    doc["target_node_id"] = s.target_node_id;
    doc["graph_signature"] = s.graph_signature;
    os << doc.dump() << "\n";
  }
}

std::vector<GroundingSample> load_dataset_jsonl(const std::string& path, int feature_dim) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("dataset: cannot open " + path);
  std::vector<GroundingSample> samples;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto doc = nlohmann::json::parse(line);
    GroundingSample s;
    const auto& frames = doc.at("audio").at("frames");
    s.audio.frames = num::Tensor::zeros({phon::kFrames, feature_dim});
    s.audio.valid_length = static_cast<int>(frames.size());
    if (s.audio.valid_length > phon::kFrames)
      throw std::runtime_error("dataset: audio longer than the padded frame count");
    for (int t = 0; t < s.audio.valid_length; ++t) {
      const auto& row = frames.at(static_cast<std::size_t>(t));
      if (static_cast<int>(row.size()) != feature_dim)
        throw std::runtime_error("dataset: frame dimension mismatch");
      for (int c = 0; c < feature_dim; ++c) s.audio.frames.at(t, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    s.command_text = doc.at("command_text").get<std::string>();
    s.graph = scene::scene_graph_from_json(doc.at("graph").dump());
    s.target_class = doc.at("target_class").get<std::string>();
    s.target_node_id = doc.at("target_node_id").get<std::string>();
    if (doc.contains("graph_signature"))
      s.graph_signature = doc.at("graph_signature").get<std::string>();
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace groundkit::data
