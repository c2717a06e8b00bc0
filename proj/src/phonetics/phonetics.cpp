#include "groundkit/phonetics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "groundkit/rng.hpp"

namespace groundkit::phon {

int PhonemeInventory::feature_dim() const {
  if (features.empty()) throw std::logic_error("inventory: empty");
  return static_cast<int>(features[0].size());
}

int PhonemeInventory::id_of(const std::string& symbol) const {
  for (int i = 0; i < size(); ++i)
    if (symbols[static_cast<std::size_t>(i)] == symbol) return i;
  return -1;
}

const std::vector<double>& PhonemeInventory::features_of(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("inventory: bad phoneme id");
  return features[static_cast<std::size_t>(id)];
}

void PhonemeInventory::validate() const {
  if (symbols.size() != features.size())
    throw std::invalid_argument("inventory: symbol/feature count mismatch");
  if (symbols.size() < 2) throw std::invalid_argument("inventory: too small");
  const std::size_t dim = features[0].size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim)
      throw std::invalid_argument("inventory: inconsistent feature dimension for " +
                                  symbols[i]);
    for (double v : features[i])
      if (!std::isfinite(v)) throw std::invalid_argument("inventory: non-finite feature");
  }
  for (double v : features[0])
    if (v != 0.0)
      throw std::invalid_argument("inventory: blank (index 0) must have zero features");
  for (std::size_t i = 0; i < symbols.size(); ++i)
    for (std::size_t j = i + 1; j < symbols.size(); ++j)
      if (symbols[i] == symbols[j])
        throw std::invalid_argument("inventory: duplicate symbol " + symbols[i]);
}

std::vector<int> PhoneticModel::pronounce(const std::string& word) const {
  const auto it = lexicon.find(word);
  if (it == lexicon.end())
    throw std::invalid_argument("lexicon: unknown word '" + word + "'");
  std::vector<int> ids;
  ids.reserve(it->second.size());
  for (const std::string& sym : it->second) {
    const int id = inventory.id_of(sym);
    if (id < 0)
      throw std::invalid_argument("lexicon: word '" + word + "' uses unknown phoneme '" +
                                  sym + "'");
    ids.push_back(id);
  }
  return ids;
}

PhoneticModel PhoneticModel::from_json(const std::string& json_text) {
  const auto doc = nlohmann::json::parse(json_text);
  PhoneticModel model;
  for (const auto& entry : doc.at("phonemes")) {
    model.inventory.symbols.push_back(entry.at("symbol").get<std::string>());
    model.inventory.features.push_back(entry.at("features").get<std::vector<double>>());
  }
  model.inventory.validate();
  for (const auto& [word, prons] : doc.at("lexicon").items()) {
    model.lexicon[word] = prons.get<std::vector<std::string>>();
    (void)model.pronounce(word);  // validates symbols
  }
  return model;
}

PhoneticModel PhoneticModel::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("phonetics: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

std::string PhoneticModel::to_json() const {
  nlohmann::json doc;
  doc["phonemes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < inventory.symbols.size(); ++i)
    doc["phonemes"].push_back(
        {{"symbol", inventory.symbols[i]}, {"features", inventory.features[i]}});
  doc["lexicon"] = nlohmann::json::object();
  for (const auto& [word, prons] : lexicon) doc["lexicon"][word] = prons;
  return doc.dump(2);
}

void PhoneticModel::save_json_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("phonetics: cannot write " + path);
  os << to_json() << '\n';
}

PhonemeSequence text_to_phonemes(const std::string& text, const PhoneticModel& model) {
  PhonemeSequence seq;
  seq.source_text = text;
  std::istringstream words(text);
  std::string word;
  bool first = true;
  while (words >> word) {
    if (!first) seq.ids.push_back(kPauseId);
    const auto ids = model.pronounce(word);
    seq.ids.insert(seq.ids.end(), ids.begin(), ids.end());
    first = false;
  }
  return seq;
}

AudioFeatures synthesize_audio(const PhonemeSequence& seq, const PhonemeInventory& inv,
                               double noise_sigma, std::uint64_t seed) {
  const int dim = inv.feature_dim();
  AudioFeatures audio;
  audio.frames = num::Tensor::zeros({kFrames, dim});
  audio.valid_length = 0;
  Rng rng(seed);
  int frame = 0;
  for (int id : seq.ids) {
    const auto& feat = inv.features_of(id);
    const int duration = rng.uniform_int(2, 5);
    if (frame + duration > kFrames)
      throw std::invalid_argument("synthesize_audio: sequence needs more than " +
                                  std::to_string(kFrames) + " frames");
    for (int d = 0; d < duration; ++d, ++frame)
      for (int c = 0; c < dim; ++c) {
        double v = feat[static_cast<std::size_t>(c)];
        if (noise_sigma > 0.0) v += noise_sigma * rng.gaussian();
        audio.frames.at(frame, c) = v;
      }
  }
  audio.valid_length = frame;
  return audio;
}

namespace {

double feature_norm(const std::vector<double>& f) {
  double acc = 0.0;
  for (double v : f) acc += v * v;
  return std::sqrt(acc);
}

double feature_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

double acoustic_distance(const PhonemeSequence& a, const PhonemeSequence& b,
                         const PhonemeInventory& inv) {
  const std::size_t n = a.ids.size();
  const std::size_t m = b.ids.size();
  auto indel = [&](int id) { return feature_norm(inv.features_of(id)) + 0.5; };
  std::vector<double> prev(m + 1, 0.0), cur(m + 1, 0.0);
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + indel(b.ids[j - 1]);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = prev[0] + indel(a.ids[i - 1]);
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub = prev[j - 1] + feature_distance(inv.features_of(a.ids[i - 1]),
                                                        inv.features_of(b.ids[j - 1]));
      const double del = prev[j] + indel(a.ids[i - 1]);
      const double ins = cur[j - 1] + indel(b.ids[j - 1]);
      cur[j] = std::min({sub, del, ins});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<ConfusablePair> confusable_pairs(const std::vector<std::string>& vocabulary,
                                             const PhoneticModel& model, int k) {
  if (vocabulary.size() < 2)
    throw std::invalid_argument("confusable_pairs: need at least two words");
  if (k < 0) throw std::invalid_argument("confusable_pairs: negative k");
  std::vector<ConfusablePair> pairs;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    // entries may be multi-word phrases
    const PhonemeSequence a = text_to_phonemes(vocabulary[i], model);
    for (std::size_t j = i + 1; j < vocabulary.size(); ++j) {
      const PhonemeSequence b = text_to_phonemes(vocabulary[j], model);
      ConfusablePair p;
      p.first = std::min(vocabulary[i], vocabulary[j]);
      p.second = std::max(vocabulary[i], vocabulary[j]);
      p.distance = acoustic_distance(a, b, model.inventory);
      pairs.push_back(std::move(p));
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const ConfusablePair& x, const ConfusablePair& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.first != y.first) return x.first < y.first;
    return x.second < y.second;
  });
  if (static_cast<std::size_t>(k) < pairs.size()) pairs.resize(static_cast<std::size_t>(k));
  return pairs;
}

}  // namespace groundkit::phon
