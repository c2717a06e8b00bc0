#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "groundkit/app.hpp"

namespace groundkit::app {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::text_asr: return "text-asr";
    case Variant::text_reference: return "text-reference";
    case Variant::fusion_no_speech: return "fusion-no-speech";
    case Variant::fusion_full: return "fusion-full";
  }
  return "?";
}

const char* variant_input_kind(Variant v) {
  switch (v) {
    case Variant::text_asr: return "asr-text";
    case Variant::text_reference: return "reference-text";
    case Variant::fusion_no_speech: return "speech";
    case Variant::fusion_full: return "speech";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  for (Variant v : {Variant::text_asr, Variant::text_reference, Variant::fusion_no_speech,
                    Variant::fusion_full})
    if (name == variant_name(v)) return v;
  throw std::invalid_argument("config: unknown variant '" + name + "'");
}

RunConfig RunConfig::defaults() { return RunConfig{}; }

RunConfig RunConfig::from_json(const std::string& json_text) {
  const json doc = json::parse(json_text);
  RunConfig cfg;
  reject_unknown(doc, {"datagen", "asr", "grounder", "seeds", "variants", "paper_dims",
                       "snap_threshold"},
                 "top level");
  if (doc.contains("datagen")) {
    const auto& d = doc.at("datagen");
    reject_unknown(d, {"train_size", "test_size", "commands_per_name", "noise_sigma",
                       "split_mode"},
                   "datagen");
    read(d, "train_size", cfg.datagen.train_size);
    read(d, "test_size", cfg.datagen.test_size);
    read(d, "commands_per_name", cfg.datagen.commands_per_name);
    read(d, "noise_sigma", cfg.datagen.noise_sigma);
    if (d.contains("split_mode"))
      cfg.datagen.split = data::split_mode_from_name(d.at("split_mode").get<std::string>());
  }
  if (doc.contains("asr")) {
    const auto& a = doc.at("asr");
    reject_unknown(a, {"hidden", "epochs", "batch_size", "lr", "weight_decay"}, "asr");
    read(a, "hidden", cfg.asr.hidden);
    read(a, "epochs", cfg.asr.epochs);
    read(a, "batch_size", cfg.asr.batch_size);
    read(a, "lr", cfg.asr.lr);
    read(a, "weight_decay", cfg.asr.weight_decay);
  }
  if (doc.contains("grounder")) {
    const auto& g = doc.at("grounder");
    reject_unknown(g,
                   {"d_model", "gat_dim", "gat_layers", "text_layers", "heads", "ffn_dim",
                    "max_seq", "epochs", "batch_size", "lr", "weight_decay",
                    "cosine_restarts", "restart_epochs", "restart_mult", "eta_min_frac"},
                   "grounder");
    read(g, "d_model", cfg.grounder.d_model);
    read(g, "gat_dim", cfg.grounder.gat_dim);
    read(g, "gat_layers", cfg.grounder.gat_layers);
    read(g, "text_layers", cfg.grounder.text_layers);
    read(g, "heads", cfg.grounder.heads);
    read(g, "ffn_dim", cfg.grounder.ffn_dim);
    read(g, "max_seq", cfg.grounder.max_seq);
    read(g, "epochs", cfg.grounder.epochs);
    read(g, "batch_size", cfg.grounder.batch_size);
    read(g, "lr", cfg.grounder.lr);
    read(g, "weight_decay", cfg.grounder.weight_decay);
    read(g, "cosine_restarts", cfg.grounder.cosine_restarts);
    read(g, "restart_epochs", cfg.grounder.restart_epochs);
    read(g, "restart_mult", cfg.grounder.restart_mult);
    read(g, "eta_min_frac", cfg.grounder.eta_min_frac);
  }
  if (doc.contains("seeds")) {
    cfg.seeds.clear();
    for (const auto& s : doc.at("seeds")) cfg.seeds.push_back(s.get<std::uint64_t>());
    if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must not be empty");
  }
  if (doc.contains("variants")) {
    cfg.variants.clear();
    for (const auto& v : doc.at("variants"))
      cfg.variants.push_back(variant_from_name(v.get<std::string>()));
    if (cfg.variants.empty())
      throw std::invalid_argument("config: variants must not be empty");
  }
  read(doc, "paper_dims", cfg.paper_dims);
  read(doc, "snap_threshold", cfg.snap_threshold);

  if (cfg.datagen.train_size < 1 || cfg.datagen.test_size < 1)
    throw std::invalid_argument("config: dataset sizes must be positive");
  if (cfg.asr.epochs < 1 || cfg.grounder.epochs < 1)
    throw std::invalid_argument("config: epochs must be positive");
  if (cfg.asr.lr < 0 || cfg.grounder.lr < 0)
    throw std::invalid_argument("config: learning rates must be non-negative");
  return cfg;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

std::string RunConfig::to_json() const {
  json doc;
  doc["datagen"] = {{"train_size", datagen.train_size},
                    {"test_size", datagen.test_size},
                    {"commands_per_name", datagen.commands_per_name},
                    {"noise_sigma", datagen.noise_sigma},
                    {"split_mode", data::split_mode_name(datagen.split)}};
  doc["asr"] = {{"hidden", asr.hidden},
                {"epochs", asr.epochs},
                {"batch_size", asr.batch_size},
                {"lr", asr.lr},
                {"weight_decay", asr.weight_decay}};
  doc["grounder"] = {{"d_model", grounder.d_model},
                     {"gat_dim", grounder.gat_dim},
                     {"gat_layers", grounder.gat_layers},
                     {"text_layers", grounder.text_layers},
                     {"heads", grounder.heads},
                     {"ffn_dim", grounder.ffn_dim},
                     {"max_seq", grounder.max_seq},
                     {"epochs", grounder.epochs},
                     {"batch_size", grounder.batch_size},
                     {"lr", grounder.lr},
                     {"weight_decay", grounder.weight_decay},
                     {"cosine_restarts", grounder.cosine_restarts},
                     {"restart_epochs", grounder.restart_epochs},
                     {"restart_mult", grounder.restart_mult},
                     {"eta_min_frac", grounder.eta_min_frac}};
  doc["seeds"] = seeds;
  std::vector<std::string> names;
  for (Variant v : variants) names.push_back(variant_name(v));
  doc["variants"] = names;
  doc["paper_dims"] = paper_dims;
  doc["snap_threshold"] = snap_threshold;
  return doc.dump(2);
}

}  // namespace groundkit::app
