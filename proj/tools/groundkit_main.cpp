// groundkit command line: dataset generation, recognizer and grounder
// training, evaluation, the ablation harness, latent-space reports and
// single-shot grounding.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "groundkit/app.hpp"
#include "groundkit/kernels.hpp"

using namespace groundkit;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;  // 0: keep the config's seeds
  double sigma = -1.0;     // <0: keep the config's sigma
  std::string split_mode;
  bool paper_dims = false;
};

app::RunConfig resolve_config(const CommonOpts& opts) {
  app::RunConfig cfg = opts.config_path.empty()
                           ? app::RunConfig::defaults()
                           : app::RunConfig::from_json_file(opts.config_path);
  if (opts.seed != 0) cfg.seeds = {opts.seed};
  if (opts.sigma >= 0.0) cfg.datagen.noise_sigma = opts.sigma;
  if (!opts.split_mode.empty())
    cfg.datagen.split = data::split_mode_from_name(opts.split_mode);
  if (opts.paper_dims) cfg.paper_dims = true;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration JSON");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the config seed list with one seed");
  cmd->add_option("--sigma", opts.sigma, "override the audio noise level");
  cmd->add_option("--split-mode", opts.split_mode, "dataset split: name or utterance")
      ->check(CLI::IsMember({"name", "utterance"}));
  cmd->add_flag("--paper-dims", opts.paper_dims, "use publication-scale model widths");
}

std::vector<std::string> words_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

phon::AudioFeatures audio_from_json_file(const std::string& path, int feature_dim) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open audio file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const auto doc = nlohmann::json::parse(ss.str());
  const auto& frames = doc.at("frames");
  phon::AudioFeatures audio;
  audio.frames = num::Tensor::zeros({phon::kFrames, feature_dim});
  audio.valid_length = static_cast<int>(frames.size());
  for (int t = 0; t < audio.valid_length; ++t)
    for (int c = 0; c < feature_dim; ++c)
      audio.frames.at(t, c) = frames.at(static_cast<std::size_t>(t)).at(static_cast<std::size_t>(c)).get<double>();
  return audio;
}

int run_dataset_gen(const CommonOpts& opts) {
  const auto cfg = resolve_config(opts);
  const auto phonetics = phon::PhoneticModel::defaults();
  const auto vocab = data::ObjectVocabulary::defaults();
  data::DatagenConfig dcfg = cfg.datagen;
  dcfg.seed = cfg.seeds.front();
  const auto ds =
      data::build_dataset(vocab, data::CommandTemplate::defaults(), phonetics, dcfg);
  const auto issues = data::lint_dataset(ds.train, vocab);
  if (!issues.empty()) throw std::runtime_error("dataset lint failed: " + issues.front());

  fs::create_directories(opts.out_dir);
  data::save_dataset_jsonl(opts.out_dir + "/train.jsonl", ds.train);
  data::save_dataset_jsonl(opts.out_dir + "/test.jsonl", ds.test);
  phonetics.save_json_file(opts.out_dir + "/phonetics.json");
  std::ofstream cfg_os(opts.out_dir + "/run_config.json");
  cfg_os << cfg.to_json() << '\n';
  std::cout << "wrote " << ds.train.size() << " train and " << ds.test.size()
            << " test samples to " << opts.out_dir << "\n"
            << "train hash " << app::hash_file(opts.out_dir + "/train.jsonl") << "\n";
  return 0;
}

int run_train_asr(const CommonOpts& opts, const std::string& dataset_dir) {
  const auto cfg = resolve_config(opts);
  const auto phonetics = dataset_dir.empty()
                             ? phon::PhoneticModel::defaults()
                             : phon::PhoneticModel::from_json_file(dataset_dir + "/phonetics.json");
  const auto train = data::load_dataset_jsonl(dataset_dir + "/train.jsonl",
                                              phonetics.inventory.feature_dim());
  asr::AsrConfig acfg;
  acfg.feature_dim = phonetics.inventory.feature_dim();
  acfg.alphabet = phonetics.inventory.size();
  acfg.hidden = cfg.asr.hidden;
  acfg.seed = cfg.seeds.front();
  auto model = asr::AsrModel::init(acfg);

  std::vector<asr::AsrSample> samples;
  for (const auto& s : train) {
    asr::AsrSample a;
    a.audio = s.audio;
    a.label = phon::text_to_phonemes(s.command_text, phonetics).ids;
    a.words = words_of(s.command_text);
    samples.push_back(std::move(a));
  }
  asr::AsrTrainConfig tcfg;
  tcfg.epochs = cfg.asr.epochs;
  tcfg.batch_size = cfg.asr.batch_size;
  tcfg.lr = cfg.asr.lr;
  tcfg.weight_decay = cfg.asr.weight_decay;
  tcfg.seed = cfg.seeds.front();
  const auto log = asr::train_asr(model, samples, tcfg, phonetics);
  fs::create_directories(opts.out_dir);
  asr::save_loss_log(opts.out_dir + "/asr_loss_log.csv", log);
  app::save_asr_bundle(opts.out_dir, model, phonetics);
  std::cout << "final mean ctc loss " << log.back().mean_ctc_loss << ", train wer "
            << log.back().greedy_word_error_rate * 100 << "%\n";
  return 0;
}

int run_eval(const CommonOpts& opts, const std::string& dataset_dir,
             const std::string& asr_dir, const std::string& grounder_dir,
             const std::string& variant) {
  const auto cfg = resolve_config(opts);
  phon::PhoneticModel phonetics;
  auto asr_model = app::load_asr_bundle(asr_dir, &phonetics);
  auto grounder = app::load_grounder_bundle(grounder_dir, variant);
  const auto vocab = data::ObjectVocabulary::defaults();
  const auto test = data::load_dataset_jsonl(dataset_dir + "/test.jsonl",
                                             phonetics.inventory.feature_dim());
  int correct = 0;
  double wer = 0.0;
  for (const auto& s : test) {
    const auto decoded = asr::decode_words(asr_model, s.audio, phonetics, cfg.snap_threshold);
    wer += asr::word_error_rate(decoded, words_of(s.command_text));
    std::string decoded_text;
    for (const auto& w : decoded) decoded_text += decoded_text.empty() ? w : " " + w;
    std::vector<double> speech;
    if (grounder.config().use_speech_token) speech = asr_model.pooled_latent(s.audio);
    const auto result =
        grounder.ground(s.graph, speech, grounder.tokenize(decoded_text));
    if (result.predicted_class == s.target_class) ++correct;
  }
  nlohmann::json out;
  out["samples"] = test.size();
  out["accuracy_pct"] = 100.0 * correct / static_cast<double>(test.size());
  out["asr_wer_pct"] = 100.0 * wer / static_cast<double>(test.size());
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_ablate(const CommonOpts& opts) {
  const auto cfg = resolve_config(opts);
  const auto phonetics = phon::PhoneticModel::defaults();
  const auto vocab = data::ObjectVocabulary::defaults();
  const auto report = app::run_ablation(cfg, phonetics, vocab, opts.out_dir);
  std::ofstream cfg_os(opts.out_dir + "/run_config.json");
  cfg_os << cfg.to_json() << '\n';
  for (const auto& row : report.rows)
    if (row.seed == "mean")
      std::cout << row.method << " (" << row.input << "): " << row.accuracy_pct << "%\n";
  std::cout << "report written to " << opts.out_dir << "/report.{csv,md}\n";
  return 0;
}

int run_pca(const CommonOpts& opts, const std::string& asr_dir,
            const std::string& words_file) {
  phon::PhoneticModel phonetics;
  const auto model = app::load_asr_bundle(asr_dir, &phonetics);
  std::vector<std::string> words;
  if (words_file.empty()) {
    words = phon::default_latent_word_bank();
  } else {
    std::ifstream is(words_file);
    if (!is) throw std::runtime_error("cannot open word list " + words_file);
    std::string w;
    while (is >> w) words.push_back(w);
  }
  const auto report = app::run_pca_report(model, phonetics, words);
  fs::create_directories(opts.out_dir);
  app::write_pca_csv(opts.out_dir + "/pca.csv", report);
  app::write_pca_svg(opts.out_dir + "/pca.svg", report);
  std::cout << "points " << report.points.size() << ", intra/inter ratio " << report.ratio
            << "\n";
  return 0;
}

int run_ground(const CommonOpts& opts, const std::string& asr_dir,
               const std::string& grounder_dir, const std::string& variant,
               const std::string& scene_path, const std::string& text,
               const std::string& audio_path) {
  (void)opts;
  phon::PhoneticModel phonetics;
  auto asr_model = app::load_asr_bundle(asr_dir, &phonetics);
  auto grounder = app::load_grounder_bundle(grounder_dir, variant);

  const auto world = scene::world_from_jsonl_file(scene_path);
  const auto graph = scene::build_scene_graph(world);

  phon::AudioFeatures audio;
  if (!audio_path.empty()) {
    audio = audio_from_json_file(audio_path, phonetics.inventory.feature_dim());
  } else if (!text.empty()) {
    audio = phon::synthesize_audio(phon::text_to_phonemes(text, phonetics),
                                   phonetics.inventory, 0.0, 17);
  } else {
    throw std::runtime_error("ground: provide --text or --audio");
  }

  const auto decoded = asr::decode_words(asr_model, audio, phonetics);
  std::string decoded_text;
  for (const auto& w : decoded) decoded_text += decoded_text.empty() ? w : " " + w;
  std::vector<double> speech;
  if (grounder.config().use_speech_token) speech = asr_model.pooled_latent(audio);
  const auto result = grounder.ground(graph, speech, grounder.tokenize(decoded_text));

  nlohmann::json out;
  out["decoded_text"] = decoded_text;
  out["predicted_class"] = result.predicted_class;
  nlohmann::json dist = nlohmann::json::object();
  for (std::size_t c = 0; c < result.distribution.size(); ++c)
    dist[grounder.config().class_names[c]] = result.distribution[c];
  out["distribution"] = dist;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_scene_graph(const std::string& detections_path, const std::string& out_path,
                    double epsilon) {
  const auto world = scene::world_from_jsonl_file(detections_path);
  const auto graph = scene::build_scene_graph(world, epsilon);
  const std::string json = scene::scene_graph_to_json(graph);
  if (out_path.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot write " + out_path);
    os << json << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"speech-to-scene-graph grounding toolkit"};
  cli.require_subcommand(1);

  CommonOpts opts;
  std::string dataset_dir, asr_dir, grounder_dir, words_file, scene_path, text, audio_path;
  std::string variant = "fusion-full";
  std::string detections_path, out_path;
  double epsilon = scene::kDefaultEpsilon;

  auto* dataset_gen = cli.add_subcommand("dataset-gen", "generate a command dataset");
  add_common(dataset_gen, opts);

  auto* train_asr_cmd = cli.add_subcommand("train-asr", "train the speech recognizer");
  add_common(train_asr_cmd, opts);
  train_asr_cmd->add_option("--dataset", dataset_dir, "directory with train.jsonl")
      ->required();

  auto* eval_cmd = cli.add_subcommand("eval", "evaluate a trained grounder");
  add_common(eval_cmd, opts);
  eval_cmd->add_option("--dataset", dataset_dir, "directory with test.jsonl")->required();
  eval_cmd->add_option("--asr", asr_dir, "directory with asr.gkpt/asr.json")->required();
  eval_cmd->add_option("--grounder", grounder_dir, "directory with the grounder bundle")
      ->required();
  eval_cmd->add_option("--variant", variant, "grounder bundle tag");

  auto* ablate = cli.add_subcommand("ablate", "train and compare all grounder variants");
  add_common(ablate, opts);

  auto* pca = cli.add_subcommand("pca", "project word latents to two dimensions");
  add_common(pca, opts);
  pca->add_option("--asr", asr_dir, "directory with asr.gkpt/asr.json")->required();
  pca->add_option("--words", words_file, "newline-separated word list");

  auto* ground_cmd = cli.add_subcommand("ground", "ground one command in one scene");
  add_common(ground_cmd, opts);
  ground_cmd->add_option("--asr", asr_dir)->required();
  ground_cmd->add_option("--grounder", grounder_dir)->required();
  ground_cmd->add_option("--variant", variant, "grounder bundle tag");
  ground_cmd->add_option("--scene", scene_path, "detection JSON Lines file")->required();
  ground_cmd->add_option("--text", text, "command text to synthesize");
  ground_cmd->add_option("--audio", audio_path, "audio feature JSON file");

  auto* scene_cmd = cli.add_subcommand("scene-graph", "build a scene graph from detections");
  scene_cmd->add_option("--detections", detections_path, "detection JSON Lines file")
      ->required();
  scene_cmd->add_option("--out", out_path, "write the graph JSON here instead of stdout");
  scene_cmd->add_option("--epsilon", epsilon, "predicate dead band in meters");

  // train-grounder shares the ablation machinery for one variant
  auto* train_grounder_cmd =
      cli.add_subcommand("train-grounder", "train a single grounder variant");
  add_common(train_grounder_cmd, opts);
  train_grounder_cmd->add_option("--variant", variant, "model variant")
      ->check(CLI::IsMember({"text-asr", "text-reference", "fusion-no-speech",
                             "fusion-full"}));

  CLI11_PARSE(cli, argc, argv);

  try {
    if (*dataset_gen) return run_dataset_gen(opts);
    if (*train_asr_cmd) return run_train_asr(opts, dataset_dir);
    if (*eval_cmd) return run_eval(opts, dataset_dir, asr_dir, grounder_dir, variant);
    if (*ablate) return run_ablate(opts);
    if (*pca) return run_pca(opts, asr_dir, words_file);
    if (*ground_cmd)
      return run_ground(opts, asr_dir, grounder_dir, variant, scene_path, text, audio_path);
    if (*scene_cmd) return run_scene_graph(detections_path, out_path, epsilon);
    if (*train_grounder_cmd) {
      auto cfg = resolve_config(opts);
      cfg.variants = {app::variant_from_name(variant)};
      const auto phonetics = phon::PhoneticModel::defaults();
      const auto vocab = data::ObjectVocabulary::defaults();
      app::run_ablation(cfg, phonetics, vocab, opts.out_dir);
      std::cout << "trained " << variant << "; artifacts under " << opts.out_dir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
