#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "groundkit/app.hpp"

namespace groundkit::app {

std::string hash_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("hash_file: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

void write_report_csv(const std::string& path, const AblationReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot write " + path);
  os << "method,input,seed,sigma,dataset_hash,asr_wer_pct,accuracy_pct,status\n";
  char buf[64];
  for (const auto& row : report.rows) {
    os << row.method << ',' << row.input << ',' << row.seed << ',';
    std::snprintf(buf, sizeof buf, "%.4f", row.sigma);
    os << buf << ',' << row.dataset_hash << ',';
    std::snprintf(buf, sizeof buf, "%.2f", row.asr_wer_pct);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.2f", row.accuracy_pct);
    std::string status = row.status;
    for (char& c : status)
      if (c == ',' || c == '\n') c = ';';
    os << buf << ',' << status << '\n';
  }
}

void write_report_md(const std::string& path, const AblationReport& report,
                     const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot write " + path);
  os << "# Grounding ablation report\n\n";
  os << "Noise sigma: " << cfg.datagen.noise_sigma
     << "; split mode: " << data::split_mode_name(cfg.datagen.split)
     << "; train/test: " << cfg.datagen.train_size << "/" << cfg.datagen.test_size << "\n\n";
  os << "Mean recognizer word error rate on the test split: ";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", report.mean_wer_pct());
  os << buf << "\n\n";
  os << "| Method | Input | Seed | Accuracy (%) | Status |\n";
  os << "|--------|-------|------|--------------|--------|\n";
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.2f", row.accuracy_pct);
    os << "| " << row.method << " | " << row.input << " | " << row.seed << " | " << buf
       << " | " << row.status << " |\n";
  }
  os << "\nPer-seed dataset hashes:\n\n";
  for (const auto& row : report.rows) {
    if (row.seed == "mean") continue;
    os << "- seed " << row.seed << " (" << row.method << "): `" << row.dataset_hash
       << "`\n";
  }
}

void write_pca_csv(const std::string& path, const PcaReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot write " + path);
  os << "word,group,x,y\n";
  char buf[96];
  for (const auto& p : report.points) {
    std::snprintf(buf, sizeof buf, "%.9f,%.9f", p.x, p.y);
    os << p.word << ',' << p.group << ',' << buf << '\n';
  }
}

void write_pca_svg(const std::string& path, const PcaReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("report: cannot write " + path);
  const int size = 640, margin = 60;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& p : report.points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span_x = max_x - min_x > 1e-12 ? max_x - min_x : 1.0;
  const double span_y = max_y - min_y > 1e-12 ? max_y - min_y : 1.0;
  auto sx = [&](double x) { return margin + (x - min_x) / span_x * (size - 2 * margin); };
  auto sy = [&](double y) { return size - margin - (y - min_y) / span_y * (size - 2 * margin); };

  const char* palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                           "#8c564b", "#17becf"};
  std::vector<std::string> groups;
  for (const auto& p : report.points)
    if (std::find(groups.begin(), groups.end(), p.group) == groups.end())
      groups.push_back(p.group);

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
     << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "  <text x=\"" << size / 2
     << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << "Word latents, top two principal components</text>\n";
  char buf[256];
  for (const auto& p : report.points) {
    const std::size_t gi =
        static_cast<std::size_t>(std::find(groups.begin(), groups.end(), p.group) - groups.begin());
    std::snprintf(buf, sizeof buf,
                  "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\" fill=\"%s\" fill-opacity=\"0.8\">"
                  "<title>%s</title></circle>\n",
                  sx(p.x), sy(p.y), palette[gi % 7], p.word.c_str());
    os << buf;
  }
  double ly = margin;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    std::snprintf(buf, sizeof buf,
                  "  <circle cx=\"%d\" cy=\"%.2f\" r=\"5\" fill=\"%s\"/>"
                  "<text x=\"%d\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"13\">"
                  "starts with '%s'</text>\n",
                  size - margin - 90, ly, palette[gi % 7], size - margin - 78, ly + 4,
                  groups[gi].c_str());
    os << buf;
    ly += 20;
  }
  std::snprintf(buf, sizeof buf,
                "  <text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"13\">"
                "intra/inter distance ratio: %.3f</text>\n",
                margin, size - 24, report.ratio);
  os << buf;
  os << "</svg>\n";
}

void save_asr_bundle(const std::string& dir, const asr::AsrModel& model,
                     const phon::PhoneticModel& phonetics) {
  std::filesystem::create_directories(dir);
  num::save_checkpoint(dir + "/asr.gkpt", model.named_parameters());
  nlohmann::json meta;
  meta["config"] = {{"frames", model.cfg.frames},
                    {"feature_dim", model.cfg.feature_dim},
                    {"hidden", model.cfg.hidden},
                    {"kernel", model.cfg.kernel},
                    {"alphabet", model.cfg.alphabet},
                    {"seed", model.cfg.seed}};
  meta["phonetics"] = nlohmann::json::parse(phonetics.to_json());
  std::ofstream os(dir + "/asr.json");
  if (!os) throw std::runtime_error("bundle: cannot write " + dir + "/asr.json");
  os << meta.dump(2) << '\n';
}

asr::AsrModel load_asr_bundle(const std::string& dir, phon::PhoneticModel* phonetics_out) {
  std::ifstream is(dir + "/asr.json");
  if (!is) throw std::runtime_error("bundle: cannot open " + dir + "/asr.json");
  std::stringstream ss;
  ss << is.rdbuf();
  const auto meta = nlohmann::json::parse(ss.str());
  asr::AsrConfig cfg;
  cfg.frames = meta.at("config").at("frames").get<int>();
  cfg.feature_dim = meta.at("config").at("feature_dim").get<int>();
  cfg.hidden = meta.at("config").at("hidden").get<int>();
  cfg.kernel = meta.at("config").at("kernel").get<int>();
  cfg.alphabet = meta.at("config").at("alphabet").get<int>();
  cfg.seed = meta.at("config").at("seed").get<std::uint64_t>();
  auto model = asr::AsrModel::init(cfg);
  model.load_parameters(num::load_checkpoint(dir + "/asr.gkpt"));
  if (phonetics_out)
    *phonetics_out = phon::PhoneticModel::from_json(meta.at("phonetics").dump());
  return model;
}

void save_grounder_bundle(const std::string& dir, const ground::Grounder& model,
                          const std::string& tag) {
  std::filesystem::create_directories(dir);
  num::save_checkpoint(dir + "/" + tag + ".gkpt", model.named_parameters());
  const auto& cfg = model.config();
  nlohmann::json meta;
  meta["config"] = {{"d_model", cfg.d_model},
                    {"gat_dim", cfg.gat_dim},
                    {"gat_layers", cfg.gat_layers},
                    {"text_layers", cfg.text_layers},
                    {"heads", cfg.heads},
                    {"ffn_dim", cfg.ffn_dim},
                    {"speech_dim", cfg.speech_dim},
                    {"max_seq", cfg.max_seq},
                    {"leaky_slope", cfg.leaky_slope},
                    {"use_speech_token", cfg.use_speech_token},
                    {"seed", cfg.seed},
                    {"class_names", cfg.class_names},
                    {"vocab_words", cfg.vocab_words}};
  std::ofstream os(dir + "/" + tag + ".json");
  if (!os) throw std::runtime_error("bundle: cannot write grounder metadata");
  os << meta.dump(2) << '\n';
}

ground::Grounder load_grounder_bundle(const std::string& dir, const std::string& tag) {
  std::ifstream is(dir + "/" + tag + ".json");
  if (!is) throw std::runtime_error("bundle: cannot open " + dir + "/" + tag + ".json");
  std::stringstream ss;
  ss << is.rdbuf();
  const auto meta = nlohmann::json::parse(ss.str()).at("config");
  ground::GrounderConfig cfg;
  cfg.d_model = meta.at("d_model").get<int>();
  cfg.gat_dim = meta.at("gat_dim").get<int>();
  cfg.gat_layers = meta.at("gat_layers").get<int>();
  cfg.text_layers = meta.at("text_layers").get<int>();
  cfg.heads = meta.at("heads").get<int>();
  cfg.ffn_dim = meta.at("ffn_dim").get<int>();
  cfg.speech_dim = meta.at("speech_dim").get<int>();
  cfg.max_seq = meta.at("max_seq").get<int>();
  cfg.leaky_slope = meta.at("leaky_slope").get<double>();
  cfg.use_speech_token = meta.at("use_speech_token").get<bool>();
  cfg.seed = meta.at("seed").get<std::uint64_t>();
  cfg.class_names = meta.at("class_names").get<std::vector<std::string>>();
  cfg.vocab_words = meta.at("vocab_words").get<std::vector<std::string>>();
  auto model = ground::Grounder::init(cfg);
  model.load_parameters(num::load_checkpoint(dir + "/" + tag + ".gkpt"));
  return model;
}

}  // namespace groundkit::app
