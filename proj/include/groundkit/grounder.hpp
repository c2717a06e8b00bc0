#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "groundkit/checkpoint.hpp"
#include "groundkit/optim.hpp"
#include "groundkit/scenegraph.hpp"
#include "groundkit/tape.hpp"

namespace groundkit::ground {

struct GrounderConfig {
  int d_model = 64;
  int gat_dim = 32;    // scene-graph vector width
  int gat_layers = 2;
  int text_layers = 2;
  int heads = 4;
  int ffn_dim = 128;
  int speech_dim = 32;  // recognizer latent width
  int max_seq = 16;
  double leaky_slope = 0.2;
  bool use_speech_token = true;  // drop the speech slot for text-only variants
  std::uint64_t seed = 1;
  std::vector<std::string> class_names;
  std::vector<std::string> vocab_words;  // sorted; reserved tokens come first

  // latent widths matching the source publication scale
  void apply_paper_dims();
};

// reserved token ids
constexpr int kPad = 0;
constexpr int kCls = 1;
constexpr int kSep = 2;
constexpr int kUnk = 3;
constexpr int kReservedTokens = 4;

struct GrounderSample {
  scene::SceneGraph graph;
  std::vector<int> tokens;      // token ids of the command text
  std::vector<double> speech;   // pooled latent, zeros for the muted variant
  int target = 0;               // class index
};

struct GroundResult {
  std::string predicted_class;
  int predicted_index = -1;
  std::vector<double> distribution;  // over class_names, masked classes at 0
};

// mean over the first valid_length latent rows
std::vector<double> pool_speech(const num::Tensor& latents, int valid_length);

// class indices whose name matches some node text (exactly or as the
// trailing words after attributes)
std::vector<bool> classes_present(const scene::SceneGraph& graph,
                                  const std::vector<std::string>& class_names);

// whitespace tokenization against a sorted vocabulary; unknown words
// map to the reserved token
int token_id_in(const std::vector<std::string>& sorted_vocab, const std::string& word);
std::vector<int> tokenize_text(const std::vector<std::string>& sorted_vocab,
                               const std::string& text);

// Graph-attention encoder over node/edge text embeddings, max-pool
// readout, then a token transformer over [CLS], the projected graph
// vector, the projected speech vector, the command tokens and [SEP];
// the [CLS] output feeds a linear classifier over object classes.
class Grounder {
 public:
  static Grounder init(const GrounderConfig& cfg);

  const GrounderConfig& config() const { return cfg_; }
  int token_id(const std::string& word) const;
  std::vector<int> tokenize(const std::string& text) const;

  std::vector<num::Tensor*> parameters();
  std::vector<const num::Tensor*> parameters() const;
  std::vector<std::string> parameter_names() const;
  num::NamedTensors named_parameters() const;
  void load_parameters(const num::NamedTensors& tensors);

  // tape-bound parameter leaves, registered once per tape
  struct Bound {
    std::vector<num::Tensor*> params;
    std::vector<int> ids;
    bool train = false;
  };
  Bound bind(num::Tape& tape, bool train);

  struct GraphEncoding {
    int node_features = -1;  // N x d_model
    int edge_features = -1;  // N*N x d_model, row-major pairs
  };
  GraphEncoding encode_node_edge_text(num::Tape& tape, const Bound& bound,
                                      const scene::SceneGraph& graph) const;

  // returns the graph vector node id (gat_dim)
  int gat_forward(num::Tape& tape, const Bound& bound, const GraphEncoding& enc,
                  int num_nodes) const;

  // full fusion forward to class logits (vector of |classes|)
  int fusion_logits(num::Tape& tape, const Bound& bound, const GrounderSample& sample) const;

  // single-sample inference with graph-presence masking
  GroundResult ground(const scene::SceneGraph& graph, const std::vector<double>& speech,
                      const std::vector<int>& tokens);

 private:
  Grounder() = default;

  struct TextLayer {
    num::Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    num::Tensor ln1_g, ln1_b;
    num::Tensor ffn_w1, ffn_b1, ffn_w2, ffn_b2;
    num::Tensor ln2_g, ln2_b;
  };
  struct GatLayer {
    num::Tensor w;     // in x gat_dim
    num::Tensor we;    // d_model x gat_dim
    num::Tensor attn;  // 3*gat_dim x 1
  };

  GrounderConfig cfg_;
  num::Tensor embedding_;  // |V| x d_model
  num::Tensor pos_;        // max_seq x d_model
  std::vector<GatLayer> gat_;
  std::vector<TextLayer> text_;
  num::Tensor sg_proj_w_, sg_proj_b_;
  num::Tensor speech_proj_w_, speech_proj_b_;
  num::Tensor cls_w_, cls_b_;
};

struct GrounderTrainConfig {
  int epochs = 30;
  int batch_size = 8;
  double lr = 1e-3;  // schedule peak; zero freezes the parameters
  double weight_decay = 0.01;
  bool cosine_restarts = true;
  int restart_epochs = 10;  // first period, in epochs
  int restart_mult = 2;
  double eta_min_frac = 0.01;
  std::uint64_t seed = 1;
};

struct GrounderEpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
};

std::vector<GrounderEpochStats> train_grounder(Grounder& model,
                                               const std::vector<GrounderSample>& train,
                                               const std::vector<GrounderSample>& test,
                                               const GrounderTrainConfig& cfg);

double evaluate_accuracy(Grounder& model, const std::vector<GrounderSample>& samples);

// metric log CSV: epoch, split, accuracy, mean_loss
void save_metric_log(const std::string& path, const std::vector<GrounderEpochStats>& stats);

}  // namespace groundkit::ground
