#include "groundkit/grounder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "groundkit/rng.hpp"

namespace groundkit::ground {

namespace {
constexpr double kMaskValue = -1e30;
}

void GrounderConfig::apply_paper_dims() {
  d_model = 756;
  gat_dim = 128;
  speech_dim = 256;
}

std::vector<double> pool_speech(const num::Tensor& latents, int valid_length) {
  if (latents.rank() != 2) throw std::invalid_argument("pool_speech: rank-2 latents");
  if (valid_length < 1 || valid_length > latents.rows())
    throw std::invalid_argument("pool_speech: valid_length out of range");
  std::vector<double> out(static_cast<std::size_t>(latents.cols()), 0.0);
  for (int t = 0; t < valid_length; ++t)
    for (int h = 0; h < latents.cols(); ++h) out[static_cast<std::size_t>(h)] += latents.at(t, h);
  for (double& v : out) v /= valid_length;
  return out;
}

std::vector<bool> classes_present(const scene::SceneGraph& graph,
                                  const std::vector<std::string>& class_names) {
  std::vector<bool> present(class_names.size(), false);
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    const std::string& cls = class_names[c];
    for (const auto& node : graph.nodes) {
      const bool match = node.text == cls ||
                         (node.text.size() > cls.size() + 1 &&
                          node.text.compare(node.text.size() - cls.size(), cls.size(), cls) == 0 &&
                          node.text[node.text.size() - cls.size() - 1] == ' ');
      if (match) {
        present[c] = true;
        break;
      }
    }
  }
  return present;
}

Grounder Grounder::init(const GrounderConfig& cfg) {
  if (cfg.class_names.empty()) throw std::invalid_argument("grounder: no classes");
  if (cfg.vocab_words.empty()) throw std::invalid_argument("grounder: empty vocabulary");
  if (cfg.d_model % cfg.heads != 0)
    throw std::invalid_argument("grounder: d_model must divide into heads");

  Grounder g;
  g.cfg_ = cfg;
  Rng rng(derive_seed(cfg.seed, 0x6D));
  const int vocab = kReservedTokens + static_cast<int>(cfg.vocab_words.size());
  g.embedding_ = num::Tensor::xavier(vocab, cfg.d_model, rng);
  g.pos_ = num::Tensor::xavier(cfg.max_seq, cfg.d_model, rng);
  for (int l = 0; l < cfg.gat_layers; ++l) {
    GatLayer layer;
    const int in = l == 0 ? cfg.d_model : cfg.gat_dim;
    layer.w = num::Tensor::xavier(in, cfg.gat_dim, rng);
    layer.we = num::Tensor::xavier(cfg.d_model, cfg.gat_dim, rng);
    layer.attn = num::Tensor::xavier(3 * cfg.gat_dim, 1, rng);
    g.gat_.push_back(std::move(layer));
  }
  for (int l = 0; l < cfg.text_layers; ++l) {
    TextLayer layer;
    layer.wq = num::Tensor::xavier(cfg.d_model, cfg.d_model, rng);
    layer.bq = num::Tensor::zeros({cfg.d_model});
    layer.wk = num::Tensor::xavier(cfg.d_model, cfg.d_model, rng);
    layer.bk = num::Tensor::zeros({cfg.d_model});
    layer.wv = num::Tensor::xavier(cfg.d_model, cfg.d_model, rng);
    layer.bv = num::Tensor::zeros({cfg.d_model});
    layer.wo = num::Tensor::xavier(cfg.d_model, cfg.d_model, rng);
    layer.bo = num::Tensor::zeros({cfg.d_model});
    layer.ln1_g = num::Tensor::full({cfg.d_model}, 1.0);
    layer.ln1_b = num::Tensor::zeros({cfg.d_model});
    layer.ffn_w1 = num::Tensor::xavier(cfg.d_model, cfg.ffn_dim, rng);
    layer.ffn_b1 = num::Tensor::zeros({cfg.ffn_dim});
    layer.ffn_w2 = num::Tensor::xavier(cfg.ffn_dim, cfg.d_model, rng);
    layer.ffn_b2 = num::Tensor::zeros({cfg.d_model});
    layer.ln2_g = num::Tensor::full({cfg.d_model}, 1.0);
    layer.ln2_b = num::Tensor::zeros({cfg.d_model});
    g.text_.push_back(std::move(layer));
  }
  g.sg_proj_w_ = num::Tensor::xavier(cfg.gat_dim, cfg.d_model, rng);
  g.sg_proj_b_ = num::Tensor::zeros({cfg.d_model});
  g.speech_proj_w_ = num::Tensor::xavier(cfg.speech_dim, cfg.d_model, rng);
  g.speech_proj_b_ = num::Tensor::zeros({cfg.d_model});
  g.cls_w_ = num::Tensor::xavier(cfg.d_model, static_cast<int>(cfg.class_names.size()), rng);
  g.cls_b_ = num::Tensor::zeros({static_cast<int>(cfg.class_names.size())});
  return g;
}

int token_id_in(const std::vector<std::string>& sorted_vocab, const std::string& word) {
  const auto it = std::lower_bound(sorted_vocab.begin(), sorted_vocab.end(), word);
  if (it != sorted_vocab.end() && *it == word)
    return kReservedTokens + static_cast<int>(it - sorted_vocab.begin());
  return kUnk;
}

std::vector<int> tokenize_text(const std::vector<std::string>& sorted_vocab,
                               const std::string& text) {
  std::vector<int> ids;
  std::istringstream ss(text);
  std::string word;
  while (ss >> word) ids.push_back(token_id_in(sorted_vocab, word));
  return ids;
}

int Grounder::token_id(const std::string& word) const {
  return token_id_in(cfg_.vocab_words, word);
}

std::vector<int> Grounder::tokenize(const std::string& text) const {
  return tokenize_text(cfg_.vocab_words, text);
}

std::vector<num::Tensor*> Grounder::parameters() {
  std::vector<num::Tensor*> out = {&embedding_, &pos_};
  for (auto& l : gat_) {
    out.push_back(&l.w);
    out.push_back(&l.we);
    out.push_back(&l.attn);
  }
  for (auto& l : text_) {
    for (num::Tensor* t : {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo,
                           &l.ln1_g, &l.ln1_b, &l.ffn_w1, &l.ffn_b1, &l.ffn_w2, &l.ffn_b2,
                           &l.ln2_g, &l.ln2_b})
      out.push_back(t);
  }
  out.push_back(&sg_proj_w_);
  out.push_back(&sg_proj_b_);
  if (cfg_.use_speech_token) {
    out.push_back(&speech_proj_w_);
    out.push_back(&speech_proj_b_);
  }
  out.push_back(&cls_w_);
  out.push_back(&cls_b_);
  return out;
}

std::vector<const num::Tensor*> Grounder::parameters() const {
  auto mutable_self = const_cast<Grounder*>(this);
  std::vector<const num::Tensor*> out;
  for (num::Tensor* t : mutable_self->parameters()) out.push_back(t);
  return out;
}

std::vector<std::string> Grounder::parameter_names() const {
  std::vector<std::string> out = {"grounder.embedding", "grounder.pos"};
  for (std::size_t l = 0; l < gat_.size(); ++l) {
    const std::string p = "grounder.gat" + std::to_string(l) + ".";
    out.push_back(p + "w");
    out.push_back(p + "we");
    out.push_back(p + "attn");
  }
  for (std::size_t l = 0; l < text_.size(); ++l) {
    const std::string p = "grounder.text" + std::to_string(l) + ".";
    for (const char* n : {"wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo", "ln1_g", "ln1_b",
                          "ffn_w1", "ffn_b1", "ffn_w2", "ffn_b2", "ln2_g", "ln2_b"})
      out.push_back(p + n);
  }
  out.push_back("grounder.sg_proj.w");
  out.push_back("grounder.sg_proj.b");
  if (cfg_.use_speech_token) {
    out.push_back("grounder.speech_proj.w");
    out.push_back("grounder.speech_proj.b");
  }
  out.push_back("grounder.cls.w");
  out.push_back("grounder.cls.b");
  return out;
}

num::NamedTensors Grounder::named_parameters() const {
  num::NamedTensors out;
  const auto names = parameter_names();
  const auto params = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) out.emplace_back(names[i], *params[i]);
  return out;
}

void Grounder::load_parameters(const num::NamedTensors& tensors) {
  const auto names = parameter_names();
  auto params = parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    bool found = false;
    for (const auto& [name, tensor] : tensors) {
      if (name != names[i]) continue;
      if (tensor.shape != params[i]->shape)
        throw std::runtime_error("grounder: checkpoint shape mismatch for " + name);
      *params[i] = tensor;
      found = true;
      break;
    }
    if (!found) throw std::runtime_error("grounder: checkpoint missing " + names[i]);
  }
}

Grounder::Bound Grounder::bind(num::Tape& tape, bool train) {
  Bound bound;
  bound.train = train;
  bound.params = parameters();
  bound.ids.reserve(bound.params.size());
  for (num::Tensor* p : bound.params) {
    num::Tensor copy = *p;
    copy.requires_grad = train;
    bound.ids.push_back(tape.leaf(std::move(copy)));
  }
  return bound;
}

Grounder::GraphEncoding Grounder::encode_node_edge_text(num::Tape& tape, const Bound& bound,
                                                        const scene::SceneGraph& graph) const {
  if (graph.nodes.empty())
    throw std::invalid_argument("encode_node_edge_text: empty graph");
  const int emb = bound.ids[0];
  const int n = static_cast<int>(graph.nodes.size());

  // texts repeat heavily (nine distinct predicates), encode each once
  std::map<std::string, int> encoded;
  auto encode_text = [&](const std::string& text) {
    const auto it = encoded.find(text);
    if (it != encoded.end()) return it->second;
    std::vector<int> ids = tokenize(text);
    if (ids.empty()) ids.push_back(kUnk);
    const int vec = tape.mean_axis(tape.embedding(emb, ids), 0);
    encoded.emplace(text, vec);
    return vec;
  };

  std::vector<int> node_vecs;
  node_vecs.reserve(static_cast<std::size_t>(n));
  for (const auto& node : graph.nodes) node_vecs.push_back(encode_text(node.text));

  // dense pair table with zeros on the diagonal (never attended)
  const int zero_vec = tape.constant(num::Tensor::zeros({cfg_.d_model}));
  std::vector<int> edge_vecs(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), zero_vec);
  for (const auto& edge : graph.edges)
    edge_vecs[static_cast<std::size_t>(edge.from) * static_cast<std::size_t>(n) +
              static_cast<std::size_t>(edge.to)] = encode_text(edge.predicate);

  GraphEncoding enc;
  enc.node_features = tape.stack_rows(node_vecs);
  enc.edge_features = tape.stack_rows(edge_vecs);
  return enc;
}

int Grounder::gat_forward(num::Tape& tape, const Bound& bound, const GraphEncoding& enc,
                          int num_nodes) const {
  if (num_nodes < 1) throw std::invalid_argument("gat_forward: empty graph");
  const int n = num_nodes;
  const int k = cfg_.gat_dim;

  // parameter ids: embedding, pos, then gat layers
  std::size_t cursor = 2;
  int x = enc.node_features;

  num::Tensor mask = num::Tensor::zeros({n, n});
  for (int i = 0; i < n; ++i) mask.at(i, i) = kMaskValue;
  const int diag_mask = tape.constant(std::move(mask));

  for (int l = 0; l < cfg_.gat_layers; ++l) {
    const int w = bound.ids[cursor++];
    const int we = bound.ids[cursor++];
    const int attn = bound.ids[cursor++];
    const int xw = tape.matmul(x, w);       // n x k
    const int ew = tape.matmul(enc.edge_features, we);  // n*n x k
    const int a_src = tape.slice_rows(attn, 0, k);
    const int a_dst = tape.slice_rows(attn, k, 2 * k);
    const int a_edge = tape.slice_rows(attn, 2 * k, 3 * k);
    const int score_src = tape.reshape(tape.matmul(xw, a_src), {n});
    const int score_dst = tape.reshape(tape.matmul(xw, a_dst), {n});
    const int score_edge = tape.reshape(tape.matmul(ew, a_edge), {n, n});
    int scores = tape.add(
        tape.add(tape.broadcast_col(score_src, n), tape.broadcast_row(score_dst, n)),
        score_edge);
    scores = tape.leaky_relu(scores, cfg_.leaky_slope);
    // self-attention is excluded; with a single node the masked softmax
    // degenerates to weight 1 on the node itself, i.e. x' = relu(W x)
    scores = tape.add(scores, diag_mask);
    const int alpha = tape.softmax_rows(scores);
    x = tape.relu(tape.matmul(alpha, xw));
  }
  return tape.max_axis(x, 0);
}

int Grounder::fusion_logits(num::Tape& tape, const Bound& bound,
                            const GrounderSample& sample) const {
  const auto enc = encode_node_edge_text(tape, bound, sample.graph);
  const int n = static_cast<int>(sample.graph.nodes.size());
  const int v_sg = gat_forward(tape, bound, enc, n);

  std::size_t cursor = 2 + static_cast<std::size_t>(cfg_.gat_layers) * 3;
  struct TextIds {
    int wq, bq, wk, bk, wv, bv, wo, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
  };
  std::vector<TextIds> text_ids;
  for (int l = 0; l < cfg_.text_layers; ++l) {
    TextIds t{};
    t.wq = bound.ids[cursor++]; t.bq = bound.ids[cursor++];
    t.wk = bound.ids[cursor++]; t.bk = bound.ids[cursor++];
    t.wv = bound.ids[cursor++]; t.bv = bound.ids[cursor++];
    t.wo = bound.ids[cursor++]; t.bo = bound.ids[cursor++];
    t.ln1_g = bound.ids[cursor++]; t.ln1_b = bound.ids[cursor++];
    t.w1 = bound.ids[cursor++]; t.b1 = bound.ids[cursor++];
    t.w2 = bound.ids[cursor++]; t.b2 = bound.ids[cursor++];
    t.ln2_g = bound.ids[cursor++]; t.ln2_b = bound.ids[cursor++];
    text_ids.push_back(t);
  }
  const int sg_w = bound.ids[cursor++];
  const int sg_b = bound.ids[cursor++];
  int sp_w = -1, sp_b = -1;
  if (cfg_.use_speech_token) {
    sp_w = bound.ids[cursor++];
    sp_b = bound.ids[cursor++];
  }
  const int cls_w = bound.ids[cursor++];
  const int cls_b = bound.ids[cursor++];

  const int emb = bound.ids[0];
  const int pos = bound.ids[1];

  // fusion sequence: [CLS], graph token, speech token, text tokens, [SEP]
  auto token_vec = [&](int id) {
    return tape.reshape(tape.embedding(emb, {id}), {cfg_.d_model});
  };
  std::vector<int> rows;
  rows.push_back(token_vec(kCls));
  rows.push_back(tape.reshape(
      tape.add_bias(tape.matmul(tape.reshape(v_sg, {1, cfg_.gat_dim}), sg_w), sg_b),
      {cfg_.d_model}));
  if (cfg_.use_speech_token) {
    if (static_cast<int>(sample.speech.size()) != cfg_.speech_dim)
      throw std::invalid_argument("fusion: speech vector width mismatch");
    num::Tensor sp = num::Tensor::from({1, cfg_.speech_dim}, sample.speech);
    rows.push_back(tape.reshape(
        tape.add_bias(tape.matmul(tape.constant(std::move(sp)), sp_w), sp_b),
        {cfg_.d_model}));
  }
  std::vector<int> tokens = sample.tokens;
  const int budget = cfg_.max_seq - static_cast<int>(rows.size()) - 1;
  if (static_cast<int>(tokens.size()) > budget) tokens.resize(static_cast<std::size_t>(budget));
  for (int id : tokens) rows.push_back(token_vec(id));
  rows.push_back(token_vec(kSep));

  const int seq_len = static_cast<int>(rows.size());
  int x = tape.add(tape.stack_rows(rows), tape.slice_rows(pos, 0, seq_len));

  const int dh = cfg_.d_model / cfg_.heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));
  for (const auto& t : text_ids) {
    const int q = tape.add_bias(tape.matmul(x, t.wq), t.bq);
    const int kk = tape.add_bias(tape.matmul(x, t.wk), t.bk);
    const int v = tape.add_bias(tape.matmul(x, t.wv), t.bv);
    std::vector<int> head_outs;
    for (int h = 0; h < cfg_.heads; ++h) {
      const int qh = tape.slice_cols(q, h * dh, (h + 1) * dh);
      const int kh = tape.slice_cols(kk, h * dh, (h + 1) * dh);
      const int vh = tape.slice_cols(v, h * dh, (h + 1) * dh);
      const int att =
          tape.softmax_rows(tape.scale(tape.matmul(qh, tape.transpose(kh)), inv_sqrt_dh));
      head_outs.push_back(tape.matmul(att, vh));
    }
    const int attended = tape.add_bias(tape.matmul(tape.concat_cols(head_outs), t.wo), t.bo);
    x = tape.add_bias(tape.mul_rowvec(tape.layer_norm(tape.add(x, attended)), t.ln1_g),
                      t.ln1_b);
    const int ffn = tape.add_bias(
        tape.matmul(tape.relu(tape.add_bias(tape.matmul(x, t.w1), t.b1)), t.w2), t.b2);
    x = tape.add_bias(tape.mul_rowvec(tape.layer_norm(tape.add(x, ffn)), t.ln2_g), t.ln2_b);
  }

  const int cls_row = tape.slice_rows(x, 0, 1);
  return tape.reshape(tape.add_bias(tape.matmul(cls_row, cls_w), cls_b),
                      {static_cast<int>(cfg_.class_names.size())});
}

GroundResult Grounder::ground(const scene::SceneGraph& graph,
                              const std::vector<double>& speech,
                              const std::vector<int>& tokens) {
  if (graph.nodes.empty()) throw std::invalid_argument("ground: empty graph");
  num::Tape tape;
  auto bound = bind(tape, false);
  GrounderSample sample;
  sample.graph = graph;
  sample.tokens = tokens;
  sample.speech = speech;
  const int logits = fusion_logits(tape, bound, sample);

  const auto present = classes_present(graph, cfg_.class_names);
  if (std::none_of(present.begin(), present.end(), [](bool b) { return b; }))
    throw std::runtime_error("ground: no graph node maps to a known class");
  num::Tensor mask = num::Tensor::zeros({static_cast<int>(present.size())});
  for (std::size_t c = 0; c < present.size(); ++c)
    mask[c] = present[c] ? 0.0 : kMaskValue;
  const int dist = tape.softmax_rows(tape.add(logits, tape.constant(std::move(mask))));

  GroundResult result;
  result.distribution = tape.value(dist).data;
  result.predicted_index = 0;
  for (std::size_t c = 1; c < result.distribution.size(); ++c)
    if (result.distribution[c] > result.distribution[static_cast<std::size_t>(result.predicted_index)])
      result.predicted_index = static_cast<int>(c);
  result.predicted_class = cfg_.class_names[static_cast<std::size_t>(result.predicted_index)];
  return result;
}

double evaluate_accuracy(Grounder& model, const std::vector<GrounderSample>& samples) {
  if (samples.empty()) return 0.0;
  int correct = 0;
  for (const auto& s : samples) {
    const auto result = model.ground(s.graph, s.speech, s.tokens);
    if (result.predicted_index == s.target) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

std::vector<GrounderEpochStats> train_grounder(Grounder& model,
                                               const std::vector<GrounderSample>& train,
                                               const std::vector<GrounderSample>& test,
                                               const GrounderTrainConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("train_grounder: empty dataset");
  const int num_classes = static_cast<int>(model.config().class_names.size());
  for (const auto& s : train)
    if (s.target < 0 || s.target >= num_classes)
      throw std::invalid_argument("train_grounder: target outside the class vocabulary");

  auto params = model.parameters();
  auto state = num::AdamWState::init(params, cfg.weight_decay, cfg.lr);
  Rng shuffle_rng(derive_seed(cfg.seed, 0x9C));

  const std::int64_t steps_per_epoch =
      (static_cast<std::int64_t>(train.size()) + cfg.batch_size - 1) / cfg.batch_size;
  num::CosineRestartSchedule sched;
  sched.eta_max = cfg.lr;
  sched.eta_min = cfg.lr * cfg.eta_min_frac;
  sched.t0 = static_cast<int>(std::max<std::int64_t>(1, steps_per_epoch * cfg.restart_epochs));
  sched.t_mult = cfg.restart_mult;

  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<GrounderEpochStats> log;
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    int correct = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      num::Tape tape;
      auto bound = model.bind(tape, cfg.lr > 0.0);
      std::vector<int> losses;
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      for (std::size_t b = start; b < end; ++b) {
        const GrounderSample& sample = train[order[b]];
        try {
          const int logits = model.fusion_logits(tape, bound, sample);
          const int lsm = tape.log_softmax_rows(logits);
          losses.push_back(tape.scale(tape.pick(lsm, sample.target), -1.0));
          loss_sum += tape.value(losses.back()).data[0];
          const auto& lv = tape.value(logits);
          int arg = 0;
          for (int c = 1; c < num_classes; ++c)
            if (lv[static_cast<std::size_t>(c)] > lv[static_cast<std::size_t>(arg)]) arg = c;
          if (arg == sample.target) ++correct;
        } catch (const std::runtime_error& e) {
          throw std::runtime_error("train_grounder: sample " + std::to_string(order[b]) +
                                   " (target '" +
                                   model.config().class_names[static_cast<std::size_t>(sample.target)] +
                                   "'): " + e.what());
        }
      }
      if (cfg.lr > 0.0) {
        int mean = losses[0];
        for (std::size_t i = 1; i < losses.size(); ++i) mean = tape.add(mean, losses[i]);
        mean = tape.scale(mean, 1.0 / static_cast<double>(losses.size()));
        const auto grads = tape.backward(mean);
        std::vector<const num::Tensor*> grad_ptrs;
        std::vector<num::Tensor> zero_grads;
        zero_grads.reserve(params.size());
        for (std::size_t p = 0; p < params.size(); ++p) {
          if (grads.has(bound.ids[p])) {
            grad_ptrs.push_back(&grads.at(bound.ids[p]));
          } else {
            // parameters outside this forward (unused slots) hold still
            zero_grads.push_back(num::Tensor::zeros(params[p]->shape));
            grad_ptrs.push_back(&zero_grads.back());
          }
        }
        const double lr = cfg.cosine_restarts ? num::schedule_lr(sched, step) : cfg.lr;
        num::adamw_step(params, grad_ptrs, state, lr);
        ++step;
      }
    }

    GrounderEpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train.size());
    stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(train.size());
    if (!test.empty()) {
      double test_loss = 0.0;
      int test_correct = 0;
      for (const auto& s : test) {
        num::Tape tape;
        auto bound = model.bind(tape, false);
        const int logits = model.fusion_logits(tape, bound, s);
        const int lsm = tape.log_softmax_rows(logits);
        test_loss += -tape.value(lsm)[static_cast<std::size_t>(s.target)];
        // graph-presence masking, as at inference
        const auto present = classes_present(s.graph, model.config().class_names);
        const auto& lv = tape.value(logits);
        int arg = -1;
        for (int c = 0; c < num_classes; ++c) {
          if (!present[static_cast<std::size_t>(c)]) continue;
          if (arg < 0 || lv[static_cast<std::size_t>(c)] > lv[static_cast<std::size_t>(arg)]) arg = c;
        }
        if (arg == s.target) ++test_correct;
      }
      stats.test_loss = test_loss / static_cast<double>(test.size());
      stats.test_accuracy =
          static_cast<double>(test_correct) / static_cast<double>(test.size());
    }
    log.push_back(stats);
  }
  return log;
}

void save_metric_log(const std::string& path, const std::vector<GrounderEpochStats>& stats) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("grounder: cannot write " + path);
  os << "epoch,split,accuracy,mean_loss\n";
  char buf[96];
  for (const auto& row : stats) {
    std::snprintf(buf, sizeof buf, "%d,train,%.6f,%.9f\n", row.epoch, row.train_accuracy,
                  row.train_loss);
    os << buf;
    std::snprintf(buf, sizeof buf, "%d,test,%.6f,%.9f\n", row.epoch, row.test_accuracy,
                  row.test_loss);
    os << buf;
  }
}

}  // namespace groundkit::ground
