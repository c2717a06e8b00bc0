// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Artifacts land under acceptance_out/ in the
// working directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "groundkit/app.hpp"
#include "groundkit/pca.hpp"
#include "groundkit/rng.hpp"
#include "oracles.hpp"

using namespace groundkit;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const phon::PhoneticModel& phonetics() {
  static const phon::PhoneticModel m = phon::PhoneticModel::defaults();
  return m;
}
const data::ObjectVocabulary& object_vocab() {
  static const data::ObjectVocabulary v = data::ObjectVocabulary::defaults();
  return v;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int number, const char* title, const Outcome& outcome, double elapsed) {
  std::printf("%s criterion %d: %s (%s; %.1fs)\n", outcome.pass ? "PASS" : "FAIL", number,
              title, outcome.detail.c_str(), elapsed);
  std::fflush(stdout);
}

num::Tensor random_tensor(const num::Shape& s, Rng& rng, double lo = -2.0, double hi = 2.0) {
  num::Tensor t = num::Tensor::zeros(s);
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

num::Tensor away_from_zero(num::Tensor t) {
  for (double& v : t.data)
    if (std::abs(v) < 1e-2) v += v >= 0 ? 0.05 : -0.05;
  return t;
}

// ---------------------------------------------------------------------------
// 1. CTC against brute-force path enumeration
// ---------------------------------------------------------------------------
Outcome criterion_ctc() {
  Rng rng(411);
  double max_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int T = rng.uniform_int(1, 6);
    const int symbols = rng.uniform_int(1, 4);  // alphabet without blank
    const int A1 = symbols + 1;
    std::vector<int> label;
    const int len = rng.uniform_int(0, std::min(3, T));
    for (int i = 0; i < len; ++i) label.push_back(rng.uniform_int(1, symbols));
    if (num::ctc_min_frames(label) > T) label.resize(1);

    std::vector<std::vector<double>> probs(static_cast<std::size_t>(T),
                                           std::vector<double>(static_cast<std::size_t>(A1)));
    for (auto& row : probs) {
      double sum = 0.0;
      for (double& v : row) {
        v = 0.05 + rng.uniform();
        sum += v;
      }
      for (double& v : row) v /= sum;
    }
    num::Tensor lp = num::Tensor::zeros({T, A1});
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < A1; ++k) lp.at(t, k) = std::log(probs[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)]);

    num::Tape tape;
    const double p_model = std::exp(-tape.value(tape.ctc_loss(tape.leaf(lp), label)).data[0]);
    const double p_brute = oracles::ctc_brute_force(probs, label);
    max_err = std::max(max_err, std::abs(p_model - p_brute));
  }
  Outcome out;
  out.pass = max_err < 1e-9;
  char buf[80];
  std::snprintf(buf, sizeof buf, "max |p_dp - p_enum| = %.2e over 200 draws", max_err);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 2. finite differences for every op and the full grounder loss
// ---------------------------------------------------------------------------
Outcome criterion_gradients() {
  Rng rng(42);
  struct OpCase {
    const char* name;
    std::function<std::vector<num::Tensor>(Rng&)> make_leaves;
    std::function<int(num::Tape&, const std::vector<int>&, const num::Tensor&)> build;
    num::Shape weight_shape;
  };
  using T = num::Tensor;
  std::vector<OpCase> cases = {
      {"matmul",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 5}, r), random_tensor({5, 4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.matmul(in[0], in[1]), t.constant(w)));
       },
       {3, 4}},
      {"add",
       [](Rng& r) { return std::vector<T>{random_tensor({4, 3}, r), random_tensor({4, 3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.add(in[0], in[1]), t.constant(w)));
       },
       {4, 3}},
      {"add_bias",
       [](Rng& r) { return std::vector<T>{random_tensor({4, 3}, r), random_tensor({3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.add_bias(in[0], in[1]), t.constant(w)));
       },
       {4, 3}},
      {"mul",
       [](Rng& r) { return std::vector<T>{random_tensor({2, 5}, r), random_tensor({2, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.mul(in[0], in[1]), t.constant(w)));
       },
       {2, 5}},
      {"mul_rowvec",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 4}, r), random_tensor({4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.mul_rowvec(in[0], in[1]), t.constant(w)));
       },
       {3, 4}},
      {"scale",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.scale(in[0], -1.7), t.constant(w)));
       },
       {3, 3}},
      {"concat",
       [](Rng& r) { return std::vector<T>{random_tensor({3}, r), random_tensor({4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.concat_cols({in[0], in[1]}), t.constant(w)));
       },
       {7}},
      {"stack_rows",
       [](Rng& r) { return std::vector<T>{random_tensor({4}, r), random_tensor({4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.stack_rows({in[0], in[1], in[0]}), t.constant(w)));
       },
       {3, 4}},
      {"relu",
       [](Rng& r) { return std::vector<T>{away_from_zero(random_tensor({4, 4}, r))}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.relu(in[0]), t.constant(w)));
       },
       {4, 4}},
      {"leaky_relu",
       [](Rng& r) { return std::vector<T>{away_from_zero(random_tensor({4, 4}, r))}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.leaky_relu(in[0], 0.2), t.constant(w)));
       },
       {4, 4}},
      {"softmax",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.softmax_rows(in[0]), t.constant(w)));
       },
       {3, 5}},
      {"log_softmax",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.log_softmax_rows(in[0]), t.constant(w)));
       },
       {3, 5}},
      {"mean_over_axis0",
       [](Rng& r) { return std::vector<T>{random_tensor({4, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.mean_axis(in[0], 0), t.constant(w)));
       },
       {5}},
      {"mean_over_axis1",
       [](Rng& r) { return std::vector<T>{random_tensor({4, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.mean_axis(in[0], 1), t.constant(w)));
       },
       {4}},
      {"max_over_axis0",
       [](Rng& r) { return std::vector<T>{random_tensor({4, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.max_axis(in[0], 0), t.constant(w)));
       },
       {5}},
      {"max_over_axis1",
       [](Rng& r) { return std::vector<T>{random_tensor({4, 5}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.max_axis(in[0], 1), t.constant(w)));
       },
       {4}},
      {"embedding_lookup",
       [](Rng& r) { return std::vector<T>{random_tensor({6, 3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.embedding(in[0], {2, 0, 5, 2}), t.constant(w)));
       },
       {4, 3}},
      {"layer_norm",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 6}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.layer_norm(in[0]), t.constant(w)));
       },
       {3, 6}},
      {"unfold1d",
       [](Rng& r) { return std::vector<T>{random_tensor({6, 3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.unfold1d(in[0], 3), t.constant(w)));
       },
       {6, 9}},
      {"slice_rows",
       [](Rng& r) { return std::vector<T>{random_tensor({5, 4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.slice_rows(in[0], 1, 3), t.constant(w)));
       },
       {2, 4}},
      {"slice_cols",
       [](Rng& r) { return std::vector<T>{random_tensor({5, 4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.slice_cols(in[0], 1, 3), t.constant(w)));
       },
       {5, 2}},
      {"transpose",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.transpose(in[0]), t.constant(w)));
       },
       {4, 3}},
      {"broadcast_col",
       [](Rng& r) { return std::vector<T>{random_tensor({4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.broadcast_col(in[0], 3), t.constant(w)));
       },
       {4, 3}},
      {"broadcast_row",
       [](Rng& r) { return std::vector<T>{random_tensor({4}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.broadcast_row(in[0], 3), t.constant(w)));
       },
       {3, 4}},
      {"reshape",
       [](Rng& r) { return std::vector<T>{random_tensor({2, 3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T& w) {
         return t.sum_all(t.mul(t.reshape(in[0], {6}), t.constant(w)));
       },
       {6}},
      {"sum_all",
       [](Rng& r) { return std::vector<T>{random_tensor({3, 3}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T&) {
         return t.scale(t.sum_all(in[0]), 1.3);
       },
       {}},
      {"pick",
       [](Rng& r) { return std::vector<T>{random_tensor({6}, r)}; },
       [](num::Tape& t, const std::vector<int>& in, const T&) {
         return t.scale(t.pick(in[0], 4), -2.0);
       },
       {}},
  };

  double worst = 0.0;
  std::string worst_op = "-";
  for (const auto& c : cases) {
    for (int instance = 0; instance < 50; ++instance) {
      auto leaves = c.make_leaves(rng);
      const num::Tensor w =
          c.weight_shape.empty() ? num::Tensor::scalar(1.0) : random_tensor(c.weight_shape, rng);
      auto builder = [&](num::Tape& t, const std::vector<int>& ids) {
        return c.build(t, ids, w);
      };
      const auto rep = oracles::fd_check(builder, leaves, 1e-5);
      if (rep.max_rel_err > worst) {
        worst = rep.max_rel_err;
        worst_op = c.name;
      }
    }
  }
  const bool ops_ok = worst < 1e-4;

  // full grounder loss, 50 random instances, 20 parameters each
  ground::GrounderConfig gcfg;
  gcfg.d_model = 32;
  gcfg.gat_dim = 16;
  gcfg.ffn_dim = 48;
  gcfg.speech_dim = 8;
  gcfg.class_names = object_vocab().class_names();
  {
    std::set<std::string> words;
    for (const auto& [word, prons] : phonetics().lexicon) words.insert(word);
    for (const char* w : {"left", "right", "front", "behind", "near"}) words.insert(w);
    gcfg.vocab_words = {words.begin(), words.end()};
  }
  double worst_e2e = 0.0;
  Rng grng(7);
  for (int instance = 0; instance < 50; ++instance) {
    gcfg.seed = 1000 + static_cast<std::uint64_t>(instance);
    auto model = ground::Grounder::init(gcfg);
    const auto& classes = gcfg.class_names;
    const std::string cls = classes[static_cast<std::size_t>(grng.uniform_int(0, static_cast<int>(classes.size()) - 1))];
    const auto sampled = data::sample_scene_graph(object_vocab(), cls, grng);
    ground::GrounderSample s;
    s.graph = sampled.graph;
    s.tokens = model.tokenize("go to " + cls);
    s.speech.assign(static_cast<std::size_t>(gcfg.speech_dim), 0.0);
    for (double& v : s.speech) v = grng.uniform(-1, 1);
    s.target = static_cast<int>(std::find(classes.begin(), classes.end(), cls) - classes.begin());

    num::Tape tape;
    auto bound = model.bind(tape, true);
    const int loss =
        tape.scale(tape.pick(tape.log_softmax_rows(model.fusion_logits(tape, bound, s)),
                             s.target), -1.0);
    const auto grads = tape.backward(loss);
    auto loss_value = [&]() {
      num::Tape t2;
      auto b2 = model.bind(t2, false);
      return t2.value(t2.scale(
          t2.pick(t2.log_softmax_rows(model.fusion_logits(t2, b2, s)), s.target), -1.0)).data[0];
    };
    auto params = model.parameters();
    for (int check = 0; check < 20; ++check) {
      const std::size_t p = static_cast<std::size_t>(grng.uniform_int(0, static_cast<int>(params.size()) - 1));
      const std::size_t i = static_cast<std::size_t>(grng.uniform_int(0, static_cast<int>(params[p]->numel()) - 1));
      const double saved = params[p]->data[i];
      const double h = 1e-5;
      params[p]->data[i] = saved + h;
      const double up = loss_value();
      params[p]->data[i] = saved - h;
      const double down = loss_value();
      params[p]->data[i] = saved;
      const double fd = (up - down) / (2 * h);
      const double ad = grads.has(bound.ids[p]) ? grads.at(bound.ids[p]).data[i] : 0.0;
      worst_e2e =
          std::max(worst_e2e, std::abs(fd - ad) / std::max({std::abs(fd), std::abs(ad), 1e-2}));
    }
  }
  Outcome out;
  out.pass = ops_ok && worst_e2e < 1e-3;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "op-level worst rel err %.2e (%s, 50 instances/op); end-to-end worst %.2e",
                worst, worst_op.c_str(), worst_e2e);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 3. attention rows and permutation invariance
// ---------------------------------------------------------------------------
Outcome criterion_gat() {
  ground::GrounderConfig gcfg;
  gcfg.class_names = object_vocab().class_names();
  {
    std::set<std::string> words;
    for (const auto& [word, prons] : phonetics().lexicon) words.insert(word);
    for (const char* w : {"left", "right", "front", "behind", "near"}) words.insert(w);
    gcfg.vocab_words = {words.begin(), words.end()};
  }
  gcfg.seed = 77;
  auto model = ground::Grounder::init(gcfg);

  Rng rng(5);
  double worst_row_sum = 0.0;
  double worst_perm = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto sampled = data::sample_scene_graph(object_vocab(), "door", rng);
    const auto& graph = sampled.graph;
    const int n = static_cast<int>(graph.nodes.size());

    num::Tape tape;
    auto bound = model.bind(tape, false);
    const auto enc = model.encode_node_edge_text(tape, bound, graph);
    const auto base = tape.value(model.gat_forward(tape, bound, enc, n));

    for (std::size_t id = 0; id < tape.size(); ++id) {
      const num::Tensor& v = tape.value(static_cast<int>(id));
      if (v.rank() != 2 || v.rows() != n || v.cols() != n) continue;
      bool nonneg = true;
      for (double x : v.data) nonneg = nonneg && x >= 0.0;
      if (!nonneg) continue;
      for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) sum += v.at(i, j);
        worst_row_sum = std::max(worst_row_sum, std::abs(sum - 1.0));
      }
    }

    for (int perm_trial = 0; perm_trial < 10; ++perm_trial) {
      std::vector<int> perm(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
      rng.shuffle(perm);
      scene::SceneGraph shuffled;
      shuffled.nodes.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        shuffled.nodes[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = graph.nodes[static_cast<std::size_t>(i)];
      for (const auto& e : graph.edges)
        shuffled.edges.push_back({perm[static_cast<std::size_t>(e.from)], perm[static_cast<std::size_t>(e.to)], e.predicate});
      num::Tape tp;
      auto pb = model.bind(tp, false);
      const auto penc = model.encode_node_edge_text(tp, pb, shuffled);
      const auto permuted = tp.value(model.gat_forward(tp, pb, penc, n));
      for (std::size_t i = 0; i < base.numel(); ++i)
        worst_perm = std::max(worst_perm, std::abs(base.data[i] - permuted.data[i]));
    }
  }
  Outcome out;
  out.pass = worst_row_sum < 1e-9 && worst_perm < 1e-9;
  char buf[120];
  std::snprintf(buf, sizeof buf, "attention row-sum dev %.1e; permutation dev %.1e",
                worst_row_sum, worst_perm);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 4. predicate rule properties
// ---------------------------------------------------------------------------
Outcome criterion_scene_rules() {
  Rng rng(31);
  int antisym_fail = 0, translate_fail = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    scene::ObjectRecord a, b;
    a.id = "a";
    b.id = "b";
    a.position = {rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0};
    b.position = {rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0};
    const double eps = 0.05;
    const double adx = std::abs(b.position[0] - a.position[0]);
    const double ady = std::abs(b.position[1] - a.position[1]);
    // token mirror is only defined away from the dead-band boundary
    if (std::abs(adx - eps) > 1e-9 && std::abs(ady - eps) > 1e-9) {
      auto mirror = [](std::string s) {
        auto swap_all = [&s](const std::string& from, const std::string& to) {
          std::size_t pos = 0;
          while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, from.size(), to);
            pos += to.size();
          }
        };
        swap_all("left", "#");
        swap_all("right", "left");
        swap_all("#", "right");
        swap_all("front", "@");
        swap_all("behind", "front");
        swap_all("@", "behind");
        return s;
      };
      if (scene::spatial_predicate(b, a) != mirror(scene::spatial_predicate(a, b)))
        ++antisym_fail;
    }
    const std::string before = scene::spatial_predicate(a, b);
    const double ox = rng.uniform(-50, 50), oy = rng.uniform(-50, 50);
    a.position[0] += ox;
    a.position[1] += oy;
    b.position[0] += ox;
    b.position[1] += oy;
    if (scene::spatial_predicate(a, b) != before) ++translate_fail;
  }
  scene::ObjectRecord from, to;
  from.id = "f";
  to.id = "t";
  from.position = {0, 0, 0};
  to.position = {-1, 1, 0};
  const bool composite = scene::spatial_predicate(from, to) == "left behind";

  Outcome out;
  out.pass = antisym_fail == 0 && translate_fail == 0 && composite;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "antisymmetry fails %d/1000, translation fails %d/1000, "
                "delta (-1,1) -> \"%s\"",
                antisym_fail, translate_fail,
                scene::spatial_predicate(from, to).c_str());
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 5. ablation trend (and speech-path liveness) on the full desk dataset
// ---------------------------------------------------------------------------
struct TrendResult {
  Outcome outcome;
  asr::AsrModel seed1_asr;
  bool have_asr = false;
};

TrendResult criterion_trend() {
  TrendResult result;
  const auto cfg = app::RunConfig::defaults();
  fs::remove_all("acceptance_out/trend");
  const auto report =
      app::run_ablation(cfg, phonetics(), object_vocab(), "acceptance_out/trend");

  bool wer_in_band = true;
  double wer_min = 1e9, wer_max = -1e9;
  std::set<std::string> seen;
  for (const auto& row : report.rows) {
    if (row.seed == "mean" || !seen.insert(row.seed).second) continue;
    wer_in_band = wer_in_band && row.asr_wer_pct >= 20.0 && row.asr_wer_pct <= 50.0;
    wer_min = std::min(wer_min, row.asr_wer_pct);
    wer_max = std::max(wer_max, row.asr_wer_pct);
  }
  const double full = report.mean_accuracy(app::Variant::fusion_full);
  const double muted = report.mean_accuracy(app::Variant::fusion_no_speech);
  const double ref_text = report.mean_accuracy(app::Variant::text_reference);
  const double asr_text = report.mean_accuracy(app::Variant::text_asr);

  bool rows_ok = true;
  for (const auto& row : report.rows) rows_ok = rows_ok && row.status == "ok";

  // the speech pathway must be live: muting it at inference flips at
  // least one prediction of the trained full model
  bool pathway_live = false;
  try {
    auto grounder = app::load_grounder_bundle("acceptance_out/trend/seed_1", "fusion-full");
    phon::PhoneticModel ph;
    auto asr_model = app::load_asr_bundle("acceptance_out/trend/seed_1", &ph);
    result.seed1_asr = asr_model;
    result.have_asr = true;
    const auto test = data::load_dataset_jsonl("acceptance_out/trend/seed_1/test.jsonl",
                                               ph.inventory.feature_dim());
    for (const auto& s : test) {
      const auto decoded = asr::decode_words(asr_model, s.audio, ph, cfg.snap_threshold);
      std::string text;
      for (const auto& w : decoded) text += text.empty() ? w : " " + w;
      const auto tokens = grounder.tokenize(text);
      const auto speech = asr_model.pooled_latent(s.audio);
      const auto with = grounder.ground(s.graph, speech, tokens);
      const auto without =
          grounder.ground(s.graph, std::vector<double>(speech.size(), 0.0), tokens);
      if (with.predicted_class != without.predicted_class) {
        pathway_live = true;
        break;
      }
    }
  } catch (const std::exception& e) {
    result.outcome.detail = std::string("artifact reload failed: ") + e.what();
  }

  result.outcome.pass = wer_in_band && rows_ok && full >= muted + 5.0 &&
                        ref_text >= asr_text && pathway_live;
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "mean over 3 seeds: full %.1f%% vs no-speech %.1f%% (gap %.1f >= 5), "
                "reference-text %.1f%% >= asr-text %.1f%%, WER %.1f-%.1f%% in [20,50], "
                "speech pathway %s",
                full, muted, full - muted, ref_text, asr_text, wer_min, wer_max,
                pathway_live ? "live" : "DEAD");
  result.outcome.detail = buf;
  return result;
}

// ---------------------------------------------------------------------------
// 6. clean channel: decoded text equals reference text at sigma 0
// ---------------------------------------------------------------------------
Outcome criterion_clean_channel() {
  auto cfg = app::RunConfig::defaults();
  cfg.datagen.noise_sigma = 0.0;
  cfg.asr.epochs = 12;  // clean audio converges quickly
  cfg.seeds = {1};
  cfg.variants = {app::Variant::text_asr, app::Variant::text_reference,
                  app::Variant::fusion_full};
  fs::remove_all("acceptance_out/clean");
  const auto report =
      app::run_ablation(cfg, phonetics(), object_vocab(), "acceptance_out/clean");
  const double asr_text = report.mean_accuracy(app::Variant::text_asr);
  const double ref_text = report.mean_accuracy(app::Variant::text_reference);
  // the full model on a clean channel should be nearly perfect as well
  const double full = report.mean_accuracy(app::Variant::fusion_full);
  Outcome out;
  out.pass = std::abs(asr_text - ref_text) <= 3.0 && full >= 95.0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "sigma 0: asr-text %.1f%% vs reference-text %.1f%% (|gap| %.1f <= 3); "
                "fusion-full %.1f%% >= 95",
                asr_text, ref_text, std::abs(asr_text - ref_text), full);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 7. latent clustering by initial phoneme
// ---------------------------------------------------------------------------
Outcome criterion_latent_clusters(const asr::AsrModel& trained, bool have) {
  Outcome out;
  if (!have) {
    out.detail = "no trained recognizer from criterion 5";
    return out;
  }
  const auto words = phon::default_latent_word_bank();
  const auto report = app::run_pca_report(trained, phonetics(), words);
  fs::create_directories("acceptance_out");
  app::write_pca_csv("acceptance_out/pca.csv", report);
  app::write_pca_svg("acceptance_out/pca.svg", report);
  std::set<std::string> groups;
  for (const auto& p : report.points) groups.insert(p.group);
  out.pass = report.points.size() == 50 && groups.size() == 5 &&
             report.intra_group_distance < report.inter_group_distance &&
             report.ratio < 0.8;
  char buf[120];
  std::snprintf(buf, sizeof buf, "5 groups x 10 words; intra %.3f < inter %.3f, ratio %.3f < 0.8",
                report.intra_group_distance, report.inter_group_distance, report.ratio);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 8. overfit sanities
// ---------------------------------------------------------------------------
Outcome criterion_overfit() {
  // recognizer: one sample to an exact greedy decode
  asr::AsrConfig acfg;
  acfg.feature_dim = phonetics().inventory.feature_dim();
  acfg.alphabet = phonetics().inventory.size();
  acfg.hidden = 16;
  acfg.seed = 7;
  auto am = asr::AsrModel::init(acfg);
  const auto seq = phon::text_to_phonemes("go to pin", phonetics());
  asr::AsrSample sample;
  sample.audio = phon::synthesize_audio(seq, phonetics().inventory, 0.0, 21);
  sample.label = seq.ids;
  sample.words = {"go", "to", "pin"};
  asr::AsrTrainConfig atrain;
  atrain.epochs = 150;
  atrain.batch_size = 1;
  atrain.lr = 2e-2;
  atrain.seed = 7;
  asr::train_asr(am, {sample}, atrain, phonetics());
  const auto decoded = asr::greedy_decode(am.valid_log_probs(sample.audio), phonetics().inventory);
  const bool asr_exact = decoded.ids == sample.label;

  // grounder: one sample to 100% within 200 optimizer steps
  ground::GrounderConfig gcfg;
  gcfg.class_names = object_vocab().class_names();
  {
    std::set<std::string> words;
    for (const auto& [word, prons] : phonetics().lexicon) words.insert(word);
    for (const char* w : {"left", "right", "front", "behind", "near"}) words.insert(w);
    gcfg.vocab_words = {words.begin(), words.end()};
  }
  gcfg.seed = 3;
  auto gm = ground::Grounder::init(gcfg);
  Rng rng(6);
  const auto sampled = data::sample_scene_graph(object_vocab(), "sign", rng);
  ground::GrounderSample gs;
  gs.graph = sampled.graph;
  gs.tokens = gm.tokenize("go to sign");
  gs.speech.assign(static_cast<std::size_t>(gcfg.speech_dim), 0.25);
  gs.target = 1;  // "sign"
  ground::GrounderTrainConfig gtrain;
  gtrain.epochs = 200;
  gtrain.batch_size = 1;
  gtrain.lr = 3e-3;
  const auto log = ground::train_grounder(gm, {gs}, {}, gtrain);
  int first_perfect = -1;
  for (const auto& row : log)
    if (row.train_accuracy == 1.0) {
      first_perfect = row.epoch;
      break;
    }
  const bool grounder_fast = first_perfect > 0 && first_perfect <= 200 &&
                             log.back().train_accuracy == 1.0;

  Outcome out;
  out.pass = asr_exact && grounder_fast;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "greedy decode %s the transcript; grounder at 100%% from step %d <= 200",
                asr_exact ? "equals" : "differs from", first_perfect);
  out.detail = buf;
  return out;
}

// ---------------------------------------------------------------------------
// 9. byte-identical reports under a fixed config and seed
// ---------------------------------------------------------------------------
Outcome criterion_determinism() {
  app::RunConfig cfg;
  cfg.datagen.train_size = 80;
  cfg.datagen.test_size = 30;
  cfg.datagen.noise_sigma = 0.4;
  cfg.asr.epochs = 3;
  cfg.grounder.epochs = 3;
  cfg.seeds = {11};
  fs::remove_all("acceptance_out/det_a");
  fs::remove_all("acceptance_out/det_b");
  app::run_ablation(cfg, phonetics(), object_vocab(), "acceptance_out/det_a");
  app::run_ablation(cfg, phonetics(), object_vocab(), "acceptance_out/det_b");

  auto slurp = [](const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const std::string a = slurp("acceptance_out/det_a/report.csv");
  const std::string b = slurp("acceptance_out/det_b/report.csv");
  Outcome out;
  out.pass = !a.empty() && a == b;
  char buf[100];
  std::snprintf(buf, sizeof buf, "two runs, report.csv %zu bytes, %s", a.size(),
                out.pass ? "byte-identical" : "DIFFER");
  out.detail = buf;
  return out;
}

}  // namespace

int main() {
  std::printf("groundkit acceptance suite\n");
  fs::create_directories("acceptance_out");
  bool all = true;
  const auto suite_start = Clock::now();

  {
    const auto t = Clock::now();
    const auto out = criterion_ctc();
    const double elapsed = seconds_since(t);
    const bool timed = elapsed < 30.0;
    Outcome merged{out.pass && timed, out.detail + (timed ? "" : "; OVER 30s budget")};
    report(1, "ctc matches brute-force path enumeration", merged, elapsed);
    all = all && merged.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_gradients();
    const double elapsed = seconds_since(t);
    const bool timed = elapsed < 120.0;
    Outcome merged{out.pass && timed, out.detail + (timed ? "" : "; OVER 2min budget")};
    report(2, "finite-difference gradient suite", merged, elapsed);
    all = all && merged.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_gat();
    report(3, "gat attention rows and permutation invariance", out, seconds_since(t));
    all = all && out.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_scene_rules();
    report(4, "spatial predicate rules", out, seconds_since(t));
    all = all && out.pass;
  }
  TrendResult trend;
  {
    const auto t = Clock::now();
    trend = criterion_trend();
    const double elapsed = seconds_since(t);
    const bool timed = elapsed < 1800.0;
    Outcome merged{trend.outcome.pass && timed,
                   trend.outcome.detail + (timed ? "" : "; OVER 30min budget")};
    report(5, "speech-fusion ablation trend", merged, elapsed);
    all = all && merged.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_clean_channel();
    report(6, "clean-channel text variants agree", out, seconds_since(t));
    all = all && out.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_latent_clusters(trend.seed1_asr, trend.have_asr);
    report(7, "latent projections cluster by initial phoneme", out, seconds_since(t));
    all = all && out.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_overfit();
    report(8, "single-sample overfit sanities", out, seconds_since(t));
    all = all && out.pass;
  }
  {
    const auto t = Clock::now();
    const auto out = criterion_determinism();
    report(9, "ablation report reproducibility", out, seconds_since(t));
    all = all && out.pass;
  }

  std::printf("%s: acceptance suite finished in %.1f s\n", all ? "PASS" : "FAIL",
              seconds_since(suite_start));
  return all ? 0 : 1;
}
