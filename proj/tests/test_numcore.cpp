#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "groundkit/checkpoint.hpp"
#include "groundkit/optim.hpp"
#include "groundkit/pca.hpp"
#include "groundkit/rng.hpp"
#include "groundkit/tape.hpp"
#include "oracles.hpp"

using namespace groundkit;
using num::Shape;
using num::Tape;
using num::Tensor;

namespace {

Tensor random_tensor(const Shape& s, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Tensor t = Tensor::zeros(s);
  for (double& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// keeps piecewise-linear ops away from their kink during fd checks
Tensor away_from_zero(Tensor t) {
  for (double& v : t.data)
    if (std::abs(v) < 1e-2) v += v >= 0 ? 0.05 : -0.05;
  return t;
}

}  // namespace

TEST_CASE("forward op examples") {
  Tape tape;
  const int a = tape.leaf(Tensor::from({2, 2}, {1, 2, 3, 4}));
  const int eye = tape.leaf(Tensor::from({2, 2}, {1, 0, 0, 1}));
  const int prod = tape.matmul(a, eye);
  CHECK(tape.value(prod).data == std::vector<double>{1, 2, 3, 4});

  const int r = tape.relu(tape.leaf(Tensor::from({3}, {-1, 0, 2})));
  CHECK(tape.value(r).data == std::vector<double>{0, 0, 2});

  const int sm = tape.softmax_rows(tape.leaf(Tensor::from({2}, {0, 0})));
  CHECK(tape.value(sm).data[0] == doctest::Approx(0.5));
  CHECK(tape.value(sm).data[1] == doctest::Approx(0.5));
}

TEST_CASE("forward op error paths") {
  Tape tape;
  const int a = tape.leaf(Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6}));
  const int b = tape.leaf(Tensor::from({2, 2}, {1, 2, 3, 4}));
  CHECK_THROWS_AS((void)tape.matmul(a, b), std::invalid_argument);
  CHECK_THROWS_AS((void)tape.add(a, b), std::invalid_argument);
  CHECK_THROWS(tape.leaf(Tensor::from({1}, {std::nan("")})));
}

TEST_CASE("softmax rows are distributions") {
  Rng rng(11);
  Tape tape;
  const int x = tape.leaf(random_tensor({17, 9}, rng));
  const Tensor& y = tape.value(tape.softmax_rows(x));
  for (int i = 0; i < 17; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 9; ++j) {
      CHECK(y.at(i, j) >= 0.0);
      sum += y.at(i, j);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("backward analytic examples") {
  SUBCASE("sum of squares") {
    Tape tape;
    Tensor w = Tensor::from({3}, {1, 2, 3}, true);
    const int wi = tape.leaf(w);
    const int loss = tape.sum_all(tape.mul(wi, wi));
    const auto g = tape.backward(loss);
    CHECK(g.at(wi).data == std::vector<double>{2, 4, 6});
  }
  SUBCASE("softmax cross entropy at uniform logits") {
    Tape tape;
    const int logits = tape.leaf(Tensor::from({2}, {0, 0}, true));
    const int loss = tape.scale(tape.pick(tape.log_softmax_rows(logits), 0), -1.0);
    const auto g = tape.backward(loss);
    CHECK(g.at(logits).data[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(g.at(logits).data[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("loss gradient w.r.t. itself is one") {
    Tape tape;
    const int x = tape.leaf(Tensor::from({2}, {1, 2}, true));
    const int loss = tape.sum_all(x);
    const auto g = tape.backward(loss);
    CHECK(g.at(loss).data[0] == 1.0);
  }
}

TEST_CASE("backward error paths") {
  Tape tape;
  const int x = tape.leaf(Tensor::from({2}, {1, 2}, true));
  const int y = tape.scale(x, 2.0);
  CHECK_THROWS_AS((void)tape.backward(y), std::invalid_argument);  // not scalar
  const int detached = tape.constant(Tensor::from({2}, {0, 0}));
  const int loss = tape.sum_all(y);
  const auto g = tape.backward(loss);
  CHECK_THROWS_AS((void)g.at(detached), std::logic_error);
}

// Every differentiable op kind against central finite differences.
TEST_CASE("reverse-mode gradients match finite differences per op") {
  struct OpCase {
    const char* name;
    std::vector<Tensor> leaves;
    oracles::LossBuilder build;
  };
  Rng rng(20260810);

  auto weighted_sum = [&rng](Tape& t, int out) {
    Tensor w = random_tensor(t.value(out).shape, rng);
    // fixed per case via capture-by-value below
    return t.sum_all(t.mul(out, t.constant(w)));
  };
  // the weight tensor must be identical across fd re-evaluations, so
  // freeze one per case
  auto frozen = [&rng](const Shape& s) { return random_tensor(s, rng); };

  std::vector<OpCase> cases;
  {
    Tensor w = frozen({3, 4});
    cases.push_back({"matmul",
                     {random_tensor({3, 5}, rng), random_tensor({5, 4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.matmul(in[0], in[1]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 3});
    cases.push_back({"add", {random_tensor({4, 3}, rng), random_tensor({4, 3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.add(in[0], in[1]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 3});
    cases.push_back({"add_bias", {random_tensor({4, 3}, rng), random_tensor({3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.add_bias(in[0], in[1]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({2, 5});
    cases.push_back({"mul", {random_tensor({2, 5}, rng), random_tensor({2, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.mul(in[0], in[1]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 4});
    cases.push_back({"mul_rowvec", {random_tensor({3, 4}, rng), random_tensor({4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.mul_rowvec(in[0], in[1]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 3});
    cases.push_back({"scale", {random_tensor({3, 3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.scale(in[0], -1.7), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({7});
    cases.push_back({"concat_vectors", {random_tensor({3}, rng), random_tensor({4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.concat_cols({in[0], in[1]}), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({2, 5});
    cases.push_back({"concat_matrix_cols",
                     {random_tensor({2, 2}, rng), random_tensor({2, 3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.concat_cols({in[0], in[1]}), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 4});
    cases.push_back({"stack_rows_with_repeat",
                     {random_tensor({4}, rng), random_tensor({4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(
                           t.mul(t.stack_rows({in[0], in[1], in[0]}), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 4});
    cases.push_back({"relu", {away_from_zero(random_tensor({4, 4}, rng))},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.relu(in[0]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 4});
    cases.push_back({"leaky_relu", {away_from_zero(random_tensor({4, 4}, rng))},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.leaky_relu(in[0], 0.2), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 5});
    cases.push_back({"softmax", {random_tensor({3, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.softmax_rows(in[0]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 5});
    cases.push_back({"log_softmax", {random_tensor({3, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.log_softmax_rows(in[0]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({5});
    cases.push_back({"mean_axis0", {random_tensor({4, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.mean_axis(in[0], 0), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4});
    cases.push_back({"mean_axis1", {random_tensor({4, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.mean_axis(in[0], 1), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({5});
    cases.push_back({"max_axis0", {random_tensor({4, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.max_axis(in[0], 0), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4});
    cases.push_back({"max_axis1", {random_tensor({4, 5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.max_axis(in[0], 1), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 3});
    cases.push_back({"embedding_lookup", {random_tensor({6, 3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(
                           t.mul(t.embedding(in[0], {2, 0, 5, 2}), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 6});
    cases.push_back({"layer_norm", {random_tensor({3, 6}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.layer_norm(in[0]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({6, 9});
    cases.push_back({"unfold1d", {random_tensor({6, 3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.unfold1d(in[0], 3), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({2, 4});
    cases.push_back({"slice_rows", {random_tensor({5, 4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.slice_rows(in[0], 1, 3), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({5, 2});
    cases.push_back({"slice_cols", {random_tensor({5, 4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.slice_cols(in[0], 1, 3), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 3});
    cases.push_back({"transpose", {random_tensor({3, 4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.transpose(in[0]), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({4, 3});
    cases.push_back({"broadcast_col", {random_tensor({4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.broadcast_col(in[0], 3), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({3, 4});
    cases.push_back({"broadcast_row", {random_tensor({4}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.broadcast_row(in[0], 3), t.constant(w)));
                     }});
  }
  {
    Tensor w = frozen({6});
    cases.push_back({"reshape", {random_tensor({2, 3}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       return t.sum_all(t.mul(t.reshape(in[0], {6}), t.constant(w)));
                     }});
  }
  {
    cases.push_back({"sum_all", {random_tensor({3, 3}, rng)},
                     [](Tape& t, const std::vector<int>& in) {
                       return t.scale(t.sum_all(in[0]), 1.3);
                     }});
  }
  {
    cases.push_back({"pick", {random_tensor({6}, rng)},
                     [](Tape& t, const std::vector<int>& in) {
                       return t.scale(t.pick(in[0], 4), -2.0);
                     }});
  }
  {
    // composite graph: affine -> relu -> layer_norm -> softmax
    Tensor w = frozen({4, 5});
    cases.push_back({"composite",
                     {away_from_zero(random_tensor({4, 3}, rng)),
                      random_tensor({3, 5}, rng), random_tensor({5}, rng)},
                     [w](Tape& t, const std::vector<int>& in) {
                       const int h = t.relu(t.add_bias(t.matmul(in[0], in[1]), in[2]));
                       const int z = t.softmax_rows(t.layer_norm(h));
                       return t.sum_all(t.mul(z, t.constant(w)));
                     }});
  }
  (void)weighted_sum;

  for (auto& c : cases) {
    CAPTURE(c.name);
    const auto rep = oracles::fd_check(c.build, c.leaves, 1e-5);
    CHECK_MESSAGE(rep.max_rel_err < 1e-4, c.name, " rel err ", rep.max_rel_err);
    CHECK(rep.checked > 0);
  }
}

TEST_CASE("adamw examples") {
  SUBCASE("zero gradient is pure decay") {
    Tensor w = Tensor::from({1}, {1.0});
    Tensor g = Tensor::from({1}, {0.0});
    auto state = num::AdamWState::init({&w}, 0.01, 0.1);
    num::adamw_step({&w}, {&g}, state, 0.1);
    CHECK(w.data[0] == doctest::Approx(0.999).epsilon(1e-15));
    CHECK(state.t == 1);
  }
  SUBCASE("first step with unit gradient") {
    Tensor w = Tensor::from({1}, {0.0});
    Tensor g = Tensor::from({1}, {1.0});
    auto state = num::AdamWState::init({&w}, 0.0, 1e-3);
    num::adamw_step({&w}, {&g}, state, 1e-3);
    // hand-computed bias-corrected step: -lr / (1 + eps)
    CHECK(w.data[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-14));
    CHECK(w.data[0] == doctest::Approx(-1e-3).epsilon(1e-6));
  }
  SUBCASE("identical tensors get identical updates") {
    Tensor w1 = Tensor::from({3}, {0.3, -0.2, 1.4});
    Tensor w2 = w1;
    Tensor g = Tensor::from({3}, {0.5, 0.1, -2.0});
    auto state = num::AdamWState::init({&w1, &w2}, 0.01, 1e-3);
    num::adamw_step({&w1, &w2}, {&g, &g}, state, 1e-3);
    CHECK(w1.data == w2.data);
  }
  SUBCASE("shape mismatch and non-finite gradient rejected") {
    Tensor w = Tensor::from({2}, {1.0, 2.0});
    Tensor bad_shape = Tensor::from({3}, {0, 0, 0});
    Tensor bad_value = Tensor::from({2}, {std::numeric_limits<double>::infinity(), 0});
    bad_value.data[0] = std::numeric_limits<double>::infinity();
    auto state = num::AdamWState::init({&w}, 0.01, 1e-3);
    CHECK_THROWS(num::adamw_step({&w}, {&bad_shape}, state, 1e-3));
    state.t = 0;
    CHECK_THROWS(num::adamw_step({&w}, {&bad_value}, state, 1e-3));
  }
}

// test-local plain Adam; mirrors the documented update with the decay
// term dropped
namespace {
void plain_adam_step(std::vector<double>& w, const std::vector<double>& g,
                     std::vector<double>& m, std::vector<double>& v, int t, double lr,
                     double b1, double b2, double eps) {
  const double bc1 = 1.0 - std::pow(b1, t);
  const double bc2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    w[i] -= lr * (m_hat / (std::sqrt(v_hat) + eps) + 0.0 * w[i]);
  }
}
}  // namespace

TEST_CASE("adamw with zero decay equals plain adam bitwise") {
  Rng rng(5);
  Tensor w = random_tensor({7}, rng);
  std::vector<double> w_ref = w.data;
  std::vector<double> m_ref(7, 0.0), v_ref(7, 0.0);
  auto state = num::AdamWState::init({&w}, 0.0, 1e-3);
  for (int t = 1; t <= 25; ++t) {
    Tensor g = random_tensor({7}, rng);
    num::adamw_step({&w}, {&g}, state, 1e-3);
    plain_adam_step(w_ref, g.data, m_ref, v_ref, t, 1e-3, 0.9, 0.999, 1e-8);
  }
  CHECK(w.data == w_ref);
}

TEST_CASE("adamw with zero gradients is exponential weight decay") {
  Tensor w = Tensor::from({2}, {2.0, -3.0});
  Tensor g = Tensor::zeros({2});
  auto state = num::AdamWState::init({&w}, 0.05, 1e-2);
  for (int i = 0; i < 10; ++i) num::adamw_step({&w}, {&g}, state, 1e-2);
  const double factor = std::pow(1.0 - 1e-2 * 0.05, 10);
  CHECK(w.data[0] == doctest::Approx(2.0 * factor).epsilon(1e-12));
  CHECK(w.data[1] == doctest::Approx(-3.0 * factor).epsilon(1e-12));
}

TEST_CASE("cosine schedule with restarts") {
  num::CosineRestartSchedule s{1e-5, 1e-3, 10, 2};
  CHECK(num::schedule_lr(s, 0) == s.eta_max);
  CHECK(num::cosine_value(s.eta_min, s.eta_max, 10, 10) == s.eta_min);
  CHECK(num::cosine_value(s.eta_min, s.eta_max, 5, 10) ==
        doctest::Approx((s.eta_max + s.eta_min) / 2.0).epsilon(1e-12));
  // restart boundaries at 10, 30, 70, ...
  CHECK(num::schedule_lr(s, 10) == s.eta_max);
  CHECK(num::schedule_lr(s, 30) == s.eta_max);
  CHECK(num::schedule_lr(s, 70) == s.eta_max);
  for (std::int64_t t = 0; t < 200; ++t) {
    const double lr = num::schedule_lr(s, t);
    CHECK(lr >= s.eta_min);
    CHECK(lr <= s.eta_max);
  }
  // second period is stretched: same phase fraction, same value
  CHECK(num::schedule_lr(s, 5) == doctest::Approx(num::schedule_lr(s, 20)).epsilon(1e-12));
  CHECK_THROWS(num::schedule_lr(s, -1));
}

TEST_CASE("pca axis-aligned example") {
  Tensor rows = Tensor::from({3, 2}, {-1, 0, 0, 0, 1, 0});
  const auto res = num::pca_top2(rows);
  CHECK(std::abs(std::abs(res.components.at(0, 0)) - 1.0) < 1e-9);
  CHECK(std::abs(res.components.at(0, 1)) < 1e-9);
  CHECK(res.variance2 < 1e-9);
  CHECK(res.variance1 == doctest::Approx(1.0));  // var of {-1,0,1} with 1/(n-1)
}

TEST_CASE("pca rotation equivariance") {
  Rng rng(77);
  Tensor rows = random_tensor({12, 2}, rng);
  const auto base = num::pca_top2(rows);
  const double theta = 0.83;
  const double c = std::cos(theta), s = std::sin(theta);
  Tensor rot = Tensor::zeros({12, 2});
  for (int i = 0; i < 12; ++i) {
    rot.at(i, 0) = c * rows.at(i, 0) - s * rows.at(i, 1);
    rot.at(i, 1) = s * rows.at(i, 0) + c * rows.at(i, 1);
  }
  const auto rotated = num::pca_top2(rot);
  for (int k = 0; k < 2; ++k) {
    // projections agree up to component sign
    double same = 0.0, flip = 0.0;
    for (int i = 0; i < 12; ++i) {
      same = std::max(same, std::abs(rotated.projections.at(i, k) - base.projections.at(i, k)));
      flip = std::max(flip, std::abs(rotated.projections.at(i, k) + base.projections.at(i, k)));
    }
    CHECK(std::min(same, flip) < 1e-9);
  }
}

TEST_CASE("pca matches jacobi eigensolver oracle") {
  Rng rng(123);
  Tensor rows = random_tensor({10, 5}, rng);
  const auto res = num::pca_top2(rows);

  // oracle: covariance eigendecomposition by jacobi rotations
  const int n = 10, d = 5;
  std::vector<double> mean(d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) mean[j] += rows.at(i, j) / n;
  std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cov[static_cast<std::size_t>(a) * d + b] +=
            (rows.at(i, a) - mean[a]) * (rows.at(i, b) - mean[b]) / (n - 1);
  std::vector<double> evals, evecs;
  oracles::jacobi_eigen(cov, d, evals, evecs);

  CHECK(res.variance1 == doctest::Approx(evals[0]).epsilon(1e-10));
  CHECK(res.variance2 == doctest::Approx(evals[1]).epsilon(1e-10));

  // rank-2 reconstructions must agree regardless of component signs
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      double impl = res.projections.at(i, 0) * res.components.at(0, j) +
                    res.projections.at(i, 1) * res.components.at(1, j);
      double oracle = 0.0;
      for (int k = 0; k < 2; ++k) {
        double proj = 0.0;
        for (int c = 0; c < d; ++c)
          proj += (rows.at(i, c) - mean[c]) * evecs[static_cast<std::size_t>(k) * d + c];
        oracle += proj * evecs[static_cast<std::size_t>(k) * d + j];
      }
      CHECK(impl == doctest::Approx(oracle).epsilon(0).scale(1).epsilon(1e-8));
    }
}

TEST_CASE("pca components are orthonormal") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor rows = random_tensor({rng.uniform_int(3, 20), rng.uniform_int(2, 8)}, rng);
    const auto res = num::pca_top2(rows);
    double n1 = 0, n2 = 0, dot = 0;
    const int d = res.components.cols();
    for (int j = 0; j < d; ++j) {
      n1 += res.components.at(0, j) * res.components.at(0, j);
      n2 += res.components.at(1, j) * res.components.at(1, j);
      dot += res.components.at(0, j) * res.components.at(1, j);
    }
    CHECK(std::abs(std::sqrt(n1) - 1.0) < 1e-9);
    CHECK(std::abs(std::sqrt(n2) - 1.0) < 1e-9);
    CHECK(std::abs(dot) < 1e-9);
    CHECK(res.variance1 >= res.variance2);
  }
}

TEST_CASE("pca degenerate input signals zero variance") {
  Tensor rows = Tensor::zeros({4, 3});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) rows.at(i, j) = 7.5;
  const auto res = num::pca_top2(rows);
  CHECK(res.degenerate);
  CHECK(res.variance1 == 0.0);
  CHECK(res.variance2 == 0.0);
  CHECK_THROWS(num::pca_top2(Tensor::zeros({2, 2})));
}

TEST_CASE("checkpoint round trip") {
  Rng rng(3);
  num::NamedTensors tensors;
  tensors.emplace_back("encoder.w1", random_tensor({4, 6}, rng));
  tensors.emplace_back("bias", random_tensor({6}, rng));
  tensors.emplace_back("step_scalar", Tensor::scalar(42.0));
  const std::string path = "test_checkpoint.gkpt";
  num::save_checkpoint(path, tensors);
  const auto loaded = num::load_checkpoint(path);
  REQUIRE(loaded.size() == tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    CHECK(loaded[i].first == tensors[i].first);
    CHECK(loaded[i].second.shape == tensors[i].second.shape);
    CHECK(loaded[i].second.data == tensors[i].second.data);
  }
  std::remove(path.c_str());
  CHECK_THROWS(num::load_checkpoint("does_not_exist.gkpt"));
}
