#pragma once

#include <string>
#include <vector>

#include "groundkit/tensor.hpp"

namespace groundkit::num {

enum class Op {
  leaf,
  matmul,
  add,
  add_bias,
  mul,
  mul_rowvec,
  scale,
  concat_cols,
  stack_rows,
  relu,
  leaky_relu,
  softmax_rows,
  log_softmax_rows,
  mean_axis,
  max_axis,
  embedding,
  layer_norm,
  unfold1d,
  slice_rows,
  slice_cols,
  transpose,
  broadcast_col,
  broadcast_row,
  reshape,
  sum_all,
  pick,
  ctc_loss,
};

const char* op_name(Op op);

// fewest frames on which a CTC label is feasible
int ctc_min_frames(const std::vector<int>& label);

// Gradients of one backward pass, indexed by tape node id.
class Gradients {
 public:
  explicit Gradients(std::size_t n) : grads_(n), present_(n, 0) {}

  bool has(int id) const { return present_[static_cast<std::size_t>(id)] != 0; }
  // Throws for ids that did not receive a gradient (constants, detached leaves).
  const Tensor& at(int id) const;

 private:
  friend class Tape;
  std::vector<Tensor> grads_;
  std::vector<char> present_;
};

// Define-by-run recording of tensor operations. A tape is built fresh
// for every forward pass and owns the value of every node. Node ids are
// indices into the recording, so inputs always precede consumers.
//
// Every forward op validates shapes and rejects non-finite outputs.
class Tape {
 public:
  Tape() { entries_.reserve(256); }

  int leaf(Tensor t);
  // leaf with requires_grad forced off, for masks and fixed inputs
  int constant(Tensor t);

  int matmul(int a, int b);
  int add(int a, int b);
  // matrix (m x n) + bias vector (n), broadcast over rows
  int add_bias(int a, int bias);
  int mul(int a, int b);
  // matrix (m x n) * row vector (n), broadcast over rows
  int mul_rowvec(int a, int v);
  int scale(int a, double s);
  int concat_cols(const std::vector<int>& parts);
  // 1-D inputs of equal length stacked as matrix rows; repeats allowed
  int stack_rows(const std::vector<int>& vecs);
  int relu(int a);
  int leaky_relu(int a, double slope);
  int softmax_rows(int a);
  int log_softmax_rows(int a);
  int mean_axis(int a, int axis);
  int max_axis(int a, int axis);
  int embedding(int table, const std::vector<int>& ids);
  // row-wise (x - mean) / sqrt(var + eps); affine scaling is separate
  int layer_norm(int a, double eps = 1e-5);
  int unfold1d(int a, int window);
  int slice_rows(int a, int r0, int r1);
  int slice_cols(int a, int c0, int c1);
  int transpose(int a);
  // vector (n) -> matrix (n x m), value copied across columns
  int broadcast_col(int v, int m);
  // vector (m) -> matrix (n x m), value copied across rows
  int broadcast_row(int v, int n);
  int reshape(int a, const Shape& s);
  int sum_all(int a);
  int pick(int vec, int index);
  // -log p(label | log_probs) summed over all blank-augmented paths;
  // blank has id 0, label ids are 1-based alphabet entries
  int ctc_loss(int log_probs, const std::vector<int>& label);

  const Tensor& value(int id) const { return entries_[static_cast<std::size_t>(id)].value; }
  std::size_t size() const { return entries_.size(); }

  // Reverse sweep from a scalar loss node. Seeds d(loss)/d(loss) = 1 and
  // returns gradients for every node on a requires_grad path.
  Gradients backward(int loss) const;

 private:
  struct Entry {
    Op op = Op::leaf;
    std::vector<int> inputs;
    Tensor value;
    // op-specific immediates and saved backward state
    double scalar_arg = 0.0;
    std::vector<int> int_args;
    std::vector<double> dbl_args;
  };

  int push(Entry e);
  const Entry& entry(int id) const { return entries_[static_cast<std::size_t>(id)]; }
  void check_id(int id) const;

  std::vector<Entry> entries_;
};

}  // namespace groundkit::num
