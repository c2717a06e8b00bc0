#include "groundkit/tape.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "groundkit/kernels.hpp"

namespace groundkit::num {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

const char* op_name(Op op) {
  switch (op) {
    case Op::leaf: return "leaf";
    case Op::matmul: return "matmul";
    case Op::add: return "add";
    case Op::add_bias: return "add_bias";
    case Op::mul: return "mul";
    case Op::mul_rowvec: return "mul_rowvec";
    case Op::scale: return "scale";
    case Op::concat_cols: return "concat_cols";
    case Op::stack_rows: return "stack_rows";
    case Op::relu: return "relu";
    case Op::leaky_relu: return "leaky_relu";
    case Op::softmax_rows: return "softmax";
    case Op::log_softmax_rows: return "log_softmax";
    case Op::mean_axis: return "mean_over_axis";
    case Op::max_axis: return "max_over_axis";
    case Op::embedding: return "embedding_lookup";
    case Op::layer_norm: return "layer_norm";
    case Op::unfold1d: return "unfold1d";
    case Op::slice_rows: return "slice_rows";
    case Op::slice_cols: return "slice_cols";
    case Op::transpose: return "transpose";
    case Op::broadcast_col: return "broadcast_col";
    case Op::broadcast_row: return "broadcast_row";
    case Op::reshape: return "reshape";
    case Op::sum_all: return "sum_all";
    case Op::pick: return "pick";
    case Op::ctc_loss: return "ctc_loss";
  }
  return "?";
}

const Tensor& Gradients::at(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= grads_.size())
    throw std::out_of_range("gradients: bad node id");
  if (!present_[static_cast<std::size_t>(id)])
    throw std::logic_error("gradients: node " + std::to_string(id) +
                           " has no gradient (detached or constant)");
  return grads_[static_cast<std::size_t>(id)];
}

void Tape::check_id(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= entries_.size())
    throw std::out_of_range("tape: bad node id " + std::to_string(id));
}

int Tape::push(Entry e) {
  if (e.op != Op::leaf) {
    bool rg = false;
    for (int in : e.inputs) rg = rg || entry(in).value.requires_grad;
    e.value.requires_grad = rg;
  }
  if (!e.value.all_finite())
    throw std::runtime_error(std::string("tape: non-finite output of ") + op_name(e.op));
  entries_.push_back(std::move(e));
  return static_cast<int>(entries_.size()) - 1;
}

int Tape::leaf(Tensor t) {
  Entry e;
  e.op = Op::leaf;
  e.value = std::move(t);
  return push(std::move(e));
}

int Tape::constant(Tensor t) {
  t.requires_grad = false;
  return leaf(std::move(t));
}

int Tape::matmul(int a, int b) {
  check_id(a);
  check_id(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows())
    throw std::invalid_argument("matmul: incompatible shapes " + A.shape_str() + " " +
                                B.shape_str());
  Entry e;
  e.op = Op::matmul;
  e.inputs = {a, b};
  e.value = Tensor::zeros({A.rows(), B.cols()});
  kernels::matmul(A.data.data(), B.data.data(), e.value.data.data(), A.rows(), A.cols(),
                  B.cols());
  return push(std::move(e));
}

int Tape::add(int a, int b) {
  check_id(a);
  check_id(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B))
    throw std::invalid_argument("add: shape mismatch " + A.shape_str() + " vs " +
                                B.shape_str());
  Entry e;
  e.op = Op::add;
  e.inputs = {a, b};
  e.value = Tensor::zeros(A.shape);
  kernels::ew_add(A.data.data(), B.data.data(), e.value.data.data(), A.numel());
  return push(std::move(e));
}

int Tape::add_bias(int a, int bias) {
  check_id(a);
  check_id(bias);
  const Tensor& A = value(a);
  const Tensor& B = value(bias);
  if (A.rank() != 2 || B.rank() != 1 || B.shape[0] != A.cols())
    throw std::invalid_argument("add_bias: shape mismatch " + A.shape_str() + " vs " +
                                B.shape_str());
  Entry e;
  e.op = Op::add_bias;
  e.inputs = {a, bias};
  e.value = Tensor::zeros(A.shape);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) e.value.at(i, j) = A.at(i, j) + B[j];
  return push(std::move(e));
}

int Tape::mul(int a, int b) {
  check_id(a);
  check_id(b);
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (!A.same_shape(B))
    throw std::invalid_argument("mul: shape mismatch " + A.shape_str() + " vs " +
                                B.shape_str());
  Entry e;
  e.op = Op::mul;
  e.inputs = {a, b};
  e.value = Tensor::zeros(A.shape);
  kernels::ew_mul(A.data.data(), B.data.data(), e.value.data.data(), A.numel());
  return push(std::move(e));
}

int Tape::mul_rowvec(int a, int v) {
  check_id(a);
  check_id(v);
  const Tensor& A = value(a);
  const Tensor& V = value(v);
  if (A.rank() != 2 || V.rank() != 1 || V.shape[0] != A.cols())
    throw std::invalid_argument("mul_rowvec: shape mismatch");
  Entry e;
  e.op = Op::mul_rowvec;
  e.inputs = {a, v};
  e.value = Tensor::zeros(A.shape);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) e.value.at(i, j) = A.at(i, j) * V[j];
  return push(std::move(e));
}

int Tape::scale(int a, double s) {
  check_id(a);
  const Tensor& A = value(a);
  Entry e;
  e.op = Op::scale;
  e.inputs = {a};
  e.scalar_arg = s;
  e.value = Tensor::zeros(A.shape);
  kernels::ew_scale(A.data.data(), s, e.value.data.data(), A.numel());
  return push(std::move(e));
}

int Tape::concat_cols(const std::vector<int>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  for (int p : parts) check_id(p);
  const int rank = value(parts[0]).rank();
  Entry e;
  e.op = Op::concat_cols;
  e.inputs = parts;
  if (rank == 1) {
    int total = 0;
    for (int p : parts) {
      if (value(p).rank() != 1) throw std::invalid_argument("concat: mixed ranks");
      total += value(p).shape[0];
    }
    e.value = Tensor::zeros({total});
    int off = 0;
    for (int p : parts) {
      const Tensor& t = value(p);
      for (int i = 0; i < t.shape[0]; ++i) e.value[off + i] = t[i];
      off += t.shape[0];
    }
  } else if (rank == 2) {
    const int rows = value(parts[0]).rows();
    int total = 0;
    for (int p : parts) {
      const Tensor& t = value(p);
      if (t.rank() != 2 || t.rows() != rows)
        throw std::invalid_argument("concat: row mismatch");
      total += t.cols();
    }
    e.value = Tensor::zeros({rows, total});
    int off = 0;
    for (int p : parts) {
      const Tensor& t = value(p);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < t.cols(); ++j) e.value.at(i, off + j) = t.at(i, j);
      off += t.cols();
    }
  } else {
    throw std::invalid_argument("concat: unsupported rank");
  }
  return push(std::move(e));
}

int Tape::stack_rows(const std::vector<int>& vecs) {
  if (vecs.empty()) throw std::invalid_argument("stack_rows: no inputs");
  for (int v : vecs) check_id(v);
  const int d = value(vecs[0]).rank() == 1 ? value(vecs[0]).shape[0] : -1;
  if (d < 0) throw std::invalid_argument("stack_rows: inputs must be vectors");
  Entry e;
  e.op = Op::stack_rows;
  e.inputs = vecs;
  e.value = Tensor::zeros({static_cast<int>(vecs.size()), d});
  for (std::size_t r = 0; r < vecs.size(); ++r) {
    const Tensor& t = value(vecs[r]);
    if (t.rank() != 1 || t.shape[0] != d)
      throw std::invalid_argument("stack_rows: length mismatch");
    for (int j = 0; j < d; ++j) e.value.at(static_cast<int>(r), j) = t[j];
  }
  return push(std::move(e));
}

int Tape::relu(int a) {
  check_id(a);
  const Tensor& A = value(a);
  Entry e;
  e.op = Op::relu;
  e.inputs = {a};
  e.value = Tensor::zeros(A.shape);
  kernels::ew_relu(A.data.data(), e.value.data.data(), A.numel());
  return push(std::move(e));
}

int Tape::leaky_relu(int a, double slope) {
  check_id(a);
  const Tensor& A = value(a);
  Entry e;
  e.op = Op::leaky_relu;
  e.inputs = {a};
  e.scalar_arg = slope;
  e.value = Tensor::zeros(A.shape);
  kernels::ew_leaky_relu(A.data.data(), slope, e.value.data.data(), A.numel());
  return push(std::move(e));
}

namespace {
void rows_cols(const Tensor& t, int& rows, int& cols) {
  if (t.rank() == 1) {
    rows = 1;
    cols = t.shape[0];
  } else if (t.rank() == 2) {
    rows = t.shape[0];
    cols = t.shape[1];
  } else {
    throw std::invalid_argument("softmax: rank must be 1 or 2");
  }
}
}  // namespace

int Tape::softmax_rows(int a) {
  check_id(a);
  const Tensor& A = value(a);
  int rows = 0, cols = 0;
  rows_cols(A, rows, cols);
  if (cols == 0) throw std::invalid_argument("softmax: empty rows");
  Entry e;
  e.op = Op::softmax_rows;
  e.inputs = {a};
  e.value = Tensor::zeros(A.shape);
  kernels::softmax_rows(A.data.data(), e.value.data.data(), rows, cols);
  return push(std::move(e));
}

int Tape::log_softmax_rows(int a) {
  check_id(a);
  const Tensor& A = value(a);
  int rows = 0, cols = 0;
  rows_cols(A, rows, cols);
  if (cols == 0) throw std::invalid_argument("log_softmax: empty rows");
  Entry e;
  e.op = Op::log_softmax_rows;
  e.inputs = {a};
  e.value = Tensor::zeros(A.shape);
  kernels::log_softmax_rows(A.data.data(), e.value.data.data(), rows, cols);
  return push(std::move(e));
}

int Tape::mean_axis(int a, int axis) {
  check_id(a);
  const Tensor& A = value(a);
  Entry e;
  e.op = Op::mean_axis;
  e.inputs = {a};
  e.int_args = {axis};
  if (A.rank() == 1) {
    if (axis != 0) throw std::invalid_argument("mean_over_axis: bad axis for vector");
    if (A.shape[0] == 0) throw std::invalid_argument("mean_over_axis: empty");
    double acc = 0.0;
    for (double v : A.data) acc += v;
    e.value = Tensor::scalar(acc / static_cast<double>(A.shape[0]));
  } else if (A.rank() == 2) {
    if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("mean_over_axis: empty");
    if (axis == 0) {
      e.value = Tensor::zeros({A.cols()});
      kernels::reduce_sum_axis0(A.data.data(), e.value.data.data(), A.rows(), A.cols());
      kernels::ew_scale(e.value.data.data(), 1.0 / A.rows(), e.value.data.data(),
                        e.value.numel());
    } else if (axis == 1) {
      e.value = Tensor::zeros({A.rows()});
      kernels::reduce_sum_axis1(A.data.data(), e.value.data.data(), A.rows(), A.cols());
      kernels::ew_scale(e.value.data.data(), 1.0 / A.cols(), e.value.data.data(),
                        e.value.numel());
    } else {
      throw std::invalid_argument("mean_over_axis: axis out of range");
    }
  } else {
    throw std::invalid_argument("mean_over_axis: unsupported rank");
  }
  return push(std::move(e));
}

int Tape::max_axis(int a, int axis) {
  check_id(a);
  const Tensor& A = value(a);
  if (A.rank() != 2) throw std::invalid_argument("max_over_axis: rank-2 input required");
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("max_over_axis: empty");
  Entry e;
  e.op = Op::max_axis;
  e.inputs = {a};
  const int out_n = axis == 0 ? A.cols() : A.rows();
  e.value = Tensor::zeros({out_n});
  std::vector<int> argmax(static_cast<std::size_t>(out_n));
  if (axis == 0)
    kernels::reduce_max_axis0(A.data.data(), e.value.data.data(), argmax.data(), A.rows(),
                              A.cols());
  else if (axis == 1)
    kernels::reduce_max_axis1(A.data.data(), e.value.data.data(), argmax.data(), A.rows(),
                              A.cols());
  else
    throw std::invalid_argument("max_over_axis: axis out of range");
  e.int_args.push_back(axis);
  e.int_args.insert(e.int_args.end(), argmax.begin(), argmax.end());
  return push(std::move(e));
}

int Tape::embedding(int table, const std::vector<int>& ids) {
  check_id(table);
  const Tensor& T = value(table);
  if (T.rank() != 2) throw std::invalid_argument("embedding_lookup: table must be rank 2");
  if (ids.empty()) throw std::invalid_argument("embedding_lookup: empty id list");
  Entry e;
  e.op = Op::embedding;
  e.inputs = {table};
  e.int_args = ids;
  e.value = Tensor::zeros({static_cast<int>(ids.size()), T.cols()});
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const int id = ids[r];
    if (id < 0 || id >= T.rows())
      throw std::out_of_range("embedding_lookup: id " + std::to_string(id));
    for (int j = 0; j < T.cols(); ++j)
      e.value.at(static_cast<int>(r), j) = T.at(id, j);
  }
  return push(std::move(e));
}

int Tape::layer_norm(int a, double eps) {
  check_id(a);
  const Tensor& A = value(a);
  if (A.rank() != 2) throw std::invalid_argument("layer_norm: rank-2 input required");
  Entry e;
  e.op = Op::layer_norm;
  e.inputs = {a};
  e.scalar_arg = eps;
  e.value = Tensor::zeros(A.shape);
  std::vector<double> mean(static_cast<std::size_t>(A.rows()));
  std::vector<double> inv_std(static_cast<std::size_t>(A.rows()));
  kernels::layer_norm_rows(A.data.data(), e.value.data.data(), mean.data(),
                           inv_std.data(), A.rows(), A.cols(), eps);
  e.dbl_args = std::move(mean);
  e.dbl_args.insert(e.dbl_args.end(), inv_std.begin(), inv_std.end());
  return push(std::move(e));
}

int Tape::unfold1d(int a, int window) {
  check_id(a);
  const Tensor& A = value(a);
  if (A.rank() != 2) throw std::invalid_argument("unfold1d: rank-2 input required");
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("unfold1d: window must be odd and positive");
  Entry e;
  e.op = Op::unfold1d;
  e.inputs = {a};
  e.int_args = {window};
  e.value = Tensor::zeros({A.rows(), window * A.cols()});
  kernels::unfold1d(A.data.data(), e.value.data.data(), A.rows(), A.cols(), window);
  return push(std::move(e));
}

int Tape::slice_rows(int a, int r0, int r1) {
  check_id(a);
  const Tensor& A = value(a);
  if (A.rank() != 2) throw std::invalid_argument("slice_rows: rank-2 input required");
  if (r0 < 0 || r1 > A.rows() || r0 >= r1)
    throw std::out_of_range("slice_rows: bad range");
  Entry e;
  e.op = Op::slice_rows;
  e.inputs = {a};
  e.int_args = {r0, r1};
  e.value = Tensor::zeros({r1 - r0, A.cols()});
  for (int i = r0; i < r1; ++i)
    for (int j = 0; j < A.cols(); ++j) e.value.at(i - r0, j) = A.at(i, j);
  return push(std::move(e));
}

int Tape::slice_cols(int a, int c0, int c1) {
  check_id(a);
  const Tensor& A = value(a);
  if (A.rank() != 2) throw std::invalid_argument("slice_cols: rank-2 input required");
  if (c0 < 0 || c1 > A.cols() || c0 >= c1)
    throw std::out_of_range("slice_cols: bad range");
  Entry e;
  e.op = Op::slice_cols;
  e.inputs = {a};
  e.int_args = {c0, c1};
  e.value = Tensor::zeros({A.rows(), c1 - c0});
  for (int i = 0; i < A.rows(); ++i)
    for (int j = c0; j < c1; ++j) e.value.at(i, j - c0) = A.at(i, j);
  return push(std::move(e));
}

int Tape::transpose(int a) {
  check_id(a);
  const Tensor& A = value(a);
  if (A.rank() != 2) throw std::invalid_argument("transpose: rank-2 input required");
  Entry e;
  e.op = Op::transpose;
  e.inputs = {a};
  e.value = Tensor::zeros({A.cols(), A.rows()});
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) e.value.at(j, i) = A.at(i, j);
  return push(std::move(e));
}

int Tape::broadcast_col(int v, int m) {
  check_id(v);
  const Tensor& V = value(v);
  if (V.rank() != 1) throw std::invalid_argument("broadcast_col: vector required");
  if (m < 1) throw std::invalid_argument("broadcast_col: bad width");
  Entry e;
  e.op = Op::broadcast_col;
  e.inputs = {v};
  e.value = Tensor::zeros({V.shape[0], m});
  for (int i = 0; i < V.shape[0]; ++i)
    for (int j = 0; j < m; ++j) e.value.at(i, j) = V[i];
  return push(std::move(e));
}

int Tape::broadcast_row(int v, int n) {
  check_id(v);
  const Tensor& V = value(v);
  if (V.rank() != 1) throw std::invalid_argument("broadcast_row: vector required");
  if (n < 1) throw std::invalid_argument("broadcast_row: bad height");
  Entry e;
  e.op = Op::broadcast_row;
  e.inputs = {v};
  e.value = Tensor::zeros({n, V.shape[0]});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < V.shape[0]; ++j) e.value.at(i, j) = V[j];
  return push(std::move(e));
}

int Tape::reshape(int a, const Shape& s) {
  check_id(a);
  const Tensor& A = value(a);
  if (shape_numel(s) != A.numel()) throw std::invalid_argument("reshape: element count");
  Entry e;
  e.op = Op::reshape;
  e.inputs = {a};
  e.value = A;
  e.value.shape = s;
  e.value.requires_grad = false;  // recomputed by push
  return push(std::move(e));
}

int Tape::sum_all(int a) {
  check_id(a);
  const Tensor& A = value(a);
  double acc = 0.0;
  for (double v : A.data) acc += v;
  Entry e;
  e.op = Op::sum_all;
  e.inputs = {a};
  e.value = Tensor::scalar(acc);
  return push(std::move(e));
}

int Tape::pick(int vec, int index) {
  check_id(vec);
  const Tensor& V = value(vec);
  if (V.rank() != 1) throw std::invalid_argument("pick: vector required");
  if (index < 0 || index >= V.shape[0]) throw std::out_of_range("pick: bad index");
  Entry e;
  e.op = Op::pick;
  e.inputs = {vec};
  e.int_args = {index};
  e.value = Tensor::scalar(V[index]);
  return push(std::move(e));
}

// ---------------------------------------------------------------------------
// CTC
// ---------------------------------------------------------------------------

namespace {

// forward lattice over the blank-interleaved label; alpha includes the
// emission at its own time step
void ctc_alpha(const Tensor& lp, const std::vector<int>& ext, std::vector<double>& alpha) {
  const int T = lp.rows();
  const int S = static_cast<int>(ext.size());
  alpha.assign(static_cast<std::size_t>(T) * S, kNegInf);
  alpha[0] = lp.at(0, ext[0]);
  if (S > 1) alpha[1] = lp.at(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double acc = alpha[(t - 1) * static_cast<std::size_t>(S) + s];
      if (s >= 1) acc = log_add_exp(acc, alpha[(t - 1) * static_cast<std::size_t>(S) + s - 1]);
      if (s >= 2 && ext[s] != 0 && ext[s] != ext[s - 2])
        acc = log_add_exp(acc, alpha[(t - 1) * static_cast<std::size_t>(S) + s - 2]);
      if (acc == kNegInf) {
        alpha[t * static_cast<std::size_t>(S) + s] = kNegInf;
      } else {
        alpha[t * static_cast<std::size_t>(S) + s] = acc + lp.at(t, ext[s]);
      }
    }
  }
}

// beta excludes the emission at its own step: beta_t(s) is the log
// probability of completing the path with emissions t+1 .. T-1
void ctc_beta(const Tensor& lp, const std::vector<int>& ext, std::vector<double>& beta) {
  const int T = lp.rows();
  const int S = static_cast<int>(ext.size());
  beta.assign(static_cast<std::size_t>(T) * S, kNegInf);
  beta[(T - 1) * static_cast<std::size_t>(S) + S - 1] = 0.0;
  if (S > 1) beta[(T - 1) * static_cast<std::size_t>(S) + S - 2] = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double acc = beta[(t + 1) * static_cast<std::size_t>(S) + s] + lp.at(t + 1, ext[s]);
      if (s + 1 < S)
        acc = log_add_exp(acc, beta[(t + 1) * static_cast<std::size_t>(S) + s + 1] +
                                   lp.at(t + 1, ext[s + 1]));
      if (s + 2 < S && ext[s + 2] != 0 && ext[s + 2] != ext[s])
        acc = log_add_exp(acc, beta[(t + 1) * static_cast<std::size_t>(S) + s + 2] +
                                   lp.at(t + 1, ext[s + 2]));
      beta[t * static_cast<std::size_t>(S) + s] = acc;
    }
  }
}

std::vector<int> ctc_extended_label(const std::vector<int>& label, int alphabet_with_blank) {
  std::vector<int> ext;
  ext.reserve(label.size() * 2 + 1);
  ext.push_back(0);
  for (int id : label) {
    if (id <= 0 || id >= alphabet_with_blank)
      throw std::invalid_argument("ctc_loss: label id " + std::to_string(id) +
                                  " outside alphabet (blanks not allowed)");
    ext.push_back(id);
    ext.push_back(0);
  }
  return ext;
}

}  // namespace

int ctc_min_frames(const std::vector<int>& label) {
  // a repeated symbol needs a blank frame in between
  int needed = static_cast<int>(label.size());
  for (std::size_t i = 1; i < label.size(); ++i)
    if (label[i] == label[i - 1]) ++needed;
  return needed < 1 ? 1 : needed;
}

int Tape::ctc_loss(int log_probs, const std::vector<int>& label) {
  check_id(log_probs);
  const Tensor& lp = value(log_probs);
  if (lp.rank() != 2) throw std::invalid_argument("ctc_loss: rank-2 log_probs required");
  const int T = lp.rows();
  const int A1 = lp.cols();
  if (T < 1 || A1 < 2) throw std::invalid_argument("ctc_loss: degenerate shape");
  if (ctc_min_frames(label) > T)
    throw std::invalid_argument("ctc_loss: label too long for " + std::to_string(T) +
                                " frames");
  for (int t = 0; t < T; ++t) {
    double sum = 0.0;
    for (int k = 0; k < A1; ++k) sum += std::exp(lp.at(t, k));
    if (std::abs(sum - 1.0) > 1e-6)
      throw std::invalid_argument("ctc_loss: row " + std::to_string(t) +
                                  " is not a distribution (sum " + std::to_string(sum) +
                                  ")");
  }
  const std::vector<int> ext = ctc_extended_label(label, A1);
  std::vector<double> alpha;
  ctc_alpha(lp, ext, alpha);
  const int S = static_cast<int>(ext.size());
  double log_p = alpha[(T - 1) * static_cast<std::size_t>(S) + S - 1];
  if (S > 1)
    log_p = log_add_exp(log_p, alpha[(T - 1) * static_cast<std::size_t>(S) + S - 2]);
  if (log_p == kNegInf)
    throw std::runtime_error("ctc_loss: label has zero probability mass");
  Entry e;
  e.op = Op::ctc_loss;
  e.inputs = {log_probs};
  e.int_args = label;
  e.value = Tensor::scalar(-log_p);
  return push(std::move(e));
}

// ---------------------------------------------------------------------------
// backward
// ---------------------------------------------------------------------------

Gradients Tape::backward(int loss) const {
  check_id(loss);
  const Tensor& L = value(loss);
  if (L.numel() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got " + L.shape_str());
  Gradients g(entries_.size());
  auto buf = [&](int id) -> Tensor& {
    auto idx = static_cast<std::size_t>(id);
    if (!g.present_[idx]) {
      g.grads_[idx] = Tensor::zeros(entries_[idx].value.shape);
      g.present_[idx] = 1;
    }
    return g.grads_[idx];
  };
  {
    Tensor seed = Tensor::zeros(L.shape);
    seed.data[0] = 1.0;
    g.grads_[static_cast<std::size_t>(loss)] = std::move(seed);
    g.present_[static_cast<std::size_t>(loss)] = 1;
  }

  auto wants = [&](int id) { return entries_[static_cast<std::size_t>(id)].value.requires_grad; };

  for (int id = loss; id >= 0; --id) {
    const auto idx = static_cast<std::size_t>(id);
    if (!g.present_[idx]) continue;
    const Entry& e = entries_[idx];
    if (e.op == Op::leaf) continue;
    if (!e.value.requires_grad) continue;
    const Tensor& dy = g.grads_[idx];

    switch (e.op) {
      case Op::matmul: {
        const Tensor& A = value(e.inputs[0]);
        const Tensor& B = value(e.inputs[1]);
        const int m = A.rows(), k = A.cols(), n = B.cols();
        if (wants(e.inputs[0])) {
          Tensor tmp = Tensor::zeros({m, k});
          kernels::matmul_nt(dy.data.data(), B.data.data(), tmp.data.data(), m, n, k);
          kernels::ew_axpy(1.0, tmp.data.data(), buf(e.inputs[0]).data.data(), tmp.numel());
        }
        if (wants(e.inputs[1])) {
          Tensor tmp = Tensor::zeros({k, n});
          kernels::matmul_tn(A.data.data(), dy.data.data(), tmp.data.data(), k, m, n);
          kernels::ew_axpy(1.0, tmp.data.data(), buf(e.inputs[1]).data.data(), tmp.numel());
        }
        break;
      }
      case Op::add: {
        for (int in : e.inputs)
          if (wants(in))
            kernels::ew_axpy(1.0, dy.data.data(), buf(in).data.data(), dy.numel());
        break;
      }
      case Op::add_bias: {
        const Tensor& A = value(e.inputs[0]);
        if (wants(e.inputs[0]))
          kernels::ew_axpy(1.0, dy.data.data(), buf(e.inputs[0]).data.data(), dy.numel());
        if (wants(e.inputs[1])) {
          Tensor tmp = Tensor::zeros({A.cols()});
          kernels::reduce_sum_axis0(dy.data.data(), tmp.data.data(), A.rows(), A.cols());
          kernels::ew_axpy(1.0, tmp.data.data(), buf(e.inputs[1]).data.data(), tmp.numel());
        }
        break;
      }
      case Op::mul: {
        const Tensor& A = value(e.inputs[0]);
        const Tensor& B = value(e.inputs[1]);
        if (wants(e.inputs[0])) {
          Tensor& da = buf(e.inputs[0]);
          for (std::size_t i = 0; i < dy.numel(); ++i) da.data[i] += dy.data[i] * B.data[i];
        }
        if (wants(e.inputs[1])) {
          Tensor& db = buf(e.inputs[1]);
          for (std::size_t i = 0; i < dy.numel(); ++i) db.data[i] += dy.data[i] * A.data[i];
        }
        break;
      }
      case Op::mul_rowvec: {
        const Tensor& A = value(e.inputs[0]);
        const Tensor& V = value(e.inputs[1]);
        if (wants(e.inputs[0])) {
          Tensor& da = buf(e.inputs[0]);
          for (int i = 0; i < A.rows(); ++i)
            for (int j = 0; j < A.cols(); ++j) da.at(i, j) += dy.at(i, j) * V[j];
        }
        if (wants(e.inputs[1])) {
          Tensor& dv = buf(e.inputs[1]);
          for (int i = 0; i < A.rows(); ++i)
            for (int j = 0; j < A.cols(); ++j) dv[j] += dy.at(i, j) * A.at(i, j);
        }
        break;
      }
      case Op::scale: {
        if (wants(e.inputs[0]))
          kernels::ew_axpy(e.scalar_arg, dy.data.data(), buf(e.inputs[0]).data.data(),
                           dy.numel());
        break;
      }
      case Op::concat_cols: {
        if (value(e.inputs[0]).rank() == 1) {
          int off = 0;
          for (int in : e.inputs) {
            const int n = value(in).shape[0];
            if (wants(in)) {
              Tensor& d = buf(in);
              for (int i = 0; i < n; ++i) d[i] += dy[off + i];
            }
            off += n;
          }
        } else {
          int off = 0;
          for (int in : e.inputs) {
            const Tensor& t = value(in);
            if (wants(in)) {
              Tensor& d = buf(in);
              for (int i = 0; i < t.rows(); ++i)
                for (int j = 0; j < t.cols(); ++j) d.at(i, j) += dy.at(i, off + j);
            }
            off += t.cols();
          }
        }
        break;
      }
      case Op::stack_rows: {
        for (std::size_t r = 0; r < e.inputs.size(); ++r) {
          const int in = e.inputs[r];
          if (!wants(in)) continue;
          Tensor& d = buf(in);
          for (int j = 0; j < dy.cols(); ++j) d[j] += dy.at(static_cast<int>(r), j);
        }
        break;
      }
      case Op::relu: {
        if (wants(e.inputs[0]))
          kernels::ew_leaky_relu_bwd(value(e.inputs[0]).data.data(), dy.data.data(), 0.0,
                                     buf(e.inputs[0]).data.data(), dy.numel());
        break;
      }
      case Op::leaky_relu: {
        if (wants(e.inputs[0]))
          kernels::ew_leaky_relu_bwd(value(e.inputs[0]).data.data(), dy.data.data(),
                                     e.scalar_arg, buf(e.inputs[0]).data.data(), dy.numel());
        break;
      }
      case Op::softmax_rows: {
        if (wants(e.inputs[0])) {
          int rows = 0, cols = 0;
          rows_cols(e.value, rows, cols);
          kernels::softmax_bwd_rows(e.value.data.data(), dy.data.data(),
                                    buf(e.inputs[0]).data.data(), rows, cols);
        }
        break;
      }
      case Op::log_softmax_rows: {
        if (wants(e.inputs[0])) {
          int rows = 0, cols = 0;
          rows_cols(e.value, rows, cols);
          kernels::log_softmax_bwd_rows(e.value.data.data(), dy.data.data(),
                                        buf(e.inputs[0]).data.data(), rows, cols);
        }
        break;
      }
      case Op::mean_axis: {
        if (!wants(e.inputs[0])) break;
        const Tensor& A = value(e.inputs[0]);
        Tensor& da = buf(e.inputs[0]);
        const int axis = e.int_args[0];
        if (A.rank() == 1) {
          const double s = dy.data[0] / static_cast<double>(A.shape[0]);
          for (int i = 0; i < A.shape[0]; ++i) da[i] += s;
        } else if (axis == 0) {
          const double inv = 1.0 / A.rows();
          for (int i = 0; i < A.rows(); ++i)
            for (int j = 0; j < A.cols(); ++j) da.at(i, j) += dy[j] * inv;
        } else {
          const double inv = 1.0 / A.cols();
          for (int i = 0; i < A.rows(); ++i)
            for (int j = 0; j < A.cols(); ++j) da.at(i, j) += dy[i] * inv;
        }
        break;
      }
      case Op::max_axis: {
        if (!wants(e.inputs[0])) break;
        Tensor& da = buf(e.inputs[0]);
        const int axis = e.int_args[0];
        const int* argmax = e.int_args.data() + 1;
        const int n = static_cast<int>(e.value.numel());
        if (axis == 0) {
          for (int j = 0; j < n; ++j) da.at(argmax[j], j) += dy[j];
        } else {
          for (int i = 0; i < n; ++i) da.at(i, argmax[i]) += dy[i];
        }
        break;
      }
      case Op::embedding: {
        if (!wants(e.inputs[0])) break;
        Tensor& dt = buf(e.inputs[0]);
        const int d = dy.cols();
        for (std::size_t r = 0; r < e.int_args.size(); ++r) {
          const int id2 = e.int_args[r];
          for (int j = 0; j < d; ++j) dt.at(id2, j) += dy.at(static_cast<int>(r), j);
        }
        break;
      }
      case Op::layer_norm: {
        if (!wants(e.inputs[0])) break;
        const Tensor& A = value(e.inputs[0]);
        const double* mean = e.dbl_args.data();
        const double* inv_std = e.dbl_args.data() + A.rows();
        kernels::layer_norm_bwd_rows(A.data.data(), dy.data.data(), mean, inv_std,
                                     buf(e.inputs[0]).data.data(), A.rows(), A.cols());
        break;
      }
      case Op::unfold1d: {
        if (!wants(e.inputs[0])) break;
        const Tensor& A = value(e.inputs[0]);
        kernels::fold1d(dy.data.data(), buf(e.inputs[0]).data.data(), A.rows(), A.cols(),
                        e.int_args[0]);
        break;
      }
      case Op::slice_rows: {
        if (!wants(e.inputs[0])) break;
        Tensor& da = buf(e.inputs[0]);
        const int r0 = e.int_args[0];
        for (int i = 0; i < dy.rows(); ++i)
          for (int j = 0; j < dy.cols(); ++j) da.at(r0 + i, j) += dy.at(i, j);
        break;
      }
      case Op::slice_cols: {
        if (!wants(e.inputs[0])) break;
        Tensor& da = buf(e.inputs[0]);
        const int c0 = e.int_args[0];
        for (int i = 0; i < dy.rows(); ++i)
          for (int j = 0; j < dy.cols(); ++j) da.at(i, c0 + j) += dy.at(i, j);
        break;
      }
      case Op::transpose: {
        if (!wants(e.inputs[0])) break;
        Tensor& da = buf(e.inputs[0]);
        for (int i = 0; i < dy.rows(); ++i)
          for (int j = 0; j < dy.cols(); ++j) da.at(j, i) += dy.at(i, j);
        break;
      }
      case Op::broadcast_col: {
        if (!wants(e.inputs[0])) break;
        Tensor& dv = buf(e.inputs[0]);
        for (int i = 0; i < dy.rows(); ++i) {
          double acc = 0.0;
          for (int j = 0; j < dy.cols(); ++j) acc += dy.at(i, j);
          dv[i] += acc;
        }
        break;
      }
      case Op::broadcast_row: {
        if (!wants(e.inputs[0])) break;
        Tensor& dv = buf(e.inputs[0]);
        for (int i = 0; i < dy.rows(); ++i)
          for (int j = 0; j < dy.cols(); ++j) dv[j] += dy.at(i, j);
        break;
      }
      case Op::reshape: {
        if (wants(e.inputs[0]))
          kernels::ew_axpy(1.0, dy.data.data(), buf(e.inputs[0]).data.data(), dy.numel());
        break;
      }
      case Op::sum_all: {
        if (!wants(e.inputs[0])) break;
        Tensor& da = buf(e.inputs[0]);
        const double s = dy.data[0];
        for (double& v : da.data) v += s;
        break;
      }
      case Op::pick: {
        if (wants(e.inputs[0])) buf(e.inputs[0])[e.int_args[0]] += dy.data[0];
        break;
      }
      case Op::ctc_loss: {
        if (!wants(e.inputs[0])) break;
        const Tensor& lp = value(e.inputs[0]);
        const std::vector<int> ext = ctc_extended_label(e.int_args, lp.cols());
        std::vector<double> alpha, beta;
        ctc_alpha(lp, ext, alpha);
        ctc_beta(lp, ext, beta);
        const int T = lp.rows();
        const int S = static_cast<int>(ext.size());
        const double log_p = -e.value.data[0];
        Tensor& da = buf(e.inputs[0]);
        const double upstream = dy.data[0];
        for (int t = 0; t < T; ++t) {
          // d(-log P)/d(log p_t(k)) = -exp(LSE_{s: ext_s = k}(alpha + beta) - log P)
          for (int s = 0; s < S; ++s) {
            const double ab = alpha[t * static_cast<std::size_t>(S) + s] +
                              beta[t * static_cast<std::size_t>(S) + s];
            if (ab == kNegInf) continue;
            da.at(t, ext[s]) -= upstream * std::exp(ab - log_p);
          }
        }
        break;
      }
      case Op::leaf:
        break;
    }
  }
  return g;
}

}  // namespace groundkit::num
