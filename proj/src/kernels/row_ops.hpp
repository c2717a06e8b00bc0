#pragma once

#include <cmath>
#include <cstddef>

// Per-row / per-element workers shared by the serial and OpenMP
// backends. Both backends iterate the same independent output units and
// call these, so the two backends produce bitwise-identical results.

namespace groundkit::kernels::row_ops {

inline void matmul_row(const double* a, const double* b, double* c, int i, int k,
                       int n) {
  const double* arow = a + static_cast<std::size_t>(i) * k;
  double* crow = c + static_cast<std::size_t>(i) * n;
  for (int j = 0; j < n; ++j) crow[j] = 0.0;
  for (int p = 0; p < k; ++p) {
    const double av = arow[p];
    const double* brow = b + static_cast<std::size_t>(p) * n;
    for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

// c[i][j] = sum_p a[p][i] * b[p][j]   (a stored k x m)
inline void matmul_tn_row(const double* a, const double* b, double* c, int i, int m,
                          int k, int n) {
  double* crow = c + static_cast<std::size_t>(i) * n;
  for (int j = 0; j < n; ++j) crow[j] = 0.0;
  for (int p = 0; p < k; ++p) {
    const double av = a[static_cast<std::size_t>(p) * m + i];
    const double* brow = b + static_cast<std::size_t>(p) * n;
    for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
  }
}

// c[i][j] = sum_p a[i][p] * b[j][p]   (b stored n x k)
inline void matmul_nt_row(const double* a, const double* b, double* c, int i, int k,
                          int n) {
  const double* arow = a + static_cast<std::size_t>(i) * k;
  double* crow = c + static_cast<std::size_t>(i) * n;
  for (int j = 0; j < n; ++j) {
    const double* brow = b + static_cast<std::size_t>(j) * k;
    double acc = 0.0;
    for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
    crow[j] = acc;
  }
}

inline void softmax_row(const double* x, double* y, int cols) {
  double mx = x[0];
  for (int j = 1; j < cols; ++j)
    if (x[j] > mx) mx = x[j];
  double sum = 0.0;
  for (int j = 0; j < cols; ++j) {
    y[j] = std::exp(x[j] - mx);
    sum += y[j];
  }
  const double inv = 1.0 / sum;
  for (int j = 0; j < cols; ++j) y[j] *= inv;
}

inline void log_softmax_row(const double* x, double* y, int cols) {
  double mx = x[0];
  for (int j = 1; j < cols; ++j)
    if (x[j] > mx) mx = x[j];
  double sum = 0.0;
  for (int j = 0; j < cols; ++j) sum += std::exp(x[j] - mx);
  const double lse = mx + std::log(sum);
  for (int j = 0; j < cols; ++j) y[j] = x[j] - lse;
}

inline void softmax_bwd_row(const double* y, const double* dy, double* dx, int cols) {
  double dot = 0.0;
  for (int j = 0; j < cols; ++j) dot += dy[j] * y[j];
  for (int j = 0; j < cols; ++j) dx[j] += y[j] * (dy[j] - dot);
}

inline void log_softmax_bwd_row(const double* y, const double* dy, double* dx,
                                int cols) {
  double sum = 0.0;
  for (int j = 0; j < cols; ++j) sum += dy[j];
  for (int j = 0; j < cols; ++j) dx[j] += dy[j] - std::exp(y[j]) * sum;
}

inline void layer_norm_row(const double* x, double* y, double* mean, double* inv_std,
                           int cols, double eps) {
  double mu = 0.0;
  for (int j = 0; j < cols; ++j) mu += x[j];
  mu /= cols;
  double var = 0.0;
  for (int j = 0; j < cols; ++j) {
    const double d = x[j] - mu;
    var += d * d;
  }
  var /= cols;
  const double is = 1.0 / std::sqrt(var + eps);
  *mean = mu;
  *inv_std = is;
  for (int j = 0; j < cols; ++j) y[j] = (x[j] - mu) * is;
}

inline void layer_norm_bwd_row(const double* x, const double* dy, double mean,
                               double inv_std, double* dx, int cols) {
  // y_j = (x_j - mu) * s;  dx = s * (dy - mean(dy) - y * mean(dy .* y))
  double dy_mean = 0.0;
  double dyy_mean = 0.0;
  for (int j = 0; j < cols; ++j) {
    const double yj = (x[j] - mean) * inv_std;
    dy_mean += dy[j];
    dyy_mean += dy[j] * yj;
  }
  dy_mean /= cols;
  dyy_mean /= cols;
  for (int j = 0; j < cols; ++j) {
    const double yj = (x[j] - mean) * inv_std;
    dx[j] += inv_std * (dy[j] - dy_mean - yj * dyy_mean);
  }
}

// one output column of a column-wise sum over rows
inline double sum_col(const double* x, int rows, int cols, int j) {
  double acc = 0.0;
  for (int i = 0; i < rows; ++i) acc += x[static_cast<std::size_t>(i) * cols + j];
  return acc;
}

inline void max_col(const double* x, int rows, int cols, int j, double* out,
                    int* argmax) {
  double best = x[j];
  int arg = 0;
  for (int i = 1; i < rows; ++i) {
    const double v = x[static_cast<std::size_t>(i) * cols + j];
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  *out = best;
  *argmax = arg;
}

inline void max_row(const double* x, int cols, double* out, int* argmax) {
  double best = x[0];
  int arg = 0;
  for (int j = 1; j < cols; ++j) {
    if (x[j] > best) {
      best = x[j];
      arg = j;
    }
  }
  *out = best;
  *argmax = arg;
}

inline void unfold_row(const double* x, double* u, int frames, int dim, int window,
                       int t) {
  const int half = window / 2;
  double* urow = u + static_cast<std::size_t>(t) * (window * dim);
  for (int k = 0; k < window; ++k) {
    const int src = t + k - half;
    double* dst = urow + static_cast<std::size_t>(k) * dim;
    if (src < 0 || src >= frames) {
      for (int c = 0; c < dim; ++c) dst[c] = 0.0;
    } else {
      const double* xs = x + static_cast<std::size_t>(src) * dim;
      for (int c = 0; c < dim; ++c) dst[c] = xs[c];
    }
  }
}

// gather form of the unfold adjoint: independent per output frame
inline void fold_row(const double* du, double* dx, int frames, int dim, int window,
                     int t) {
  const int half = window / 2;
  double* dst = dx + static_cast<std::size_t>(t) * dim;
  for (int k = 0; k < window; ++k) {
    const int ut = t - k + half;
    if (ut < 0 || ut >= frames) continue;
    const double* src =
        du + static_cast<std::size_t>(ut) * (window * dim) + static_cast<std::size_t>(k) * dim;
    for (int c = 0; c < dim; ++c) dst[c] += src[c];
  }
}

}  // namespace groundkit::kernels::row_ops
