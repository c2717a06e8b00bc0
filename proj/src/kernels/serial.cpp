#include "groundkit/kernels.hpp"

#include "row_ops.hpp"

namespace groundkit::kernels::serial_ref {

namespace ro = row_ops;

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) ro::matmul_row(a, b, c, i, k, n);
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) ro::matmul_tn_row(a, b, c, i, m, k, n);
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) ro::matmul_nt_row(a, b, c, i, k, n);
}

void ew_add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void ew_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void ew_scale(const double* a, double s, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void ew_axpy(double s, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void ew_relu(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void ew_leaky_relu(const double* x, double slope, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : slope * x[i];
}

void ew_leaky_relu_bwd(const double* x, const double* dy, double slope, double* dx,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] += x[i] > 0.0 ? dy[i] : slope * dy[i];
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
  for (int i = 0; i < rows; ++i)
    ro::softmax_row(x + static_cast<std::size_t>(i) * cols,
                    y + static_cast<std::size_t>(i) * cols, cols);
}

void log_softmax_rows(const double* x, double* y, int rows, int cols) {
  for (int i = 0; i < rows; ++i)
    ro::log_softmax_row(x + static_cast<std::size_t>(i) * cols,
                        y + static_cast<std::size_t>(i) * cols, cols);
}

void softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                      int cols) {
  for (int i = 0; i < rows; ++i)
    ro::softmax_bwd_row(y + static_cast<std::size_t>(i) * cols,
                        dy + static_cast<std::size_t>(i) * cols,
                        dx + static_cast<std::size_t>(i) * cols, cols);
}

void log_softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                          int cols) {
  for (int i = 0; i < rows; ++i)
    ro::log_softmax_bwd_row(y + static_cast<std::size_t>(i) * cols,
                            dy + static_cast<std::size_t>(i) * cols,
                            dx + static_cast<std::size_t>(i) * cols, cols);
}

void layer_norm_rows(const double* x, double* y, double* mean, double* inv_std,
                     int rows, int cols, double eps) {
  for (int i = 0; i < rows; ++i)
    ro::layer_norm_row(x + static_cast<std::size_t>(i) * cols,
                       y + static_cast<std::size_t>(i) * cols, mean + i, inv_std + i,
                       cols, eps);
}

void layer_norm_bwd_rows(const double* x, const double* dy, const double* mean,
                         const double* inv_std, double* dx, int rows, int cols) {
  for (int i = 0; i < rows; ++i)
    ro::layer_norm_bwd_row(x + static_cast<std::size_t>(i) * cols,
                           dy + static_cast<std::size_t>(i) * cols, mean[i], inv_std[i],
                           dx + static_cast<std::size_t>(i) * cols, cols);
}

void reduce_sum_axis0(const double* x, double* out, int rows, int cols) {
  for (int j = 0; j < cols; ++j) out[j] = ro::sum_col(x, rows, cols, j);
}

void reduce_sum_axis1(const double* x, double* out, int rows, int cols) {
  for (int i = 0; i < rows; ++i) {
    const double* xr = x + static_cast<std::size_t>(i) * cols;
    double acc = 0.0;
    for (int j = 0; j < cols; ++j) acc += xr[j];
    out[i] = acc;
  }
}

void reduce_max_axis0(const double* x, double* out, int* argmax, int rows, int cols) {
  for (int j = 0; j < cols; ++j) ro::max_col(x, rows, cols, j, out + j, argmax + j);
}

void reduce_max_axis1(const double* x, double* out, int* argmax, int rows, int cols) {
  for (int i = 0; i < rows; ++i)
    ro::max_row(x + static_cast<std::size_t>(i) * cols, cols, out + i, argmax + i);
}

void unfold1d(const double* x, double* u, int frames, int dim, int window) {
  for (int t = 0; t < frames; ++t) ro::unfold_row(x, u, frames, dim, window, t);
}

void fold1d(const double* du, double* dx, int frames, int dim, int window) {
  for (int t = 0; t < frames; ++t) ro::fold_row(du, dx, frames, dim, window, t);
}

}  // namespace groundkit::kernels::serial_ref
