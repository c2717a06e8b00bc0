#include "groundkit/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace groundkit::kernels {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("GROUNDKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::atomic<int> g_threads{initial_threads()};

// Below this many output units, thread startup costs more than the loop.
constexpr int kMinParallelUnits = 64;

bool parallel(int units) { return g_threads.load() > 1 && units >= kMinParallelUnits; }

}  // namespace

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

int threads() { return g_threads.load(); }

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
  parallel(m) ? omp_par::matmul(a, b, c, m, k, n) : serial_ref::matmul(a, b, c, m, k, n);
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
  parallel(m) ? omp_par::matmul_tn(a, b, c, m, k, n)
              : serial_ref::matmul_tn(a, b, c, m, k, n);
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
  parallel(m) ? omp_par::matmul_nt(a, b, c, m, k, n)
              : serial_ref::matmul_nt(a, b, c, m, k, n);
}

void ew_add(const double* a, const double* b, double* out, std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_add(a, b, out, n)
                                     : serial_ref::ew_add(a, b, out, n);
}

void ew_mul(const double* a, const double* b, double* out, std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_mul(a, b, out, n)
                                     : serial_ref::ew_mul(a, b, out, n);
}

void ew_scale(const double* a, double s, double* out, std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_scale(a, s, out, n)
                                     : serial_ref::ew_scale(a, s, out, n);
}

void ew_axpy(double s, const double* x, double* y, std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_axpy(s, x, y, n)
                                     : serial_ref::ew_axpy(s, x, y, n);
}

void ew_relu(const double* x, double* out, std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_relu(x, out, n)
                                     : serial_ref::ew_relu(x, out, n);
}

void ew_leaky_relu(const double* x, double slope, double* out, std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_leaky_relu(x, slope, out, n)
                                     : serial_ref::ew_leaky_relu(x, slope, out, n);
}

void ew_leaky_relu_bwd(const double* x, const double* dy, double slope, double* dx,
                       std::size_t n) {
  parallel(static_cast<int>(n / 64)) ? omp_par::ew_leaky_relu_bwd(x, dy, slope, dx, n)
                                     : serial_ref::ew_leaky_relu_bwd(x, dy, slope, dx, n);
}

void softmax_rows(const double* x, double* y, int rows, int cols) {
  parallel(rows) ? omp_par::softmax_rows(x, y, rows, cols)
                 : serial_ref::softmax_rows(x, y, rows, cols);
}

void log_softmax_rows(const double* x, double* y, int rows, int cols) {
  parallel(rows) ? omp_par::log_softmax_rows(x, y, rows, cols)
                 : serial_ref::log_softmax_rows(x, y, rows, cols);
}

void softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                      int cols) {
  parallel(rows) ? omp_par::softmax_bwd_rows(y, dy, dx, rows, cols)
                 : serial_ref::softmax_bwd_rows(y, dy, dx, rows, cols);
}

void log_softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                          int cols) {
  parallel(rows) ? omp_par::log_softmax_bwd_rows(y, dy, dx, rows, cols)
                 : serial_ref::log_softmax_bwd_rows(y, dy, dx, rows, cols);
}

void layer_norm_rows(const double* x, double* y, double* mean, double* inv_std,
                     int rows, int cols, double eps) {
  parallel(rows) ? omp_par::layer_norm_rows(x, y, mean, inv_std, rows, cols, eps)
                 : serial_ref::layer_norm_rows(x, y, mean, inv_std, rows, cols, eps);
}

void layer_norm_bwd_rows(const double* x, const double* dy, const double* mean,
                         const double* inv_std, double* dx, int rows, int cols) {
  parallel(rows) ? omp_par::layer_norm_bwd_rows(x, dy, mean, inv_std, dx, rows, cols)
                 : serial_ref::layer_norm_bwd_rows(x, dy, mean, inv_std, dx, rows, cols);
}

void reduce_sum_axis0(const double* x, double* out, int rows, int cols) {
  parallel(cols) ? omp_par::reduce_sum_axis0(x, out, rows, cols)
                 : serial_ref::reduce_sum_axis0(x, out, rows, cols);
}

void reduce_sum_axis1(const double* x, double* out, int rows, int cols) {
  parallel(rows) ? omp_par::reduce_sum_axis1(x, out, rows, cols)
                 : serial_ref::reduce_sum_axis1(x, out, rows, cols);
}

void reduce_max_axis0(const double* x, double* out, int* argmax, int rows, int cols) {
  parallel(cols) ? omp_par::reduce_max_axis0(x, out, argmax, rows, cols)
                 : serial_ref::reduce_max_axis0(x, out, argmax, rows, cols);
}

void reduce_max_axis1(const double* x, double* out, int* argmax, int rows, int cols) {
  parallel(rows) ? omp_par::reduce_max_axis1(x, out, argmax, rows, cols)
                 : serial_ref::reduce_max_axis1(x, out, argmax, rows, cols);
}

void unfold1d(const double* x, double* u, int frames, int dim, int window) {
  parallel(frames) ? omp_par::unfold1d(x, u, frames, dim, window)
                   : serial_ref::unfold1d(x, u, frames, dim, window);
}

void fold1d(const double* du, double* dx, int frames, int dim, int window) {
  parallel(frames) ? omp_par::fold1d(du, dx, frames, dim, window)
                   : serial_ref::fold1d(du, dx, frames, dim, window);
}

}  // namespace groundkit::kernels
