#pragma once

#include <cstddef>

namespace groundkit::kernels {

// Worker-thread cap for the OpenMP backend. Initialized from the
// GROUNDKIT_THREADS environment variable (hardware concurrency when
// unset). With threads() <= 1 every dispatched kernel runs the serial
// reference path, so results are bitwise identical either way: each
// output element is produced by the same scalar code regardless of the
// thread that computes it.
void set_threads(int n);
int threads();

// Dispatched kernels (OpenMP when threads() > 1 and the problem is big
// enough, serial otherwise).
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
// c = a^T * b with a stored k x m
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);
// c = a * b^T with b stored n x k
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);

void ew_add(const double* a, const double* b, double* out, std::size_t n);
void ew_mul(const double* a, const double* b, double* out, std::size_t n);
void ew_scale(const double* a, double s, double* out, std::size_t n);
// y += s * x
void ew_axpy(double s, const double* x, double* y, std::size_t n);
void ew_relu(const double* x, double* out, std::size_t n);
void ew_leaky_relu(const double* x, double slope, double* out, std::size_t n);
// dx += dy where x > 0 (slope elsewhere)
void ew_leaky_relu_bwd(const double* x, const double* dy, double slope, double* dx,
                       std::size_t n);

void softmax_rows(const double* x, double* y, int rows, int cols);
void log_softmax_rows(const double* x, double* y, int rows, int cols);
// dx += softmax backward given y = softmax(x)
void softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows, int cols);
// dx += log-softmax backward given y = log_softmax(x)
void log_softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                          int cols);

void layer_norm_rows(const double* x, double* y, double* mean, double* inv_std,
                     int rows, int cols, double eps);
void layer_norm_bwd_rows(const double* x, const double* dy, const double* mean,
                         const double* inv_std, double* dx, int rows, int cols);

void reduce_sum_axis0(const double* x, double* out, int rows, int cols);
void reduce_sum_axis1(const double* x, double* out, int rows, int cols);
void reduce_max_axis0(const double* x, double* out, int* argmax, int rows, int cols);
void reduce_max_axis1(const double* x, double* out, int* argmax, int rows, int cols);

// im2col for a same-padded temporal window: u[t][k*d + c] = x[t + k - K/2][c]
void unfold1d(const double* x, double* u, int frames, int dim, int window);
// adjoint of unfold1d: dx[t][c] += sum_k du[t - k + K/2][k*d + c]
void fold1d(const double* du, double* dx, int frames, int dim, int window);

// Serial reference implementations, kept callable for tests and the
// kernel benchmark.
namespace serial_ref {
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
void ew_add(const double* a, const double* b, double* out, std::size_t n);
void ew_mul(const double* a, const double* b, double* out, std::size_t n);
void ew_scale(const double* a, double s, double* out, std::size_t n);
void ew_axpy(double s, const double* x, double* y, std::size_t n);
void ew_relu(const double* x, double* out, std::size_t n);
void ew_leaky_relu(const double* x, double slope, double* out, std::size_t n);
void ew_leaky_relu_bwd(const double* x, const double* dy, double slope, double* dx,
                       std::size_t n);
void softmax_rows(const double* x, double* y, int rows, int cols);
void log_softmax_rows(const double* x, double* y, int rows, int cols);
void softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows, int cols);
void log_softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                          int cols);
void layer_norm_rows(const double* x, double* y, double* mean, double* inv_std,
                     int rows, int cols, double eps);
void layer_norm_bwd_rows(const double* x, const double* dy, const double* mean,
                         const double* inv_std, double* dx, int rows, int cols);
void reduce_sum_axis0(const double* x, double* out, int rows, int cols);
void reduce_sum_axis1(const double* x, double* out, int rows, int cols);
void reduce_max_axis0(const double* x, double* out, int* argmax, int rows, int cols);
void reduce_max_axis1(const double* x, double* out, int* argmax, int rows, int cols);
void unfold1d(const double* x, double* u, int frames, int dim, int window);
void fold1d(const double* du, double* dx, int frames, int dim, int window);
}  // namespace serial_ref

// OpenMP backend, exposed for the benchmark; the dispatched entry
// points above choose between this and serial_ref.
namespace omp_par {
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
void ew_add(const double* a, const double* b, double* out, std::size_t n);
void ew_mul(const double* a, const double* b, double* out, std::size_t n);
void ew_scale(const double* a, double s, double* out, std::size_t n);
void ew_axpy(double s, const double* x, double* y, std::size_t n);
void ew_relu(const double* x, double* out, std::size_t n);
void ew_leaky_relu(const double* x, double slope, double* out, std::size_t n);
void ew_leaky_relu_bwd(const double* x, const double* dy, double slope, double* dx,
                       std::size_t n);
void softmax_rows(const double* x, double* y, int rows, int cols);
void log_softmax_rows(const double* x, double* y, int rows, int cols);
void softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows, int cols);
void log_softmax_bwd_rows(const double* y, const double* dy, double* dx, int rows,
                          int cols);
void layer_norm_rows(const double* x, double* y, double* mean, double* inv_std,
                     int rows, int cols, double eps);
void layer_norm_bwd_rows(const double* x, const double* dy, const double* mean,
                         const double* inv_std, double* dx, int rows, int cols);
void reduce_sum_axis0(const double* x, double* out, int rows, int cols);
void reduce_sum_axis1(const double* x, double* out, int rows, int cols);
void reduce_max_axis0(const double* x, double* out, int* argmax, int rows, int cols);
void reduce_max_axis1(const double* x, double* out, int* argmax, int rows, int cols);
void unfold1d(const double* x, double* u, int frames, int dim, int window);
void fold1d(const double* du, double* dx, int frames, int dim, int window);
}  // namespace omp_par

}  // namespace groundkit::kernels
