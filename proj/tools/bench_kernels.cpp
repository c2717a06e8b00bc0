// Timing comparison of the serial reference kernels against the OpenMP
// backend. Sizes roughly bracket the shapes the training loops use.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "groundkit/kernels.hpp"
#include "groundkit/rng.hpp"

using namespace groundkit;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

void row(const char* name, double serial_ms, double omp_ms) {
  std::printf("%-28s %10.3f %10.3f %8.2fx\n", name, serial_ms, omp_ms,
              omp_ms > 0 ? serial_ms / omp_ms : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  int threads = kernels::threads();
  if (argc > 1) threads = std::atoi(argv[1]);
  kernels::set_threads(threads);
  std::printf("threads: %d (set GROUNDKIT_THREADS or pass a count)\n\n", threads);
  std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

  Rng rng(1);
  {
    const int m = 256, k = 256, n = 256;
    auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
    auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
    std::vector<double> c(static_cast<std::size_t>(m) * n);
    row("matmul 256x256x256",
        time_ms([&] { kernels::serial_ref::matmul(a.data(), b.data(), c.data(), m, k, n); }, 5),
        time_ms([&] { kernels::omp_par::matmul(a.data(), b.data(), c.data(), m, k, n); }, 5));
  }
  {
    const int m = 126, k = 160, n = 32;
    auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
    auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
    std::vector<double> c(static_cast<std::size_t>(m) * n);
    row("matmul 126x160x32 (conv)",
        time_ms([&] { kernels::serial_ref::matmul(a.data(), b.data(), c.data(), m, k, n); }, 50),
        time_ms([&] { kernels::omp_par::matmul(a.data(), b.data(), c.data(), m, k, n); }, 50));
  }
  {
    const int rows = 2048, cols = 64;
    auto x = random_vec(static_cast<std::size_t>(rows) * cols, rng);
    std::vector<double> y(x.size());
    row("softmax 2048x64",
        time_ms([&] { kernels::serial_ref::softmax_rows(x.data(), y.data(), rows, cols); }, 20),
        time_ms([&] { kernels::omp_par::softmax_rows(x.data(), y.data(), rows, cols); }, 20));
    std::vector<double> mean(rows), inv_std(rows);
    row("layer_norm 2048x64",
        time_ms([&] {
          kernels::serial_ref::layer_norm_rows(x.data(), y.data(), mean.data(),
                                               inv_std.data(), rows, cols, 1e-5);
        }, 20),
        time_ms([&] {
          kernels::omp_par::layer_norm_rows(x.data(), y.data(), mean.data(),
                                            inv_std.data(), rows, cols, 1e-5);
        }, 20));
    std::vector<double> out(cols);
    row("reduce_sum axis0 2048x64",
        time_ms([&] { kernels::serial_ref::reduce_sum_axis0(x.data(), out.data(), rows, cols); }, 50),
        time_ms([&] { kernels::omp_par::reduce_sum_axis0(x.data(), out.data(), rows, cols); }, 50));
  }
  {
    const int frames = 126, dim = 32, window = 5;
    auto x = random_vec(static_cast<std::size_t>(frames) * dim, rng);
    std::vector<double> u(static_cast<std::size_t>(frames) * dim * window);
    row("unfold1d 126x32 w5",
        time_ms([&] { kernels::serial_ref::unfold1d(x.data(), u.data(), frames, dim, window); }, 200),
        time_ms([&] { kernels::omp_par::unfold1d(x.data(), u.data(), frames, dim, window); }, 200));
  }
  {
    const std::size_t n = 1 << 20;
    auto a = random_vec(n, rng);
    auto b = random_vec(n, rng);
    std::vector<double> out(n);
    row("ew_add 1M",
        time_ms([&] { kernels::serial_ref::ew_add(a.data(), b.data(), out.data(), n); }, 20),
        time_ms([&] { kernels::omp_par::ew_add(a.data(), b.data(), out.data(), n); }, 20));
  }

  std::puts("\nboth backends are bitwise identical; see tests/test_kernels.cpp");
  return 0;
}
