#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "groundkit/kernels.hpp"
#include "groundkit/rng.hpp"

using namespace groundkit;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

}  // namespace

// The OpenMP backend must be bitwise identical to the serial reference:
// both run the same per-element scalar code over independent outputs.
TEST_CASE("openmp kernels match serial reference bitwise") {
  Rng rng(42);
  const int saved = kernels::threads();
  kernels::set_threads(4);

  for (int trial = 0; trial < 5; ++trial) {
    const int m = rng.uniform_int(1, 70);
    const int k = rng.uniform_int(1, 40);
    const int n = rng.uniform_int(1, 50);
    auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
    auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
    std::vector<double> c1(static_cast<std::size_t>(m) * n), c2(c1.size());
    kernels::serial_ref::matmul(a.data(), b.data(), c1.data(), m, k, n);
    kernels::omp_par::matmul(a.data(), b.data(), c2.data(), m, k, n);
    CHECK(c1 == c2);

    auto at = random_vec(static_cast<std::size_t>(k) * m, rng);
    std::vector<double> d1(static_cast<std::size_t>(m) * n), d2(d1.size());
    kernels::serial_ref::matmul_tn(at.data(), b.data(), d1.data(), m, k, n);
    kernels::omp_par::matmul_tn(at.data(), b.data(), d2.data(), m, k, n);
    CHECK(d1 == d2);

    auto bt = random_vec(static_cast<std::size_t>(n) * k, rng);
    std::vector<double> e1(static_cast<std::size_t>(m) * n), e2(e1.size());
    kernels::serial_ref::matmul_nt(a.data(), bt.data(), e1.data(), m, k, n);
    kernels::omp_par::matmul_nt(a.data(), bt.data(), e2.data(), m, k, n);
    CHECK(e1 == e2);
  }

  const int rows = 67, cols = 33;
  auto x = random_vec(static_cast<std::size_t>(rows) * cols, rng);
  auto dy = random_vec(x.size(), rng);
  {
    std::vector<double> y1(x.size()), y2(x.size());
    kernels::serial_ref::softmax_rows(x.data(), y1.data(), rows, cols);
    kernels::omp_par::softmax_rows(x.data(), y2.data(), rows, cols);
    CHECK(y1 == y2);
    std::vector<double> dx1(x.size(), 0.0), dx2(x.size(), 0.0);
    kernels::serial_ref::softmax_bwd_rows(y1.data(), dy.data(), dx1.data(), rows, cols);
    kernels::omp_par::softmax_bwd_rows(y2.data(), dy.data(), dx2.data(), rows, cols);
    CHECK(dx1 == dx2);
  }
  {
    std::vector<double> y1(x.size()), y2(x.size());
    kernels::serial_ref::log_softmax_rows(x.data(), y1.data(), rows, cols);
    kernels::omp_par::log_softmax_rows(x.data(), y2.data(), rows, cols);
    CHECK(y1 == y2);
  }
  {
    std::vector<double> y1(x.size()), y2(x.size());
    std::vector<double> m1(rows), m2(rows), s1(rows), s2(rows);
    kernels::serial_ref::layer_norm_rows(x.data(), y1.data(), m1.data(), s1.data(), rows,
                                         cols, 1e-5);
    kernels::omp_par::layer_norm_rows(x.data(), y2.data(), m2.data(), s2.data(), rows,
                                      cols, 1e-5);
    CHECK(y1 == y2);
    CHECK(m1 == m2);
    std::vector<double> dx1(x.size(), 0.0), dx2(x.size(), 0.0);
    kernels::serial_ref::layer_norm_bwd_rows(x.data(), dy.data(), m1.data(), s1.data(),
                                             dx1.data(), rows, cols);
    kernels::omp_par::layer_norm_bwd_rows(x.data(), dy.data(), m2.data(), s2.data(),
                                          dx2.data(), rows, cols);
    CHECK(dx1 == dx2);
  }
  {
    std::vector<double> o1(cols), o2(cols);
    std::vector<int> a1(cols), a2(cols);
    kernels::serial_ref::reduce_max_axis0(x.data(), o1.data(), a1.data(), rows, cols);
    kernels::omp_par::reduce_max_axis0(x.data(), o2.data(), a2.data(), rows, cols);
    CHECK(o1 == o2);
    CHECK(a1 == a2);
    std::vector<double> s1v(cols), s2v(cols);
    kernels::serial_ref::reduce_sum_axis0(x.data(), s1v.data(), rows, cols);
    kernels::omp_par::reduce_sum_axis0(x.data(), s2v.data(), rows, cols);
    CHECK(s1v == s2v);
  }
  {
    const int window = 5;
    std::vector<double> u1(static_cast<std::size_t>(rows) * cols * window);
    std::vector<double> u2(u1.size());
    kernels::serial_ref::unfold1d(x.data(), u1.data(), rows, cols, window);
    kernels::omp_par::unfold1d(x.data(), u2.data(), rows, cols, window);
    CHECK(u1 == u2);
    std::vector<double> g1(x.size(), 0.0), g2(x.size(), 0.0);
    kernels::serial_ref::fold1d(u1.data(), g1.data(), rows, cols, window);
    kernels::omp_par::fold1d(u2.data(), g2.data(), rows, cols, window);
    CHECK(g1 == g2);
  }
  {
    auto b2 = random_vec(x.size(), rng);
    std::vector<double> o1(x.size()), o2(x.size());
    kernels::serial_ref::ew_add(x.data(), b2.data(), o1.data(), x.size());
    kernels::omp_par::ew_add(x.data(), b2.data(), o2.data(), x.size());
    CHECK(o1 == o2);
    kernels::serial_ref::ew_leaky_relu(x.data(), 0.2, o1.data(), x.size());
    kernels::omp_par::ew_leaky_relu(x.data(), 0.2, o2.data(), x.size());
    CHECK(o1 == o2);
  }

  kernels::set_threads(saved);
}

TEST_CASE("unfold keeps the window aligned with same padding") {
  // 4 frames, 1 channel, window 3: row t holds [x[t-1], x[t], x[t+1]]
  std::vector<double> x = {1, 2, 3, 4};
  std::vector<double> u(12, -1.0);
  kernels::serial_ref::unfold1d(x.data(), u.data(), 4, 1, 3);
  CHECK(u == std::vector<double>{0, 1, 2, 1, 2, 3, 2, 3, 4, 3, 4, 0});
}

TEST_CASE("fold is the adjoint of unfold") {
  Rng rng(7);
  const int frames = 9, dim = 3, window = 5;
  auto x = random_vec(static_cast<std::size_t>(frames) * dim, rng);
  auto du = random_vec(static_cast<std::size_t>(frames) * dim * window, rng);
  std::vector<double> u(du.size());
  kernels::serial_ref::unfold1d(x.data(), u.data(), frames, dim, window);
  std::vector<double> dx(x.size(), 0.0);
  kernels::serial_ref::fold1d(du.data(), dx.data(), frames, dim, window);
  // <unfold(x), du> == <x, fold(du)>
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) lhs += u[i] * du[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * dx[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("thread cap floor is one") {
  const int saved = kernels::threads();
  kernels::set_threads(0);
  CHECK(kernels::threads() == 1);
  kernels::set_threads(saved);
}
