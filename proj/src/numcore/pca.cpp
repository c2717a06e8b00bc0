#include "groundkit/pca.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "groundkit/rng.hpp"

namespace groundkit::num {

namespace {

// largest eigenpair of a symmetric PSD matrix
double power_iteration(const std::vector<double>& c, int d, std::vector<double>& vec,
                       Rng& rng) {
  vec.assign(static_cast<std::size_t>(d), 0.0);
  for (double& v : vec) v = rng.uniform(-1.0, 1.0);
  double norm = 0.0;
  for (double v : vec) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : vec) v /= norm;

  std::vector<double> next(static_cast<std::size_t>(d));
  double lambda = 0.0;
  for (int iter = 0; iter < 20000; ++iter) {
    for (int i = 0; i < d; ++i) {
      double acc = 0.0;
      for (int j = 0; j < d; ++j) acc += c[static_cast<std::size_t>(i) * d + j] * vec[j];
      next[i] = acc;
    }
    double nn = 0.0;
    for (double v : next) nn += v * v;
    nn = std::sqrt(nn);
    if (nn == 0.0) return 0.0;
    double diff = 0.0;
    for (int i = 0; i < d; ++i) {
      next[i] /= nn;
      diff += std::abs(next[i] - vec[i]);
    }
    vec = next;
    if (diff < 1e-15 && iter > 2) break;
  }
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) acc += c[static_cast<std::size_t>(i) * d + j] * vec[j];
    lambda += vec[i] * acc;
  }
  return lambda;
}

}  // namespace

PcaResult pca_top2(const Tensor& rows) {
  if (rows.rank() != 2) throw std::invalid_argument("pca_top2: rank-2 input required");
  const int n = rows.rows();
  const int d = rows.cols();
  if (n < 3) throw std::invalid_argument("pca_top2: need at least 3 rows");
  if (d < 2) throw std::invalid_argument("pca_top2: need at least 2 columns");

  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += rows.at(i, j);
  for (double& m : mean) m /= n;

  std::vector<double> centered(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      centered[static_cast<std::size_t>(i) * d + j] = rows.at(i, j) - mean[static_cast<std::size_t>(j)];

  // covariance with 1/(n-1)
  std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) {
      const double va = centered[static_cast<std::size_t>(i) * d + a];
      if (va == 0.0) continue;
      for (int b = 0; b < d; ++b)
        cov[static_cast<std::size_t>(a) * d + b] += va * centered[static_cast<std::size_t>(i) * d + b];
    }
  double total_var = 0.0;
  for (std::size_t i = 0; i < cov.size(); ++i) cov[i] /= (n - 1);
  for (int a = 0; a < d; ++a) total_var += cov[static_cast<std::size_t>(a) * d + a];

  PcaResult res;
  res.components = Tensor::zeros({2, d});
  res.projections = Tensor::zeros({n, 2});

  if (total_var <= 1e-300) {
    // all rows identical
    res.degenerate = true;
    res.components.at(0, 0) = 1.0;
    res.components.at(1, 1) = 1.0;
    return res;
  }

  Rng rng(0x9c0ffeeULL);
  std::vector<double> c1, c2;
  res.variance1 = power_iteration(cov, d, c1, rng);

  // deflate and re-orthogonalize against c1 each sweep
  std::vector<double> cov2 = cov;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      cov2[static_cast<std::size_t>(a) * d + b] -= res.variance1 * c1[static_cast<std::size_t>(a)] * c1[static_cast<std::size_t>(b)];
  res.variance2 = power_iteration(cov2, d, c2, rng);
  if (res.variance2 < 0.0) res.variance2 = 0.0;
  double dot = 0.0;
  for (int j = 0; j < d; ++j) dot += c1[static_cast<std::size_t>(j)] * c2[static_cast<std::size_t>(j)];
  double nn = 0.0;
  for (int j = 0; j < d; ++j) {
    c2[static_cast<std::size_t>(j)] -= dot * c1[static_cast<std::size_t>(j)];
    nn += c2[static_cast<std::size_t>(j)] * c2[static_cast<std::size_t>(j)];
  }
  nn = std::sqrt(nn);
  if (nn > 0.0)
    for (double& v : c2) v /= nn;
  else
    c2[static_cast<std::size_t>(c1[0] == 0.0 ? 0 : 1)] = 1.0;  // rank-1 data

  for (int j = 0; j < d; ++j) {
    res.components.at(0, j) = c1[static_cast<std::size_t>(j)];
    res.components.at(1, j) = c2[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < n; ++i) {
    double p1 = 0.0, p2 = 0.0;
    for (int j = 0; j < d; ++j) {
      p1 += centered[static_cast<std::size_t>(i) * d + j] * c1[static_cast<std::size_t>(j)];
      p2 += centered[static_cast<std::size_t>(i) * d + j] * c2[static_cast<std::size_t>(j)];
    }
    res.projections.at(i, 0) = p1;
    res.projections.at(i, 1) = p2;
  }
  return res;
}

}  // namespace groundkit::num
