#pragma once

#include <cstdint>
#include <vector>

#include "groundkit/tensor.hpp"

namespace groundkit::num {

// Decoupled weight decay Adam. Moments are kept per parameter tensor in
// the order the parameters were registered; t counts completed steps.
struct AdamWState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  double base_lr = 5e-5;
  std::int64_t t = 0;
  std::vector<Tensor> m;
  std::vector<Tensor> v;

  static AdamWState init(const std::vector<Tensor*>& params, double weight_decay,
                         double base_lr, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
};

// One update over all parameters: w -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * w)
void adamw_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                AdamWState& state, double lr);

// Cosine annealing with restarts. Periods are t0, t0*t_mult, ... steps;
// the rate is eta_max at every period start and eta_min at its end.
struct CosineRestartSchedule {
  double eta_min = 0.0;
  double eta_max = 1e-3;
  int t0 = 10;
  int t_mult = 2;
};

double schedule_lr(const CosineRestartSchedule& s, std::int64_t step);

// raw cosine segment between restart boundaries, exact at both endpoints
double cosine_value(double eta_min, double eta_max, std::int64_t t_cur, std::int64_t t_i);

}  // namespace groundkit::num
