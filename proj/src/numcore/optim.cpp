#include "groundkit/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace groundkit::num {

AdamWState AdamWState::init(const std::vector<Tensor*>& params, double weight_decay,
                            double base_lr, double beta1, double beta2, double eps) {
  if (weight_decay < 0.0) throw std::invalid_argument("adamw: weight_decay must be >= 0");
  AdamWState s;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  s.weight_decay = weight_decay;
  s.base_lr = base_lr;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const Tensor* p : params) {
    s.m.push_back(Tensor::zeros(p->shape));
    s.v.push_back(Tensor::zeros(p->shape));
  }
  return s;
}

void adamw_step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
                AdamWState& state, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adamw: lr must be positive");
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adamw: parameter/gradient count mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p];
    const Tensor& g = *grads[p];
    if (!w.same_shape(g))
      throw std::invalid_argument("adamw: gradient shape mismatch for parameter " +
                                  std::to_string(p));
    if (!g.all_finite())
      throw std::runtime_error("adamw: non-finite gradient for parameter " +
                               std::to_string(p));
    Tensor& m = state.m[p];
    Tensor& v = state.v[p];
    for (std::size_t i = 0; i < w.numel(); ++i) {
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g.data[i];
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g.data[i] * g.data[i];
      const double m_hat = m.data[i] / bc1;
      const double v_hat = v.data[i] / bc2;
      w.data[i] -= lr * (m_hat / (std::sqrt(v_hat) + state.eps) +
                         state.weight_decay * w.data[i]);
    }
  }
}

double cosine_value(double eta_min, double eta_max, std::int64_t t_cur, std::int64_t t_i) {
  // exact endpoints; std::cos(pi) is only almost -1
  if (t_cur == 0) return eta_max;
  if (t_cur == t_i) return eta_min;
  const double frac = static_cast<double>(t_cur) / static_cast<double>(t_i);
  return eta_min +
         0.5 * (eta_max - eta_min) * (1.0 + std::cos(3.14159265358979323846 * frac));
}

double schedule_lr(const CosineRestartSchedule& s, std::int64_t step) {
  if (step < 0) throw std::invalid_argument("schedule_lr: negative step");
  if (s.t0 < 1 || s.t_mult < 1) throw std::invalid_argument("schedule_lr: bad period");
  std::int64_t period = s.t0;
  std::int64_t t_cur = step;
  while (t_cur >= period) {
    t_cur -= period;
    period *= s.t_mult;
  }
  return cosine_value(s.eta_min, s.eta_max, t_cur, period);
}

}  // namespace groundkit::num
