#include "gssl/optim.hpp"

#include <algorithm>
#include <cmath>

#include "gssl/errors.hpp"
#include "gssl/rng.hpp"

namespace gssl {

Parameter& ParamStore::create(const std::string& name, DenseMatrix init) {
  if (find(name)) throw ContractError("parameter already registered: " + name);
  params_.push_back(std::make_unique<Parameter>(name, std::move(init)));
  return *params_.back();
}

Parameter* ParamStore::find(const std::string& name) {
  for (auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p->name == name) return p.get();
  return nullptr;
}

std::vector<Parameter*> ParamStore::all() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParamStore::all() const {
  std::vector<const Parameter*> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p->zero_grad();
}

void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg) {
  for (Parameter* p : params) {
    for (float g : p->grad.data)
      if (!std::isfinite(g)) throw TrainError("non-finite gradient in parameter " + p->name);

    if (cfg.weight_decay != 0.0f) {
      const float f = cfg.lr * cfg.weight_decay;
      for (float& v : p->value.data) v -= f * v;
    }

    p->step_count += 1;
    const double bc1 = 1.0 - std::pow(static_cast<double>(cfg.beta1), static_cast<double>(p->step_count));
    const double bc2 = 1.0 - std::pow(static_cast<double>(cfg.beta2), static_cast<double>(p->step_count));
    for (size_t i = 0; i < p->value.size(); ++i) {
      const float g = p->grad.data[i];
      float& m = p->adam_m.data[i];
      float& v = p->adam_v.data[i];
      m = cfg.beta1 * m + (1.0f - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0f - cfg.beta2) * g * g;
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p->value.data[i] -= static_cast<float>(cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
    }
    p->zero_grad();
  }
}

DenseMatrix xavier_init(int rows, int cols, uint64_t seed) {
  if (rows < 1 || cols < 1) throw ShapeError("xavier_init: dimensions must be >= 1");
  const float bound = std::sqrt(6.0f / static_cast<float>(rows + cols));
  Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (float& v : m.data) v = static_cast<float>(rng.uniform(-bound, bound));
  return m;
}

}  // namespace gssl
