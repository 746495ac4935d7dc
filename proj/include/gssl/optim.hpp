#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gssl/matrix.hpp"

namespace gssl {

// Trainable tensor plus Adam state. value/grad/adam_m/adam_v share one shape.
struct Parameter {
  std::string name;
  DenseMatrix value;
  DenseMatrix grad;
  DenseMatrix adam_m;
  DenseMatrix adam_v;
  int64_t step_count = 0;

  Parameter(std::string n, DenseMatrix v)
      : name(std::move(n)),
        value(std::move(v)),
        grad(value.rows, value.cols),
        adam_m(value.rows, value.cols),
        adam_v(value.rows, value.cols) {}

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0f); }
};

// Owns parameters in registration order (stable iteration keeps runs and
// checkpoints deterministic). References stay valid for the store's lifetime.
class ParamStore {
 public:
  Parameter& create(const std::string& name, DenseMatrix init);
  Parameter* find(const std::string& name);
  const Parameter* find(const std::string& name) const;
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  size_t size() const { return params_.size(); }
  void zero_grads();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.0f;  // decoupled, applied before the Adam update
};

// Standard Adam with bias correction; grads are zeroed after the step.
// Throws TrainError naming the parameter if a grad entry is non-finite.
void adam_step(const std::vector<Parameter*>& params, const AdamConfig& cfg);

// Uniform in +-sqrt(6/(rows+cols)), deterministic in seed.
DenseMatrix xavier_init(int rows, int cols, uint64_t seed);

}  // namespace gssl
