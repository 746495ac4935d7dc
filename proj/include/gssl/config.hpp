#pragma once

#include <cstdint>
#include <string>

#include "gssl/encoder.hpp"
#include "gssl/method.hpp"
#include "gssl/trainer.hpp"

namespace gssl {

struct DatasetConfig {
  std::string name;
  std::string root = "data";
  int batch_size = 128;
};

struct EvaluatorConfig {
  std::string classifier = "logistic";  // logistic | svm
  float l2 = 1e-3f;                     // logistic ridge strength
  float c = 1.0f;                       // svm slack weight (L2 strength is 1/c)
  int k = 10;                           // folds / neighbors
  int repeats = 20;                     // node-task split seeds
  int epochs = 300;                     // probe optimizer epochs
  float lr = 0.01f;                     // probe learning rate
};

// Full run description; the JSON schema has exactly these six top-level
// keys: dataset, model, method, optimizer, evaluator, seed. Unknown keys are
// rejected; "_notes" string fields are permitted and ignored.
struct RunConfig {
  DatasetConfig dataset;
  EncoderConfig model;
  MethodConfig method;
  TrainConfig optimizer;
  EvaluatorConfig evaluator;
  uint64_t seed = 0;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical form: every field explicit, keys sorted. parse(serialize(c))
// reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

bool operator==(const DatasetConfig& a, const DatasetConfig& b);
bool operator==(const EvaluatorConfig& a, const EvaluatorConfig& b);
bool operator==(const EncoderConfig& a, const EncoderConfig& b);
bool operator==(const MethodConfig& a, const MethodConfig& b);
bool operator==(const AugmentSpec& a, const AugmentSpec& b);
bool operator==(const TrainConfig& a, const TrainConfig& b);
bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace gssl
