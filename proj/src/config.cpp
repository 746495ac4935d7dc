#include "gssl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gssl/errors.hpp"

using nlohmann::json;

namespace gssl {

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
  throw ConfigError("at '" + pointer + "': " + msg);
}

void reject_unknown(const json& obj, const std::string& pointer,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (it.key() == "_notes") continue;  // ignored annotation field
    if (!allowed.count(it.key())) fail(pointer + "/" + it.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& pointer, const char* key, double fallback,
                  double lo, double hi) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number()) fail(pointer + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (x < lo || x > hi)
    fail(pointer + "/" + key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
  return x;
}

long get_integer(const json& obj, const std::string& pointer, const char* key, long fallback,
                 long lo, long hi) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number_integer()) fail(pointer + "/" + key, "expected an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi)
    fail(pointer + "/" + key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
  return x;
}

std::string get_string(const json& obj, const std::string& pointer, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) fail(pointer + "/" + key, "expected a string");
  return obj[key].get<std::string>();
}

const char* augment_kind_str(AugmentKind k) {
  switch (k) {
    case AugmentKind::identity: return "identity";
    case AugmentKind::drop_edges: return "drop_edges";
    case AugmentKind::mask_features: return "mask_features";
    case AugmentKind::drop_nodes: return "drop_nodes";
    case AugmentKind::shuffle_features: return "shuffle_features";
    case AugmentKind::ppr_diffusion: return "ppr_diffusion";
    case AugmentKind::subgraph: return "subgraph";
    case AugmentKind::compose: return "compose";
  }
  return "?";
}

AugmentKind augment_kind_from(const std::string& s, const std::string& pointer) {
  for (AugmentKind k : {AugmentKind::identity, AugmentKind::drop_edges, AugmentKind::mask_features,
                        AugmentKind::drop_nodes, AugmentKind::shuffle_features,
                        AugmentKind::ppr_diffusion, AugmentKind::subgraph, AugmentKind::compose})
    if (s == augment_kind_str(k)) return k;
  fail(pointer, "unknown augmentation kind '" + s + "'");
}

AugmentSpec parse_augment(const json& obj, const std::string& pointer) {
  if (!obj.is_object()) fail(pointer, "expected an object");
  reject_unknown(obj, pointer, {"kind", "p", "alpha", "top_k", "size", "children"});
  AugmentSpec spec;
  spec.kind = augment_kind_from(get_string(obj, pointer, "kind", "identity"), pointer + "/kind");
  spec.p = get_number(obj, pointer, "p", spec.p, 0.0, 1.0);
  spec.alpha = get_number(obj, pointer, "alpha", spec.alpha, 1e-9, 1.0);
  spec.top_k = static_cast<int>(get_integer(obj, pointer, "top_k", spec.top_k, 1, 1 << 24));
  spec.size = static_cast<int>(get_integer(obj, pointer, "size", spec.size, 0, 1 << 24));
  if (obj.contains("children")) {
    if (!obj["children"].is_array()) fail(pointer + "/children", "expected an array");
    for (size_t i = 0; i < obj["children"].size(); ++i)
      spec.children.push_back(
          parse_augment(obj["children"][i], pointer + "/children/" + std::to_string(i)));
  }
  return spec;
}

json augment_to_json(const AugmentSpec& spec) {
  json j;
  j["kind"] = augment_kind_str(spec.kind);
  j["p"] = spec.p;
  j["alpha"] = spec.alpha;
  j["top_k"] = spec.top_k;
  j["size"] = spec.size;
  json children = json::array();
  for (const auto& c : spec.children) children.push_back(augment_to_json(c));
  j["children"] = children;
  return j;
}

// Method-conditioned defaults. Methods evaluated on graph sets in the paper
// default to GIN with small hidden layers and sum readout; node-level
// methods default to wider GCN encoders.
struct Defaults {
  EncoderKind kind = EncoderKind::gcn;
  int layers = 2;
  int hidden = 256;
  Activation act = Activation::relu;
  Readout readout = Readout::mean;
  int max_epochs = 500;
  float lr = 1e-3f;
};

Defaults defaults_for(MethodName m) {
  Defaults d;
  switch (m) {
    case MethodName::dgi:
    case MethodName::mvgrl:
      d.act = Activation::prelu;
      break;
    case MethodName::gca:
    case MethodName::bgrl:
    case MethodName::graphcl:
      break;
    case MethodName::infograph:
    case MethodName::graphmae:
      d.kind = EncoderKind::gin;
      d.hidden = 32;
      d.readout = Readout::sum;
      d.max_epochs = 100;
      break;
  }
  return d;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, "", {"dataset", "model", "method", "optimizer", "evaluator", "seed"});

  RunConfig cfg;

  // method first: it drives the model/optimizer defaults.
  const json method = root.value("method", json::object());
  if (!method.is_object()) fail("/method", "expected an object");
  reject_unknown(method, "/method",
                 {"name", "tau", "alpha", "top_k", "gamma", "mask_rate", "ema_decay",
                  "drop_edge_p", "mask_feat_p", "p_tau", "aug_specs"});
  if (!method.contains("name")) fail("/method/name", "required");
  try {
    cfg.method.name = method_name_from(get_string(method, "/method", "name", ""));
  } catch (const ConfigError&) {
    fail("/method/name", "unknown method '" + get_string(method, "/method", "name", "") + "'");
  }
  cfg.method.tau = static_cast<float>(get_number(method, "/method", "tau", 0.5, 1e-9, 1e9));
  cfg.method.alpha = get_number(method, "/method", "alpha", 0.2, 1e-9, 1.0);
  cfg.method.top_k = static_cast<int>(get_integer(method, "/method", "top_k", 64, 1, 1 << 24));
  cfg.method.gamma = static_cast<float>(get_number(method, "/method", "gamma", 2.0, 1.0, 64.0));
  cfg.method.mask_rate = get_number(method, "/method", "mask_rate", 0.5, 1e-9, 1.0);
  cfg.method.ema_decay = static_cast<float>(get_number(method, "/method", "ema_decay", 0.99, 0.0, 1.0));
  cfg.method.drop_edge_p = get_number(method, "/method", "drop_edge_p", 0.3, 0.0, 1.0);
  cfg.method.mask_feat_p = get_number(method, "/method", "mask_feat_p", 0.3, 0.0, 1.0);
  cfg.method.p_tau = get_number(method, "/method", "p_tau", 0.7, 0.0, 1.0);
  if (method.contains("aug_specs")) {
    if (!method["aug_specs"].is_array() || method["aug_specs"].size() != 2)
      fail("/method/aug_specs", "expected an array of exactly two view specs");
    for (size_t i = 0; i < 2; ++i)
      cfg.method.aug_specs.push_back(
          parse_augment(method["aug_specs"][i], "/method/aug_specs/" + std::to_string(i)));
  }

  const Defaults defaults = defaults_for(cfg.method.name);

  const json dataset = root.value("dataset", json::object());
  if (!dataset.is_object()) fail("/dataset", "expected an object");
  reject_unknown(dataset, "/dataset", {"name", "root", "batch_size"});
  cfg.dataset.name = get_string(dataset, "/dataset", "name", "");
  if (cfg.dataset.name.empty()) fail("/dataset/name", "required");
  cfg.dataset.root = get_string(dataset, "/dataset", "root", "data");
  cfg.dataset.batch_size =
      static_cast<int>(get_integer(dataset, "/dataset", "batch_size", 128, 1, 1 << 24));

  const json model = root.value("model", json::object());
  if (!model.is_object()) fail("/model", "expected an object");
  reject_unknown(model, "/model", {"kind", "layers", "hidden_dim", "activation", "readout"});
  {
    const std::string kind = get_string(model, "/model", "kind",
                                        defaults.kind == EncoderKind::gcn ? "gcn" : "gin");
    if (kind == "gcn")
      cfg.model.kind = EncoderKind::gcn;
    else if (kind == "gin")
      cfg.model.kind = EncoderKind::gin;
    else
      fail("/model/kind", "expected 'gcn' or 'gin'");
    cfg.model.layers = static_cast<int>(get_integer(model, "/model", "layers", defaults.layers, 1, 16));
    cfg.model.hidden_dim =
        static_cast<int>(get_integer(model, "/model", "hidden_dim", defaults.hidden, 1, 1 << 16));
    const std::string act = get_string(model, "/model", "activation",
                                       defaults.act == Activation::relu ? "relu" : "prelu");
    if (act == "relu")
      cfg.model.activation = Activation::relu;
    else if (act == "prelu")
      cfg.model.activation = Activation::prelu;
    else
      fail("/model/activation", "expected 'relu' or 'prelu'");
    const std::string ro = get_string(
        model, "/model", "readout",
        defaults.readout == Readout::mean ? "mean" : (defaults.readout == Readout::sum ? "sum" : "max"));
    if (ro == "mean")
      cfg.model.readout = Readout::mean;
    else if (ro == "sum")
      cfg.model.readout = Readout::sum;
    else if (ro == "max")
      cfg.model.readout = Readout::max;
    else
      fail("/model/readout", "expected 'mean', 'sum' or 'max'");
  }

  const json optimizer = root.value("optimizer", json::object());
  if (!optimizer.is_object()) fail("/optimizer", "expected an object");
  reject_unknown(optimizer, "/optimizer",
                 {"name", "lr", "weight_decay", "max_epochs", "patience", "min_delta"});
  {
    const std::string name = get_string(optimizer, "/optimizer", "name", "adam");
    if (name != "adam") fail("/optimizer/name", "unknown optimizer '" + name + "'");
    cfg.optimizer.lr =
        static_cast<float>(get_number(optimizer, "/optimizer", "lr", defaults.lr, 1e-12, 10.0));
    cfg.optimizer.weight_decay =
        static_cast<float>(get_number(optimizer, "/optimizer", "weight_decay", 0.0, 0.0, 10.0));
    cfg.optimizer.max_epochs = static_cast<int>(
        get_integer(optimizer, "/optimizer", "max_epochs", defaults.max_epochs, 1, 1000000));
    cfg.optimizer.patience =
        static_cast<int>(get_integer(optimizer, "/optimizer", "patience", 20, 0, 1000000));
    cfg.optimizer.min_delta =
        static_cast<float>(get_number(optimizer, "/optimizer", "min_delta", 1e-4, 0.0, 1e9));
  }
  cfg.optimizer.batch_size = cfg.dataset.batch_size;

  const json evaluator = root.value("evaluator", json::object());
  if (!evaluator.is_object()) fail("/evaluator", "expected an object");
  reject_unknown(evaluator, "/evaluator", {"classifier", "l2", "c", "k", "repeats", "epochs", "lr"});
  {
    cfg.evaluator.classifier = get_string(evaluator, "/evaluator", "classifier", "logistic");
    if (cfg.evaluator.classifier != "logistic" && cfg.evaluator.classifier != "svm")
      fail("/evaluator/classifier", "expected 'logistic' or 'svm'");
    cfg.evaluator.l2 = static_cast<float>(get_number(evaluator, "/evaluator", "l2", 1e-3, 0.0, 1e9));
    cfg.evaluator.c = static_cast<float>(get_number(evaluator, "/evaluator", "c", 1.0, 1e-9, 1e9));
    cfg.evaluator.k = static_cast<int>(get_integer(evaluator, "/evaluator", "k", 10, 1, 1 << 24));
    cfg.evaluator.repeats =
        static_cast<int>(get_integer(evaluator, "/evaluator", "repeats", 20, 1, 100000));
    cfg.evaluator.epochs =
        static_cast<int>(get_integer(evaluator, "/evaluator", "epochs", 300, 1, 1000000));
    cfg.evaluator.lr = static_cast<float>(get_number(evaluator, "/evaluator", "lr", 0.01, 1e-12, 10.0));
  }

  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() && !root["seed"].is_number_unsigned())
      fail("/seed", "expected an integer");
    cfg.seed = root["seed"].get<uint64_t>();
  }

  cfg.method.validate();
  cfg.model.validate();
  cfg.optimizer.validate();
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json root;
  root["dataset"] = {{"name", cfg.dataset.name},
                     {"root", cfg.dataset.root},
                     {"batch_size", cfg.dataset.batch_size}};
  root["model"] = {
      {"kind", cfg.model.kind == EncoderKind::gcn ? "gcn" : "gin"},
      {"layers", cfg.model.layers},
      {"hidden_dim", cfg.model.hidden_dim},
      {"activation", cfg.model.activation == Activation::relu ? "relu" : "prelu"},
      {"readout", cfg.model.readout == Readout::mean
                      ? "mean"
                      : (cfg.model.readout == Readout::sum ? "sum" : "max")}};
  json method;
  method["name"] = method_name_str(cfg.method.name);
  method["tau"] = cfg.method.tau;
  method["alpha"] = cfg.method.alpha;
  method["top_k"] = cfg.method.top_k;
  method["gamma"] = cfg.method.gamma;
  method["mask_rate"] = cfg.method.mask_rate;
  method["ema_decay"] = cfg.method.ema_decay;
  method["drop_edge_p"] = cfg.method.drop_edge_p;
  method["mask_feat_p"] = cfg.method.mask_feat_p;
  method["p_tau"] = cfg.method.p_tau;
  if (!cfg.method.aug_specs.empty()) {
    json specs = json::array();
    for (const auto& s : cfg.method.aug_specs) specs.push_back(augment_to_json(s));
    method["aug_specs"] = specs;
  }
  root["method"] = method;
  root["optimizer"] = {{"name", "adam"},
                       {"lr", cfg.optimizer.lr},
                       {"weight_decay", cfg.optimizer.weight_decay},
                       {"max_epochs", cfg.optimizer.max_epochs},
                       {"patience", cfg.optimizer.patience},
                       {"min_delta", cfg.optimizer.min_delta}};
  root["evaluator"] = {{"classifier", cfg.evaluator.classifier}, {"l2", cfg.evaluator.l2},
                       {"c", cfg.evaluator.c},                   {"k", cfg.evaluator.k},
                       {"repeats", cfg.evaluator.repeats},       {"epochs", cfg.evaluator.epochs},
                       {"lr", cfg.evaluator.lr}};
  root["seed"] = cfg.seed;
  return root.dump(2) + "\n";
}

bool operator==(const DatasetConfig& a, const DatasetConfig& b) {
  return a.name == b.name && a.root == b.root && a.batch_size == b.batch_size;
}
bool operator==(const EvaluatorConfig& a, const EvaluatorConfig& b) {
  return a.classifier == b.classifier && a.l2 == b.l2 && a.c == b.c && a.k == b.k &&
         a.repeats == b.repeats && a.epochs == b.epochs && a.lr == b.lr;
}
bool operator==(const EncoderConfig& a, const EncoderConfig& b) {
  return a.kind == b.kind && a.layers == b.layers && a.hidden_dim == b.hidden_dim &&
         a.activation == b.activation && a.readout == b.readout;
}
bool operator==(const AugmentSpec& a, const AugmentSpec& b) {
  return a.kind == b.kind && a.p == b.p && a.alpha == b.alpha && a.top_k == b.top_k &&
         a.size == b.size && a.children == b.children;
}
bool operator==(const MethodConfig& a, const MethodConfig& b) {
  return a.name == b.name && a.tau == b.tau && a.alpha == b.alpha && a.top_k == b.top_k &&
         a.gamma == b.gamma && a.mask_rate == b.mask_rate && a.ema_decay == b.ema_decay &&
         a.drop_edge_p == b.drop_edge_p && a.mask_feat_p == b.mask_feat_p && a.p_tau == b.p_tau &&
         a.aug_specs == b.aug_specs;
}
bool operator==(const TrainConfig& a, const TrainConfig& b) {
  return a.max_epochs == b.max_epochs && a.patience == b.patience && a.min_delta == b.min_delta &&
         a.lr == b.lr && a.weight_decay == b.weight_decay && a.batch_size == b.batch_size &&
         a.seed == b.seed && a.checkpoint_path == b.checkpoint_path;
}
bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.dataset == b.dataset && a.model == b.model && a.method == b.method &&
         a.optimizer == b.optimizer && a.evaluator == b.evaluator && a.seed == b.seed;
}

}  // namespace gssl
