#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gssl/config.hpp"
#include "gssl/errors.hpp"
#include "gssl/io.hpp"
#include "gssl/method.hpp"
#include "gssl/pipeline.hpp"
#include "gssl/synthdata.hpp"
#include "gssl/trainer.hpp"

namespace py = pybind11;
using namespace gssl;

namespace {

DenseMatrix to_matrix(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw ShapeError("expected a 2D float array");
  DenseMatrix m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.data.begin());
  return m;
}

py::array_t<float> to_numpy(const DenseMatrix& m) {
  py::array_t<float> a({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), a.mutable_data());
  return a;
}

EmbeddingTable to_table(const py::array_t<float, py::array::c_style | py::array::forcecast>& a) {
  return EmbeddingTable::from_matrix(to_matrix(a));
}

py::dict result_to_dict(const EvalResult& r) {
  py::dict d;
  d["metric"] = r.metric;
  d["mean"] = r.mean;
  d["std"] = r.std_dev;
  d["per_fold"] = r.per_fold;
  for (const auto& [k, v] : r.extras) d[py::str(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "graph self-supervised learning toolkit (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<Error>(m, "GsslError");

  m.def("canonicalize_config", [](const std::string& text) {
    return serialize_config(parse_config_text(text));
  }, py::arg("text"), "Parse a config (filling defaults) and return its canonical JSON form.");

  m.def("gen_synth_bundle",
        [](const std::string& out_dir, int blocks, int size, double p_in, double p_out,
           int feat_dim, double noise, uint64_t seed) {
          Graph g = gen_sbm(size, blocks, p_in, p_out, feat_dim, noise, seed);
          g.name = "sbm";
          save_bundle(make_node_dataset(std::move(g), blocks), out_dir);
        },
        py::arg("out_dir"), py::arg("blocks") = 4, py::arg("size") = 50, py::arg("p_in") = 0.3,
        py::arg("p_out") = 0.02, py::arg("feat_dim") = 8, py::arg("noise") = 1.0,
        py::arg("seed") = 0, "Write a stochastic-block-model bundle.");

  m.def("gen_bench_bundle",
        [](const std::string& name, const std::string& out_dir, uint64_t seed) {
          save_bundle(generate_bench_dataset(name, seed), out_dir);
        },
        py::arg("name"), py::arg("out_dir"), py::arg("seed") = 0,
        "Write a synthetic benchmark stand-in bundle (sbm-demo, mutag, imdb-b, imdb-m, wikics).");

  m.def("reproduce",
        [](const std::string& config_text, const std::string& out_dir) {
          RunConfig cfg = parse_config_text(config_text);
          ReproduceOutcome out = run_reproduce(cfg, out_dir);
          py::dict d = result_to_dict(out.result);
          d["epochs_run"] = out.report.epochs_run;
          return d;
        },
        py::arg("config_text"), py::arg("out_dir"),
        "Pretrain, embed and evaluate per the config; artifacts land in out_dir.");

  m.def("pretrain_embed",
        [](const std::string& config_text) {
          RunConfig cfg = parse_config_text(config_text);
          Dataset ds = load_dataset_for(cfg);
          TrainConfig tc = cfg.optimizer;
          tc.seed = cfg.seed;
          PretrainResult trained = pretrain(ds, cfg.method, cfg.model, tc);
          EmbeddingTable emb = extract_embeddings(*trained.method, ds);
          const std::vector<int>& labels = ds.is_node() ? ds.graph.labels : ds.set.labels;
          return py::make_tuple(to_numpy(emb.data), labels);
        },
        py::arg("config_text"),
        "Pretrain per the config and return (embeddings, labels) without touching disk.");

  m.def("import_embeddings",
        [](const std::string& path) {
          EmbeddingTable emb = import_embeddings(path);
          return py::make_tuple(to_numpy(emb.data), emb.ids);
        },
        py::arg("path"));

  m.def("logistic_probe",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& emb,
           const std::vector<int>& labels, double train_frac, int repeats, float l2, int epochs,
           float lr, uint64_t seed) {
          EmbeddingTable table = to_table(emb);
          const double rest = 1.0 - train_frac;
          EvalResult r = logistic_probe_repeats(table, labels, repeats, train_frac, rest / 4.0,
                                                rest - rest / 4.0, l2, epochs, lr, seed);
          return result_to_dict(r);
        },
        py::arg("embeddings"), py::arg("labels"), py::arg("train_frac") = 0.1,
        py::arg("repeats") = 5, py::arg("l2") = 1e-3f, py::arg("epochs") = 300,
        py::arg("lr") = 0.01f, py::arg("seed") = 0);

  m.def("kmeans_nmi",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& emb,
           const std::vector<int>& labels, int k, uint64_t seed) {
          return result_to_dict(kmeans_nmi(to_table(emb), labels, k, 10, 300, seed));
        },
        py::arg("embeddings"), py::arg("labels"), py::arg("k"), py::arg("seed") = 0);

  m.def("similarity_search",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& emb,
           const std::vector<int>& labels, int k) {
          return result_to_dict(similarity_search(to_table(emb), labels, k));
        },
        py::arg("embeddings"), py::arg("labels"), py::arg("k"));

  m.def("project_2d",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& emb) {
          return to_numpy(project_2d(EmbeddingTable::from_matrix(to_matrix(emb))));
        },
        py::arg("embeddings"));

  m.def("nt_xent",
        [](const py::array_t<float, py::array::c_style | py::array::forcecast>& z1,
           const py::array_t<float, py::array::c_style | py::array::forcecast>& z2, float tau) {
          Tape t;
          Value loss = nt_xent(t, t.constant(to_matrix(z1)), t.constant(to_matrix(z2)), tau);
          return static_cast<double>(t.value(loss).data[0]);
        },
        py::arg("z1"), py::arg("z2"), py::arg("tau") = 0.5f,
        "NT-Xent loss value for two aligned embedding sets.");

  m.attr("__version__") = "0.1.0";
  m.attr("methods") = py::make_tuple("dgi", "graphcl", "mvgrl", "gca", "bgrl", "infograph",
                                     "graphmae");
}
