#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gssl/config.hpp"
#include "gssl/errors.hpp"
#include "gssl/io.hpp"
#include "gssl/pipeline.hpp"
#include "gssl/synthdata.hpp"

namespace fs = std::filesystem;
using namespace gssl;

namespace {

int cmd_pretrain(const std::string& config_path, const std::string& out_dir) {
  RunConfig cfg = parse_config_file(config_path);
  fs::create_directories(out_dir);
  Dataset ds = load_dataset_for(cfg);

  TrainConfig tc = cfg.optimizer;
  tc.seed = cfg.seed;
  tc.checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
  std::ofstream log(fs::path(out_dir) / "train.log");
  tc.log = &log;

  PretrainResult trained = pretrain(ds, cfg.method, cfg.model, tc);
  std::cout << "pretrained " << method_name_str(cfg.method.name) << " on " << ds.name << ": "
            << trained.report.epochs_run << " epochs, final loss "
            << trained.report.loss_history.back() << "\n"
            << "checkpoint: " << tc.checkpoint_path << "\n";
  return 0;
}

int cmd_embed(const std::string& config_path, const std::string& ckpt_path,
              const std::string& out_path) {
  RunConfig cfg = parse_config_file(config_path);
  Dataset ds = load_dataset_for(cfg);
  const bool graph_task = !ds.is_node();
  const int in_dim = ds.is_node() ? ds.graph.feature_dim() : ds.set.feature_dim();
  auto method = make_method(cfg.method, cfg.model, in_dim, graph_task, cfg.seed);
  load_checkpoint(method->params(), ckpt_path);
  EmbeddingTable emb = extract_embeddings(*method, ds);
  const bool csv = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv";
  export_embeddings(emb, out_path, csv ? EmbeddingFormat::csv : EmbeddingFormat::binary);
  std::cout << "wrote " << emb.n << " embeddings of dim " << emb.d << " to " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& emb_path,
                 const std::string& task_flag, const std::string& out_path,
                 const std::string& projection_path) {
  RunConfig cfg = parse_config_file(config_path);
  Dataset ds = load_dataset_for(cfg);
  EmbeddingTable emb = import_embeddings(emb_path);
  const std::string task = task_flag.empty() ? default_task(ds) : task_flag;
  EvalResult result = evaluate_embeddings(cfg, ds, emb, task);
  const std::string payload = eval_result_to_json(result) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
  } else {
    std::ofstream out(out_path);
    if (!out) throw DataError("cannot write " + out_path);
    out << payload;
    std::cout << result.metric << " mean " << result.mean << " std " << result.std_dev << " -> "
              << out_path << "\n";
  }
  if (!projection_path.empty()) {
    DenseMatrix coords = project_2d(emb);
    std::ofstream out(projection_path);
    if (!out) throw DataError("cannot write " + projection_path);
    out << "id,x,y\n";
    char buf[64];
    for (int i = 0; i < coords.rows; ++i) {
      std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g", emb.ids[static_cast<size_t>(i)],
                    static_cast<double>(coords.at(i, 0)), static_cast<double>(coords.at(i, 1)));
      out << buf << "\n";
    }
  }
  return 0;
}

int cmd_gen_synth(const std::string& out_dir, int blocks, int size, double p_in, double p_out,
                  int feat_dim, double noise, uint64_t seed) {
  Graph g = gen_sbm(size, blocks, p_in, p_out, feat_dim, noise, seed);
  g.name = fs::path(out_dir).filename().string();
  if (g.name.empty()) g.name = "sbm";
  Dataset ds = make_node_dataset(std::move(g), blocks);
  save_bundle(ds, out_dir);
  std::cout << "wrote SBM bundle (" << blocks << " blocks x " << size << " nodes) to " << out_dir
            << "\n";
  return 0;
}

int cmd_gen_bench(const std::string& name, const std::string& out_dir, uint64_t seed) {
  Dataset ds = generate_bench_dataset(name, seed);
  save_bundle(ds, out_dir);
  std::cout << "wrote " << ds.name << " bundle to " << out_dir << "\n";
  return 0;
}

int cmd_reproduce(const std::string& config_path, const std::string& out_dir) {
  RunConfig cfg = parse_config_file(config_path);
  ReproduceOutcome out = run_reproduce(cfg, out_dir);
  std::cout << out.result.metric << " mean " << out.result.mean << " std " << out.result.std_dev
            << " (" << out.report.epochs_run << " epochs)\n"
            << "artifacts in " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph self-supervised learning toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "gssl-out", ckpt_path, emb_path, task, out_path,
              projection_path, bench_name;
  int blocks = 4, size = 50, feat_dim = 8;
  double p_in = 0.3, p_out = 0.02, noise = 1.0;
  uint64_t seed = 0;

  auto* pre = app.add_subcommand("pretrain", "train a method on the configured dataset");
  pre->add_option("--config", config_path, "run config JSON")->required();
  pre->add_option("--out", out_dir, "artifact directory");

  auto* emb = app.add_subcommand("embed", "extract embeddings from a checkpoint");
  emb->add_option("--config", config_path)->required();
  emb->add_option("--checkpoint", ckpt_path)->required();
  emb->add_option("--out", out_path, "embedding file (.csv for text)")->required();

  auto* ev = app.add_subcommand("evaluate", "evaluate stored embeddings");
  ev->add_option("--config", config_path)->required();
  ev->add_option("--embeddings", emb_path)->required();
  ev->add_option("--task", task, "node-clf | graph-clf | cluster | search");
  ev->add_option("--out", out_path, "result JSON file ('-' for stdout)");
  ev->add_option("--project2d-out", projection_path, "also write a 2D PCA csv (id,x,y)");

  auto* gen = app.add_subcommand("gen-synth", "generate an SBM bundle");
  gen->add_option("--out", out_dir)->required();
  gen->add_option("--blocks", blocks);
  gen->add_option("--size", size, "nodes per block");
  gen->add_option("--p-in", p_in);
  gen->add_option("--p-out", p_out);
  gen->add_option("--feat-dim", feat_dim);
  gen->add_option("--noise", noise, "feature noise sigma");
  gen->add_option("--seed", seed);

  auto* bench = app.add_subcommand("gen-bench", "generate a synthetic benchmark stand-in bundle");
  bench->add_option("--dataset", bench_name, "sbm-demo | mutag | imdb-b | imdb-m | wikics")
      ->required();
  bench->add_option("--out", out_dir)->required();
  bench->add_option("--seed", seed);

  auto* rep = app.add_subcommand("reproduce", "pretrain, embed and evaluate in one shot");
  rep->add_option("--config", config_path)->required();
  rep->add_option("--out", out_dir, "artifact directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return cmd_pretrain(config_path, out_dir);
    if (emb->parsed()) return cmd_embed(config_path, ckpt_path, out_path);
    if (ev->parsed()) return cmd_evaluate(config_path, emb_path, task, out_path, projection_path);
    if (gen->parsed())
      return cmd_gen_synth(out_dir, blocks, size, p_in, p_out, feat_dim, noise, seed);
    if (bench->parsed()) return cmd_gen_bench(bench_name, out_dir, seed);
    if (rep->parsed()) return cmd_reproduce(config_path, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
