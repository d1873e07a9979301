#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgcn/eval.hpp"
#include "mgcn/io.hpp"
#include "mgcn/train.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

std::map<std::string, std::string> config_map(const mgcn::TrainConfig& cfg) {
  char buf[64];
  std::map<std::string, std::string> kv;
  kv["embedding_dim"] = std::to_string(cfg.embedding_dim);
  std::snprintf(buf, sizeof buf, "%g", cfg.lambda);
  kv["lambda"] = buf;
  kv["epochs"] = std::to_string(cfg.epochs);
  kv["optimizer"] = mgcn::optimizer_name(cfg.optimizer);
  std::snprintf(buf, sizeof buf, "%g", cfg.learning_rate);
  kv["learning_rate"] = buf;
  kv["seed"] = std::to_string(cfg.seed);
  kv["encoder_depth"] = std::to_string(cfg.encoder_depth);
  kv["use_between_edges"] = cfg.use_between_edges ? "true" : "false";
  return kv;
}

int cmd_generate(const std::string& spec_file, const std::string& out_dir) {
  const mgcn::SyntheticSpec spec =
      mgcn::parse_synthetic_spec(mgcn::read_kv_file(spec_file));
  const mgcn::MultiLayerGraph graph = mgcn::generate_synthetic(spec);
  mgcn::save_graph(graph, out_dir);
  std::printf("wrote %s: %zu layers\n", out_dir.c_str(), graph.num_layers);
  for (const auto& [key, m] : graph.relations)
    std::printf("  pair (%zu,%zu): %zux%zu nodes, %zu edges\n", key.first + 1,
                key.second + 1, m.rows(), m.cols(), m.nnz());
  return kExitOk;
}

struct TrainArgs {
  std::string dataset_dir, config_file, out_dir;
  double ratio = 0.2;
  bool no_between = false;
  std::string optimizer;
  // -1 sentinels mean "not given on the command line"
  double lambda = -1.0, lr = -1.0;
  long long dim = -1, epochs = -1, seed = -1;
};

int cmd_train(const TrainArgs& args) {
  mgcn::TrainConfig cfg;
  if (!args.config_file.empty())
    mgcn::apply_train_config(mgcn::read_kv_file(args.config_file), cfg);
  if (args.lambda >= 0.0) cfg.lambda = args.lambda;
  if (args.lr > 0.0) cfg.learning_rate = args.lr;
  if (args.dim > 0) cfg.embedding_dim = static_cast<std::size_t>(args.dim);
  if (args.epochs > 0) cfg.epochs = static_cast<std::size_t>(args.epochs);
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (args.no_between) cfg.use_between_edges = false;
  if (!args.optimizer.empty())
    cfg.optimizer = mgcn::parse_optimizer(args.optimizer);
  cfg.validate();
  if (!(args.ratio > 0.0 && args.ratio < 1.0))
    throw mgcn::Error("--ratio must lie in (0,1)");

  const mgcn::MultiLayerGraph graph = mgcn::load_graph(args.dataset_dir);
  fs::create_directories(args.out_dir);

  mgcn::RunManifest manifest;
  manifest.command = "train";
  manifest.config = config_map(cfg);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", args.ratio);
  manifest.config["ratio"] = buf;
  manifest.dataset_digest = mgcn::dataset_digest(args.dataset_dir);
  manifest.seed = cfg.seed;
  for (std::size_t k = 1; k <= graph.num_layers; ++k)
    manifest.artifacts.push_back("embeddings_" + std::to_string(k) + ".txt");
  manifest.artifacts.push_back("history.txt");
  manifest.artifacts.push_back("scores.txt");
  mgcn::write_manifest((fs::path(args.out_dir) / "manifest.txt").string(),
                       manifest);

  const mgcn::LabelSplit split =
      mgcn::split_labels(graph, args.ratio, cfg.seed);
  const mgcn::TrainResult result = mgcn::train(graph, split, cfg);

  mgcn::write_embeddings(args.out_dir, result.embeddings);
  mgcn::write_history((fs::path(args.out_dir) / "history.txt").string(),
                      result.history);
  const mgcn::Scores scores = mgcn::evaluate(graph, result.params, split);
  mgcn::write_scores((fs::path(args.out_dir) / "scores.txt").string(), scores);
  std::printf("final loss %.6g  micro-F1 %.4f  macro-F1 %.4f\n",
              result.history.epochs.back().loss.total, scores.micro_f1,
              scores.macro_f1);
  return kExitOk;
}

struct EvalArgs {
  std::string dataset_dir, out_dir, config_file;
  std::string ratios = "0.2,0.5,0.8";
  std::string methods = "mgcn";
  std::string dims;
  std::size_t runs = 10;
  std::size_t jobs = 1;
  long long seed = 0;
};

int cmd_eval(const EvalArgs& args) {
  mgcn::TrainConfig cfg;
  if (!args.config_file.empty())
    mgcn::apply_train_config(mgcn::read_kv_file(args.config_file), cfg);
  const mgcn::MultiLayerGraph graph = mgcn::load_graph(args.dataset_dir);
  fs::create_directories(args.out_dir);

  mgcn::RunManifest manifest;
  manifest.command = "eval";
  manifest.config = config_map(cfg);
  manifest.config["ratios"] = args.ratios;
  manifest.config["methods"] = args.methods;
  manifest.config["runs"] = std::to_string(args.runs);
  if (!args.dims.empty()) manifest.config["dims"] = args.dims;
  manifest.dataset_digest = mgcn::dataset_digest(args.dataset_dir);
  manifest.seed = static_cast<std::uint64_t>(args.seed);
  manifest.artifacts.push_back("report.txt");
  mgcn::write_manifest((fs::path(args.out_dir) / "manifest.txt").string(),
                       manifest);

  std::vector<double> ratios;
  for (const auto& r : split_list(args.ratios)) ratios.push_back(std::stod(r));

  std::vector<mgcn::ExperimentReport> reports;
  if (!args.dims.empty()) {
    std::vector<std::size_t> dims;
    for (const auto& d : split_list(args.dims)) dims.push_back(std::stoul(d));
    if (ratios.size() != 1)
      throw mgcn::Error("--dims expects exactly one --ratios value");
    reports = mgcn::dimension_sweep(graph, dims, ratios.front(), args.runs,
                                    static_cast<std::uint64_t>(args.seed), cfg,
                                    args.jobs);
  } else {
    for (const auto& tag : split_list(args.methods)) {
      const auto part = mgcn::run_experiment(
          graph, mgcn::parse_method(tag), ratios, args.runs,
          static_cast<std::uint64_t>(args.seed), cfg, args.jobs);
      reports.insert(reports.end(), part.begin(), part.end());
    }
  }
  const std::string report_path =
      (fs::path(args.out_dir) / "report.txt").string();
  mgcn::write_report(report_path, reports);
  std::printf("wrote %s (%zu rows)\n", report_path.c_str(), reports.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MGCN: multi-layer graph embedding and node classification"};
  app.require_subcommand(1);

  std::string gen_spec, gen_out;
  auto* gen = app.add_subcommand("generate",
                                 "Generate a synthetic planted-partition "
                                 "multi-layer dataset");
  gen->add_option("spec-file", gen_spec, "key=value synthetic spec")
      ->required();
  gen->add_option("out-dir", gen_out, "output dataset directory")->required();

  TrainArgs targs;
  auto* tr = app.add_subcommand("train", "Train on a dataset directory");
  tr->add_option("dataset-dir", targs.dataset_dir)->required();
  tr->add_option("--out", targs.out_dir, "output directory")->required();
  tr->add_option("--config", targs.config_file, "key=value config file");
  tr->add_option("--ratio", targs.ratio, "training label ratio");
  tr->add_option("--seed", targs.seed);
  tr->add_option("--lambda", targs.lambda);
  tr->add_option("--dim", targs.dim);
  tr->add_option("--epochs", targs.epochs);
  tr->add_option("--optimizer", targs.optimizer, "plain-gd|adam");
  tr->add_option("--lr", targs.lr);
  tr->add_flag("--no-between-edges", targs.no_between,
               "drop between-layer pairs from the reconstruction loss");

  EvalArgs eargs;
  auto* ev = app.add_subcommand("eval", "Run the evaluation protocol");
  ev->add_option("dataset-dir", eargs.dataset_dir)->required();
  ev->add_option("--out", eargs.out_dir, "output directory")->required();
  ev->add_option("--config", eargs.config_file, "key=value config file");
  ev->add_option("--ratios", eargs.ratios, "comma-separated ratios");
  ev->add_option("--runs", eargs.runs);
  ev->add_option("--methods", eargs.methods,
                 "comma-separated: mgcn,gcn-no-cross,unsup+logreg");
  ev->add_option("--dims", eargs.dims, "dimension sweep values");
  ev->add_option("--jobs", eargs.jobs, "parallel runs");
  ev->add_option("--seed", eargs.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_spec, gen_out);
    if (tr->parsed()) return cmd_train(targs);
    if (ev->parsed()) return cmd_eval(eargs);
  } catch (const mgcn::DivergenceError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const mgcn::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
