#include "mgcn/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgcn/rng.hpp"

namespace fs = std::filesystem;

namespace mgcn {
namespace {

constexpr const char* kVersionLine = "# mgcn-v1";

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoul(tok));
  return out;
}

}  // namespace

std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

SyntheticSpec parse_synthetic_spec(
    const std::map<std::string, std::string>& kv) {
  SyntheticSpec spec;
  for (const auto& [key, val] : kv) {
    if (key == "layers") spec.num_layers = std::stoul(val);
    else if (key == "nodes") spec.layer_sizes = parse_size_list(val);
    else if (key == "communities") spec.num_communities = std::stoi(val);
    else if (key == "p_in") spec.p_in = std::stod(val);
    else if (key == "p_out") spec.p_out = std::stod(val);
    else if (key == "q_same") spec.q_same = std::stod(val);
    else if (key == "q_diff") spec.q_diff = std::stod(val);
    else if (key == "attributes") spec.attribute_mode = val;
    else if (key == "seed") spec.seed = std::stoull(val);
    else throw Error("synthetic spec: unknown key '" + key + "'");
  }
  spec.validate();
  return spec;
}

void apply_train_config(const std::map<std::string, std::string>& kv,
                        TrainConfig& cfg) {
  for (const auto& [key, val] : kv) {
    if (key == "embedding_dim") cfg.embedding_dim = std::stoul(val);
    else if (key == "lambda") cfg.lambda = std::stod(val);
    else if (key == "epochs") cfg.epochs = std::stoul(val);
    else if (key == "optimizer") cfg.optimizer = parse_optimizer(val);
    else if (key == "learning_rate") cfg.learning_rate = std::stod(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "encoder_depth") cfg.encoder_depth = std::stoul(val);
    else if (key == "use_between_edges")
      cfg.use_between_edges = (val == "true" || val == "1");
    else if (key == "log_every") cfg.log_every = std::stoul(val);
    else throw Error("train config: unknown key '" + key + "'");
  }
  cfg.validate();
}

void write_history(const std::string& path, const TrainHistory& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kVersionLine << " history: epoch\tlink_loss\tlabel_loss\ttotal\n";
  char buf[128];
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    const LossBreakdown& l = history.epochs[e].loss;
    std::snprintf(buf, sizeof buf, "%zu\t%.9g\t%.9g\t%.9g\n", e, l.link_loss,
                  l.label_loss, l.total);
    out << buf;
  }
}

void write_embeddings(const std::string& dir, const EmbeddingSet& z) {
  fs::create_directories(dir);
  char buf[32];
  for (std::size_t k = 0; k < z.z.size(); ++k) {
    const fs::path path =
        fs::path(dir) / ("embeddings_" + std::to_string(k + 1) + ".txt");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << kVersionLine << " embeddings\n";
    const DenseMatrix& m = z.z[k];
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        out << (j ? " " : "") << buf;
      }
      out << "\n";
    }
  }
}

DenseMatrix read_embedding_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(path + ": empty embedding file");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw Error(path + ": ragged embedding rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void write_report(const std::string& path,
                  const std::vector<ExperimentReport>& reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kVersionLine << " report\n";
  out << "method\tratio\tdim\truns\tmicro_mean\tmicro_std\tmacro_mean\tmacro_std\n";
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%s\t%.4f\t%zu\t%zu\t%.4f\t%.4f\t%.4f\t%.4f\n",
                  r.method.c_str(), r.ratio, r.embedding_dim, r.runs,
                  r.mean_micro, r.std_micro, r.mean_macro, r.std_macro);
    out << buf;
  }
}

void write_scores(const std::string& path, const Scores& scores) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kVersionLine << " scores\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "micro_f1\t%.4f\nmacro_f1\t%.4f\nn_test\t%zu\n",
                scores.micro_f1, scores.macro_f1, scores.n_test);
  out << buf;
  for (const auto& layer : scores.per_layer) {
    std::snprintf(buf, sizeof buf, "layer_%zu\tmicro\t%.4f\tmacro\t%.4f\n",
                  layer.layer + 1, layer.micro_f1, layer.macro_f1);
    out << buf;
  }
}

std::uint64_t dataset_digest(const std::string& dataset_dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dataset_dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : files) {
    h ^= fnv1a(p.filename().string());
    h *= 0x100000001b3ULL;
    std::ifstream in(p, std::ios::binary);
    char c;
    while (in.get(c)) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << kVersionLine << " run-manifest\n";
  out << "command=" << manifest.command << "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(manifest.dataset_digest));
  out << "dataset_digest=" << buf << "\n";
  out << "seed=" << manifest.seed << "\n";
  for (const auto& [key, val] : manifest.config)
    out << "config." << key << "=" << val << "\n";
  for (const auto& a : manifest.artifacts) out << "artifact=" << a << "\n";
}

}  // namespace mgcn
