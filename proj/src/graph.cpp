#include "mgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mgcn/rng.hpp"

namespace fs = std::filesystem;

namespace mgcn {
namespace {

std::string pair_file(std::size_t k, std::size_t l) {
  return "edges_" + std::to_string(k + 1) + "_" + std::to_string(l + 1) +
         ".txt";
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

[[noreturn]] void parse_fail(const std::string& file, std::size_t line,
                             const std::string& what) {
  throw Error(file + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void SyntheticSpec::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(std::string("synthetic spec: ") + name +
                  " must be in [0,1]");
  };
  if (num_layers < 1) throw Error("synthetic spec: num_layers must be >= 1");
  if (layer_sizes.size() != num_layers)
    throw Error("synthetic spec: layer_sizes count must equal num_layers");
  for (std::size_t n : layer_sizes)
    if (n == 0) throw Error("synthetic spec: layer size must be positive");
  if (num_communities < 2)
    throw Error("synthetic spec: num_communities must be >= 2");
  prob(p_in, "p_in");
  prob(p_out, "p_out");
  prob(q_same, "q_same");
  prob(q_diff, "q_diff");
  if (!(p_in > p_out)) throw Error("synthetic spec: p_in must exceed p_out");
  if (!(q_same > q_diff))
    throw Error("synthetic spec: q_same must exceed q_diff");
  if (attribute_mode != "identity" &&
      attribute_mode != "one-hot-community-noisy")
    throw Error("synthetic spec: unknown attribute_mode '" + attribute_mode +
                "'");
}

MultiLayerGraph load_graph(const std::string& dataset_dir) {
  const fs::path dir(dataset_dir);
  const fs::path manifest_path = dir / "manifest";
  std::ifstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot open " + manifest_path.string());

  MultiLayerGraph g;
  std::string attr_mode = "identity";
  std::vector<int> classes;
  {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(manifest, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        parse_fail(manifest_path.string(), lineno, "expected key=value");
      const std::string key = line.substr(0, eq);
      const std::string val = line.substr(eq + 1);
      if (key == "layers") {
        g.num_layers = std::stoul(val);
      } else if (key == "nodes") {
        for (const auto& t : split_csv(val))
          g.layer_sizes.push_back(std::stoul(t));
      } else if (key == "classes") {
        for (const auto& t : split_csv(val)) classes.push_back(std::stoi(t));
      } else if (key == "attributes") {
        attr_mode = val;
      } else {
        parse_fail(manifest_path.string(), lineno, "unknown key '" + key + "'");
      }
    }
  }
  if (g.num_layers == 0 || g.layer_sizes.size() != g.num_layers ||
      classes.size() != g.num_layers)
    throw Error(manifest_path.string() + ": inconsistent layer declarations");
  if (attr_mode != "identity" && attr_mode != "file")
    throw Error(manifest_path.string() + ": attributes must be identity|file");

  g.num_classes = classes;
  g.labels.resize(g.num_layers);
  g.attributes.resize(g.num_layers);

  for (std::size_t k = 0; k < g.num_layers; ++k) {
    for (std::size_t l = k; l < g.num_layers; ++l) {
      const fs::path path = dir / pair_file(k, l);
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      SparseBinaryMatrix m(g.layer_sizes[k], g.layer_sizes[l]);
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long i = -1, j = -1;
        if (!(ls >> i >> j))
          parse_fail(path.string(), lineno, "expected 'i j'");
        if (i < 0 || j < 0 ||
            static_cast<std::size_t>(i) >= g.layer_sizes[k] ||
            static_cast<std::size_t>(j) >= g.layer_sizes[l])
          parse_fail(path.string(), lineno, "node index out of range");
        m.push(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
        if (k == l && i != j)
          m.push(static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i));
      }
      m.finalize();
      g.relations.emplace(std::make_pair(k, l), std::move(m));
    }

    if (classes[k] > 0) {
      g.labels[k].assign(g.layer_sizes[k], kUnlabeled);
      const fs::path path = dir / ("labels_" + std::to_string(k + 1) + ".txt");
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long i = -1, c = -1;
        if (!(ls >> i >> c))
          parse_fail(path.string(), lineno, "expected 'i c'");
        if (i < 0 || static_cast<std::size_t>(i) >= g.layer_sizes[k])
          parse_fail(path.string(), lineno, "node index out of range");
        if (c < 0 || c >= classes[k])
          parse_fail(path.string(), lineno, "class out of range");
        g.labels[k][static_cast<std::size_t>(i)] = static_cast<int>(c);
      }
    }

    if (attr_mode == "file") {
      const fs::path path = dir / ("attrs_" + std::to_string(k + 1) + ".txt");
      std::ifstream in(path);
      if (!in) throw IoError("cannot open " + path.string());
      std::vector<std::vector<double>> rows;
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!rows.empty() && row.size() != rows.front().size())
          parse_fail(path.string(), lineno, "inconsistent attribute width");
        rows.push_back(std::move(row));
      }
      if (rows.size() != g.layer_sizes[k])
        throw Error(path.string() + ": attribute row count != layer size");
      DenseMatrix x(rows.size(), rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
      g.attributes[k] = std::move(x);
    }
  }

  const auto violations = validate(g);
  if (!violations.empty())
    throw Error(dataset_dir + ": invalid graph: " + violations.front().rule +
                " (" + violations.front().detail + ")");
  return g;
}

void save_graph(const MultiLayerGraph& graph, const std::string& dataset_dir) {
  const fs::path dir(dataset_dir);
  fs::create_directories(dir);

  const bool file_attrs =
      std::any_of(graph.attributes.begin(), graph.attributes.end(),
                  [](const auto& a) { return a.has_value(); });

  {
    std::ofstream out(dir / "manifest");
    if (!out) throw IoError("cannot write manifest in " + dataset_dir);
    out << "# mgcn-dataset-v1\n";
    out << "layers=" << graph.num_layers << "\n";
    out << "nodes=";
    for (std::size_t k = 0; k < graph.num_layers; ++k)
      out << (k ? "," : "") << graph.layer_sizes[k];
    out << "\nclasses=";
    for (std::size_t k = 0; k < graph.num_layers; ++k)
      out << (k ? "," : "") << graph.num_classes[k];
    out << "\nattributes=" << (file_attrs ? "file" : "identity") << "\n";
  }

  for (const auto& [key, m] : graph.relations) {
    const auto [k, l] = key;
    std::ofstream out(dir / pair_file(k, l));
    if (!out) throw IoError("cannot write edge file in " + dataset_dir);
    out << "# mgcn-dataset-v1\n";
    for (const auto& [i, j] : m.entries()) {
      if (k == l && i > j) continue;  // store each undirected edge once
      out << i << " " << j << "\n";
    }
  }

  char buf[32];
  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    if (graph.num_classes[k] > 0) {
      std::ofstream out(dir / ("labels_" + std::to_string(k + 1) + ".txt"));
      out << "# mgcn-dataset-v1\n";
      for (std::size_t i = 0; i < graph.layer_sizes[k]; ++i)
        if (graph.labels[k][i] != kUnlabeled)
          out << i << " " << graph.labels[k][i] << "\n";
    }
    if (file_attrs) {
      const DenseMatrix x = graph.attributes[k]
                                ? *graph.attributes[k]
                                : DenseMatrix::identity(graph.layer_sizes[k]);
      std::ofstream out(dir / ("attrs_" + std::to_string(k + 1) + ".txt"));
      for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
          std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
          out << (j ? " " : "") << buf;
        }
        out << "\n";
      }
    }
  }
}

std::vector<Violation> validate(const MultiLayerGraph& graph) {
  std::vector<Violation> out;
  auto add = [&](std::size_t k, std::size_t l, std::string rule,
                 std::string detail) {
    out.push_back({k, l, std::move(rule), std::move(detail)});
  };

  if (graph.layer_sizes.size() != graph.num_layers ||
      graph.labels.size() != graph.num_layers ||
      graph.attributes.size() != graph.num_layers ||
      graph.num_classes.size() != graph.num_layers) {
    add(0, 0, "layer bookkeeping size mismatch", "");
    return out;
  }

  for (const auto& [key, m] : graph.relations) {
    const auto [k, l] = key;
    if (k > l || l >= graph.num_layers) {
      add(k, l, "bad relation key", "expected k <= l < num_layers");
      continue;
    }
    if (m.rows() != graph.layer_sizes[k] || m.cols() != graph.layer_sizes[l]) {
      add(k, l, "relation shape mismatch", "");
      continue;
    }
    for (const auto& [i, j] : m.entries()) {
      if (i >= m.rows() || j >= m.cols()) {
        add(k, l, "index out of range",
            "(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (k == l) {
        if (i == j)
          add(k, l, "self-loop in layer", "node " + std::to_string(i));
        else if (!m.contains(j, i))
          add(k, l, "within-layer matrix not symmetric",
              "(" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
    if (m.nnz() >= m.rows() * m.cols())
      add(k, l, "relation has no non-edge", "");
  }

  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    if (graph.attributes[k] &&
        graph.attributes[k]->rows() != graph.layer_sizes[k])
      add(k, k, "attribute row count mismatch", "");
    if (graph.num_classes[k] > 0) {
      if (graph.num_classes[k] < 2)
        add(k, k, "num_classes must be >= 2 for labeled layer", "");
      if (graph.labels[k].size() != graph.layer_sizes[k]) {
        add(k, k, "label vector size mismatch", "");
      } else {
        for (std::size_t i = 0; i < graph.labels[k].size(); ++i) {
          const int c = graph.labels[k][i];
          if (c != kUnlabeled && (c < 0 || c >= graph.num_classes[k]))
            add(k, k, "label out of range", "node " + std::to_string(i));
        }
      }
    } else if (!graph.labels[k].empty()) {
      add(k, k, "labels present on layer declared unlabeled", "");
    }
  }
  return out;
}

MultiLayerGraph generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  auto rng = substream(spec.seed, "synthetic");
  std::uniform_int_distribution<int> comm_dist(0, spec.num_communities - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  MultiLayerGraph g;
  g.num_layers = spec.num_layers;
  g.layer_sizes = spec.layer_sizes;
  g.labels.resize(g.num_layers);
  g.attributes.resize(g.num_layers);
  g.num_classes.assign(g.num_layers, spec.num_communities);

  std::vector<std::vector<int>> comm(g.num_layers);
  for (std::size_t k = 0; k < g.num_layers; ++k) {
    comm[k].resize(g.layer_sizes[k]);
    for (auto& c : comm[k]) c = comm_dist(rng);
    g.labels[k] = comm[k];
  }

  for (std::size_t k = 0; k < g.num_layers; ++k) {
    for (std::size_t l = k; l < g.num_layers; ++l) {
      SparseBinaryMatrix m(g.layer_sizes[k], g.layer_sizes[l]);
      if (k == l) {
        for (std::uint32_t i = 0; i < g.layer_sizes[k]; ++i)
          for (std::uint32_t j = i + 1; j < g.layer_sizes[k]; ++j) {
            const double p =
                comm[k][i] == comm[k][j] ? spec.p_in : spec.p_out;
            if (coin(rng) < p) {
              m.push(i, j);
              m.push(j, i);
            }
          }
      } else {
        for (std::uint32_t i = 0; i < g.layer_sizes[k]; ++i)
          for (std::uint32_t j = 0; j < g.layer_sizes[l]; ++j) {
            const double q =
                comm[k][i] == comm[l][j] ? spec.q_same : spec.q_diff;
            if (coin(rng) < q) m.push(i, j);
          }
      }
      m.finalize();
      g.relations.emplace(std::make_pair(k, l), std::move(m));
    }
  }

  if (spec.attribute_mode == "one-hot-community-noisy") {
    std::normal_distribution<double> noise(0.0, 0.1);
    for (std::size_t k = 0; k < g.num_layers; ++k) {
      DenseMatrix x(g.layer_sizes[k],
                    static_cast<std::size_t>(spec.num_communities));
      for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = noise(rng);
        x(i, static_cast<std::size_t>(comm[k][i])) += 1.0;
      }
      g.attributes[k] = std::move(x);
    }
  }
  return g;
}

LabelSplit split_labels(const MultiLayerGraph& graph, double ratio,
                        std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw Error("split_labels: ratio must lie in (0,1)");
  LabelSplit split;
  split.ratio = ratio;
  split.seed = seed;
  split.layers.resize(graph.num_layers);

  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    if (!graph.has_labels(k)) continue;
    std::vector<std::uint32_t> labeled;
    for (std::size_t i = 0; i < graph.labels[k].size(); ++i)
      if (graph.labels[k][i] != kUnlabeled)
        labeled.push_back(static_cast<std::uint32_t>(i));
    if (labeled.size() < static_cast<std::size_t>(graph.num_classes[k]))
      throw Error("split_labels: layer " + std::to_string(k + 1) +
                  " has fewer labeled nodes than classes");

    auto rng = substream(seed, "split", k);
    std::shuffle(labeled.begin(), labeled.end(), rng);
    const std::size_t n_train = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(labeled.size())));

    LayerSplit& ls = split.layers[k];
    ls.train_idx.assign(labeled.begin(), labeled.begin() + n_train);
    ls.test_idx.assign(labeled.begin() + n_train, labeled.end());
    std::sort(ls.train_idx.begin(), ls.train_idx.end());
    std::sort(ls.test_idx.begin(), ls.test_idx.end());

    std::set<int> seen;
    for (std::uint32_t i : ls.train_idx) seen.insert(graph.labels[k][i]);
    std::set<int> all;
    for (std::uint32_t i : labeled) all.insert(graph.labels[k][i]);
    ls.class_missing_from_train = seen.size() < all.size();
  }
  return split;
}

}  // namespace mgcn
