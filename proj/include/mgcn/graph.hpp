#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgcn/dense.hpp"
#include "mgcn/sparse.hpp"

namespace mgcn {

constexpr int kUnlabeled = -1;

/// A multi-layer graph: per-layer node sets with within-layer adjacency
/// and between-layer relation matrices, optional attributes and labels.
struct MultiLayerGraph {
  std::size_t num_layers = 0;
  std::vector<std::size_t> layer_sizes;
  // Keyed by (k, l) with k <= l; within-layer when k == l. Within-layer
  // matrices are symmetric with zero diagonal.
  std::map<std::pair<std::size_t, std::size_t>, SparseBinaryMatrix> relations;
  // Empty optional means identity attributes (X_k = I).
  std::vector<std::optional<DenseMatrix>> attributes;
  // Per layer, per node; kUnlabeled where no label. Empty vector for a
  // layer without labels.
  std::vector<std::vector<int>> labels;
  std::vector<int> num_classes;  // 0 for an unlabeled layer

  std::size_t attr_dim(std::size_t k) const {
    return attributes[k] ? attributes[k]->cols() : layer_sizes[k];
  }
  bool has_labels(std::size_t k) const { return num_classes[k] >= 2; }

  bool operator==(const MultiLayerGraph& o) const = default;
};

struct LayerSplit {
  std::vector<std::uint32_t> train_idx;
  std::vector<std::uint32_t> test_idx;
  bool class_missing_from_train = false;
};

/// Per-layer train/test partition of the labeled nodes.
struct LabelSplit {
  std::vector<LayerSplit> layers;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticSpec {
  std::size_t num_layers = 1;
  std::vector<std::size_t> layer_sizes;
  int num_communities = 2;
  double p_in = 0.1, p_out = 0.01;
  double q_same = 0.1, q_diff = 0.005;
  std::string attribute_mode = "identity";  // or "one-hot-community-noisy"
  std::uint64_t seed = 0;

  /// Throws Error naming the offending field.
  void validate() const;
};

struct Violation {
  std::size_t layer_k = 0, layer_l = 0;
  std::string rule;
  std::string detail;
};

MultiLayerGraph load_graph(const std::string& dataset_dir);
void save_graph(const MultiLayerGraph& graph, const std::string& dataset_dir);
std::vector<Violation> validate(const MultiLayerGraph& graph);
MultiLayerGraph generate_synthetic(const SyntheticSpec& spec);
LabelSplit split_labels(const MultiLayerGraph& graph, double ratio,
                        std::uint64_t seed);

}  // namespace mgcn
