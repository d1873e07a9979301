#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgcn/graph.hpp"
#include "mgcn/model.hpp"
#include "mgcn/train.hpp"

namespace mgcn {

struct LayerScores {
  std::size_t layer = 0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::size_t n_test = 0;
};

struct Scores {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  // One entry per (layer, class) pair for multi-layer evaluation, or per
  // class for a single vector.
  std::vector<double> per_class_f1;
  std::vector<LayerScores> per_layer;
  std::size_t n_test = 0;
};

/// Micro/macro F1 for single-label multiclass vectors. Classes absent
/// from both truth and prediction score F1 = 0.
Scores f1_scores(const std::vector<int>& predicted,
                 const std::vector<int>& truth, int num_classes);

/// Scores the classifier head on the held-out indices of every labeled
/// layer. Argmax ties break toward the smallest class index.
Scores evaluate(const MultiLayerGraph& graph, const ModelParams& params,
                const LabelSplit& split);

enum class Method { kMgcn, kGcnNoCross, kUnsupLogreg };

Method parse_method(const std::string& tag);
std::string method_tag(Method m);

struct ExperimentReport {
  std::string method;
  double ratio = 0.0;
  std::size_t embedding_dim = 0;
  std::size_t runs = 0;
  double mean_micro = 0.0, std_micro = 0.0;
  double mean_macro = 0.0, std_macro = 0.0;
};

/// Trains and scores one (method, split seed, init seed) combination.
Scores run_single(const MultiLayerGraph& graph, Method method, double ratio,
                  std::uint64_t split_seed, std::uint64_t train_seed,
                  const TrainConfig& base_cfg);

std::vector<ExperimentReport> run_experiment(const MultiLayerGraph& graph,
                                             Method method,
                                             const std::vector<double>& ratios,
                                             std::size_t runs,
                                             std::uint64_t base_seed,
                                             const TrainConfig& base_cfg,
                                             std::size_t jobs = 1);

std::vector<ExperimentReport> dimension_sweep(
    const MultiLayerGraph& graph, const std::vector<std::size_t>& dims,
    double ratio, std::size_t runs, std::uint64_t base_seed,
    const TrainConfig& base_cfg, std::size_t jobs = 1);

/// Multinomial logistic regression probe used for the lambda = 0 mode.
/// Returns predicted classes for the query rows.
std::vector<int> logreg_probe(const DenseMatrix& features,
                              const std::vector<std::uint32_t>& train_idx,
                              const std::vector<int>& labels, int num_classes,
                              const std::vector<std::uint32_t>& query_idx);

}  // namespace mgcn
