#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgcn/graph.hpp"
#include "mgcn/loss.hpp"
#include "mgcn/model.hpp"

namespace mgcn {

enum class Optimizer { kPlainGd, kAdam };

Optimizer parse_optimizer(const std::string& name);
std::string optimizer_name(Optimizer opt);

struct TrainConfig {
  std::size_t embedding_dim = 32;
  double lambda = 10.0;
  std::size_t epochs = 200;
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  std::size_t encoder_depth = 1;
  bool use_between_edges = true;
  std::size_t log_every = 0;  // 0 = silent

  void validate() const;
};

struct EpochRecord {
  LossBreakdown loss;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::uint64_t params_digest = 0;
};

/// Raised when the loss goes non-finite mid-run.
struct DivergenceError : Error {
  DivergenceError(std::size_t epoch, std::string msg)
      : Error(std::move(msg)), epoch(epoch) {}
  std::size_t epoch;
};

/// First/second moment buffers for Adam; unused for plain GD.
struct OptimizerState {
  std::vector<double> m, v;
  std::size_t step = 0;
};

void optimizer_step(ModelParams& params, const ModelParams& grads,
                    OptimizerState& state, const TrainConfig& cfg);

struct TrainResult {
  ModelParams params;
  EmbeddingSet embeddings;
  TrainHistory history;
};

TrainResult train(const MultiLayerGraph& graph, const LabelSplit& split,
                  const TrainConfig& cfg);

}  // namespace mgcn
