#pragma once

#include <map>
#include <utility>

#include "mgcn/dense.hpp"
#include "mgcn/graph.hpp"

namespace mgcn {

struct EmbeddingSet;
struct Predictions;

/// Probabilities are clamped here before any log.
constexpr double kProbClamp = 1e-12;

struct LossBreakdown {
  double link_loss = 0.0;
  double label_loss = 0.0;
  double total = 0.0;
  std::map<std::pair<std::size_t, std::size_t>, double> per_pair;
  double lambda = 0.0;
};

/// Class-balanced reconstruction loss over one relation pair. `logits`
/// holds Z_k Z_l^T; the loss reads sigma(logits) against the stored
/// pattern, weighting edges by 1/|E| and non-edges by 1/(N_k N_l - |E|),
/// scaled by N_k N_l. When `grad_logits` is non-null it receives
/// d(loss)/d(logits).
double link_loss_pair(const SparseBinaryMatrix& a, const DenseMatrix& logits,
                      DenseMatrix* grad_logits = nullptr);

/// Sum of pair losses over all stored pairs (k <= l); between-layer pairs
/// are skipped when use_between is false.
LossBreakdown link_loss(const MultiLayerGraph& graph, const EmbeddingSet& z,
                        bool use_between = true);

/// Cross-entropy over the training indices of each labeled layer; raw sum,
/// not averaged.
double label_loss(const MultiLayerGraph& graph, const Predictions& y,
                  const LabelSplit& split);

LossBreakdown total_loss(const MultiLayerGraph& graph, const EmbeddingSet& z,
                         const Predictions& y, const LabelSplit& split,
                         double lambda, bool use_between = true);

}  // namespace mgcn
