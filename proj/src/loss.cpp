#include "mgcn/loss.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "mgcn/kernels.hpp"
#include "mgcn/model.hpp"

namespace mgcn {

double link_loss_pair(const SparseBinaryMatrix& a, const DenseMatrix& logits,
                      DenseMatrix* grad_logits) {
  if (logits.rows() != a.rows() || logits.cols() != a.cols())
    throw Error("link_loss_pair: logits shape mismatch");
  const double cells =
      static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  const double edges = static_cast<double>(a.nnz());
  if (edges == 0.0 || edges == cells)
    throw Error("link_loss_pair: degenerate pair (|E| = " +
                std::to_string(a.nnz()) + " of " +
                std::to_string(static_cast<std::size_t>(cells)) + ")");

  const double w_pos = cells / edges;
  const double w_neg = cells / (cells - edges);
  const auto row_ptr = a.row_ptr();
  const auto& entries = a.entries();
  const std::int64_t n = static_cast<std::int64_t>(a.rows());
  const std::size_t m = a.cols();

  if (grad_logits) *grad_logits = DenseMatrix(a.rows(), a.cols());
  const double clamp_log = std::log(kProbClamp);
  std::vector<double> row_sum(a.rows(), 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t row = static_cast<std::size_t>(i);
    std::size_t p = row_ptr[row];
    const std::size_t pe = row_ptr[row + 1];
    const double* li = logits.row(row);
    double* gi = grad_logits ? grad_logits->row(row) : nullptr;
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const bool edge = p < pe && entries[p].second == j;
      if (edge) ++p;
      const double x = li[j];
      const double prob = sigmoid(x);
      if (edge) {
        acc += w_pos * (prob > kProbClamp ? std::log(prob) : clamp_log);
        if (gi) gi[j] = prob > kProbClamp ? -w_pos * sigmoid(-x) : 0.0;
      } else {
        const double q = sigmoid(-x);  // 1 - prob without cancellation
        acc += w_neg * (q > kProbClamp ? std::log(q) : clamp_log);
        if (gi) gi[j] = q > kProbClamp ? w_neg * prob : 0.0;
      }
    }
    row_sum[row] = acc;
  }

  double total = 0.0;
  for (double v : row_sum) total += v;
  return -total;
}

LossBreakdown link_loss(const MultiLayerGraph& graph, const EmbeddingSet& z,
                        bool use_between) {
  LossBreakdown out;
  for (const auto& [key, a] : graph.relations) {
    const auto [k, l] = key;
    if (!use_between && k != l) continue;
    const DenseMatrix logits = matmul_nt(z.z[k], z.z[l]);
    const double term = link_loss_pair(a, logits);
    out.per_pair[key] = term;
    out.link_loss += term;
  }
  out.total = out.link_loss;
  return out;
}

double label_loss(const MultiLayerGraph& graph, const Predictions& y,
                  const LabelSplit& split) {
  double loss = 0.0;
  if (split.layers.size() != graph.num_layers) return loss;
  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    if (!graph.has_labels(k) || y.y[k].size() == 0) continue;
    for (std::uint32_t i : split.layers[k].train_idx) {
      const int c = graph.labels[k][i];
      if (c == kUnlabeled)
        throw Error("label_loss: training index " + std::to_string(i) +
                    " in layer " + std::to_string(k + 1) + " is unlabeled");
      const double p = y.y[k](i, static_cast<std::size_t>(c));
      loss -= std::log(std::max(p, kProbClamp));
    }
  }
  return loss;
}

LossBreakdown total_loss(const MultiLayerGraph& graph, const EmbeddingSet& z,
                         const Predictions& y, const LabelSplit& split,
                         double lambda, bool use_between) {
  if (lambda < 0.0) throw Error("total_loss: lambda must be >= 0");
  LossBreakdown out = link_loss(graph, z, use_between);
  out.lambda = lambda;
  out.label_loss = label_loss(graph, y, split);
  out.total = out.link_loss + lambda * out.label_loss;
  return out;
}

}  // namespace mgcn
