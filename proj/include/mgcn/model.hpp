#pragma once

#include <cstdint>
#include <vector>

#include "mgcn/dense.hpp"
#include "mgcn/graph.hpp"
#include "mgcn/loss.hpp"
#include "mgcn/sparse.hpp"

namespace mgcn {

/// S = D~^{-1/2} (A + I) D~^{-1/2} for a symmetric zero-diagonal A.
CsrMatrix normalize_adjacency(const SparseBinaryMatrix& a);

enum class Activation { kRelu, kIdentity, kSoftmax };

/// a(S * X * theta).
DenseMatrix gcn_layer(const CsrMatrix& s, const DenseMatrix& x,
                      const DenseMatrix& theta, Activation act);

/// Per-layer network weights. `encoder` holds one matrix per encoder
/// stage (C_k x F, then F x F); `classifier` is F x K_l and empty for a
/// layer without labels.
struct ModelParams {
  struct Layer {
    std::vector<DenseMatrix> encoder;
    DenseMatrix classifier;
  };
  std::vector<Layer> layers;
  std::size_t embedding_dim = 0;

  std::size_t count() const;
  std::vector<double> pack() const;
  void unpack(const std::vector<double>& flat);
};

struct EmbeddingSet {
  std::vector<DenseMatrix> z;  // one N_k x F matrix per layer
};

struct Predictions {
  // One N_k x K_l matrix per layer; empty for layers without labels.
  std::vector<DenseMatrix> y;
};

/// Precomputed per-layer normalized adjacency and dense attributes.
struct Workspace {
  std::vector<CsrMatrix> s;
  std::vector<DenseMatrix> x;
};

Workspace make_workspace(const MultiLayerGraph& graph);

ModelParams init_params(const MultiLayerGraph& graph, std::size_t dim,
                        std::uint64_t seed, std::size_t encoder_depth = 1);

EmbeddingSet encode(const MultiLayerGraph& graph, const ModelParams& params);
EmbeddingSet encode(const Workspace& ws, const ModelParams& params);

/// sigma(Z_k Z_l^T).
DenseMatrix decode_pair(const DenseMatrix& z_k, const DenseMatrix& z_l);

Predictions classify(const MultiLayerGraph& graph, const EmbeddingSet& z,
                     const ModelParams& params);
Predictions classify(const Workspace& ws, const EmbeddingSet& z,
                     const ModelParams& params);

/// One combined forward/backward pass of the full objective.
struct PassResult {
  LossBreakdown loss;
  EmbeddingSet z;
  Predictions y;
  ModelParams grads;  // same shape as the parameters
};

PassResult forward_backward(const MultiLayerGraph& graph, const Workspace& ws,
                            const ModelParams& params, const LabelSplit& split,
                            double lambda, bool use_between,
                            bool want_grads = true);

/// Gradient of the total objective at `params`.
ModelParams backward(const MultiLayerGraph& graph, const ModelParams& params,
                     const LabelSplit& split, double lambda,
                     bool use_between = true);

}  // namespace mgcn
