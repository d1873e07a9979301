#include "mgcn/model.hpp"

#include <cmath>
#include <cstdint>

#include "mgcn/kernels.hpp"
#include "mgcn/rng.hpp"

namespace mgcn {

CsrMatrix normalize_adjacency(const SparseBinaryMatrix& a) {
  if (a.rows() != a.cols())
    throw Error("normalize_adjacency: matrix must be square");
  const std::size_t n = a.rows();
  const auto row_ptr = a.row_ptr();
  const auto& entries = a.entries();

  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t deg = row_ptr[i + 1] - row_ptr[i];
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(deg) + 1.0);
  }
  for (const auto& [i, j] : entries) {
    if (i == j) throw Error("normalize_adjacency: self-loop in input");
    if (!a.contains(j, i)) throw Error("normalize_adjacency: asymmetric input");
  }

  CsrMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.resize(n + 1, 0);
  s.col_idx.reserve(entries.size() + n);
  s.values.reserve(entries.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    bool diag_done = false;
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      const std::uint32_t j = entries[p].second;
      if (!diag_done && j > i) {
        s.col_idx.push_back(static_cast<std::uint32_t>(i));
        s.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        diag_done = true;
      }
      s.col_idx.push_back(j);
      s.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[j]);
    }
    if (!diag_done) {
      s.col_idx.push_back(static_cast<std::uint32_t>(i));
      s.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
    }
    s.row_ptr[i + 1] = s.col_idx.size();
  }
  return s;
}

DenseMatrix gcn_layer(const CsrMatrix& s, const DenseMatrix& x,
                      const DenseMatrix& theta, Activation act) {
  const DenseMatrix pre = matmul(spmm(s, x), theta);
  switch (act) {
    case Activation::kRelu:
      return relu(pre);
    case Activation::kIdentity:
      return pre;
    case Activation::kSoftmax:
      return row_softmax(pre);
  }
  throw Error("gcn_layer: bad activation");
}

std::size_t ModelParams::count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) {
    for (const auto& w : layer.encoder) n += w.size();
    n += layer.classifier.size();
  }
  return n;
}

std::vector<double> ModelParams::pack() const {
  std::vector<double> flat;
  flat.reserve(count());
  for (const auto& layer : layers) {
    for (const auto& w : layer.encoder)
      flat.insert(flat.end(), w.data(), w.data() + w.size());
    flat.insert(flat.end(), layer.classifier.data(),
                layer.classifier.data() + layer.classifier.size());
  }
  return flat;
}

void ModelParams::unpack(const std::vector<double>& flat) {
  if (flat.size() != count()) throw Error("ModelParams::unpack: size mismatch");
  std::size_t pos = 0;
  for (auto& layer : layers) {
    for (auto& w : layer.encoder) {
      std::copy(flat.begin() + pos, flat.begin() + pos + w.size(), w.data());
      pos += w.size();
    }
    std::copy(flat.begin() + pos, flat.begin() + pos + layer.classifier.size(),
              layer.classifier.data());
    pos += layer.classifier.size();
  }
}

Workspace make_workspace(const MultiLayerGraph& graph) {
  Workspace ws;
  ws.s.reserve(graph.num_layers);
  ws.x.reserve(graph.num_layers);
  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    ws.s.push_back(normalize_adjacency(graph.relations.at({k, k})));
    ws.x.push_back(graph.attributes[k]
                       ? *graph.attributes[k]
                       : DenseMatrix::identity(graph.layer_sizes[k]));
  }
  return ws;
}

namespace {

DenseMatrix glorot(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  const double bound =
      std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseMatrix w(rows, cols);
  for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return w;
}

}  // namespace

ModelParams init_params(const MultiLayerGraph& graph, std::size_t dim,
                        std::uint64_t seed, std::size_t encoder_depth) {
  if (dim < 1) throw Error("init_params: embedding dimension must be >= 1");
  if (encoder_depth < 1) throw Error("init_params: encoder depth must be >= 1");
  auto rng = substream(seed, "init");
  ModelParams params;
  params.embedding_dim = dim;
  params.layers.resize(graph.num_layers);
  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    auto& layer = params.layers[k];
    std::size_t in = graph.attr_dim(k);
    for (std::size_t d = 0; d < encoder_depth; ++d) {
      layer.encoder.push_back(glorot(in, dim, rng));
      in = dim;
    }
    if (graph.has_labels(k))
      layer.classifier =
          glorot(dim, static_cast<std::size_t>(graph.num_classes[k]), rng);
  }
  return params;
}

EmbeddingSet encode(const Workspace& ws, const ModelParams& params) {
  EmbeddingSet out;
  out.z.resize(ws.s.size());
  for (std::size_t k = 0; k < ws.s.size(); ++k) {
    DenseMatrix h = ws.x[k];
    for (const auto& w : params.layers[k].encoder)
      h = relu(matmul(spmm(ws.s[k], h), w));
    out.z[k] = std::move(h);
  }
  return out;
}

EmbeddingSet encode(const MultiLayerGraph& graph, const ModelParams& params) {
  return encode(make_workspace(graph), params);
}

DenseMatrix decode_pair(const DenseMatrix& z_k, const DenseMatrix& z_l) {
  return elementwise_sigmoid(matmul_nt(z_k, z_l));
}

Predictions classify(const Workspace& ws, const EmbeddingSet& z,
                     const ModelParams& params) {
  Predictions out;
  out.y.resize(ws.s.size());
  for (std::size_t k = 0; k < ws.s.size(); ++k) {
    const DenseMatrix& theta = params.layers[k].classifier;
    if (theta.size() == 0) continue;  // unlabeled layer: no prediction
    out.y[k] = row_softmax(matmul(spmm(ws.s[k], z.z[k]), theta));
  }
  return out;
}

Predictions classify(const MultiLayerGraph& graph, const EmbeddingSet& z,
                     const ModelParams& params) {
  return classify(make_workspace(graph), z, params);
}

PassResult forward_backward(const MultiLayerGraph& graph, const Workspace& ws,
                            const ModelParams& params, const LabelSplit& split,
                            double lambda, bool use_between, bool want_grads) {
  const std::size_t m = graph.num_layers;
  PassResult res;
  res.z.z.resize(m);
  res.y.y.resize(m);

  // Encoder forward, keeping per-stage caches for the backward pass.
  std::vector<std::vector<DenseMatrix>> prop(m);  // M_t = S * input_t
  std::vector<std::vector<DenseMatrix>> pre(m);   // P_t = M_t * W_t
  for (std::size_t k = 0; k < m; ++k) {
    DenseMatrix h = ws.x[k];
    for (const auto& w : params.layers[k].encoder) {
      prop[k].push_back(spmm(ws.s[k], h));
      pre[k].push_back(matmul(prop[k].back(), w));
      h = relu(pre[k].back());
    }
    res.z.z[k] = std::move(h);
  }

  // Classifier forward.
  std::vector<DenseMatrix> sz(m);
  for (std::size_t k = 0; k < m; ++k) {
    const DenseMatrix& theta = params.layers[k].classifier;
    if (theta.size() == 0) continue;
    sz[k] = spmm(ws.s[k], res.z.z[k]);
    res.y.y[k] = row_softmax(matmul(sz[k], theta));
  }

  if (want_grads) {
    res.grads.embedding_dim = params.embedding_dim;
    res.grads.layers.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      for (const auto& w : params.layers[k].encoder)
        res.grads.layers[k].encoder.emplace_back(w.rows(), w.cols());
      res.grads.layers[k].classifier = DenseMatrix(
          params.layers[k].classifier.rows(), params.layers[k].classifier.cols());
    }
  }

  std::vector<DenseMatrix> grad_z(m);
  if (want_grads)
    for (std::size_t k = 0; k < m; ++k)
      grad_z[k] = DenseMatrix(res.z.z[k].rows(), res.z.z[k].cols());

  // Link loss and its gradient through both embedding factors.
  res.loss.lambda = lambda;
  for (const auto& [key, a] : graph.relations) {
    const auto [k, l] = key;
    if (!use_between && k != l) continue;
    const DenseMatrix logits = matmul_nt(res.z.z[k], res.z.z[l]);
    DenseMatrix grad_logits;
    const double term =
        link_loss_pair(a, logits, want_grads ? &grad_logits : nullptr);
    res.loss.per_pair[key] = term;
    res.loss.link_loss += term;
    if (want_grads) {
      grad_z[k] += matmul(grad_logits, res.z.z[l]);
      grad_z[l] += matmul_tn(grad_logits, res.z.z[k]);
    }
  }

  // Label loss; gradient flows through the classifier head into Z. An
  // empty split means no supervision.
  const bool has_split = split.layers.size() == m;
  for (std::size_t k = 0; has_split && k < m; ++k) {
    if (!graph.has_labels(k) || res.y.y[k].size() == 0) continue;
    const DenseMatrix& yhat = res.y.y[k];
    const std::size_t classes = yhat.cols();
    DenseMatrix grad_q;
    if (want_grads) grad_q = DenseMatrix(yhat.rows(), classes);
    for (std::uint32_t i : split.layers[k].train_idx) {
      const int c = graph.labels[k][i];
      if (c == kUnlabeled)
        throw Error("forward_backward: unlabeled training index");
      const double p = yhat(i, static_cast<std::size_t>(c));
      res.loss.label_loss -= std::log(std::max(p, kProbClamp));
      if (want_grads && p > kProbClamp) {
        for (std::size_t j = 0; j < classes; ++j)
          grad_q(i, j) = lambda * yhat(i, j);
        grad_q(i, static_cast<std::size_t>(c)) -= lambda;
      }
    }
    if (want_grads) {
      const DenseMatrix& theta = params.layers[k].classifier;
      res.grads.layers[k].classifier = matmul_tn(sz[k], grad_q);
      grad_z[k] += spmm(ws.s[k], matmul_nt(grad_q, theta));
    }
  }
  res.loss.total = res.loss.link_loss + lambda * res.loss.label_loss;

  if (want_grads) {
    for (std::size_t k = 0; k < m; ++k) {
      DenseMatrix g = std::move(grad_z[k]);
      const auto& enc = params.layers[k].encoder;
      for (std::size_t d = enc.size(); d-- > 0;) {
        const DenseMatrix gp = relu_backward(pre[k][d], g);
        res.grads.layers[k].encoder[d] = matmul_tn(prop[k][d], gp);
        if (d > 0) g = spmm(ws.s[k], matmul_nt(gp, enc[d]));
      }
    }
  }
  return res;
}

ModelParams backward(const MultiLayerGraph& graph, const ModelParams& params,
                     const LabelSplit& split, double lambda, bool use_between) {
  const Workspace ws = make_workspace(graph);
  return forward_backward(graph, ws, params, split, lambda, use_between).grads;
}

}  // namespace mgcn
