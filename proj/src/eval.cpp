#include "mgcn/eval.hpp"

#include <cmath>
#include <cstdint>

#include "mgcn/kernels.hpp"
#include "mgcn/rng.hpp"

namespace mgcn {
namespace {

struct ClassCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

double class_f1(const ClassCounts& c) {
  const double denom =
      static_cast<double>(2 * c.tp + c.fp + c.fn);
  if (denom == 0.0) return 0.0;  // absent class convention
  return 2.0 * static_cast<double>(c.tp) / denom;
}

int argmax_row(const DenseMatrix& m, std::size_t i) {
  int best = 0;
  for (std::size_t j = 1; j < m.cols(); ++j)
    if (m(i, j) > m(i, best)) best = static_cast<int>(j);
  return best;
}

}  // namespace

Scores f1_scores(const std::vector<int>& predicted,
                 const std::vector<int>& truth, int num_classes) {
  if (predicted.size() != truth.size())
    throw Error("f1_scores: prediction/truth length mismatch");
  std::vector<ClassCounts> counts(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predicted[i], t = truth[i];
    if (p < 0 || p >= num_classes || t < 0 || t >= num_classes)
      throw Error("f1_scores: label out of range");
    if (p == t) {
      ++counts[static_cast<std::size_t>(p)].tp;
    } else {
      ++counts[static_cast<std::size_t>(p)].fp;
      ++counts[static_cast<std::size_t>(t)].fn;
    }
  }
  Scores s;
  s.n_test = truth.size();
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& c : counts) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    s.per_class_f1.push_back(class_f1(c));
  }
  const double micro_denom = static_cast<double>(tp) +
                             0.5 * static_cast<double>(fp + fn);
  s.micro_f1 = micro_denom > 0.0 ? static_cast<double>(tp) / micro_denom : 0.0;
  double sum = 0.0;
  for (double f : s.per_class_f1) sum += f;
  s.macro_f1 = num_classes > 0 ? sum / static_cast<double>(num_classes) : 0.0;
  return s;
}

Scores evaluate(const MultiLayerGraph& graph, const ModelParams& params,
                const LabelSplit& split) {
  const Workspace ws = make_workspace(graph);
  const EmbeddingSet z = encode(ws, params);
  const Predictions yhat = classify(ws, z, params);

  Scores s;
  std::size_t total_correct = 0;
  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    if (!graph.has_labels(k) || yhat.y[k].size() == 0) continue;
    const auto& test = split.layers[k].test_idx;
    if (test.empty()) continue;
    std::vector<int> pred, truth;
    pred.reserve(test.size());
    truth.reserve(test.size());
    for (std::uint32_t i : test) {
      pred.push_back(argmax_row(yhat.y[k], i));
      truth.push_back(graph.labels[k][i]);
    }
    const Scores layer = f1_scores(pred, truth, graph.num_classes[k]);
    s.per_layer.push_back({k, layer.micro_f1, layer.macro_f1, layer.n_test});
    // Each (layer, class) pair counts as its own class for macro pooling.
    for (double f : layer.per_class_f1) s.per_class_f1.push_back(f);
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == truth[i]) ++total_correct;
    s.n_test += test.size();
  }
  if (s.n_test == 0) throw Error("evaluate: empty test set");
  s.micro_f1 =
      static_cast<double>(total_correct) / static_cast<double>(s.n_test);
  double sum = 0.0;
  for (double f : s.per_class_f1) sum += f;
  s.macro_f1 = sum / static_cast<double>(s.per_class_f1.size());
  return s;
}

Method parse_method(const std::string& tag) {
  if (tag == "mgcn") return Method::kMgcn;
  if (tag == "gcn-no-cross") return Method::kGcnNoCross;
  if (tag == "unsup+logreg") return Method::kUnsupLogreg;
  throw Error("unknown method tag '" + tag + "'");
}

std::string method_tag(Method m) {
  switch (m) {
    case Method::kMgcn: return "mgcn";
    case Method::kGcnNoCross: return "gcn-no-cross";
    case Method::kUnsupLogreg: return "unsup+logreg";
  }
  throw Error("bad method");
}

std::vector<int> logreg_probe(const DenseMatrix& features,
                              const std::vector<std::uint32_t>& train_idx,
                              const std::vector<int>& labels, int num_classes,
                              const std::vector<std::uint32_t>& query_idx) {
  const std::size_t dim = features.cols() + 1;  // bias column
  const std::size_t classes = static_cast<std::size_t>(num_classes);
  const std::size_t n = train_idx.size();
  if (n == 0) throw Error("logreg_probe: empty training set");

  DenseMatrix x(n, dim);
  for (std::size_t r = 0; r < n; ++r) {
    const double* src = features.row(train_idx[r]);
    for (std::size_t j = 0; j + 1 < dim; ++j) x(r, j) = src[j];
    x(r, dim - 1) = 1.0;
  }

  // Convex objective, zero init, full-batch gradient descent. The ridge
  // penalty matches the common default (C=1 on the summed loss, i.e. 1/n
  // on the mean); the bias row is left unpenalized.
  DenseMatrix w(dim, classes);
  constexpr std::size_t iters = 500;
  constexpr double lr = 0.5;
  const double l2 = 1.0 / static_cast<double>(n);
  for (std::size_t it = 0; it < iters; ++it) {
    const DenseMatrix probs = row_softmax(matmul(x, w));
    DenseMatrix grad_logits = probs;
    for (std::size_t r = 0; r < n; ++r)
      grad_logits(r, static_cast<std::size_t>(labels[train_idx[r]])) -= 1.0;
    grad_logits.scale(1.0 / static_cast<double>(n));
    DenseMatrix grad = matmul_tn(x, grad_logits);
    for (std::size_t i = 0; i < (dim - 1) * classes; ++i)
      grad.data()[i] += l2 * w.data()[i];
    for (std::size_t i = 0; i < w.size(); ++i)
      w.data()[i] -= lr * grad.data()[i];
  }

  std::vector<int> out;
  out.reserve(query_idx.size());
  for (std::uint32_t q : query_idx) {
    DenseMatrix row(1, dim);
    const double* src = features.row(q);
    for (std::size_t j = 0; j + 1 < dim; ++j) row(0, j) = src[j];
    row(0, dim - 1) = 1.0;
    const DenseMatrix logits = matmul(row, w);
    out.push_back(argmax_row(logits, 0));
  }
  return out;
}

Scores run_single(const MultiLayerGraph& graph, Method method, double ratio,
                  std::uint64_t split_seed, std::uint64_t train_seed,
                  const TrainConfig& base_cfg) {
  const LabelSplit split = split_labels(graph, ratio, split_seed);
  TrainConfig cfg = base_cfg;
  cfg.seed = train_seed;
  if (method == Method::kGcnNoCross) cfg.use_between_edges = false;
  if (method == Method::kUnsupLogreg) cfg.lambda = 0.0;

  const TrainResult result = train(graph, split, cfg);
  if (method != Method::kUnsupLogreg)
    return evaluate(graph, result.params, split);

  // Unsupervised embeddings scored through a logistic-regression probe.
  Scores s;
  for (std::size_t k = 0; k < graph.num_layers; ++k) {
    if (!graph.has_labels(k)) continue;
    const auto& ls = split.layers[k];
    if (ls.test_idx.empty()) continue;
    const std::vector<int> pred =
        logreg_probe(result.embeddings.z[k], ls.train_idx, graph.labels[k],
                     graph.num_classes[k], ls.test_idx);
    std::vector<int> truth;
    truth.reserve(ls.test_idx.size());
    for (std::uint32_t i : ls.test_idx) truth.push_back(graph.labels[k][i]);
    const Scores layer = f1_scores(pred, truth, graph.num_classes[k]);
    s.per_layer.push_back({k, layer.micro_f1, layer.macro_f1, layer.n_test});
    for (double f : layer.per_class_f1) s.per_class_f1.push_back(f);
    s.micro_f1 += layer.micro_f1 * static_cast<double>(layer.n_test);
    s.n_test += layer.n_test;
  }
  if (s.n_test == 0) throw Error("run_single: empty test set");
  s.micro_f1 /= static_cast<double>(s.n_test);
  double sum = 0.0;
  for (double f : s.per_class_f1) sum += f;
  s.macro_f1 = sum / static_cast<double>(s.per_class_f1.size());
  return s;
}

namespace {

ExperimentReport aggregate(const std::string& tag, double ratio,
                           std::size_t dim,
                           const std::vector<Scores>& scores) {
  ExperimentReport rep;
  rep.method = tag;
  rep.ratio = ratio;
  rep.embedding_dim = dim;
  rep.runs = scores.size();
  const double n = static_cast<double>(scores.size());
  for (const Scores& s : scores) {
    rep.mean_micro += s.micro_f1;
    rep.mean_macro += s.macro_f1;
  }
  rep.mean_micro /= n;
  rep.mean_macro /= n;
  for (const Scores& s : scores) {
    rep.std_micro += (s.micro_f1 - rep.mean_micro) * (s.micro_f1 - rep.mean_micro);
    rep.std_macro += (s.macro_f1 - rep.mean_macro) * (s.macro_f1 - rep.mean_macro);
  }
  rep.std_micro = std::sqrt(rep.std_micro / n);
  rep.std_macro = std::sqrt(rep.std_macro / n);
  return rep;
}

std::vector<Scores> run_batch(const MultiLayerGraph& graph, Method method,
                              double ratio, std::size_t runs,
                              std::uint64_t base_seed,
                              const TrainConfig& base_cfg, std::size_t jobs) {
  std::vector<Scores> scores(runs);
  const std::int64_t n = static_cast<std::int64_t>(runs);
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(jobs > 0 ? jobs : 1)) if (jobs > 1)
  for (std::int64_t t = 0; t < n; ++t) {
    const std::uint64_t split_seed =
        substream(base_seed, "exp-split", static_cast<std::uint64_t>(t))();
    const std::uint64_t train_seed =
        substream(base_seed, "exp-train", static_cast<std::uint64_t>(t))();
    scores[static_cast<std::size_t>(t)] =
        run_single(graph, method, ratio, split_seed, train_seed, base_cfg);
  }
  return scores;
}

}  // namespace

std::vector<ExperimentReport> run_experiment(const MultiLayerGraph& graph,
                                             Method method,
                                             const std::vector<double>& ratios,
                                             std::size_t runs,
                                             std::uint64_t base_seed,
                                             const TrainConfig& base_cfg,
                                             std::size_t jobs) {
  if (runs < 1) throw Error("run_experiment: runs must be >= 1");
  std::vector<ExperimentReport> out;
  for (double ratio : ratios)
    out.push_back(aggregate(
        method_tag(method), ratio, base_cfg.embedding_dim,
        run_batch(graph, method, ratio, runs, base_seed, base_cfg, jobs)));
  return out;
}

std::vector<ExperimentReport> dimension_sweep(
    const MultiLayerGraph& graph, const std::vector<std::size_t>& dims,
    double ratio, std::size_t runs, std::uint64_t base_seed,
    const TrainConfig& base_cfg, std::size_t jobs) {
  if (dims.empty()) throw Error("dimension_sweep: dims must be nonempty");
  std::vector<ExperimentReport> out;
  for (std::size_t f : dims) {
    TrainConfig cfg = base_cfg;
    cfg.embedding_dim = f;
    out.push_back(
        aggregate("mgcn", ratio, f,
                  run_batch(graph, Method::kMgcn, ratio, runs, base_seed, cfg,
                            jobs)));
  }
  return out;
}

}  // namespace mgcn
