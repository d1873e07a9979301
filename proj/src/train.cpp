#include "mgcn/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "mgcn/rng.hpp"

namespace mgcn {

Optimizer parse_optimizer(const std::string& name) {
  if (name == "plain-gd") return Optimizer::kPlainGd;
  if (name == "adam") return Optimizer::kAdam;
  throw Error("unknown optimizer '" + name + "' (expected plain-gd|adam)");
}

std::string optimizer_name(Optimizer opt) {
  return opt == Optimizer::kPlainGd ? "plain-gd" : "adam";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("train config: epochs must be >= 1");
  if (!(learning_rate > 0.0))
    throw Error("train config: learning_rate must be positive");
  if (embedding_dim < 1)
    throw Error("train config: embedding_dim must be >= 1");
  if (lambda < 0.0) throw Error("train config: lambda must be >= 0");
  if (encoder_depth < 1)
    throw Error("train config: encoder_depth must be >= 1");
}

void optimizer_step(ModelParams& params, const ModelParams& grads,
                    OptimizerState& state, const TrainConfig& cfg) {
  std::vector<double> p = params.pack();
  const std::vector<double> g = grads.pack();
  if (p.size() != g.size())
    throw Error("optimizer_step: parameter/gradient shape mismatch");
  for (double x : g)
    if (!std::isfinite(x)) throw Error("optimizer_step: non-finite gradient");

  if (cfg.optimizer == Optimizer::kPlainGd) {
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] -= cfg.learning_rate * g[i];
  } else {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    if (state.m.empty()) {
      state.m.assign(p.size(), 0.0);
      state.v.assign(p.size(), 0.0);
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < p.size(); ++i) {
      state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g[i];
      state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = state.m[i] / bc1;
      const double vhat = state.v[i] / bc2;
      p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + eps);
    }
  }
  params.unpack(p);
}

namespace {

std::uint64_t digest(const std::vector<double>& flat) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double d : flat) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof d);
    std::memcpy(&bits, &d, sizeof bits);
    for (int b = 0; b < 64; b += 8) {
      h ^= (bits >> b) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

TrainResult train(const MultiLayerGraph& graph, const LabelSplit& split,
                  const TrainConfig& cfg) {
  cfg.validate();
  const Workspace ws = make_workspace(graph);

  TrainResult res;
  res.params =
      init_params(graph, cfg.embedding_dim, cfg.seed, cfg.encoder_depth);
  OptimizerState state;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    PassResult pass = forward_backward(graph, ws, res.params, split,
                                       cfg.lambda, cfg.use_between_edges);
    if (!std::isfinite(pass.loss.total))
      throw DivergenceError(
          epoch, "non-finite loss at epoch " + std::to_string(epoch) +
                     " (link=" + std::to_string(pass.loss.link_loss) +
                     ", label=" + std::to_string(pass.loss.label_loss) + ")");
    optimizer_step(res.params, pass.grads, state, cfg);

    EpochRecord rec;
    rec.loss = pass.loss;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.history.epochs.push_back(rec);
    if (cfg.log_every && epoch % cfg.log_every == 0)
      std::fprintf(stderr, "epoch %zu  link %.6g  label %.6g  total %.6g\n",
                   epoch, pass.loss.link_loss, pass.loss.label_loss,
                   pass.loss.total);
  }
  // Embeddings correspond to the parameters before the last step; redo the
  // forward pass so outputs match the returned parameters.
  res.embeddings = encode(ws, res.params);
  res.history.params_digest = digest(res.params.pack());
  return res;
}

}  // namespace mgcn
