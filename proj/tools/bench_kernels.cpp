// Compares the OpenMP kernels against the serial reference versions on
// sizes typical for the synthetic experiments.

#include <chrono>
#include <cstdio>
#include <random>

#include "mgcn/graph.hpp"
#include "mgcn/kernels.hpp"
#include "mgcn/model.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace mgcn;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

DenseMatrix random_dense(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

template <typename F>
double time_best_of(std::size_t reps, F&& fn) {
  double best = 1e300;
  for (std::size_t r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    fn();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel == serial\n");
#endif

  std::mt19937_64 rng(42);
  const std::size_t n = 1024, f = 64;
  const DenseMatrix a = random_dense(n, n, rng);
  const DenseMatrix b = random_dense(n, f, rng);

  SyntheticSpec spec;
  spec.num_layers = 1;
  spec.layer_sizes = {n};
  spec.num_communities = 8;
  spec.p_in = 0.05;
  spec.p_out = 0.005;
  spec.seed = 7;
  const MultiLayerGraph g = generate_synthetic(spec);
  const CsrMatrix s = normalize_adjacency(g.relations.at({0, 0}));

  const double t_mm_omp = time_best_of(3, [&] { matmul(a, b); });
  const double t_mm_ref = time_best_of(3, [&] { ref::matmul(a, b); });
  std::printf("matmul   %zux%zu * %zux%zu : omp %.4fs  serial %.4fs  speedup %.2fx\n",
              n, n, n, f, t_mm_omp, t_mm_ref, t_mm_ref / t_mm_omp);

  const double t_sp_omp = time_best_of(3, [&] { spmm(s, b); });
  const double t_sp_ref = time_best_of(3, [&] { ref::spmm(s, b); });
  std::printf("spmm     nnz=%zu cols=%zu      : omp %.4fs  serial %.4fs  speedup %.2fx\n",
              s.nnz(), f, t_sp_omp, t_sp_ref, t_sp_ref / t_sp_omp);

  const DenseMatrix z = random_dense(n, f, rng);
  const DenseMatrix logits = matmul_nt(z, z);
  const double t_ll = time_best_of(
      3, [&] { link_loss_pair(g.relations.at({0, 0}), logits); });
  std::printf("link loss %zux%zu pair        : %.4fs per evaluation\n", n, n,
              t_ll);

  // Cross-check once so the benchmark doubles as a smoke test.
  const DenseMatrix c1 = matmul(a, b);
  const DenseMatrix c2 = ref::matmul(a, b);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < c1.size(); ++i)
    max_diff = std::max(max_diff, std::abs(c1.data()[i] - c2.data()[i]));
  std::printf("matmul omp-vs-serial max abs diff: %.3g\n", max_diff);
  return 0;
}
