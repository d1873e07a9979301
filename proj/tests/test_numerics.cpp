#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mgcn/kernels.hpp"
#include "mgcn/numerics.hpp"
#include "oracles.hpp"

using namespace mgcn;

namespace {

CsrMatrix csr_from_dense(const DenseMatrix& d) {
  CsrMatrix s;
  s.rows = d.rows();
  s.cols = d.cols();
  s.row_ptr.push_back(0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0.0) {
        s.col_idx.push_back(static_cast<std::uint32_t>(j));
        s.values.push_back(d(i, j));
      }
    s.row_ptr.push_back(s.col_idx.size());
  }
  return s;
}

}  // namespace

TEST_CASE("spmm identity and zero") {
  std::mt19937_64 rng(1);
  const DenseMatrix x = oracle::random_dense(5, 3, rng);
  CHECK(spmm(CsrMatrix::identity(5), x) == x);

  CsrMatrix zero;
  zero.rows = zero.cols = 5;
  zero.row_ptr.assign(6, 0);
  const DenseMatrix y = spmm(zero, x);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.data()[i] == 0.0);
}

TEST_CASE("spmm weighted 2x2 hand product") {
  DenseMatrix sd(2, 2);
  sd(0, 1) = 0.5;
  sd(1, 0) = 0.5;
  const DenseMatrix y = spmm(csr_from_dense(sd), DenseMatrix::identity(2));
  CHECK(y(0, 0) == 0.0);
  CHECK(y(0, 1) == 0.5);
  CHECK(y(1, 0) == 0.5);
  CHECK(y(1, 1) == 0.0);
}

TEST_CASE("spmm agrees with naive dense product on random 8x8") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    DenseMatrix sd = oracle::random_dense(8, 8, rng);
    // sparsify roughly half the entries
    for (std::size_t i = 0; i < sd.size(); ++i)
      if ((rng() & 1u) == 0) sd.data()[i] = 0.0;
    const DenseMatrix x = oracle::random_dense(8, 8, rng);
    const DenseMatrix got = spmm(csr_from_dense(sd), x);
    const DenseMatrix want = ref::matmul(sd, x);
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("parallel matmul matches serial reference") {
  std::mt19937_64 rng(11);
  const DenseMatrix a = oracle::random_dense(17, 9, rng);
  const DenseMatrix b = oracle::random_dense(9, 13, rng);
  const DenseMatrix got = matmul(a, b);
  const DenseMatrix want = ref::matmul(a, b);
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-12));
}

TEST_CASE("sigmoid values and stability") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786).epsilon(1e-10));
  const double tiny = sigmoid(-1000.0);
  CHECK(tiny > 0.0);
  CHECK(tiny <= 1e-300);
  CHECK(std::isfinite(tiny));
}

TEST_CASE("sigmoid(x) + sigmoid(-x) == 1") {
  std::mt19937_64 rng(3);
  const DenseMatrix x = oracle::random_dense(6, 6, rng, 1e3);
  const DenseMatrix a = elementwise_sigmoid(x);
  DenseMatrix neg = x;
  neg.scale(-1.0);
  const DenseMatrix b = elementwise_sigmoid(neg);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(a.data()[i] + b.data()[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("row_softmax basics") {
  DenseMatrix x(3, 2);
  x(1, 0) = std::log(1.0);
  x(1, 1) = std::log(3.0);
  x(2, 0) = 1000.0;
  const DenseMatrix y = row_softmax(x);
  CHECK(y(0, 0) == doctest::Approx(0.5));
  CHECK(y(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(y(1, 1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(y(2, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(y(2, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("row_softmax rows sum to one at extreme magnitudes") {
  std::mt19937_64 rng(5);
  const DenseMatrix x = oracle::random_dense(10, 7, rng, 1e3);
  const DenseMatrix y = row_softmax(x);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < y.cols(); ++j) {
      CHECK(y(i, j) >= 0.0);
      sum += y(i, j);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("finite differences on known functions") {
  auto quad = [](const std::vector<double>& p) {
    double s = 0.0;
    for (double v : p) s += v * v;
    return s;
  };
  const auto g = finite_diff_grad(quad, {1.0, 2.0});
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-8));

  auto sig = [](const std::vector<double>& p) { return sigmoid(p[0]); };
  CHECK(finite_diff_grad(sig, {0.0})[0] ==
        doctest::Approx(0.25).epsilon(1e-8));

  auto constant = [](const std::vector<double>&) { return 3.5; };
  CHECK(finite_diff_grad(constant, {1.0, 2.0, 3.0}) ==
        std::vector<double>{0.0, 0.0, 0.0});

  CHECK_THROWS_AS(finite_diff_grad(quad, {1.0}, 0.0), Error);
}
