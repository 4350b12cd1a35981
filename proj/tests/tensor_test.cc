// Copyright 2026 The etwl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "etwl/tensor.hpp"

namespace etwl {
namespace {

MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

// Reference loops written against the index formulas, same summation order.
MatrixXd naive_scores(const MatrixXd& q, const MatrixXd& k, Index n) {
  MatrixXd out(n * n, n);
  for (Index i = 0; i < n; ++i)
    for (Index l = 0; l < n; ++l)
      for (Index j = 0; j < n; ++j) {
        double s = 0;
        for (Index c = 0; c < q.cols(); ++c) s += q(i * n + l, c) * k(l * n + j, c);
        out(i * n + j, l) = s;
      }
  return out;
}

MatrixXd naive_values(const MatrixXd& a, const MatrixXd& v, Index n) {
  MatrixXd out = MatrixXd::Zero(n * n, v.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < n; ++l)
        for (Index c = 0; c < v.cols(); ++c) out(i * n + j, c) += a(i * n + j, l) * v((i * n + l) * n + j, c);
  return out;
}

MatrixXd fuse(const MatrixXd& v1, const MatrixXd& v2, Index n) {
  MatrixXd v(n * n * n, v1.cols());
  for (Index i = 0; i < n; ++i)
    for (Index l = 0; l < n; ++l)
      for (Index j = 0; j < n; ++j) v.row((i * n + l) * n + j) = v1.row(i * n + l).cwiseProduct(v2.row(l * n + j));
  return v;
}

class ThreadGuard {
 public:
  explicit ThreadGuard(int t) : saved_(num_threads()) { set_num_threads(t); }
  ~ThreadGuard() { set_num_threads(saved_); }

 private:
  int saved_;
};

TEST(TriScores, SinglePair) {
  MatrixXd q(1, 3), k(1, 3);
  q << 1, 2, 3;
  k << 4, 5, 6;
  EXPECT_EQ(tri_contract_scores(q, k)(0, 0), 32.0);
}

TEST(TriScores, AllOnes) {
  const MatrixXd ones = MatrixXd::Ones(9, 4);
  EXPECT_TRUE((tri_contract_scores(ones, ones).array() == 4.0).all());
}

TEST(TriScores, MatchesNaiveLoop) {
  std::mt19937_64 rng(1);
  const MatrixXd q = random_matrix(9, 2, rng), k = random_matrix(9, 2, rng);
  EXPECT_EQ(tri_contract_scores(q, k), naive_scores(q, k, 3));
}

TEST(TriScores, ShapeErrors) {
  EXPECT_THROW(tri_contract_scores(MatrixXd::Ones(9, 2), MatrixXd::Ones(9, 3)), ShapeError);
  EXPECT_THROW(tri_contract_scores(MatrixXd::Ones(8, 2), MatrixXd::Ones(8, 2)), ShapeError);
}

TEST(TriValues, UniformWeightsOverConstant) {
  const Index n = 4;
  const MatrixXd a = MatrixXd::Constant(n * n, n, 1.0 / n);
  const MatrixXd out = tri_contract_values_dense(a, MatrixXd::Constant(n * n * n, 3, 2.5));
  EXPECT_LT((out.array() - 2.5).abs().maxCoeff(), 1e-15);
}

TEST(TriValues, SinglePair) {
  MatrixXd a(1, 1), v1(1, 2), v2(1, 2);
  a << 0.5;
  v1 << 2, 3;
  v2 << 5, 7;
  const MatrixXd out = tri_contract_values(a, v1, v2);
  EXPECT_EQ(out(0, 0), 5.0);
  EXPECT_EQ(out(0, 1), 10.5);
}

TEST(TriValues, FusedMatchesDenseAndNaive) {
  std::mt19937_64 rng(2);
  const Index n = 3;
  const MatrixXd a = random_matrix(n * n, n, rng);
  const MatrixXd v1 = random_matrix(n * n, 2, rng), v2 = random_matrix(n * n, 2, rng);
  const MatrixXd v = fuse(v1, v2, n);
  EXPECT_EQ(tri_contract_values_dense(a, v), naive_values(a, v, n));
  EXPECT_EQ(tri_contract_values(a, v1, v2), naive_values(a, v, n));
}

TEST(TriValues, IdentityFusionOfOnes) {
  const Index n = 3;
  const MatrixXd ones = MatrixXd::Ones(n * n, 4);
  EXPECT_TRUE((fuse(ones, ones, n).array() == 1.0).all());
}

TEST(Kernels, ThreadCountDoesNotChangeResults) {
  std::mt19937_64 rng(3);
  const Index n = 7;
  const MatrixXd q = random_matrix(n * n, 5, rng), k = random_matrix(n * n, 5, rng);
  const MatrixXd a = random_matrix(n * n, n, rng);
  const MatrixXd serial_s = tri_contract_scores(q, k);
  const MatrixXd serial_v = tri_contract_values(a, q, k);
  ThreadGuard guard(4);
  EXPECT_EQ(tri_contract_scores(q, k), serial_s);
  EXPECT_EQ(tri_contract_values(a, q, k), serial_v);
}

TEST(Softmax, Symmetric) {
  MatrixXd x(1, 2);
  x << 0, 0;
  const MatrixXd y = softmax_lastdim(x);
  EXPECT_EQ(y(0, 0), 0.5);
  EXPECT_EQ(y(0, 1), 0.5);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  MatrixXd x(1, 2);
  x << 1000, 0;
  const MatrixXd y = softmax_lastdim(x);
  EXPECT_TRUE(y.allFinite());
  EXPECT_NEAR(y(0, 0), 1.0, 1e-15);
  EXPECT_GE(y(0, 1), 0.0);
}

TEST(Softmax, ShiftInvariantRowsSumToOne) {
  std::mt19937_64 rng(4);
  const MatrixXd x = random_matrix(20, 6, rng) * 10;
  const MatrixXd y = softmax_lastdim(x);
  const MatrixXd z = softmax_lastdim((x.array() + 3.75).matrix());
  EXPECT_LT((y - z).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE((y.array() > 0).all());
  EXPECT_LT((y.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(LayerNorm, ConstantRowGivesZeros) {
  const MatrixXd x = MatrixXd::Constant(2, 4, 3.0);
  const auto r = layer_norm(x, MatrixXd::Ones(1, 4), MatrixXd::Zero(1, 4), 1e-5);
  EXPECT_TRUE(r.y.allFinite());
  EXPECT_EQ(r.y.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LayerNorm, AlreadyNormalized) {
  MatrixXd x(1, 2);
  x << 1, -1;
  const auto r = layer_norm(x, MatrixXd::Ones(1, 2), MatrixXd::Zero(1, 2), 1e-14);
  EXPECT_NEAR(r.y(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r.y(0, 1), -1.0, 1e-12);
}

TEST(LayerNorm, MeanEqualsBeta) {
  std::mt19937_64 rng(5);
  const MatrixXd x = random_matrix(10, 6, rng);
  const MatrixXd beta = MatrixXd::Constant(1, 6, 0.3);
  const auto r = layer_norm(x, MatrixXd::Ones(1, 6), beta, 1e-5);
  EXPECT_LT((r.y.rowwise().mean().array() - 0.3).abs().maxCoeff(), 1e-10);
}

TEST(Activation, GeluReferenceValues) {
  EXPECT_EQ(gelu(0.0), 0.0);
  // tanh approximation at x = 1: 0.5 (1 + tanh(sqrt(2/pi) * 1.044715)).
  EXPECT_NEAR(gelu(1.0), 0.8411919906082768, 1e-15);
  EXPECT_NEAR(gelu(-3.0), -0.0036373920817729, 1e-15);
}

TEST(Activation, GeluDerivativeMatchesDifference) {
  for (double x : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
    const double h = 1e-6;
    EXPECT_NEAR(gelu_derivative(x), (gelu(x + h) - gelu(x - h)) / (2 * h), 1e-9);
  }
}

TEST(Activation, Relu) {
  MatrixXd x(1, 3);
  x << -1, 0, 2;
  const MatrixXd y = activate(x, Activation::kRelu);
  EXPECT_EQ(y(0, 0), 0.0);
  EXPECT_EQ(y(0, 2), 2.0);
}

}  // namespace
}  // namespace etwl
