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

// Dense kernels for pair tensors.
//
// A pair tensor of shape n x n x d is stored as a row-major (n*n) x d matrix,
// row i*n + j holding the vector of the ordered pair (i, j). A triangular
// tensor T[i, l, j] is stored as an (n*n) x n matrix with T[i, l, j] at
// (i*n + j, l), so the softmax over l runs along matrix rows.
//
// Every kernel computes each output element with a fixed, sequential
// summation order and parallelizes only over independent output rows, so
// results are bit-identical for every thread count.

#ifndef ETWL_TENSOR_HPP_
#define ETWL_TENSOR_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace etwl {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixXd = Matrix<double>;
using Index = Eigen::Index;

/// Thread count used by the pair kernels; 1 disables OpenMP regions.
void set_num_threads(int threads);
int num_threads();

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Node count n of a pair tensor with n*n rows.
inline Index pair_order(Index rows) {
  Index n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(rows))));
  if (n * n != rows) throw ShapeError("pair tensor has " + std::to_string(rows) + " rows, not a square");
  return n;
}

#ifndef NDEBUG
template <class Derived>
void check_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw std::runtime_error(std::string("non-finite values in ") + what);
}
#else
template <class Derived>
void check_finite(const Eigen::MatrixBase<Derived>&, const char*) {}
#endif

// Triangular contractions ------------------------------------------------------

/// out[i, l, j] = sum_c q[(i,l), c] * k[(l,j), c].
template <class DQ, class DK>
Matrix<typename DQ::Scalar> tri_contract_scores(const Eigen::MatrixBase<DQ>& q,
                                                const Eigen::MatrixBase<DK>& k) {
  using S = typename DQ::Scalar;
  if (q.rows() != k.rows() || q.cols() != k.cols()) throw ShapeError("tri_contract_scores: shape mismatch");
  const Index n = pair_order(q.rows());
  const Index d = q.cols();
  Matrix<S> out(n * n, n);
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index ij = 0; ij < n * n; ++ij) {
    const Index i = ij / n, j = ij % n;
    for (Index l = 0; l < n; ++l) {
      S acc = 0;
      for (Index c = 0; c < d; ++c) acc += q(i * n + l, c) * k(l * n + j, c);
      out(ij, l) = acc;
    }
  }
  return out;
}

/// out[(i,j), c] = sum_l a[i, l, j] * (v1[(i,l), c] * v2[(l,j), c]).
///
/// The fused value v1 (.) v2 is formed on the fly and never stored.
template <class DA, class D1, class D2>
Matrix<typename DA::Scalar> tri_contract_values(const Eigen::MatrixBase<DA>& a,
                                                const Eigen::MatrixBase<D1>& v1,
                                                const Eigen::MatrixBase<D2>& v2) {
  using S = typename DA::Scalar;
  const Index n = pair_order(a.rows());
  if (a.cols() != n || v1.rows() != n * n || v2.rows() != n * n || v1.cols() != v2.cols()) {
    throw ShapeError("tri_contract_values: shape mismatch");
  }
  const Index d = v1.cols();
  Matrix<S> out = Matrix<S>::Zero(n * n, d);
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index ij = 0; ij < n * n; ++ij) {
    const Index i = ij / n, j = ij % n;
    for (Index l = 0; l < n; ++l) {
      const S w = a(ij, l);
      for (Index c = 0; c < d; ++c) out(ij, c) += w * (v1(i * n + l, c) * v2(l * n + j, c));
    }
  }
  return out;
}

/// Same contraction over an explicit value tensor v[(i*n + l)*n + j, c].
template <class DA, class DV>
Matrix<typename DA::Scalar> tri_contract_values_dense(const Eigen::MatrixBase<DA>& a,
                                                      const Eigen::MatrixBase<DV>& v) {
  using S = typename DA::Scalar;
  const Index n = pair_order(a.rows());
  if (a.cols() != n || v.rows() != n * n * n) throw ShapeError("tri_contract_values_dense: shape mismatch");
  const Index d = v.cols();
  Matrix<S> out = Matrix<S>::Zero(n * n, d);
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index ij = 0; ij < n * n; ++ij) {
    const Index i = ij / n, j = ij % n;
    for (Index l = 0; l < n; ++l) {
      const S w = a(ij, l);
      for (Index c = 0; c < d; ++c) out(ij, c) += w * v((i * n + l) * n + j, c);
    }
  }
  return out;
}

template <class S>
struct ScoreGrads {
  Matrix<S> dq;
  Matrix<S> dk;
};

/// Adjoint of tri_contract_scores.
template <class DG, class DQ, class DK>
ScoreGrads<typename DG::Scalar> tri_contract_scores_backward(const Eigen::MatrixBase<DG>& grad,
                                                             const Eigen::MatrixBase<DQ>& q,
                                                             const Eigen::MatrixBase<DK>& k) {
  using S = typename DG::Scalar;
  const Index n = pair_order(q.rows());
  const Index d = q.cols();
  ScoreGrads<S> g{Matrix<S>::Zero(n * n, d), Matrix<S>::Zero(n * n, d)};
  // dq[(i,l)] = sum_j grad[i,l,j] k[(l,j)]
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index il = 0; il < n * n; ++il) {
    const Index i = il / n, l = il % n;
    for (Index j = 0; j < n; ++j) {
      const S w = grad(i * n + j, l);
      for (Index c = 0; c < d; ++c) g.dq(il, c) += w * k(l * n + j, c);
    }
  }
  // dk[(l,j)] = sum_i grad[i,l,j] q[(i,l)]
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index lj = 0; lj < n * n; ++lj) {
    const Index l = lj / n, j = lj % n;
    for (Index i = 0; i < n; ++i) {
      const S w = grad(i * n + j, l);
      for (Index c = 0; c < d; ++c) g.dk(lj, c) += w * q(i * n + l, c);
    }
  }
  return g;
}

template <class S>
struct ValueGrads {
  Matrix<S> da;
  Matrix<S> dv1;
  Matrix<S> dv2;
};

/// Adjoint of tri_contract_values.
template <class DG, class DA, class D1, class D2>
ValueGrads<typename DG::Scalar> tri_contract_values_backward(const Eigen::MatrixBase<DG>& grad,
                                                             const Eigen::MatrixBase<DA>& a,
                                                             const Eigen::MatrixBase<D1>& v1,
                                                             const Eigen::MatrixBase<D2>& v2) {
  using S = typename DG::Scalar;
  const Index n = pair_order(a.rows());
  const Index d = v1.cols();
  ValueGrads<S> g{Matrix<S>(n * n, n), Matrix<S>::Zero(n * n, d), Matrix<S>::Zero(n * n, d)};
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index ij = 0; ij < n * n; ++ij) {
    const Index i = ij / n, j = ij % n;
    for (Index l = 0; l < n; ++l) {
      S acc = 0;
      for (Index c = 0; c < d; ++c) acc += grad(ij, c) * v1(i * n + l, c) * v2(l * n + j, c);
      g.da(ij, l) = acc;
    }
  }
  // dv1[(i,l)] = sum_j a[i,l,j] grad[(i,j)] * v2[(l,j)]
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index il = 0; il < n * n; ++il) {
    const Index i = il / n, l = il % n;
    for (Index j = 0; j < n; ++j) {
      const S w = a(i * n + j, l);
      for (Index c = 0; c < d; ++c) g.dv1(il, c) += w * grad(i * n + j, c) * v2(l * n + j, c);
    }
  }
  // dv2[(l,j)] = sum_i a[i,l,j] grad[(i,j)] * v1[(i,l)]
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index lj = 0; lj < n * n; ++lj) {
    const Index l = lj / n, j = lj % n;
    for (Index i = 0; i < n; ++i) {
      const S w = a(i * n + j, l);
      for (Index c = 0; c < d; ++c) g.dv2(lj, c) += w * grad(i * n + j, c) * v1(i * n + l, c);
    }
  }
  return g;
}

// Row-wise primitives -------------------------------------------------------------

/// Softmax along each row, shifted by the row maximum.
template <class Derived>
Matrix<typename Derived::Scalar> softmax_lastdim(const Eigen::MatrixBase<Derived>& x) {
  using S = typename Derived::Scalar;
  if (x.cols() < 1) throw ShapeError("softmax_lastdim: empty last dimension");
  Matrix<S> y(x.rows(), x.cols());
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index r = 0; r < x.rows(); ++r) {
    const S shift = x.row(r).maxCoeff();
    S total = 0;
    for (Index c = 0; c < x.cols(); ++c) {
      y(r, c) = std::exp(x(r, c) - shift);
      total += y(r, c);
    }
    for (Index c = 0; c < x.cols(); ++c) y(r, c) /= total;
  }
  return y;
}

/// dx = y * (dy - <dy, y>) per row.
template <class DY, class DG>
Matrix<typename DY::Scalar> softmax_lastdim_backward(const Eigen::MatrixBase<DY>& y,
                                                     const Eigen::MatrixBase<DG>& grad) {
  using S = typename DY::Scalar;
  Matrix<S> dx(y.rows(), y.cols());
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index r = 0; r < y.rows(); ++r) {
    S dot = 0;
    for (Index c = 0; c < y.cols(); ++c) dot += grad(r, c) * y(r, c);
    for (Index c = 0; c < y.cols(); ++c) dx(r, c) = y(r, c) * (grad(r, c) - dot);
  }
  return dx;
}

template <class S>
struct LayerNormResult {
  Matrix<S> y;
  Matrix<S> normalized;                  // (x - mean) / sqrt(var + eps)
  Eigen::Matrix<S, Eigen::Dynamic, 1> inv_std;
};

/// Per-row normalization with biased variance; eps sits inside the sqrt.
template <class DX, class DG, class DB>
LayerNormResult<typename DX::Scalar> layer_norm(const Eigen::MatrixBase<DX>& x,
                                                const Eigen::MatrixBase<DG>& gamma,
                                                const Eigen::MatrixBase<DB>& beta,
                                                typename DX::Scalar eps) {
  using S = typename DX::Scalar;
  const Index d = x.cols();
  if (d < 1 || gamma.size() != d || beta.size() != d) throw ShapeError("layer_norm: shape mismatch");
  LayerNormResult<S> r{Matrix<S>(x.rows(), d), Matrix<S>(x.rows(), d),
                       Eigen::Matrix<S, Eigen::Dynamic, 1>(x.rows())};
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index i = 0; i < x.rows(); ++i) {
    const S mean = x.row(i).sum() / static_cast<S>(d);
    S var = 0;
    for (Index c = 0; c < d; ++c) var += (x(i, c) - mean) * (x(i, c) - mean);
    var /= static_cast<S>(d);
    const S inv = S(1) / std::sqrt(var + eps);
    r.inv_std(i) = inv;
    for (Index c = 0; c < d; ++c) {
      r.normalized(i, c) = (x(i, c) - mean) * inv;
      r.y(i, c) = r.normalized(i, c) * gamma(c) + beta(c);
    }
  }
  return r;
}

template <class S>
struct LayerNormGrads {
  Matrix<S> dx;
  Matrix<S> dgamma;  // 1 x d
  Matrix<S> dbeta;   // 1 x d
};

template <class DG, class S = typename DG::Scalar, class DGamma>
LayerNormGrads<S> layer_norm_backward(const Eigen::MatrixBase<DG>& grad, const LayerNormResult<S>& fwd,
                                      const Eigen::MatrixBase<DGamma>& gamma) {
  const Index rows = grad.rows(), d = grad.cols();
  LayerNormGrads<S> g{Matrix<S>(rows, d), Matrix<S>::Zero(1, d), Matrix<S>::Zero(1, d)};
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < d; ++c) {
      g.dgamma(0, c) += grad(i, c) * fwd.normalized(i, c);
      g.dbeta(0, c) += grad(i, c);
    }
  }
#pragma omp parallel for schedule(static) num_threads(num_threads()) if (num_threads() > 1)
  for (Index i = 0; i < rows; ++i) {
    S mean_g = 0, mean_gx = 0;
    for (Index c = 0; c < d; ++c) {
      const S gh = grad(i, c) * gamma(c);
      mean_g += gh;
      mean_gx += gh * fwd.normalized(i, c);
    }
    mean_g /= static_cast<S>(d);
    mean_gx /= static_cast<S>(d);
    for (Index c = 0; c < d; ++c) {
      const S gh = grad(i, c) * gamma(c);
      g.dx(i, c) = fwd.inv_std(i) * (gh - mean_g - fwd.normalized(i, c) * mean_gx);
    }
  }
  return g;
}

// Activations ---------------------------------------------------------------------

enum class Activation { kGelu, kRelu };

/// GELU, tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
template <class S>
S gelu(S x) {
  const S c = std::sqrt(S(2) / std::numbers::pi_v<S>);
  return S(0.5) * x * (S(1) + std::tanh(c * (x + S(0.044715) * x * x * x)));
}

template <class S>
S gelu_derivative(S x) {
  const S c = std::sqrt(S(2) / std::numbers::pi_v<S>);
  const S u = c * (x + S(0.044715) * x * x * x);
  const S t = std::tanh(u);
  const S du = c * (S(1) + S(3) * S(0.044715) * x * x);
  return S(0.5) * (S(1) + t) + S(0.5) * x * (S(1) - t * t) * du;
}

template <class Derived>
Matrix<typename Derived::Scalar> activate(const Eigen::MatrixBase<Derived>& x, Activation act) {
  using S = typename Derived::Scalar;
  if (act == Activation::kRelu) return x.cwiseMax(S(0));
  return x.unaryExpr([](S v) { return gelu(v); });
}

/// grad * act'(x).
template <class DX, class DG>
Matrix<typename DX::Scalar> activate_backward(const Eigen::MatrixBase<DX>& x,
                                              const Eigen::MatrixBase<DG>& grad, Activation act) {
  using S = typename DX::Scalar;
  if (act == Activation::kRelu) {
    return grad.cwiseProduct(x.unaryExpr([](S v) { return v > S(0) ? S(1) : S(0); }));
  }
  return grad.cwiseProduct(x.unaryExpr([](S v) { return gelu_derivative(v); }));
}

}  // namespace etwl

#endif  // ETWL_TENSOR_HPP_
