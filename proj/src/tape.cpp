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

#include "etwl/tape.hpp"

#include <atomic>
#include <cstdlib>

namespace etwl {

namespace {

int default_threads() {
  if (const char* env = std::getenv("ETWL_NUM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::atomic<int> g_threads{default_threads()};

}  // namespace

void set_num_threads(int threads) { g_threads = threads < 1 ? 1 : threads; }
int num_threads() { return g_threads.load(std::memory_order_relaxed); }

// Tape ---------------------------------------------------------------------------

Var Tape::constant(MatrixXd value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, {}, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::parameter(std::string name, MatrixXd value) {
  nodes_.push_back(Node{std::move(value), {}, false, record_, std::move(name), {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::push(MatrixXd value, std::span<const Var> inputs, BackwardFn fn) {
  check_finite(value, "tape op output");
  bool needs = false;
  for (Var v : inputs) needs = needs || requires_grad(v);
  Node node{std::move(value), {}, false, needs && record_, {}, {}};
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::push(MatrixXd value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
}

void Tape::accumulate(Var v, const MatrixXd& delta) {
  Node& node = nodes_.at(static_cast<std::size_t>(v.id));
  if (!node.requires_grad) return;
  if (delta.rows() != node.value.rows() || delta.cols() != node.value.cols()) {
    throw ShapeError("gradient shape mismatch at node " + std::to_string(v.id));
  }
  if (node.has_grad) {
    node.grad += delta;
  } else {
    node.grad = delta;
    node.has_grad = true;
  }
}

Gradients Tape::backward(Var output, const MatrixXd& seed) {
  if (nodes_.empty()) throw std::logic_error("backward: tape is empty");
  if (!record_) throw std::logic_error("backward: tape was built without recording");
  const Node& out = nodes_.at(static_cast<std::size_t>(output.id));
  if (seed.rows() != out.value.rows() || seed.cols() != out.value.cols()) {
    throw ShapeError("backward: seed shape does not match the output");
  }
  for (auto& node : nodes_) {
    node.has_grad = false;
    node.grad.resize(0, 0);
  }
  accumulate(output, seed);
  for (int id = output.id; id >= 0; --id) {
    Node& node = nodes_[static_cast<std::size_t>(id)];
    if (!node.has_grad || !node.backward) continue;
    const MatrixXd grad = node.grad;
    node.backward(*this, grad);
  }
  Gradients grads;
  for (const auto& node : nodes_) {
    if (node.name.empty()) continue;
    grads[node.name] = node.has_grad ? node.grad : MatrixXd::Zero(node.value.rows(), node.value.cols());
  }
  return grads;
}

Gradients Tape::backward(Var output) { return backward(output, MatrixXd::Ones(1, 1)); }

// Ops -----------------------------------------------------------------------------

Var matmul(Tape& t, Var a, Var b) {
  const MatrixXd& av = t.value(a);
  const MatrixXd& bv = t.value(b);
  if (av.cols() != bv.rows()) throw ShapeError("matmul: inner dimensions differ");
  return t.push(av * bv, {a, b}, [a, b](Tape& t, const MatrixXd& g) {
    t.accumulate(a, g * t.value(b).transpose());
    t.accumulate(b, t.value(a).transpose() * g);
  });
}

Var add(Tape& t, Var a, Var b) {
  const MatrixXd& av = t.value(a);
  const MatrixXd& bv = t.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw ShapeError("add: shape mismatch");
  return t.push(av + bv, {a, b}, [a, b](Tape& t, const MatrixXd& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var add_row(Tape& t, Var x, Var bias) {
  const MatrixXd& xv = t.value(x);
  const MatrixXd& bv = t.value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw ShapeError("add_row: bias must be 1 x cols");
  MatrixXd out = xv.rowwise() + bv.row(0);
  return t.push(std::move(out), {x, bias}, [x, bias](Tape& t, const MatrixXd& g) {
    t.accumulate(x, g);
    t.accumulate(bias, g.colwise().sum());
  });
}

Var scale(Tape& t, Var x, double s) {
  return t.push(t.value(x) * s, {x}, [x, s](Tape& t, const MatrixXd& g) { t.accumulate(x, g * s); });
}

Var hadamard(Tape& t, Var a, Var b) {
  const MatrixXd& av = t.value(a);
  const MatrixXd& bv = t.value(b);
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw ShapeError("hadamard: shape mismatch");
  return t.push(av.cwiseProduct(bv), {a, b}, [a, b](Tape& t, const MatrixXd& g) {
    t.accumulate(a, g.cwiseProduct(t.value(b)));
    t.accumulate(b, g.cwiseProduct(t.value(a)));
  });
}

Var concat_cols(Tape& t, std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Index rows = t.value(parts[0]).rows();
  Index cols = 0;
  for (Var p : parts) {
    if (t.value(p).rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += t.value(p).cols();
  }
  MatrixXd out(rows, cols);
  Index off = 0;
  for (Var p : parts) {
    out.middleCols(off, t.value(p).cols()) = t.value(p);
    off += t.value(p).cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.push(std::move(out), parts, [inputs](Tape& t, const MatrixXd& g) {
    Index off = 0;
    for (Var p : inputs) {
      const Index c = t.value(p).cols();
      if (t.requires_grad(p)) t.accumulate(p, g.middleCols(off, c));
      off += c;
    }
  });
}

Var slice_cols(Tape& t, Var x, Index start, Index count) {
  const MatrixXd& xv = t.value(x);
  if (start < 0 || count < 0 || start + count > xv.cols()) throw ShapeError("slice_cols: out of range");
  return t.push(xv.middleCols(start, count), {x}, [x, start, count](Tape& t, const MatrixXd& g) {
    MatrixXd full = MatrixXd::Zero(t.value(x).rows(), t.value(x).cols());
    full.middleCols(start, count) = g;
    t.accumulate(x, full);
  });
}

Var gather_rows(Tape& t, Var x, std::vector<Index> rows) {
  const MatrixXd& xv = t.value(x);
  MatrixXd out(static_cast<Index>(rows.size()), xv.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= xv.rows()) throw ShapeError("gather_rows: index out of range");
    out.row(static_cast<Index>(r)) = xv.row(rows[r]);
  }
  return t.push(std::move(out), {x}, [x, rows = std::move(rows)](Tape& t, const MatrixXd& g) {
    MatrixXd full = MatrixXd::Zero(t.value(x).rows(), t.value(x).cols());
    for (std::size_t r = 0; r < rows.size(); ++r) full.row(rows[r]) += g.row(static_cast<Index>(r));
    t.accumulate(x, full);
  });
}

Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps) {
  auto fwd = layer_norm(t.value(x), t.value(gamma).row(0), t.value(beta).row(0), eps);
  MatrixXd y = fwd.y;
  fwd.y.resize(0, 0);
  return t.push(std::move(y), {x, gamma, beta},
                [x, gamma, beta, fwd = std::move(fwd)](Tape& t, const MatrixXd& g) {
                  auto grads = layer_norm_backward(g, fwd, t.value(gamma).row(0));
                  t.accumulate(x, grads.dx);
                  t.accumulate(gamma, grads.dgamma);
                  t.accumulate(beta, grads.dbeta);
                });
}

Var activate(Tape& t, Var x, Activation act) {
  return t.push(activate(t.value(x), act), {x}, [x, act](Tape& t, const MatrixXd& g) {
    t.accumulate(x, activate_backward(t.value(x), g, act));
  });
}

Var softmax_lastdim(Tape& t, Var x) {
  MatrixXd y = softmax_lastdim(t.value(x));
  const int self = static_cast<int>(t.size());
  return t.push(std::move(y), {x}, [x, self](Tape& t, const MatrixXd& g) {
    t.accumulate(x, softmax_lastdim_backward(t.value(Var{self}), g));
  });
}

Var tri_contract_scores(Tape& t, Var q, Var k) {
  return t.push(tri_contract_scores(t.value(q), t.value(k)), {q, k}, [q, k](Tape& t, const MatrixXd& g) {
    auto grads = tri_contract_scores_backward(g, t.value(q), t.value(k));
    t.accumulate(q, grads.dq);
    t.accumulate(k, grads.dk);
  });
}

Var tri_contract_values(Tape& t, Var a, Var v1, Var v2) {
  return t.push(tri_contract_values(t.value(a), t.value(v1), t.value(v2)), {a, v1, v2},
                [a, v1, v2](Tape& t, const MatrixXd& g) {
                  auto grads = tri_contract_values_backward(g, t.value(a), t.value(v1), t.value(v2));
                  t.accumulate(a, grads.da);
                  t.accumulate(v1, grads.dv1);
                  t.accumulate(v2, grads.dv2);
                });
}

Var sum_over_second(Tape& t, Var x) {
  const MatrixXd& xv = t.value(x);
  const Index n = pair_order(xv.rows());
  MatrixXd out = MatrixXd::Zero(n, xv.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out.row(i) += xv.row(i * n + j);
  return t.push(std::move(out), {x}, [x, n](Tape& t, const MatrixXd& g) {
    MatrixXd full(n * n, g.cols());
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) full.row(i * n + j) = g.row(i);
    t.accumulate(x, full);
  });
}

Var sum_over_first(Tape& t, Var x) {
  const MatrixXd& xv = t.value(x);
  const Index n = pair_order(xv.rows());
  MatrixXd out = MatrixXd::Zero(n, xv.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out.row(j) += xv.row(i * n + j);
  return t.push(std::move(out), {x}, [x, n](Tape& t, const MatrixXd& g) {
    MatrixXd full(n * n, g.cols());
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) full.row(i * n + j) = g.row(j);
    t.accumulate(x, full);
  });
}

Var sum_rows(Tape& t, Var x) {
  return t.push(t.value(x).colwise().sum(), {x}, [x](Tape& t, const MatrixXd& g) {
    t.accumulate(x, g.replicate(t.value(x).rows(), 1));
  });
}

Var sum_all(Tape& t, Var x) {
  MatrixXd out(1, 1);
  out(0, 0) = t.value(x).sum();
  return t.push(std::move(out), {x}, [x](Tape& t, const MatrixXd& g) {
    t.accumulate(x, MatrixXd::Constant(t.value(x).rows(), t.value(x).cols(), g(0, 0)));
  });
}

}  // namespace etwl
