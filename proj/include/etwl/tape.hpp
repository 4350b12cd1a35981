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

#ifndef ETWL_TAPE_HPP_
#define ETWL_TAPE_HPP_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "etwl/tensor.hpp"

namespace etwl {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

using Gradients = std::map<std::string, MatrixXd>;

/// Reverse-mode recorder over float64 matrices.
///
/// Nodes are appended in evaluation order, which is a topological order, so
/// backward() replays them last to first. Gradients accumulate additively
/// when a value feeds several consumers. A tape built with record = false
/// evaluates values only and cannot run backward().
class Tape {
 public:
  /// Receives the gradient of the node's output and pushes contributions to
  /// its inputs through Tape::accumulate.
  using BackwardFn = std::function<void(Tape&, const MatrixXd& out_grad)>;

  explicit Tape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  Var constant(MatrixXd value);
  /// A leaf whose gradient is reported under `name` by backward().
  Var parameter(std::string name, MatrixXd value);

  /// Appends an op output. `fn` is dropped when no input needs a gradient or
  /// the tape is not recording.
  Var push(MatrixXd value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var push(MatrixXd value, std::span<const Var> inputs, BackwardFn fn);

  const MatrixXd& value(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).value; }
  bool requires_grad(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)).requires_grad; }

  void accumulate(Var v, const MatrixXd& delta);

  /// Seeds d(output) = seed and replays the tape; returns parameter grads.
  /// Parameters unreachable from the output get zero gradients.
  Gradients backward(Var output, const MatrixXd& seed);
  /// Scalar outputs: seed = 1.
  Gradients backward(Var output);

 private:
  struct Node {
    MatrixXd value;
    MatrixXd grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::string name;  // non-empty for parameters
    BackwardFn backward;
  };

  bool record_;
  std::vector<Node> nodes_;
};

// Differentiable ops --------------------------------------------------------------

Var matmul(Tape& t, Var a, Var b);
Var add(Tape& t, Var a, Var b);
/// x + broadcast(bias), bias is 1 x cols.
Var add_row(Tape& t, Var x, Var bias);
Var scale(Tape& t, Var x, double s);
Var hadamard(Tape& t, Var a, Var b);
Var concat_cols(Tape& t, std::span<const Var> parts);
Var slice_cols(Tape& t, Var x, Index start, Index count);
Var gather_rows(Tape& t, Var x, std::vector<Index> rows);
Var layer_norm(Tape& t, Var x, Var gamma, Var beta, double eps);
Var activate(Tape& t, Var x, Activation act);
Var softmax_lastdim(Tape& t, Var x);
Var tri_contract_scores(Tape& t, Var q, Var k);
Var tri_contract_values(Tape& t, Var a, Var v1, Var v2);
/// Pair tensor (n*n) x d -> n x d with out[i] = sum_j x[(i,j)].
Var sum_over_second(Tape& t, Var x);
/// Pair tensor (n*n) x d -> n x d with out[j] = sum_i x[(i,j)].
Var sum_over_first(Tape& t, Var x);
/// Column sums, 1 x cols.
Var sum_rows(Tape& t, Var x);
/// Sum of all entries, 1 x 1.
Var sum_all(Tape& t, Var x);

}  // namespace etwl

#endif  // ETWL_TAPE_HPP_
