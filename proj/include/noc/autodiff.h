// Copyright 2026 The NOC Authors.
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

#ifndef NOC_AUTODIFF_H_
#define NOC_AUTODIFF_H_

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "noc/tensor.h"

namespace noc {

// Lower bound applied to log() arguments. Keeps log(1 - p) finite when a
// softmax probability saturates at 1.
inline constexpr double kLogEpsilon = 1e-12;

// A trainable array. Models own these through shared pointers so that two
// computation paths (e.g. the input lookup and the output projection) can
// reference the same storage.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  void ZeroGrad() { grad = Tensor::ZerosLike(value); }
};

using ParameterPtr = std::shared_ptr<Parameter>;

ParameterPtr MakeParameter(std::string name, Tensor value,
                           bool trainable = true);

using NodeId = std::size_t;

enum class OpKind {
  kConstant,
  kParameter,
  kMatMul,
  kMatVec,
  kAdd,
  kSub,
  kMul,
  kAddN,
  kScale,
  kAffine,
  kSigmoid,
  kTanh,
  kRelu,
  kLog,
  kClamp,
  kSoftmax,
  kNegLogSoftmax,
  kSum,
  kDot,
  kSlice,
  kRow,
};

const char* OpName(OpKind op);

class Graph;

// Handle to a node in a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;
  Var(Graph* graph, NodeId id) : graph_(graph), id_(id) {}

  Graph* graph() const { return graph_; }
  NodeId id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  Graph* graph_ = nullptr;
  NodeId id_ = 0;
};

// Define-by-run tape. Every op evaluates eagerly and appends one node, so the
// node list is a topological order by construction. Single-threaded; distinct
// graphs share nothing mutable except Parameter storage, which is read-only
// during forward/backward.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var Constant(Tensor value);
  // Returns the same node for repeated requests of one parameter.
  Var Param(const ParameterPtr& parameter);

  std::size_t size() const { return nodes_.size(); }
  const Tensor& value(NodeId id) const;
  OpKind op(NodeId id) const { return nodes_.at(id).op; }
  const std::vector<NodeId>& inputs(NodeId id) const {
    return nodes_.at(id).inputs;
  }
  // Non-null only for parameter nodes.
  Parameter* parameter(NodeId id) const { return nodes_.at(id).param.get(); }
  bool requires_grad(NodeId id) const { return nodes_.at(id).requires_grad; }

  // Reverse sweep from a scalar loss. Returns the gradient of every trainable
  // parameter node reachable from the loss; other leaves are skipped.
  std::map<NodeId, Tensor> Backward(Var loss) const;

  // Backward() followed by adding each parameter gradient into
  // Parameter::grad (which must already be sized, see Parameter::ZeroGrad).
  void AccumulateGradients(Var loss) const;

 private:
  struct Node {
    OpKind op = OpKind::kConstant;
    std::vector<NodeId> inputs;
    Tensor value;
    ParameterPtr param;
    double s0 = 0.0;
    double s1 = 0.0;
    std::size_t i0 = 0;
    std::size_t i1 = 0;
    bool requires_grad = false;
  };

  Var Push(Node node);
  void BackwardNode(NodeId id, const Tensor& grad,
                    std::vector<Tensor>& grads) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, NodeId> param_nodes_;

  friend Var MatMul(Var, Var);
  friend Var MatVec(Var, Var);
  friend Var Add(Var, Var);
  friend Var Sub(Var, Var);
  friend Var Mul(Var, Var);
  friend Var AddN(std::span<const Var>);
  friend Var Scale(Var, double);
  friend Var Affine(Var, double, double);
  friend Var Sigmoid(Var);
  friend Var Tanh(Var);
  friend Var Relu(Var);
  friend Var Log(Var);
  friend Var Clamp(Var, double, double);
  friend Var Softmax(Var);
  friend Var NegLogSoftmax(Var, std::size_t);
  friend Var Sum(Var);
  friend Var Dot(Var, Var);
  friend Var Slice(Var, std::size_t, std::size_t);
  friend Var Row(Var, std::size_t);
};

// a[m x k] * b[k x n].
Var MatMul(Var a, Var b);
// w[m x k] * x[k] -> [m].
Var MatVec(Var w, Var x);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
// Sum of equally shaped terms; at least one term.
Var AddN(std::span<const Var> terms);
Var Scale(Var x, double factor);
// factor * x + offset, elementwise.
Var Affine(Var x, double factor, double offset);
Var Sigmoid(Var x);
Var Tanh(Var x);
Var Relu(Var x);
// Natural log of max(x, kLogEpsilon); zero gradient below the clamp.
Var Log(Var x);
Var Clamp(Var x, double lo, double hi);
// Max-subtracted softmax over a rank-1 input.
Var Softmax(Var x);
// -log softmax(x)[target], computed through log-sum-exp.
Var NegLogSoftmax(Var x, std::size_t target);
Var Sum(Var x);
Var Dot(Var a, Var b);
Var Slice(Var x, std::size_t offset, std::size_t length);
// Row `index` of a rank-2 input.
Var Row(Var matrix, std::size_t index);

inline Var operator+(Var a, Var b) { return Add(a, b); }
inline Var operator-(Var a, Var b) { return Sub(a, b); }
inline Var operator*(Var a, Var b) { return Mul(a, b); }

// Plain-value helpers shared by inference code.
Tensor SoftmaxValues(const Tensor& logits);
Tensor LogSoftmaxValues(const Tensor& logits);

// Max over coordinates of |analytic - central difference| / max(1, |analytic|)
// for a scalar function of one tensor argument.
using ScalarFn = std::function<Var(Graph&, Var)>;
double FiniteDiffCheck(const ScalarFn& f, const Tensor& point,
                       double step = 1e-5);

// Same check over every trainable parameter in `params`. `loss` must rebuild
// its graph from current parameter values on each call.
double FiniteDiffCheck(std::span<const ParameterPtr> params,
                       const std::function<Var(Graph&)>& loss,
                       double step = 1e-5);

}  // namespace noc

#endif  // NOC_AUTODIFF_H_
