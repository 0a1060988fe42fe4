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

#include "noc/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noc/errors.h"

namespace noc {

ParameterPtr MakeParameter(std::string name, Tensor value, bool trainable) {
  auto p = std::make_shared<Parameter>();
  p->name = std::move(name);
  p->value = std::move(value);
  p->trainable = trainable;
  p->ZeroGrad();
  return p;
}

const char* OpName(OpKind op) {
  switch (op) {
    case OpKind::kConstant: return "constant";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kMatVec: return "matvec";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kAddN: return "addn";
    case OpKind::kScale: return "scale";
    case OpKind::kAffine: return "affine";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kLog: return "log";
    case OpKind::kClamp: return "clamp";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kNegLogSoftmax: return "neg_log_softmax";
    case OpKind::kSum: return "sum";
    case OpKind::kDot: return "dot";
    case OpKind::kSlice: return "slice";
    case OpKind::kRow: return "row";
  }
  return "unknown";
}

const Tensor& Var::value() const { return graph_->value(id_); }

namespace {

Graph* SameGraph(Var a, Var b) {
  if (a.graph() == nullptr || a.graph() != b.graph()) {
    throw ArgumentError("operands belong to different graphs");
  }
  return a.graph();
}

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         ShapeString(a.shape()) + " vs " +
                         ShapeString(b.shape()));
  }
}

void RequireRank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + ", got " +
                         ShapeString(t.shape()));
  }
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double LogSumExp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

void AddInto(Tensor& dst, const Tensor& src) {
  if (dst.empty()) {
    dst = src;
    return;
  }
  double* d = dst.raw();
  const double* s = src.raw();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

// Ensures grads[id] is allocated with `like`'s shape and returns it.
Tensor& GradSlot(std::vector<Tensor>& grads, NodeId id, const Tensor& like) {
  if (grads[id].empty()) grads[id] = Tensor::ZerosLike(like);
  return grads[id];
}

}  // namespace

Var Graph::Constant(Tensor value) {
  Node n;
  n.op = OpKind::kConstant;
  n.value = std::move(value);
  return Push(std::move(n));
}

Var Graph::Param(const ParameterPtr& parameter) {
  if (!parameter) throw ArgumentError("null parameter");
  if (auto it = param_nodes_.find(parameter.get()); it != param_nodes_.end()) {
    return Var(this, it->second);
  }
  Node n;
  n.op = OpKind::kParameter;
  n.param = parameter;
  n.requires_grad = parameter->trainable;
  Var v = Push(std::move(n));
  param_nodes_.emplace(parameter.get(), v.id());
  return v;
}

const Tensor& Graph::value(NodeId id) const {
  const Node& n = nodes_.at(id);
  return n.param ? n.param->value : n.value;
}

Var Graph::Push(Node node) {
  if (node.op != OpKind::kParameter && node.op != OpKind::kConstant) {
    for (NodeId in : node.inputs) {
      if (nodes_[in].requires_grad) {
        node.requires_grad = true;
        break;
      }
    }
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var MatMul(Var a, Var b) {
  Graph* g = SameGraph(a, b);
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.rank() != 2 || y.rank() != 2 || x.dim(1) != y.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + ShapeString(x.shape()) +
                         " by " + ShapeString(y.shape()));
  }
  const std::size_t m = x.dim(0), k = x.dim(1), n = y.dim(1);
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double xv = x.at(i, p);
      for (std::size_t j = 0; j < n; ++j) out.at(i, j) += xv * y.at(p, j);
    }
  }
  Graph::Node node;
  node.op = OpKind::kMatMul;
  node.inputs = {a.id(), b.id()};
  node.value = std::move(out);
  return g->Push(std::move(node));
}

Var MatVec(Var w, Var x) {
  Graph* g = SameGraph(w, x);
  const Tensor& m = w.value();
  const Tensor& v = x.value();
  if (m.rank() != 2 || v.rank() != 1 || m.dim(1) != v.dim(0)) {
    throw DimensionError("matvec: cannot multiply " + ShapeString(m.shape()) +
                         " by " + ShapeString(v.shape()));
  }
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  Tensor out({rows});
  const double* mp = m.raw();
  const double* vp = v.raw();
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    const double* row = mp + i * cols;
    for (std::size_t j = 0; j < cols; ++j) s += row[j] * vp[j];
    out[i] = s;
  }
  Graph::Node node;
  node.op = OpKind::kMatVec;
  node.inputs = {w.id(), x.id()};
  node.value = std::move(out);
  return g->Push(std::move(node));
}

namespace {

template <typename F>
Tensor Zip(const char* op, const Tensor& a, const Tensor& b, F f) {
  RequireSameShape(op, a, b);
  Tensor out = Tensor::ZerosLike(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i], b[i]);
  return out;
}

template <typename F>
Tensor Map(const Tensor& a, F f) {
  Tensor out = Tensor::ZerosLike(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

}  // namespace

Var Add(Var a, Var b) {
  Graph* g = SameGraph(a, b);
  Graph::Node node;
  node.op = OpKind::kAdd;
  node.inputs = {a.id(), b.id()};
  node.value = Zip("add", a.value(), b.value(),
                   [](double x, double y) { return x + y; });
  return g->Push(std::move(node));
}

Var Sub(Var a, Var b) {
  Graph* g = SameGraph(a, b);
  Graph::Node node;
  node.op = OpKind::kSub;
  node.inputs = {a.id(), b.id()};
  node.value = Zip("sub", a.value(), b.value(),
                   [](double x, double y) { return x - y; });
  return g->Push(std::move(node));
}

Var Mul(Var a, Var b) {
  Graph* g = SameGraph(a, b);
  Graph::Node node;
  node.op = OpKind::kMul;
  node.inputs = {a.id(), b.id()};
  node.value = Zip("mul", a.value(), b.value(),
                   [](double x, double y) { return x * y; });
  return g->Push(std::move(node));
}

Var AddN(std::span<const Var> terms) {
  if (terms.empty()) throw ArgumentError("addn: no terms");
  Graph* g = terms[0].graph();
  Tensor out = terms[0].value();
  Graph::Node node;
  node.op = OpKind::kAddN;
  node.inputs.push_back(terms[0].id());
  for (std::size_t t = 1; t < terms.size(); ++t) {
    SameGraph(terms[0], terms[t]);
    RequireSameShape("addn", out, terms[t].value());
    const Tensor& v = terms[t].value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    node.inputs.push_back(terms[t].id());
  }
  node.value = std::move(out);
  return g->Push(std::move(node));
}

Var Scale(Var x, double factor) {
  Graph::Node node;
  node.op = OpKind::kScale;
  node.inputs = {x.id()};
  node.s0 = factor;
  node.value = Map(x.value(), [factor](double v) { return factor * v; });
  return x.graph()->Push(std::move(node));
}

Var Affine(Var x, double factor, double offset) {
  Graph::Node node;
  node.op = OpKind::kAffine;
  node.inputs = {x.id()};
  node.s0 = factor;
  node.s1 = offset;
  node.value =
      Map(x.value(), [factor, offset](double v) { return factor * v + offset; });
  return x.graph()->Push(std::move(node));
}

Var Sigmoid(Var x) {
  Graph::Node node;
  node.op = OpKind::kSigmoid;
  node.inputs = {x.id()};
  node.value = Map(x.value(), StableSigmoid);
  return x.graph()->Push(std::move(node));
}

Var Tanh(Var x) {
  Graph::Node node;
  node.op = OpKind::kTanh;
  node.inputs = {x.id()};
  node.value = Map(x.value(), [](double v) { return std::tanh(v); });
  return x.graph()->Push(std::move(node));
}

Var Relu(Var x) {
  Graph::Node node;
  node.op = OpKind::kRelu;
  node.inputs = {x.id()};
  node.value = Map(x.value(), [](double v) { return v > 0.0 ? v : 0.0; });
  return x.graph()->Push(std::move(node));
}

Var Log(Var x) {
  Graph::Node node;
  node.op = OpKind::kLog;
  node.inputs = {x.id()};
  node.value =
      Map(x.value(), [](double v) { return std::log(std::max(v, kLogEpsilon)); });
  return x.graph()->Push(std::move(node));
}

Var Clamp(Var x, double lo, double hi) {
  if (lo > hi) throw ArgumentError("clamp: lo > hi");
  Graph::Node node;
  node.op = OpKind::kClamp;
  node.inputs = {x.id()};
  node.s0 = lo;
  node.s1 = hi;
  node.value = Map(x.value(), [lo, hi](double v) { return std::clamp(v, lo, hi); });
  return x.graph()->Push(std::move(node));
}

Tensor SoftmaxValues(const Tensor& logits) {
  if (logits.empty()) throw ArgumentError("softmax of empty input");
  Tensor out = Tensor::ZerosLike(logits);
  const double m = *std::max_element(logits.raw(), logits.raw() + logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= s;
  return out;
}

Tensor LogSoftmaxValues(const Tensor& logits) {
  if (logits.empty()) throw ArgumentError("softmax of empty input");
  const double lse = LogSumExp(logits.values());
  return Map(logits, [lse](double v) { return v - lse; });
}

Var Softmax(Var x) {
  RequireRank("softmax", x.value(), 1);
  Graph::Node node;
  node.op = OpKind::kSoftmax;
  node.inputs = {x.id()};
  node.value = SoftmaxValues(x.value());
  return x.graph()->Push(std::move(node));
}

Var NegLogSoftmax(Var x, std::size_t target) {
  const Tensor& v = x.value();
  RequireRank("neg_log_softmax", v, 1);
  if (target >= v.size()) {
    throw IndexError("neg_log_softmax: target " + std::to_string(target) +
                     " out of range for " + ShapeString(v.shape()));
  }
  Graph::Node node;
  node.op = OpKind::kNegLogSoftmax;
  node.inputs = {x.id()};
  node.i0 = target;
  node.value = Tensor::Scalar(LogSumExp(v.values()) - v[target]);
  return x.graph()->Push(std::move(node));
}

Var Sum(Var x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  Graph::Node node;
  node.op = OpKind::kSum;
  node.inputs = {x.id()};
  node.value = Tensor::Scalar(s);
  return x.graph()->Push(std::move(node));
}

Var Dot(Var a, Var b) {
  Graph* g = SameGraph(a, b);
  RequireSameShape("dot", a.value(), b.value());
  double s = 0.0;
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  Graph::Node node;
  node.op = OpKind::kDot;
  node.inputs = {a.id(), b.id()};
  node.value = Tensor::Scalar(s);
  return g->Push(std::move(node));
}

Var Slice(Var x, std::size_t offset, std::size_t length) {
  const Tensor& v = x.value();
  RequireRank("slice", v, 1);
  if (length == 0 || offset + length > v.size()) {
    throw IndexError("slice [" + std::to_string(offset) + ", " +
                     std::to_string(offset + length) + ") out of range for " +
                     ShapeString(v.shape()));
  }
  Graph::Node node;
  node.op = OpKind::kSlice;
  node.inputs = {x.id()};
  node.i0 = offset;
  node.i1 = length;
  node.value = Tensor::Vector(
      std::vector<double>(v.raw() + offset, v.raw() + offset + length));
  return x.graph()->Push(std::move(node));
}

Var Row(Var matrix, std::size_t index) {
  const Tensor& m = matrix.value();
  RequireRank("row", m, 2);
  if (index >= m.dim(0)) {
    throw IndexError("row " + std::to_string(index) + " out of range for " +
                     ShapeString(m.shape()));
  }
  const std::size_t cols = m.dim(1);
  Graph::Node node;
  node.op = OpKind::kRow;
  node.inputs = {matrix.id()};
  node.i0 = index;
  node.value = Tensor::Vector(std::vector<double>(
      m.raw() + index * cols, m.raw() + (index + 1) * cols));
  return matrix.graph()->Push(std::move(node));
}

void Graph::BackwardNode(NodeId id, const Tensor& grad,
                         std::vector<Tensor>& grads) const {
  const Node& n = nodes_[id];
  auto needs = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
  auto in_value = [&](std::size_t k) -> const Tensor& {
    return value(n.inputs[k]);
  };
  auto slot = [&](std::size_t k) -> Tensor& {
    return GradSlot(grads, n.inputs[k], in_value(k));
  };
  const double* g = grad.raw();

  switch (n.op) {
    case OpKind::kConstant:
    case OpKind::kParameter:
      return;
    case OpKind::kMatMul: {
      const Tensor& a = in_value(0);
      const Tensor& b = in_value(1);
      const std::size_t m = a.dim(0), k = a.dim(1), cols = b.dim(1);
      if (needs(0)) {
        Tensor& da = slot(0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += g[i * cols + j] * b.at(p, j);
            da.at(i, p) += s;
          }
      }
      if (needs(1)) {
        Tensor& db = slot(1);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const double av = a.at(i, p);
            for (std::size_t j = 0; j < cols; ++j) db.at(p, j) += av * g[i * cols + j];
          }
      }
      return;
    }
    case OpKind::kMatVec: {
      const Tensor& w = in_value(0);
      const Tensor& x = in_value(1);
      const std::size_t rows = w.dim(0), cols = w.dim(1);
      if (needs(0)) {
        double* dw = slot(0).raw();
        const double* xp = x.raw();
        for (std::size_t i = 0; i < rows; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          double* row = dw + i * cols;
          for (std::size_t j = 0; j < cols; ++j) row[j] += gi * xp[j];
        }
      }
      if (needs(1)) {
        double* dx = slot(1).raw();
        const double* wp = w.raw();
        for (std::size_t i = 0; i < rows; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          const double* row = wp + i * cols;
          for (std::size_t j = 0; j < cols; ++j) dx[j] += gi * row[j];
        }
      }
      return;
    }
    case OpKind::kAdd:
    case OpKind::kSub: {
      if (needs(0)) AddInto(slot(0), grad);
      if (needs(1)) {
        Tensor& db = slot(1);
        const double sign = n.op == OpKind::kAdd ? 1.0 : -1.0;
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += sign * g[i];
      }
      return;
    }
    case OpKind::kMul: {
      const Tensor& a = in_value(0);
      const Tensor& b = in_value(1);
      if (needs(0)) {
        Tensor& da = slot(0);
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += g[i] * b[i];
      }
      if (needs(1)) {
        Tensor& db = slot(1);
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += g[i] * a[i];
      }
      return;
    }
    case OpKind::kAddN: {
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        if (needs(k)) AddInto(slot(k), grad);
      }
      return;
    }
    case OpKind::kScale:
    case OpKind::kAffine: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += n.s0 * g[i];
      return;
    }
    case OpKind::kSigmoid: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor& y = n.value;
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g[i] * y[i] * (1.0 - y[i]);
      return;
    }
    case OpKind::kTanh: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor& y = n.value;
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case OpKind::kRelu: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor& x = in_value(0);
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (x[i] > 0.0) dx[i] += g[i];
      }
      return;
    }
    case OpKind::kLog: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor& x = in_value(0);
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (x[i] > kLogEpsilon) dx[i] += g[i] / x[i];
      }
      return;
    }
    case OpKind::kClamp: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor& x = in_value(0);
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (x[i] >= n.s0 && x[i] <= n.s1) dx[i] += g[i];
      }
      return;
    }
    case OpKind::kSoftmax: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor& y = n.value;
      double gy = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) gy += g[i] * y[i];
      for (std::size_t i = 0; i < y.size(); ++i) dx[i] += y[i] * (g[i] - gy);
      return;
    }
    case OpKind::kNegLogSoftmax: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const Tensor p = SoftmaxValues(in_value(0));
      for (std::size_t i = 0; i < p.size(); ++i) dx[i] += g[0] * p[i];
      dx[n.i0] -= g[0];
      return;
    }
    case OpKind::kSum: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g[0];
      return;
    }
    case OpKind::kDot: {
      const Tensor& a = in_value(0);
      const Tensor& b = in_value(1);
      if (needs(0)) {
        Tensor& da = slot(0);
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += g[0] * b[i];
      }
      if (needs(1)) {
        Tensor& db = slot(1);
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += g[0] * a[i];
      }
      return;
    }
    case OpKind::kSlice: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      for (std::size_t i = 0; i < n.i1; ++i) dx[n.i0 + i] += g[i];
      return;
    }
    case OpKind::kRow: {
      if (!needs(0)) return;
      Tensor& dx = slot(0);
      const std::size_t cols = dx.dim(1);
      double* row = dx.raw() + n.i0 * cols;
      for (std::size_t j = 0; j < cols; ++j) row[j] += g[j];
      return;
    }
  }
}

std::map<NodeId, Tensor> Graph::Backward(Var loss) const {
  if (loss.graph() != this) throw ArgumentError("loss belongs to another graph");
  const Tensor& lv = value(loss.id());
  if (!lv.is_scalar()) {
    throw ArgumentError("backward needs a scalar loss, got " +
                        ShapeString(lv.shape()));
  }
  std::vector<Tensor> grads(nodes_.size());
  grads[loss.id()] = Tensor::Scalar(1.0);
  for (NodeId id = loss.id() + 1; id-- > 0;) {
    if (grads[id].empty() || !nodes_[id].requires_grad) continue;
    BackwardNode(id, grads[id], grads);
  }
  std::map<NodeId, Tensor> out;
  for (NodeId id = 0; id <= loss.id(); ++id) {
    const Node& n = nodes_[id];
    if (n.op != OpKind::kParameter || !n.requires_grad) continue;
    out.emplace(id, grads[id].empty() ? Tensor::ZerosLike(n.param->value)
                                      : std::move(grads[id]));
  }
  return out;
}

void Graph::AccumulateGradients(Var loss) const {
  for (auto& [id, grad] : Backward(loss)) {
    Parameter* p = parameter(id);
    if (p->grad.shape() != p->value.shape()) p->ZeroGrad();
    AddInto(p->grad, grad);
  }
}

double FiniteDiffCheck(const ScalarFn& f, const Tensor& point, double step) {
  auto param = MakeParameter("probe", point);
  return FiniteDiffCheck(std::span<const ParameterPtr>(&param, 1),
                         [&](Graph& g) { return f(g, g.Param(param)); }, step);
}

double FiniteDiffCheck(std::span<const ParameterPtr> params,
                       const std::function<Var(Graph&)>& loss, double step) {
  std::vector<Tensor> analytic;
  {
    Graph g;
    Var l = loss(g);
    auto grads = g.Backward(l);
    for (const auto& p : params) {
      Tensor a = Tensor::ZerosLike(p->value);
      for (auto& [id, grad] : grads) {
        if (g.parameter(id) == p.get()) a = grad;
      }
      analytic.push_back(std::move(a));
    }
  }
  auto evaluate = [&] {
    Graph g;
    return loss(g).value().item();
  };
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    if (!p.trainable) continue;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + step;
      const double up = evaluate();
      p.value[i] = saved - step;
      const double down = evaluate();
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[k][i];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      if (std::isnan(err)) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace noc
