/* Copyright 2026 The NSF Vocoder Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "nsf/graph.h"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "ops_internal.h"

namespace nsf::ag {

std::string_view OpKindName(OpKind kind) {
  switch (kind) {
    case OpKind::kInput: return "input";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kDilatedConv1d: return "dilated-causal-conv1d";
    case OpKind::kLstm: return "lstm";
    case OpKind::kAdd: return "add";
    case OpKind::kMultiply: return "multiply";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kExp: return "exp";
    case OpKind::kConcat: return "concat";
    case OpKind::kSliceCols: return "slice-cols";
    case OpKind::kScale: return "scale";
    case OpKind::kUpsample: return "upsample";
    case OpKind::kGate: return "gate";
    case OpKind::kFrameWindow: return "frame-window";
    case OpKind::kSpectralLoss: return "spectral-loss";
    case OpKind::kWaveformMse: return "waveform-mse";
    case OpKind::kFirMerge: return "fir-merge";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// ParameterStore

template <typename T>
ParameterStore<T>::ParameterStore(const ParameterStore& other) {
  *this = other;
}

template <typename T>
ParameterStore<T>& ParameterStore<T>::operator=(const ParameterStore& other) {
  if (this == &other) return *this;
  params_.clear();
  index_.clear();
  for (const auto& p : other.params_) {
    auto& q = Add(p->name, p->value.shape());
    q.value = p->value;
    q.grad = p->grad;
  }
  return *this;
}

template <typename T>
Parameter<T>& ParameterStore<T>::Add(const std::string& name, const Shape& shape) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  auto p = std::make_unique<Parameter<T>>();
  p->name = name;
  p->value = Tensor<T>(shape);
  p->grad = Tensor<T>(shape);
  index_.emplace(name, params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

template <typename T>
Parameter<T>* ParameterStore<T>::Find(std::string_view name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

template <typename T>
const Parameter<T>* ParameterStore<T>::Find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : params_[it->second].get();
}

template <typename T>
int64_t ParameterStore<T>::CountElements() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

template <typename T>
void ParameterStore<T>::ZeroGrad() {
  for (auto& p : params_) p->grad.SetZero();
}

template <typename T>
void ParameterStore<T>::ZeroValues() {
  for (auto& p : params_) p->value.SetZero();
}

// ---------------------------------------------------------------------------
// Graph construction

template <typename T>
const typename Graph<T>::Node& Graph<T>::node(NodeId id) const {
  if (id < 0 || static_cast<size_t>(id) >= nodes_.size()) {
    throw std::out_of_range("graph node id " + std::to_string(id) + " out of range");
  }
  return nodes_[static_cast<size_t>(id)];
}

template <typename T>
typename Graph<T>::Node& Graph<T>::node(NodeId id) {
  return const_cast<Node&>(std::as_const(*this).node(id));
}

template <typename T>
NodeId Graph<T>::Input(const std::string& name, const Shape& shape, bool requires_grad) {
  if (inputs_.count(name)) throw std::invalid_argument("duplicate graph input: " + name);
  ShapeSize(shape);
  Node n;
  n.kind = OpKind::kInput;
  n.shape = shape;
  n.label = name;
  n.requires_grad = requires_grad;
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  inputs_.emplace(name, id);
  forward_done_ = false;
  return id;
}

template <typename T>
NodeId Graph<T>::Param(Parameter<T>& p) {
  if (auto it = params_.find(&p); it != params_.end()) return it->second;
  Node n;
  n.kind = OpKind::kParameter;
  n.shape = p.value.shape();
  n.param = &p;
  n.label = p.name;
  n.requires_grad = true;
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  params_.emplace(&p, id);
  forward_done_ = false;
  return id;
}

template <typename T>
NodeId Graph<T>::Apply(std::unique_ptr<Op<T>> op, std::vector<NodeId> operands,
                       std::string label) {
  std::vector<Shape> shapes;
  shapes.reserve(operands.size());
  bool needs_grad = false;
  for (NodeId o : operands) {
    shapes.push_back(node(o).shape);
    needs_grad = needs_grad || node(o).requires_grad;
  }
  Node n;
  n.kind = op->kind();
  try {
    n.shape = op->OutputShape(shapes);
  } catch (const ShapeError& e) {
    std::string msg = std::string(OpKindName(n.kind));
    if (!label.empty()) msg += " '" + label + "'";
    msg += ": ";
    msg += e.what();
    msg += " (operands:";
    for (const auto& s : shapes) msg += " " + ShapeString(s);
    msg += ")";
    throw ShapeError(msg);
  }
  n.operands = std::move(operands);
  n.op = std::move(op);
  n.label = std::move(label);
  n.requires_grad = needs_grad;
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  output_ = id;
  forward_done_ = false;
  return id;
}

template <typename T>
NodeId Graph<T>::MatMul(NodeId x, NodeId w, std::optional<NodeId> bias) {
  std::vector<NodeId> ops{x, w};
  if (bias) ops.push_back(*bias);
  return Apply(internal::MakeMatMul<T>(), std::move(ops));
}

template <typename T>
NodeId Graph<T>::Conv1d(NodeId x, NodeId w, std::optional<NodeId> bias, int dilation,
                        Padding padding) {
  std::vector<NodeId> ops{x, w};
  if (bias) ops.push_back(*bias);
  return Apply(internal::MakeConv1d<T>(dilation, padding), std::move(ops));
}

template <typename T>
NodeId Graph<T>::Lstm(NodeId x, NodeId w_input, NodeId w_recurrent, NodeId bias,
                      bool reverse) {
  return Apply(internal::MakeLstm<T>(reverse), {x, w_input, w_recurrent, bias});
}

template <typename T>
NodeId Graph<T>::Add(std::vector<NodeId> operands) {
  return Apply(internal::MakeAdd<T>(), std::move(operands));
}

template <typename T>
NodeId Graph<T>::Multiply(NodeId a, NodeId b) {
  return Apply(internal::MakeMultiply<T>(), {a, b});
}

template <typename T>
NodeId Graph<T>::Tanh(NodeId x) {
  return Apply(internal::MakeUnary<T>(OpKind::kTanh), {x});
}

template <typename T>
NodeId Graph<T>::Sigmoid(NodeId x) {
  return Apply(internal::MakeUnary<T>(OpKind::kSigmoid), {x});
}

template <typename T>
NodeId Graph<T>::Exp(NodeId x) {
  return Apply(internal::MakeUnary<T>(OpKind::kExp), {x});
}

template <typename T>
NodeId Graph<T>::Scale(NodeId x, double factor) {
  return Apply(internal::MakeScale<T>(factor), {x});
}

template <typename T>
NodeId Graph<T>::Concat(std::vector<NodeId> operands) {
  return Apply(internal::MakeConcat<T>(), std::move(operands));
}

template <typename T>
NodeId Graph<T>::SliceCols(NodeId x, int64_t begin, int64_t end) {
  return Apply(internal::MakeSliceCols<T>(begin, end), {x});
}

template <typename T>
NodeId Graph<T>::Upsample(NodeId x, int64_t factor) {
  return Apply(internal::MakeUpsample<T>(factor), {x});
}

template <typename T>
NodeId Graph<T>::Gate(NodeId x) {
  return Apply(internal::MakeGate<T>(), {x});
}

template <typename T>
NodeId Graph<T>::FrameWindow(NodeId x, int frame_length, int frame_shift) {
  return Apply(internal::MakeFrameWindow<T>(frame_length, frame_shift), {x});
}

template <typename T>
void Graph<T>::Retain(NodeId id) {
  node(id).retained = true;
}

template <typename T>
OpKind Graph<T>::kind(NodeId id) const {
  return node(id).kind;
}

template <typename T>
std::vector<std::string> Graph<T>::InputNames() const {
  std::vector<std::string> names;
  for (const auto& [name, id] : inputs_) names.push_back(name);
  std::sort(names.begin(), names.end());
  return names;
}

template <typename T>
NodeId Graph<T>::FindInput(const std::string& name) const {
  auto it = inputs_.find(name);
  return it == inputs_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Evaluation

template <typename T>
const Tensor<T>* Graph<T>::ValuePtr(NodeId id) const {
  const Node& n = node(id);
  return n.param ? &n.param->value : &n.value;
}

template <typename T>
const Tensor<T>& Graph<T>::Value(NodeId id) const {
  const Node& n = node(id);
  if (!n.param && !forward_done_) {
    throw std::logic_error("value of node " + std::to_string(id) + " requested before forward");
  }
  const Tensor<T>* v = ValuePtr(id);
  if (v->size() != ShapeSize(n.shape)) {
    throw std::logic_error("value of node " + std::to_string(id) + " (" +
                           std::string(OpKindName(n.kind)) + ") was released");
  }
  return *v;
}

template <typename T>
const Tensor<T>& Graph<T>::InputGrad(NodeId id) const {
  const Node& n = node(id);
  if (n.kind != OpKind::kInput || !n.requires_grad) {
    throw std::logic_error("node " + std::to_string(id) + " does not expose a gradient");
  }
  return n.grad;
}

template <typename T>
const Tensor<T>& Graph<T>::Forward(const Bindings& inputs, const ForwardOptions& options) {
  if (nodes_.empty()) throw std::logic_error("forward on an empty graph");
  if (output_ < 0) throw std::logic_error("graph has no output node");

  for (const auto& [name, id] : inputs_) {
    auto it = inputs.find(name);
    if (it == inputs.end() || it->second == nullptr) {
      throw std::invalid_argument("graph input '" + name + "' is not bound");
    }
    Node& n = node(id);
    if (it->second->shape() != n.shape) {
      throw ShapeError("input '" + name + "': expected " + ShapeString(n.shape) + ", got " +
                       ShapeString(it->second->shape()));
    }
  }

  std::vector<NodeId> last_use(nodes_.size(), -1);
  if (options.release_intermediates) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
      for (NodeId o : nodes_[i].operands) last_use[static_cast<size_t>(o)] = static_cast<NodeId>(i);
    }
  }

  std::vector<const Tensor<T>*> in;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (n.kind == OpKind::kParameter) {
      if (n.param->value.shape() != n.shape) {
        throw ShapeError("parameter '" + n.label + "' changed shape");
      }
      continue;
    }
    if (n.kind == OpKind::kInput) {
      n.value = *inputs.at(n.label);
    } else {
      in.clear();
      for (NodeId o : n.operands) {
        const Tensor<T>* v = ValuePtr(o);
        if (v->size() != ShapeSize(node(o).shape)) {
          throw std::logic_error("operand of node " + std::to_string(i) + " was released");
        }
        in.push_back(v);
      }
      if (n.value.shape() != n.shape || n.value.size() != ShapeSize(n.shape)) {
        n.value = Tensor<T>(n.shape);
      }
      n.op->Forward(in, n.value);
    }
    if (options.check_finite && !n.value.AllFinite()) {
      throw std::runtime_error("non-finite value produced by node " + std::to_string(i) + " (" +
                               std::string(OpKindName(n.kind)) +
                               (n.label.empty() ? "" : " '" + n.label + "'") + ")");
    }
    if (options.release_intermediates) {
      for (NodeId o : n.operands) {
        Node& p = node(o);
        if (last_use[static_cast<size_t>(o)] == static_cast<NodeId>(i) && !p.retained &&
            o != output_ && p.kind != OpKind::kParameter) {
          p.value.Release();
        }
      }
    }
  }
  forward_done_ = true;
  released_ = options.release_intermediates;
  return Value(output_);
}

template <typename T>
std::vector<NodeId> Graph<T>::Schedule(BackwardOrder order) const {
  std::vector<NodeId> sched;
  std::vector<char> reachable(nodes_.size(), 0);
  // Reachability from the output through operands.
  std::vector<NodeId> stack{output_};
  reachable[static_cast<size_t>(output_)] = 1;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    for (NodeId o : nodes_[static_cast<size_t>(u)].operands) {
      if (!reachable[static_cast<size_t>(o)]) {
        reachable[static_cast<size_t>(o)] = 1;
        stack.push_back(o);
      }
    }
  }
  if (order == BackwardOrder::kReverseCreation) {
    for (NodeId i = output_; i >= 0; --i) {
      if (reachable[static_cast<size_t>(i)]) sched.push_back(i);
    }
    return sched;
  }
  // Iterative DFS post-order, visiting operands last-first; reversing a
  // post-order gives a valid reverse-topological schedule.
  std::vector<char> state(nodes_.size(), 0);
  std::vector<std::pair<NodeId, size_t>> dfs{{output_, 0}};
  std::vector<NodeId> post;
  state[static_cast<size_t>(output_)] = 1;
  while (!dfs.empty()) {
    auto& [u, next] = dfs.back();
    const auto& ops = nodes_[static_cast<size_t>(u)].operands;
    if (next < ops.size()) {
      NodeId o = ops[ops.size() - 1 - next];
      ++next;
      if (!state[static_cast<size_t>(o)]) {
        state[static_cast<size_t>(o)] = 1;
        dfs.emplace_back(o, 0);
      }
    } else {
      post.push_back(u);
      dfs.pop_back();
    }
  }
  sched.assign(post.rbegin(), post.rend());
  return sched;
}

template <typename T>
void Graph<T>::Backward(const Tensor<T>& seed, BackwardOrder order) {
  if (!forward_done_) throw std::logic_error("backward called before forward");
  if (released_) {
    throw std::logic_error("backward unavailable: forward ran with release_intermediates");
  }
  Node& root = node(output_);
  if (seed.shape() != root.shape) {
    throw ShapeError("backward seed " + ShapeString(seed.shape()) + " does not match output " +
                     ShapeString(root.shape));
  }

  struct Contribution {
    NodeId consumer;
    size_t slot;
    Tensor<T> grad;
  };
  std::vector<std::vector<Contribution>> pending(nodes_.size());
  pending[static_cast<size_t>(output_)].push_back({output_, 0, seed});

  for (auto& n : nodes_) {
    if (n.kind == OpKind::kInput && n.requires_grad) n.grad = Tensor<T>(n.shape);
  }

  std::vector<const Tensor<T>*> in;
  std::vector<Tensor<T>*> gin;
  for (NodeId u : Schedule(order)) {
    Node& n = node(u);
    auto& contribs = pending[static_cast<size_t>(u)];
    if (contribs.empty() || !n.requires_grad) {
      contribs.clear();
      continue;
    }
    std::sort(contribs.begin(), contribs.end(), [](const Contribution& a, const Contribution& b) {
      return a.consumer != b.consumer ? a.consumer < b.consumer : a.slot < b.slot;
    });
    Tensor<T> grad = std::move(contribs.front().grad);
    for (size_t c = 1; c < contribs.size(); ++c) {
      grad.matrix().array() += contribs[c].grad.matrix().array();
    }
    contribs.clear();
    contribs.shrink_to_fit();

    if (n.kind == OpKind::kParameter) {
      n.param->grad.matrix().array() += grad.matrix().array();
      continue;
    }
    if (n.kind == OpKind::kInput) {
      n.grad = std::move(grad);
      continue;
    }

    in.clear();
    gin.clear();
    std::vector<Tensor<T>> buffers(n.operands.size());
    for (size_t s = 0; s < n.operands.size(); ++s) {
      NodeId o = n.operands[s];
      in.push_back(ValuePtr(o));
      if (node(o).requires_grad) {
        buffers[s] = Tensor<T>(node(o).shape);
        gin.push_back(&buffers[s]);
      } else {
        gin.push_back(nullptr);
      }
    }
    n.op->Backward(in, n.value, grad, gin);
    for (size_t s = 0; s < n.operands.size(); ++s) {
      if (gin[s]) {
        pending[static_cast<size_t>(n.operands[s])].push_back({u, s, std::move(buffers[s])});
      }
    }
  }
}

template class ParameterStore<float>;
template class ParameterStore<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace nsf::ag
