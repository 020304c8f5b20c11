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

// Static computation graph with reverse-mode differentiation.
//
// A graph is declared once for a given input length (every node's shape is
// inferred and checked at declaration), evaluated with Forward() on a set of
// named input arrays, and differentiated with Backward().  Trainable tensors
// live in a ParameterStore owned by the model; the graph only references them
// and accumulates into their gradient buffers.
//
// Gradient contributions that a node receives from its consumers are reduced
// in consumer order, never in visit order, so any valid topological schedule
// yields bit-identical gradients.

#ifndef NSF_GRAPH_H_
#define NSF_GRAPH_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nsf/tensor.h"

namespace nsf::ag {

enum class OpKind {
  kInput,
  kParameter,
  kMatMul,
  kDilatedConv1d,
  kLstm,
  kAdd,
  kMultiply,
  kTanh,
  kSigmoid,
  kExp,
  kConcat,
  kSliceCols,
  kScale,
  kUpsample,
  kGate,
  kFrameWindow,
  kSpectralLoss,
  kWaveformMse,
  kFirMerge,
};

std::string_view OpKindName(OpKind kind);

using NodeId = int32_t;

// Forward and backward rule of one operation.  Backward() accumulates
// (+=) into the zero-initialised buffers in `grad_in`; a null entry means that
// operand needs no gradient.
template <typename T>
class Op {
 public:
  virtual ~Op() = default;
  virtual OpKind kind() const = 0;
  virtual Shape OutputShape(std::span<const Shape> in) const = 0;
  virtual void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) = 0;
  virtual void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>& out,
                        const Tensor<T>& grad_out, std::span<Tensor<T>* const> grad_in) = 0;
};

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

// Ordered, name-addressed set of trainable tensors.  Element addresses are
// stable for the lifetime of the store.
template <typename T>
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore& other);
  ParameterStore& operator=(const ParameterStore& other);
  ParameterStore(ParameterStore&&) noexcept = default;
  ParameterStore& operator=(ParameterStore&&) noexcept = default;

  Parameter<T>& Add(const std::string& name, const Shape& shape);
  Parameter<T>* Find(std::string_view name);
  const Parameter<T>* Find(std::string_view name) const;

  size_t size() const { return params_.size(); }
  Parameter<T>& operator[](size_t i) { return *params_[i]; }
  const Parameter<T>& operator[](size_t i) const { return *params_[i]; }

  int64_t CountElements() const;
  void ZeroGrad();
  void ZeroValues();

  template <typename U>
  ParameterStore<U> Cast() const {
    ParameterStore<U> out;
    for (const auto& p : params_) {
      auto& q = out.Add(p->name, p->value.shape());
      q.value = p->value.template Cast<U>();
    }
    return out;
  }

 private:
  std::vector<std::unique_ptr<Parameter<T>>> params_;
  std::map<std::string, size_t, std::less<>> index_;
};

enum class Padding { kCausal, kSame };

enum class BackwardOrder {
  kReverseCreation,  // nodes in reverse declaration order
  kDepthFirst,       // reversed DFS post-order from the root, last operand first
};

struct ForwardOptions {
  // Drop intermediate values after their last consumer ran.  Backward() is
  // unavailable afterwards; outputs and retained nodes are kept.
  bool release_intermediates = false;
  // Fail on the first node producing a non-finite value.
  bool check_finite = false;
};

template <typename T>
class Graph {
 public:
  using Bindings = std::unordered_map<std::string, const Tensor<T>*>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) noexcept = default;
  Graph& operator=(Graph&&) noexcept = default;

  NodeId Input(const std::string& name, const Shape& shape, bool requires_grad = false);
  NodeId Param(Parameter<T>& p);
  NodeId Apply(std::unique_ptr<Op<T>> op, std::vector<NodeId> operands,
               std::string label = {});

  // x[rows x in] * w[in x out] (+ bias[out]).
  NodeId MatMul(NodeId x, NodeId w, std::optional<NodeId> bias = std::nullopt);
  // x[T x in] with kernel w[k x in x out] (+ bias[out]).
  NodeId Conv1d(NodeId x, NodeId w, std::optional<NodeId> bias, int dilation,
                Padding padding);
  // One LSTM direction over the rows of x; gate order i, f, g, o.
  NodeId Lstm(NodeId x, NodeId w_input, NodeId w_recurrent, NodeId bias, bool reverse);
  NodeId Add(std::vector<NodeId> operands);
  NodeId Multiply(NodeId a, NodeId b);
  NodeId Tanh(NodeId x);
  NodeId Sigmoid(NodeId x);
  NodeId Exp(NodeId x);
  NodeId Scale(NodeId x, double factor);
  NodeId Concat(std::vector<NodeId> operands);
  NodeId SliceCols(NodeId x, int64_t begin, int64_t end);
  NodeId Upsample(NodeId x, int64_t factor);
  // tanh(first half of columns) * sigmoid(second half).
  NodeId Gate(NodeId x);
  // Hann-windowed frames of a T x 1 signal (tail zero-padded).
  NodeId FrameWindow(NodeId x, int frame_length, int frame_shift);

  void Retain(NodeId id);
  void SetOutput(NodeId id) { output_ = id; }
  NodeId output() const { return output_; }

  const Tensor<T>& Forward(const Bindings& inputs, const ForwardOptions& options = {});
  void Backward(const Tensor<T>& seed, BackwardOrder order = BackwardOrder::kReverseCreation);
  bool forward_done() const { return forward_done_; }

  const Tensor<T>& Value(NodeId id) const;
  // Gradient of an input declared with requires_grad, after Backward().
  const Tensor<T>& InputGrad(NodeId id) const;
  const Shape& shape(NodeId id) const { return node(id).shape; }
  OpKind kind(NodeId id) const;
  const std::string& label(NodeId id) const { return node(id).label; }
  bool requires_grad(NodeId id) const { return node(id).requires_grad; }
  size_t size() const { return nodes_.size(); }
  std::vector<std::string> InputNames() const;
  // Id of a declared input, or -1.
  NodeId FindInput(const std::string& name) const;

 private:
  struct Node {
    OpKind kind = OpKind::kInput;
    Shape shape;
    std::vector<NodeId> operands;
    std::unique_ptr<Op<T>> op;
    Parameter<T>* param = nullptr;
    Tensor<T> value;
    Tensor<T> grad;
    std::string label;
    bool requires_grad = false;
    bool retained = false;
  };

  const Node& node(NodeId id) const;
  Node& node(NodeId id);
  const Tensor<T>* ValuePtr(NodeId id) const;
  std::vector<NodeId> Schedule(BackwardOrder order) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> inputs_;
  std::unordered_map<const Parameter<T>*, NodeId> params_;
  NodeId output_ = -1;
  bool forward_done_ = false;
  bool released_ = false;
};

extern template class ParameterStore<float>;
extern template class ParameterStore<double>;
extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace nsf::ag

#endif  // NSF_GRAPH_H_
