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

#include "nsf/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nsf::ag {
namespace {

// Indices to visit for a tensor with the given analytic gradient.
std::vector<int64_t> SelectEntries(std::span<const double> grad, const GradCheckOptions& opt,
                                   std::mt19937_64& rng) {
  const int64_t n = static_cast<int64_t>(grad.size());
  std::vector<int64_t> all(static_cast<size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  if (opt.max_entries_per_tensor < 0 || opt.max_entries_per_tensor >= n) return all;

  const int64_t budget = opt.max_entries_per_tensor;
  const int64_t top = std::min(opt.largest_entries, budget);
  std::vector<int64_t> picked;
  if (top > 0) {
    std::partial_sort(all.begin(), all.begin() + top, all.end(), [&](int64_t a, int64_t b) {
      return std::abs(grad[static_cast<size_t>(a)]) > std::abs(grad[static_cast<size_t>(b)]);
    });
    picked.assign(all.begin(), all.begin() + top);
    all.erase(all.begin(), all.begin() + top);
  }
  std::shuffle(all.begin(), all.end(), rng);
  picked.insert(picked.end(), all.begin(), all.begin() + (budget - top));
  std::sort(picked.begin(), picked.end());
  return picked;
}

void Record(GradCheckResult& result, GradCheckEntry& tensor_worst, const std::string& name,
            int64_t index, double analytic, double numeric) {
  const double err = RelativeError(analytic, numeric);
  ++result.checked;
  if (err > tensor_worst.error || tensor_worst.tensor.empty()) {
    tensor_worst = {name, index, analytic, numeric, err};
  }
  if (err > result.max_error || result.worst.tensor.empty()) {
    result.max_error = err;
    result.worst = tensor_worst;
  }
}

}  // namespace

double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(std::abs(numeric), 1e-8);
}

GradCheckResult CheckGraph(Graph<double>& graph, ParameterStore<double>& params,
                           const Graph<double>::Bindings& inputs,
                           const GradCheckOptions& options) {
  std::mt19937_64 rng(options.seed);

  // Private copies of the inputs so that they can be perturbed.
  std::unordered_map<std::string, Tensor<double>> owned;
  Graph<double>::Bindings bound;
  for (const auto& [name, t] : inputs) {
    owned.emplace(name, *t);
  }
  for (auto& [name, t] : owned) bound[name] = &t;

  const Shape out_shape = graph.shape(graph.output());
  Tensor<double> projection(out_shape, 1.0);
  if (ShapeSize(out_shape) != 1) {
    std::normal_distribution<double> normal;
    for (auto& v : projection.values()) v = normal(rng);
  }
  auto objective = [&]() {
    const Tensor<double>& y = graph.Forward(bound);
    double s = 0.0;
    for (int64_t i = 0; i < y.size(); ++i) s += projection[i] * y[i];
    return s;
  };

  objective();
  params.ZeroGrad();
  graph.Backward(projection);

  GradCheckResult result;
  const double eps = options.epsilon;
  for (size_t p = 0; p < params.size(); ++p) {
    Parameter<double>& param = params[p];
    const Tensor<double> analytic = param.grad;
    GradCheckEntry worst;
    for (int64_t i : SelectEntries(analytic.values(), options, rng)) {
      const double saved = param.value[i];
      param.value[i] = saved + eps;
      const double up = objective();
      param.value[i] = saved - eps;
      const double down = objective();
      param.value[i] = saved;
      Record(result, worst, param.name, i, analytic[i], (up - down) / (2.0 * eps));
    }
    if (!worst.tensor.empty()) result.per_tensor.push_back(worst);
  }

  if (options.check_inputs) {
    for (const std::string& name : graph.InputNames()) {
      const NodeId id = graph.FindInput(name);
      if (!graph.requires_grad(id)) continue;
      const Tensor<double> analytic = graph.InputGrad(id);
      Tensor<double>& x = owned.at(name);
      GradCheckEntry worst;
      for (int64_t i : SelectEntries(analytic.values(), options, rng)) {
        const double saved = x[i];
        x[i] = saved + eps;
        const double up = objective();
        x[i] = saved - eps;
        const double down = objective();
        x[i] = saved;
        Record(result, worst, "input:" + name, i, analytic[i], (up - down) / (2.0 * eps));
      }
      if (!worst.tensor.empty()) result.per_tensor.push_back(worst);
    }
  }
  return result;
}

GradCheckResult CheckFunction(const std::function<double(std::span<const double>)>& f,
                              std::span<const double> x, std::span<const double> analytic,
                              const GradCheckOptions& options) {
  if (x.size() != analytic.size()) {
    throw std::invalid_argument("gradient length differs from the point length");
  }
  std::mt19937_64 rng(options.seed);
  std::vector<double> point(x.begin(), x.end());
  GradCheckResult result;
  GradCheckEntry worst;
  for (int64_t i : SelectEntries(analytic, options, rng)) {
    const size_t k = static_cast<size_t>(i);
    const double saved = point[k];
    point[k] = saved + options.epsilon;
    const double up = f(point);
    point[k] = saved - options.epsilon;
    const double down = f(point);
    point[k] = saved;
    Record(result, worst, "x", i, analytic[k], (up - down) / (2.0 * options.epsilon));
  }
  if (!worst.tensor.empty()) result.per_tensor.push_back(worst);
  return result;
}

}  // namespace nsf::ag
