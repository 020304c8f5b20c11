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

// Central finite-difference checks for graphs and plain functions.  All
// checks run in double precision.  The reported error for one scalar is
//   |analytic - numeric| / max(|numeric|, 1e-8)
// and a check returns the maximum over every scalar it visited.

#ifndef NSF_GRAD_CHECK_H_
#define NSF_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nsf/graph.h"

namespace nsf::ag {

struct GradCheckOptions {
  double epsilon = 1e-4;
  // Scalars visited per tensor; < 0 visits all of them.  When limited, the
  // entries with the largest analytic gradient come first, the rest are
  // drawn at random.
  int64_t max_entries_per_tensor = -1;
  int64_t largest_entries = 0;
  uint64_t seed = 1;
  // Also check the gradients of inputs declared with requires_grad.
  bool check_inputs = true;
};

struct GradCheckEntry {
  std::string tensor;
  int64_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double error = 0.0;
};

struct GradCheckResult {
  double max_error = 0.0;
  GradCheckEntry worst;
  int64_t checked = 0;
  // Worst error per tensor, in parameter order followed by inputs.
  std::vector<GradCheckEntry> per_tensor;
};

double RelativeError(double analytic, double numeric);

// Checks d(objective)/d(parameters) for a graph.  A scalar output is used as
// the objective; otherwise the objective is sum(r * output) for a fixed
// random r.  The graph's forward must not depend on hidden state.
GradCheckResult CheckGraph(Graph<double>& graph, ParameterStore<double>& params,
                           const Graph<double>::Bindings& inputs,
                           const GradCheckOptions& options = {});

// Checks an analytic gradient of a scalar function of a vector.
GradCheckResult CheckFunction(const std::function<double(std::span<const double>)>& f,
                              std::span<const double> x, std::span<const double> analytic,
                              const GradCheckOptions& options = {});

}  // namespace nsf::ag

#endif  // NSF_GRAD_CHECK_H_
