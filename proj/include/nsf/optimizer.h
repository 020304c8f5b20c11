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

#ifndef NSF_OPTIMIZER_H_
#define NSF_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "nsf/graph.h"

namespace nsf::train {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Gradients are rescaled to this global L2 norm when larger; <= 0 disables.
  double clip_norm = 5.0;

  void Validate() const;
};

enum class StepStatus { kApplied, kSkippedNonFinite };

// Bias-corrected Adam over every tensor of a parameter store.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  // Updates the values from the accumulated gradients.  A non-finite
  // gradient leaves parameters and moments untouched; the step counter
  // still advances so the event is visible.
  StepStatus Step(ag::ParameterStore<T>& params);

  int64_t step() const { return step_; }
  int64_t skipped() const { return skipped_; }
  double last_grad_norm() const { return last_norm_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  int64_t step_ = 0;
  int64_t applied_ = 0;
  int64_t skipped_ = 0;
  double last_norm_ = 0.0;
  std::vector<std::vector<double>> m_, v_;
};

extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace nsf::train

#endif  // NSF_OPTIMIZER_H_
