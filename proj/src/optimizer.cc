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

#include "nsf/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace nsf::train {

void AdamConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must be in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must be in [0, 1)");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

template <typename T>
Adam<T>::Adam(AdamConfig config) : config_(config) {
  config_.Validate();
}

template <typename T>
StepStatus Adam<T>::Step(ag::ParameterStore<T>& params) {
  ++step_;
  if (m_.size() != params.size()) {
    m_.assign(params.size(), {});
    v_.assign(params.size(), {});
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(static_cast<size_t>(params[i].value.size()), 0.0);
      v_[i].assign(static_cast<size_t>(params[i].value.size()), 0.0);
    }
  }

  double sq = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.grad.size() != p.value.size()) {
      throw std::logic_error("parameter '" + p.name + "' has no gradient buffer");
    }
    for (T g : p.grad.values()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  last_norm_ = std::sqrt(sq);
  if (!std::isfinite(last_norm_)) {
    ++skipped_;
    return StepStatus::kSkippedNonFinite;
  }
  const double clip = (config_.clip_norm > 0.0 && last_norm_ > config_.clip_norm)
                          ? config_.clip_norm / last_norm_
                          : 1.0;

  ++applied_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(applied_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(applied_));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (size_t k = 0; k < m.size(); ++k) {
      const double g = clip * static_cast<double>(p.grad[static_cast<int64_t>(k)]);
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      const double update = config_.learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + config_.epsilon);
      p.value[static_cast<int64_t>(k)] = static_cast<T>(static_cast<double>(p.value[static_cast<int64_t>(k)]) - update);
    }
  }
  return StepStatus::kApplied;
}

template class Adam<float>;
template class Adam<double>;

}  // namespace nsf::train
