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

#include "nsf/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nsf {

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

int64_t ShapeSize(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) {
    if (d < 0) throw ShapeError("negative dimension in shape " + ShapeString(shape));
    n *= d;
  }
  return n;
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill)
    : shape_(std::move(shape)), values_(static_cast<size_t>(ShapeSize(shape_)), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values)
    : shape_(std::move(shape)), values_(values.begin(), values.end()) {
  if (ShapeSize(shape_) != static_cast<int64_t>(values_.size())) {
    throw ShapeError("tensor of shape " + ShapeString(shape_) + " given " +
                     std::to_string(values_.size()) + " values");
  }
}

template <typename T>
void Tensor<T>::SetZero() {
  if (values_.size() != static_cast<size_t>(ShapeSize(shape_))) {
    values_.assign(static_cast<size_t>(ShapeSize(shape_)), T(0));
  } else {
    std::fill(values_.begin(), values_.end(), T(0));
  }
}

template <typename T>
bool Tensor<T>::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](T v) { return std::isfinite(v); });
}

template <typename T>
void Tensor<T>::Release() {
  decltype(values_)().swap(values_);
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace nsf
