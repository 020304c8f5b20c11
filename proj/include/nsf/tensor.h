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

#ifndef NSF_TENSOR_H_
#define NSF_TENSOR_H_

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nsf {

using Shape = std::vector<int64_t>;

std::string ShapeString(const Shape& shape);
int64_t ShapeSize(const Shape& shape);

// Thrown when operands of an op disagree in shape.  The message names the op
// and the offending shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense row-major array.  Sequences are stored time-major (rows = time,
// columns = channels); weight matrices are in x out; convolution kernels are
// kernel x in x out.  The shape is fixed at construction.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> values);

  const Shape& shape() const { return shape_; }
  int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
  int64_t dim(int64_t i) const { return shape_.at(static_cast<size_t>(i)); }
  int64_t size() const { return static_cast<int64_t>(values_.size()); }
  bool empty() const { return values_.empty(); }

  // Leading dimension, and the product of the remaining ones.
  int64_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  int64_t cols() const { return rows() == 0 ? 0 : size() / rows(); }

  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  T& operator[](int64_t i) { return values_[static_cast<size_t>(i)]; }
  const T& operator[](int64_t i) const { return values_[static_cast<size_t>(i)]; }
  T& at(int64_t r, int64_t c) { return values_[static_cast<size_t>(r * cols() + c)]; }
  const T& at(int64_t r, int64_t c) const {
    return values_[static_cast<size_t>(r * cols() + c)];
  }

  Eigen::Map<RowMatrix<T>> matrix() { return {data(), rows(), cols()}; }
  Eigen::Map<const RowMatrix<T>> matrix() const { return {data(), rows(), cols()}; }

  void SetZero();
  bool AllFinite() const;
  // Releases storage; the shape is kept so gradients can still be sized.
  void Release();

  template <typename U>
  Tensor<U> Cast() const {
    Tensor<U> out(shape_);
    std::copy(values_.begin(), values_.end(), out.data());
    return out;
  }

 private:
  Shape shape_;
  // Aligned so that vectorized reductions pair terms the same way wherever
  // the buffer lives, which keeps results bit-reproducible.
  std::vector<T, Eigen::aligned_allocator<T>> values_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace nsf

#endif  // NSF_TENSOR_H_
