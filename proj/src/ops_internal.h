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

#ifndef NSF_SRC_OPS_INTERNAL_H_
#define NSF_SRC_OPS_INTERNAL_H_

#include <memory>

#include "nsf/graph.h"

namespace nsf::ag::internal {

template <typename T> std::unique_ptr<Op<T>> MakeMatMul();
template <typename T> std::unique_ptr<Op<T>> MakeConv1d(int dilation, Padding padding);
template <typename T> std::unique_ptr<Op<T>> MakeLstm(bool reverse);
template <typename T> std::unique_ptr<Op<T>> MakeAdd();
template <typename T> std::unique_ptr<Op<T>> MakeMultiply();
template <typename T> std::unique_ptr<Op<T>> MakeUnary(OpKind kind);
template <typename T> std::unique_ptr<Op<T>> MakeScale(double factor);
template <typename T> std::unique_ptr<Op<T>> MakeConcat();
template <typename T> std::unique_ptr<Op<T>> MakeSliceCols(int64_t begin, int64_t end);
template <typename T> std::unique_ptr<Op<T>> MakeUpsample(int64_t factor);
template <typename T> std::unique_ptr<Op<T>> MakeGate();
template <typename T> std::unique_ptr<Op<T>> MakeFrameWindow(int frame_length, int frame_shift);

}  // namespace nsf::ag::internal

#endif  // NSF_SRC_OPS_INTERNAL_H_
