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

#include <algorithm>
#include <cmath>
#include <string>

#include "nsf/dsp.h"
#include "ops_internal.h"

namespace nsf::ag::internal {
namespace {

template <typename T>
using ConstMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using MutMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstRow = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <typename T>
using MutRow = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;

void Require(bool cond, const std::string& what) {
  if (!cond) throw ShapeError(what);
}

void RequireRank(const Shape& s, size_t rank, const char* what) {
  Require(s.size() == rank, std::string(what) + " must have rank " + std::to_string(rank) +
                                ", got " + ShapeString(s));
}

template <typename T>
ConstRow<T> AsRow(const Tensor<T>& t) {
  return ConstRow<T>(t.data(), t.size());
}

template <typename T>
MutRow<T> AsRow(Tensor<T>& t) {
  return MutRow<T>(t.data(), t.size());
}

// ---------------------------------------------------------------------------

template <typename T>
class MatMulOp final : public Op<T> {
 public:
  OpKind kind() const override { return OpKind::kMatMul; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 2 || in.size() == 3, "expects x, w and optional bias");
    RequireRank(in[0], 2, "x");
    RequireRank(in[1], 2, "w");
    Require(in[0][1] == in[1][0], "inner dimensions differ");
    if (in.size() == 3) {
      RequireRank(in[2], 1, "bias");
      Require(in[2][0] == in[1][1], "bias length differs from output width");
    }
    return {in[0][0], in[1][1]};
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    auto y = out.matrix();
    y.noalias() = in[0]->matrix() * in[1]->matrix();
    if (in.size() == 3) y.rowwise() += AsRow(*in[2]);
  }

  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (gin[0]) gin[0]->matrix().noalias() += g.matrix() * in[1]->matrix().transpose();
    if (gin[1]) gin[1]->matrix().noalias() += in[0]->matrix().transpose() * g.matrix();
    if (in.size() == 3 && gin[2]) AsRow(*gin[2]).noalias() += g.matrix().colwise().sum();
  }
};

// ---------------------------------------------------------------------------

template <typename T>
class Conv1dOp final : public Op<T> {
 public:
  Conv1dOp(int dilation, Padding padding) : dilation_(dilation), padding_(padding) {}

  OpKind kind() const override { return OpKind::kDilatedConv1d; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(dilation_ >= 1, "dilation must be >= 1");
    Require(in.size() == 2 || in.size() == 3, "expects x, w and optional bias");
    RequireRank(in[0], 2, "x");
    RequireRank(in[1], 3, "kernel");
    Require(in[0][1] == in[1][1], "input channels differ from kernel input channels");
    if (padding_ == Padding::kSame) Require(in[1][0] % 2 == 1, "same padding needs odd kernel");
    if (in.size() == 3) {
      RequireRank(in[2], 1, "bias");
      Require(in[2][0] == in[1][2], "bias length differs from output channels");
    }
    return {in[0][0], in[1][2]};
  }

  // Input row read by tap j for output row t is t + Offset(j).
  int64_t Offset(int64_t j, int64_t taps) const {
    if (padding_ == Padding::kCausal) return -(taps - 1 - j) * dilation_;
    return (j - (taps - 1) / 2) * dilation_;
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    const Tensor<T>& x = *in[0];
    const Tensor<T>& w = *in[1];
    const int64_t T_len = x.dim(0), cin = w.dim(1), cout = w.dim(2), taps = w.dim(0);
    auto y = out.matrix();
    if (in.size() == 3) {
      y.rowwise() = AsRow(*in[2]);
    } else {
      y.setZero();
    }
    auto xm = x.matrix();
    for (int64_t j = 0; j < taps; ++j) {
      const int64_t off = Offset(j, taps);
      const int64_t t0 = std::max<int64_t>(0, -off);
      const int64_t t1 = std::min<int64_t>(T_len, T_len - off);
      if (t1 <= t0) continue;
      ConstMap<T> wj(w.data() + j * cin * cout, cin, cout);
      y.middleRows(t0, t1 - t0).noalias() += xm.middleRows(t0 + off, t1 - t0) * wj;
    }
  }

  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    const Tensor<T>& x = *in[0];
    const Tensor<T>& w = *in[1];
    const int64_t T_len = x.dim(0), cin = w.dim(1), cout = w.dim(2), taps = w.dim(0);
    auto gm = g.matrix();
    auto xm = x.matrix();
    for (int64_t j = 0; j < taps; ++j) {
      const int64_t off = Offset(j, taps);
      const int64_t t0 = std::max<int64_t>(0, -off);
      const int64_t t1 = std::min<int64_t>(T_len, T_len - off);
      if (t1 <= t0) continue;
      ConstMap<T> wj(w.data() + j * cin * cout, cin, cout);
      if (gin[0]) {
        gin[0]->matrix().middleRows(t0 + off, t1 - t0).noalias() +=
            gm.middleRows(t0, t1 - t0) * wj.transpose();
      }
      if (gin[1]) {
        MutMap<T> dwj(gin[1]->data() + j * cin * cout, cin, cout);
        dwj.noalias() += xm.middleRows(t0 + off, t1 - t0).transpose() * gm.middleRows(t0, t1 - t0);
      }
    }
    if (in.size() == 3 && gin[2]) AsRow(*gin[2]).noalias() += gm.colwise().sum();
  }

 private:
  int dilation_;
  Padding padding_;
};

// ---------------------------------------------------------------------------

template <typename T>
class LstmOp final : public Op<T> {
 public:
  explicit LstmOp(bool reverse) : reverse_(reverse) {}

  OpKind kind() const override { return OpKind::kLstm; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 4, "expects x, w_input, w_recurrent, bias");
    RequireRank(in[0], 2, "x");
    RequireRank(in[1], 2, "w_input");
    RequireRank(in[2], 2, "w_recurrent");
    RequireRank(in[3], 1, "bias");
    const int64_t H = in[2][0];
    Require(in[1][0] == in[0][1], "w_input rows differ from input width");
    Require(in[1][1] == 4 * H && in[2][1] == 4 * H, "gate width must be 4 x hidden");
    Require(in[3][0] == 4 * H, "bias length must be 4 x hidden");
    return {in[0][0], H};
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    const Tensor<T>& x = *in[0];
    const int64_t B = x.dim(0);
    const int64_t H = in[2]->dim(0);
    gates_ = RowMatrix<T>(B, 4 * H);
    gates_.noalias() = x.matrix() * in[1]->matrix();
    gates_.rowwise() += AsRow(*in[3]);
    cell_ = RowMatrix<T>(B, H);
    tanh_cell_ = RowMatrix<T>(B, H);
    auto wh = in[2]->matrix();
    auto h = out.matrix();
    Eigen::Matrix<T, 1, Eigen::Dynamic> h_prev = Eigen::Matrix<T, 1, Eigen::Dynamic>::Zero(H);
    Eigen::Matrix<T, 1, Eigen::Dynamic> c_prev = Eigen::Matrix<T, 1, Eigen::Dynamic>::Zero(H);
    for (int64_t s = 0; s < B; ++s) {
      const int64_t t = reverse_ ? B - 1 - s : s;
      auto z = gates_.row(t);
      z.noalias() += h_prev * wh;
      auto sig = [](T v) { return T(1) / (T(1) + std::exp(-v)); };
      for (int64_t k = 0; k < H; ++k) {
        z(k) = sig(z(k));
        z(H + k) = sig(z(H + k));
        z(2 * H + k) = std::tanh(z(2 * H + k));
        z(3 * H + k) = sig(z(3 * H + k));
        const T c = z(H + k) * c_prev(k) + z(k) * z(2 * H + k);
        cell_(t, k) = c;
        tanh_cell_(t, k) = std::tanh(c);
        h(t, k) = z(3 * H + k) * tanh_cell_(t, k);
      }
      h_prev = h.row(t);
      c_prev = cell_.row(t);
    }
  }

  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>& out, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    const Tensor<T>& x = *in[0];
    const int64_t B = x.dim(0);
    const int64_t H = in[2]->dim(0);
    auto wh = in[2]->matrix();
    auto h = out.matrix();
    auto gm = g.matrix();
    RowMatrix<T> dz(B, 4 * H);
    Eigen::Matrix<T, 1, Eigen::Dynamic> dh_rec = Eigen::Matrix<T, 1, Eigen::Dynamic>::Zero(H);
    Eigen::Matrix<T, 1, Eigen::Dynamic> dc_next = Eigen::Matrix<T, 1, Eigen::Dynamic>::Zero(H);
    RowMatrix<T> dwh = RowMatrix<T>::Zero(H, 4 * H);
    for (int64_t s = B - 1; s >= 0; --s) {
      const int64_t t = reverse_ ? B - 1 - s : s;
      const int64_t tp = reverse_ ? t + 1 : t - 1;
      const bool has_prev = s > 0;
      for (int64_t k = 0; k < H; ++k) {
        const T i = gates_(t, k), f = gates_(t, H + k), gg = gates_(t, 2 * H + k),
                o = gates_(t, 3 * H + k);
        const T tc = tanh_cell_(t, k);
        const T c_prev = has_prev ? cell_(tp, k) : T(0);
        const T dh = gm(t, k) + dh_rec(k);
        const T dc = dh * o * (T(1) - tc * tc) + dc_next(k);
        dz(t, k) = dc * gg * i * (T(1) - i);
        dz(t, H + k) = dc * c_prev * f * (T(1) - f);
        dz(t, 2 * H + k) = dc * i * (T(1) - gg * gg);
        dz(t, 3 * H + k) = dh * tc * o * (T(1) - o);
        dc_next(k) = dc * f;
      }
      if (has_prev) dwh.noalias() += h.row(tp).transpose() * dz.row(t);
      dh_rec.noalias() = dz.row(t) * wh.transpose();
    }
    if (gin[0]) gin[0]->matrix().noalias() += dz * in[1]->matrix().transpose();
    if (gin[1]) gin[1]->matrix().noalias() += x.matrix().transpose() * dz;
    if (gin[2]) gin[2]->matrix() += dwh;
    if (gin[3]) AsRow(*gin[3]).noalias() += dz.colwise().sum();
  }

 private:
  bool reverse_;
  RowMatrix<T> gates_;  // post-activation i, f, g, o
  RowMatrix<T> cell_;
  RowMatrix<T> tanh_cell_;
};

// ---------------------------------------------------------------------------

template <typename T>
class AddOp final : public Op<T> {
 public:
  OpKind kind() const override { return OpKind::kAdd; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(!in.empty(), "needs at least one operand");
    for (const auto& s : in) Require(s == in[0], "operand shapes differ");
    return in[0];
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    auto y = AsRow(out);
    y = AsRow(*in[0]);
    for (size_t i = 1; i < in.size(); ++i) y += AsRow(*in[i]);
  }

  void Backward(std::span<const Tensor<T>* const>, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    for (auto* d : gin) {
      if (d) AsRow(*d) += AsRow(g);
    }
  }
};

template <typename T>
class MultiplyOp final : public Op<T> {
 public:
  OpKind kind() const override { return OpKind::kMultiply; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 2, "expects two operands");
    Require(in[0] == in[1], "operand shapes differ");
    return in[0];
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    AsRow(out) = AsRow(*in[0]).cwiseProduct(AsRow(*in[1]));
  }

  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (gin[0]) AsRow(*gin[0]) += AsRow(g).cwiseProduct(AsRow(*in[1]));
    if (gin[1]) AsRow(*gin[1]) += AsRow(g).cwiseProduct(AsRow(*in[0]));
  }
};

template <typename T>
class UnaryOp final : public Op<T> {
 public:
  explicit UnaryOp(OpKind kind) : kind_(kind) {}

  OpKind kind() const override { return kind_; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 1, "expects one operand");
    return in[0];
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    auto x = AsRow(*in[0]).array();
    auto y = AsRow(out).array();
    switch (kind_) {
      case OpKind::kTanh: y = x.tanh(); break;
      case OpKind::kSigmoid: y = T(1) / (T(1) + (-x).exp()); break;
      case OpKind::kExp: y = x.exp(); break;
      default: throw std::logic_error("not a unary op");
    }
  }

  void Backward(std::span<const Tensor<T>* const>, const Tensor<T>& out, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (!gin[0]) return;
    auto y = AsRow(out).array();
    auto d = AsRow(*gin[0]).array();
    auto gg = AsRow(g).array();
    switch (kind_) {
      case OpKind::kTanh: d += gg * (T(1) - y * y); break;
      case OpKind::kSigmoid: d += gg * y * (T(1) - y); break;
      case OpKind::kExp: d += gg * y; break;
      default: throw std::logic_error("not a unary op");
    }
  }

 private:
  OpKind kind_;
};

template <typename T>
class ScaleOp final : public Op<T> {
 public:
  explicit ScaleOp(double factor) : factor_(static_cast<T>(factor)) {}
  OpKind kind() const override { return OpKind::kScale; }
  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 1, "expects one operand");
    return in[0];
  }
  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    AsRow(out) = AsRow(*in[0]) * factor_;
  }
  void Backward(std::span<const Tensor<T>* const>, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (gin[0]) AsRow(*gin[0]) += AsRow(g) * factor_;
  }

 private:
  T factor_;
};

// ---------------------------------------------------------------------------

template <typename T>
class ConcatOp final : public Op<T> {
 public:
  OpKind kind() const override { return OpKind::kConcat; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(!in.empty(), "needs at least one operand");
    int64_t cols = 0;
    for (const auto& s : in) {
      RequireRank(s, 2, "operand");
      Require(s[0] == in[0][0], "row counts differ");
      cols += s[1];
    }
    return {in[0][0], cols};
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    auto y = out.matrix();
    int64_t c = 0;
    for (const auto* t : in) {
      y.middleCols(c, t->dim(1)) = t->matrix();
      c += t->dim(1);
    }
  }

  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    int64_t c = 0;
    for (size_t i = 0; i < in.size(); ++i) {
      if (gin[i]) gin[i]->matrix() += g.matrix().middleCols(c, in[i]->dim(1));
      c += in[i]->dim(1);
    }
  }
};

template <typename T>
class SliceColsOp final : public Op<T> {
 public:
  SliceColsOp(int64_t begin, int64_t end) : begin_(begin), end_(end) {}
  OpKind kind() const override { return OpKind::kSliceCols; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 1, "expects one operand");
    RequireRank(in[0], 2, "operand");
    Require(0 <= begin_ && begin_ < end_ && end_ <= in[0][1], "column range out of bounds");
    return {in[0][0], end_ - begin_};
  }
  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    out.matrix() = in[0]->matrix().middleCols(begin_, end_ - begin_);
  }
  void Backward(std::span<const Tensor<T>* const>, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (gin[0]) gin[0]->matrix().middleCols(begin_, end_ - begin_) += g.matrix();
  }

 private:
  int64_t begin_, end_;
};

template <typename T>
class UpsampleOp final : public Op<T> {
 public:
  explicit UpsampleOp(int64_t factor) : factor_(factor) {}
  OpKind kind() const override { return OpKind::kUpsample; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(factor_ >= 1, "factor must be >= 1");
    Require(in.size() == 1, "expects one operand");
    RequireRank(in[0], 2, "operand");
    return {in[0][0] * factor_, in[0][1]};
  }
  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    auto x = in[0]->matrix();
    auto y = out.matrix();
    for (int64_t b = 0; b < x.rows(); ++b) {
      y.middleRows(b * factor_, factor_).rowwise() = x.row(b);
    }
  }
  void Backward(std::span<const Tensor<T>* const>, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (!gin[0]) return;
    auto d = gin[0]->matrix();
    auto gm = g.matrix();
    for (int64_t b = 0; b < d.rows(); ++b) {
      d.row(b) += gm.middleRows(b * factor_, factor_).colwise().sum();
    }
  }

 private:
  int64_t factor_;
};

template <typename T>
class GateOp final : public Op<T> {
 public:
  OpKind kind() const override { return OpKind::kGate; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(in.size() == 1, "expects one operand");
    RequireRank(in[0], 2, "operand");
    Require(in[0][1] % 2 == 0, "column count must be even");
    return {in[0][0], in[0][1] / 2};
  }
  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    const int64_t C = out.dim(1);
    auto x = in[0]->matrix();
    out.matrix().array() = x.leftCols(C).array().tanh() *
                           (T(1) / (T(1) + (-x.rightCols(C).array()).exp()));
  }
  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (!gin[0]) return;
    const int64_t C = g.dim(1);
    auto x = in[0]->matrix();
    RowMatrix<T> a = x.leftCols(C).array().tanh().matrix();
    RowMatrix<T> s = (T(1) / (T(1) + (-x.rightCols(C).array()).exp())).matrix();
    auto gm = g.matrix().array();
    auto d = gin[0]->matrix();
    d.leftCols(C).array() += gm * s.array() * (T(1) - a.array().square());
    d.rightCols(C).array() += gm * a.array() * s.array() * (T(1) - s.array());
  }
};

template <typename T>
class FrameWindowOp final : public Op<T> {
 public:
  FrameWindowOp(int frame_length, int frame_shift)
      : frame_length_(frame_length), frame_shift_(frame_shift),
        window_(dsp::HannWindow(frame_length)) {}

  OpKind kind() const override { return OpKind::kFrameWindow; }

  Shape OutputShape(std::span<const Shape> in) const override {
    Require(frame_length_ >= 1 && frame_shift_ >= 1 && frame_shift_ <= frame_length_,
            "invalid framing");
    Require(in.size() == 1, "expects one operand");
    Require(ShapeSize(in[0]) == in[0][0], "signal must be a single column");
    return {dsp::NumFrames(in[0][0], frame_length_, frame_shift_), frame_length_};
  }
  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    const int64_t T_len = in[0]->size();
    const T* x = in[0]->data();
    for (int64_t n = 0; n < out.dim(0); ++n) {
      for (int64_t m = 0; m < frame_length_; ++m) {
        const int64_t t = n * frame_shift_ + m;
        out.at(n, m) = t < T_len ? static_cast<T>(window_[static_cast<size_t>(m)]) * x[t] : T(0);
      }
    }
  }
  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    if (!gin[0]) return;
    const int64_t T_len = in[0]->size();
    T* d = gin[0]->data();
    for (int64_t n = 0; n < g.dim(0); ++n) {
      for (int64_t m = 0; m < frame_length_; ++m) {
        const int64_t t = n * frame_shift_ + m;
        if (t < T_len) d[t] += static_cast<T>(window_[static_cast<size_t>(m)]) * g.at(n, m);
      }
    }
  }

 private:
  int frame_length_, frame_shift_;
  std::vector<double> window_;
};

}  // namespace

template <typename T> std::unique_ptr<Op<T>> MakeMatMul() {
  return std::make_unique<MatMulOp<T>>();
}
template <typename T> std::unique_ptr<Op<T>> MakeConv1d(int dilation, Padding padding) {
  return std::make_unique<Conv1dOp<T>>(dilation, padding);
}
template <typename T> std::unique_ptr<Op<T>> MakeLstm(bool reverse) {
  return std::make_unique<LstmOp<T>>(reverse);
}
template <typename T> std::unique_ptr<Op<T>> MakeAdd() { return std::make_unique<AddOp<T>>(); }
template <typename T> std::unique_ptr<Op<T>> MakeMultiply() {
  return std::make_unique<MultiplyOp<T>>();
}
template <typename T> std::unique_ptr<Op<T>> MakeUnary(OpKind kind) {
  return std::make_unique<UnaryOp<T>>(kind);
}
template <typename T> std::unique_ptr<Op<T>> MakeScale(double factor) {
  return std::make_unique<ScaleOp<T>>(factor);
}
template <typename T> std::unique_ptr<Op<T>> MakeConcat() {
  return std::make_unique<ConcatOp<T>>();
}
template <typename T> std::unique_ptr<Op<T>> MakeSliceCols(int64_t begin, int64_t end) {
  return std::make_unique<SliceColsOp<T>>(begin, end);
}
template <typename T> std::unique_ptr<Op<T>> MakeUpsample(int64_t factor) {
  return std::make_unique<UpsampleOp<T>>(factor);
}
template <typename T> std::unique_ptr<Op<T>> MakeGate() { return std::make_unique<GateOp<T>>(); }
template <typename T> std::unique_ptr<Op<T>> MakeFrameWindow(int frame_length, int frame_shift) {
  return std::make_unique<FrameWindowOp<T>>(frame_length, frame_shift);
}

#define NSF_INSTANTIATE_OPS(T)                                                   \
  template std::unique_ptr<Op<T>> MakeMatMul<T>();                               \
  template std::unique_ptr<Op<T>> MakeConv1d<T>(int, Padding);                   \
  template std::unique_ptr<Op<T>> MakeLstm<T>(bool);                             \
  template std::unique_ptr<Op<T>> MakeAdd<T>();                                  \
  template std::unique_ptr<Op<T>> MakeMultiply<T>();                             \
  template std::unique_ptr<Op<T>> MakeUnary<T>(OpKind);                          \
  template std::unique_ptr<Op<T>> MakeScale<T>(double);                          \
  template std::unique_ptr<Op<T>> MakeConcat<T>();                               \
  template std::unique_ptr<Op<T>> MakeSliceCols<T>(int64_t, int64_t);            \
  template std::unique_ptr<Op<T>> MakeUpsample<T>(int64_t);                      \
  template std::unique_ptr<Op<T>> MakeGate<T>();                                 \
  template std::unique_ptr<Op<T>> MakeFrameWindow<T>(int, int);

NSF_INSTANTIATE_OPS(float)
NSF_INSTANTIATE_OPS(double)

#undef NSF_INSTANTIATE_OPS

}  // namespace nsf::ag::internal
