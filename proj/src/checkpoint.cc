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

#include "nsf/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "nsf/config.h"

namespace nsf::io {
namespace {

constexpr char kMagic[8] = {'N', 'S', 'F', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  void Bytes(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <typename U>
  void Int(U v) {
    using Raw = std::make_unsigned_t<U>;
    const Raw r = static_cast<Raw>(v);
    for (size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<uint8_t>(r >> (8 * i)));
  }
  void F32(float v) { Int(std::bit_cast<uint32_t>(v)); }
  void F64(double v) { Int(std::bit_cast<uint64_t>(v)); }
  void Str(const std::string& s) {
    Int(static_cast<uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  const std::vector<uint8_t>& data() const { return buf_; }

 private:
  std::vector<uint8_t> buf_;
};

class Reader {
 public:
  Reader(std::vector<uint8_t> buf, std::string path) : buf_(std::move(buf)), path_(std::move(path)) {}

  void Need(size_t n, const char* what) {
    if (pos_ + n > buf_.size()) {
      throw std::runtime_error("checkpoint '" + path_ + "' is truncated while reading " + what);
    }
  }
  template <typename U>
  U Int(const char* what) {
    Need(sizeof(U), what);
    std::make_unsigned_t<U> r = 0;
    for (size_t i = 0; i < sizeof(U); ++i) {
      r |= static_cast<std::make_unsigned_t<U>>(buf_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(r);
  }
  float F32(const char* what) { return std::bit_cast<float>(Int<uint32_t>(what)); }
  double F64(const char* what) { return std::bit_cast<double>(Int<uint64_t>(what)); }
  std::string Str(const char* what) {
    const uint32_t n = Int<uint32_t>(what);
    Need(n, what);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void Magic() {
    Need(sizeof(kMagic), "header");
    if (std::memcmp(buf_.data(), kMagic, sizeof(kMagic)) != 0) {
      throw std::runtime_error("'" + path_ + "' is not a model checkpoint");
    }
    pos_ += sizeof(kMagic);
  }
  bool AtEnd() const { return pos_ == buf_.size(); }
  [[noreturn]] void Fail(const std::string& why) const {
    throw std::runtime_error("checkpoint '" + path_ + "': " + why);
  }

 private:
  std::vector<uint8_t> buf_;
  std::string path_;
  size_t pos_ = 0;
};

}  // namespace

void SaveCheckpoint(const std::string& path, const model::NsfModel<float>& model) {
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.Int(kCheckpointVersion);
  config::KeyValueConfig kv;
  config::StoreModelConfig(model.config(), kv);
  w.Str(kv.ToString());

  const auto& params = model.params();
  w.Int(static_cast<uint32_t>(params.size()));
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    w.Str(p.name);
    w.Int(static_cast<uint32_t>(p.value.rank()));
    for (int64_t d : p.value.shape()) w.Int(d);
    for (float v : p.value.values()) w.F32(v);
  }

  const auto& bank = model.bank();
  const bool has_bank = !bank.filters[0].taps.empty();
  w.Int(static_cast<uint32_t>(has_bank ? bank.filters.size() : 0));
  if (has_bank) {
    for (size_t i = 0; i < bank.filters.size(); ++i) {
      const auto& s = bank.specs[i];
      w.Str(s.name);
      for (double v : {s.pass_lo, s.pass_hi, s.stop_lo, s.stop_hi, s.max_ripple_db,
                       s.min_attenuation_db, s.sample_rate}) {
        w.F64(v);
      }
      w.Int(static_cast<int32_t>(s.max_order));
      w.Int(static_cast<uint32_t>(bank.filters[i].taps.size()));
      for (double t : bank.filters[i].taps) w.F64(t);
    }
  }

  const auto& n = model.normalization();
  w.F64(n.f0_mean);
  w.F64(n.f0_std);
  w.Int(static_cast<uint32_t>(n.spectral_mean.size()));
  for (double v : n.spectral_mean) w.F64(v);
  w.Int(static_cast<uint32_t>(n.spectral_std.size()));
  for (double v : n.spectral_std) w.F64(v);

  // Write to a temporary name first so a crash never leaves a torn file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create '" + tmp + "'");
    out.write(reinterpret_cast<const char*>(w.data().data()),
              static_cast<std::streamsize>(w.data().size()));
    if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move checkpoint into place at '" + path + "'");
  }
}

model::NsfModel<float> LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  Reader r(std::vector<uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()),
           path);
  r.Magic();
  const uint32_t version = r.Int<uint32_t>("version");
  if (version != kCheckpointVersion) {
    r.Fail("unsupported format version " + std::to_string(version));
  }
  const model::ModelConfig cfg =
      config::ModelConfigFrom(config::KeyValueConfig::Parse(r.Str("configuration")));
  model::NsfModel<float> m = model::NsfModel<float>::Empty(cfg);

  const uint32_t count = r.Int<uint32_t>("parameter count");
  if (count != m.params().size()) {
    r.Fail("holds " + std::to_string(count) + " parameters, configuration implies " +
           std::to_string(m.params().size()));
  }
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = r.Str("parameter name");
    const uint32_t rank = r.Int<uint32_t>("parameter rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.Int<int64_t>("parameter shape");
    auto* p = m.params().Find(name);
    if (!p) r.Fail("unexpected parameter '" + name + "'");
    if (p->value.shape() != shape) {
      r.Fail("parameter '" + name + "' has shape " + ShapeString(shape) + ", expected " +
             ShapeString(p->value.shape()));
    }
    for (auto& v : p->value.values()) v = r.F32("parameter values");
  }

  const uint32_t filters = r.Int<uint32_t>("filter count");
  if (filters != 0) {
    if (filters != 4) r.Fail("expected 4 FIR filters, found " + std::to_string(filters));
    fir::FilterBank bank;
    for (uint32_t i = 0; i < filters; ++i) {
      auto& s = bank.specs[i];
      s.name = r.Str("filter name");
      s.pass_lo = r.F64("filter spec");
      s.pass_hi = r.F64("filter spec");
      s.stop_lo = r.F64("filter spec");
      s.stop_hi = r.F64("filter spec");
      s.max_ripple_db = r.F64("filter spec");
      s.min_attenuation_db = r.F64("filter spec");
      s.sample_rate = r.F64("filter spec");
      s.max_order = r.Int<int32_t>("filter spec");
      const uint32_t n = r.Int<uint32_t>("filter length");
      bank.filters[i].taps.resize(n);
      for (auto& t : bank.filters[i].taps) t = r.F64("filter taps");
    }
    m.set_bank(std::move(bank));
  } else if (cfg.kind == model::ModelKind::kHnNsf) {
    r.Fail("hn-nsf checkpoint has no filter bank");
  }

  auto& n = m.normalization();
  n.f0_mean = r.F64("normalization");
  n.f0_std = r.F64("normalization");
  n.spectral_mean.resize(r.Int<uint32_t>("normalization"));
  for (auto& v : n.spectral_mean) v = r.F64("normalization");
  n.spectral_std.resize(r.Int<uint32_t>("normalization"));
  for (auto& v : n.spectral_std) v = r.F64("normalization");
  if (!r.AtEnd()) r.Fail("trailing bytes after the normalization block");
  return m;
}

}  // namespace nsf::io
