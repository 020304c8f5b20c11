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

#include "nsf/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace nsf::io {
namespace {

uint32_t U32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t U16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
void Put32(std::vector<uint8_t>& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void Put16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(static_cast<uint8_t>(v));
  b.push_back(static_cast<uint8_t>(v >> 8));
}

}  // namespace

dsp::Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("'" + path + "': " + why);
  };
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    fail("RIFF header: not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(reinterpret_cast<const char*>(buf.data() + pos), 4);
    const size_t size = U32(buf.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + size > buf.size()) {
      if (id != "data") fail("chunk '" + id + "' is truncated");
    }
    if (id == "fmt ") {
      if (size < 16) fail("chunk 'fmt ' is too short");
      const uint16_t format = U16(buf.data() + body);
      const uint16_t channels = U16(buf.data() + body + 2);
      rate = U32(buf.data() + body + 4);
      const uint16_t bits = U16(buf.data() + body + 14);
      if (format != 1) fail("chunk 'fmt ': audio format " + std::to_string(format) + " is not PCM");
      if (channels != 1) fail("chunk 'fmt ': " + std::to_string(channels) + " channels, expected mono");
      if (bits != 16) fail("chunk 'fmt ': " + std::to_string(bits) + "-bit samples, expected 16");
      if (rate == 0) fail("chunk 'fmt ': sample rate is zero");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail("chunk 'data' precedes chunk 'fmt '");
      data = buf.data() + body;
      data_size = std::min(size, buf.size() - body);  // tolerate a short final chunk
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) fail("missing chunk 'fmt '");
  if (!data) fail("missing chunk 'data'");
  if (data_size < 2) fail("chunk 'data' holds no samples");

  dsp::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(data_size / 2);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const auto v = static_cast<int16_t>(U16(data + 2 * i));
    w.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  return w;
}

void WriteWav(const std::string& path, const dsp::Waveform& w) {
  w.Validate();
  const uint32_t rate = static_cast<uint32_t>(std::lround(w.sample_rate));
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  std::vector<uint8_t> b;
  b.reserve(44 + data_bytes);
  b.insert(b.end(), {'R', 'I', 'F', 'F'});
  Put32(b, 36 + data_bytes);
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  Put32(b, 16);
  Put16(b, 1);
  Put16(b, 1);
  Put32(b, rate);
  Put32(b, rate * 2);
  Put16(b, 2);
  Put16(b, 16);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  Put32(b, data_bytes);
  for (float s : w.samples) {
    const long q = std::clamp(std::lround(static_cast<double>(s) * 32768.0), -32768L, 32767L);
    Put16(b, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace nsf::io
