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

// Helpers shared by the unit tests.

#ifndef NSF_TESTS_TEST_UTIL_H_
#define NSF_TESTS_TEST_UTIL_H_

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "nsf/graph.h"

namespace nsf::testing {

inline std::vector<double> RandomVector(size_t n, uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

template <typename T>
Tensor<T> RandomTensor(const Shape& shape, uint64_t seed, double scale = 1.0) {
  const auto v = RandomVector(static_cast<size_t>(ShapeSize(shape)), seed, scale);
  return Tensor<T>(shape, std::vector<T>(v.begin(), v.end()));
}

template <typename T>
void Randomize(ag::ParameterStore<T>& params, uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (size_t i = 0; i < params.size(); ++i) {
    for (auto& v : params[i].value.values()) v = static_cast<T>(u(rng));
  }
}

// Direct O(K M) DFT of a zero-padded frame, in long double.
inline std::vector<std::complex<long double>> DirectDft(std::span<const double> x, int K) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  std::vector<std::complex<long double>> y(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    std::complex<long double> s = 0.0L;
    for (size_t m = 0; m < x.size(); ++m) {
      s += static_cast<long double>(x[m]) *
           std::polar(1.0L, -two_pi * static_cast<long double>((static_cast<int64_t>(k) * static_cast<int64_t>(m)) % K) / K);
    }
    y[static_cast<size_t>(k)] = s;
  }
  return y;
}

inline double MaxAbs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace nsf::testing

#endif  // NSF_TESTS_TEST_UTIL_H_
