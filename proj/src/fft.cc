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

#include "fft.h"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace nsf::dsp::internal {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan Get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(b.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& Cache() {
  static PlanCache cache;
  return cache;
}

void Execute(const std::complex<double>* in, std::complex<double>* out, int n, int sign) {
  fftw_plan plan = Cache().Get(n, sign);
  // FFTW does not modify the input of an out-of-place complex transform.
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void FftForward(const std::complex<double>* in, std::complex<double>* out, int n) {
  Execute(in, out, n, FFTW_FORWARD);
}

void FftBackward(const std::complex<double>* in, std::complex<double>* out, int n) {
  Execute(in, out, n, FFTW_BACKWARD);
}

}  // namespace nsf::dsp::internal
