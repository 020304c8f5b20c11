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

#ifndef NSF_SRC_FFT_H_
#define NSF_SRC_FFT_H_

#include <complex>

namespace nsf::dsp::internal {

// Out-of-place complex transforms of length n backed by FFTW.  Plans are
// created once per (n, direction) and shared; execution is thread-safe.
// Forward uses exp(-j...), Backward exp(+j...) and neither is normalized.
void FftForward(const std::complex<double>* in, std::complex<double>* out, int n);
void FftBackward(const std::complex<double>* in, std::complex<double>* out, int n);

}  // namespace nsf::dsp::internal

#endif  // NSF_SRC_FFT_H_
