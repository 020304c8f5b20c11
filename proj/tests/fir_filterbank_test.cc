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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nsf/fir.h"
#include "nsf/grad_check.h"
#include "test_util.h"

namespace nsf::fir {
namespace {

constexpr double kPi = std::numbers::pi;

// Reference taps from scipy.signal.remez(numtaps, bands, [1, 0],
// weight=[1, dp / ds], fs=16000, grid_density=2048) with
// dp = 1 - 10^(-5/20) and ds = 10^(-40/20).
const std::vector<double> kLowpass6 = {
    -0.11597495363915644, -0.20850030420275856, 0.26380611955988836, 0.7031068301903108,
    0.26380611955988836,  -0.20850030420275856, -0.11597495363915644};
const std::vector<double> kLowpass8 = {
    0.02185300553579376, 0.05396089252351642, 0.0955995835758873,  0.13086449894195698,
    0.1447297790228444,  0.13086449894195698, 0.0955995835758873, 0.05396089252351642,
    0.02185300553579376};

double Rms(std::span<const double> v, size_t from, size_t to) {
  double s = 0.0;
  for (size_t i = from; i < to; ++i) s += v[i] * v[i];
  return std::sqrt(s / static_cast<double>(to - from));
}

TEST_CASE("default bank meets its band specifications") {
  const FilterBank bank = FilterBank::Design();
  for (size_t i = 0; i < 4; ++i) {
    const ResponseReport r = MeasureResponse(bank.filters[i].taps, bank.specs[i], 4096);
    CAPTURE(bank.specs[i].name);
    CHECK(r.meets_spec);
    CHECK(r.stopband_max_db <= -40.0);
    CHECK(r.passband_deviation_db <= 5.0);
    CHECK(bank.filters[i].order() >= 6);
    CHECK(bank.filters[i].order() <= 20);
  }
}

TEST_CASE("designed taps match the scipy reference") {
  const FilterBank bank = FilterBank::Design();
  const auto& vl = bank.filters[FilterBank::kVoicedLowpass].taps;
  const auto& ul = bank.filters[FilterBank::kUnvoicedLowpass].taps;
  REQUIRE(vl.size() == kLowpass6.size());
  REQUIRE(ul.size() == kLowpass8.size());
  for (size_t i = 0; i < vl.size(); ++i) CHECK(std::abs(vl[i] - kLowpass6[i]) <= 1e-6);
  for (size_t i = 0; i < ul.size(); ++i) CHECK(std::abs(ul[i] - kLowpass8[i]) <= 1e-6);
}

TEST_CASE("loose specification needs a low order") {
  FirSpec s{"loose", 0.0, 1000.0, 6000.0, 8000.0};
  const FirCoefficients c = DesignEquiripple(s);
  CHECK(c.order() <= 10);
  CHECK(MeasureResponse(c.taps, s).meets_spec);
}

TEST_CASE("unreachable specification fails with a message") {
  FirSpec s{"steep", 0.0, 4000.0, 4010.0, 8000.0};
  s.max_order = 20;
  CHECK_THROWS_WITH_AS(DesignEquiripple(s), doctest::Contains("steep"), std::runtime_error);
}

TEST_CASE("invalid specifications are rejected") {
  CHECK_THROWS_AS(FirSpec({"overlap", 0.0, 5000.0, 4000.0, 8000.0}).Validate(), std::invalid_argument);
  CHECK_THROWS_AS(FirSpec({"outside", 0.0, 5000.0, 7000.0, 9000.0}).Validate(), std::invalid_argument);
}

TEST_CASE("frequency response of simple filters") {
  const std::vector<double> one = {1.0};
  for (double v : FrequencyResponseDb(one, 17)) CHECK(v == doctest::Approx(0.0));
  const std::vector<double> avg = {0.5, 0.5};
  const auto db = FrequencyResponseDb(avg, 17);
  CHECK(db.back() < -200.0);  // a true zero, up to rounding of cos(pi / 2)
  CHECK(db[8] == doctest::Approx(20.0 * std::log10(std::cos(std::numbers::pi / 4.0))));
  CHECK(db.front() == doctest::Approx(0.0));
}

TEST_CASE("filtering: identity, delay compensation and passband sines") {
  const auto x = testing::RandomVector(50, 1);
  const std::vector<double> one = {1.0};
  CHECK(ApplyFir<double>(x, one) == x);

  const FilterBank bank = FilterBank::Design();
  const auto& taps = bank.filters[FilterBank::kUnvoicedLowpass].taps;
  std::vector<double> delta(41, 0.0);
  delta[20] = 1.0;
  const auto y = ApplyFir<double>(delta, taps);
  const int half = static_cast<int>(taps.size()) / 2;
  for (int j = -half; j <= half; ++j) {
    CHECK(y[static_cast<size_t>(20 + j)] == doctest::Approx(taps[static_cast<size_t>(half + j)]));
  }
  size_t peak = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) > std::abs(y[peak])) peak = i;
  }
  CHECK(peak == 20);

  // Passband centre of the voiced lowpass: 2.5 kHz.
  std::vector<double> s(4000);
  for (size_t t = 0; t < s.size(); ++t) s[t] = std::sin(2.0 * kPi * 2500.0 * t / 16000.0);
  const auto ys = ApplyFir<double>(s, bank.filters[FilterBank::kVoicedLowpass].taps);
  const double ratio_db = 20.0 * std::log10(Rms(ys, 100, 3900) / Rms(s, 100, 3900));
  CHECK(std::abs(ratio_db) <= 5.0);
}

TEST_CASE("adjoint filtering is the transpose") {
  const FilterBank bank = FilterBank::Design();
  const auto& taps = bank.filters[FilterBank::kVoicedHighpass].taps;
  const auto x = testing::RandomVector(37, 2), g = testing::RandomVector(37, 3);
  const auto ax = ApplyFir<double>(x, taps);
  const auto atg = ApplyFirAdjoint<double>(g, taps);
  double lhs = 0.0, rhs = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    lhs += ax[i] * g[i];
    rhs += x[i] * atg[i];
  }
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("merge picks the filter pair by voicing") {
  const FilterBank bank = FilterBank::Design();
  const auto h = testing::RandomVector(300, 4), n = testing::RandomVector(300, 5);
  const auto& f = bank.filters;
  const std::vector<double> on(300, 1.0), off(300, 0.0);
  const auto lv = ApplyFir<double>(h, f[FilterBank::kVoicedLowpass].taps);
  const auto hv = ApplyFir<double>(n, f[FilterBank::kVoicedHighpass].taps);
  const auto lu = ApplyFir<double>(h, f[FilterBank::kUnvoicedLowpass].taps);
  const auto hu = ApplyFir<double>(n, f[FilterBank::kUnvoicedHighpass].taps);
  const auto mv = MergeBranches(h, n, on, bank);
  const auto mu = MergeBranches(h, n, off, bank);
  for (size_t t = 0; t < 300; ++t) {
    CHECK(mv[t] == lv[t] + hv[t]);
    CHECK(mu[t] == lu[t] + hu[t]);
  }

  std::vector<double> s(4000), zero(4000, 0.0), voiced(4000, 1.0);
  for (size_t t = 0; t < s.size(); ++t) s[t] = std::sin(2.0 * kPi * 1000.0 * t / 16000.0);
  const auto m = MergeBranches(s, zero, voiced, bank);
  CHECK(std::abs(20.0 * std::log10(Rms(m, 100, 3900) / Rms(s, 100, 3900))) <= 5.0);

  const std::vector<double> short_v(299, 1.0);
  CHECK_THROWS_AS(MergeBranches(h, n, short_v, bank), std::invalid_argument);
}

TEST_CASE("merge node gradient matches central differences") {
  const FilterBank bank = FilterBank::Design();
  ag::Graph<double> g;
  ag::ParameterStore<double> p;
  const auto h = g.Input("h", {60, 1}, true);
  const auto n = g.Input("n", {60, 1}, true);
  const auto v = g.Input("v", {60, 1});
  AddFirMerge(g, h, n, v, bank);
  const auto hv = testing::RandomTensor<double>({60, 1}, 6);
  const auto nv = testing::RandomTensor<double>({60, 1}, 7);
  Tensor<double> vv({60, 1});
  for (int64_t t = 0; t < 60; ++t) vv[t] = t % 20 < 12 ? 1.0 : 0.0;
  const auto r = ag::CheckGraph(g, p, {{"h", &hv}, {"n", &nv}, {"v", &vv}});
  CHECK(r.checked == 120);
  CHECK(r.max_error <= 1e-7);
}

}  // namespace
}  // namespace nsf::fir
