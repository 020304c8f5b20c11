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

#include "nsf/fir.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nsf::fir {
namespace {

constexpr double kPi = std::numbers::pi;

// Lagrange interpolation in barycentric form through (x_i, y_i).
class Barycentric {
 public:
  Barycentric(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    w_ = Weights(x_);
  }

  static std::vector<double> Weights(const std::vector<double>& x) {
    std::vector<double> w(x.size(), 1.0);
    for (size_t i = 0; i < x.size(); ++i) {
      for (size_t j = 0; j < x.size(); ++j) {
        // The factor 2 keeps the products in range for a few dozen nodes.
        if (j != i) w[i] /= 2.0 * (x[i] - x[j]);
      }
    }
    return w;
  }

  double operator()(double x) const {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x_.size(); ++i) {
      const double d = x - x_[i];
      if (d == 0.0) return y_[i];
      const double c = w_[i] / d;
      num += c * y_[i];
      den += c;
    }
    return num / den;
  }

 private:
  std::vector<double> x_, y_, w_;
};

struct Grid {
  std::vector<double> f;  // cycles per sample
  std::vector<double> desired;
  std::vector<double> weight;
  std::vector<size_t> band_start;  // first index of each band, plus end
};

Grid MakeGrid(const std::vector<RemezBand>& bands, int r, int density) {
  Grid g;
  const double step = std::min(0.5 / (density * r), 1.0 / 4096.0);
  for (const RemezBand& b : bands) {
    g.band_start.push_back(g.f.size());
    const int n = std::max(2, static_cast<int>(std::ceil((b.hi - b.lo) / step)) + 1);
    for (int i = 0; i < n; ++i) {
      g.f.push_back(b.lo + (b.hi - b.lo) * i / (n - 1));
      g.desired.push_back(b.desired);
      g.weight.push_back(b.weight);
    }
  }
  g.band_start.push_back(g.f.size());
  return g;
}

// Local extrema of the error, each band scanned on its own so band edges are
// always eligible.
std::vector<size_t> LocalExtrema(const std::vector<double>& e, const Grid& g) {
  std::vector<size_t> out;
  for (size_t b = 0; b + 1 < g.band_start.size(); ++b) {
    const size_t lo = g.band_start[b], hi = g.band_start[b + 1];
    for (size_t j = lo; j < hi; ++j) {
      const double v = e[j];
      const double prev = j > lo ? e[j - 1] : (v > 0 ? -std::numeric_limits<double>::infinity()
                                                     : std::numeric_limits<double>::infinity());
      const double next = j + 1 < hi ? e[j + 1]
                                     : (v > 0 ? -std::numeric_limits<double>::infinity()
                                              : std::numeric_limits<double>::infinity());
      if ((v > 0 && v >= prev && v > next) || (v < 0 && v <= prev && v < next)) out.push_back(j);
    }
  }
  return out;
}

// Picks `count` alternating extrema out of the candidates.
std::vector<size_t> SelectAlternating(std::vector<size_t> cand, const std::vector<double>& e,
                                      size_t count) {
  auto sign = [&](size_t j) { return e[j] > 0; };
  std::vector<size_t> alt;
  for (size_t j : cand) {
    if (!alt.empty() && sign(alt.back()) == sign(j)) {
      if (std::abs(e[j]) > std::abs(e[alt.back()])) alt.back() = j;
    } else {
      alt.push_back(j);
    }
  }
  while (alt.size() > count) {
    const size_t excess = alt.size() - count;
    if (excess == 1) {
      // Dropping an end keeps the alternation intact.
      if (std::abs(e[alt.front()]) < std::abs(e[alt.back()])) {
        alt.erase(alt.begin());
      } else {
        alt.pop_back();
      }
      continue;
    }
    size_t k = 0;
    for (size_t i = 1; i < alt.size(); ++i) {
      if (std::abs(e[alt[i]]) < std::abs(e[alt[k]])) k = i;
    }
    alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(k));
    if (k > 0 && k < alt.size()) {
      // The two former neighbours now have the same sign; keep the larger.
      const size_t a = k - 1;
      if (std::abs(e[alt[a]]) < std::abs(e[alt[k]])) {
        alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(a));
      } else {
        alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(k));
      }
    }
  }
  return alt;
}

}  // namespace

void FirSpec::Validate() const {
  const double nyq = sample_rate / 2.0;
  auto bad = [&](const std::string& why) {
    throw std::invalid_argument("FIR spec '" + name + "': " + why);
  };
  if (!(sample_rate > 0.0)) bad("sample rate must be positive");
  if (!(pass_lo >= 0.0 && pass_lo < pass_hi && pass_hi <= nyq)) bad("invalid passband");
  if (!(stop_lo >= 0.0 && stop_lo < stop_hi && stop_hi <= nyq)) bad("invalid stopband");
  if (!(pass_hi <= stop_lo || stop_hi <= pass_lo)) bad("passband and stopband overlap");
  if (IsLowpass()) {
    if (pass_lo != 0.0 || stop_hi != nyq) bad("lowpass bands must cover 0 and fs/2");
  } else if (stop_lo != 0.0 || pass_hi != nyq) {
    bad("highpass bands must cover 0 and fs/2");
  }
  if (!(max_ripple_db > 0.0)) bad("passband ripple must be positive");
  if (!(min_attenuation_db > 0.0)) bad("stopband attenuation must be positive");
  if (max_order < 2) bad("max_order must be >= 2");
}

RemezResult Remez(int order, const std::vector<RemezBand>& bands, int grid_density) {
  if (order < 2 || order % 2 != 0) throw std::invalid_argument("Remez order must be even, >= 2");
  if (bands.empty()) throw std::invalid_argument("Remez needs at least one band");
  for (const auto& b : bands) {
    if (!(b.lo >= 0.0 && b.lo < b.hi && b.hi <= 0.5 && b.weight > 0.0)) {
      throw std::invalid_argument("invalid Remez band");
    }
  }
  const int half = order / 2;
  const int r = half + 1;  // cosine terms
  const Grid g = MakeGrid(bands, r, grid_density);
  const size_t ng = g.f.size();
  if (ng < static_cast<size_t>(r + 1)) throw std::invalid_argument("Remez grid too coarse");

  std::vector<double> x(ng);
  for (size_t j = 0; j < ng; ++j) x[j] = std::cos(2.0 * kPi * g.f[j]);

  std::vector<size_t> ext(static_cast<size_t>(r + 1));
  for (int i = 0; i <= r; ++i) {
    ext[static_cast<size_t>(i)] =
        static_cast<size_t>(std::llround(static_cast<double>(i) * (ng - 1) / r));
  }

  RemezResult result;
  std::vector<double> err(ng);
  Barycentric interp({0.0}, {0.0});
  double delta = 0.0;
  for (int iter = 1; iter <= 200; ++iter) {
    result.iterations = iter;
    std::vector<double> xe(ext.size());
    for (size_t i = 0; i < ext.size(); ++i) xe[i] = x[ext[i]];
    const std::vector<double> b = Barycentric::Weights(xe);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < ext.size(); ++i) {
      const double s = (i % 2 == 0) ? 1.0 : -1.0;
      num += b[i] * g.desired[ext[i]];
      den += s * b[i] / g.weight[ext[i]];
    }
    delta = num / den;
    std::vector<double> xs(static_cast<size_t>(r)), ys(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) {
      const size_t j = ext[static_cast<size_t>(i)];
      const double s = (i % 2 == 0) ? 1.0 : -1.0;
      xs[static_cast<size_t>(i)] = x[j];
      ys[static_cast<size_t>(i)] = g.desired[j] - s * delta / g.weight[j];
    }
    interp = Barycentric(xs, ys);

    double max_err = 0.0;
    for (size_t j = 0; j < ng; ++j) {
      err[j] = g.weight[j] * (g.desired[j] - interp(x[j]));
      max_err = std::max(max_err, std::abs(err[j]));
    }

    std::vector<size_t> cand;
    for (size_t j : LocalExtrema(err, g)) {
      if (std::abs(err[j]) >= std::abs(delta) * (1.0 - 1e-9)) cand.push_back(j);
    }
    std::vector<size_t> next = SelectAlternating(cand, err, ext.size());
    if (next.size() < ext.size()) break;  // cannot improve the set further
    const bool same = next == ext;
    ext = std::move(next);
    if (same || max_err - std::abs(delta) <= 1e-10 * std::max(max_err, 1e-300)) {
      result.converged = true;
      break;
    }
  }
  result.deviation = std::abs(delta);

  // Sample the amplitude response at L + 1 points and invert.
  const int n_taps = order + 1;
  std::vector<double> amp(static_cast<size_t>(n_taps));
  for (int i = 0; i < n_taps; ++i) {
    amp[static_cast<size_t>(i)] = interp(std::cos(2.0 * kPi * i / n_taps));
  }
  result.taps.assign(static_cast<size_t>(n_taps), 0.0);
  for (int n = 0; n <= half; ++n) {
    double s = 0.0;
    for (int i = 0; i < n_taps; ++i) {
      s += amp[static_cast<size_t>(i)] * std::cos(2.0 * kPi * i * (n - half) / n_taps);
    }
    s /= n_taps;
    result.taps[static_cast<size_t>(n)] = s;
    result.taps[static_cast<size_t>(order - n)] = s;
  }
  return result;
}

int EstimateOrder(const FirSpec& spec) {
  spec.Validate();
  const double dp = 1.0 - std::pow(10.0, -spec.max_ripple_db / 20.0);
  const double ds = std::pow(10.0, -spec.min_attenuation_db / 20.0);
  const double lp = std::log10(dp), ls = std::log10(ds);
  const double d_inf = (5.309e-3 * lp * lp + 7.114e-2 * lp - 0.4761) * ls +
                       (-2.66e-3 * lp * lp - 0.5941 * lp - 0.4278);
  const double f = 11.01217 + 0.51244 * (lp - ls);
  const double width = spec.IsLowpass() ? (spec.stop_lo - spec.pass_hi) / spec.sample_rate
                                        : (spec.pass_lo - spec.stop_hi) / spec.sample_rate;
  const double length = d_inf / width - f * width + 1.0;
  int order = static_cast<int>(std::ceil(length - 1.0 - 1e-9));
  order = std::max(order, 2);
  if (order % 2 != 0) ++order;
  return order;
}

std::vector<double> FrequencyResponseDb(std::span<const double> taps, int grid) {
  if (grid < 2) throw std::invalid_argument("response grid needs >= 2 points");
  std::vector<double> out(static_cast<size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double w = kPi * i / (grid - 1);
    std::complex<double> h(0.0, 0.0);
    for (size_t n = 0; n < taps.size(); ++n) {
      h += taps[n] * std::polar(1.0, -w * static_cast<double>(n));
    }
    const double mag = std::abs(h);
    out[static_cast<size_t>(i)] =
        mag > 0.0 ? 20.0 * std::log10(mag) : -std::numeric_limits<double>::infinity();
  }
  return out;
}

ResponseReport MeasureResponse(std::span<const double> taps, const FirSpec& spec, int grid) {
  spec.Validate();
  const std::vector<double> db = FrequencyResponseDb(taps, grid);
  ResponseReport rep;
  double pass_min = std::numeric_limits<double>::infinity();
  double pass_max = -std::numeric_limits<double>::infinity();
  rep.stopband_max_db = -std::numeric_limits<double>::infinity();
  const double nyq = spec.sample_rate / 2.0;
  for (int i = 0; i < grid; ++i) {
    const double hz = nyq * i / (grid - 1);
    const double v = db[static_cast<size_t>(i)];
    if (hz >= spec.pass_lo && hz <= spec.pass_hi) {
      pass_min = std::min(pass_min, v);
      pass_max = std::max(pass_max, v);
      rep.passband_deviation_db = std::max(rep.passband_deviation_db, std::abs(v));
    }
    if (hz >= spec.stop_lo && hz <= spec.stop_hi) {
      rep.stopband_max_db = std::max(rep.stopband_max_db, v);
    }
  }
  rep.passband_peak_to_peak_db = pass_max - pass_min;
  rep.meets_spec = rep.passband_deviation_db <= spec.max_ripple_db &&
                   rep.stopband_max_db <= -spec.min_attenuation_db;
  return rep;
}

FirCoefficients DesignEquiripple(const FirSpec& spec) {
  spec.Validate();
  const double dp = 1.0 - std::pow(10.0, -spec.max_ripple_db / 20.0);
  const double ds = std::pow(10.0, -spec.min_attenuation_db / 20.0);
  const double fs = spec.sample_rate;
  RemezBand pass{spec.pass_lo / fs, spec.pass_hi / fs, 1.0, 1.0};
  RemezBand stop{spec.stop_lo / fs, spec.stop_hi / fs, 0.0, dp / ds};
  const std::vector<RemezBand> bands =
      spec.IsLowpass() ? std::vector<RemezBand>{pass, stop} : std::vector<RemezBand>{stop, pass};
  for (int order = EstimateOrder(spec); order <= spec.max_order; order += 2) {
    RemezResult r = Remez(order, bands);
    if (MeasureResponse(r.taps, spec).meets_spec) return {std::move(r.taps)};
  }
  throw std::runtime_error("FIR spec '" + spec.name + "' cannot be met with order <= " +
                           std::to_string(spec.max_order));
}

template <typename T>
std::vector<T> ApplyFir(std::span<const T> x, std::span<const double> taps) {
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t L = static_cast<int64_t>(taps.size()) - 1;
  const int64_t shift = L / 2;
  std::vector<T> y(x.size());
  for (int64_t t = 0; t < n; ++t) {
    double s = 0.0;
    for (int64_t j = 0; j <= L; ++j) {
      const int64_t k = t + shift - j;
      if (k >= 0 && k < n) s += taps[static_cast<size_t>(j)] * static_cast<double>(x[static_cast<size_t>(k)]);
    }
    y[static_cast<size_t>(t)] = static_cast<T>(s);
  }
  return y;
}

template <typename T>
std::vector<T> ApplyFirAdjoint(std::span<const T> g, std::span<const double> taps) {
  const int64_t n = static_cast<int64_t>(g.size());
  const int64_t L = static_cast<int64_t>(taps.size()) - 1;
  const int64_t shift = L / 2;
  std::vector<T> x(g.size());
  for (int64_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (int64_t j = 0; j <= L; ++j) {
      const int64_t t = s - shift + j;
      if (t >= 0 && t < n) acc += taps[static_cast<size_t>(j)] * static_cast<double>(g[static_cast<size_t>(t)]);
    }
    x[static_cast<size_t>(s)] = static_cast<T>(acc);
  }
  return x;
}

template std::vector<float> ApplyFir(std::span<const float>, std::span<const double>);
template std::vector<double> ApplyFir(std::span<const double>, std::span<const double>);
template std::vector<float> ApplyFirAdjoint(std::span<const float>, std::span<const double>);
template std::vector<double> ApplyFirAdjoint(std::span<const double>, std::span<const double>);

std::array<FirSpec, 4> FilterBank::DefaultSpecs(double sample_rate) {
  // Band edges scale with the sampling rate; the defaults are for 16 kHz.
  const double k = sample_rate / 16000.0;
  const double nyq = sample_rate / 2.0;
  std::array<FirSpec, 4> s;
  s[kVoicedLowpass] = {"voiced_lowpass", 0.0, 5000.0 * k, 7000.0 * k, nyq};
  s[kVoicedHighpass] = {"voiced_highpass", 7000.0 * k, nyq, 0.0, 5000.0 * k};
  s[kUnvoicedLowpass] = {"unvoiced_lowpass", 0.0, 1000.0 * k, 3000.0 * k, nyq};
  s[kUnvoicedHighpass] = {"unvoiced_highpass", 3000.0 * k, nyq, 0.0, 1000.0 * k};
  for (auto& spec : s) spec.sample_rate = sample_rate;
  return s;
}

FilterBank FilterBank::Design(const std::array<FirSpec, 4>& specs) {
  FilterBank bank;
  bank.specs = specs;
  for (size_t i = 0; i < specs.size(); ++i) bank.filters[i] = DesignEquiripple(specs[i]);
  return bank;
}

std::vector<double> MergeBranches(std::span<const double> harmonic, std::span<const double> noise,
                                  std::span<const double> voiced, const FilterBank& bank) {
  if (harmonic.size() != noise.size() || harmonic.size() != voiced.size()) {
    throw std::invalid_argument("merge inputs differ in length: harmonic " +
                                std::to_string(harmonic.size()) + ", noise " +
                                std::to_string(noise.size()) + ", voicing " +
                                std::to_string(voiced.size()));
  }
  const auto& f = bank.filters;
  const auto lv = ApplyFir(harmonic, f[FilterBank::kVoicedLowpass].taps);
  const auto hv = ApplyFir(noise, f[FilterBank::kVoicedHighpass].taps);
  const auto lu = ApplyFir(harmonic, f[FilterBank::kUnvoicedLowpass].taps);
  const auto hu = ApplyFir(noise, f[FilterBank::kUnvoicedHighpass].taps);
  std::vector<double> out(harmonic.size());
  for (size_t t = 0; t < out.size(); ++t) {
    out[t] = voiced[t] > 0.5 ? lv[t] + hv[t] : lu[t] + hu[t];
  }
  return out;
}

namespace {

template <typename T>
class FirMergeOp final : public ag::Op<T> {
 public:
  explicit FirMergeOp(FilterBank bank) : bank_(std::move(bank)) {}

  ag::OpKind kind() const override { return ag::OpKind::kFirMerge; }

  Shape OutputShape(std::span<const Shape> in) const override {
    if (in.size() != 3) throw ShapeError("expects harmonic, noise and voicing operands");
    for (const auto& s : in) {
      if (s != in[0]) {
        throw ShapeError("operand shapes differ: " + ShapeString(in[0]) + " vs " +
                         ShapeString(s));
      }
    }
    if (ShapeSize(in[0]) != in[0][0]) throw ShapeError("operands must be single columns");
    return in[0];
  }

  void Forward(std::span<const Tensor<T>* const> in, Tensor<T>& out) override {
    const std::vector<double> h(in[0]->values().begin(), in[0]->values().end());
    const std::vector<double> n(in[1]->values().begin(), in[1]->values().end());
    const std::vector<double> v(in[2]->values().begin(), in[2]->values().end());
    const std::vector<double> y = MergeBranches(h, n, v, bank_);
    for (size_t t = 0; t < y.size(); ++t) out[static_cast<int64_t>(t)] = static_cast<T>(y[t]);
  }

  void Backward(std::span<const Tensor<T>* const> in, const Tensor<T>&, const Tensor<T>& g,
                std::span<Tensor<T>* const> gin) override {
    const size_t n = static_cast<size_t>(g.size());
    std::vector<double> gv(n), gu(n);
    for (size_t t = 0; t < n; ++t) {
      const bool voiced = (*in[2])[static_cast<int64_t>(t)] > T(0.5);
      (voiced ? gv : gu)[t] = static_cast<double>(g[static_cast<int64_t>(t)]);
    }
    const auto& f = bank_.filters;
    auto accumulate = [&](Tensor<T>* d, int iv, int iu) {
      if (!d) return;
      const auto a = ApplyFirAdjoint<double>(gv, f[static_cast<size_t>(iv)].taps);
      const auto b = ApplyFirAdjoint<double>(gu, f[static_cast<size_t>(iu)].taps);
      for (size_t t = 0; t < n; ++t) (*d)[static_cast<int64_t>(t)] += static_cast<T>(a[t] + b[t]);
    };
    accumulate(gin[0], FilterBank::kVoicedLowpass, FilterBank::kUnvoicedLowpass);
    accumulate(gin[1], FilterBank::kVoicedHighpass, FilterBank::kUnvoicedHighpass);
  }

 private:
  FilterBank bank_;
};

}  // namespace

template <typename T>
ag::NodeId AddFirMerge(ag::Graph<T>& graph, ag::NodeId harmonic, ag::NodeId noise,
                       ag::NodeId voiced, const FilterBank& bank) {
  return graph.Apply(std::make_unique<FirMergeOp<T>>(bank), {harmonic, noise, voiced},
                     "fir_merge");
}

template ag::NodeId AddFirMerge(ag::Graph<float>&, ag::NodeId, ag::NodeId, ag::NodeId,
                                const FilterBank&);
template ag::NodeId AddFirMerge(ag::Graph<double>&, ag::NodeId, ag::NodeId, ag::NodeId,
                                const FilterBank&);

}  // namespace nsf::fir
