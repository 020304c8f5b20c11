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

// Acceptance suite: one PASS/FAIL line per criterion.  `--only 1,4` runs a
// subset.  Exits non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsf/checks.h"
#include "nsf/config.h"
#include "nsf/fir.h"
#include "nsf/models.h"
#include "nsf/pitch.h"
#include "nsf/source.h"
#include "nsf/spectral_loss.h"
#include "nsf/synthesis.h"
#include "nsf/train.h"

namespace nsf {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> RandomSignal(int64_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 0.3);
  std::vector<double> x(static_cast<size_t>(n));
  for (double& v : x) v = d(rng);
  return x;
}

double Correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

model::ModelConfig FullSize(model::ModelKind kind) {
  model::ModelConfig c;
  c.kind = kind;
  return c;
}

features::FeatureSequence ConstantFeatures(int64_t frames, float f0, uint64_t seed) {
  features::FeatureSequence f;
  f.f0.assign(static_cast<size_t>(frames), f0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(-3.0f, 0.5f);
  f.spectral.resize(static_cast<size_t>(frames * f.spectral_dims));
  for (float& v : f.spectral) v = d(rng);
  return f;
}

// 1: the loss against a direct-summation reference.
Outcome LossCorrectness() {
  const Stopwatch clock;
  const loss::MultiResLossConfig cfg;
  std::mt19937_64 rng(101);
  const auto same = RandomSignal(400, rng);
  const double zero = loss::MultiResLoss(same, same, cfg).loss;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = RandomSignal(400, rng), n = RandomSignal(400, rng);
    long double ref = 0.0L;
    for (const auto& c : cfg.configs) ref += checks::DirectSpectralDistance(g, n, c, cfg.eta);
    const double got = loss::MultiResLoss(g, n, cfg).loss;
    worst = std::max(worst, static_cast<double>(std::fabs((got - ref) / ref)));
  }
  const double t = clock.seconds();
  return {zero == 0.0 && worst <= 1e-6 && t < 10.0,
          Fmt("identical pair loss %.1e, worst relative error %.2e over 20 pairs (<= 1e-6), %.2fs",
              zero, worst, t)};
}

// 2: analytic backward against central differences.
Outcome AnalyticBackward() {
  const Stopwatch clock;
  const auto reports = checks::CheckSpectralBackward(checks::LossCheckConfigs(), 10, 400, 202);
  double worst = 0.0;
  std::string per;
  for (const auto& r : reports) {
    worst = std::max(worst, r.max_error);
    per += Fmt(" %d:%d:%d=%.1e", r.config.dft_bins, r.config.frame_length, r.config.frame_shift,
               r.max_error);
  }
  const double t = clock.seconds();
  return {worst <= 1e-4 && t < 120.0,
          Fmt("worst relative error %.2e (<= 1e-4), %.2fs;", worst, t) + per};
}

// 3: gradient spectra are conjugate symmetric and invert to real frames.
Outcome ConjugateSymmetry() {
  std::mt19937_64 rng(303);
  bool exact = true;
  double residue = 0.0;
  int64_t spectra = 0;
  for (const auto& c : checks::LossCheckConfigs()) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto g = RandomSignal(400, rng), n = RandomSignal(400, rng);
      for (const auto& s : loss::GradientSpectra(g, n, c, 1e-5)) {
        const size_t K = s.size();
        for (size_t k = 0; k < K; ++k) {
          const auto& a = s[k];
          const auto& b = s[(K - k) % K];
          exact = exact && a.real() == b.real() && a.imag() == -b.imag();
        }
        residue = std::max(residue, dsp::IdftChecked(s, 0.0).imag_residue);
        ++spectra;
      }
    }
  }
  return {exact && residue <= 1e-10,
          Fmt("%lld spectra, exact symmetry %s, worst imaginary residue %.1e (<= 1e-10)",
              static_cast<long long>(spectra), exact ? "yes" : "no", residue)};
}

// 4: the merge filter bank.
Outcome FirBank() {
  const Stopwatch clock;
  const auto bank = fir::FilterBank::Design();
  bool ok = true;
  std::string per;
  for (size_t i = 0; i < 4; ++i) {
    const auto r = fir::MeasureResponse(bank.filters[i].taps, bank.specs[i], 4096);
    const int order = bank.filters[i].order();
    ok = ok && r.passband_deviation_db <= 5.0 && r.stopband_max_db <= -40.0 && order >= 6 &&
         order <= 20;
    per += Fmt(" %s: order %d, passband %.2f dB, stopband %.1f dB;", bank.specs[i].name.c_str(),
               order, r.passband_deviation_db, r.stopband_max_db);
  }
  const double t = clock.seconds();
  return {ok && t < 5.0, Fmt("%.2fs;", t) + per};
}

// 5: frequency, unvoiced level and phase continuity of the source.
Outcome SourceModule() {
  const source::SourceConfig cfg;
  // Frequency from the interpolated peak of a finely sampled spectrum.
  const std::vector<float> f0(16000, 200.0f);
  std::mt19937_64 rng(5);
  const auto e = source::HarmonicComponent(f0, 0, cfg, 0.3, rng, true);
  const std::vector<double> x(e.begin(), e.end());
  const int K = 1 << 18;
  const auto spec = dsp::Dft(x, K);
  size_t peak = 1;
  for (size_t k = 1; k < static_cast<size_t>(K / 2); ++k) {
    if (std::abs(spec[k]) > std::abs(spec[peak])) peak = k;
  }
  const double a = std::abs(spec[peak - 1]), b = std::abs(spec[peak]), c = std::abs(spec[peak + 1]);
  const double offset = 0.5 * (a - c) / (a - 2.0 * b + c);
  const double freq = (static_cast<double>(peak) + offset) * cfg.sample_rate / K;
  const double freq_err = std::abs(freq - 200.0) / 200.0;

  const std::vector<float> zeros(64000, 0.0f);
  std::mt19937_64 rng_u(6);
  const auto u = source::HarmonicComponent(zeros, 0, cfg, 0.0, rng_u, true);
  double sq = 0.0;
  for (float v : u) sq += double(v) * v;
  const double std_ratio = std::sqrt(sq / static_cast<double>(u.size())) / (cfg.alpha / 3.0);

  std::vector<float> step(16000, 100.0f);
  for (size_t i = 8000; i < step.size(); ++i) step[i] = 200.0f;
  const double bound = cfg.alpha * 2.0 * kPi * 200.0 / cfg.sample_rate + 4.0 * cfg.sigma;
  std::mt19937_64 rng_s(7);
  const auto s = source::HarmonicComponent(step, 0, cfg, 0.0, rng_s, true);
  double jump = 0.0;
  for (size_t i = 7990; i <= 8010; ++i) jump = std::max(jump, std::abs(double(s[i]) - s[i - 1]));
  std::mt19937_64 rng_c(7);
  const auto clean = source::HarmonicComponent(step, 0, cfg, 0.0, rng_c, false);
  double clean_jump = 0.0;
  for (size_t i = 1; i < clean.size(); ++i) {
    clean_jump = std::max(clean_jump, std::abs(double(clean[i]) - clean[i - 1]));
  }
  const bool ok = freq_err <= 0.005 && std::abs(std_ratio - 1.0) <= 0.1 && jump <= bound &&
                  clean_jump <= bound;
  return {ok, Fmt("frequency %.3f Hz (error %.3f%%, <= 0.5%%), unvoiced std %.3f x alpha/3, "
                  "largest jump at the step %.4f, noise-free anywhere %.4f (bound %.4f)",
                  freq, 100.0 * freq_err, std_ratio, jump, clean_jump, bound)};
}

// 6: zero-parameter identities at full size.
Outcome ZeroIdentities() {
  bool ok = true;
  std::string per;
  const auto feat = ConstantFeatures(30, 180.0f, 6);
  for (auto kind : {model::ModelKind::kSNsf, model::ModelKind::kBNsf, model::ModelKind::kHnNsf}) {
    model::NsfModel<float> m(FullSize(kind), 1);
    m.ZeroParameters();
    m.params().Find("source.mixer.w")->value[0] = 1.0f;
    features::FeatureSequence f = feat;
    for (size_t b = 12; b < 18; ++b) f.f0[b] = 0.0f;
    auto g = model::BuildGraph(m, f.num_frames());
    const auto in = model::PrepareInputs(m, f, 4);
    const Tensor<float> y = g.graph.Forward(g.Bind(in));
    const Tensor<float>& e = g.graph.Value(g.excitation);
    double worst = 0.0, scale = 0.0;
    if (kind == model::ModelKind::kHnNsf) {
      std::vector<double> h(e.values().begin(), e.values().end());
      std::vector<double> n(in.noise.values().begin(), in.noise.values().end());
      std::vector<double> v(in.voiced.values().begin(), in.voiced.values().end());
      const auto ref = fir::MergeBranches(h, n, v, m.bank());
      for (size_t t = 0; t < ref.size(); ++t) {
        worst = std::max(worst, std::abs(y[static_cast<int64_t>(t)] - ref[t]));
        scale = std::max(scale, std::abs(ref[t]));
      }
      ok = ok && worst <= 1e-6 * std::max(scale, 1.0);
      per += Fmt(" hn-nsf: max |y - merge(e, noise)| %.1e;", worst);
    } else {
      for (int64_t t = 0; t < y.size(); ++t) worst = std::max(worst, double(std::abs(y[t] - e[t])));
      ok = ok && worst == 0.0;
      per += Fmt(" %s: max |y - e| %.1e;", model::KindName(kind).c_str(), worst);
    }
  }
  return {ok, "excitation mixer set to pass e0 through;" + per};
}

// 7: end-to-end gradient of the reduced hn-NSF.
Outcome EndToEndGradient() {
  const Stopwatch clock;
  ag::GradCheckOptions o;
  o.epsilon = 1e-5;
  o.max_entries_per_tensor = 32;
  o.largest_entries = 12;
  const auto cfg = model::ModelConfig::Reduced(model::ModelKind::kHnNsf);
  const auto r = checks::CheckModelGradient(cfg, 10, o, 7);
  const model::NsfModel<double> shape(cfg, 1);
  const bool all_tensors = r.per_tensor.size() == shape.params().size();
  const double t = clock.seconds();
  return {all_tensors && r.max_error <= 1e-3 && t < 600.0,
          Fmt("%zu/%zu tensors, %lld scalars, worst relative error %.2e (<= 1e-3) at %s[%lld], "
              "T=800, %.0fs",
              r.per_tensor.size(), shape.params().size(), static_cast<long long>(r.checked),
              r.max_error, r.worst.tensor.c_str(), static_cast<long long>(r.worst.index), t)};
}

// 8: overfitting one utterance.
Outcome Overfit() {
  const std::clock_t cpu0 = std::clock();
  const auto speech = checks::MakeSyntheticSpeech(2.0, 1);
  model::NsfModel<float> m(model::ModelConfig::Reduced(model::ModelKind::kHnNsf), 1);
  m.normalization() = model::Normalization::FromFeatures({&speech.utterance.feat});
  const train::TrainConfig tc;
  train::Trainer trainer(m, tc);
  constexpr uint64_t kEvalSeed = 99;
  const double before = trainer.Evaluate(speech.utterance, kEvalSeed, true);
  for (int step = 1; step <= 500; ++step) {
    trainer.Step(speech.utterance, source::StreamSeed(tc.seed, static_cast<uint64_t>(step)));
  }
  const double after = trainer.Evaluate(speech.utterance, kEvalSeed, true);
  const auto out = synth::Synthesize(m, speech.utterance.feat, {.seed = 5});
  const auto est = dsp::EstimateF0(out.wave, m.config().upsample);
  // Every frame voiced in the input counts; an unvoiced estimate enters as 0.
  std::vector<double> ref, got;
  for (size_t b = 0; b < speech.f0.size() && b < est.size(); ++b) {
    if (speech.f0[b] > 0.0f) {
      ref.push_back(speech.f0[b]);
      got.push_back(est[b]);
    }
  }
  const double corr = Correlation(ref, got);
  const double cpu = double(std::clock() - cpu0) / CLOCKS_PER_SEC;
  const double ratio = after / before;
  return {ratio <= 0.6 && corr >= 0.85 && cpu <= 1800.0,
          Fmt("loss %.3f -> %.3f (ratio %.3f, <= 0.6), F0 correlation %.4f over %zu voiced "
              "frames (>= 0.85), %.0fs CPU",
              before, after, ratio, corr, ref.size(), cpu)};
}

// 9: full-size parameter counts.
Outcome ParameterCounts() {
  struct Row {
    model::ModelKind kind;
    double target;
  };
  const Row rows[] = {{model::ModelKind::kSNsf, 1.07e6},
                      {model::ModelKind::kHnNsf, 1.20e6},
                      {model::ModelKind::kBNsf, 1.83e6}};
  bool ok = true;
  std::string per;
  std::vector<int64_t> counts;
  for (const Row& r : rows) {
    const model::NsfModel<float> m(FullSize(r.kind), 1);
    const int64_t n = model::CountParameters(m);
    counts.push_back(n);
    const double dev = (double(n) - r.target) / r.target;
    ok = ok && std::abs(dev) <= 0.2;
    per += Fmt(" %s %lld (%+.1f%%);", model::KindName(r.kind).c_str(), static_cast<long long>(n),
               100.0 * dev);
  }
  const bool ordered = counts[0] < counts[1] && counts[1] < counts[2];
  return {ok && ordered, Fmt("ordering s < hn < b %s;", ordered ? "holds" : "broken") + per};
}

// Median samples per second over `repeats` runs after one warmup.
double Throughput(model::NsfModel<float>& m, double seconds, int repeats) {
  const auto feat = synth::BenchFeatures(seconds, m.config());
  synth::Synthesize(m, feat);
  std::vector<double> rates;
  for (int r = 0; r < repeats; ++r) rates.push_back(synth::Synthesize(m, feat).timing.samples_per_second);
  std::sort(rates.begin(), rates.end());
  return rates[rates.size() / 2];
}

// 10: generation cost is linear in length and free of sample feedback.
Outcome GenerationComplexity() {
  model::NsfModel<float> hn(FullSize(model::ModelKind::kHnNsf), 1);
  const auto scaling = synth::BenchScaling(hn, {1.0, 2.0, 4.0, 8.0}, 3, 1);

  bool causal = true;
  for (auto kind : {model::ModelKind::kSNsf, model::ModelKind::kBNsf, model::ModelKind::kHnNsf}) {
    model::NsfModel<float> m(FullSize(kind), 3);
    auto g = model::BuildGraph(m, 20);
    auto in = model::PrepareInputs(m, ConstantFeatures(20, 160.0f, 8), 9);
    const Tensor<float> base = g.graph.Forward(g.Bind(in));
    const int64_t t0 = 900;
    for (int64_t h = 0; h < in.harmonics.cols(); ++h) in.harmonics.at(t0, h) += 0.5f;
    const Tensor<float> moved = g.graph.Forward(g.Bind(in));
    // Only the merge filters of hn-NSF look ahead, by half their order.
    int64_t limit = t0;
    if (kind == model::ModelKind::kHnNsf) {
      for (const auto& f : m.bank().filters) limit = std::min(limit, t0 - f.order() / 2);
    }
    for (int64_t t = 0; t < limit; ++t) causal = causal && moved[t] == base[t];
    causal = causal && moved[t0] != base[t0];
  }

  model::NsfModel<float> s(FullSize(model::ModelKind::kSNsf), 1);
  model::NsfModel<float> b(FullSize(model::ModelKind::kBNsf), 1);
  const double s_rate = Throughput(s, 2.0, 3);
  const double b_rate = Throughput(b, 2.0, 3);

  return {scaling.fit.r2 >= 0.98 && causal && s_rate > b_rate,
          Fmt("hn-nsf wall time vs length R^2 %.4f (>= 0.98), causality %s, throughput "
              "s-nsf %.0f vs b-nsf %.0f samples/s",
              scaling.fit.r2, causal ? "holds" : "violated", s_rate, b_rate)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nsf

int main(int argc, char** argv) {
  using namespace nsf;
  CLI::App app{"NSF vocoder acceptance suite"};
  std::vector<int> only;
  app.add_option("--only", only, "Criteria to run, e.g. 1,4")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  config::RetainFreedMemory();

  const std::vector<Criterion> criteria = {
      {1, "loss correctness", LossCorrectness},
      {2, "analytic backward", AnalyticBackward},
      {3, "conjugate symmetry", ConjugateSymmetry},
      {4, "FIR bank", FirBank},
      {5, "source module", SourceModule},
      {6, "zero-parameter identities", ZeroIdentities},
      {7, "end-to-end gradient", EndToEndGradient},
      {8, "overfit", Overfit},
      {9, "parameter counts", ParameterCounts},
      {10, "generation complexity", GenerationComplexity},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
