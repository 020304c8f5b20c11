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

#include "nsf/synthesis.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace nsf::synth {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

}  // namespace

template <typename T>
SynthResult Synthesize(model::NsfModel<T>& model, const features::FeatureSequence& feat,
                       const SynthOptions& options) {
  const auto start = Clock::now();
  model::GraphOptions gopts;
  gopts.keep_block_taps = options.dump_blocks;
  model::ModelGraph<T> g = model::BuildGraph(model, feat.num_frames(), gopts);
  SynthResult res;
  res.timing.build_seconds = Since(start);

  auto t = Clock::now();
  const model::ModelInputs<T> in = model::PrepareInputs(model, feat, options.seed, options.add_noise);
  res.timing.prepare_seconds = Since(t);

  t = Clock::now();
  ag::ForwardOptions fopts;
  fopts.release_intermediates = true;
  const Tensor<T>& y = g.graph.Forward(g.Bind(in), fopts);
  res.timing.forward_seconds = Since(t);

  res.wave.sample_rate = model.config().source.sample_rate;
  res.wave.samples.assign(y.values().begin(), y.values().end());
  if (options.dump_blocks) {
    for (size_t i = 0; i < g.block_taps.size(); ++i) {
      const auto v = g.graph.Value(g.block_taps[i]).values();
      res.blocks.emplace_back(g.block_names[i], std::vector<float>(v.begin(), v.end()));
    }
  }
  res.timing.total_seconds = Since(start);
  res.timing.samples = res.wave.size();
  res.timing.samples_per_second =
      res.timing.total_seconds > 0.0 ? res.timing.samples / res.timing.total_seconds : 0.0;
  return res;
}

template SynthResult Synthesize(model::NsfModel<float>&, const features::FeatureSequence&,
                                const SynthOptions&);
template SynthResult Synthesize(model::NsfModel<double>&, const features::FeatureSequence&,
                                const SynthOptions&);

features::FeatureSequence BenchFeatures(double seconds, const model::ModelConfig& config,
                                        double f0_hz) {
  const int64_t frames = std::max<int64_t>(
      1, static_cast<int64_t>(seconds * config.source.sample_rate / config.upsample));
  features::FeatureSequence f;
  f.spectral_dims = config.spectral_dims;
  f.frame_shift_ms = 1000.0 * config.upsample / config.source.sample_rate;
  f.f0.assign(static_cast<size_t>(frames), static_cast<float>(f0_hz));
  f.spectral.assign(static_cast<size_t>(frames * config.spectral_dims), -2.0f);
  return f;
}

LinearFit FitLine(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("line fit needs >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

ScalingReport BenchScaling(model::NsfModel<float>& model, const std::vector<double>& durations,
                           int repeats, uint64_t seed) {
  if (durations.size() < 2) throw std::invalid_argument("scaling needs >= 2 durations");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  ScalingReport rep;
  std::vector<double> xs, ys;
  // One untimed pass so allocator and cache state match across the timed ones.
  Synthesize(model, BenchFeatures(durations.front(), model.config()), {seed, true, false});
  for (double d : durations) {
    const features::FeatureSequence feat = BenchFeatures(d, model.config());
    std::vector<double> walls;
    int64_t samples = 0;
    for (int r = 0; r < repeats; ++r) {
      const SynthResult s = Synthesize(model, feat, {seed, true, false});
      walls.push_back(s.timing.total_seconds);
      samples = s.timing.samples;
    }
    std::sort(walls.begin(), walls.end());
    ScalingPoint p;
    p.seconds = d;
    p.samples = samples;
    p.wall_seconds = walls[walls.size() / 2];
    rep.points.push_back(p);
    xs.push_back(static_cast<double>(samples));
    ys.push_back(p.wall_seconds);
  }
  rep.fit = FitLine(xs, ys);
  const ScalingPoint& last = rep.points.back();
  rep.samples_per_second = last.wall_seconds > 0.0 ? last.samples / last.wall_seconds : 0.0;
  return rep;
}

std::string FormatTiming(const TimingReport& t) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "samples=%lld build=%.3fs prepare=%.3fs forward=%.3fs total=%.3fs "
                "samples_per_second=%.0f",
                static_cast<long long>(t.samples), t.build_seconds, t.prepare_seconds,
                t.forward_seconds, t.total_seconds, t.samples_per_second);
  return buf;
}

std::string FormatScaling(const ScalingReport& r) {
  std::string out = "seconds,samples,wall_seconds,samples_per_second\n";
  char buf[160];
  for (const auto& p : r.points) {
    std::snprintf(buf, sizeof(buf), "%.2f,%lld,%.4f,%.0f\n", p.seconds,
                  static_cast<long long>(p.samples), p.wall_seconds,
                  p.wall_seconds > 0.0 ? p.samples / p.wall_seconds : 0.0);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "# fit: wall = %.3e * samples + %.3e, R^2 = %.4f\n",
                r.fit.slope, r.fit.intercept, r.fit.r2);
  out += buf;
  return out;
}

}  // namespace nsf::synth
