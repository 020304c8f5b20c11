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

// Command line front end: extract, train, synth, design-fir, check-grad,
// count-params, bench.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nsf/checkpoint.h"
#include "nsf/checks.h"
#include "nsf/config.h"
#include "nsf/features.h"
#include "nsf/fir.h"
#include "nsf/models.h"
#include "nsf/pitch.h"
#include "nsf/synthesis.h"
#include "nsf/train.h"
#include "nsf/wav.h"

namespace {

using namespace nsf;

std::vector<float> ReadF0Text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<float> f0;
  double v;
  while (in >> v) f0.push_back(static_cast<float>(v));
  if (!in.eof()) throw std::runtime_error("'" + path + "' holds a non-numeric F0 value");
  return f0;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::string wav, out, f0;
  int bands = 80;
};

int RunExtract(const ExtractArgs& a) {
  const dsp::Waveform w = io::ReadWav(a.wav);
  features::MelConfig mel;
  mel.sample_rate = w.sample_rate;
  mel.max_hz = w.sample_rate / 2.0;
  mel.num_bands = a.bands;
  std::vector<float> f0;
  if (!a.f0.empty()) f0 = ReadF0Text(a.f0);
  const features::FeatureSequence feat = features::ExtractFeatures(w, mel, f0);
  features::WriteFeatures(a.out, feat);
  int64_t voiced = 0;
  for (float f : feat.f0) voiced += f > 0.0f;
  std::printf("%s: %lld frames x %d dims (F0 first), %lld voiced, F0 from %s\n", a.out.c_str(),
              static_cast<long long>(feat.num_frames()), 1 + feat.spectral_dims,
              static_cast<long long>(voiced), a.f0.empty() ? "built-in tracker" : a.f0.c_str());
  return 0;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string config, manifest, out, log, init;
  uint64_t model_seed = 1;
};

std::vector<train::Utterance> LoadSplit(const std::vector<config::ManifestEntry>& entries,
                                        config::Split split, const model::ModelConfig& mc) {
  std::vector<train::Utterance> out;
  for (const auto& e : entries) {
    if (e.split != split) continue;
    train::Utterance u;
    u.name = e.wav_path;
    u.wave = io::ReadWav(e.wav_path);
    if (u.wave.sample_rate != mc.source.sample_rate) {
      throw std::runtime_error("'" + e.wav_path + "' is sampled at " +
                               std::to_string(u.wave.sample_rate) + " Hz, the model at " +
                               std::to_string(mc.source.sample_rate));
    }
    if (e.feature_path.empty()) {
      features::MelConfig mel;
      mel.sample_rate = u.wave.sample_rate;
      mel.max_hz = u.wave.sample_rate / 2.0;
      mel.num_bands = mc.spectral_dims;
      u.feat = features::ExtractFeatures(u.wave, mel);
    } else {
      u.feat = features::ReadFeatures(e.feature_path, 1 + mc.spectral_dims);
    }
    u.feat.Validate();
    out.push_back(std::move(u));
  }
  return out;
}

int RunTrain(const TrainArgs& a) {
  config::KeyValueConfig kv;
  if (!a.config.empty()) kv = config::KeyValueConfig::Load(a.config);
  const train::TrainConfig tc = config::TrainConfigFrom(kv);
  model::NsfModel<float> model = a.init.empty()
                                     ? model::NsfModel<float>(config::ModelConfigFrom(kv), a.model_seed)
                                     : io::LoadCheckpoint(a.init);
  for (const auto& k : kv.UnusedKeys()) std::fprintf(stderr, "warning: unknown config key '%s'\n", k.c_str());

  const auto entries = config::ReadManifest(a.manifest);
  const auto train_set = LoadSplit(entries, config::Split::kTrain, model.config());
  const auto val_set = LoadSplit(entries, config::Split::kValidation, model.config());
  if (a.init.empty()) {
    std::vector<const features::FeatureSequence*> feats;
    for (const auto& u : train_set) feats.push_back(&u.feat);
    model.normalization() = model::Normalization::FromFeatures(feats);
  }

  std::ofstream log_file;
  if (!a.log.empty()) {
    log_file.open(a.log);
    if (!log_file) throw std::runtime_error("cannot create '" + a.log + "'");
  }
  train::TrainHooks hooks;
  hooks.checkpoint_path = a.out;
  hooks.log = [&](const std::string& line) {
    std::cout << line << std::endl;
    if (log_file.is_open()) log_file << line << std::endl;
  };
  const train::TrainLog log = train::Train(model, train_set, val_set, tc, hooks);
  std::printf("best epoch %d, %lld steps (%lld skipped), checkpoint %s\n", log.best_epoch,
              static_cast<long long>(log.steps), static_cast<long long>(log.skipped_steps),
              a.out.c_str());
  return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string checkpoint, features, out, dump_blocks;
  uint64_t seed = 1;
  bool timing = false;
};

int RunSynth(const SynthArgs& a) {
  model::NsfModel<float> model = io::LoadCheckpoint(a.checkpoint);
  const features::FeatureSequence feat =
      features::ReadFeatures(a.features, 1 + model.config().spectral_dims);
  synth::SynthOptions opts;
  opts.seed = a.seed;
  opts.dump_blocks = !a.dump_blocks.empty();
  const synth::SynthResult r = synth::Synthesize(model, feat, opts);
  io::WriteWav(a.out, r.wave);
  if (opts.dump_blocks) {
    std::filesystem::create_directories(a.dump_blocks);
    for (const auto& [name, values] : r.blocks) {
      dsp::Waveform w{values, r.wave.sample_rate};
      float peak = 0.0f;
      for (float v : values) peak = std::max(peak, std::abs(v));
      if (peak > 1.0f) {
        for (float& v : w.samples) v /= peak;
      }
      const std::string path = (std::filesystem::path(a.dump_blocks) / (name + ".wav")).string();
      io::WriteWav(path, w);
      std::printf("%s (peak %.3f)\n", path.c_str(), peak);
    }
  }
  if (a.timing) std::printf("%s\n", synth::FormatTiming(r.timing).c_str());
  return 0;
}

// ------------------------------------------------------------- design-fir

struct FirArgs {
  double sample_rate = 16000.0;
  std::vector<double> pass, stop;
  double ripple = 5.0, attenuation = 40.0;
  int grid = 4096, table = 17;
};

void PrintFilter(const fir::FirSpec& spec, const fir::FirCoefficients& c, int grid, int table) {
  const fir::ResponseReport rep = fir::MeasureResponse(c.taps, spec, grid);
  std::printf("%s: order %d, passband deviation %.3f dB, stopband max %.2f dB, %s\n",
              spec.name.c_str(), c.order(), rep.passband_deviation_db, rep.stopband_max_db,
              rep.meets_spec ? "meets spec" : "FAILS spec");
  std::printf("  taps:");
  for (double t : c.taps) std::printf(" %.10f", t);
  std::printf("\n  hz,db\n");
  const std::vector<double> db = fir::FrequencyResponseDb(c.taps, table);
  for (int i = 0; i < table; ++i) {
    std::printf("  %.1f,%.2f\n", spec.sample_rate / 2.0 * i / (table - 1), db[static_cast<size_t>(i)]);
  }
}

int RunDesignFir(const FirArgs& a) {
  if (!a.pass.empty() || !a.stop.empty()) {
    if (a.pass.size() != 2 || a.stop.size() != 2) {
      throw std::invalid_argument("--pass and --stop each take two edges in Hz");
    }
    fir::FirSpec s;
    s.name = "custom";
    s.pass_lo = a.pass[0];
    s.pass_hi = a.pass[1];
    s.stop_lo = a.stop[0];
    s.stop_hi = a.stop[1];
    s.max_ripple_db = a.ripple;
    s.min_attenuation_db = a.attenuation;
    s.sample_rate = a.sample_rate;
    PrintFilter(s, fir::DesignEquiripple(s), a.grid, a.table);
    return 0;
  }
  const fir::FilterBank bank = fir::FilterBank::Design(a.sample_rate);
  for (size_t i = 0; i < bank.specs.size(); ++i) {
    PrintFilter(bank.specs[i], bank.filters[i], a.grid, a.table);
  }
  return 0;
}

// ------------------------------------------------------------- check-grad

struct CheckArgs {
  std::string kind = "all";
  int trials = 10;
  int64_t length = 400;
  int64_t frames = 10;
  int64_t entries = 32;
  int64_t largest = 12;
  double tolerance_loss = 1e-4;
  double tolerance_model = 1e-3;
};

int RunCheckGrad(const CheckArgs& a) {
  bool ok = true;
  for (const auto& r :
       checks::CheckSpectralBackward(checks::LossCheckConfigs(), a.trials, a.length, 1)) {
    const bool pass = r.max_error <= a.tolerance_loss;
    ok &= pass;
    std::printf("loss %s: %lld scalars, max rel error %.3e %s\n",
                loss::FormatStftConfigs({r.config}).c_str(), static_cast<long long>(r.checked),
                r.max_error, pass ? "ok" : "FAIL");
  }
  std::vector<model::ModelKind> kinds;
  if (a.kind == "all") {
    kinds = {model::ModelKind::kSNsf, model::ModelKind::kBNsf, model::ModelKind::kHnNsf};
  } else {
    kinds = {model::ParseKind(a.kind)};
  }
  for (auto k : kinds) {
    ag::GradCheckOptions opts;
    opts.max_entries_per_tensor = a.entries;
    opts.largest_entries = a.largest;
    opts.epsilon = 1e-5;
    const auto r = checks::CheckModelGradient(model::ModelConfig::Reduced(k), a.frames, opts);
    const bool pass = r.max_error <= a.tolerance_model;
    ok &= pass;
    std::printf("model %s: %zu tensors, %lld scalars, max rel error %.3e at %s[%lld] %s\n",
                model::KindName(k).c_str(), r.per_tensor.size(), static_cast<long long>(r.checked),
                r.max_error, r.worst.tensor.c_str(), static_cast<long long>(r.worst.index),
                pass ? "ok" : "FAIL");
  }
  return ok ? 0 : 1;
}

// ----------------------------------------------------------- count-params

struct CountArgs {
  std::string kind = "all", config;
  bool reduced = false, layers = false;
};

int RunCountParams(const CountArgs& a) {
  std::vector<model::ModelConfig> configs;
  if (!a.config.empty()) {
    configs.push_back(config::ModelConfigFrom(config::KeyValueConfig::Load(a.config)));
  } else {
    std::vector<model::ModelKind> kinds = {model::ModelKind::kSNsf, model::ModelKind::kHnNsf,
                                           model::ModelKind::kBNsf};
    if (a.kind != "all") kinds = {model::ParseKind(a.kind)};
    for (auto k : kinds) {
      model::ModelConfig c = a.reduced ? model::ModelConfig::Reduced(k) : model::ModelConfig{};
      c.kind = k;
      configs.push_back(c);
    }
  }
  for (const auto& c : configs) {
    const model::NsfModel<float> m(c, 1);
    if (a.layers) {
      std::printf("%-40s %-16s %10s\n", "tensor", "shape", "count");
      for (const auto& l : model::ParameterAudit(m)) {
        std::printf("%-40s %-16s %10lld\n", l.name.c_str(), ShapeString(l.shape).c_str(),
                    static_cast<long long>(l.count));
      }
    }
    std::printf("%s: %lld parameters (closed form %lld)\n", model::KindName(c.kind).c_str(),
                static_cast<long long>(model::CountParameters(m)),
                static_cast<long long>(model::ExpectedParameterCount(c)));
  }
  return 0;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::string kind = "all";
  std::vector<double> durations = {1, 2, 4, 8};
  int repeats = 3;
  bool reduced = false;
};

int RunBench(const BenchArgs& a) {
  std::vector<model::ModelKind> kinds = {model::ModelKind::kSNsf, model::ModelKind::kBNsf,
                                         model::ModelKind::kHnNsf};
  if (a.kind != "all") kinds = {model::ParseKind(a.kind)};
  for (auto k : kinds) {
    model::ModelConfig c = a.reduced ? model::ModelConfig::Reduced(k) : model::ModelConfig{};
    c.kind = k;
    model::NsfModel<float> m(c, 1);
    const synth::ScalingReport r = synth::BenchScaling(m, a.durations, a.repeats);
    std::printf("# %s\n%s", model::KindName(k).c_str(), synth::FormatScaling(r).c_str());
    std::printf("# %s throughput %.0f samples/s\n", model::KindName(k).c_str(), r.samples_per_second);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural source-filter waveform models"};
  app.require_subcommand(1);
  int threads = config::ThreadCountFromEnv();
  app.add_option("--threads", threads, "Worker threads (default: NSF_NUM_THREADS or 1)");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Waveform to F0 + mel-spectrogram features");
  extract->add_option("wav", ex.wav, "16-bit PCM mono input")->required();
  extract->add_option("out", ex.out, "Feature file to write")->required();
  extract->add_option("--f0", ex.f0, "Per-frame F0 in Hz (text), instead of the built-in tracker");
  extract->add_option("--bands", ex.bands, "Mel bands");

  TrainArgs tr;
  auto* trn = app.add_subcommand("train", "Train a model from a manifest");
  trn->add_option("--config", tr.config, "key = value configuration file");
  trn->add_option("--manifest", tr.manifest, "Manifest of `split wav features` lines")->required();
  trn->add_option("--out", tr.out, "Best-validation checkpoint path")->required();
  trn->add_option("--log", tr.log, "Epoch log file");
  trn->add_option("--init", tr.init, "Continue from a checkpoint");
  trn->add_option("--model-seed", tr.model_seed, "Initialisation seed");

  SynthArgs sy;
  auto* syn = app.add_subcommand("synth", "Generate a waveform from features");
  syn->add_option("checkpoint", sy.checkpoint)->required();
  syn->add_option("features", sy.features)->required();
  syn->add_option("out", sy.out, "Output wav")->required();
  syn->add_option("--seed", sy.seed, "Excitation noise and phase seed");
  syn->add_option("--dump-blocks", sy.dump_blocks, "Directory for per-block outputs");
  syn->add_flag("--timing", sy.timing, "Print a timing report");

  FirArgs fa;
  auto* dfir = app.add_subcommand("design-fir", "Design the merge filter bank or one filter");
  dfir->add_option("--sample-rate", fa.sample_rate);
  dfir->add_option("--pass", fa.pass, "Passband edges in Hz")->expected(2);
  dfir->add_option("--stop", fa.stop, "Stopband edges in Hz")->expected(2);
  dfir->add_option("--ripple", fa.ripple, "Max passband deviation in dB");
  dfir->add_option("--attenuation", fa.attenuation, "Min stopband attenuation in dB");
  dfir->add_option("--grid", fa.grid, "Verification grid points");
  dfir->add_option("--table", fa.table, "Response table rows");

  CheckArgs ca;
  auto* cg = app.add_subcommand("check-grad", "Finite-difference gradient suite");
  cg->add_option("--kind", ca.kind, "s-nsf, b-nsf, hn-nsf or all");
  cg->add_option("--trials", ca.trials, "Random waveforms per loss configuration");
  cg->add_option("--length", ca.length, "Waveform length for the loss checks");
  cg->add_option("--frames", ca.frames, "Frames for the model checks");
  cg->add_option("--entries", ca.entries, "Scalars checked per parameter tensor (-1: all)");
  cg->add_option("--largest", ca.largest, "Of those, how many by largest gradient");

  CountArgs co;
  auto* cp = app.add_subcommand("count-params", "Per-layer parameter audit");
  cp->add_option("--kind", co.kind, "s-nsf, b-nsf, hn-nsf or all");
  cp->add_option("--config", co.config, "Model configuration file");
  cp->add_flag("--reduced", co.reduced, "2 blocks x 5 stages");
  cp->add_flag("--layers", co.layers, "List every tensor");

  BenchArgs be;
  auto* bn = app.add_subcommand("bench", "Generation-speed scaling report");
  bn->add_option("--kind", be.kind, "s-nsf, b-nsf, hn-nsf or all");
  bn->add_option("--durations", be.durations, "Durations in seconds")->delimiter(',');
  bn->add_option("--repeats", be.repeats);
  bn->add_flag("--reduced", be.reduced, "2 blocks x 5 stages");

  CLI11_PARSE(app, argc, argv);
  try {
    config::SetThreadCount(threads);
    config::RetainFreedMemory();
    if (*extract) return RunExtract(ex);
    if (*trn) return RunTrain(tr);
    if (*syn) return RunSynth(sy);
    if (*dfir) return RunDesignFir(fa);
    if (*cg) return RunCheckGrad(ca);
    if (*cp) return RunCountParams(co);
    if (*bn) return RunBench(be);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
