// Copyright 2026 The FM3Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FM3Q_MIXER_H_
#define FM3Q_MIXER_H_

#include <span>
#include <string>
#include <vector>

#include "fm3q/dense_net.h"
#include "json.hpp"

namespace fm3q {

enum class MixerKind {
  // Q_tot = sum of the (already sign-adjusted) inputs. No parameters.
  kAdditive,
  // State-conditioned two-layer mixing with hypernetwork weights.
  kHypernetwork,
};

// Applied to hypernetwork weight outputs. kAbs keeps every mixing weight
// non-negative; kNone exists only to build deliberately non-monotone
// mixers in tests.
enum class WeightTransform { kAbs, kNone };

struct MixerSpec {
  MixerKind kind = MixerKind::kHypernetwork;
  int hidden = 32;
  WeightTransform transform = WeightTransform::kAbs;

  nlohmann::json ToJson() const;
  static MixerSpec FromJson(const nlohmann::json& doc, const std::string& path);
};

// Mixing weights generated from one global state.
struct MixWeights {
  std::vector<double> w1;  // inputs x hidden, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;
};

// Intermediates of one mixing evaluation, kept for the backward pass.
struct MixTape {
  std::vector<double> q;
  std::vector<double> pre;  // hidden pre-activations
  std::vector<double> hidden;
  // Raw (pre-transform) hypernetwork outputs and their tapes.
  std::vector<double> raw_w1;
  std::vector<double> raw_w2;
  Tape w1_tape;
  Tape b1_tape;
  Tape w2_tape;
  Tape b2_tape;
};

// Q_tot = Mix(q, s):
//   W1 = T(hyper_w1(s)), b1 = hyper_b1(s)
//   h  = elu(q W1 + b1)
//   w2 = T(hyper_w2(s)), b2 = hyper_b2(s)   (hyper_b2 has one relu layer)
//   Q_tot = h . w2 + b2
// where T is the weight transform. Every hypernetwork is a single dense
// layer of the state features except hyper_b2.
class Mixer {
 public:
  Mixer() = default;
  Mixer(MixerSpec spec, int num_inputs, int state_size);

  // Registers the "mixer/..." blocks.
  void Register(ParamLayout& layout);
  void Initialize(std::span<double> params, Rng& rng) const;

  const MixerSpec& spec() const { return spec_; }
  int num_inputs() const { return num_inputs_; }
  int state_size() const { return state_size_; }

  MixWeights Weights(std::span<const double> params, std::span<const double> state) const;
  static double Mix(const MixWeights& w, std::span<const double> q,
                    std::vector<double>* pre = nullptr,
                    std::vector<double>* hidden = nullptr);

  // Full evaluation with a tape when tape is non-null.
  double Forward(std::span<const double> params, std::span<const double> state,
                 std::span<const double> q, MixTape* tape) const;
  // Adds dQ_tot/dparams * upstream into param_grad and returns
  // dQ_tot/dq * upstream.
  std::vector<double> Backward(MixTape& tape, double upstream,
                               std::span<double> param_grad) const;

 private:
  MixerSpec spec_;
  int num_inputs_ = 0;
  int state_size_ = 0;
  DenseNet hyper_w1_;
  DenseNet hyper_b1_;
  DenseNet hyper_w2_;
  DenseNet hyper_b2_;
};

}  // namespace fm3q

#endif  // FM3Q_MIXER_H_
