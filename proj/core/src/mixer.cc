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

#include "fm3q/mixer.h"

#include <cmath>

#include "fm3q/errors.h"
#include "fm3q/json_util.h"

namespace fm3q {

namespace {

double Transform(WeightTransform t, double x) {
  return t == WeightTransform::kAbs ? std::abs(x) : x;
}

double TransformDerivative(WeightTransform t, double x) {
  if (t == WeightTransform::kNone) return 1.0;
  return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

}  // namespace

nlohmann::json MixerSpec::ToJson() const {
  return {{"kind", kind == MixerKind::kAdditive ? "additive" : "hypernetwork"},
          {"hidden", hidden},
          {"weight_transform", transform == WeightTransform::kAbs ? "abs" : "none"}};
}

MixerSpec MixerSpec::FromJson(const nlohmann::json& doc, const std::string& path) {
  MixerSpec spec;
  const auto kind = OptionalField<std::string>(doc, "kind", path, "hypernetwork");
  if (kind == "additive") {
    spec.kind = MixerKind::kAdditive;
  } else if (kind == "hypernetwork") {
    spec.kind = MixerKind::kHypernetwork;
  } else {
    throw ConfigError(JoinPath(path, "kind"), "expected additive or hypernetwork");
  }
  spec.hidden = OptionalField<int>(doc, "hidden", path, 32);
  if (spec.hidden < 1) throw ConfigError(JoinPath(path, "hidden"), "must be positive");
  const auto t = OptionalField<std::string>(doc, "weight_transform", path, "abs");
  if (t == "abs") {
    spec.transform = WeightTransform::kAbs;
  } else if (t == "none") {
    spec.transform = WeightTransform::kNone;
  } else {
    throw ConfigError(JoinPath(path, "weight_transform"), "expected abs or none");
  }
  return spec;
}

Mixer::Mixer(MixerSpec spec, int num_inputs, int state_size)
    : spec_(spec), num_inputs_(num_inputs), state_size_(state_size) {
  if (num_inputs < 1 || state_size < 1) throw InvalidArgument("mixer needs inputs and a state");
  if (spec_.kind == MixerKind::kAdditive) return;
  const int h = spec_.hidden;
  hyper_w1_ = DenseNet({state_size, num_inputs * h}, {Activation::kIdentity});
  hyper_b1_ = DenseNet({state_size, h}, {Activation::kIdentity});
  hyper_w2_ = DenseNet({state_size, h}, {Activation::kIdentity});
  hyper_b2_ = DenseNet({state_size, h, 1}, {Activation::kRelu, Activation::kIdentity});
}

void Mixer::Register(ParamLayout& layout) {
  if (spec_.kind == MixerKind::kAdditive) return;
  hyper_w1_.Register(layout, "mixer/hyper_w1");
  hyper_b1_.Register(layout, "mixer/hyper_b1");
  hyper_w2_.Register(layout, "mixer/hyper_w2");
  hyper_b2_.Register(layout, "mixer/hyper_b2");
}

void Mixer::Initialize(std::span<double> params, Rng& rng) const {
  if (spec_.kind == MixerKind::kAdditive) return;
  hyper_w1_.Initialize(params, rng);
  hyper_b1_.Initialize(params, rng);
  hyper_w2_.Initialize(params, rng);
  hyper_b2_.Initialize(params, rng);
}

MixWeights Mixer::Weights(std::span<const double> params,
                          std::span<const double> state) const {
  MixWeights w;
  if (spec_.kind == MixerKind::kAdditive) return w;
  w.w1 = fm3q::Forward(hyper_w1_, params, state);
  for (double& x : w.w1) x = Transform(spec_.transform, x);
  w.b1 = fm3q::Forward(hyper_b1_, params, state);
  w.w2 = fm3q::Forward(hyper_w2_, params, state);
  for (double& x : w.w2) x = Transform(spec_.transform, x);
  w.b2 = fm3q::Forward(hyper_b2_, params, state)[0];
  return w;
}

double Mixer::Mix(const MixWeights& w, std::span<const double> q, std::vector<double>* pre,
                  std::vector<double>* hidden) {
  if (w.b1.empty()) {
    double sum = 0.0;
    for (double x : q) sum += x;
    return sum;
  }
  const size_t h = w.b1.size();
  if (w.w1.size() != q.size() * h) throw InvalidArgument("mixer input arity mismatch");
  double out = w.b2;
  if (pre) pre->resize(h);
  if (hidden) hidden->resize(h);
  for (size_t k = 0; k < h; ++k) {
    double z = w.b1[k];
    for (size_t i = 0; i < q.size(); ++i) z += q[i] * w.w1[i * h + k];
    const double y = Activate(Activation::kElu, z);
    if (pre) (*pre)[k] = z;
    if (hidden) (*hidden)[k] = y;
    out += y * w.w2[k];
  }
  return out;
}

double Mixer::Forward(std::span<const double> params, std::span<const double> state,
                      std::span<const double> q, MixTape* tape) const {
  if (static_cast<int>(q.size()) != num_inputs_) throw InvalidArgument("mixer input arity mismatch");
  if (spec_.kind == MixerKind::kAdditive) {
    if (tape) tape->q.assign(q.begin(), q.end());
    return Mix(MixWeights{}, q);
  }
  if (static_cast<int>(state.size()) != state_size_) {
    throw InvalidArgument("mixer state size mismatch");
  }
  if (!tape) return Mix(Weights(params, state), q);
  MixWeights w;
  tape->raw_w1 = fm3q::Forward(hyper_w1_, params, state, &tape->w1_tape);
  w.w1.resize(tape->raw_w1.size());
  for (size_t i = 0; i < w.w1.size(); ++i) w.w1[i] = Transform(spec_.transform, tape->raw_w1[i]);
  w.b1 = fm3q::Forward(hyper_b1_, params, state, &tape->b1_tape);
  tape->raw_w2 = fm3q::Forward(hyper_w2_, params, state, &tape->w2_tape);
  w.w2.resize(tape->raw_w2.size());
  for (size_t i = 0; i < w.w2.size(); ++i) w.w2[i] = Transform(spec_.transform, tape->raw_w2[i]);
  w.b2 = fm3q::Forward(hyper_b2_, params, state, &tape->b2_tape)[0];
  tape->q.assign(q.begin(), q.end());
  return Mix(w, q, &tape->pre, &tape->hidden);
}

std::vector<double> Mixer::Backward(MixTape& tape, double upstream,
                                    std::span<double> param_grad) const {
  const size_t n = tape.q.size();
  if (spec_.kind == MixerKind::kAdditive) return std::vector<double>(n, upstream);
  const size_t h = tape.hidden.size();
  std::vector<double> dq(n, 0.0);
  std::vector<double> d_raw_w1(n * h), d_b1(h), d_raw_w2(h);
  for (size_t k = 0; k < h; ++k) {
    const double w2 = Transform(spec_.transform, tape.raw_w2[k]);
    d_raw_w2[k] = upstream * tape.hidden[k] * TransformDerivative(spec_.transform, tape.raw_w2[k]);
    const double dz = upstream * w2 * ActivationDerivative(Activation::kElu, tape.pre[k]);
    d_b1[k] = dz;
    for (size_t i = 0; i < n; ++i) {
      const double raw = tape.raw_w1[i * h + k];
      dq[i] += dz * Transform(spec_.transform, raw);
      d_raw_w1[i * h + k] = dz * tape.q[i] * TransformDerivative(spec_.transform, raw);
    }
  }
  const double d_b2 = upstream;
  BackwardAccumulate(tape.w1_tape, d_raw_w1, param_grad);
  BackwardAccumulate(tape.b1_tape, d_b1, param_grad);
  BackwardAccumulate(tape.w2_tape, d_raw_w2, param_grad);
  BackwardAccumulate(tape.b2_tape, std::span<const double>(&d_b2, 1), param_grad);
  return dq;
}

}  // namespace fm3q
