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

#include "fm3q/dense_net.h"

#include <cmath>
#include <string>

#include "fm3q/errors.h"
#include "fm3q/json_util.h"

namespace fm3q {

std::string ActivationName(Activation act) {
  switch (act) {
    case Activation::kRelu: return "relu";
    case Activation::kElu: return "elu";
    case Activation::kAbs: return "abs";
    case Activation::kIdentity: return "identity";
  }
  return "identity";
}

Activation ActivationFromName(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "elu") return Activation::kElu;
  if (name == "abs") return Activation::kAbs;
  if (name == "identity") return Activation::kIdentity;
  throw InvalidArgument("unknown activation '" + name + "'");
}

double Activate(Activation act, double z) {
  switch (act) {
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kElu: return z > 0.0 ? z : std::expm1(z);
    case Activation::kAbs: return std::abs(z);
    case Activation::kIdentity: return z;
  }
  return z;
}

double ActivationDerivative(Activation act, double z) {
  switch (act) {
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kElu: return z > 0.0 ? 1.0 : std::exp(z);
    case Activation::kAbs: return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
    case Activation::kIdentity: return 1.0;
  }
  return 1.0;
}

bool HasKink(Activation act) {
  return act == Activation::kRelu || act == Activation::kAbs;
}

// ---------------------------------------------------------------------------

size_t ParamLayout::Add(const std::string& name, size_t rows, size_t cols) {
  for (const ParamBlock& b : blocks_) {
    if (b.name == name) throw InvalidArgument("duplicate parameter block '" + name + "'");
  }
  blocks_.push_back({name, size_, rows, cols});
  size_ += rows * cols;
  return blocks_.back().offset;
}

const ParamBlock& ParamLayout::Find(const std::string& name) const {
  for (const ParamBlock& b : blocks_) {
    if (b.name == name) return b;
  }
  throw InvalidArgument("no parameter block named '" + name + "'");
}

bool ParamLayout::operator==(const ParamLayout& other) const {
  if (size_ != other.size_ || blocks_.size() != other.blocks_.size()) return false;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const ParamBlock& x = blocks_[i];
    const ParamBlock& y = other.blocks_[i];
    if (x.name != y.name || x.offset != y.offset || x.rows != y.rows || x.cols != y.cols) {
      return false;
    }
  }
  return true;
}

nlohmann::json ParamLayout::ToJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const ParamBlock& b : blocks_) {
    out.push_back({{"name", b.name}, {"offset", b.offset}, {"shape", {b.rows, b.cols}}});
  }
  return out;
}

ParamLayout ParamLayout::FromJson(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ConfigError("layout", "expected an array");
  ParamLayout layout;
  for (size_t i = 0; i < doc.size(); ++i) {
    const std::string path = "layout[" + std::to_string(i) + "]";
    const auto name = RequireField<std::string>(doc[i], "name", path);
    const auto offset = RequireField<size_t>(doc[i], "offset", path);
    const auto shape = RequireField<std::vector<size_t>>(doc[i], "shape", path);
    if (shape.size() != 2) throw ConfigError(path + ".shape", "expected [rows, cols]");
    if (offset != layout.size()) {
      throw ConfigError(path + ".offset", "blocks must partition the array in order");
    }
    layout.Add(name, shape[0], shape[1]);
  }
  return layout;
}

std::span<double> ParamVector::Block(const std::string& name) {
  const ParamBlock& b = layout.Find(name);
  return {values.data() + b.offset, b.size()};
}

std::span<const double> ParamVector::Block(const std::string& name) const {
  const ParamBlock& b = layout.Find(name);
  return {values.data() + b.offset, b.size()};
}

nlohmann::json ParamVector::ToJson() const {
  return {{"version", 1}, {"layout", layout.ToJson()}, {"values", values}};
}

ParamVector ParamVector::FromJson(const nlohmann::json& doc) {
  const int version = RequireField<int>(doc, "version", "params");
  if (version != 1) {
    throw ConfigError("params.version", "unsupported version " + std::to_string(version));
  }
  if (!doc.contains("layout")) throw ConfigError("params.layout", "missing required field");
  ParamVector p;
  p.layout = ParamLayout::FromJson(doc.at("layout"));
  p.values = RequireField<std::vector<double>>(doc, "values", "params");
  if (p.values.size() != p.layout.size()) {
    throw ConfigError("params.values", "length does not match the layout");
  }
  for (double v : p.values) {
    if (!std::isfinite(v)) throw ConfigError("params.values", "non-finite parameter");
  }
  return p;
}

// ---------------------------------------------------------------------------

DenseNet::DenseNet(std::vector<int> sizes, std::vector<Activation> activations)
    : sizes_(std::move(sizes)), activations_(std::move(activations)) {
  if (sizes_.size() < 2 || activations_.size() + 1 != sizes_.size()) {
    throw InvalidArgument("a dense net needs one activation per layer");
  }
  for (int s : sizes_) {
    if (s < 1) throw InvalidArgument("layer sizes must be positive");
  }
}

void DenseNet::Register(ParamLayout& layout, const std::string& prefix) {
  weight_offsets_.clear();
  bias_offsets_.clear();
  for (int k = 0; k < num_layers(); ++k) {
    weight_offsets_.push_back(layout.Add(prefix + "/w" + std::to_string(k),
                                         sizes_[k + 1], sizes_[k]));
    bias_offsets_.push_back(layout.Add(prefix + "/b" + std::to_string(k), sizes_[k + 1], 1));
  }
}

size_t DenseNet::num_params() const {
  size_t n = 0;
  for (int k = 0; k < num_layers(); ++k) n += static_cast<size_t>(sizes_[k + 1]) * (sizes_[k] + 1);
  return n;
}

void DenseNet::Initialize(std::span<double> params, Rng& rng) const {
  for (int k = 0; k < num_layers(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[k]));
    const size_t rows = sizes_[k + 1];
    const size_t cols = sizes_[k];
    for (size_t i = 0; i < rows * cols; ++i) {
      params[weight_offsets_[k] + i] = bound * (2.0 * Uniform01(rng) - 1.0);
    }
    for (size_t i = 0; i < rows; ++i) {
      params[bias_offsets_[k] + i] = bound * (2.0 * Uniform01(rng) - 1.0);
    }
  }
}

nlohmann::json DenseNet::ToJson() const {
  nlohmann::json acts = nlohmann::json::array();
  for (Activation a : activations_) acts.push_back(ActivationName(a));
  return {{"sizes", sizes_}, {"activations", acts}};
}

DenseNet DenseNet::FromJson(const nlohmann::json& doc) {
  auto sizes = RequireField<std::vector<int>>(doc, "sizes", "net");
  auto names = RequireField<std::vector<std::string>>(doc, "activations", "net");
  std::vector<Activation> acts;
  for (const auto& n : names) acts.push_back(ActivationFromName(n));
  return DenseNet(std::move(sizes), std::move(acts));
}

// ---------------------------------------------------------------------------

std::vector<double> Forward(const DenseNet& net, std::span<const double> params,
                            std::span<const double> input, Tape* tape) {
  if (static_cast<int>(input.size()) != net.input_size()) {
    throw InvalidArgument("input has " + std::to_string(input.size()) +
                          " entries, net expects " + std::to_string(net.input_size()));
  }
  if (!net.registered()) throw InvalidArgument("net has no parameter layout");
  if (net.bias_offset(net.num_layers() - 1) + net.output_size() > params.size()) {
    throw InvalidArgument("parameter array too short for the net layout");
  }
  for (double x : input) {
    if (!std::isfinite(x)) throw InvalidArgument("non-finite network input");
  }
  std::vector<double> x(input.begin(), input.end());
  if (tape) {
    tape->net_ = &net;
    tape->params_ = params;
    tape->inputs_.assign(net.num_layers(), {});
    tape->pre_.assign(net.num_layers(), {});
    tape->consumed_ = false;
  }
  for (int k = 0; k < net.num_layers(); ++k) {
    const int rows = net.sizes()[k + 1];
    const int cols = net.sizes()[k];
    const double* w = params.data() + net.weight_offset(k);
    const double* bias = params.data() + net.bias_offset(k);
    std::vector<double> z(rows);
    for (int i = 0; i < rows; ++i) {
      double acc = bias[i];
      const double* row = w + static_cast<size_t>(i) * cols;
      for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
      z[i] = acc;
    }
    std::vector<double> y(rows);
    for (int i = 0; i < rows; ++i) y[i] = Activate(net.activations()[k], z[i]);
    if (tape) {
      tape->inputs_[k] = std::move(x);
      tape->pre_[k] = std::move(z);
    }
    x = std::move(y);
  }
  return x;
}

std::vector<double> BackwardAccumulate(Tape& tape, std::span<const double> upstream,
                                       std::span<double> param_grad) {
  if (!tape.recorded()) throw InvalidArgument("backward on an empty tape");
  if (tape.consumed_) throw InvalidArgument("tape already consumed by a backward pass");
  const DenseNet& net = *tape.net_;
  if (static_cast<int>(upstream.size()) != net.output_size()) {
    throw InvalidArgument("upstream gradient size does not match the net output");
  }
  if (param_grad.size() < tape.params_.size()) {
    throw InvalidArgument("gradient buffer smaller than the parameter array");
  }
  tape.consumed_ = true;
  std::vector<double> g(upstream.begin(), upstream.end());
  for (int k = net.num_layers() - 1; k >= 0; --k) {
    const int rows = net.sizes()[k + 1];
    const int cols = net.sizes()[k];
    const std::vector<double>& z = tape.pre_[k];
    const std::vector<double>& x = tape.inputs_[k];
    const double* w = tape.params_.data() + net.weight_offset(k);
    double* gw = param_grad.data() + net.weight_offset(k);
    double* gb = param_grad.data() + net.bias_offset(k);
    std::vector<double> gx(cols, 0.0);
    for (int i = 0; i < rows; ++i) {
      const double dz = g[i] * ActivationDerivative(net.activations()[k], z[i]);
      if (dz == 0.0) continue;
      gb[i] += dz;
      const size_t base = static_cast<size_t>(i) * cols;
      for (int j = 0; j < cols; ++j) {
        gw[base + j] += dz * x[j];
        gx[j] += dz * w[base + j];
      }
    }
    g = std::move(gx);
  }
  return g;
}

Gradients Backward(Tape& tape, std::span<const double> upstream) {
  if (!tape.recorded()) throw InvalidArgument("backward on an empty tape");
  Gradients out;
  out.params.assign(tape.num_params(), 0.0);
  out.input = BackwardAccumulate(tape, upstream, out.params);
  return out;
}

}  // namespace fm3q
