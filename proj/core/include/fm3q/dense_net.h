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

#ifndef FM3Q_DENSE_NET_H_
#define FM3Q_DENSE_NET_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fm3q/rng.h"
#include "json.hpp"

namespace fm3q {

enum class Activation { kRelu, kElu, kAbs, kIdentity };

std::string ActivationName(Activation act);
Activation ActivationFromName(const std::string& name);

// Named slice of a flat parameter array holding a rows x cols matrix
// (row-major) or a vector (cols == 1).
struct ParamBlock {
  std::string name;
  size_t offset = 0;
  size_t rows = 0;
  size_t cols = 0;
  size_t size() const { return rows * cols; }
};

// Offsets that partition a flat parameter array exactly, in insertion order.
class ParamLayout {
 public:
  size_t Add(const std::string& name, size_t rows, size_t cols);
  const ParamBlock& Find(const std::string& name) const;
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  size_t size() const { return size_; }

  nlohmann::json ToJson() const;
  static ParamLayout FromJson(const nlohmann::json& doc);

  bool operator==(const ParamLayout& other) const;

 private:
  std::vector<ParamBlock> blocks_;
  size_t size_ = 0;
};

// Flat parameter values plus the layout that names them.
struct ParamVector {
  ParamLayout layout;
  std::vector<double> values;

  std::span<double> Block(const std::string& name);
  std::span<const double> Block(const std::string& name) const;

  // {"version": 1, "layout": [...], "values": [...]}. Doubles are written in
  // shortest round-trip form, so a reload is bit-exact.
  nlohmann::json ToJson() const;
  static ParamVector FromJson(const nlohmann::json& doc);
};

// Fully connected net: layer k maps sizes[k] -> sizes[k+1] through an affine
// map followed by activations[k]. Parameters live in an external flat array
// at the offsets recorded in the layout by Register().
class DenseNet {
 public:
  DenseNet() = default;
  DenseNet(std::vector<int> sizes, std::vector<Activation> activations);

  // Adds "<prefix>/w<k>" and "<prefix>/b<k>" blocks to the layout.
  void Register(ParamLayout& layout, const std::string& prefix);

  // uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void Initialize(std::span<double> params, Rng& rng) const;

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(activations_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Activation>& activations() const { return activations_; }
  size_t weight_offset(int layer) const { return weight_offsets_[layer]; }
  size_t bias_offset(int layer) const { return bias_offsets_[layer]; }
  size_t num_params() const;
  bool registered() const { return !weight_offsets_.empty(); }

  nlohmann::json ToJson() const;
  static DenseNet FromJson(const nlohmann::json& doc);

 private:
  std::vector<int> sizes_;
  std::vector<Activation> activations_;
  std::vector<size_t> weight_offsets_;
  std::vector<size_t> bias_offsets_;
};

// Forward intermediates of one DenseNet evaluation. A tape is consumed by
// exactly one backward pass.
class Tape {
 public:
  bool recorded() const { return net_ != nullptr; }
  size_t num_params() const { return params_.size(); }
  bool consumed() const { return consumed_; }
  // Pre-activation of layer k from the recorded forward pass.
  const std::vector<double>& pre_activation(int k) const { return pre_[k]; }

 private:
  friend std::vector<double> Forward(const DenseNet&, std::span<const double>,
                                     std::span<const double>, Tape*);
  friend std::vector<double> BackwardAccumulate(Tape&, std::span<const double>,
                                                std::span<double>);

  const DenseNet* net_ = nullptr;
  std::span<const double> params_;
  // inputs_[k] is the input of layer k; pre_[k] its pre-activation.
  std::vector<std::vector<double>> inputs_;
  std::vector<std::vector<double>> pre_;
  bool consumed_ = false;
};

// Evaluates the net. Throws InvalidArgument on dimension mismatch or
// non-finite input. When tape is non-null it is overwritten.
std::vector<double> Forward(const DenseNet& net, std::span<const double> params,
                            std::span<const double> input, Tape* tape = nullptr);

struct Gradients {
  std::vector<double> params;  // same length as the params span of Forward
  std::vector<double> input;
};

// Reverse-mode pass for upstream = dLoss/dOutput. abs uses sign(x) with
// subgradient 0 at x = 0; relu uses 0 at x = 0. Throws InvalidArgument if
// the tape was never recorded or was already consumed.
Gradients Backward(Tape& tape, std::span<const double> upstream);

// Same as Backward, but adds parameter gradients into param_grad (which
// must span the same parameter array used in Forward). Returns the input
// gradient.
std::vector<double> BackwardAccumulate(Tape& tape, std::span<const double> upstream,
                                       std::span<double> param_grad);

// Elementwise activation and its derivative at pre-activation z.
double Activate(Activation act, double z);
double ActivationDerivative(Activation act, double z);
bool HasKink(Activation act);

}  // namespace fm3q

#endif  // FM3Q_DENSE_NET_H_
