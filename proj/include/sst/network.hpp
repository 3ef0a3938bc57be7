// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Small feed-forward convolutional classifier trained with squared error.
//
// Layers: valid convolution (full connection table), sum pooling with an
// optional trainable per-map scale and bias, fully connected, and pointwise
// activation. Outputs are raw (no normalization).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sst/tensor.hpp"

namespace sst {

enum class LayerKind : std::uint32_t { conv = 0, sumpool = 1, full = 2, activation = 3 };
enum class Activation : std::uint32_t { identity = 0, tanh = 1 };

struct LayerSpec {
  LayerKind kind = LayerKind::full;
  /// conv: output maps; full: output units.
  int units = 0;
  /// conv: kernel side; sumpool: window side.
  int kernel = 0;
  Activation activation = Activation::identity;
  /// conv/full: false freezes weights (e.g. a fixed filter bank).
  /// sumpool: false means plain window sums with no scale/bias.
  bool trainable = true;

  static LayerSpec conv(int maps, int kernel, bool trainable = true) {
    return {LayerKind::conv, maps, kernel, Activation::identity, trainable};
  }
  static LayerSpec sumpool(int window, bool trainable = true) {
    return {LayerKind::sumpool, 0, window, Activation::identity, trainable};
  }
  static LayerSpec full(int units) { return {LayerKind::full, units, 0, Activation::identity, true}; }
  static LayerSpec act(Activation a) { return {LayerKind::activation, 0, 0, a, true}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Shape3 {
  int maps = 1;
  int height = 1;
  int width = 1;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(maps) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(width);
  }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

struct LayerParams {
  std::vector<double> weights;
  std::vector<double> bias;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// conv 8@5x5 -> tanh -> sumpool 2 -> conv 24@5x5 -> tanh -> sumpool 2 ->
/// conv 100@5x5 -> tanh -> full n_outputs (identity).
std::vector<LayerSpec> default_architecture(int n_outputs);

/// conv 6@5x5 -> tanh -> sumpool 2 -> conv 16@5x5 -> tanh -> sumpool 2 ->
/// full 40 -> tanh -> full n_outputs. Roughly a quarter of the default cost.
std::vector<LayerSpec> compact_architecture(int n_outputs);

/// Trainable parameters plus the architecture that gives them meaning.
class Network {
 public:
  /// Validates the layer chain and draws weights uniformly in
  /// +-1/sqrt(fan_in) from Rng(seed); biases start at 0, pooling scales at
  /// 1/window^2. Throws InconsistentArchitecture.
  Network(std::vector<LayerSpec> arch, std::uint64_t seed, Shape3 input = {1, 32, 32});

  /// (weights, bias) element counts per layer, without allocating. Throws
  /// InconsistentArchitecture.
  static std::vector<std::pair<std::size_t, std::size_t>> parameter_counts(
      const std::vector<LayerSpec>& arch, Shape3 input);

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  /// shapes()[0] is the input, shapes()[i + 1] the output of layer i.
  const std::vector<Shape3>& shapes() const noexcept { return shapes_; }
  const Shape3& input_shape() const noexcept { return shapes_.front(); }
  int output_size() const noexcept { return static_cast<int>(shapes_.back().size()); }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<LayerParams>& params() noexcept { return params_; }
  const std::vector<LayerParams>& params() const noexcept { return params_; }

  /// Whether layer i has parameters that training updates.
  bool trains(std::size_t layer) const noexcept;
  std::size_t trainable_parameter_count() const noexcept;
  bool all_finite() const noexcept;

  /// Sets every parameter (trainable or not) to `value`.
  void fill(double value);

  /// Replaces the filters of a conv layer whose input has one map. Bias is
  /// zeroed. Throws ShapeMismatch.
  void set_filters(std::size_t layer, const std::vector<Tensor>& filters);

  /// Accepts shape {h, w} or {1, h, w}. Throws ShapeMismatch.
  std::vector<double> forward(const Tensor& input) const;
  std::vector<double> forward(std::span<const double> input) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<Shape3> shapes_;
  std::vector<LayerParams> params_;
  std::uint64_t seed_ = 0;
};

/// Parameter-shaped accumulator.
struct Gradients {
  explicit Gradients(const Network& net);

  std::vector<LayerParams> layers;

  void zero() noexcept;
  bool all_finite() const noexcept;
};

/// Scratch buffers for one forward/backward at a time. Not thread safe; use
/// one per thread. Forward-only use of a shared Network is fine.
class Workspace {
 public:
  explicit Workspace(const Network& net);

  /// Runs the network and keeps the activations for backward().
  std::span<const double> forward(const Network& net, std::span<const double> input);

  /// Adds d/dtheta of 0.5*||N(x) - target||^2 at the last forward input to
  /// `grads`. Returns that loss.
  double backward(const Network& net, std::span<const double> target, Gradients& grads);

  std::span<const double> output() const noexcept { return act_.back(); }

 private:
  std::vector<std::vector<double>> act_;
  std::vector<std::vector<double>> delta_;
  std::vector<std::vector<double>> gather_;
  std::vector<double> gather_grad_;
};

/// theta -= step * grads over trainable layers. Throws NonFiniteGradient
/// (leaving `net` untouched) if any gradient entry is NaN or infinite.
void apply_gradients(Network& net, const Gradients& grads, double step);

/// One gradient step on the mean of 0.5*||N(x_i) - d_i||^2 over the
/// mini-batch. Returns the pre-step mean loss. Throws ShapeMismatch,
/// NonFiniteGradient.
double sgd_step(Network& net, std::span<const Tensor> inputs,
                std::span<const std::vector<double>> targets, double lr);

/// Maximum relative error between backprop gradients and central finite
/// differences of 0.5*||N(x) - d||^2. Relative error is |a - n| / max(|a|, |n|),
/// taken as 0 when both magnitudes are below 1e-12. Nets with more than
/// `max_params` trainable parameters are checked on a uniform random subset of
/// that size (drawn from `sample_seed`).
double gradient_check(const Network& net, const Tensor& input, std::span<const double> target,
                      double eps, std::size_t max_params = 1000, std::uint64_t sample_seed = 0);

/// Random small network (1-2 input maps of 8-12 pixels, one or two conv
/// stages, optional sum pooling, one or two full layers, random biases) with
/// a random input and target. Used by gradient checks.
struct GradcheckCase {
  Network net;
  Tensor input;
  std::vector<double> target;
};
GradcheckCase random_gradcheck_case(std::uint64_t seed);

/// Mean entropy in bits. Each vector is clamped to [0, 1] and renormalized;
/// an all-zero vector becomes uniform; 0 * log 0 = 0.
double output_entropy(std::span<const std::vector<double>> outputs);

/// Index of the largest component, lowest index on ties.
int argmax(std::span<const double> v) noexcept;

}  // namespace sst
