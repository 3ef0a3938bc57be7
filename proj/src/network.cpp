// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "sst/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sst/rng.hpp"
#include "sst/simd.hpp"

namespace sst {
namespace {

// Convolution as a matrix product over gathered patches. Q = patch length,
// P = number of output positions. With P >= Q the patches are stored as
// columns (Q x P) so the long vector dimension is P; otherwise as rows (P x Q).
struct ConvGeom {
  int in_maps, h, w, out_maps, k, oh, ow;
  std::size_t q, p;
  bool cols;
};

ConvGeom conv_geom(const Shape3& in, const LayerSpec& s) {
  ConvGeom g{in.maps, in.height, in.width, s.units, s.kernel,
             in.height - s.kernel + 1, in.width - s.kernel + 1, 0, 0, false};
  g.q = static_cast<std::size_t>(g.in_maps) * static_cast<std::size_t>(g.k * g.k);
  g.p = static_cast<std::size_t>(g.oh) * static_cast<std::size_t>(g.ow);
  g.cols = g.p >= g.q;
  return g;
}

void gather_patches(const ConvGeom& g, const double* in, double* out) {
  const std::size_t plane = static_cast<std::size_t>(g.h * g.w);
  if (g.cols) {
    std::size_t q = 0;
    for (int i = 0; i < g.in_maps; ++i) {
      for (int ki = 0; ki < g.k; ++ki) {
        for (int kj = 0; kj < g.k; ++kj, ++q) {
          double* row = out + q * g.p;
          for (int r = 0; r < g.oh; ++r) {
            const double* src = in + i * plane + static_cast<std::size_t>((r + ki) * g.w + kj);
            std::copy(src, src + g.ow, row + r * g.ow);
          }
        }
      }
    }
  } else {
    for (int r = 0; r < g.oh; ++r) {
      for (int c = 0; c < g.ow; ++c) {
        double* row = out + static_cast<std::size_t>(r * g.ow + c) * g.q;
        for (int i = 0; i < g.in_maps; ++i) {
          for (int ki = 0; ki < g.k; ++ki) {
            const double* src = in + i * plane + static_cast<std::size_t>((r + ki) * g.w + c);
            std::copy(src, src + g.k, row);
            row += g.k;
          }
        }
      }
    }
  }
}

void scatter_patches(const ConvGeom& g, const double* patches, double* in_grad) {
  const std::size_t plane = static_cast<std::size_t>(g.h * g.w);
  if (g.cols) {
    std::size_t q = 0;
    for (int i = 0; i < g.in_maps; ++i) {
      for (int ki = 0; ki < g.k; ++ki) {
        for (int kj = 0; kj < g.k; ++kj, ++q) {
          const double* row = patches + q * g.p;
          for (int r = 0; r < g.oh; ++r) {
            double* dst = in_grad + i * plane + static_cast<std::size_t>((r + ki) * g.w + kj);
            const double* src = row + r * g.ow;
            for (int c = 0; c < g.ow; ++c) dst[c] += src[c];
          }
        }
      }
    }
  } else {
    for (int r = 0; r < g.oh; ++r) {
      for (int c = 0; c < g.ow; ++c) {
        const double* row = patches + static_cast<std::size_t>(r * g.ow + c) * g.q;
        for (int i = 0; i < g.in_maps; ++i) {
          for (int ki = 0; ki < g.k; ++ki) {
            double* dst = in_grad + i * plane + static_cast<std::size_t>((r + ki) * g.w + c);
            for (int kj = 0; kj < g.k; ++kj) dst[kj] += row[kj];
            row += g.k;
          }
        }
      }
    }
  }
}

std::vector<Shape3> chain_shapes(const std::vector<LayerSpec>& arch, Shape3 input) {
  if (input.maps < 1 || input.height < 1 || input.width < 1) {
    throw InconsistentArchitecture("input shape must be positive");
  }
  std::vector<Shape3> shapes{input};
  Shape3 s = input;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const LayerSpec& l = arch[i];
    const std::string where = "layer " + std::to_string(i) + ": ";
    switch (l.kind) {
      case LayerKind::conv:
        if (l.units < 1 || l.kernel < 1) throw InconsistentArchitecture(where + "conv needs maps and kernel >= 1");
        if (l.kernel > s.height || l.kernel > s.width) {
          throw InconsistentArchitecture(where + "conv kernel " + std::to_string(l.kernel) +
                                         " larger than " + std::to_string(s.height) + "x" +
                                         std::to_string(s.width) + " input");
        }
        s = {l.units, s.height - l.kernel + 1, s.width - l.kernel + 1};
        break;
      case LayerKind::sumpool:
        if (l.kernel < 1) throw InconsistentArchitecture(where + "pool window must be >= 1");
        if (s.height % l.kernel != 0 || s.width % l.kernel != 0) {
          throw InconsistentArchitecture(where + "pool window " + std::to_string(l.kernel) +
                                         " does not divide " + std::to_string(s.height) + "x" +
                                         std::to_string(s.width));
        }
        s = {s.maps, s.height / l.kernel, s.width / l.kernel};
        break;
      case LayerKind::full:
        if (l.units < 1) throw InconsistentArchitecture(where + "full layer needs units >= 1");
        s = {l.units, 1, 1};
        break;
      case LayerKind::activation:
        if (l.activation != Activation::identity && l.activation != Activation::tanh) {
          throw InconsistentArchitecture(where + "unknown activation");
        }
        break;
      default:
        throw InconsistentArchitecture(where + "unknown layer kind");
    }
    shapes.push_back(s);
  }
  if (s.height != 1 || s.width != 1) {
    throw InconsistentArchitecture("network must end in a vector (1x1 maps), got " +
                                   std::to_string(s.maps) + "@" + std::to_string(s.height) + "x" +
                                   std::to_string(s.width));
  }
  return shapes;
}

double loss_and_delta(std::span<const double> out, std::span<const double> target,
                      std::vector<double>& delta) {
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    delta[i] = out[i] - target[i];
    loss += delta[i] * delta[i];
  }
  return 0.5 * loss;
}

}  // namespace

std::vector<LayerSpec> default_architecture(int n_outputs) {
  return {LayerSpec::conv(8, 5),   LayerSpec::act(Activation::tanh), LayerSpec::sumpool(2),
          LayerSpec::conv(24, 5),  LayerSpec::act(Activation::tanh), LayerSpec::sumpool(2),
          LayerSpec::conv(100, 5), LayerSpec::act(Activation::tanh), LayerSpec::full(n_outputs)};
}

std::vector<LayerSpec> compact_architecture(int n_outputs) {
  return {LayerSpec::conv(6, 5),  LayerSpec::act(Activation::tanh), LayerSpec::sumpool(2),
          LayerSpec::conv(16, 5), LayerSpec::act(Activation::tanh), LayerSpec::sumpool(2),
          LayerSpec::full(40),    LayerSpec::act(Activation::tanh), LayerSpec::full(n_outputs)};
}

std::vector<std::pair<std::size_t, std::size_t>> Network::parameter_counts(
    const std::vector<LayerSpec>& arch, Shape3 input) {
  constexpr int kLimit = 1 << 20;
  if (input.maps > kLimit || input.height > kLimit || input.width > kLimit) {
    throw InconsistentArchitecture("input shape too large");
  }
  for (const auto& l : arch) {
    if (l.units > kLimit || l.kernel > kLimit) throw InconsistentArchitecture("layer size too large");
  }
  const auto shapes = chain_shapes(arch, input);
  std::vector<std::pair<std::size_t, std::size_t>> counts;
  for (std::size_t i = 0; i < arch.size(); ++i) {
    const LayerSpec& l = arch[i];
    const Shape3& in = shapes[i];
    const auto units = static_cast<std::size_t>(l.units);
    switch (l.kind) {
      case LayerKind::conv:
        counts.emplace_back(units * static_cast<std::size_t>(in.maps) *
                                static_cast<std::size_t>(l.kernel) * static_cast<std::size_t>(l.kernel),
                            units);
        break;
      case LayerKind::full: counts.emplace_back(units * in.size(), units); break;
      case LayerKind::sumpool:
        counts.emplace_back(l.trainable ? static_cast<std::size_t>(in.maps) : 0,
                            l.trainable ? static_cast<std::size_t>(in.maps) : 0);
        break;
      case LayerKind::activation: counts.emplace_back(0, 0); break;
    }
  }
  return counts;
}

Network::Network(std::vector<LayerSpec> arch, std::uint64_t seed, Shape3 input)
    : layers_(std::move(arch)), seed_(seed) {
  shapes_ = chain_shapes(layers_, input);
  Rng rng(seed);
  params_.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    const Shape3& in = shapes_[i];
    LayerParams& p = params_[i];
    switch (l.kind) {
      case LayerKind::conv:
      case LayerKind::full: {
        const std::size_t fan_in =
            l.kind == LayerKind::conv
                ? static_cast<std::size_t>(in.maps) * static_cast<std::size_t>(l.kernel * l.kernel)
                : in.size();
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        p.weights.resize(static_cast<std::size_t>(l.units) * fan_in);
        for (double& w : p.weights) w = rng.uniform(-bound, bound);
        p.bias.assign(static_cast<std::size_t>(l.units), 0.0);
        break;
      }
      case LayerKind::sumpool:
        if (l.trainable) {
          p.weights.assign(static_cast<std::size_t>(in.maps), 1.0 / (l.kernel * l.kernel));
          p.bias.assign(static_cast<std::size_t>(in.maps), 0.0);
        }
        break;
      case LayerKind::activation: break;
    }
  }
}

bool Network::trains(std::size_t layer) const noexcept {
  const LayerSpec& l = layers_[layer];
  return l.kind != LayerKind::activation && l.trainable;
}

std::size_t Network::trainable_parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (trains(i)) n += params_[i].weights.size() + params_[i].bias.size();
  }
  return n;
}

bool Network::all_finite() const noexcept {
  for (const auto& p : params_) {
    for (double v : p.weights) if (!std::isfinite(v)) return false;
    for (double v : p.bias) if (!std::isfinite(v)) return false;
  }
  return true;
}

void Network::fill(double value) {
  for (auto& p : params_) {
    std::fill(p.weights.begin(), p.weights.end(), value);
    std::fill(p.bias.begin(), p.bias.end(), value);
  }
}

void Network::set_filters(std::size_t layer, const std::vector<Tensor>& filters) {
  if (layer >= layers_.size() || layers_[layer].kind != LayerKind::conv) {
    throw ShapeMismatch("set_filters: layer " + std::to_string(layer) + " is not a conv layer");
  }
  const LayerSpec& l = layers_[layer];
  if (shapes_[layer].maps != 1 || filters.size() != static_cast<std::size_t>(l.units)) {
    throw ShapeMismatch("set_filters: need " + std::to_string(l.units) +
                        " filters on a single-map input");
  }
  const std::size_t k2 = static_cast<std::size_t>(l.kernel * l.kernel);
  auto& w = params_[layer].weights;
  for (std::size_t o = 0; o < filters.size(); ++o) {
    if (filters[o].size() != k2) throw ShapeMismatch("set_filters: filter size mismatch");
    std::copy(filters[o].data.begin(), filters[o].data.end(), w.begin() + static_cast<std::ptrdiff_t>(o * k2));
  }
  std::fill(params_[layer].bias.begin(), params_[layer].bias.end(), 0.0);
}

std::vector<double> Network::forward(const Tensor& input) const {
  const Shape3& in = input_shape();
  const bool ok2 = input.shape.size() == 2 && in.maps == 1 &&
                   input.shape[0] == static_cast<std::size_t>(in.height) &&
                   input.shape[1] == static_cast<std::size_t>(in.width);
  const bool ok3 = input.shape.size() == 3 &&
                   input.shape[0] == static_cast<std::size_t>(in.maps) &&
                   input.shape[1] == static_cast<std::size_t>(in.height) &&
                   input.shape[2] == static_cast<std::size_t>(in.width);
  if (!ok2 && !ok3) throw ShapeMismatch("input tensor does not match the network input shape");
  return forward(std::span<const double>(input.data));
}

std::vector<double> Network::forward(std::span<const double> input) const {
  Workspace ws(*this);
  auto out = ws.forward(*this, input);
  return {out.begin(), out.end()};
}

Gradients::Gradients(const Network& net) {
  layers.resize(net.params().size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights.assign(net.params()[i].weights.size(), 0.0);
    layers[i].bias.assign(net.params()[i].bias.size(), 0.0);
  }
}

void Gradients::zero() noexcept {
  for (auto& l : layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

bool Gradients::all_finite() const noexcept {
  for (const auto& l : layers) {
    for (double v : l.weights) if (!std::isfinite(v)) return false;
    for (double v : l.bias) if (!std::isfinite(v)) return false;
  }
  return true;
}

Workspace::Workspace(const Network& net) {
  const auto& shapes = net.shapes();
  const auto& layers = net.layers();
  act_.resize(shapes.size());
  delta_.resize(shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    act_[i].assign(shapes[i].size(), 0.0);
    delta_[i].assign(shapes[i].size(), 0.0);
  }
  gather_.resize(layers.size());
  std::size_t max_gather = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].kind == LayerKind::conv) {
      const ConvGeom g = conv_geom(shapes[i], layers[i]);
      gather_[i].assign(g.p * g.q, 0.0);
      max_gather = std::max(max_gather, g.p * g.q);
    } else if (layers[i].kind == LayerKind::sumpool) {
      gather_[i].assign(shapes[i + 1].size(), 0.0);
    }
  }
  gather_grad_.assign(max_gather, 0.0);
}

std::span<const double> Workspace::forward(const Network& net, std::span<const double> input) {
  const auto& shapes = net.shapes();
  const auto& layers = net.layers();
  if (input.size() != shapes.front().size()) {
    throw ShapeMismatch("input has " + std::to_string(input.size()) + " values, network expects " +
                        std::to_string(shapes.front().size()));
  }
  const auto& k = simd::kernels();
  std::copy(input.begin(), input.end(), act_[0].begin());

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    const LayerParams& p = net.params()[i];
    const double* in = act_[i].data();
    double* out = act_[i + 1].data();
    switch (l.kind) {
      case LayerKind::conv: {
        const ConvGeom g = conv_geom(shapes[i], l);
        for (int o = 0; o < g.out_maps; ++o) std::fill_n(out + o * g.p, g.p, p.bias[static_cast<std::size_t>(o)]);
        gather_patches(g, in, gather_[i].data());
        if (g.cols) {
          k.gemm_nn(static_cast<std::size_t>(g.out_maps), g.p, g.q, p.weights.data(), gather_[i].data(), out);
        } else {
          k.gemm_nt(static_cast<std::size_t>(g.out_maps), g.p, g.q, p.weights.data(), gather_[i].data(), out);
        }
        break;
      }
      case LayerKind::full: {
        const std::size_t q = shapes[i].size();
        std::copy(p.bias.begin(), p.bias.end(), out);
        k.gemm_nt(static_cast<std::size_t>(l.units), 1, q, p.weights.data(), in, out);
        break;
      }
      case LayerKind::sumpool: {
        const Shape3& s = shapes[i];
        const int win = l.kernel;
        const int oh = s.height / win, ow = s.width / win;
        double* sums = gather_[i].data();
        for (int m = 0; m < s.maps; ++m) {
          const double* plane = in + static_cast<std::size_t>(m * s.height * s.width);
          for (int r = 0; r < oh; ++r) {
            for (int c = 0; c < ow; ++c) {
              double acc = 0.0;
              for (int a = 0; a < win; ++a) {
                const double* row = plane + (r * win + a) * s.width + c * win;
                for (int b = 0; b < win; ++b) acc += row[b];
              }
              const std::size_t o = static_cast<std::size_t>((m * oh + r) * ow + c);
              sums[o] = acc;
              out[o] = l.trainable ? p.weights[static_cast<std::size_t>(m)] * acc + p.bias[static_cast<std::size_t>(m)] : acc;
            }
          }
        }
        break;
      }
      case LayerKind::activation: {
        const std::size_t n = act_[i].size();
        if (l.activation == Activation::tanh) {
          k.tanh_forward(in, out, n);
        } else {
          std::copy(in, in + n, out);
        }
        break;
      }
    }
  }
  return act_.back();
}

double Workspace::backward(const Network& net, std::span<const double> target, Gradients& grads) {
  const auto& shapes = net.shapes();
  const auto& layers = net.layers();
  if (target.size() != act_.back().size()) {
    throw ShapeMismatch("target has " + std::to_string(target.size()) + " values, network outputs " +
                        std::to_string(act_.back().size()));
  }
  const auto& k = simd::kernels();
  const double loss = loss_and_delta(act_.back(), target, delta_.back());

  for (std::size_t i = layers.size(); i-- > 0;) {
    const LayerSpec& l = layers[i];
    const LayerParams& p = net.params()[i];
    LayerParams& gp = grads.layers[i];
    const double* dout = delta_[i + 1].data();
    double* din = delta_[i].data();
    const bool need_input_grad = i > 0;
    switch (l.kind) {
      case LayerKind::conv: {
        const ConvGeom g = conv_geom(shapes[i], l);
        const std::size_t om = static_cast<std::size_t>(g.out_maps);
        if (l.trainable) {
          for (std::size_t o = 0; o < om; ++o) {
            double s = 0.0;
            for (std::size_t j = 0; j < g.p; ++j) s += dout[o * g.p + j];
            gp.bias[o] += s;
          }
          if (g.cols) {
            k.gemm_nt(om, g.q, g.p, dout, gather_[i].data(), gp.weights.data());
          } else {
            k.gemm_nn(om, g.q, g.p, dout, gather_[i].data(), gp.weights.data());
          }
        }
        if (need_input_grad) {
          double* dg = gather_grad_.data();
          std::fill_n(dg, g.p * g.q, 0.0);
          if (g.cols) {
            k.gemm_tn(g.q, g.p, om, p.weights.data(), dout, dg);
          } else {
            k.gemm_tn(g.p, g.q, om, dout, p.weights.data(), dg);
          }
          std::fill(delta_[i].begin(), delta_[i].end(), 0.0);
          scatter_patches(g, dg, din);
        }
        break;
      }
      case LayerKind::full: {
        const std::size_t q = shapes[i].size();
        const std::size_t o = static_cast<std::size_t>(l.units);
        if (l.trainable) {
          for (std::size_t j = 0; j < o; ++j) gp.bias[j] += dout[j];
          k.gemm_nn(o, q, 1, dout, act_[i].data(), gp.weights.data());
        }
        if (need_input_grad) {
          std::fill(delta_[i].begin(), delta_[i].end(), 0.0);
          k.gemm_tn(1, q, o, dout, p.weights.data(), din);
        }
        break;
      }
      case LayerKind::sumpool: {
        const Shape3& s = shapes[i];
        const int win = l.kernel;
        const int oh = s.height / win, ow = s.width / win;
        const double* sums = gather_[i].data();
        for (int m = 0; m < s.maps; ++m) {
          const std::size_t mm = static_cast<std::size_t>(m);
          const double sc = l.trainable ? p.weights[mm] : 1.0;
          double g_scale = 0.0, g_bias = 0.0;
          for (int r = 0; r < oh; ++r) {
            for (int c = 0; c < ow; ++c) {
              const std::size_t o = static_cast<std::size_t>((m * oh + r) * ow + c);
              g_scale += dout[o] * sums[o];
              g_bias += dout[o];
              if (need_input_grad) {
                const double v = dout[o] * sc;
                for (int a = 0; a < win; ++a) {
                  double* row = din + static_cast<std::size_t>(m * s.height * s.width) +
                                (r * win + a) * s.width + c * win;
                  for (int b = 0; b < win; ++b) row[b] = v;
                }
              }
            }
          }
          if (l.trainable) {
            gp.weights[mm] += g_scale;
            gp.bias[mm] += g_bias;
          }
        }
        break;
      }
      case LayerKind::activation: {
        if (!need_input_grad) break;
        const std::size_t n = delta_[i].size();
        std::copy(dout, dout + n, din);
        if (l.activation == Activation::tanh) k.tanh_backward(act_[i + 1].data(), din, n);
        break;
      }
    }
  }
  return loss;
}

void apply_gradients(Network& net, const Gradients& grads, double step) {
  if (!grads.all_finite()) throw NonFiniteGradient("gradient contains NaN or Inf; reduce the learning rate");
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (!net.trains(i)) continue;
    auto& p = net.params()[i];
    const auto& g = grads.layers[i];
    k.axpy(-step, g.weights.data(), p.weights.data(), p.weights.size());
    k.axpy(-step, g.bias.data(), p.bias.data(), p.bias.size());
  }
}

double sgd_step(Network& net, std::span<const Tensor> inputs,
                std::span<const std::vector<double>> targets, double lr) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw ShapeMismatch("sgd_step needs equally many inputs and targets (>= 1)");
  }
  Workspace ws(net);
  Gradients grads(net);
  double loss = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != net.input_shape().size()) throw ShapeMismatch("sgd_step: input shape mismatch");
    ws.forward(net, inputs[i].data);
    loss += ws.backward(net, targets[i], grads);
  }
  const double n = static_cast<double>(inputs.size());
  if (!std::isfinite(loss)) throw NonFiniteGradient("mini-batch loss is not finite");
  apply_gradients(net, grads, lr / n);
  return loss / n;
}

namespace {

double loss_at(const Network& net, Workspace& ws, std::span<const double> input,
               std::span<const double> target) {
  auto out = ws.forward(net, input);
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out[i] - target[i];
    s += d * d;
  }
  return 0.5 * s;
}

}  // namespace

double gradient_check(const Network& net, const Tensor& input, std::span<const double> target,
                      double eps, std::size_t max_params, std::uint64_t sample_seed) {
  if (!(eps > 0.0)) throw UsageError("gradient_check: eps must be positive");
  if (input.size() != net.input_shape().size()) throw ShapeMismatch("gradient_check: input shape mismatch");
  if (target.size() != static_cast<std::size_t>(net.output_size())) {
    throw ShapeMismatch("gradient_check: target length mismatch");
  }
  Network probe = net;
  Workspace ws(probe);
  Gradients grads(probe);
  ws.forward(probe, input.data);
  ws.backward(probe, target, grads);

  // (layer, is_bias, index) for every trainable scalar.
  struct Slot {
    std::size_t layer;
    bool bias;
    std::size_t index;
  };
  std::vector<Slot> slots;
  for (std::size_t i = 0; i < probe.layers().size(); ++i) {
    if (!probe.trains(i)) continue;
    for (std::size_t j = 0; j < probe.params()[i].weights.size(); ++j) slots.push_back({i, false, j});
    for (std::size_t j = 0; j < probe.params()[i].bias.size(); ++j) slots.push_back({i, true, j});
  }
  if (slots.size() > max_params) {
    Rng rng(sample_seed);
    for (std::size_t i = 0; i < max_params; ++i) {
      const std::size_t j = i + rng.below(slots.size() - i);
      std::swap(slots[i], slots[j]);
    }
    slots.resize(max_params);
  }

  double worst = 0.0;
  for (const Slot& s : slots) {
    auto& vec = s.bias ? probe.params()[s.layer].bias : probe.params()[s.layer].weights;
    const double saved = vec[s.index];
    vec[s.index] = saved + eps;
    const double up = loss_at(probe, ws, input.data, target);
    vec[s.index] = saved - eps;
    const double down = loss_at(probe, ws, input.data, target);
    vec[s.index] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const auto& gvec = s.bias ? grads.layers[s.layer].bias : grads.layers[s.layer].weights;
    const double analytic = gvec[s.index];
    const double scale = std::max(std::abs(numeric), std::abs(analytic));
    if (scale < 1e-12) continue;
    worst = std::max(worst, std::abs(numeric - analytic) / scale);
  }
  return worst;
}

GradcheckCase random_gradcheck_case(std::uint64_t seed) {
  Rng rng(seed);
  const auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); };
  const Shape3 input{pick(1, 2), pick(8, 12), pick(8, 12)};
  std::vector<LayerSpec> arch;
  int h = input.height, w = input.width;
  const int stages = pick(1, 2);
  for (int st = 0; st < stages; ++st) {
    const int k = std::min({pick(2, 3), h, w});
    arch.push_back(LayerSpec::conv(pick(2, 4), k));
    arch.push_back(LayerSpec::act(Activation::tanh));
    h -= k - 1;
    w -= k - 1;
    if (h % 2 == 0 && w % 2 == 0 && rng.bernoulli(0.7)) {
      arch.push_back(LayerSpec::sumpool(2, rng.bernoulli(0.8)));
      h /= 2;
      w /= 2;
    }
  }
  if (rng.bernoulli(0.5)) {
    arch.push_back(LayerSpec::full(pick(3, 6)));
    arch.push_back(LayerSpec::act(Activation::tanh));
  }
  const int n_out = pick(2, 5);
  arch.push_back(LayerSpec::full(n_out));

  GradcheckCase c{Network(std::move(arch), rng.next(), input), Tensor({static_cast<std::size_t>(input.maps),
                                                                       static_cast<std::size_t>(input.height),
                                                                       static_cast<std::size_t>(input.width)}),
                  {}};
  for (std::size_t i = 0; i < c.net.layers().size(); ++i) {
    if (!c.net.trains(i)) continue;
    for (auto& b : c.net.params()[i].bias) b = rng.uniform(-0.2, 0.2);
  }
  for (auto& v : c.input.data) v = rng.uniform();
  for (int i = 0; i < n_out; ++i) c.target.push_back(rng.uniform(-0.5, 1.0));
  return c;
}

double output_entropy(std::span<const std::vector<double>> outputs) {
  if (outputs.empty()) return 0.0;
  double total = 0.0;
  std::vector<double> p;
  for (const auto& v : outputs) {
    p.resize(v.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      p[i] = std::clamp(v[i], 0.0, 1.0);
      sum += p[i];
    }
    double h = 0.0;
    if (sum <= 0.0) {
      h = std::log2(static_cast<double>(v.size()));
    } else {
      for (double x : p) {
        const double q = x / sum;
        if (q > 0.0) h -= q * std::log2(q);
      }
    }
    total += h;
  }
  return total / static_cast<double>(outputs.size());
}

int argmax(std::span<const double> v) noexcept {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace sst
