#include "odlae/autoencoder.hpp"

#include <cmath>
#include <string>

#include "odlae/errors.hpp"

namespace odlae {

namespace {

Vector affine(const Matrix& w, std::span<const double> in, const Vector& b) {
  Vector out = matvec(w, in);
  axpy(1.0, b.span(), out.span());
  return out;
}

void check_params(const EncoderParams& enc, const DecoderParams& dec) {
  if (enc.weights.empty() || enc.weights.size() != enc.biases.size() ||
      dec.weights.size() != enc.weights.size() || dec.biases.size() != enc.weights.size()) {
    throw ShapeError("autoencoder: encoder/decoder layer counts disagree");
  }
}

}  // namespace

void ModelDims::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0 || attention_dim == 0) {
    throw ConfigError("model dimensions must all be positive");
  }
}

EncoderParams EncoderParams::zeros(const ModelDims& dims) {
  EncoderParams p;
  for (std::size_t l = 0; l < dims.hidden_layers(); ++l) {
    p.weights.emplace_back(dims.hidden_dim, l == 0 ? dims.input_dim : dims.hidden_dim);
    p.biases.emplace_back(dims.hidden_dim);
  }
  return p;
}

DecoderParams DecoderParams::zeros(const ModelDims& dims) {
  DecoderParams p;
  p.weights.emplace_back(dims.input_dim, dims.hidden_dim);
  p.biases.emplace_back(dims.input_dim);
  for (std::size_t l = 1; l < dims.hidden_layers(); ++l) {
    p.weights.emplace_back(dims.hidden_dim, dims.hidden_dim);
    p.biases.emplace_back(dims.hidden_dim);
  }
  return p;
}

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (auto& w : m.span()) w = rng.uniform(-bound, bound);
  return m;
}

std::pair<EncoderParams, DecoderParams> init_autoencoder(const ModelDims& dims, Rng& rng) {
  dims.validate();
  auto enc = EncoderParams::zeros(dims);
  auto dec = DecoderParams::zeros(dims);
  for (auto& w : enc.weights) w = glorot_uniform(w.rows(), w.cols(), rng);
  for (auto& w : dec.weights) w = glorot_uniform(w.rows(), w.cols(), rng);
  return {std::move(enc), std::move(dec)};
}

std::vector<Vector> encode(std::span<const double> x, const EncoderParams& enc,
                           Activation activation) {
  std::vector<Vector> hidden;
  hidden.reserve(enc.weights.size());
  for (std::size_t l = 0; l < enc.weights.size(); ++l) {
    const auto in = l == 0 ? x : hidden.back().span();
    hidden.push_back(apply(activation, affine(enc.weights[l], in, enc.biases[l]).span()));
  }
  return hidden;
}

Decoded decode(std::span<const double> h_last, const DecoderParams& dec,
               Activation hidden_activation, Activation output_activation) {
  const std::size_t layers = dec.weights.size();
  Decoded out;
  out.states.resize(layers);
  out.states[layers - 1] = Vector(h_last);
  for (std::size_t l = layers - 1; l >= 1; --l) {
    out.states[l - 1] =
        apply(hidden_activation, affine(dec.weights[l], out.states[l].span(), dec.biases[l]).span());
  }
  out.reconstruction =
      apply(output_activation, affine(dec.weights[0], out.states[0].span(), dec.biases[0]).span());
  return out;
}

ForwardTrace forward(std::span<const double> x, const EncoderParams& enc,
                     const DecoderParams& dec, AutoencoderActivations act) {
  check_params(enc, dec);
  const std::size_t layers = enc.weights.size();
  ForwardTrace t;
  t.input = Vector(x);
  t.encoder_pre.reserve(layers);
  t.hidden.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = l == 0 ? t.input.span() : t.hidden.back().span();
    t.encoder_pre.push_back(affine(enc.weights[l], in, enc.biases[l]));
    t.hidden.push_back(apply(act.hidden, t.encoder_pre.back().span()));
  }

  t.decoded.resize(layers);
  t.decoder_pre.resize(layers - 1);
  t.decoded[layers - 1] = t.hidden.back();
  for (std::size_t l = layers - 1; l >= 1; --l) {
    t.decoder_pre[l - 1] = affine(dec.weights[l], t.decoded[l].span(), dec.biases[l]);
    t.decoded[l - 1] = apply(act.hidden, t.decoder_pre[l - 1].span());
  }
  t.output_pre = affine(dec.weights[0], t.decoded[0].span(), dec.biases[0]);
  t.reconstruction = apply(act.output, t.output_pre.span());
  return t;
}

double reconstruction_loss(std::span<const double> x, std::span<const double> xhat) {
  return mean_squared_error(x, xhat);
}

AutoencoderGradients backward(const ForwardTrace& trace, const EncoderParams& enc,
                              const DecoderParams& dec, AutoencoderActivations act,
                              std::span<const Vector> upstream, double recon_weight,
                              std::span<const double> target) {
  check_params(enc, dec);
  const std::size_t layers = enc.weights.size();
  if (trace.hidden.size() != layers || trace.decoded.size() != layers) {
    throw ShapeError("backward: trace does not match parameter depth");
  }
  if (!upstream.empty() && upstream.size() != layers) {
    throw ShapeError("backward: expected " + std::to_string(layers) +
                     " upstream gradients, got " + std::to_string(upstream.size()));
  }
  const auto& xhat = trace.reconstruction;
  if (target.size() != xhat.dim()) {
    throw ShapeError("backward: reconstruction target has wrong dimension");
  }

  AutoencoderGradients g{EncoderParams{}, DecoderParams{}};
  for (const auto& w : enc.weights) g.encoder.weights.emplace_back(w.rows(), w.cols());
  for (const auto& b : enc.biases) g.encoder.biases.emplace_back(b.dim());
  for (const auto& w : dec.weights) g.decoder.weights.emplace_back(w.rows(), w.cols());
  for (const auto& b : dec.biases) g.decoder.biases.emplace_back(b.dim());

  // Output layer: d/dxhat of w * mean((xhat - target)^2).
  const double scale = 2.0 * recon_weight / static_cast<double>(xhat.dim());
  Vector delta(xhat.dim());
  for (std::size_t i = 0; i < xhat.dim(); ++i) {
    delta[i] = scale * (xhat[i] - target[i]) *
               activation_derivative(act.output, trace.output_pre[i], xhat[i]);
  }
  add_outer(1.0, delta.span(), trace.decoded[0].span(), g.decoder.weights[0]);
  axpy(1.0, delta.span(), g.decoder.biases[0].span());
  Vector d_state = matvec_transposed(dec.weights[0], delta.span());

  // Decoder hidden layers, walking from hhat_0 up to hhat_L.
  for (std::size_t l = 1; l < layers; ++l) {
    const auto& pre = trace.decoder_pre[l - 1];
    const auto& out = trace.decoded[l - 1];
    Vector d(pre.dim());
    for (std::size_t i = 0; i < pre.dim(); ++i)
      d[i] = d_state[i] * activation_derivative(act.hidden, pre[i], out[i]);
    add_outer(1.0, d.span(), trace.decoded[l].span(), g.decoder.weights[l]);
    axpy(1.0, d.span(), g.decoder.biases[l].span());
    d_state = matvec_transposed(dec.weights[l], d.span());
  }

  // hhat_L is h_L, so the decoder gradient joins the encoder at the top.
  Vector d_hidden = std::move(d_state);
  for (std::size_t l = layers; l-- > 0;) {
    if (!upstream.empty()) axpy(1.0, upstream[l].span(), d_hidden.span());
    const auto& pre = trace.encoder_pre[l];
    const auto& out = trace.hidden[l];
    Vector d(pre.dim());
    for (std::size_t i = 0; i < pre.dim(); ++i)
      d[i] = d_hidden[i] * activation_derivative(act.hidden, pre[i], out[i]);
    const auto in = l == 0 ? trace.input.span() : trace.hidden[l - 1].span();
    add_outer(1.0, d.span(), in, g.encoder.weights[l]);
    axpy(1.0, d.span(), g.encoder.biases[l].span());
    if (l > 0) d_hidden = matvec_transposed(enc.weights[l], d.span());
  }
  return g;
}

AutoencoderGradients backward(const ForwardTrace& trace, const EncoderParams& enc,
                              const DecoderParams& dec, AutoencoderActivations act,
                              std::span<const Vector> upstream, double recon_weight) {
  return backward(trace, enc, dec, act, upstream, recon_weight, trace.input.span());
}

}  // namespace odlae
