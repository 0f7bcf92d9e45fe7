#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "odlae/numerics.hpp"
#include "odlae/rng.hpp"

namespace odlae {

// Network dimensions. There are `last_hidden + 1` hidden layers h_0..h_L,
// all of width `hidden_dim`.
struct ModelDims {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 64;
  std::size_t output_dim = 0;
  std::size_t last_hidden = 2;
  std::size_t attention_dim = 30;

  std::size_t hidden_layers() const noexcept { return last_hidden + 1; }
  void validate() const;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// weights[0]: hidden x input, weights[l >= 1]: hidden x hidden.
// biases[l]: hidden, for l = 0..L.
struct EncoderParams {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static EncoderParams zeros(const ModelDims& dims);
  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

// weights[0] maps the first decoder state back to the input space
// (input x hidden); weights[l >= 1] are hidden x hidden and produce
// hhat_{l-1} from hhat_l. biases follow the same indexing.
struct DecoderParams {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static DecoderParams zeros(const ModelDims& dims);
  friend bool operator==(const DecoderParams&, const DecoderParams&) = default;
};

struct AutoencoderActivations {
  Activation hidden = Activation::relu;
  Activation output = Activation::sigmoid;
};

// Everything the backward pass needs from one forward call.
struct ForwardTrace {
  Vector input;                      // what the encoder consumed
  std::vector<Vector> encoder_pre;   // b_l + W_l h_{l-1}
  std::vector<Vector> hidden;        // h_0..h_L
  std::vector<Vector> decoder_pre;   // index l-1 holds the pre-activation of hhat_{l-1}, l = 1..L
  std::vector<Vector> decoded;       // hhat_0..hhat_L, hhat_L == h_L
  Vector output_pre;
  Vector reconstruction;             // xhat
};

std::pair<EncoderParams, DecoderParams> init_autoencoder(const ModelDims& dims, Rng& rng);

// Uniform on +-sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

std::vector<Vector> encode(std::span<const double> x, const EncoderParams& enc,
                           Activation activation);

struct Decoded {
  std::vector<Vector> states;  // hhat_0..hhat_L
  Vector reconstruction;
};
Decoded decode(std::span<const double> h_last, const DecoderParams& dec,
               Activation hidden_activation, Activation output_activation);

ForwardTrace forward(std::span<const double> x, const EncoderParams& enc,
                     const DecoderParams& dec, AutoencoderActivations act);

// Mean squared error between the clean input and its reconstruction.
double reconstruction_loss(std::span<const double> x, std::span<const double> xhat);

struct AutoencoderGradients {
  EncoderParams encoder;
  DecoderParams decoder;
};

// Gradients of
//   recon_weight * reconstruction_loss(target, xhat) + sum_l <upstream[l], h_l>
// with respect to every encoder and decoder tensor. `upstream` may be empty
// (no classifier signal) or hold one gradient per hidden layer.
AutoencoderGradients backward(const ForwardTrace& trace, const EncoderParams& enc,
                              const DecoderParams& dec, AutoencoderActivations act,
                              std::span<const Vector> upstream, double recon_weight,
                              std::span<const double> target);

// Same, with the reconstruction target equal to the encoder input.
AutoencoderGradients backward(const ForwardTrace& trace, const EncoderParams& enc,
                              const DecoderParams& dec, AutoencoderActivations act,
                              std::span<const Vector> upstream, double recon_weight);

}  // namespace odlae
