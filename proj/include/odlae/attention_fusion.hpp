#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "odlae/autoencoder.hpp"
#include "odlae/numerics.hpp"
#include "odlae/rng.hpp"

namespace odlae {

// Scores each hidden layer: logit_l = score . tanh(projection h_l).
struct AttentionParams {
  Matrix projection;  // attention_dim x hidden
  Vector score;       // attention_dim

  friend bool operator==(const AttentionParams&, const AttentionParams&) = default;
};

// Classifier on the fused context: softmax(weights^T c + bias).
struct OutputHead {
  Matrix weights;  // hidden x classes
  Vector bias;     // classes

  friend bool operator==(const OutputHead&, const OutputHead&) = default;
};

// Rows are h_0..h_L in layer order.
using HiddenStack = Matrix;

AttentionParams init_attention(const ModelDims& dims, Rng& rng);
OutputHead init_output_head(const ModelDims& dims, Rng& rng);

HiddenStack stack_hidden(std::span<const Vector> hidden);

// Softmax over the per-layer logits; one weight per row of `stack`.
Vector attention_weights(const HiddenStack& stack, const AttentionParams& att);

// Row-weighted sum of the stack.
Vector context_fuse(std::span<const double> weights, const HiddenStack& stack);

Vector head_predict(std::span<const double> context, const OutputHead& head);

struct AttentionForward {
  HiddenStack stack;
  std::vector<Vector> projected;  // tanh(projection h_l), one per layer
  Vector weights;                 // alignment A
  Vector context;                 // C
  Vector prediction;              // yhat
};

AttentionForward attention_forward(std::span<const Vector> hidden, const AttentionParams& att,
                                   const OutputHead& head);

struct AttentionGradients {
  AttentionParams attention;
  OutputHead head;
  std::vector<Vector> hidden;  // dL/dh_l
};

// Gradients of pre_weight * cross_entropy(label, yhat) through the head, the
// fusion and the alignment scores back into every hidden layer.
AttentionGradients attention_backward(const AttentionForward& fwd, const AttentionParams& att,
                                      const OutputHead& head, std::size_t label,
                                      double pre_weight);

}  // namespace odlae
