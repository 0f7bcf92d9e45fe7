#include "odlae/attention_fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odlae/errors.hpp"

namespace odlae {

AttentionParams init_attention(const ModelDims& dims, Rng& rng) {
  AttentionParams att;
  att.projection = glorot_uniform(dims.attention_dim, dims.hidden_dim, rng);
  // The score vector is a 1 x attention_dim map.
  const Matrix score = glorot_uniform(1, dims.attention_dim, rng);
  att.score = Vector(score.span());
  return att;
}

OutputHead init_output_head(const ModelDims& dims, Rng& rng) {
  return {glorot_uniform(dims.hidden_dim, dims.output_dim, rng), Vector(dims.output_dim)};
}

HiddenStack stack_hidden(std::span<const Vector> hidden) {
  if (hidden.empty()) throw ShapeError("stack_hidden: no hidden layers");
  const std::size_t width = hidden.front().dim();
  HiddenStack stack(hidden.size(), width);
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    if (hidden[l].dim() != width) {
      throw ShapeError("stack_hidden: layer " + std::to_string(l) + " has width " +
                       std::to_string(hidden[l].dim()) + ", expected " + std::to_string(width));
    }
    std::copy(hidden[l].begin(), hidden[l].end(), stack.row(l).begin());
  }
  return stack;
}

namespace {

Vector projected_row(const HiddenStack& stack, std::size_t l, const AttentionParams& att) {
  Vector u = matvec(att.projection, stack.row(l));
  for (auto& v : u) v = std::tanh(v);
  return u;
}

}  // namespace

Vector attention_weights(const HiddenStack& stack, const AttentionParams& att) {
  if (att.score.dim() != att.projection.rows()) throw ShapeError("attention: score/projection mismatch");
  Vector logits(stack.rows());
  for (std::size_t l = 0; l < stack.rows(); ++l) {
    logits[l] = dot(att.score.span(), projected_row(stack, l, att).span());
  }
  return softmax(logits.span());
}

Vector context_fuse(std::span<const double> weights, const HiddenStack& stack) {
  return matvec_transposed(stack, weights);
}

Vector head_predict(std::span<const double> context, const OutputHead& head) {
  if (head.bias.dim() != head.weights.cols()) throw ShapeError("head_predict: bias/weight mismatch");
  Vector logits = matvec_transposed(head.weights, context);
  axpy(1.0, head.bias.span(), logits.span());
  return softmax(logits.span());
}

AttentionForward attention_forward(std::span<const Vector> hidden, const AttentionParams& att,
                                   const OutputHead& head) {
  if (att.score.dim() != att.projection.rows()) throw ShapeError("attention: score/projection mismatch");
  AttentionForward f;
  f.stack = stack_hidden(hidden);
  Vector logits(f.stack.rows());
  f.projected.reserve(f.stack.rows());
  for (std::size_t l = 0; l < f.stack.rows(); ++l) {
    f.projected.push_back(projected_row(f.stack, l, att));
    logits[l] = dot(att.score.span(), f.projected.back().span());
  }
  f.weights = softmax(logits.span());
  f.context = context_fuse(f.weights.span(), f.stack);
  f.prediction = head_predict(f.context.span(), head);
  return f;
}

AttentionGradients attention_backward(const AttentionForward& fwd, const AttentionParams& att,
                                      const OutputHead& head, std::size_t label,
                                      double pre_weight) {
  const auto& yhat = fwd.prediction;
  if (label >= yhat.dim()) throw InvalidInput("attention_backward: label out of range");
  const std::size_t layers = fwd.stack.rows();

  AttentionGradients g;
  g.attention = {Matrix(att.projection.rows(), att.projection.cols()), Vector(att.score.dim())};
  g.head = {Matrix(head.weights.rows(), head.weights.cols()), Vector(head.bias.dim())};

  // Softmax + clamped cross-entropy: flat (zero gradient) inside the clamp.
  Vector dz(yhat.dim());
  if (yhat[label] > kLogClamp) {
    for (std::size_t k = 0; k < yhat.dim(); ++k)
      dz[k] = pre_weight * (yhat[k] - (k == label ? 1.0 : 0.0));
  }
  add_outer(1.0, fwd.context.span(), dz.span(), g.head.weights);
  g.head.bias = dz;
  const Vector d_context = matvec(head.weights, dz.span());

  // C = sum_l A_l h_l
  Vector d_weights(layers);
  g.hidden.reserve(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    d_weights[l] = dot(d_context.span(), fwd.stack.row(l));
    Vector dh(d_context.dim());
    axpy(fwd.weights[l], d_context.span(), dh.span());
    g.hidden.push_back(std::move(dh));
  }

  // Through the alignment softmax.
  const double mean = dot(d_weights.span(), fwd.weights.span());
  for (std::size_t l = 0; l < layers; ++l) {
    const double d_logit = fwd.weights[l] * (d_weights[l] - mean);
    if (d_logit == 0.0) continue;
    const auto& t = fwd.projected[l];
    axpy(d_logit, t.span(), g.attention.score.span());
    Vector du(t.dim());
    for (std::size_t i = 0; i < t.dim(); ++i) du[i] = d_logit * att.score[i] * (1.0 - t[i] * t[i]);
    add_outer(1.0, du.span(), fwd.stack.row(l), g.attention.projection);
    axpy(1.0, matvec_transposed(att.projection, du.span()).span(), g.hidden[l].span());
  }
  return g;
}

}  // namespace odlae
