#include "odlae/hedge_fusion.hpp"

#include <cmath>
#include <string>

#include "odlae/errors.hpp"

namespace odlae {

HedgeState HedgeState::uniform(std::size_t layers, double theta0, double floor) {
  if (layers == 0) throw ConfigError("hedge: need at least one layer");
  HedgeState s;
  s.beta = Vector(layers, 1.0 / static_cast<double>(layers));
  s.theta0 = theta0;
  s.floor = floor;
  s.validate();
  return s;
}

void HedgeState::validate() const {
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw ConfigError("hedge: theta0 must lie in (0, 1)");
  if (!(floor >= 0.0 && floor <= 1.0)) throw ConfigError("hedge: floor must lie in [0, 1]");
  if (beta.empty()) throw ConfigError("hedge: empty weight vector");
}

std::vector<LayerClassifier> init_classifiers(const ModelDims& dims, Rng& rng) {
  std::vector<LayerClassifier> out;
  out.reserve(dims.hidden_layers());
  for (std::size_t l = 0; l < dims.hidden_layers(); ++l) {
    out.push_back({glorot_uniform(dims.output_dim, dims.hidden_dim, rng), Vector(dims.output_dim)});
  }
  return out;
}

Vector layer_classify(std::span<const double> h, const LayerClassifier& clf) {
  if (clf.bias.dim() != clf.weights.rows()) throw ShapeError("layer_classify: bias/weight mismatch");
  Vector logits = matvec(clf.weights, h);
  axpy(1.0, clf.bias.span(), logits.span());
  return softmax(logits.span());
}

Vector ensemble_predict(std::span<const Vector> layer_outputs, const HedgeState& hedge) {
  if (layer_outputs.size() != hedge.beta.dim()) {
    throw ShapeError("ensemble_predict: " + std::to_string(layer_outputs.size()) +
                     " classifier outputs for " + std::to_string(hedge.beta.dim()) + " weights");
  }
  Vector out(layer_outputs.front().dim());
  for (std::size_t l = 0; l < layer_outputs.size(); ++l) {
    axpy(hedge.beta[l], layer_outputs[l].span(), out.span());
  }
  return out;
}

HedgeState hedge_update(const HedgeState& hedge, std::span<const double> layer_losses) {
  const std::size_t n = hedge.beta.dim();
  if (layer_losses.size() != n) {
    throw ShapeError("hedge_update: " + std::to_string(layer_losses.size()) + " losses for " +
                     std::to_string(n) + " weights");
  }
  HedgeState next = hedge;
  double total = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const double loss = layer_losses[l];
    if (!std::isfinite(loss) || loss < 0.0) {
      throw InvalidInput("hedge_update: layer loss must be finite and non-negative");
    }
    next.beta[l] = hedge.beta[l] * std::pow(hedge.theta0, loss);
    total += next.beta[l];
  }
  if (!(total > 0.0)) {
    // Every weight underflowed; fall back to the uninformed prior.
    next.beta.fill(1.0 / static_cast<double>(n));
  } else {
    for (auto& b : next.beta) b /= total;
  }

  if (hedge.floor > 0.0) {
    // Pin weights below the floor to it and rescale the rest into the
    // remaining mass; repeat until nothing new drops below.
    const double lower = hedge.floor / static_cast<double>(n);
    std::vector<bool> pinned(n, false);
    for (std::size_t round = 0; round <= n; ++round) {
      double free_mass = 0.0;
      std::size_t pinned_count = 0;
      for (std::size_t l = 0; l < n; ++l) {
        if (pinned[l]) {
          ++pinned_count;
        } else {
          free_mass += next.beta[l];
        }
      }
      const double budget = 1.0 - lower * static_cast<double>(pinned_count);
      bool changed = false;
      for (std::size_t l = 0; l < n; ++l) {
        if (pinned[l]) {
          next.beta[l] = lower;
          continue;
        }
        next.beta[l] = free_mass > 0.0 ? next.beta[l] / free_mass * budget : lower;
        if (next.beta[l] < lower) {
          pinned[l] = true;
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (std::size_t l = 0; l < n; ++l)
      if (pinned[l]) next.beta[l] = lower;
  }
  return next;
}

ClassifierGradients hedge_backward(std::span<const Vector> hidden,
                                   std::span<const LayerClassifier> classifiers,
                                   std::span<const Vector> layer_outputs,
                                   const Vector& ensemble, const HedgeState& hedge,
                                   std::size_t label, double pre_weight) {
  const std::size_t layers = hidden.size();
  if (classifiers.size() != layers || layer_outputs.size() != layers ||
      hedge.beta.dim() != layers) {
    throw ShapeError("hedge_backward: per-layer inputs disagree in count");
  }
  if (label >= ensemble.dim()) throw InvalidInput("hedge_backward: label out of range");

  ClassifierGradients g;
  g.classifiers.reserve(layers);
  g.hidden.reserve(layers);
  // Inside the log clamp the loss is flat, so the gradient vanishes there.
  const double p = ensemble[label];
  const double d_yhat = p > kLogClamp ? -pre_weight / p : 0.0;

  for (std::size_t l = 0; l < layers; ++l) {
    const auto& clf = classifiers[l];
    const auto& f = layer_outputs[l];
    const double g_l = d_yhat * hedge.beta[l] * f[label];
    Vector dz(f.dim());
    for (std::size_t k = 0; k < f.dim(); ++k) dz[k] = g_l * ((k == label ? 1.0 : 0.0) - f[k]);

    LayerClassifier grad{Matrix(clf.weights.rows(), clf.weights.cols()), dz};
    add_outer(1.0, dz.span(), hidden[l].span(), grad.weights);
    g.hidden.push_back(matvec_transposed(clf.weights, dz.span()));
    g.classifiers.push_back(std::move(grad));
  }
  return g;
}

}  // namespace odlae
