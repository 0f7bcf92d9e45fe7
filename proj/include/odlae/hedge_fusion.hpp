#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "odlae/autoencoder.hpp"
#include "odlae/numerics.hpp"
#include "odlae/rng.hpp"

namespace odlae {

// Softmax classifier reading one hidden layer: f = softmax(weights h + bias).
struct LayerClassifier {
  Matrix weights;  // classes x hidden
  Vector bias;     // classes

  friend bool operator==(const LayerClassifier&, const LayerClassifier&) = default;
};

// Expert weights over the per-layer classifiers.
struct HedgeState {
  Vector beta;           // one weight per hidden layer, on the simplex
  double theta0 = 0.99;  // discount, in (0, 1)
  double floor = 0.01;   // smoothing; each weight kept >= floor / (L+1)

  static HedgeState uniform(std::size_t layers, double theta0 = 0.99, double floor = 0.01);
  void validate() const;

  friend bool operator==(const HedgeState&, const HedgeState&) = default;
};

std::vector<LayerClassifier> init_classifiers(const ModelDims& dims, Rng& rng);

Vector layer_classify(std::span<const double> h, const LayerClassifier& clf);

// Convex combination sum_l beta_l f_l.
Vector ensemble_predict(std::span<const Vector> layer_outputs, const HedgeState& hedge);

// beta_l <- beta_l * theta0^loss_l, renormalize, then lift every weight to
// at least floor/(L+1) and renormalize again. Losses must be finite and >= 0.
HedgeState hedge_update(const HedgeState& hedge, std::span<const double> layer_losses);

struct ClassifierGradients {
  std::vector<LayerClassifier> classifiers;  // same shapes as the inputs
  std::vector<Vector> hidden;                // dL/dh_l, fed to the autoencoder
};

// Gradients of pre_weight * cross_entropy(label, sum_l beta_l f_l) with beta
// held fixed. `layer_outputs` and `ensemble` must come from the same forward
// pass as `hidden`.
ClassifierGradients hedge_backward(std::span<const Vector> hidden,
                                   std::span<const LayerClassifier> classifiers,
                                   std::span<const Vector> layer_outputs,
                                   const Vector& ensemble, const HedgeState& hedge,
                                   std::size_t label, double pre_weight);

}  // namespace odlae
