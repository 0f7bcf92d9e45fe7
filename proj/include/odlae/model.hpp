#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "odlae/attention_fusion.hpp"
#include "odlae/autoencoder.hpp"
#include "odlae/denoise.hpp"
#include "odlae/hedge_fusion.hpp"
#include "odlae/loss_balance.hpp"
#include "odlae/numerics.hpp"
#include "odlae/optimize.hpp"
#include "odlae/rng.hpp"

namespace odlae {

// Numeric values double as checkpoint variant tags.
enum class Variant : std::uint8_t {
  odlae1 = 1,               // hedge-weighted per-layer classifiers
  odlae2 = 2,               // self-attention fusion head
  odldae1 = 3,              // odlae1 trained on corrupted inputs
  odldae2 = 4,              // odlae2 trained on corrupted inputs
  linear_ogd_baseline = 5,  // softmax regression, plain OGD
};

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);
bool uses_attention(Variant v);
bool uses_denoising(Variant v);

struct ModelConfig {
  Variant variant = Variant::odlae1;
  ModelDims dims;
  Activation output_activation = Activation::sigmoid;
  OptimizerConfig optimizer;
  double theta0 = 0.99;
  double beta_floor = 0.01;
  TradeoffState tradeoff;          // initial weights and discounts
  bool adaptive_tradeoff = true;   // false keeps (a_re, a_pre) fixed
  CorruptionPolicy corruption;     // only consulted by the denoising variants
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-step diagnostics. `prediction` is the distribution the training pass
// produced before any parameter moved.
struct StepRecord {
  std::uint64_t t = 0;
  std::size_t label = 0;
  std::size_t predicted = 0;
  Vector prediction;
  double recon_loss = 0.0;
  double pred_loss = 0.0;
  double total_loss = 0.0;
  std::vector<double> layer_losses;  // hedge variants
  Vector layer_weights;              // beta after the update (hedge) or A (attention)
  double a_re = 0.0;
  double a_pre = 0.0;
};

// Loss and parameter gradients at the current state without updating
// anything; tensors follow parameters() order.
struct LossGradient {
  double recon_loss = 0.0;
  double pred_loss = 0.0;
  double total = 0.0;
  std::vector<std::vector<double>> gradients;
};

// Everything needed to rebuild a model bit for bit.
struct ModelSnapshot {
  ModelConfig config;
  std::vector<Matrix> tensors;  // parameters() order; vectors stored as n x 1
  Vector hedge_beta;            // empty for non-hedge variants
  TradeoffState tradeoff;
  std::uint64_t steps = 0;
  std::uint64_t optimizer_steps = 0;
  AdamState adam;
  Rng corruption_rng;
};

// Prequential interface: predict() must not change observable state, update()
// performs exactly one online learning step.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::size_t num_classes() const = 0;
  virtual Vector predict(std::span<const double> x) const = 0;
  virtual StepRecord update(std::span<const double> x, std::size_t label) = 0;
};

class OnlineModel : public OnlineLearner {
 public:
  explicit OnlineModel(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }
  Variant variant() const noexcept { return config_.variant; }
  std::size_t num_classes() const override { return config_.dims.output_dim; }
  std::uint64_t steps() const noexcept { return steps_; }

  // Flat views over every trainable tensor in a fixed documented order.
  virtual ParamViews parameters() = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  virtual LossGradient loss_gradient(std::span<const double> encoder_input,
                                     std::span<const double> target, std::size_t label) const = 0;

  virtual ModelSnapshot snapshot() const = 0;

 protected:
  void check_input(std::span<const double> x, std::size_t label) const;

  ModelConfig config_;
  std::uint64_t steps_ = 0;
};

// Shared encoder/decoder, trade-off weights, optimizer and corruption stream.
class AutoencoderModel : public OnlineModel {
 public:
  explicit AutoencoderModel(ModelConfig config);

  const EncoderParams& encoder() const noexcept { return encoder_; }
  const DecoderParams& decoder() const noexcept { return decoder_; }
  const TradeoffState& tradeoff() const noexcept { return tradeoff_; }
  const Optimizer& optimizer() const noexcept { return optimizer_; }
  AutoencoderActivations activations() const noexcept {
    return {Activation::relu, config_.output_activation};
  }

 protected:
  void append_backbone_views(ParamViews& out);
  void append_backbone_names(std::vector<std::string>& out) const;
  void append_backbone_gradients(const AutoencoderGradients& g,
                                 std::vector<std::vector<double>>& out) const;
  void fill_backbone_snapshot(ModelSnapshot& s) const;
  // Restores backbone state and returns the index of the first tensor that
  // belongs to the fusion part.
  std::size_t restore_backbone(const ModelSnapshot& s);
  Vector encoder_input(std::span<const double> x);
  void apply_gradients(const std::vector<std::vector<double>>& grads);

  EncoderParams encoder_;
  DecoderParams decoder_;
  TradeoffState tradeoff_;
  Optimizer optimizer_;
  Rng corruption_rng_;
};

// Output-level fusion (ODLAE-1 / ODLDAE-1).
class HedgeModel final : public AutoencoderModel {
 public:
  explicit HedgeModel(ModelConfig config);
  explicit HedgeModel(const ModelSnapshot& snapshot);

  Vector predict(std::span<const double> x) const override;
  StepRecord update(std::span<const double> x, std::size_t label) override;

  ParamViews parameters() override;
  std::vector<std::string> parameter_names() const override;
  LossGradient loss_gradient(std::span<const double> encoder_input,
                             std::span<const double> target, std::size_t label) const override;
  ModelSnapshot snapshot() const override;

  const std::vector<LayerClassifier>& classifiers() const noexcept { return classifiers_; }
  const HedgeState& hedge() const noexcept { return hedge_; }

 private:
  struct Pass;
  Pass run_forward(std::span<const double> encoder_input, std::span<const double> target,
                   std::size_t label) const;
  LossGradient gradients(const Pass& pass, std::size_t label, const TradeoffState& tradeoff) const;

  std::vector<LayerClassifier> classifiers_;
  HedgeState hedge_;
};

// Feature-level fusion (ODLAE-2 / ODLDAE-2).
class AttentionModel final : public AutoencoderModel {
 public:
  explicit AttentionModel(ModelConfig config);
  explicit AttentionModel(const ModelSnapshot& snapshot);

  Vector predict(std::span<const double> x) const override;
  StepRecord update(std::span<const double> x, std::size_t label) override;

  ParamViews parameters() override;
  std::vector<std::string> parameter_names() const override;
  LossGradient loss_gradient(std::span<const double> encoder_input,
                             std::span<const double> target, std::size_t label) const override;
  ModelSnapshot snapshot() const override;

  const AttentionParams& attention() const noexcept { return attention_; }
  const OutputHead& head() const noexcept { return head_; }
  // Freezes the alignment parameters (they receive no updates).
  void freeze_attention(bool frozen) noexcept { attention_frozen_ = frozen; }

 private:
  struct Pass;
  Pass run_forward(std::span<const double> encoder_input, std::span<const double> target) const;
  LossGradient gradients(const Pass& pass, std::size_t label, const TradeoffState& tradeoff) const;

  AttentionParams attention_;
  OutputHead head_;
  bool attention_frozen_ = false;
};

// Single-layer softmax regression trained by plain online gradient descent.
class LinearOgdModel final : public OnlineModel {
 public:
  explicit LinearOgdModel(ModelConfig config);
  explicit LinearOgdModel(const ModelSnapshot& snapshot);

  Vector predict(std::span<const double> x) const override;
  StepRecord update(std::span<const double> x, std::size_t label) override;

  ParamViews parameters() override;
  std::vector<std::string> parameter_names() const override;
  LossGradient loss_gradient(std::span<const double> encoder_input,
                             std::span<const double> target, std::size_t label) const override;
  ModelSnapshot snapshot() const override;

 private:
  Matrix weights_;  // classes x input
  Vector bias_;
};

std::unique_ptr<OnlineModel> make_model(const ModelConfig& config);
std::unique_ptr<OnlineModel> restore_model(const ModelSnapshot& snapshot);

}  // namespace odlae
