#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace odlae {

struct OptimizerConfig {
  enum class Kind { sgd, adam };

  Kind kind = Kind::adam;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static Kind parse_kind(const std::string& name);
  void validate() const;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

const char* to_string(OptimizerConfig::Kind kind);

// Parameter tensors as flat views; gradients must mirror them one-to-one.
using ParamViews = std::vector<std::span<double>>;
using GradViews = std::vector<std::span<const double>>;

// p <- p - lr * g for every tensor.
void sgd_step(const ParamViews& params, const GradViews& grads, double learning_rate);

// Bias-corrected Adam with one step counter shared by all tensors. Moments
// are allocated on the first step to mirror the parameter shapes.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

void adam_step(AdamState& state, const OptimizerConfig& config, const ParamViews& params,
               const GradViews& grads);

// Owns the configuration and whatever state its kind needs.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {});

  void step(const ParamViews& params, const GradViews& grads);

  const OptimizerConfig& config() const noexcept { return config_; }
  const AdamState& adam_state() const noexcept { return adam_; }
  void restore(AdamState state) { adam_ = std::move(state); }
  std::uint64_t steps() const noexcept { return steps_; }
  void set_steps(std::uint64_t n) noexcept { steps_ = n; }

 private:
  OptimizerConfig config_;
  AdamState adam_;
  std::uint64_t steps_ = 0;
};

}  // namespace odlae
