#include "odlae/optimize.hpp"

#include <cmath>

#include "odlae/errors.hpp"
#include "odlae/numerics.hpp"

namespace odlae {

namespace {

void check_conforming(const ParamViews& params, const GradViews& grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("optimizer: " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params.size()) + " parameter tensors");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != grads[i].size()) {
      throw ShapeError("optimizer: tensor " + std::to_string(i) + " has " +
                       std::to_string(params[i].size()) + " entries but its gradient has " +
                       std::to_string(grads[i].size()));
    }
    if (!all_finite(grads[i])) {
      throw NumericError("optimizer: non-finite gradient in tensor " + std::to_string(i));
    }
  }
}

}  // namespace

OptimizerConfig::Kind OptimizerConfig::parse_kind(const std::string& name) {
  if (name == "sgd" || name == "ogd") return Kind::sgd;
  if (name == "adam") return Kind::adam;
  throw ConfigError("unknown optimizer '" + name + "'");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and non-negative");
  }
  if (kind == Kind::adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ConfigError("adam betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
  }
}

const char* to_string(OptimizerConfig::Kind kind) {
  return kind == OptimizerConfig::Kind::sgd ? "sgd" : "adam";
}

void sgd_step(const ParamViews& params, const GradViews& grads, double learning_rate) {
  check_conforming(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) axpy(-learning_rate, grads[i], params[i]);
}

void adam_step(AdamState& state, const OptimizerConfig& config, const ParamViews& params,
               const GradViews& grads) {
  check_conforming(params, grads);
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam: moment tensors do not mirror the parameters");
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != params[i].size() || v.size() != params[i].size()) {
      throw ShapeError("adam: moment " + std::to_string(i) + " has the wrong size");
    }
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double g = grads[i][k];
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g;
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      params[i][k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) { config_.validate(); }

void Optimizer::step(const ParamViews& params, const GradViews& grads) {
  if (config_.kind == OptimizerConfig::Kind::sgd) {
    sgd_step(params, grads, config_.learning_rate);
  } else {
    adam_step(adam_, config_, params, grads);
  }
  ++steps_;
}

}  // namespace odlae
