#include "odlae/model.hpp"

#include <cmath>
#include <string>
#include <tuple>

#include "odlae/errors.hpp"

namespace odlae {

namespace {

Matrix as_column(const Vector& v) { return Matrix(v.dim(), 1, v.values()); }

std::vector<double> flat(const Matrix& m) { return {m.span().begin(), m.span().end()}; }
std::vector<double> flat(const Vector& v) { return v.values(); }

void restore_into(Matrix& dst, const Matrix& src, const std::string& name) {
  if (src.rows() != dst.rows() || src.cols() != dst.cols()) {
    throw FormatError("snapshot tensor '" + name + "' is " + std::to_string(src.rows()) + "x" +
                      std::to_string(src.cols()) + ", expected " + std::to_string(dst.rows()) +
                      "x" + std::to_string(dst.cols()));
  }
  dst = src;
}

void restore_into(Vector& dst, const Matrix& src, const std::string& name) {
  if (src.rows() != dst.dim() || src.cols() != 1) {
    throw FormatError("snapshot tensor '" + name + "' has the wrong shape");
  }
  dst = Vector(src.span());
}

const Matrix& tensor_at(const ModelSnapshot& s, std::size_t i) {
  if (i >= s.tensors.size()) throw FormatError("snapshot is missing parameter tensors");
  return s.tensors[i];
}

}  // namespace

// ---------------------------------------------------------------- variants

const char* to_string(Variant v) {
  switch (v) {
    case Variant::odlae1: return "odlae1";
    case Variant::odlae2: return "odlae2";
    case Variant::odldae1: return "odldae1";
    case Variant::odldae2: return "odldae2";
    case Variant::linear_ogd_baseline: return "linear_ogd_baseline";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (auto v : {Variant::odlae1, Variant::odlae2, Variant::odldae1, Variant::odldae2,
                 Variant::linear_ogd_baseline}) {
    if (name == to_string(v)) return v;
  }
  if (name == "linear" || name == "ogd") return Variant::linear_ogd_baseline;
  throw ConfigError("unknown variant '" + name + "'");
}

bool uses_attention(Variant v) { return v == Variant::odlae2 || v == Variant::odldae2; }
bool uses_denoising(Variant v) { return v == Variant::odldae1 || v == Variant::odldae2; }

void ModelConfig::validate() const {
  dims.validate();
  optimizer.validate();
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw ConfigError("theta0 must lie in (0, 1)");
  if (!(beta_floor >= 0.0 && beta_floor <= 1.0)) throw ConfigError("beta floor must lie in [0, 1]");
  tradeoff.validate();
  corruption.validate();
}

// ------------------------------------------------------------- OnlineModel

OnlineModel::OnlineModel(ModelConfig config) : config_(std::move(config)) { config_.validate(); }

void OnlineModel::check_input(std::span<const double> x, std::size_t label) const {
  if (x.size() != config_.dims.input_dim) {
    throw ShapeError("model input has " + std::to_string(x.size()) + " features, expected " +
                     std::to_string(config_.dims.input_dim));
  }
  if (!all_finite(x)) throw InvalidInput("model input contains non-finite values");
  if (label >= config_.dims.output_dim) {
    throw InvalidInput("label " + std::to_string(label) + " outside " +
                       std::to_string(config_.dims.output_dim) + " classes");
  }
}

// -------------------------------------------------------- AutoencoderModel

AutoencoderModel::AutoencoderModel(ModelConfig config)
    : OnlineModel(std::move(config)),
      optimizer_(config_.optimizer),
      corruption_rng_(Rng(config_.seed).derive("corruption")) {
  tradeoff_ = config_.tradeoff;
}

void AutoencoderModel::append_backbone_views(ParamViews& out) {
  for (auto& w : encoder_.weights) out.push_back(w.span());
  for (auto& b : encoder_.biases) out.push_back(b.span());
  for (auto& w : decoder_.weights) out.push_back(w.span());
  for (auto& b : decoder_.biases) out.push_back(b.span());
}

void AutoencoderModel::append_backbone_names(std::vector<std::string>& out) const {
  for (std::size_t l = 0; l < encoder_.weights.size(); ++l) out.push_back("encoder.W" + std::to_string(l));
  for (std::size_t l = 0; l < encoder_.biases.size(); ++l) out.push_back("encoder.b" + std::to_string(l));
  for (std::size_t l = 0; l < decoder_.weights.size(); ++l) out.push_back("decoder.W" + std::to_string(l));
  for (std::size_t l = 0; l < decoder_.biases.size(); ++l) out.push_back("decoder.b" + std::to_string(l));
}

void AutoencoderModel::append_backbone_gradients(const AutoencoderGradients& g,
                                                 std::vector<std::vector<double>>& out) const {
  for (const auto& w : g.encoder.weights) out.push_back(flat(w));
  for (const auto& b : g.encoder.biases) out.push_back(flat(b));
  for (const auto& w : g.decoder.weights) out.push_back(flat(w));
  for (const auto& b : g.decoder.biases) out.push_back(flat(b));
}

void AutoencoderModel::fill_backbone_snapshot(ModelSnapshot& s) const {
  s.config = config_;
  for (const auto& w : encoder_.weights) s.tensors.push_back(w);
  for (const auto& b : encoder_.biases) s.tensors.push_back(as_column(b));
  for (const auto& w : decoder_.weights) s.tensors.push_back(w);
  for (const auto& b : decoder_.biases) s.tensors.push_back(as_column(b));
  s.tradeoff = tradeoff_;
  s.steps = steps_;
  s.optimizer_steps = optimizer_.steps();
  s.adam = optimizer_.adam_state();
  s.corruption_rng = corruption_rng_;
}

std::size_t AutoencoderModel::restore_backbone(const ModelSnapshot& s) {
  std::size_t i = 0;
  for (auto& w : encoder_.weights) restore_into(w, tensor_at(s, i++), "encoder weight");
  for (auto& b : encoder_.biases) restore_into(b, tensor_at(s, i++), "encoder bias");
  for (auto& w : decoder_.weights) restore_into(w, tensor_at(s, i++), "decoder weight");
  for (auto& b : decoder_.biases) restore_into(b, tensor_at(s, i++), "decoder bias");
  tradeoff_ = s.tradeoff;
  steps_ = s.steps;
  optimizer_.restore(s.adam);
  optimizer_.set_steps(s.optimizer_steps);
  corruption_rng_ = s.corruption_rng;
  return i;
}

Vector AutoencoderModel::encoder_input(std::span<const double> x) {
  if (!uses_denoising(config_.variant) || !config_.corruption.active()) return Vector(x);
  return corrupt(x, config_.corruption, corruption_rng_);
}

void AutoencoderModel::apply_gradients(const std::vector<std::vector<double>>& grads) {
  GradViews views(grads.begin(), grads.end());
  optimizer_.step(parameters(), views);
}

// -------------------------------------------------------------- HedgeModel

struct HedgeModel::Pass {
  ForwardTrace trace;
  Vector target;
  std::vector<Vector> layer_outputs;
  std::vector<double> layer_losses;
  HedgeState hedge;  // weights that formed `ensemble`
  Vector ensemble;
  double recon_loss = 0.0;
  double pred_loss = 0.0;
};

HedgeModel::HedgeModel(ModelConfig config) : AutoencoderModel(std::move(config)) {
  if (uses_attention(config_.variant) || config_.variant == Variant::linear_ogd_baseline) {
    throw ConfigError(std::string("HedgeModel cannot run variant ") + to_string(config_.variant));
  }
  Rng init = Rng(config_.seed).derive("init");
  std::tie(encoder_, decoder_) = init_autoencoder(config_.dims, init);
  classifiers_ = init_classifiers(config_.dims, init);
  hedge_ = HedgeState::uniform(config_.dims.hidden_layers(), config_.theta0, config_.beta_floor);
}

HedgeModel::HedgeModel(const ModelSnapshot& s) : HedgeModel(s.config) {
  std::size_t i = restore_backbone(s);
  for (auto& c : classifiers_) restore_into(c.weights, tensor_at(s, i++), "classifier weight");
  for (auto& c : classifiers_) restore_into(c.bias, tensor_at(s, i++), "classifier bias");
  if (s.hedge_beta.dim() != hedge_.beta.dim()) throw FormatError("snapshot hedge weights have the wrong size");
  hedge_.beta = s.hedge_beta;
}

HedgeModel::Pass HedgeModel::run_forward(std::span<const double> encoder_input,
                                         std::span<const double> target,
                                         std::size_t label) const {
  Pass p;
  p.trace = forward(encoder_input, encoder_, decoder_, activations());
  p.target = Vector(target);
  p.recon_loss = reconstruction_loss(target, p.trace.reconstruction.span());
  p.layer_outputs.reserve(classifiers_.size());
  for (std::size_t l = 0; l < classifiers_.size(); ++l) {
    p.layer_outputs.push_back(layer_classify(p.trace.hidden[l].span(), classifiers_[l]));
    p.layer_losses.push_back(cross_entropy(label, p.layer_outputs.back().span()));
  }
  p.hedge = hedge_;
  p.ensemble = ensemble_predict(p.layer_outputs, hedge_);
  p.pred_loss = cross_entropy(label, p.ensemble.span());
  return p;
}

LossGradient HedgeModel::gradients(const Pass& pass, std::size_t label,
                                   const TradeoffState& tradeoff) const {
  LossGradient out;
  out.recon_loss = pass.recon_loss;
  out.pred_loss = pass.pred_loss;
  out.total = total_loss(pass.recon_loss, pass.pred_loss, tradeoff);
  const auto cg = hedge_backward(pass.trace.hidden, classifiers_, pass.layer_outputs,
                                 pass.ensemble, pass.hedge, label, tradeoff.a_pre);
  const auto ag = backward(pass.trace, encoder_, decoder_, activations(), cg.hidden,
                           tradeoff.a_re, pass.target.span());
  append_backbone_gradients(ag, out.gradients);
  for (const auto& c : cg.classifiers) out.gradients.push_back(flat(c.weights));
  for (const auto& c : cg.classifiers) out.gradients.push_back(flat(c.bias));
  return out;
}

Vector HedgeModel::predict(std::span<const double> x) const {
  if (x.size() != config_.dims.input_dim) throw ShapeError("predict: wrong input dimension");
  const auto hidden = encode(x, encoder_, Activation::relu);
  std::vector<Vector> outputs;
  outputs.reserve(hidden.size());
  for (std::size_t l = 0; l < hidden.size(); ++l)
    outputs.push_back(layer_classify(hidden[l].span(), classifiers_[l]));
  return ensemble_predict(outputs, hedge_);
}

StepRecord HedgeModel::update(std::span<const double> x, std::size_t label) {
  check_input(x, label);
  const Vector input = encoder_input(x);
  const Pass pass = run_forward(input.span(), x, label);

  hedge_ = hedge_update(hedge_, pass.layer_losses);
  if (config_.adaptive_tradeoff) tradeoff_ = update_tradeoffs(tradeoff_, pass.recon_loss, pass.pred_loss);

  const LossGradient lg = gradients(pass, label, tradeoff_);
  apply_gradients(lg.gradients);

  StepRecord r;
  r.t = steps_++;
  r.label = label;
  r.prediction = pass.ensemble;
  r.predicted = argmax(pass.ensemble.span());
  r.recon_loss = pass.recon_loss;
  r.pred_loss = pass.pred_loss;
  r.total_loss = lg.total;
  r.layer_losses = pass.layer_losses;
  r.layer_weights = hedge_.beta;
  r.a_re = tradeoff_.a_re;
  r.a_pre = tradeoff_.a_pre;
  return r;
}

ParamViews HedgeModel::parameters() {
  ParamViews out;
  append_backbone_views(out);
  for (auto& c : classifiers_) out.push_back(c.weights.span());
  for (auto& c : classifiers_) out.push_back(c.bias.span());
  return out;
}

std::vector<std::string> HedgeModel::parameter_names() const {
  std::vector<std::string> out;
  append_backbone_names(out);
  for (std::size_t l = 0; l < classifiers_.size(); ++l) out.push_back("classifier.W" + std::to_string(l));
  for (std::size_t l = 0; l < classifiers_.size(); ++l) out.push_back("classifier.b" + std::to_string(l));
  return out;
}

LossGradient HedgeModel::loss_gradient(std::span<const double> encoder_input,
                                       std::span<const double> target, std::size_t label) const {
  check_input(target, label);
  return gradients(run_forward(encoder_input, target, label), label, tradeoff_);
}

ModelSnapshot HedgeModel::snapshot() const {
  ModelSnapshot s;
  fill_backbone_snapshot(s);
  for (const auto& c : classifiers_) s.tensors.push_back(c.weights);
  for (const auto& c : classifiers_) s.tensors.push_back(as_column(c.bias));
  s.hedge_beta = hedge_.beta;
  return s;
}

// ---------------------------------------------------------- AttentionModel

struct AttentionModel::Pass {
  ForwardTrace trace;
  Vector target;
  AttentionForward att;
  double recon_loss = 0.0;
  double pred_loss = 0.0;
};

AttentionModel::AttentionModel(ModelConfig config) : AutoencoderModel(std::move(config)) {
  if (!uses_attention(config_.variant)) {
    throw ConfigError(std::string("AttentionModel cannot run variant ") + to_string(config_.variant));
  }
  Rng init = Rng(config_.seed).derive("init");
  std::tie(encoder_, decoder_) = init_autoencoder(config_.dims, init);
  attention_ = init_attention(config_.dims, init);
  head_ = init_output_head(config_.dims, init);
}

AttentionModel::AttentionModel(const ModelSnapshot& s) : AttentionModel(s.config) {
  std::size_t i = restore_backbone(s);
  restore_into(attention_.projection, tensor_at(s, i++), "attention projection");
  restore_into(attention_.score, tensor_at(s, i++), "attention score");
  restore_into(head_.weights, tensor_at(s, i++), "head weight");
  restore_into(head_.bias, tensor_at(s, i++), "head bias");
}

AttentionModel::Pass AttentionModel::run_forward(std::span<const double> encoder_input,
                                                 std::span<const double> target) const {
  Pass p;
  p.trace = forward(encoder_input, encoder_, decoder_, activations());
  p.target = Vector(target);
  p.recon_loss = reconstruction_loss(target, p.trace.reconstruction.span());
  p.att = attention_forward(p.trace.hidden, attention_, head_);
  return p;
}

LossGradient AttentionModel::gradients(const Pass& pass, std::size_t label,
                                       const TradeoffState& tradeoff) const {
  LossGradient out;
  out.recon_loss = pass.recon_loss;
  out.pred_loss = pass.pred_loss;
  out.total = total_loss(pass.recon_loss, pass.pred_loss, tradeoff);
  auto fg = attention_backward(pass.att, attention_, head_, label, tradeoff.a_pre);
  if (attention_frozen_) {
    fg.attention.projection.fill(0.0);
    fg.attention.score.fill(0.0);
  }
  const auto ag = backward(pass.trace, encoder_, decoder_, activations(), fg.hidden,
                           tradeoff.a_re, pass.target.span());
  append_backbone_gradients(ag, out.gradients);
  out.gradients.push_back(flat(fg.attention.projection));
  out.gradients.push_back(flat(fg.attention.score));
  out.gradients.push_back(flat(fg.head.weights));
  out.gradients.push_back(flat(fg.head.bias));
  return out;
}

Vector AttentionModel::predict(std::span<const double> x) const {
  if (x.size() != config_.dims.input_dim) throw ShapeError("predict: wrong input dimension");
  return attention_forward(encode(x, encoder_, Activation::relu), attention_, head_).prediction;
}

StepRecord AttentionModel::update(std::span<const double> x, std::size_t label) {
  check_input(x, label);
  const Vector input = encoder_input(x);
  Pass pass = run_forward(input.span(), x);
  pass.pred_loss = cross_entropy(label, pass.att.prediction.span());

  if (config_.adaptive_tradeoff) tradeoff_ = update_tradeoffs(tradeoff_, pass.recon_loss, pass.pred_loss);
  const LossGradient lg = gradients(pass, label, tradeoff_);
  apply_gradients(lg.gradients);

  StepRecord r;
  r.t = steps_++;
  r.label = label;
  r.prediction = pass.att.prediction;
  r.predicted = argmax(pass.att.prediction.span());
  r.recon_loss = pass.recon_loss;
  r.pred_loss = pass.pred_loss;
  r.total_loss = lg.total;
  r.layer_weights = pass.att.weights;
  r.a_re = tradeoff_.a_re;
  r.a_pre = tradeoff_.a_pre;
  return r;
}

ParamViews AttentionModel::parameters() {
  ParamViews out;
  append_backbone_views(out);
  out.push_back(attention_.projection.span());
  out.push_back(attention_.score.span());
  out.push_back(head_.weights.span());
  out.push_back(head_.bias.span());
  return out;
}

std::vector<std::string> AttentionModel::parameter_names() const {
  std::vector<std::string> out;
  append_backbone_names(out);
  out.insert(out.end(), {"attention.projection", "attention.score", "head.W", "head.b"});
  return out;
}

LossGradient AttentionModel::loss_gradient(std::span<const double> encoder_input,
                                           std::span<const double> target,
                                           std::size_t label) const {
  check_input(target, label);
  Pass pass = run_forward(encoder_input, target);
  pass.pred_loss = cross_entropy(label, pass.att.prediction.span());
  return gradients(pass, label, tradeoff_);
}

ModelSnapshot AttentionModel::snapshot() const {
  ModelSnapshot s;
  fill_backbone_snapshot(s);
  s.tensors.push_back(attention_.projection);
  s.tensors.push_back(as_column(attention_.score));
  s.tensors.push_back(head_.weights);
  s.tensors.push_back(as_column(head_.bias));
  return s;
}

// ---------------------------------------------------------- LinearOgdModel

LinearOgdModel::LinearOgdModel(ModelConfig config)
    : OnlineModel(std::move(config)),
      weights_(config_.dims.output_dim, config_.dims.input_dim),
      bias_(config_.dims.output_dim) {
  if (config_.variant != Variant::linear_ogd_baseline) {
    throw ConfigError(std::string("LinearOgdModel cannot run variant ") + to_string(config_.variant));
  }
}

LinearOgdModel::LinearOgdModel(const ModelSnapshot& s) : LinearOgdModel(s.config) {
  restore_into(weights_, tensor_at(s, 0), "linear weight");
  restore_into(bias_, tensor_at(s, 1), "linear bias");
  steps_ = s.steps;
}

Vector LinearOgdModel::predict(std::span<const double> x) const {
  Vector logits = matvec(weights_, x);
  axpy(1.0, bias_.span(), logits.span());
  return softmax(logits.span());
}

LossGradient LinearOgdModel::loss_gradient(std::span<const double> encoder_input,
                                           std::span<const double> target,
                                           std::size_t label) const {
  check_input(target, label);
  const Vector p = predict(encoder_input);
  LossGradient out;
  out.pred_loss = cross_entropy(label, p.span());
  out.total = out.pred_loss;
  Vector dz(p.dim());
  if (p[label] > kLogClamp) {
    for (std::size_t k = 0; k < p.dim(); ++k) dz[k] = p[k] - (k == label ? 1.0 : 0.0);
  }
  out.gradients.push_back(flat(outer(dz.span(), encoder_input)));
  out.gradients.push_back(flat(dz));
  return out;
}

StepRecord LinearOgdModel::update(std::span<const double> x, std::size_t label) {
  check_input(x, label);
  const Vector p = predict(x);
  const LossGradient lg = loss_gradient(x, x, label);
  GradViews views(lg.gradients.begin(), lg.gradients.end());
  sgd_step(parameters(), views, config_.optimizer.learning_rate);

  StepRecord r;
  r.t = steps_++;
  r.label = label;
  r.prediction = p;
  r.predicted = argmax(p.span());
  r.pred_loss = lg.pred_loss;
  r.total_loss = lg.total;
  r.a_pre = 1.0;
  return r;
}

ParamViews LinearOgdModel::parameters() { return {weights_.span(), bias_.span()}; }

std::vector<std::string> LinearOgdModel::parameter_names() const { return {"linear.W", "linear.b"}; }

ModelSnapshot LinearOgdModel::snapshot() const {
  ModelSnapshot s;
  s.config = config_;
  s.tensors = {weights_, as_column(bias_)};
  s.tradeoff = config_.tradeoff;
  s.steps = steps_;
  s.optimizer_steps = steps_;
  return s;
}

// ---------------------------------------------------------------- factory

std::unique_ptr<OnlineModel> make_model(const ModelConfig& config) {
  switch (config.variant) {
    case Variant::odlae1:
    case Variant::odldae1:
      return std::make_unique<HedgeModel>(config);
    case Variant::odlae2:
    case Variant::odldae2:
      return std::make_unique<AttentionModel>(config);
    case Variant::linear_ogd_baseline:
      return std::make_unique<LinearOgdModel>(config);
  }
  throw ConfigError("unknown variant");
}

std::unique_ptr<OnlineModel> restore_model(const ModelSnapshot& snapshot) {
  switch (snapshot.config.variant) {
    case Variant::odlae1:
    case Variant::odldae1:
      return std::make_unique<HedgeModel>(snapshot);
    case Variant::odlae2:
    case Variant::odldae2:
      return std::make_unique<AttentionModel>(snapshot);
    case Variant::linear_ogd_baseline:
      return std::make_unique<LinearOgdModel>(snapshot);
  }
  throw FormatError("unknown variant in snapshot");
}

}  // namespace odlae
