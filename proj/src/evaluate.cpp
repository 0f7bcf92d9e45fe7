#include "odlae/evaluate.hpp"

#include "odlae/errors.hpp"

namespace odlae {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts)
    : classes_(classes), counts_(std::move(counts)) {
  if (counts_.size() != classes_ * classes_) {
    throw ShapeError("confusion matrix needs " + std::to_string(classes_ * classes_) + " counts");
  }
  for (auto c : counts_) total_ += c;
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
  if (truth >= classes_ || predicted >= classes_) {
    throw InvalidInput("confusion matrix index outside " + std::to_string(classes_) + " classes");
  }
  ++counts_[truth * classes_ + predicted];
  ++total_;
}

std::uint64_t ConfusionMatrix::at(std::size_t truth, std::size_t predicted) const {
  if (truth >= classes_ || predicted >= classes_) throw InvalidInput("confusion matrix index out of range");
  return counts_[truth * classes_ + predicted];
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t k = 0; k < classes_; ++k) t += counts_[k * classes_ + k];
  return t;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidInput("metrics of an empty confusion matrix");
  const std::size_t k = cm.classes();
  std::vector<std::uint64_t> row(k, 0), col(k, 0);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t p = 0; p < k; ++p) {
      row[t] += cm.at(t, p);
      col[p] += cm.at(t, p);
    }
  }
  MetricsReport r;
  r.n = cm.total();
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
  r.hamming_loss = 1.0 - r.accuracy;
  double sp = 0.0, sr = 0.0, sf = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto tp = static_cast<double>(cm.at(c, c));
    const double precision = col[c] ? tp / static_cast<double>(col[c]) : 0.0;
    const double recall = row[c] ? tp / static_cast<double>(row[c]) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    sp += precision;
    sr += recall;
    sf += f1;
  }
  r.macro_precision = sp / static_cast<double>(k);
  r.macro_recall = sr / static_cast<double>(k);
  r.macro_f1 = sf / static_cast<double>(k);
  return r;
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f1"] = r.macro_f1;
  j["hamming_loss"] = r.hamming_loss;
  j["window"] = r.window;
  auto& w = j["windows"] = nlohmann::ordered_json::array();
  for (const auto& x : r.windows) w.push_back({{"window_end_t", x.end_t}, {"accuracy", x.accuracy}});
  return j;
}

Evaluator::Evaluator(std::size_t classes, std::uint64_t window) {
  state_.confusion = ConfusionMatrix(classes);
  state_.window = window;
}

void Evaluator::observe(std::size_t truth, std::size_t predicted) {
  state_.confusion.add(truth, predicted);
  if (truth == predicted) ++state_.window_correct;
  if (state_.window > 0 && state_.confusion.total() % state_.window == 0) {
    state_.windows.push_back({state_.confusion.total(), static_cast<double>(state_.window_correct) /
                                                            static_cast<double>(state_.window)});
    state_.window_correct = 0;
  }
}

MetricsReport Evaluator::report() const {
  MetricsReport r;
  if (state_.confusion.total() > 0) r = compute_metrics(state_.confusion);
  r.window = state_.window;
  r.windows = state_.windows;
  return r;
}

PrequentialResult prequential_run(ExampleStream& stream, OnlineLearner& learner,
                                  const PrequentialOptions& options,
                                  const std::function<void(const StepObservation&)>& on_step) {
  Evaluator evaluator(learner.num_classes(), options.window);
  return prequential_run(stream, learner, evaluator, options, on_step);
}

PrequentialResult prequential_run(ExampleStream& stream, OnlineLearner& learner,
                                  Evaluator& evaluator, const PrequentialOptions& options,
                                  const std::function<void(const StepObservation&)>& on_step) {
  PrequentialResult result;
  const std::size_t classes = learner.num_classes();
  while (options.max_steps == 0 || evaluator.seen() < options.max_steps) {
    const std::uint64_t t = stream.position();
    auto ex = stream.next();
    if (!ex) break;
    if (ex->y >= classes) {
      throw DataError("example " + std::to_string(t) + ": label " + std::to_string(ex->y) +
                          " outside [0, " + std::to_string(classes) + ")",
                      t);
    }
    const Vector p = learner.predict(ex->x.span());
    const std::size_t predicted = argmax(p.span());
    evaluator.observe(ex->y, predicted);
    StepRecord rec = learner.update(ex->x.span(), ex->y);
    if (on_step) on_step({t, ex->y, predicted, &rec});
    if (options.keep_records) result.records.push_back(std::move(rec));
  }
  result.report = evaluator.report();
  return result;
}

}  // namespace odlae
