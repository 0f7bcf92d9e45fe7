#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "odlae/model.hpp"
#include "odlae/stream_data.hpp"

namespace odlae {

// counts[true * K + pred]
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 0);
  ConfusionMatrix(std::size_t classes, std::vector<std::uint64_t> counts);

  std::size_t classes() const noexcept { return classes_; }
  void add(std::size_t truth, std::size_t predicted);
  std::uint64_t at(std::size_t truth, std::size_t predicted) const;
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t trace() const;
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct WindowAccuracy {
  std::uint64_t end_t = 0;  // examples seen when the window closed
  double accuracy = 0.0;

  friend bool operator==(const WindowAccuracy&, const WindowAccuracy&) = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double hamming_loss = 0.0;
  std::uint64_t n = 0;
  std::uint64_t window = 0;
  std::vector<WindowAccuracy> windows;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm);
nlohmann::ordered_json to_json(const MetricsReport& r);

// Running prequential bookkeeping; everything here is checkpointed.
struct EvaluatorState {
  ConfusionMatrix confusion;
  std::uint64_t window = 0;
  std::uint64_t window_correct = 0;
  std::vector<WindowAccuracy> windows;

  friend bool operator==(const EvaluatorState&, const EvaluatorState&) = default;
};

class Evaluator {
 public:
  Evaluator(std::size_t classes, std::uint64_t window);
  explicit Evaluator(EvaluatorState state) : state_(std::move(state)) {}

  void observe(std::size_t truth, std::size_t predicted);
  std::uint64_t seen() const noexcept { return state_.confusion.total(); }
  MetricsReport report() const;
  const EvaluatorState& state() const noexcept { return state_; }

 private:
  EvaluatorState state_;
};

struct StepObservation {
  std::uint64_t t = 0;  // 0-based stream index
  std::size_t label = 0;
  std::size_t predicted = 0;
  const StepRecord* record = nullptr;
};

struct PrequentialOptions {
  std::uint64_t window = 1000;
  std::uint64_t max_steps = 0;  // 0 = until the stream ends
  bool keep_records = false;
};

struct PrequentialResult {
  MetricsReport report;
  std::vector<StepRecord> records;  // filled when keep_records is set
};

// Test-then-train: predict, score, then update, one example at a time.
// Labels outside [0, K) raise DataError carrying the stream index.
PrequentialResult prequential_run(ExampleStream& stream, OnlineLearner& learner,
                                  const PrequentialOptions& options,
                                  const std::function<void(const StepObservation&)>& on_step = {});

// Continues an existing evaluator; `stream` must already sit at
// evaluator.seen().
PrequentialResult prequential_run(ExampleStream& stream, OnlineLearner& learner,
                                  Evaluator& evaluator, const PrequentialOptions& options,
                                  const std::function<void(const StepObservation&)>& on_step = {});

}  // namespace odlae
