#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "odlae/evaluate.hpp"
#include "odlae/model.hpp"
#include "odlae/stream_data.hpp"

namespace odlae {

// Fully resolved experiment. Model input/output dims of 0 are taken from
// the stream.
struct RunConfig {
  ModelConfig model;
  StreamSpec stream;
  std::uint64_t window = 1000;
  std::uint64_t max_steps = 0;  // 0 = whole stream

  std::string summary_path;  // empty = caller prints the summary
  std::string window_csv;
  std::string trace_csv;
  std::string save_checkpoint;
  std::string resume;
};

// Everything that determines results; output paths are left out so reruns
// into different files compare equal.
nlohmann::ordered_json config_json(const ModelConfig& model, const RunConfig& run);

struct RunOutcome {
  MetricsReport report;
  nlohmann::ordered_json summary;
  std::unique_ptr<OnlineModel> model;
};

// Builds stream and model (or restores them from `resume`), runs the
// prequential loop and writes every requested output.
RunOutcome run_experiment(const RunConfig& config,
                          std::shared_ptr<const CsvTable> table = nullptr,
                          const std::function<void(const StepObservation&)>& on_step = {});

struct SweepConfig {
  RunConfig base;
  std::vector<std::size_t> layers;  // number of hidden layers (L + 1)
  std::vector<std::size_t> hidden;  // hidden units D'
  // Phase 1 sweeps layers at hidden[0]; phase 2 sweeps hidden at the best
  // layer count.
  bool two_phase = false;
  std::size_t jobs = 1;
  std::string grid_csv;
};

struct SweepCell {
  std::size_t index = 0;  // execution order, feeds the seed
  std::size_t layers = 0;
  std::size_t hidden = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsReport report;
  double wall_seconds = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // sorted by (layers, hidden)
  std::ptrdiff_t best = -1;      // index into cells, -1 when every cell failed
  nlohmann::ordered_json summary;
};

// Cell 0 keeps the base seed, so a one-cell sweep reproduces run_experiment.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t index);

SweepResult run_sweep(const SweepConfig& config);

}  // namespace odlae
