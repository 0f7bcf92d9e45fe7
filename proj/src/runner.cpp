#include "odlae/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <thread>

#include "odlae/checkpoint.hpp"
#include "odlae/errors.hpp"

namespace odlae {

namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

json stream_json(const StreamSpec& s) {
  json j;
  if (s.source == StreamSpec::Source::csv) {
    j["source"] = "csv";
    j["path"] = s.csv.path;
    j["header"] = s.csv.header;
    j["delimiter"] = std::string(1, s.csv.delimiter);
    j["label_column"] = s.csv.label_column;
    j["scaling"] = to_string(s.csv.scaling);
  } else {
    const auto& g = s.gaussian;
    j["source"] = "synthetic";
    j["classes"] = g.classes;
    j["dim"] = g.dim;
    j["n"] = g.n;
    j["sigma"] = g.sigma;
    j["separation"] = g.separation;
    j["seed"] = g.seed;
  }
  if (s.drift) {
    const auto& d = *s.drift;
    j["drift"] = {{"kind", to_string(d.kind)}, {"at_step", d.at_step}, {"seed", d.seed},
                  {"permutation", d.permutation}};
    if (d.angle) j["drift"]["angle"] = *d.angle;
  } else {
    j["drift"] = nullptr;
  }
  j["eval_noise"] = s.eval_noise.to_string();
  j["noise_seed"] = s.noise_seed;
  return j;
}

void write_window_csv(const std::string& path, const MetricsReport& r) {
  auto out = open_output(path);
  out << "window_end_t,accuracy\n";
  for (const auto& w : r.windows) out << w.end_t << ',' << num(w.accuracy) << '\n';
}

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) : out_(open_output(path)) {}

  void write(const StepObservation& obs) {
    const StepRecord& r = *obs.record;
    if (!header_) {
      out_ << "t,label,predicted,recon_loss,pred_loss,total_loss,a_re,a_pre";
      for (std::size_t l = 0; l < r.layer_weights.dim(); ++l) out_ << ",w" << l;
      for (std::size_t l = 0; l < r.layer_losses.size(); ++l) out_ << ",layer_loss" << l;
      out_ << '\n';
      header_ = true;
    }
    out_ << obs.t << ',' << obs.label << ',' << obs.predicted << ',' << num(r.recon_loss) << ','
         << num(r.pred_loss) << ',' << num(r.total_loss) << ',' << num(r.a_re) << ','
         << num(r.a_pre);
    for (double w : r.layer_weights) out_ << ',' << num(w);
    for (double l : r.layer_losses) out_ << ',' << num(l);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
  bool header_ = false;
};

json final_state(const OnlineModel& m) {
  json j;
  j["steps"] = m.steps();
  if (const auto* ae = dynamic_cast<const AutoencoderModel*>(&m)) {
    j["a_re"] = ae->tradeoff().a_re;
    j["a_pre"] = ae->tradeoff().a_pre;
  }
  if (const auto* h = dynamic_cast<const HedgeModel*>(&m)) j["hedge_beta"] = h->hedge().beta.values();
  return j;
}

void resolve_dims(ModelConfig& mc, const ExampleStream& stream) {
  auto fill = [](std::size_t& field, std::size_t value, const char* what) {
    if (field != 0 && field != value) {
      throw ConfigError(std::string(what) + " is " + std::to_string(field) + " but the stream has " +
                        std::to_string(value));
    }
    field = value;
  };
  fill(mc.dims.input_dim, stream.num_features(), "input dimension");
  fill(mc.dims.output_dim, stream.num_classes(), "class count");
}

}  // namespace

json config_json(const ModelConfig& m, const RunConfig& run) {
  json j;
  j["variant"] = to_string(m.variant);
  j["input_dim"] = m.dims.input_dim;
  j["output_dim"] = m.dims.output_dim;
  j["layers"] = m.dims.hidden_layers();
  j["hidden_units"] = m.dims.hidden_dim;
  j["attention_dim"] = m.dims.attention_dim;
  j["output_activation"] = to_string(m.output_activation);
  j["optimizer"] = {{"kind", to_string(m.optimizer.kind)},
                    {"learning_rate", m.optimizer.learning_rate},
                    {"beta1", m.optimizer.beta1},
                    {"beta2", m.optimizer.beta2},
                    {"epsilon", m.optimizer.epsilon}};
  j["theta0"] = m.theta0;
  j["beta_floor"] = m.beta_floor;
  j["tradeoff"] = {{"a_re", m.tradeoff.a_re},
                   {"a_pre", m.tradeoff.a_pre},
                   {"beta_re", m.tradeoff.beta_re},
                   {"beta_pre", m.tradeoff.beta_pre},
                   {"adaptive", m.adaptive_tradeoff}};
  j["corruption"] = m.corruption.to_string();
  j["seed"] = m.seed;
  j["stream"] = stream_json(run.stream);
  j["window"] = run.window;
  j["max_steps"] = run.max_steps;
  return j;
}

RunOutcome run_experiment(const RunConfig& config, std::shared_ptr<const CsvTable> table,
                          const std::function<void(const StepObservation&)>& on_step) {
  if (config.window == 0) throw ConfigError("window must be positive");
  auto stream = make_stream(config.stream, std::move(table));

  RunOutcome outcome;
  std::unique_ptr<Evaluator> evaluator;
  if (!config.resume.empty()) {
    Checkpoint cp = load_checkpoint(config.resume);
    if (!cp.evaluator) throw FormatError("checkpoint " + config.resume + " has no evaluator section");
    ModelConfig mc = cp.model.config;
    resolve_dims(mc, *stream);
    outcome.model = restore_model(cp.model);
    if (cp.evaluator->confusion.classes() != outcome.model->num_classes()) {
      throw FormatError("checkpoint evaluator class count does not match the model");
    }
    evaluator = std::make_unique<Evaluator>(std::move(*cp.evaluator));
    stream->skip(evaluator->seen());
  } else {
    ModelConfig mc = config.model;
    resolve_dims(mc, *stream);
    outcome.model = make_model(mc);
    evaluator = std::make_unique<Evaluator>(mc.dims.output_dim, config.window);
  }

  std::unique_ptr<TraceWriter> trace;
  if (!config.trace_csv.empty()) trace = std::make_unique<TraceWriter>(config.trace_csv);
  PrequentialOptions opts;
  opts.window = evaluator->state().window;
  opts.max_steps = config.max_steps;
  auto result = prequential_run(*stream, *outcome.model, *evaluator, opts,
                                [&](const StepObservation& obs) {
                                  if (trace) trace->write(obs);
                                  if (on_step) on_step(obs);
                                });
  outcome.report = result.report;

  RunConfig effective = config;
  effective.window = opts.window;
  json s;
  s["format"] = "odlae-summary/1";
  s["config"] = config_json(outcome.model->config(), effective);
  s["stream"] = {{"num_features", stream->num_features()}, {"num_classes", stream->num_classes()}};
  if (const auto* csv = dynamic_cast<const CsvStream*>(stream.get())) {
    s["stream"]["label_names"] = csv->table().label_names;
  }
  s["metrics"] = to_json(outcome.report);
  s["final_state"] = final_state(*outcome.model);
  outcome.summary = std::move(s);

  if (!config.summary_path.empty()) open_output(config.summary_path) << outcome.summary.dump(2) << '\n';
  if (!config.window_csv.empty()) write_window_csv(config.window_csv, outcome.report);
  if (!config.save_checkpoint.empty()) {
    save_checkpoint(config.save_checkpoint, outcome.model->snapshot(), &evaluator->state());
  }
  return outcome;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t index) {
  if (index == 0) return seed;
  return Rng(seed).derive(static_cast<std::uint64_t>(index)).next_u64();
}

SweepResult run_sweep(const SweepConfig& config) {
  if (config.layers.empty() || config.hidden.empty()) throw ConfigError("sweep grid is empty");
  std::shared_ptr<const CsvTable> table;
  if (config.base.stream.source == StreamSpec::Source::csv) table = load_csv_table(config.base.stream.csv);

  std::vector<SweepCell> done;
  auto run_cells = [&](const std::vector<std::pair<std::size_t, std::size_t>>& grid) {
    std::vector<SweepCell> cells;
    for (const auto& [layers, hidden] : grid) {
      const bool seen = std::any_of(done.begin(), done.end(), [&](const SweepCell& c) {
        return c.layers == layers && c.hidden == hidden;
      });
      if (seen) continue;
      SweepCell c;
      c.index = done.size() + cells.size();
      c.layers = layers;
      c.hidden = hidden;
      c.seed = cell_seed(config.base.model.seed, c.index);
      cells.push_back(c);
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        SweepCell& c = cells[i];
        RunConfig rc = config.base;
        rc.summary_path.clear();
        rc.window_csv.clear();
        rc.trace_csv.clear();
        rc.save_checkpoint.clear();
        rc.resume.clear();
        rc.model.seed = c.seed;
        rc.model.dims.hidden_dim = c.hidden;
        rc.model.dims.last_hidden = c.layers == 0 ? 0 : c.layers - 1;
        const auto start = std::chrono::steady_clock::now();
        try {
          if (c.layers == 0) throw ConfigError("layer count must be at least 1");
          c.report = run_experiment(rc, table).report;
          c.ok = true;
        } catch (const std::exception& e) {
          c.error = e.what();
        }
        c.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, cells.size()));
    std::vector<std::thread> threads;
    for (std::size_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    done.insert(done.end(), cells.begin(), cells.end());
  };
  auto best_of = [&](const std::vector<SweepCell>& cells) {
    std::ptrdiff_t best = -1;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].ok && (best < 0 || cells[i].report.accuracy > cells[best].report.accuracy)) {
        best = static_cast<std::ptrdiff_t>(i);
      }
    }
    return best;
  };

  std::vector<std::pair<std::size_t, std::size_t>> grid;
  if (config.two_phase) {
    for (auto l : config.layers) grid.emplace_back(l, config.hidden.front());
    run_cells(grid);
    const auto b = best_of(done);
    if (b >= 0) {
      grid.clear();
      for (auto h : config.hidden) grid.emplace_back(done[b].layers, h);
      run_cells(grid);
    }
  } else {
    for (auto l : config.layers)
      for (auto h : config.hidden) grid.emplace_back(l, h);
    run_cells(grid);
  }

  SweepResult result;
  result.cells = std::move(done);
  std::sort(result.cells.begin(), result.cells.end(), [](const SweepCell& a, const SweepCell& b) {
    return std::pair(a.layers, a.hidden) < std::pair(b.layers, b.hidden);
  });
  // Ties keep the smaller (layers, hidden) cell.
  result.best = best_of(result.cells);

  json s;
  s["format"] = "odlae-sweep/1";
  s["config"] = config_json(config.base.model, config.base);
  s["two_phase"] = config.two_phase;
  auto& cells = s["cells"] = json::array();
  for (const auto& c : result.cells) {
    json jc = {{"layers", c.layers}, {"hidden_units", c.hidden}, {"cell_index", c.index},
               {"seed", c.seed}, {"ok", c.ok}};
    if (c.ok) {
      jc["metrics"] = to_json(c.report);
    } else {
      jc["error"] = c.error;
    }
    cells.push_back(std::move(jc));
  }
  if (result.best >= 0) {
    const auto& b = result.cells[result.best];
    s["best"] = {{"layers", b.layers}, {"hidden_units", b.hidden}, {"accuracy", b.report.accuracy}};
  } else {
    s["best"] = nullptr;
  }
  result.summary = std::move(s);

  if (!config.grid_csv.empty()) {
    auto out = open_output(config.grid_csv);
    out << "layers,hidden_units,accuracy,macro_f1,hamming_loss,wall_time_s,status\n";
    for (const auto& c : result.cells) {
      out << c.layers << ',' << c.hidden << ',';
      if (c.ok) {
        out << num(c.report.accuracy) << ',' << num(c.report.macro_f1) << ','
            << num(c.report.hamming_loss);
      } else {
        out << ",,";
      }
      std::string status = c.ok ? "ok" : "error: " + c.error;
      std::replace(status.begin(), status.end(), ',', ';');
      std::replace(status.begin(), status.end(), '\n', ' ');
      out << ',' << num(c.wall_seconds) << ',' << status << '\n';
    }
  }
  if (!config.base.summary_path.empty()) open_output(config.base.summary_path) << result.summary.dump(2) << '\n';
  return result;
}

}  // namespace odlae
