#include "odlae/cli.hpp"

#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "odlae/checkpoint.hpp"
#include "odlae/errors.hpp"
#include "odlae/runner.hpp"

namespace odlae {

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Flag values before resolution; strings are parsed after CLI11 is done so
// bad values surface as ConfigError.
struct RawOptions {
  std::string variant = "odlae1";
  std::string dataset = "synthetic";
  std::string label_col = "0";
  bool header = false;
  std::string delimiter = ",";
  std::string scaling = "minmax";

  std::size_t layers = 3;
  std::size_t hidden_units = 64;
  std::size_t attention_dim = 30;
  double theta0 = 0.99;
  double beta_floor = 0.01;
  double beta_re = 0.99;
  double beta_pre = 0.99;
  double a_re = 0.5;
  bool fixed_tradeoff = false;
  double lr = 0.01;
  std::string optimizer = "adam";
  std::string output_activation = "sigmoid";
  std::string corruption = "auto";
  std::string noise = "none";
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;

  std::size_t classes = 2;
  std::size_t dim = 2;
  std::size_t n = 5000;
  double sigma = 0.05;
  double separation = 8.0;

  std::string drift;
  std::uint64_t drift_at = 0;
  std::optional<std::uint64_t> drift_seed;
  std::vector<std::size_t> permutation;
  std::optional<double> angle;

  std::uint64_t window = 1000;
  std::uint64_t max_steps = 0;
  std::string out;
  std::string window_csv;
  std::string trace_csv;
  std::string save_checkpoint;
  std::string resume;
};

void add_run_options(CLI::App* app, RawOptions& o) {
  app->add_option("--variant", o.variant, "odlae1, odlae2, odldae1, odldae2 or linear_ogd_baseline")
      ->capture_default_str();
  app->add_option("--dataset", o.dataset, "'synthetic' or a CSV path")->capture_default_str();
  app->add_option("--label-col", o.label_col, "label column: index (negative counts from the end) or header name")
      ->capture_default_str();
  app->add_flag("--header", o.header, "CSV has a header row");
  app->add_option("--delimiter", o.delimiter, "CSV field delimiter")->capture_default_str();
  app->add_option("--scaling", o.scaling, "minmax (online), prescan or none")->capture_default_str();

  app->add_option("--layers", o.layers, "number of hidden layers (L+1)")->capture_default_str();
  app->add_option("--hidden-units", o.hidden_units, "hidden units per layer")->capture_default_str();
  app->add_option("--attention-dim", o.attention_dim, "attention projection size")->capture_default_str();
  app->add_option("--theta0", o.theta0, "hedge discount")->capture_default_str();
  app->add_option("--beta-floor", o.beta_floor, "hedge smoothing floor")->capture_default_str();
  app->add_option("--beta-re", o.beta_re, "reconstruction trade-off discount")->capture_default_str();
  app->add_option("--beta-pre", o.beta_pre, "prediction trade-off discount")->capture_default_str();
  app->add_option("--a-re", o.a_re, "initial reconstruction weight (a_pre = 1 - a_re)")->capture_default_str();
  app->add_flag("--fixed-tradeoff", o.fixed_tradeoff, "keep (a_re, a_pre) fixed");
  app->add_option("--lr", o.lr, "learning rate")->capture_default_str();
  app->add_option("--optimizer", o.optimizer, "adam or sgd")->capture_default_str();
  app->add_option("--output-activation", o.output_activation, "decoder output activation")
      ->capture_default_str();
  app->add_option("--corruption", o.corruption,
                  "training corruption for the denoising variants: auto, none, mask:<p>, gauss:<s>")
      ->capture_default_str();
  app->add_option("--noise", o.noise, "evaluation-stream noise: none, mask:<p>, gauss:<s>")
      ->capture_default_str();
  app->add_option("--seed", o.seed, "model seed")->capture_default_str();
  app->add_option("--data-seed", o.data_seed, "stream seed (defaults to --seed)");

  app->add_option("--classes", o.classes, "synthetic: classes")->capture_default_str();
  app->add_option("--dim", o.dim, "synthetic: features")->capture_default_str();
  app->add_option("--n", o.n, "synthetic: stream length")->capture_default_str();
  app->add_option("--sigma", o.sigma, "synthetic: standard deviation")->capture_default_str();
  app->add_option("--separation", o.separation, "synthetic: neighbouring means distance in sigmas")
      ->capture_default_str();

  app->add_option("--drift", o.drift, "rotate, permute_features or label_swap");
  app->add_option("--drift-at", o.drift_at, "first drifted example index")->capture_default_str();
  app->add_option("--drift-seed", o.drift_seed, "drift seed (defaults to the stream seed)");
  app->add_option("--permutation", o.permutation, "explicit label or feature permutation")
      ->delimiter(',');
  app->add_option("--angle", o.angle, "rotate: fixed angle in radians");

  app->add_option("--window", o.window, "accuracy window")->capture_default_str();
  app->add_option("--max-steps", o.max_steps, "stop after this many examples (0 = all)")
      ->capture_default_str();
  app->add_option("--out", o.out, "summary JSON path (default: stdout)");
  app->add_option("--window-csv", o.window_csv, "per-window accuracy CSV");
  app->add_option("--trace-csv", o.trace_csv, "per-step diagnostics CSV");
  app->add_option("--save-checkpoint", o.save_checkpoint, "checkpoint written when the run ends");
  app->add_option("--resume", o.resume, "continue from a checkpoint (model flags are ignored)");
}

char parse_delimiter(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw ConfigError("delimiter must be a single character");
  return s[0];
}

RunConfig resolve(const RawOptions& o) {
  RunConfig rc;
  ModelConfig& m = rc.model;
  m.variant = parse_variant(o.variant);
  if (o.layers < 1) throw ConfigError("--layers must be at least 1");
  m.dims.hidden_dim = o.hidden_units;
  m.dims.last_hidden = o.layers - 1;
  m.dims.attention_dim = o.attention_dim;
  m.output_activation = parse_activation(o.output_activation);
  m.optimizer.kind = OptimizerConfig::parse_kind(o.optimizer);
  m.optimizer.learning_rate = o.lr;
  m.theta0 = o.theta0;
  m.beta_floor = o.beta_floor;
  if (!(o.a_re > 0.0 && o.a_re < 1.0)) throw ConfigError("--a-re must lie in (0, 1)");
  m.tradeoff.a_re = o.a_re;
  m.tradeoff.a_pre = 1.0 - o.a_re;
  m.tradeoff.beta_re = o.beta_re;
  m.tradeoff.beta_pre = o.beta_pre;
  m.adaptive_tradeoff = !o.fixed_tradeoff;
  if (o.corruption == "auto") {
    m.corruption = uses_denoising(m.variant) ? CorruptionPolicy::masking(0.1) : CorruptionPolicy::none();
  } else {
    m.corruption = CorruptionPolicy::parse(o.corruption);
  }
  m.seed = o.seed;

  const std::uint64_t data_seed = o.data_seed.value_or(o.seed);
  StreamSpec& s = rc.stream;
  if (o.dataset == "synthetic") {
    s.source = StreamSpec::Source::synthetic;
    s.gaussian.classes = o.classes;
    s.gaussian.dim = o.dim;
    s.gaussian.n = o.n;
    s.gaussian.sigma = o.sigma;
    s.gaussian.separation = o.separation;
    s.gaussian.seed = data_seed;
    s.gaussian.validate();
  } else {
    s.source = StreamSpec::Source::csv;
    s.csv.path = o.dataset;
    s.csv.header = o.header;
    s.csv.delimiter = parse_delimiter(o.delimiter);
    s.csv.label_column = o.label_col;
    s.csv.scaling = parse_scaling(o.scaling);
  }
  if (!o.drift.empty() && o.drift != "none") {
    DriftSpec d;
    d.kind = DriftSpec::parse_kind(o.drift);
    d.at_step = o.drift_at;
    d.seed = o.drift_seed.value_or(data_seed);
    d.permutation = o.permutation;
    d.angle = o.angle;
    s.drift = d;
  }
  s.eval_noise = CorruptionPolicy::parse(o.noise);
  s.noise_seed = data_seed;

  if (o.window == 0) throw ConfigError("--window must be positive");
  rc.window = o.window;
  rc.max_steps = o.max_steps;
  rc.summary_path = o.out;
  rc.window_csv = o.window_csv;
  rc.trace_csv = o.trace_csv;
  rc.save_checkpoint = o.save_checkpoint;
  rc.resume = o.resume;
  // Fails fast on out-of-range hyperparameters; dims are filled in later.
  ModelConfig probe = m;
  probe.dims.input_dim = 1;
  probe.dims.output_dim = 2;
  probe.validate();
  return rc;
}

void inspect(const std::string& path, std::ostream& out) {
  const Checkpoint cp = load_checkpoint(path);
  const ModelSnapshot& s = cp.model;
  nlohmann::ordered_json j;
  j["version"] = kCheckpointVersion;
  j["variant"] = to_string(s.config.variant);
  j["input_dim"] = s.config.dims.input_dim;
  j["output_dim"] = s.config.dims.output_dim;
  j["layers"] = s.config.dims.hidden_layers();
  j["hidden_units"] = s.config.dims.hidden_dim;
  j["seed"] = s.config.seed;
  j["steps"] = s.steps;
  j["optimizer_steps"] = s.optimizer_steps;
  j["tensors"] = s.tensors.size();
  j["a_re"] = s.tradeoff.a_re;
  j["a_pre"] = s.tradeoff.a_pre;
  if (!s.hedge_beta.empty()) j["hedge_beta"] = s.hedge_beta.values();
  if (cp.evaluator) j["examples_seen"] = cp.evaluator->confusion.total();
  out << j.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online deep learning autoencoder experiments", "odlae"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file (flags take precedence)");

  RawOptions run_opts;
  auto* run = app.add_subcommand("run", "prequential run of one configuration");
  add_run_options(run, run_opts);

  RawOptions sweep_opts;
  std::vector<std::size_t> layers_grid{2, 3, 4, 5};
  std::vector<std::size_t> hidden_grid{32};
  bool two_phase = false;
  std::size_t jobs = 1;
  std::string grid_csv;
  auto* sweep = app.add_subcommand("sweep", "grid over (layers, hidden units)");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--layers-grid", layers_grid, "layer counts")->delimiter(',')->capture_default_str();
  sweep->add_option("--hidden-grid", hidden_grid, "hidden unit counts")->delimiter(',')->capture_default_str();
  sweep->add_flag("--two-phase", two_phase, "sweep layers at the first hidden size, then hidden sizes at the best layer count");
  sweep->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  sweep->add_option("--grid-csv", grid_csv, "one CSV row per cell");

  std::string checkpoint_path;
  auto* ckpt = app.add_subcommand("checkpoint", "checkpoint utilities");
  ckpt->require_subcommand(1);
  auto* insp = ckpt->add_subcommand("inspect", "print a checkpoint header as JSON");
  insp->add_option("path", checkpoint_path, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      RunConfig rc = resolve(run_opts);
      const RunOutcome outcome = run_experiment(rc);
      if (rc.summary_path.empty()) out << outcome.summary.dump(2) << '\n';
    } else if (*sweep) {
      SweepConfig sc;
      sc.base = resolve(sweep_opts);
      if (!sc.base.resume.empty() || !sc.base.save_checkpoint.empty()) {
        throw ConfigError("sweep does not support checkpoints");
      }
      sc.layers = layers_grid;
      sc.hidden = hidden_grid;
      sc.two_phase = two_phase;
      sc.jobs = jobs;
      sc.grid_csv = grid_csv;
      const SweepResult result = run_sweep(sc);
      if (sc.base.summary_path.empty()) out << result.summary.dump(2) << '\n';
      for (const auto& c : result.cells) {
        if (!c.ok) err << "odlae: cell layers=" << c.layers << " hidden=" << c.hidden << " failed: " << c.error << '\n';
      }
    } else if (*insp) {
      inspect(checkpoint_path, out);
    }
  } catch (const ConfigError& e) {
    err << "odlae: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "odlae: data error (record " << e.record() << "): " << e.what() << '\n';
    return kExitData;
  } catch (const FormatError& e) {
    err << "odlae: checkpoint error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "odlae: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

}  // namespace odlae
