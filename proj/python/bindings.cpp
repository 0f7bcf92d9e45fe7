#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "odlae/checkpoint.hpp"
#include "odlae/cli.hpp"
#include "odlae/errors.hpp"
#include "odlae/evaluate.hpp"
#include "odlae/model.hpp"
#include "odlae/stream_data.hpp"

namespace py = pybind11;
using namespace odlae;

namespace {

ModelConfig make_config(const std::string& variant, std::size_t input_dim, std::size_t classes,
                        std::size_t layers, std::size_t hidden_units, std::size_t attention_dim,
                        const std::string& optimizer, double lr, double theta0, double beta_floor,
                        bool adaptive_tradeoff, const std::string& corruption, std::uint64_t seed) {
  ModelConfig c;
  c.variant = parse_variant(variant);
  c.dims.input_dim = input_dim;
  c.dims.output_dim = classes;
  if (layers < 1) throw ConfigError("layers must be at least 1");
  c.dims.last_hidden = layers - 1;
  c.dims.hidden_dim = hidden_units;
  c.dims.attention_dim = attention_dim;
  c.optimizer.kind = OptimizerConfig::parse_kind(optimizer);
  c.optimizer.learning_rate = lr;
  c.theta0 = theta0;
  c.beta_floor = beta_floor;
  c.adaptive_tradeoff = adaptive_tradeoff;
  c.corruption = CorruptionPolicy::parse(corruption);
  c.seed = seed;
  c.validate();
  return c;
}

py::dict step_dict(const StepRecord& r) {
  py::dict d;
  d["t"] = r.t;
  d["label"] = r.label;
  d["predicted"] = r.predicted;
  d["prediction"] = r.prediction.values();
  d["recon_loss"] = r.recon_loss;
  d["pred_loss"] = r.pred_loss;
  d["total_loss"] = r.total_loss;
  d["layer_losses"] = r.layer_losses;
  d["layer_weights"] = r.layer_weights.values();
  d["a_re"] = r.a_re;
  d["a_pre"] = r.a_pre;
  return d;
}

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["accuracy"] = r.accuracy;
  d["macro_precision"] = r.macro_precision;
  d["macro_recall"] = r.macro_recall;
  d["macro_f1"] = r.macro_f1;
  d["hamming_loss"] = r.hamming_loss;
  py::list w;
  for (const auto& x : r.windows) w.append(py::make_tuple(x.end_t, x.accuracy));
  d["windows"] = w;
  return d;
}

class PyModel {
 public:
  explicit PyModel(std::unique_ptr<OnlineModel> m) : model_(std::move(m)) {}

  std::vector<double> predict(const std::vector<double>& x) const {
    if (x.size() != model_->config().dims.input_dim) throw ShapeError("predict: wrong input size");
    return model_->predict(x).values();
  }
  py::dict update(const std::vector<double>& x, std::size_t label) {
    return step_dict(model_->update(x, label));
  }
  std::vector<std::string> parameter_names() const { return model_->parameter_names(); }
  std::vector<std::vector<double>> parameters() {
    std::vector<std::vector<double>> out;
    for (auto v : model_->parameters()) out.emplace_back(v.begin(), v.end());
    return out;
  }
  void save(const std::string& path) const { save_checkpoint(path, model_->snapshot()); }
  std::string variant() const { return to_string(model_->variant()); }
  std::uint64_t steps() const { return model_->steps(); }
  OnlineModel& get() { return *model_; }

 private:
  std::unique_ptr<OnlineModel> model_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online deep learning autoencoder (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

  py::class_<PyModel>(m, "Model")
      .def(py::init([](const std::string& variant, std::size_t input_dim, std::size_t classes,
                       std::size_t layers, std::size_t hidden_units, std::size_t attention_dim,
                       const std::string& optimizer, double lr, double theta0, double beta_floor,
                       bool adaptive_tradeoff, const std::string& corruption, std::uint64_t seed) {
             return PyModel(make_model(make_config(variant, input_dim, classes, layers, hidden_units,
                                                   attention_dim, optimizer, lr, theta0, beta_floor,
                                                   adaptive_tradeoff, corruption, seed)));
           }),
           py::arg("variant") = "odlae1", py::arg("input_dim"), py::arg("classes"),
           py::arg("layers") = 3, py::arg("hidden_units") = 64, py::arg("attention_dim") = 30,
           py::arg("optimizer") = "adam", py::arg("lr") = 0.01, py::arg("theta0") = 0.99,
           py::arg("beta_floor") = 0.01, py::arg("adaptive_tradeoff") = true,
           py::arg("corruption") = "none", py::arg("seed") = 0)
      .def_static("load", [](const std::string& path) {
        return PyModel(restore_model(load_checkpoint(path).model));
      })
      .def("predict", &PyModel::predict)
      .def("update", &PyModel::update)
      .def("parameter_names", &PyModel::parameter_names)
      .def("parameters", &PyModel::parameters)
      .def("save", &PyModel::save)
      .def_property_readonly("variant", &PyModel::variant)
      .def_property_readonly("steps", &PyModel::steps);

  m.def("prequential_synthetic",
        [](PyModel& model, std::size_t classes, std::size_t dim, std::size_t n, double sigma,
           double separation, std::uint64_t seed, std::uint64_t window) {
          GaussianSpec g;
          g.classes = classes;
          g.dim = dim;
          g.n = n;
          g.sigma = sigma;
          g.separation = separation;
          g.seed = seed;
          SyntheticGaussianStream s(g);
          PrequentialOptions opt;
          opt.window = window;
          return report_dict(prequential_run(s, model.get(), opt).report);
        },
        py::arg("model"), py::arg("classes") = 2, py::arg("dim") = 2, py::arg("n") = 1000,
        py::arg("sigma") = 0.05, py::arg("separation") = 8.0, py::arg("seed") = 0,
        py::arg("window") = 100);

  m.def("compute_metrics", [](const std::vector<std::size_t>& truth,
                              const std::vector<std::size_t>& predicted, std::size_t classes) {
    if (truth.size() != predicted.size()) throw ShapeError("truth and predicted differ in length");
    ConfusionMatrix cm(classes);
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
    return report_dict(compute_metrics(cm));
  });

  m.def("cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"odlae"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs the odlae command line in-process; returns (exit_code, stdout, stderr).");
}
