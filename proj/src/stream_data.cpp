#include "odlae/stream_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <unordered_map>

#include "odlae/errors.hpp"

namespace odlae {

void ExampleStream::skip(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!next()) throw DataError("stream ended while skipping to index " + std::to_string(n), i);
  }
}

// ---------------------------------------------------------------- CSV

const char* to_string(Scaling s) {
  switch (s) {
    case Scaling::none: return "none";
    case Scaling::minmax: return "minmax";
    case Scaling::prescan: return "prescan";
  }
  return "?";
}

Scaling parse_scaling(const std::string& name) {
  if (name == "none") return Scaling::none;
  if (name == "minmax" || name == "online") return Scaling::minmax;
  if (name == "prescan") return Scaling::prescan;
  throw ConfigError("unknown scaling '" + name + "' (expected none, minmax or prescan)");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty() && std::isfinite(out);
}

std::size_t resolve_label_column(const CsvOptions& opt, const std::vector<std::string>& names,
                                 std::size_t columns) {
  if (opt.header) {
    const auto it = std::find(names.begin(), names.end(), opt.label_column);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  }
  long long idx = 0;
  const auto& s = opt.label_column;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
  if (ec == std::errc() && ptr == s.data() + s.size()) {
    if (idx < 0) idx += static_cast<long long>(columns);
    if (idx >= 0 && static_cast<std::size_t>(idx) < columns) return static_cast<std::size_t>(idx);
  }
  throw DataError("label column '" + opt.label_column + "' not found in " + opt.path + " (" +
                      std::to_string(columns) + " columns)",
                  1);
}

}  // namespace

std::shared_ptr<const CsvTable> load_csv_table(const CsvOptions& opt) {
  std::ifstream in(opt.path);
  if (!in) throw DataError("cannot open " + opt.path, 0);

  auto table = std::make_shared<CsvTable>();
  std::unordered_map<std::string, std::size_t> label_ids;
  std::size_t columns = 0;
  bool resolved = false;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> row;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, opt.delimiter);
    if (opt.header && table->column_names.empty() && !resolved) {
      for (auto f : fields) table->column_names.emplace_back(f);
      columns = fields.size();
      table->label_index = resolve_label_column(opt, table->column_names, columns);
      table->features = columns - 1;
      resolved = true;
      continue;
    }
    if (!resolved) {
      columns = fields.size();
      table->label_index = resolve_label_column(opt, table->column_names, columns);
      table->features = columns - 1;
      resolved = true;
    }
    if (fields.size() != columns) {
      throw DataError(opt.path + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(columns) + " fields, found " +
                          std::to_string(fields.size()),
                      lineno);
    }
    row.clear();
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == table->label_index) continue;
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw DataError(opt.path + ":" + std::to_string(lineno) + ": column " + std::to_string(c) +
                            " is not a finite number: '" + std::string(fields[c]) + "'",
                        lineno);
      }
      row.push_back(v);
    }
    const std::string label(fields[table->label_index]);
    if (label.empty()) {
      throw DataError(opt.path + ":" + std::to_string(lineno) + ": empty label", lineno);
    }
    auto [it, inserted] = label_ids.try_emplace(label, table->label_names.size());
    if (inserted) table->label_names.push_back(label);

    if (table->column_min.empty()) {
      table->column_min = row;
      table->column_max = row;
    } else {
      for (std::size_t j = 0; j < row.size(); ++j) {
        table->column_min[j] = std::min(table->column_min[j], row[j]);
        table->column_max[j] = std::max(table->column_max[j], row[j]);
      }
    }
    table->values.insert(table->values.end(), row.begin(), row.end());
    table->labels.push_back(it->second);
    table->line_numbers.push_back(lineno);
  }
  if (table->rows() == 0) throw DataError(opt.path + ": no data rows", lineno);
  if (table->features == 0) throw DataError(opt.path + ": no feature columns", 1);
  return table;
}

CsvStream::CsvStream(std::shared_ptr<const CsvTable> table, Scaling scaling)
    : table_(std::move(table)), scaling_(scaling) {}

CsvStream::CsvStream(const CsvOptions& options)
    : CsvStream(load_csv_table(options), options.scaling) {}

std::optional<Example> CsvStream::next() {
  if (position_ >= table_->rows()) return std::nullopt;
  const std::size_t d = table_->features;
  const std::size_t i = static_cast<std::size_t>(position_);
  const double* raw = table_->values.data() + i * d;
  Example ex{Vector(d), table_->labels[i]};

  switch (scaling_) {
    case Scaling::none:
      for (std::size_t j = 0; j < d; ++j) {
        if (raw[j] < 0.0 || raw[j] > 1.0) {
          throw DataError("line " + std::to_string(table_->line_numbers[i]) +
                              ": feature outside [0, 1] with scaling none",
                          table_->line_numbers[i]);
        }
        ex.x[j] = raw[j];
      }
      break;
    case Scaling::minmax:
      if (min_.empty()) {
        min_.assign(raw, raw + d);
        max_.assign(raw, raw + d);
      }
      for (std::size_t j = 0; j < d; ++j) {
        min_[j] = std::min(min_[j], raw[j]);
        max_[j] = std::max(max_[j], raw[j]);
        const double range = max_[j] - min_[j];
        ex.x[j] = range > 0.0 ? std::clamp((raw[j] - min_[j]) / range, 0.0, 1.0) : 0.0;
      }
      break;
    case Scaling::prescan:
      for (std::size_t j = 0; j < d; ++j) {
        const double range = table_->column_max[j] - table_->column_min[j];
        ex.x[j] = range > 0.0 ? std::clamp((raw[j] - table_->column_min[j]) / range, 0.0, 1.0) : 0.0;
      }
      break;
  }
  ++position_;
  return ex;
}

// ----------------------------------------------------------- synthetic

void GaussianSpec::validate() const {
  if (classes < 2) throw ConfigError("synthetic stream needs at least 2 classes");
  if (dim < 1) throw ConfigError("synthetic stream needs at least 1 feature");
  if (n < 1) throw ConfigError("synthetic stream length must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be finite and >= 0");
  if (!(separation >= 0.0)) throw ConfigError("separation must be >= 0");
  if (!means.empty()) {
    if (means.size() != classes) throw ConfigError("need one mean per class");
    for (const auto& m : means)
      if (m.dim() != dim) throw ConfigError("mean dimension does not match dim");
  }
}

std::vector<Vector> gaussian_means(const GaussianSpec& spec) {
  spec.validate();
  if (!spec.means.empty()) return spec.means;
  std::vector<Vector> means(spec.classes, Vector(spec.dim, 0.5));
  const double gap = spec.separation * spec.sigma;
  const double k = static_cast<double>(spec.classes);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    if (spec.dim == 1) {
      means[c][0] = 0.5 + (static_cast<double>(c) - (k - 1.0) / 2.0) * gap;
    } else {
      const double radius = gap / (2.0 * std::sin(std::numbers::pi / k));
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(c) / k;
      means[c][0] = 0.5 + radius * std::cos(phi);
      means[c][1] = 0.5 + radius * std::sin(phi);
    }
  }
  return means;
}

SyntheticGaussianStream::SyntheticGaussianStream(GaussianSpec spec)
    : spec_(std::move(spec)), means_(gaussian_means(spec_)), rng_(Rng(spec_.seed).derive("gaussian")) {}

std::optional<Example> SyntheticGaussianStream::next() {
  if (position_ >= spec_.n) return std::nullopt;
  const std::size_t y = rng_.uniform_index(spec_.classes);
  Example ex{Vector(spec_.dim), y};
  for (std::size_t j = 0; j < spec_.dim; ++j) {
    ex.x[j] = std::clamp(means_[y][j] + spec_.sigma * rng_.normal(), 0.0, 1.0);
  }
  ++position_;
  return ex;
}

// ---------------------------------------------------------------- drift

DriftSpec::Kind DriftSpec::parse_kind(const std::string& name) {
  if (name == "rotate") return Kind::rotate;
  if (name == "permute_features" || name == "permute") return Kind::permute_features;
  if (name == "label_swap" || name == "labels") return Kind::label_swap;
  throw ConfigError("unknown drift '" + name + "' (expected rotate, permute_features or label_swap)");
}

const char* to_string(DriftSpec::Kind k) {
  switch (k) {
    case DriftSpec::Kind::rotate: return "rotate";
    case DriftSpec::Kind::permute_features: return "permute_features";
    case DriftSpec::Kind::label_swap: return "label_swap";
  }
  return "?";
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.uniform_index(i)]);
  return p;
}

void check_permutation(const std::vector<std::size_t>& p, std::size_t n, const char* what) {
  if (p.size() != n) {
    throw ConfigError(std::string(what) + " permutation has " + std::to_string(p.size()) +
                      " entries, expected " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (auto v : p) {
    if (v >= n || seen[v]) throw ConfigError(std::string(what) + " permutation is not a bijection");
    seen[v] = true;
  }
}

DriftStream::DriftStream(std::unique_ptr<ExampleStream> base, DriftSpec spec)
    : base_(std::move(base)), spec_(std::move(spec)) {
  if (auto n = base_->size(); n && spec_.at_step > *n) {
    throw ConfigError("drift step " + std::to_string(spec_.at_step) + " is past the stream end (" +
                      std::to_string(*n) + ")");
  }
  Rng rng = Rng(spec_.seed).derive("drift");
  const std::size_t d = base_->num_features();
  switch (spec_.kind) {
    case DriftSpec::Kind::label_swap:
      perm_ = spec_.permutation.empty() ? random_permutation(base_->num_classes(), rng)
                                        : spec_.permutation;
      check_permutation(perm_, base_->num_classes(), "label");
      break;
    case DriftSpec::Kind::permute_features:
      perm_ = spec_.permutation.empty() ? random_permutation(d, rng) : spec_.permutation;
      check_permutation(perm_, d, "feature");
      break;
    case DriftSpec::Kind::rotate: {
      if (d != 2) {
        const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d))));
        if (side * side != d) {
          throw ConfigError("rotate drift needs 2 features or a square image, got " +
                            std::to_string(d) + " features");
        }
        side_ = side;
      }
      angle_ = spec_.angle ? *spec_.angle : std::numbers::pi - 2.0 * std::numbers::pi * rng.uniform();
      break;
    }
  }
}

Vector DriftStream::rotate(const Vector& x) const {
  const double c = std::cos(angle_);
  const double s = std::sin(angle_);
  if (side_ == 0) {
    const double u = x[0] - 0.5;
    const double v = x[1] - 0.5;
    return Vector{std::clamp(0.5 + c * u - s * v, 0.0, 1.0), std::clamp(0.5 + s * u + c * v, 0.0, 1.0)};
  }
  // Nearest-neighbour resampling about the image centre; pixels that map
  // from outside the frame become 0.
  Vector out(x.dim(), 0.0);
  const double mid = (static_cast<double>(side_) - 1.0) / 2.0;
  const auto n = static_cast<long>(side_);
  for (long r = 0; r < n; ++r) {
    for (long col = 0; col < n; ++col) {
      const double dy = static_cast<double>(r) - mid;
      const double dx = static_cast<double>(col) - mid;
      const long sr = std::lround(mid - s * dx + c * dy);
      const long sc = std::lround(mid + c * dx + s * dy);
      if (sr >= 0 && sr < n && sc >= 0 && sc < n) out[r * n + col] = x[sr * n + sc];
    }
  }
  return out;
}

std::optional<Example> DriftStream::next() {
  auto ex = base_->next();
  if (!ex) return std::nullopt;
  if (position_++ < spec_.at_step) return ex;
  switch (spec_.kind) {
    case DriftSpec::Kind::label_swap:
      ex->y = perm_[ex->y];
      break;
    case DriftSpec::Kind::permute_features: {
      Vector out(ex->x.dim());
      for (std::size_t i = 0; i < perm_.size(); ++i) out[i] = ex->x[perm_[i]];
      ex->x = std::move(out);
      break;
    }
    case DriftSpec::Kind::rotate:
      ex->x = rotate(ex->x);
      break;
  }
  return ex;
}

// ---------------------------------------------------------------- noise

NoiseStream::NoiseStream(std::unique_ptr<ExampleStream> base, CorruptionPolicy policy,
                         std::uint64_t seed)
    : base_(std::move(base)), policy_(policy), rng_(Rng(seed).derive("eval-noise")) {
  policy_.validate();
}

std::optional<Example> NoiseStream::next() {
  auto ex = base_->next();
  if (!ex) return std::nullopt;
  ++position_;
  if (policy_.active()) ex->x = corrupt(ex->x.span(), policy_, rng_);
  return ex;
}

// ------------------------------------------------------------- spec

std::unique_ptr<ExampleStream> make_stream(const StreamSpec& spec,
                                           std::shared_ptr<const CsvTable> table) {
  std::unique_ptr<ExampleStream> s;
  if (spec.source == StreamSpec::Source::csv) {
    if (!table) table = load_csv_table(spec.csv);
    s = std::make_unique<CsvStream>(std::move(table), spec.csv.scaling);
  } else {
    s = std::make_unique<SyntheticGaussianStream>(spec.gaussian);
  }
  if (spec.drift) s = std::make_unique<DriftStream>(std::move(s), *spec.drift);
  if (spec.eval_noise.active()) {
    s = std::make_unique<NoiseStream>(std::move(s), spec.eval_noise, spec.noise_seed);
  }
  return s;
}

}  // namespace odlae
