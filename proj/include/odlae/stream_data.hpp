#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "odlae/denoise.hpp"
#include "odlae/numerics.hpp"
#include "odlae/rng.hpp"

namespace odlae {

struct Example {
  Vector x;       // features in [0, 1]
  std::size_t y;  // class index
};

// Single-consumer sequential source of examples.
class ExampleStream {
 public:
  virtual ~ExampleStream() = default;

  virtual std::optional<Example> next() = 0;
  virtual std::size_t num_features() const = 0;
  virtual std::size_t num_classes() const = 0;
  // Total length when known up front.
  virtual std::optional<std::size_t> size() const { return std::nullopt; }
  // Index of the next example next() would return.
  std::uint64_t position() const noexcept { return position_; }
  // Discards n examples (used to replay a stream up to a checkpoint).
  void skip(std::uint64_t n);

 protected:
  std::uint64_t position_ = 0;
};

// ---------------------------------------------------------------- CSV

enum class Scaling {
  none,     // values passed through (must already lie in [0, 1])
  minmax,   // running per-feature min/max, including the current row
  prescan,  // min/max over the whole file
};

const char* to_string(Scaling s);
Scaling parse_scaling(const std::string& name);

struct CsvOptions {
  std::string path;
  bool header = false;
  char delimiter = ',';
  std::string label_column = "0";  // index, or a header name when header is set
  Scaling scaling = Scaling::minmax;
};

// Parsed file held in memory; shared read-only between streams.
struct CsvTable {
  std::vector<std::string> column_names;  // empty without a header row
  std::size_t label_index = 0;
  std::size_t features = 0;
  std::vector<double> values;        // rows x features, raw
  std::vector<std::size_t> labels;   // dense indices
  std::vector<std::string> label_names;  // index -> original text
  std::vector<std::size_t> line_numbers; // 1-based source line per row
  std::vector<double> column_min;
  std::vector<double> column_max;

  std::size_t rows() const noexcept { return labels.size(); }
};

// Reads and validates the whole file. Malformed rows raise DataError with
// the 1-based line number; an unknown label column raises DataError naming it.
std::shared_ptr<const CsvTable> load_csv_table(const CsvOptions& options);

class CsvStream final : public ExampleStream {
 public:
  CsvStream(std::shared_ptr<const CsvTable> table, Scaling scaling);
  explicit CsvStream(const CsvOptions& options);

  std::optional<Example> next() override;
  std::size_t num_features() const override { return table_->features; }
  std::size_t num_classes() const override { return table_->label_names.size(); }
  std::optional<std::size_t> size() const override { return table_->rows(); }
  const CsvTable& table() const noexcept { return *table_; }

 private:
  std::shared_ptr<const CsvTable> table_;
  Scaling scaling_;
  std::vector<double> min_;
  std::vector<double> max_;
};

// ----------------------------------------------------------- synthetic

struct GaussianSpec {
  std::size_t classes = 2;
  std::size_t dim = 2;
  std::size_t n = 5000;
  double sigma = 0.05;
  // Distance between neighbouring class means in units of sigma. Means sit
  // on a circle around (0.5, 0.5) in the first two coordinates (on a line
  // for dim 1); other coordinates are centred at 0.5.
  double separation = 8.0;
  std::vector<Vector> means;  // overrides the placement above when set
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<Vector> gaussian_means(const GaussianSpec& spec);

// Classes uniform over K, x ~ N(mean_y, sigma^2 I) clamped to [0, 1].
class SyntheticGaussianStream final : public ExampleStream {
 public:
  explicit SyntheticGaussianStream(GaussianSpec spec);

  std::optional<Example> next() override;
  std::size_t num_features() const override { return spec_.dim; }
  std::size_t num_classes() const override { return spec_.classes; }
  std::optional<std::size_t> size() const override { return spec_.n; }
  const std::vector<Vector>& means() const noexcept { return means_; }

 private:
  GaussianSpec spec_;
  std::vector<Vector> means_;
  Rng rng_;
};

// ---------------------------------------------------------------- drift

struct DriftSpec {
  enum class Kind { rotate, permute_features, label_swap };

  Kind kind = Kind::label_swap;
  std::uint64_t at_step = 0;
  std::uint64_t seed = 0;
  // label_swap: label permutation (required). permute_features: explicit
  // feature permutation; drawn from `seed` when empty.
  std::vector<std::size_t> permutation;
  std::optional<double> angle;  // rotate: fixed angle instead of a draw

  static Kind parse_kind(const std::string& name);
};

const char* to_string(DriftSpec::Kind k);

// Examples before at_step pass through; from at_step on one fixed
// transform is applied.
class DriftStream final : public ExampleStream {
 public:
  DriftStream(std::unique_ptr<ExampleStream> base, DriftSpec spec);

  std::optional<Example> next() override;
  std::size_t num_features() const override { return base_->num_features(); }
  std::size_t num_classes() const override { return base_->num_classes(); }
  std::optional<std::size_t> size() const override { return base_->size(); }

  const std::vector<std::size_t>& permutation() const noexcept { return perm_; }
  double angle() const noexcept { return angle_; }

 private:
  Vector rotate(const Vector& x) const;

  std::unique_ptr<ExampleStream> base_;
  DriftSpec spec_;
  std::vector<std::size_t> perm_;
  double angle_ = 0.0;
  std::size_t side_ = 0;  // image side for square-image rotation
};

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);
void check_permutation(const std::vector<std::size_t>& p, std::size_t n, const char* what);

// ---------------------------------------------------------------- noise

class NoiseStream final : public ExampleStream {
 public:
  NoiseStream(std::unique_ptr<ExampleStream> base, CorruptionPolicy policy, std::uint64_t seed);

  std::optional<Example> next() override;
  std::size_t num_features() const override { return base_->num_features(); }
  std::size_t num_classes() const override { return base_->num_classes(); }
  std::optional<std::size_t> size() const override { return base_->size(); }

 private:
  std::unique_ptr<ExampleStream> base_;
  CorruptionPolicy policy_;
  Rng rng_;
};

// ------------------------------------------------------------- spec

struct StreamSpec {
  enum class Source { csv, synthetic };

  Source source = Source::synthetic;
  CsvOptions csv;
  GaussianSpec gaussian;
  std::optional<DriftSpec> drift;
  CorruptionPolicy eval_noise;
  std::uint64_t noise_seed = 0;
};

// Builds the stream; `table` lets sweeps share one parsed CSV file.
std::unique_ptr<ExampleStream> make_stream(const StreamSpec& spec,
                                           std::shared_ptr<const CsvTable> table = nullptr);

}  // namespace odlae
