#include "odlae/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "odlae/errors.hpp"

namespace odlae {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ShapeError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                     " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

void Vector::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Vector::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) + " entries for a " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

const char* to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + name + "'");
}

Vector matvec(const Matrix& m, std::span<const double> v) {
  require_same_dim(m.cols(), v.size(), "matvec");
  Vector out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

Vector matvec_transposed(const Matrix& m, std::span<const double> v) {
  require_same_dim(m.rows(), v.size(), "matvec_transposed");
  Vector out(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double s = v[r];
    if (s == 0.0) continue;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += s * row[c];
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require_same_dim(a.cols(), b.rows(), "matmul");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      const auto brow = b.row(k);
      auto orow = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += s * brow[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

Matrix outer(std::span<const double> a, std::span<const double> b) {
  Matrix out(a.size(), b.size());
  add_outer(1.0, a, b, out);
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_dim(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void add_outer(double alpha, std::span<const double> a, std::span<const double> b,
               Matrix& m) {
  if (m.rows() != a.size() || m.cols() != b.size()) {
    throw ShapeError("add_outer: target is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", operands " + std::to_string(a.size()) +
                     "x" + std::to_string(b.size()));
  }
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double s = alpha * a[r];
    if (s == 0.0) continue;
    auto row = m.row(r);
    for (std::size_t c = 0; c < b.size(); ++c) row[c] += s * b[c];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vector relu(std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? v[i] : 0.0;
  return out;
}

Vector sigmoid(std::span<const double> v) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    // Branch on sign so exp never overflows.
    if (v[i] >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-v[i]));
    } else {
      const double e = std::exp(v[i]);
      out[i] = e / (1.0 + e);
    }
  }
  return out;
}

Vector apply(Activation a, std::span<const double> v) {
  switch (a) {
    case Activation::identity: return Vector(v);
    case Activation::relu: return relu(v);
    case Activation::sigmoid: return sigmoid(v);
    case Activation::tanh: {
      Vector out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
      return out;
    }
  }
  return Vector(v);
}

double activation_derivative(Activation a, double pre, double out) {
  switch (a) {
    case Activation::identity: return 1.0;
    case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return out * (1.0 - out);
    case Activation::tanh: return 1.0 - out * out;
  }
  return 1.0;
}

Vector softmax(std::span<const double> v) {
  if (v.empty()) throw ShapeError("softmax: empty input");
  if (!all_finite(v)) throw InvalidInput("softmax: non-finite input entry");
  const double m = *std::max_element(v.begin(), v.end());
  Vector out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    total += out[i];
  }
  for (auto& e : out) e /= total;
  return out;
}

std::size_t argmax(std::span<const double> v) {
  if (v.empty()) throw ShapeError("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

double cross_entropy(std::span<const double> y, std::span<const double> yhat) {
  require_same_dim(y.size(), yhat.size(), "cross_entropy");
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0) loss -= y[i] * std::log(std::max(yhat[i], kLogClamp));
  }
  return loss;
}

double cross_entropy(std::size_t label, std::span<const double> yhat) {
  if (label >= yhat.size()) {
    throw InvalidInput("cross_entropy: label " + std::to_string(label) + " outside " +
                       std::to_string(yhat.size()) + " classes");
  }
  return -std::log(std::max(yhat[label], kLogClamp));
}

double mean_squared_error(std::span<const double> x, std::span<const double> xhat) {
  require_same_dim(x.size(), xhat.size(), "mean_squared_error");
  if (x.empty()) throw ShapeError("mean_squared_error: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - xhat[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

Vector one_hot(std::size_t label, std::size_t classes) {
  if (label >= classes) {
    throw InvalidInput("one_hot: label " + std::to_string(label) + " outside " +
                       std::to_string(classes) + " classes");
  }
  Vector out(classes);
  out[label] = 1.0;
  return out;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace odlae
