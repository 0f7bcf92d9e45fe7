#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace odlae {

// Dense column vector of doubles.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double value = 0.0) : data_(dim, value) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}
  explicit Vector(std::span<const double> values)
      : data_(values.begin(), values.end()) {}

  std::size_t dim() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  void fill(double v);
  double sum() const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }

  void fill(double v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Activation { identity, relu, sigmoid, tanh };

const char* to_string(Activation a);
Activation parse_activation(const std::string& name);

// ---- dense kernels (all throw ShapeError on non-conforming shapes) ----

Vector matvec(const Matrix& m, std::span<const double> v);
// m^T v without materializing the transpose.
Vector matvec_transposed(const Matrix& m, std::span<const double> v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
Matrix outer(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// m += alpha * a b^T
void add_outer(double alpha, std::span<const double> a, std::span<const double> b, Matrix& m);
double dot(std::span<const double> a, std::span<const double> b);

// ---- activations ----

Vector relu(std::span<const double> v);
Vector sigmoid(std::span<const double> v);
Vector apply(Activation a, std::span<const double> v);
// Derivative of the activation evaluated from its pre-activation and output.
// ReLU'(0) is taken as 0.
double activation_derivative(Activation a, double pre, double out);

// Max-shifted softmax. Throws InvalidInput on non-finite entries.
Vector softmax(std::span<const double> v);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

// ---- losses ----

inline constexpr double kLogClamp = 1e-12;

// -sum y_i log(max(yhat_i, kLogClamp))
double cross_entropy(std::span<const double> y, std::span<const double> yhat);
// Same loss for a class index instead of a one-hot vector.
double cross_entropy(std::size_t label, std::span<const double> yhat);
// Mean over dimensions of the squared difference.
double mean_squared_error(std::span<const double> x, std::span<const double> xhat);

Vector one_hot(std::size_t label, std::size_t classes);

bool all_finite(std::span<const double> v);

}  // namespace odlae
