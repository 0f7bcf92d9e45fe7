#include <doctest.h>

#include <cmath>

#include "odlae/errors.hpp"
#include "odlae/numerics.hpp"
#include "odlae/rng.hpp"

#ifdef ODLAE_HAVE_BOOST_MP
#include <boost/multiprecision/cpp_bin_float.hpp>
#endif

using namespace odlae;

namespace {

Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (auto& x : m.span()) x = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("softmax of equal logits is uniform") {
  const Vector p = softmax(Vector{0.0, 0.0}.span());
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);
}

TEST_CASE("softmax survives large logits") {
  const Vector p = softmax(Vector{1000.0, 0.0}.span());
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p[1] >= 0.0);
  CHECK(p[1] < 1e-300);
}

TEST_CASE("softmax of [1,2,3] matches a 50-digit evaluation") {
#ifdef ODLAE_HAVE_BOOST_MP
  using big = boost::multiprecision::cpp_bin_float_50;
  big denom = 0;
  for (int i = 1; i <= 3; ++i) denom += boost::multiprecision::exp(big(i));
  const Vector p = softmax(Vector{1.0, 2.0, 3.0}.span());
  for (int i = 0; i < 3; ++i) {
    const double want = static_cast<double>(boost::multiprecision::exp(big(i + 1)) / denom);
    CHECK(std::fabs(p[i] - want) <= 1e-15);
  }
#else
  // mpmath, 50 digits
  const double want[] = {0.090030573170380459, 0.24472847105479764, 0.66524095577482190};
  const Vector p = softmax(Vector{1.0, 2.0, 3.0}.span());
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(p[i] - want[i]) <= 1e-15);
#endif
}

TEST_CASE("softmax rejects non-finite input") {
  CHECK_THROWS_AS(softmax(Vector{1.0, NAN}.span()), InvalidInput);
  CHECK_THROWS_AS(softmax(Vector{INFINITY, 0.0}.span()), InvalidInput);
  CHECK_THROWS_AS(softmax(Vector{}.span()), ShapeError);
}

TEST_CASE("softmax properties on random inputs") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(9);
    const Vector v = random_vector(rng, n, -1000.0, 1000.0);
    const Vector p = softmax(v.span());
    double s = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
      s += x;
    }
    CHECK(std::fabs(s - 1.0) <= 1e-12);
    CHECK(argmax(p.span()) == argmax(v.span()));

    const double shift = rng.uniform(-50.0, 50.0);
    Vector w = v;
    for (auto& x : w) x += shift;
    const Vector q = softmax(w.span());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(p[i] - q[i]) <= 1e-12);
  }
}

TEST_CASE("relu") {
  CHECK(relu(Vector{-1.0, 0.0, 2.0}.span()) == Vector{0.0, 0.0, 2.0});
  CHECK(relu(Vector(4).span()) == Vector(4));
  Rng rng(3);
  const Vector v = random_vector(rng, 50);
  const Vector r = relu(v.span());
  for (std::size_t i = 0; i < v.dim(); ++i) CHECK(r[i] == (v[i] > 0.0 ? v[i] : 0.0));
  CHECK(activation_derivative(Activation::relu, 0.0, 0.0) == 0.0);
}

TEST_CASE("cross entropy") {
  CHECK(cross_entropy(Vector{0, 1, 0}.span(), Vector{0, 1, 0}.span()) <= 1e-11);
  CHECK(cross_entropy(Vector{1, 0}.span(), Vector{0.5, 0.5}.span()) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(cross_entropy(std::size_t{0}, Vector{0.0, 1.0}.span()) == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS_AS(cross_entropy(Vector{1, 0}.span(), Vector{1.0}.span()), ShapeError);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector p = softmax(random_vector(rng, 6, -5, 5).span());
    const std::size_t y = rng.uniform_index(6);
    const Vector oh = one_hot(y, 6);
    double want = 0.0;
    for (std::size_t i = 0; i < 6; ++i) want -= oh[i] * std::log(std::max(p[i], 1e-12));
    CHECK(cross_entropy(oh.span(), p.span()) == doctest::Approx(want).epsilon(1e-14));
    CHECK(cross_entropy(y, p.span()) >= 0.0);
  }
}

TEST_CASE("mean squared error") {
  CHECK(mean_squared_error(Vector{0.3, 0.7}.span(), Vector{0.3, 0.7}.span()) == 0.0);
  CHECK(mean_squared_error(Vector{1.0, 0.0}.span(), Vector{0.0, 0.0}.span()) == 0.5);
  CHECK_THROWS_AS(mean_squared_error(Vector{1.0}.span(), Vector{0.0, 0.0}.span()), ShapeError);
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector a = random_vector(rng, 7, 0, 1);
    const Vector b = random_vector(rng, 7, 0, 1);
    double want = 0.0;
    for (std::size_t i = 0; i < 7; ++i) want += (a[i] - b[i]) * (a[i] - b[i]);
    want /= 7.0;
    const double got = mean_squared_error(a.span(), b.span());
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("dense kernels match loop oracles") {
  Rng rng(21);
  const Vector v = random_vector(rng, 4);
  CHECK(matvec(Matrix::identity(4), v.span()) == v);
  CHECK(matvec(Matrix(3, 4), v.span()) == Vector(3));

  const Matrix m = random_matrix(rng, 3, 4);
  const Vector mv = matvec(m, v.span());
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) s += m(r, c) * v[c];
    CHECK(mv[r] == doctest::Approx(s).epsilon(1e-14));
  }
  const Vector u = random_vector(rng, 3);
  const Vector mtu = matvec_transposed(m, u.span());
  const Matrix mt = transpose(m);
  const Vector mtu2 = matvec(mt, u.span());
  for (std::size_t c = 0; c < 4; ++c) CHECK(mtu[c] == doctest::Approx(mtu2[c]).epsilon(1e-14));

  const Matrix b = random_matrix(rng, 4, 2);
  const Matrix ab = matmul(m, b);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 4; ++k) s += m(i, k) * b(k, j);
      CHECK(ab(i, j) == doctest::Approx(s).epsilon(1e-14));
    }
  }
  const Matrix o = outer(u.span(), v.span());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(o(i, j) == u[i] * v[j]);

  Vector y = v;
  axpy(2.0, v.span(), y.span());
  for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == 3.0 * v[i]);

  CHECK_THROWS_AS(matvec(m, u.span()), ShapeError);
  CHECK_THROWS_AS(matmul(m, m), ShapeError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(Vector{0.2, 0.4, 0.4}.span()) == 1);
  CHECK(argmax(Vector{0.5, 0.5}.span()) == 0);
}

TEST_CASE("activation names round trip") {
  for (auto a : {Activation::identity, Activation::relu, Activation::sigmoid, Activation::tanh}) {
    CHECK(parse_activation(to_string(a)) == a);
  }
  CHECK_THROWS(parse_activation("swish"));
}
