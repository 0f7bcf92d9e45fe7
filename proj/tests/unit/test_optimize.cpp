#include <doctest.h>

#include <cmath>

#include "odlae/errors.hpp"
#include "odlae/optimize.hpp"
#include "odlae/rng.hpp"

#ifdef ODLAE_HAVE_BOOST_MP
#include <boost/multiprecision/cpp_bin_float.hpp>
#endif

using namespace odlae;

TEST_CASE("sgd arithmetic") {
  std::vector<double> p{1.0, 2.0}, g{0.5, 0.0};
  sgd_step({p}, {g}, 0.1);
  CHECK(p[0] == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(p[1] == 2.0);
  std::vector<double> q{3.0};
  sgd_step({q}, {std::vector<double>{7.0}}, 0.0);
  CHECK(q[0] == 3.0);
}

TEST_CASE("sgd is additive in the gradient") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> p{rng.uniform(-1, 1)}, q = p;
    const std::vector<double> g1{rng.uniform(-1, 1)}, g2{rng.uniform(-1, 1)};
    const std::vector<double> gs{g1[0] + g2[0]};
    sgd_step({p}, {gs}, 0.05);
    sgd_step({q}, {g1}, 0.05);
    sgd_step({q}, {g2}, 0.05);
    CHECK(std::fabs(p[0] - q[0]) <= 1e-12);
  }
}

TEST_CASE("optimizer errors") {
  std::vector<double> p{1.0, 2.0};
  std::vector<double> short_g{1.0};
  std::vector<double> nan_g{NAN, 0.0};
  CHECK_THROWS_AS(sgd_step({p}, {short_g}, 0.1), ShapeError);
  CHECK_THROWS_AS(sgd_step({p}, {nan_g}, 0.1), NumericError);
  AdamState st;
  OptimizerConfig c;
  CHECK_THROWS_AS(adam_step(st, c, {p}, {nan_g}), NumericError);
  CHECK(st.step == 0);
  CHECK(p == std::vector<double>{1.0, 2.0});
  OptimizerConfig bad;
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(OptimizerConfig::parse_kind("rmsprop"), ConfigError);
}

TEST_CASE("adam leaves parameters alone under a zero gradient") {
  std::vector<double> p{0.3, -0.7};
  AdamState st;
  adam_step(st, OptimizerConfig{}, {p}, {std::vector<double>{0.0, 0.0}});
  CHECK(p == std::vector<double>{0.3, -0.7});
  CHECK(st.step == 1);
  CHECK(st.first_moment[0].size() == 2);
}

TEST_CASE("adam first step matches a high-precision reference") {
  const double g = 0.37;
  std::vector<double> p{1.0};
  AdamState st;
  OptimizerConfig c;
  adam_step(st, c, {p}, {std::vector<double>{g}});
#ifdef ODLAE_HAVE_BOOST_MP
  using big = boost::multiprecision::cpp_bin_float_50;
  const big bg(g), b1("0.9"), b2("0.999"), eps("1e-8"), lr("0.01");
  const big m = (1 - b1) * bg, v = (1 - b2) * bg * bg;
  const big mh = m / (1 - b1), vh = v / (1 - b2);
  const double want = static_cast<double>(big(1) - lr * mh / (boost::multiprecision::sqrt(vh) + eps));
#else
  const double want = 1.0 - 0.01 * g / (g + 1e-8);
#endif
  CHECK(std::fabs(p[0] - want) <= 1e-15);
}

TEST_CASE("adam with a constant gradient steps by about lr") {
  std::vector<double> p{0.0};
  AdamState st;
  OptimizerConfig c;
  double prev = 0.0, step = 0.0;
  for (int t = 0; t < 500; ++t) {
    adam_step(st, c, {p}, {std::vector<double>{-2.5}});
    step = p[0] - prev;
    prev = p[0];
    CHECK(step > 0.0);
    CHECK(step <= 0.01 * (1.0 + 1e-9));
  }
  CHECK(step == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("adam moments decay geometrically once gradients stop") {
  std::vector<double> p{0.0};
  AdamState st;
  OptimizerConfig c;
  for (int t = 0; t < 10; ++t) adam_step(st, c, {p}, {std::vector<double>{1.0}});
  for (int t = 0; t < 20; ++t) {
    const double m = st.first_moment[0][0], v = st.second_moment[0][0];
    adam_step(st, c, {p}, {std::vector<double>{0.0}});
    CHECK(st.first_moment[0][0] == m * 0.9);
    CHECK(st.second_moment[0][0] == v * 0.999);
  }
}

TEST_CASE("two identical adam runs agree bitwise") {
  auto run = [] {
    Rng rng(9);
    std::vector<double> p(5, 0.1);
    Optimizer opt;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> g(5);
      for (auto& x : g) x = rng.uniform(-1, 1);
      opt.step({p}, {g});
    }
    return p;
  };
  CHECK(run() == run());
}
