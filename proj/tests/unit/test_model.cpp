#include <doctest.h>

#include <cmath>

#include "odlae/errors.hpp"
#include "odlae/model.hpp"
#include "support/fixtures.hpp"

using namespace odlae;
using fixtures::config;
using fixtures::unit_vector;

namespace {

double sum(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (auto v : {Variant::odlae1, Variant::odlae2, Variant::odldae1, Variant::odldae2,
                 Variant::linear_ogd_baseline}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK_THROWS_AS(parse_variant("odlae3"), ConfigError);
}

TEST_CASE("factory picks the right class and rejects mismatches") {
  CHECK(dynamic_cast<HedgeModel*>(make_model(config(Variant::odlae1)).get()));
  CHECK(dynamic_cast<HedgeModel*>(make_model(config(Variant::odldae1)).get()));
  CHECK(dynamic_cast<AttentionModel*>(make_model(config(Variant::odlae2)).get()));
  CHECK(dynamic_cast<LinearOgdModel*>(make_model(config(Variant::linear_ogd_baseline)).get()));
  CHECK_THROWS_AS(HedgeModel(config(Variant::odlae2)), ConfigError);
  CHECK_THROWS_AS(AttentionModel(config(Variant::odlae1)), ConfigError);
  auto bad = config(Variant::odlae1);
  bad.theta0 = 1.0;
  CHECK_THROWS_AS(make_model(bad), ConfigError);
}

TEST_CASE("parameter order and names") {
  HedgeModel h(config(Variant::odlae1));
  const auto names = h.parameter_names();
  REQUIRE(names.size() == h.parameters().size());
  CHECK(names.size() == 18);
  CHECK(names.front() == "encoder.W0");
  CHECK(names[3] == "encoder.b0");
  CHECK(names[6] == "decoder.W0");
  CHECK(names[12] == "classifier.W0");
  CHECK(names.back() == "classifier.b2");
  AttentionModel a(config(Variant::odlae2));
  const auto an = a.parameter_names();
  CHECK(an.size() == 16);
  CHECK(an[12] == "attention.projection");
  CHECK(an.back() == "head.b");
}

TEST_CASE("predict does not change state and matches the training pass") {
  for (auto v : {Variant::odlae1, Variant::odlae2, Variant::linear_ogd_baseline}) {
    auto m = make_model(config(v));
    Rng rng(3);
    const Vector x = unit_vector(rng, 6);
    const auto before = fixtures::copy_params(*m);
    const Vector p1 = m->predict(x.span());
    const Vector p2 = m->predict(x.span());
    CHECK(p1 == p2);
    CHECK(fixtures::copy_params(*m) == before);
    const StepRecord r = m->update(x.span(), 1);
    CHECK(r.prediction == p1);
    CHECK(r.predicted == argmax(p1.span()));
    CHECK(!(fixtures::copy_params(*m) == before));
  }
}

TEST_CASE("step records stay on the simplex") {
  for (auto v : {Variant::odlae1, Variant::odlae2}) {
    auto m = make_model(config(v));
    Rng rng(4);
    for (int t = 0; t < 300; ++t) {
      const Vector x = unit_vector(rng, 6);
      const StepRecord r = m->update(x.span(), rng.uniform_index(3));
      CHECK(r.t == static_cast<std::uint64_t>(t));
      CHECK(std::fabs(sum(r.prediction) - 1.0) <= 1e-9);
      CHECK(std::fabs(sum(r.layer_weights) - 1.0) <= 1e-9);
      CHECK(std::fabs(r.a_re + r.a_pre - 1.0) <= 1e-9);
      for (double w : r.layer_weights) CHECK(w >= 0.0);
      CHECK(r.total_loss == doctest::Approx(r.a_re * r.recon_loss + r.a_pre * r.pred_loss).epsilon(1e-14));
    }
  }
}

TEST_CASE("hedge step uses beta before its update and records the updated beta") {
  HedgeModel m(config(Variant::odlae1));
  Rng rng(5);
  const Vector x = unit_vector(rng, 6);
  const HedgeState before = m.hedge();
  const StepRecord r = m.update(x.span(), 2);
  const HedgeState expected = hedge_update(before, r.layer_losses);
  CHECK(m.hedge().beta == expected.beta);
  CHECK(r.layer_weights == expected.beta);
}

TEST_CASE("fixed tradeoff keeps the coefficients") {
  auto c = config(Variant::odlae1);
  c.adaptive_tradeoff = false;
  c.tradeoff.a_re = 0.3;
  c.tradeoff.a_pre = 0.7;
  HedgeModel m(c);
  Rng rng(6);
  for (int t = 0; t < 20; ++t) m.update(unit_vector(rng, 6).span(), 0);
  CHECK(m.tradeoff().a_re == 0.3);
  CHECK(m.tradeoff().a_pre == 0.7);
}

TEST_CASE("single steps are bitwise reproducible") {
  for (auto v : {Variant::odlae1, Variant::odlae2, Variant::odldae1, Variant::odldae2}) {
    auto c = config(v);
    if (uses_denoising(v)) c.corruption = CorruptionPolicy::masking(0.3);
    auto a = make_model(c), b = make_model(c);
    Rng ra(7), rb(7);
    for (int t = 0; t < 30; ++t) {
      const StepRecord x = a->update(unit_vector(ra, 6).span(), t % 3);
      const StepRecord y = b->update(unit_vector(rb, 6).span(), t % 3);
      CHECK(x.prediction == y.prediction);
      CHECK(x.total_loss == y.total_loss);
    }
    CHECK(fixtures::copy_params(*a) == fixtures::copy_params(*b));
  }
}

TEST_CASE("denoising with policy none reproduces the plain variant bitwise") {
  for (auto [plain, noisy] : {std::pair{Variant::odlae1, Variant::odldae1},
                              std::pair{Variant::odlae2, Variant::odldae2}}) {
    auto a = make_model(config(plain));
    auto b = make_model(config(noisy));
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
      const Vector x = unit_vector(rng, 6);
      const std::size_t y = rng.uniform_index(3);
      const StepRecord ra = a->update(x.span(), y);
      const StepRecord rb = b->update(x.span(), y);
      REQUIRE(ra.prediction == rb.prediction);
      REQUIRE(ra.total_loss == rb.total_loss);
      REQUIRE(ra.layer_weights == rb.layer_weights);
    }
    CHECK(fixtures::copy_params(*a) == fixtures::copy_params(*b));
  }
}

TEST_CASE("masking changes the denoising trajectory") {
  auto c = config(Variant::odldae1);
  auto plain = make_model(config(Variant::odlae1));
  c.corruption = CorruptionPolicy::masking(0.5);
  auto noisy = make_model(c);
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const Vector x = unit_vector(rng, 6);
    plain->update(x.span(), 0);
    noisy->update(x.span(), 0);
  }
  CHECK(!(fixtures::copy_params(*plain) == fixtures::copy_params(*noisy)));
}

TEST_CASE("denoising reconstruction is measured against the clean input") {
  auto c = config(Variant::odldae1);
  HedgeModel m(c);
  Rng rng(10);
  const Vector x = unit_vector(rng, 6);
  const Vector sentinel(6, 0.0);
  const auto clean_target = m.loss_gradient(sentinel.span(), x.span(), 1);
  const auto trace = forward(sentinel.span(), m.encoder(), m.decoder(), m.activations());
  CHECK(clean_target.recon_loss == reconstruction_loss(x.span(), trace.reconstruction.span()));
  CHECK(clean_target.recon_loss != reconstruction_loss(sentinel.span(), trace.reconstruction.span()));
}

TEST_CASE("zero attention scores give the head prediction of the mean hidden state") {
  AttentionModel m(config(Variant::odlae2));
  for (auto& v : m.parameters()[13]) v = 0.0;
  m.freeze_attention(true);
  Rng rng(11);
  for (int t = 0; t < 5; ++t) {
    const Vector x = unit_vector(rng, 6);
    const auto hidden = encode(x.span(), m.encoder(), Activation::relu);
    Vector mean(4);
    for (const auto& h : hidden)
      for (std::size_t i = 0; i < 4; ++i) mean[i] += h[i] / 3.0;
    const Vector want = head_predict(mean.span(), m.head());
    const StepRecord r = m.update(x.span(), 0);
    for (std::size_t k = 0; k < 3; ++k) CHECK(r.prediction[k] == doctest::Approx(want[k]).epsilon(1e-14));
    for (double a : r.layer_weights) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  for (double w : m.attention().score) CHECK(w == 0.0);
}

TEST_CASE("invalid inputs") {
  auto m = make_model(config(Variant::odlae1));
  CHECK_THROWS_AS(m->update(Vector(6).span(), 3), InvalidInput);
  CHECK_THROWS_AS(m->update(Vector(5).span(), 0), ShapeError);
  CHECK_THROWS_AS(m->update(Vector(6, NAN).span(), 0), InvalidInput);
  CHECK_THROWS_AS(m->predict(Vector(2).span()), ShapeError);
}

TEST_CASE("snapshot restores an identical model") {
  for (auto v : {Variant::odlae1, Variant::odlae2, Variant::odldae2, Variant::linear_ogd_baseline}) {
    auto c = config(v);
    if (uses_denoising(v)) c.corruption = CorruptionPolicy::masking(0.2);
    auto a = make_model(c);
    Rng rng(12);
    for (int t = 0; t < 25; ++t) a->update(unit_vector(rng, 6).span(), t % 3);
    auto b = restore_model(a->snapshot());
    CHECK(fixtures::copy_params(*a) == fixtures::copy_params(*b));
    CHECK(b->steps() == a->steps());
    Rng r1(13), r2(13);
    for (int t = 0; t < 25; ++t) {
      const auto x = a->update(unit_vector(r1, 6).span(), t % 3);
      const auto y = b->update(unit_vector(r2, 6).span(), t % 3);
      REQUIRE(x.prediction == y.prediction);
    }
    CHECK(fixtures::copy_params(*a) == fixtures::copy_params(*b));
  }
}

TEST_CASE("linear baseline with zero learning rate never moves") {
  auto c = config(Variant::linear_ogd_baseline);
  c.optimizer.learning_rate = 0.0;
  LinearOgdModel m(c);
  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    const StepRecord r = m.update(unit_vector(rng, 6).span(), 1);
    for (double p : r.prediction) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(r.predicted == 0);
  }
}

TEST_CASE("repeating an example lowers its prediction loss") {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    HedgeModel m(config(Variant::odlae1, 6, 4, 3, 2, seed));
    Rng rng(seed + 1000);
    const Vector x = unit_vector(rng, 6);
    const std::size_t y = rng.uniform_index(3);
    const double first = m.update(x.span(), y).pred_loss;
    const double second = m.update(x.span(), y).pred_loss;
    improved += second <= first;
  }
  CHECK(improved >= 95);
}
