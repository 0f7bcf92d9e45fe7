#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "odlae/errors.hpp"
#include "odlae/stream_data.hpp"

using namespace odlae;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("odlae_stream_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::vector<Example> drain(ExampleStream& s) {
  std::vector<Example> out;
  while (auto e = s.next()) out.push_back(std::move(*e));
  return out;
}

std::unique_ptr<ExampleStream> gaussians(std::uint64_t seed, std::size_t n = 200) {
  GaussianSpec g;
  g.n = n;
  g.seed = seed;
  return std::make_unique<SyntheticGaussianStream>(g);
}

}  // namespace

TEST_CASE("csv with scaling none passes values through") {
  CsvOptions o;
  o.path = write_temp("plain.csv", "1,0.25,0.5\n0,1,0\n1,0.75,0.125\n");
  o.scaling = Scaling::none;
  CsvStream s(o);
  CHECK(s.num_features() == 2);
  CHECK(s.num_classes() == 2);
  const auto ex = drain(s);
  REQUIRE(ex.size() == 3);
  CHECK(ex[0].x == Vector{0.25, 0.5});
  CHECK(ex[1].x == Vector{1.0, 0.0});
  CHECK(ex[2].x == Vector{0.75, 0.125});
  CHECK(ex[0].y == 0);  // label "1" appears first
  CHECK(ex[1].y == 1);
  CHECK(s.table().label_names == std::vector<std::string>{"1", "0"});
}

TEST_CASE("scaling none rejects values outside the unit interval") {
  CsvOptions o;
  o.path = write_temp("wide.csv", "0,0.5\n1,3\n");
  o.scaling = Scaling::none;
  CsvStream s(o);
  CHECK(s.next().has_value());
  CHECK_THROWS_AS(s.next(), DataError);
}

TEST_CASE("online minmax uses the running range including the current row") {
  CsvOptions o;
  o.path = write_temp("minmax.csv", "a,7,10\nb,7,20\na,7,15\nb,7,0\n");
  CsvStream s(o);
  const auto ex = drain(s);
  REQUIRE(ex.size() == 4);
  for (const auto& e : ex) CHECK(e.x[0] == 0.0);  // constant column
  CHECK(ex[0].x[1] == 0.0);
  CHECK(ex[1].x[1] == 1.0);
  CHECK(ex[2].x[1] == 0.5);
  CHECK(ex[3].x[1] == 0.0);
}

TEST_CASE("prescan scaling uses the whole file") {
  CsvOptions o;
  o.path = write_temp("prescan.csv", "0,10\n1,20\n0,15\n");
  o.scaling = Scaling::prescan;
  CsvStream s(o);
  const auto ex = drain(s);
  CHECK(ex[0].x[0] == 0.0);
  CHECK(ex[1].x[0] == 1.0);
  CHECK(ex[2].x[0] == 0.5);
}

TEST_CASE("header, delimiter and named label column") {
  CsvOptions o;
  o.path = std::string(ODLAE_TEST_DATA_DIR) + "/tiny.csv";
  o.header = true;
  o.label_column = "label";
  o.scaling = Scaling::none;
  CsvStream s(o);
  CHECK(s.num_features() == 2);
  CHECK(s.num_classes() == 2);
  CHECK(s.size() == 3u);
  CHECK(s.table().column_names.size() == 3);
  const auto ex = drain(s);
  CHECK(ex[0].y == 0);
  CHECK(ex[1].y == 1);
  CHECK(ex[2].y == 0);

  CsvOptions semi;
  semi.path = write_temp("semi.csv", "0.1;x\n0.2;y\n");
  semi.delimiter = ';';
  semi.label_column = "-1";
  semi.scaling = Scaling::none;
  CsvStream t(semi);
  const auto e2 = drain(t);
  CHECK(e2[1].x == Vector{0.2});
  CHECK(e2[1].y == 1);
}

TEST_CASE("malformed rows report their line number") {
  CsvOptions o;
  o.path = write_temp("ragged.csv", "0,1,2\n1,2,3\n0,1\n");
  try {
    load_csv_table(o);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.record() == 3);
  }
  o.path = write_temp("text.csv", "0,1\n1,abc\n");
  try {
    load_csv_table(o);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.record() == 2);
  }
}

TEST_CASE("unknown label column is named in the error") {
  CsvOptions o;
  o.path = std::string(ODLAE_TEST_DATA_DIR) + "/tiny.csv";
  o.header = true;
  o.label_column = "target";
  try {
    load_csv_table(o);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("target") != std::string::npos);
  }
  o.label_column = "9";
  CHECK_THROWS_AS(load_csv_table(o), DataError);
  o.path = "/nonexistent/odlae.csv";
  CHECK_THROWS_AS(load_csv_table(o), DataError);
}

TEST_CASE("synthetic gaussians") {
  SUBCASE("zero variance returns the means") {
    GaussianSpec g;
    g.sigma = 0.0;
    g.classes = 3;
    g.n = 50;
    SyntheticGaussianStream s(g);
    const auto means = s.means();
    for (const auto& e : drain(s)) CHECK(e.x == means[e.y]);
  }
  SUBCASE("means are separation sigma apart") {
    for (std::size_t k : {2u, 3u, 5u}) {
      GaussianSpec g;
      g.classes = k;
      const auto m = gaussian_means(g);
      double dx = m[0][0] - m[1][0], dy = m[0][1] - m[1][1];
      CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(8.0 * 0.05).epsilon(1e-12));
    }
  }
  SUBCASE("bayes error of two classes eight sigma apart is tiny") {
    // Optimal rule splits at the midpoint: error = Phi(-4).
    const double bayes = 0.5 * std::erfc(4.0 / std::sqrt(2.0));
    CHECK(bayes < 1e-4);
  }
  SUBCASE("same seed, same stream; different seed differs") {
    auto a = drain(*gaussians(5));
    auto b = drain(*gaussians(5));
    auto c = drain(*gaussians(6));
    REQUIRE(a.size() == 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].y == b[i].y);
    }
    CHECK(!(a[0].x == c[0].x));
  }
  SUBCASE("values are clamped to the unit interval") {
    GaussianSpec g;
    g.sigma = 2.0;
    g.n = 500;
    SyntheticGaussianStream s(g);
    for (const auto& e : drain(s))
      for (double v : e.x) CHECK((v >= 0.0 && v <= 1.0));
  }
}

TEST_CASE("label swap drift") {
  DriftSpec d;
  d.kind = DriftSpec::Kind::label_swap;
  d.permutation = {1, 0};
  d.at_step = 0;
  DriftStream s(gaussians(3), d);
  const auto base = drain(*gaussians(3));
  const auto drifted = drain(s);
  REQUIRE(drifted.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(drifted[i].x == base[i].x);
    CHECK(drifted[i].y == 1 - base[i].y);
  }
  d.at_step = 100;
  DriftStream late(gaussians(3), d);
  const auto half = drain(late);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(half[i].y == (i < 100 ? base[i].y : 1 - base[i].y));
}

TEST_CASE("feature permutation and its inverse restore the stream") {
  GaussianSpec g;
  g.dim = 5;
  g.n = 100;
  g.seed = 2;
  DriftSpec d;
  d.kind = DriftSpec::Kind::permute_features;
  d.seed = 9;
  auto first = std::make_unique<DriftStream>(std::make_unique<SyntheticGaussianStream>(g), d);
  const auto perm = first->permutation();
  std::vector<std::size_t> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = i;
  DriftSpec undo;
  undo.kind = DriftSpec::Kind::permute_features;
  undo.permutation = inverse;
  DriftStream round(std::move(first), undo);
  SyntheticGaussianStream plain(g);
  const auto a = drain(round), b = drain(plain);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);

  DriftSpec identity;
  identity.kind = DriftSpec::Kind::permute_features;
  identity.permutation = {0, 1, 2, 3, 4};
  DriftStream same(std::make_unique<SyntheticGaussianStream>(g), identity);
  SyntheticGaussianStream plain2(g);
  const auto c = drain(same), e = drain(plain2);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i].x == e[i].x);

  identity.permutation = {0, 0, 2, 3, 4};
  CHECK_THROWS_AS(DriftStream(std::make_unique<SyntheticGaussianStream>(g), identity), ConfigError);
}

TEST_CASE("rotation drift") {
  DriftSpec d;
  d.kind = DriftSpec::Kind::rotate;
  d.seed = 4;
  DriftStream s(gaussians(1), d);
  CHECK(s.angle() > -M_PI);
  CHECK(s.angle() <= M_PI);
  for (const auto& e : drain(s))
    for (double v : e.x) CHECK((v >= 0.0 && v <= 1.0));

  d.angle = M_PI;
  DriftStream half_turn(gaussians(1), d);
  const auto base = drain(*gaussians(1));
  const auto turned = drain(half_turn);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(turned[i].x[0] == doctest::Approx(1.0 - base[i].x[0]).epsilon(1e-12));
    CHECK(turned[i].x[1] == doctest::Approx(1.0 - base[i].x[1]).epsilon(1e-12));
  }

  GaussianSpec g3;
  g3.dim = 3;
  CHECK_THROWS_AS(DriftStream(std::make_unique<SyntheticGaussianStream>(g3), d), ConfigError);
}

TEST_CASE("evaluation noise") {
  auto base = drain(*gaussians(8, 300));
  SUBCASE("policy none is the identity") {
    NoiseStream s(gaussians(8, 300), CorruptionPolicy::none(), 1);
    const auto n = drain(s);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n[i].x == base[i].x);
  }
  SUBCASE("masking everything keeps labels") {
    NoiseStream s(gaussians(8, 300), CorruptionPolicy::masking(1.0), 1);
    const auto n = drain(s);
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(n[i].x == Vector(2, 0.0));
      CHECK(n[i].y == base[i].y);
    }
  }
  SUBCASE("masking rate is close to p") {
    GaussianSpec g;
    g.dim = 100;
    g.n = 1000;
    g.sigma = 0.0;
    NoiseStream s(std::make_unique<SyntheticGaussianStream>(g), CorruptionPolicy::masking(0.1), 3);
    std::size_t zeros = 0, total = 0;
    for (const auto& e : drain(s))
      for (double v : e.x) zeros += v == 0.0, ++total;
    const double rate = static_cast<double>(zeros) / static_cast<double>(total);
    CHECK(std::fabs(rate - 0.1) <= 0.005);
  }
}

TEST_CASE("skip advances the position") {
  auto s = gaussians(2);
  s->skip(50);
  CHECK(s->position() == 50);
  const auto rest = drain(*s);
  CHECK(rest.size() == 150);
  const auto all = drain(*gaussians(2));
  CHECK(rest[0].x == all[50].x);
}

TEST_CASE("make_stream layers drift then noise") {
  StreamSpec spec;
  spec.gaussian.n = 20;
  spec.gaussian.seed = 4;
  spec.drift = DriftSpec{};
  spec.drift->permutation = {1, 0};
  spec.eval_noise = CorruptionPolicy::masking(1.0);
  auto s = make_stream(spec);
  const auto base = drain(*gaussians(4, 20));
  const auto out = drain(*s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].y == 1 - base[i].y);
    CHECK(out[i].x == Vector(2, 0.0));
  }
}
