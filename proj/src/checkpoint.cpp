#include "odlae/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "odlae/errors.hpp"

namespace odlae {

namespace {

constexpr char kEvalMagic[4] = {'E', 'V', 'A', 'L'};
constexpr std::uint32_t kMaxDim = 1u << 28;

template <typename T>
T to_le(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    T out;
    auto* src = reinterpret_cast<const unsigned char*>(&v);
    auto* dst = reinterpret_cast<unsigned char*>(&out);
    for (std::size_t i = 0; i < sizeof(T); ++i) dst[i] = src[sizeof(T) - 1 - i];
    return out;
  } else {
    return v;
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  template <typename T>
  void le(T v) {
    v = to_le(v);
    bytes(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void u8(std::uint8_t v) { le(v); }
  void u16(std::uint16_t v) { le(v); }
  void u32(std::uint64_t v) {
    if (v > 0xffffffffu) throw FormatError("checkpoint field exceeds 32 bits");
    le(static_cast<std::uint32_t>(v));
  }
  void u64(std::uint64_t v) { le(v); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void tensor(const Matrix& m) {
    u32(m.rows());
    u32(m.cols());
    for (double v : m.span()) f64(v);
  }
  void vec(std::span<const double> v) {
    u32(v.size());
    for (double x : v) f64(x);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("checkpoint is truncated");
  }
  template <typename T>
  T le() {
    T v;
    bytes(reinterpret_cast<char*>(&v), sizeof v);
    return to_le(v);
  }
  std::uint8_t u8() { return le<std::uint8_t>(); }
  std::uint16_t u16() { return le<std::uint16_t>(); }
  std::uint32_t u32() { return le<std::uint32_t>(); }
  std::uint64_t u64() { return le<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::uint32_t dim() {
    const auto d = u32();
    if (d > kMaxDim) throw FormatError("checkpoint dimension " + std::to_string(d) + " is implausible");
    return d;
  }
  Matrix tensor() {
    const std::size_t r = dim();
    const std::size_t c = dim();
    if (r != 0 && c > kMaxDim / r) throw FormatError("checkpoint tensor is implausibly large");
    std::vector<double> v(r * c);
    for (auto& x : v) x = f64();
    return Matrix(r, c, std::move(v));
  }
  std::vector<double> vec() {
    std::vector<double> v(dim());
    for (auto& x : v) x = f64();
    return v;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
};

// Number of parameter tensors the variant's parameters() exposes.
std::size_t tensor_count(const ModelConfig& c) {
  if (c.variant == Variant::linear_ogd_baseline) return 2;
  const std::size_t backbone = 4 * c.dims.hidden_layers();
  return backbone + (uses_attention(c.variant) ? 4 : 2 * c.dims.hidden_layers());
}

void write_tradeoff(Writer& w, const TradeoffState& t) {
  w.f64(t.a_re);
  w.f64(t.a_pre);
  w.f64(t.beta_re);
  w.f64(t.beta_pre);
}

TradeoffState read_tradeoff(Reader& r) {
  TradeoffState t;
  t.a_re = r.f64();
  t.a_pre = r.f64();
  t.beta_re = r.f64();
  t.beta_pre = r.f64();
  return t;
}

}  // namespace

void write_snapshot(std::ostream& out, const ModelSnapshot& s) {
  Writer w(out);
  const ModelConfig& c = s.config;
  w.bytes(kCheckpointMagic, 4);
  w.u16(kCheckpointVersion);
  w.u8(static_cast<std::uint8_t>(c.variant));
  w.u32(c.dims.input_dim);
  w.u32(c.dims.hidden_dim);
  w.u32(c.dims.output_dim);
  w.u32(c.dims.last_hidden);
  w.u32(c.dims.attention_dim);

  w.u8(static_cast<std::uint8_t>(c.output_activation));
  w.u8(static_cast<std::uint8_t>(c.optimizer.kind));
  w.f64(c.optimizer.learning_rate);
  w.f64(c.optimizer.beta1);
  w.f64(c.optimizer.beta2);
  w.f64(c.optimizer.epsilon);
  w.f64(c.theta0);
  w.f64(c.beta_floor);
  write_tradeoff(w, c.tradeoff);
  w.u8(c.adaptive_tradeoff ? 1 : 0);
  w.u8(static_cast<std::uint8_t>(c.corruption.kind));
  w.f64(c.corruption.rate);
  w.f64(c.corruption.sigma);
  w.u64(c.seed);

  if (s.tensors.size() != tensor_count(c)) throw FormatError("snapshot has the wrong tensor count");
  w.u32(s.tensors.size());
  for (const auto& t : s.tensors) w.tensor(t);
  w.vec(s.hedge_beta.span());
  write_tradeoff(w, s.tradeoff);
  w.u64(s.steps);
  w.u64(s.optimizer_steps);
  w.u64(s.corruption_rng.seed());
  w.u64(s.corruption_rng.counter());

  w.u64(s.adam.step);
  w.u32(s.adam.first_moment.size());
  for (const auto& m : s.adam.first_moment) w.vec(m);
  for (const auto& m : s.adam.second_moment) w.vec(m);
}

ModelSnapshot read_snapshot(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) throw FormatError("not an odlae checkpoint (bad magic)");
  const auto version = r.u16();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) +
                      " is incompatible with this build (expects " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  ModelSnapshot s;
  ModelConfig& c = s.config;
  const auto tag = r.u8();
  if (tag < 1 || tag > 5) throw FormatError("unknown variant tag " + std::to_string(tag));
  c.variant = static_cast<Variant>(tag);
  c.dims.input_dim = r.dim();
  c.dims.hidden_dim = r.dim();
  c.dims.output_dim = r.dim();
  c.dims.last_hidden = r.dim();
  c.dims.attention_dim = r.dim();

  const auto act = r.u8();
  if (act > static_cast<std::uint8_t>(Activation::tanh)) throw FormatError("bad activation code");
  c.output_activation = static_cast<Activation>(act);
  const auto opt = r.u8();
  if (opt > 1) throw FormatError("bad optimizer code");
  c.optimizer.kind = static_cast<OptimizerConfig::Kind>(opt);
  c.optimizer.learning_rate = r.f64();
  c.optimizer.beta1 = r.f64();
  c.optimizer.beta2 = r.f64();
  c.optimizer.epsilon = r.f64();
  c.theta0 = r.f64();
  c.beta_floor = r.f64();
  c.tradeoff = read_tradeoff(r);
  c.adaptive_tradeoff = r.u8() != 0;
  const auto ck = r.u8();
  if (ck > 2) throw FormatError("bad corruption code");
  c.corruption.kind = static_cast<CorruptionPolicy::Kind>(ck);
  c.corruption.rate = r.f64();
  c.corruption.sigma = r.f64();
  c.seed = r.u64();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint holds an invalid configuration: ") + e.what());
  }

  const auto n = r.u32();
  if (n != tensor_count(c)) throw FormatError("checkpoint has the wrong number of tensors");
  for (std::uint32_t i = 0; i < n; ++i) s.tensors.push_back(r.tensor());
  s.hedge_beta = Vector(r.vec());
  s.tradeoff = read_tradeoff(r);
  s.steps = r.u64();
  s.optimizer_steps = r.u64();
  const auto rng_seed = r.u64();
  const auto rng_counter = r.u64();
  s.corruption_rng = Rng(rng_seed, rng_counter);

  s.adam.step = r.u64();
  const auto moments = r.u32();
  if (moments != 0 && moments != n) throw FormatError("checkpoint adam moments do not mirror the parameters");
  for (std::uint32_t i = 0; i < moments; ++i) s.adam.first_moment.push_back(r.vec());
  for (std::uint32_t i = 0; i < moments; ++i) s.adam.second_moment.push_back(r.vec());
  return s;
}

void save_checkpoint(const std::string& path, const ModelSnapshot& model,
                     const EvaluatorState* evaluator) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write checkpoint " + path);
  write_snapshot(out, model);
  if (evaluator) {
    Writer w(out);
    const auto& cm = evaluator->confusion;
    w.bytes(kEvalMagic, 4);
    w.u32(cm.classes());
    for (auto v : cm.counts()) w.u64(v);
    w.u64(evaluator->window);
    w.u64(evaluator->window_correct);
    w.u32(evaluator->windows.size());
    for (const auto& win : evaluator->windows) {
      w.u64(win.end_t);
      w.f64(win.accuracy);
    }
  }
  out.flush();
  if (!out) throw FormatError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path);
  Checkpoint cp{read_snapshot(in), std::nullopt};
  Reader r(in);
  if (r.at_end()) return cp;
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kEvalMagic, 4) != 0) throw FormatError("unknown trailing section in checkpoint");
  EvaluatorState st;
  const std::size_t k = r.dim();
  std::vector<std::uint64_t> counts(k * k);
  for (auto& v : counts) v = r.u64();
  st.confusion = ConfusionMatrix(k, std::move(counts));
  st.window = r.u64();
  st.window_correct = r.u64();
  const auto nw = r.dim();
  for (std::uint32_t i = 0; i < nw; ++i) {
    WindowAccuracy w;
    w.end_t = r.u64();
    w.accuracy = r.f64();
    st.windows.push_back(w);
  }
  if (!r.at_end()) throw FormatError("checkpoint has trailing bytes");
  cp.evaluator = std::move(st);
  return cp;
}

}  // namespace odlae
