#include "odlae/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "odlae/errors.hpp"

namespace odlae {

CorruptionPolicy CorruptionPolicy::parse(const std::string& text) {
  if (text == "none" || text.empty()) return none();
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ConfigError("corruption policy '" + text + "': expected none, mask:<p> or gauss:<sigma>");
  }
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("corruption policy '" + text + "': bad numeric parameter");
  }
  CorruptionPolicy p;
  if (kind == "mask" || kind == "masking") {
    p = masking(value);
  } else if (kind == "gauss" || kind == "gaussian") {
    p = gaussian(value);
  } else {
    throw ConfigError("corruption policy '" + text + "': unknown kind '" + kind + "'");
  }
  p.validate();
  return p;
}

std::string CorruptionPolicy::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::none: return "none";
    case Kind::masking: os << "mask:" << rate; break;
    case Kind::gaussian: os << "gauss:" << sigma; break;
  }
  return os.str();
}

void CorruptionPolicy::validate() const {
  if (kind == Kind::masking && !(rate >= 0.0 && rate <= 1.0)) {
    throw ConfigError("masking rate must lie in [0, 1]");
  }
  if (kind == Kind::gaussian && !(sigma >= 0.0 && std::isfinite(sigma))) {
    throw ConfigError("gaussian sigma must be finite and non-negative");
  }
}

Vector corrupt(std::span<const double> x, const CorruptionPolicy& policy, Rng& rng) {
  policy.validate();
  Vector out(x);
  switch (policy.kind) {
    case CorruptionPolicy::Kind::none:
      break;
    case CorruptionPolicy::Kind::masking:
      for (auto& v : out)
        if (rng.uniform() < policy.rate) v = 0.0;
      break;
    case CorruptionPolicy::Kind::gaussian:
      for (auto& v : out) v = std::clamp(v + policy.sigma * rng.normal(), 0.0, 1.0);
      break;
  }
  return out;
}

}  // namespace odlae
