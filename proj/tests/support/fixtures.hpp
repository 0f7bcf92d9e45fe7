#pragma once

#include <vector>

#include "odlae/model.hpp"
#include "odlae/rng.hpp"

namespace fixtures {

inline odlae::ModelConfig config(odlae::Variant v, std::size_t dx = 6, std::size_t dh = 4,
                                 std::size_t dy = 3, std::size_t last_hidden = 2,
                                 std::uint64_t seed = 1) {
  odlae::ModelConfig c;
  c.variant = v;
  c.dims.input_dim = dx;
  c.dims.hidden_dim = dh;
  c.dims.output_dim = dy;
  c.dims.last_hidden = last_hidden;
  c.dims.attention_dim = 5;
  c.seed = seed;
  return c;
}

inline odlae::Vector unit_vector(odlae::Rng& rng, std::size_t n) {
  odlae::Vector x(n);
  for (auto& v : x) v = rng.uniform();
  return x;
}

inline std::vector<std::vector<double>> copy_params(odlae::OnlineModel& m) {
  std::vector<std::vector<double>> out;
  for (auto v : m.parameters()) out.emplace_back(v.begin(), v.end());
  return out;
}

}  // namespace fixtures
