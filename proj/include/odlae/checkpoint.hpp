#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "odlae/evaluate.hpp"
#include "odlae/model.hpp"

namespace odlae {

inline constexpr char kCheckpointMagic[4] = {'O', 'D', 'L', 'A'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

// Binary, little-endian; layout documented in docs/checkpoint_format.md.
void write_snapshot(std::ostream& out, const ModelSnapshot& s);
ModelSnapshot read_snapshot(std::istream& in);

struct Checkpoint {
  ModelSnapshot model;
  std::optional<EvaluatorState> evaluator;
};

void save_checkpoint(const std::string& path, const ModelSnapshot& model,
                     const EvaluatorState* evaluator = nullptr);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace odlae
