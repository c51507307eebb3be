#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "causal/causality.hpp"

namespace causal {

enum class Direction { Causes, Effects };
enum class WeighMode { Full, Bool };

std::string to_string(Direction d);
std::string to_string(WeighMode m);
Direction parse_direction(const std::string& s);
WeighMode parse_mode(const std::string& s);

struct FactorConfig {
  Direction direction = Direction::Causes;
  WeighMode mode = WeighMode::Full;
};

/// Per-feature multipliers. Full mode holds integer counts in [0, k-1],
/// bool mode holds {0, 1}.
struct FactorVector {
  std::vector<double> weights;
  FactorConfig config;

  std::size_t size() const noexcept { return weights.size(); }
};

struct CauseEffectCounts {
  std::vector<int> causes;
  std::vector<int> effects;
};

/// Feature i causes j when cmap(i, j) > cmap(j, i), strictly; exact ties
/// count for neither side. Evaluated with the upper/lower triangle
/// comparison layout.
CauseEffectCounts count_causes_effects(const CausalityMap& cmap);

/// Rectified difference of the two counts (causes - effects for the causes
/// direction, the reverse for effects), thresholded to {0, 1} in bool mode.
FactorVector extract_factors(const CausalityMap& cmap, const FactorConfig& cfg);

/// Random factors for the ablation networks: uniform over {0..k-1} in full
/// mode, over {0, 1} in bool mode. Deterministic in `seed`.
FactorVector damaged_factors(std::size_t k, WeighMode mode, std::uint64_t seed);

}  // namespace causal
