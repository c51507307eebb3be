#include "causal/factors.hpp"

#include <algorithm>

#include "causal/error.hpp"
#include "causal/rng.hpp"

namespace causal {

std::string to_string(Direction d) { return d == Direction::Causes ? "causes" : "effects"; }
std::string to_string(WeighMode m) { return m == WeighMode::Full ? "full" : "bool"; }

Direction parse_direction(const std::string& s) {
  if (s == "causes") return Direction::Causes;
  if (s == "effects") return Direction::Effects;
  throw Error(ErrorKind::InvalidInput, "unknown direction '" + s + "' (expected causes|effects)");
}

WeighMode parse_mode(const std::string& s) {
  if (s == "full") return WeighMode::Full;
  if (s == "bool") return WeighMode::Bool;
  throw Error(ErrorKind::InvalidInput, "unknown mode '" + s + "' (expected full|bool)");
}

CauseEffectCounts count_causes_effects(const CausalityMap& cmap) {
  const std::size_t k = cmap.k();
  // upper(i, j) = cmap(i, j) and lower(i, j) = cmap(j, i), both for j > i.
  std::vector<double> upper(k * k, 0.0);
  std::vector<double> lower(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      upper[i * k + j] = cmap(i, j);
      lower[i * k + j] = cmap(j, i);
    }
  }
  // edges(a, b) = 1 iff a -> b. The strict upper triangle records i -> j,
  // the transposed lower comparison records j -> i.
  std::vector<int> edges(k * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      edges[i * k + j] += upper[i * k + j] > lower[i * k + j] ? 1 : 0;
      edges[j * k + i] += lower[i * k + j] > upper[i * k + j] ? 1 : 0;
    }
  }
  CauseEffectCounts out{std::vector<int>(k, 0), std::vector<int>(k, 0)};
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      out.causes[a] += edges[a * k + b];   // row sums
      out.effects[b] += edges[a * k + b];  // column sums
    }
  }
  return out;
}

FactorVector extract_factors(const CausalityMap& cmap, const FactorConfig& cfg) {
  const CauseEffectCounts counts = count_causes_effects(cmap);
  FactorVector out{std::vector<double>(cmap.k(), 0.0), cfg};
  for (std::size_t i = 0; i < cmap.k(); ++i) {
    const int diff = cfg.direction == Direction::Causes ? counts.causes[i] - counts.effects[i]
                                                        : counts.effects[i] - counts.causes[i];
    double w = std::max(diff, 0);
    if (cfg.mode == WeighMode::Bool) w = w > 0 ? 1.0 : 0.0;
    out.weights[i] = w;
  }
  return out;
}

FactorVector damaged_factors(std::size_t k, WeighMode mode, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidInput, "damaged factors need k >= 2");
  SplitMix64 rng(seed);
  const std::uint64_t range = mode == WeighMode::Full ? k : 2;
  FactorVector out{std::vector<double>(k), FactorConfig{Direction::Causes, mode}};
  for (double& w : out.weights) w = static_cast<double>(rng.below(range));
  return out;
}

}  // namespace causal
