#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "causal/causality.hpp"
#include "causal/factors.hpp"

namespace causal {

enum class Layout { Baseline, Cat, Mulcat, Cab };

std::string to_string(Layout l);

/// Payload length for a layout: k*n^2, k*n^2 + k^2, 2*k*n^2 and k*n^2.
std::size_t layout_width(Layout layout, std::size_t k, std::size_t n);

/// Flat classifier input. Original features always come first, in the
/// stack's map-major row-major order; any appended block follows.
struct EnhancedFeatures {
  Layout layout;
  std::size_t k;
  std::size_t n;
  std::vector<double> payload;
};

EnhancedFeatures enhance_baseline(const FeatureStack& stack);

/// flatten(stack) ++ flatten(cmap). ShapeMismatch when cmap.k() != stack.k().
EnhancedFeatures enhance_cat(const FeatureStack& stack, const CausalityMap& cmap);

/// flatten(stack) ++ flatten(factors[i] * F^i). The stack is weighted as
/// given; no normalization happens here.
EnhancedFeatures enhance_mulcat(const FeatureStack& stack, const FactorVector& factors);

/// Shape-preserving: map i becomes F^i * (1 + factors[i] / (k - 1)).
EnhancedFeatures enhance_cab(const FeatureStack& stack, const FactorVector& factors);

/// Per-map gain applied by enhance_cab.
std::vector<double> cab_gains(const FactorVector& factors);

/// A k x k map of independent uniform [0, 1) draws.
CausalityMap random_causality_map(std::size_t k, std::uint64_t seed);

/// enhance_cat with random_causality_map(k, seed) in place of the real map.
EnhancedFeatures damaged_cat(const FeatureStack& stack, std::uint64_t seed);

}  // namespace causal
