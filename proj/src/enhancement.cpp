#include "causal/enhancement.hpp"

#include "causal/error.hpp"
#include "causal/rng.hpp"

namespace causal {

std::string to_string(Layout l) {
  switch (l) {
    case Layout::Baseline: return "baseline";
    case Layout::Cat: return "cat";
    case Layout::Mulcat: return "mulcat";
    case Layout::Cab: return "cab";
  }
  return "?";
}

std::size_t layout_width(Layout layout, std::size_t k, std::size_t n) {
  const std::size_t features = k * n * n;
  switch (layout) {
    case Layout::Baseline: return features;
    case Layout::Cat: return features + k * k;
    case Layout::Mulcat: return 2 * features;
    case Layout::Cab: return features;
  }
  return 0;
}

namespace {

void check_factors(const FeatureStack& stack, const FactorVector& factors) {
  if (factors.size() != stack.k()) {
    throw Error(ErrorKind::ShapeMismatch, "factor vector has " + std::to_string(factors.size()) +
                                              " entries for " + std::to_string(stack.k()) +
                                              " feature maps");
  }
}

}  // namespace

EnhancedFeatures enhance_baseline(const FeatureStack& stack) {
  const auto v = stack.values();
  return {Layout::Baseline, stack.k(), stack.n(), std::vector<double>(v.begin(), v.end())};
}

EnhancedFeatures enhance_cat(const FeatureStack& stack, const CausalityMap& cmap) {
  if (cmap.k() != stack.k()) {
    throw Error(ErrorKind::ShapeMismatch, "causality map side " + std::to_string(cmap.k()) +
                                              " does not match k = " + std::to_string(stack.k()));
  }
  EnhancedFeatures out{Layout::Cat, stack.k(), stack.n(), {}};
  out.payload.reserve(layout_width(Layout::Cat, stack.k(), stack.n()));
  out.payload.assign(stack.values().begin(), stack.values().end());
  out.payload.insert(out.payload.end(), cmap.entries().begin(), cmap.entries().end());
  return out;
}

EnhancedFeatures enhance_mulcat(const FeatureStack& stack, const FactorVector& factors) {
  check_factors(stack, factors);
  EnhancedFeatures out{Layout::Mulcat, stack.k(), stack.n(), {}};
  out.payload.reserve(layout_width(Layout::Mulcat, stack.k(), stack.n()));
  out.payload.assign(stack.values().begin(), stack.values().end());
  for (std::size_t i = 0; i < stack.k(); ++i) {
    for (double v : stack.map(i)) out.payload.push_back(factors.weights[i] * v);
  }
  return out;
}

std::vector<double> cab_gains(const FactorVector& factors) {
  const double scale = static_cast<double>(factors.size()) - 1.0;
  std::vector<double> gains(factors.size());
  for (std::size_t i = 0; i < gains.size(); ++i) gains[i] = 1.0 + factors.weights[i] / scale;
  return gains;
}

EnhancedFeatures enhance_cab(const FeatureStack& stack, const FactorVector& factors) {
  check_factors(stack, factors);
  const double scale = static_cast<double>(stack.k()) - 1.0;
  EnhancedFeatures out{Layout::Cab, stack.k(), stack.n(), {}};
  out.payload.reserve(stack.values().size());
  for (std::size_t i = 0; i < stack.k(); ++i) {
    const double rescaled = factors.weights[i] / scale;
    for (double v : stack.map(i)) out.payload.push_back(v + rescaled * v);
  }
  return out;
}

CausalityMap random_causality_map(std::size_t k, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> entries(k * k);
  for (double& v : entries) v = rng.uniform();
  return CausalityMap(k, std::move(entries), Estimator::Max);
}

EnhancedFeatures damaged_cat(const FeatureStack& stack, std::uint64_t seed) {
  return enhance_cat(stack, random_causality_map(stack.k(), seed));
}

}  // namespace causal
