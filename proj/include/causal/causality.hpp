#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace causal {

/// k non-negative n x n feature maps, stored map-major then row-major.
class FeatureStack {
 public:
  /// Throws InvalidInput unless k >= 2, n >= 1, values.size() == k*n*n and
  /// every value is finite and non-negative.
  FeatureStack(std::size_t k, std::size_t n, std::vector<double> values);

  std::size_t k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t map_size() const noexcept { return n_ * n_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> map(std::size_t i) const noexcept {
    return std::span<const double>(values_).subspan(i * map_size(), map_size());
  }
  double at(std::size_t i, std::size_t r, std::size_t c) const noexcept {
    return values_[(i * n_ + r) * n_ + c];
  }

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<double> values_;
};

enum class Estimator { Max, Lehmer };

std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& s);

struct EstimatorConfig {
  Estimator method = Estimator::Max;
  double lehmer_p = 0.0;
  double epsilon = 1e-12;

  /// Throws InvalidInput when epsilon <= 0 or lehmer_p is not finite.
  void validate() const;
};

/// k x k matrix of conditional-probability estimates; entry (i, j)
/// estimates P(F^i | F^j).
class CausalityMap {
 public:
  CausalityMap(std::size_t k, std::vector<double> entries, Estimator method = Estimator::Max);

  std::size_t k() const noexcept { return k_; }
  Estimator method() const noexcept { return method_; }
  std::span<const double> entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * k_ + j]; }

 private:
  std::size_t k_;
  std::vector<double> entries_;
  Estimator method_;
};

/// Divides the stack by its global maximum. Throws ZeroStack if that maximum is 0.
FeatureStack normalize_stack(const FeatureStack& stack);

/// Generalized Lehmer mean sum(x^(p+1)) / sum(x^p).
///
/// For p < 0 or p + 1 < 0 every element below `epsilon` is raised to
/// `epsilon` first. The power sums are evaluated relative to the extreme
/// element that dominates them (the minimum for p < 0, the maximum
/// otherwise), which is algebraically identical to the plain ratio but
/// stays finite for |p| in the hundreds.
///
/// Throws EmptyVector on empty input and NumericOverflow if the result is
/// not finite.
double lehmer_mean(std::span<const double> x, double p, double epsilon = 1e-12);

/// Normalizes the stack by its global maximum, then fills every (i, j)
/// entry, diagonal included, with the configured estimator:
///
///   Max:    max(F^i) * max(F^j) / sum(F^j)
///   Lehmer: LM_p(F^i x F^j) / LM_p(F^j)
///
/// where F^i x F^j is the n^4 vector of pairwise element products. The
/// Lehmer numerator is never materialized: power sums of an outer product
/// factor into products of per-map power sums, and clamped products are
/// counted separately. Denominators below epsilon are replaced by epsilon.
CausalityMap compute_causality_map(const FeatureStack& stack, const EstimatorConfig& cfg);

}  // namespace causal
