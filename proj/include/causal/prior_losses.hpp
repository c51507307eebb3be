#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "causal/causality.hpp"

namespace causal {

/// n_c x h class embeddings, row-major.
class EmbeddingSet {
 public:
  EmbeddingSet(std::size_t classes, std::size_t hidden, std::vector<double> rows);

  std::size_t classes() const noexcept { return classes_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::span<const double> values() const noexcept { return rows_; }
  std::span<const double> row(std::size_t c) const noexcept {
    return std::span<const double>(rows_).subspan(c * hidden_, hidden_);
  }

 private:
  std::size_t classes_;
  std::size_t hidden_;
  std::vector<double> rows_;
};

/// Ground-truth n_c x n_c map with entries in [0, 1].
class PriorMap {
 public:
  PriorMap(std::size_t classes, std::vector<double> entries);

  std::size_t classes() const noexcept { return classes_; }
  std::span<const double> entries() const noexcept { return entries_; }

 private:
  std::size_t classes_;
  std::vector<double> entries_;
};

/// Reads n_c header-less rows of n_c comma-separated reals.
PriorMap read_prior_map(std::istream& in);
void write_prior_map(std::ostream& out, const PriorMap& map);

/// Max-style estimator over 1-D embedding rows after dividing the whole set
/// by its global maximum: entry (i, j) = max(Q^i) * max(Q^j) / sum(Q^j).
/// Negative embedding values are rejected (InvalidInput); ZeroStack when
/// the global maximum is 0.
CausalityMap embedding_causality_map(const EmbeddingSet& q, double epsilon = 1e-12);

/// Mean squared difference between a learned map and the prior, times
/// `weight`. Non-negative by construction.
double task_prior_loss(const CausalityMap& c, const PriorMap& c_gt, double weight = 1.0);

/// (1/B) * sum_i ||M_i - mean_{j in class(i)} M_j||_F^2.
/// Throws EmptyBatch for B = 0 and ShapeMismatch on ragged inputs.
double minibatch_alignment_loss(std::span<const CausalityMap> maps, std::span<const int> labels);

/// Per-site losses / weights in {V1, PFC, IT} order.
using SiteValues = std::array<double, 3>;

inline constexpr SiteValues kDefaultSiteWeights{0.7, 0.5, 0.1};

double weighted_total_alignment(const SiteValues& losses,
                                const SiteValues& weights = kDefaultSiteWeights);

}  // namespace causal
