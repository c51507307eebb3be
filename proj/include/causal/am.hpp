#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causal/image.hpp"

namespace causal {

/// A scalar and its gradient with respect to the image it was evaluated on.
struct LossGrad {
  double value = 0.0;
  Image grad;
};

struct ScoreResult {
  double activation = 0.0;
  Image gradient;
};

/// Anything differentiable that maps an image to the activation to maximize.
using Scorer = std::function<ScoreResult(const Image&)>;

/// A penalty subtracted during ascent, scaled by `weight`.
struct Regularizer {
  std::string name;
  double weight = 0.0;
  std::function<LossGrad(const Image&)> loss;
};

/// Weights of the histogram, noise, symmetry and frequency priors, in the
/// order they appear in the total objective.
struct PriorWeights {
  double histogram = 0.0;
  double noise = 0.0;
  double symmetry = 0.0;
  double frequency = 0.0;
};

struct AmConfig {
  double step_size = 0.1;
  int iterations = 100;
  int jitter_px = 0;
  int blur_every = 0;   // 0 disables blurring
  int prior_every = 1;  // regularizers are applied on iterations t % prior_every == 0
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  std::uint64_t seed = 0;
  PriorWeights prior_weights;

  // Soft histogram: bin range and probability floor.
  double hist_lo = 0.0;
  double hist_hi = 1.0;
  double hist_epsilon = 1e-8;
  // Spectrum magnitudes below this are held at it.
  double spectrum_epsilon = 1e-12;

  static constexpr int pool_kernel = 5;
  static constexpr int pool_stride = 1;
  static constexpr int pool_padding = 2;

  void validate() const;
};

struct AmTraceRow {
  int iteration = 0;
  double activation = 0.0;
  double regularizer = 0.0;
};

struct AmResult {
  Image image;
  std::vector<AmTraceRow> trace;
};

/// Regularized gradient ascent on the input:
///
///   X <- X + step * da/dX - sum_r weight_r * dr/dX
///
/// Each iteration circularly shifts X by up to jitter_px before scoring and
/// shifts the gradient back, blurs with a 3x3 box every blur_every
/// iterations, and resets any pixel outside [clip_lo, clip_hi] to a uniform
/// in-range draw. Deterministic in cfg.seed.
///
/// Throws NonFiniteGradient (index() = iteration) when the scorer or a
/// regularizer produces a non-finite value.
AmResult am_run(const Scorer& scorer, const Image& init, const AmConfig& cfg,
                std::span<const Regularizer> regularizers = {});

/// Mean over left-half pixels of (I_left - mirror(I_right))^2. For odd
/// widths the center column is excluded.
LossGrad symmetry_loss(const Image& img);

/// Symmetric KL divergence 0.5 * (KL(h || t) + KL(t || h)) between a
/// triangular-kernel soft histogram of the pixels and `target`. Bin count is
/// target.size(); both distributions are floored at `epsilon` and
/// renormalized. Throws DegenerateTarget on negative bins or a target that
/// does not sum to 1 within 1e-9.
LossGrad histogram_loss(const Image& img, std::span<const double> target, double lo = 0.0,
                        double hi = 1.0, double epsilon = 1e-8);

/// Soft histogram (before flooring) with `bins` bins over [lo, hi].
std::vector<double> soft_histogram(const Image& img, std::size_t bins, double lo = 0.0,
                                   double hi = 1.0);

/// Mean over pixels of (mu - var)^2, with mu = AvgPool(I) and
/// var = AvgPool(I^2) - mu^2 from a zero-padded 5x5, stride-1 pool whose
/// divisor is always 25. Channels are pooled independently.
LossGrad noise_loss(const Image& img);

/// (1/N) * sum over all N DFT bins of (|DFT2(I)| - |DFT2(ref)|)^2, per
/// channel. Bins with |DFT2(I)| < epsilon use epsilon and pass no gradient.
/// ShapeMismatch when shapes differ.
LossGrad frequency_loss(const Image& img, const Image& reference, double epsilon = 1e-12);

struct PriorTargets {
  std::vector<double> histogram;
  std::optional<Image> reference;
};

/// Weighted sum of the four prior terms; terms with zero weight are skipped
/// and need no target.
LossGrad combined_prior_loss(const Image& img, const AmConfig& cfg, const PriorTargets& targets);

/// One Regularizer per prior with a non-zero weight in cfg.prior_weights.
std::vector<Regularizer> prior_regularizers(const AmConfig& cfg, const PriorTargets& targets);

/// a(X) = -||X - target||^2, maximized at X = target.
Scorer quadratic_scorer(Image target);

}  // namespace causal
