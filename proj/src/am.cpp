#include "causal/am.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "causal/error.hpp"
#include "causal/rng.hpp"

namespace causal {

void AmConfig::validate() const {
  if (!(step_size > 0.0)) throw Error(ErrorKind::InvalidInput, "step_size must be positive");
  if (iterations < 0) throw Error(ErrorKind::InvalidInput, "iterations must be non-negative");
  if (jitter_px < 0 || blur_every < 0) {
    throw Error(ErrorKind::InvalidInput, "jitter_px and blur_every must be non-negative");
  }
  if (prior_every < 1) throw Error(ErrorKind::InvalidInput, "prior_every must be >= 1");
  if (!(clip_lo < clip_hi)) throw Error(ErrorKind::InvalidInput, "clip_lo must be below clip_hi");
  if (!(hist_lo < hist_hi)) throw Error(ErrorKind::InvalidInput, "hist_lo must be below hist_hi");
  const PriorWeights& w = prior_weights;
  if (w.histogram < 0 || w.noise < 0 || w.symmetry < 0 || w.frequency < 0) {
    throw Error(ErrorKind::InvalidInput, "prior weights must be non-negative");
  }
}

namespace {

bool all_finite(const Image& img) {
  for (double v : img.pixels()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

AmResult am_run(const Scorer& scorer, const Image& init, const AmConfig& cfg,
                std::span<const Regularizer> regularizers) {
  cfg.validate();
  SplitMix64 jitter_rng(derive_seed(cfg.seed, 1));
  SplitMix64 clip_rng(derive_seed(cfg.seed, 2));

  AmResult result{init, {}};
  Image& x = result.image;
  result.trace.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int t = 0; t < cfg.iterations; ++t) {
    long dy = 0;
    long dx = 0;
    if (cfg.jitter_px > 0) {
      const auto span = static_cast<std::uint64_t>(2 * cfg.jitter_px + 1);
      dy = static_cast<long>(jitter_rng.below(span)) - cfg.jitter_px;
      dx = static_cast<long>(jitter_rng.below(span)) - cfg.jitter_px;
    }
    ScoreResult score = scorer(dy || dx ? circular_shift(x, dy, dx) : x);
    if (!score.gradient.same_shape(x)) {
      throw Error(ErrorKind::ShapeMismatch, "scorer gradient shape differs from its input");
    }
    if (!std::isfinite(score.activation) || !all_finite(score.gradient)) {
      throw Error(ErrorKind::NonFiniteGradient,
                  "scorer returned a non-finite value at iteration " + std::to_string(t), t);
    }
    const Image grad = dy || dx ? circular_shift(score.gradient, -dy, -dx) : score.gradient;

    Image penalty(x.height(), x.width(), x.channels());
    double reg_total = 0.0;
    if (!regularizers.empty() && t % cfg.prior_every == 0) {
      for (const Regularizer& r : regularizers) {
        const LossGrad lg = r.loss(x);
        if (!std::isfinite(lg.value) || !all_finite(lg.grad)) {
          throw Error(ErrorKind::NonFiniteGradient,
                      "regularizer '" + r.name + "' is not finite at iteration " + std::to_string(t), t);
        }
        reg_total += r.weight * lg.value;
        for (std::size_t i = 0; i < penalty.size(); ++i) penalty[i] += r.weight * lg.grad[i];
      }
    }

    for (std::size_t i = 0; i < x.size(); ++i) x[i] += cfg.step_size * grad[i] - penalty[i];
    if (cfg.blur_every > 0 && (t + 1) % cfg.blur_every == 0) x = box_blur3(x);
    for (double& v : x.pixels()) {
      if (v < cfg.clip_lo || v > cfg.clip_hi) v = clip_rng.uniform(cfg.clip_lo, cfg.clip_hi);
    }
    result.trace.push_back({t, score.activation, reg_total});
  }
  return result;
}

LossGrad symmetry_loss(const Image& img) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t ch = img.channels();
  const std::size_t half = w / 2;
  LossGrad out{0.0, Image(h, w, ch)};
  if (half == 0) return out;
  const double count = static_cast<double>(h * half * ch);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < half; ++c) {
      const std::size_t mirror = w - 1 - c;
      for (std::size_t k = 0; k < ch; ++k) {
        const double d = img.at(r, c, k) - img.at(r, mirror, k);
        out.value += d * d;
        out.grad.at(r, c, k) += 2.0 * d / count;
        out.grad.at(r, mirror, k) -= 2.0 * d / count;
      }
    }
  }
  out.value /= count;
  return out;
}

std::vector<double> soft_histogram(const Image& img, std::size_t bins, double lo, double hi) {
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> hist(bins, 0.0);
  for (double v : img.pixels()) {
    // position in bin-center units: center of bin b sits at b
    const double pos = (v - lo) / width - 0.5;
    const double base = std::floor(pos);
    const double frac = pos - base;
    const long b0 = static_cast<long>(base);
    if (b0 >= 0 && b0 < static_cast<long>(bins)) hist[b0] += 1.0 - frac;
    if (b0 + 1 >= 0 && b0 + 1 < static_cast<long>(bins)) hist[b0 + 1] += frac;
  }
  return hist;
}

LossGrad histogram_loss(const Image& img, std::span<const double> target, double lo, double hi,
                        double epsilon) {
  if (target.empty()) throw Error(ErrorKind::EmptyVector, "histogram target has no bins");
  double target_sum = 0.0;
  for (double t : target) {
    if (!(t >= 0.0)) throw Error(ErrorKind::DegenerateTarget, "histogram target has a negative bin");
    target_sum += t;
  }
  if (std::abs(target_sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::DegenerateTarget, "histogram target must sum to 1");
  }
  const std::size_t bins = target.size();
  const double width = (hi - lo) / static_cast<double>(bins);

  const std::vector<double> hist = soft_histogram(img, bins, lo, hi);
  std::vector<double> p(bins);
  std::vector<double> q(bins);
  double p_sum = 0.0;
  double q_sum = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    p[b] = std::max(hist[b], epsilon);
    q[b] = std::max(target[b], epsilon);
    p_sum += p[b];
    q_sum += q[b];
  }
  for (std::size_t b = 0; b < bins; ++b) {
    p[b] /= p_sum;
    q[b] /= q_sum;
  }

  LossGrad out{0.0, Image(img.height(), img.width(), img.channels())};
  std::vector<double> dp(bins);
  double dp_dot_p = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double log_ratio = std::log(p[b]) - std::log(q[b]);
    out.value += 0.5 * (p[b] - q[b]) * log_ratio;
    dp[b] = 0.5 * (log_ratio + 1.0 - q[b] / p[b]);
    dp_dot_p += dp[b] * p[b];
  }
  // d loss / d hist, through the floor and the renormalization.
  std::vector<double> dh(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    dh[b] = hist[b] > epsilon ? (dp[b] - dp_dot_p) / p_sum : 0.0;
  }
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double pos = (img[i] - lo) / width - 0.5;
    const double base = std::floor(pos);
    const long b0 = static_cast<long>(base);
    double g = 0.0;
    if (b0 >= 0 && b0 < static_cast<long>(bins)) g -= dh[b0];
    if (b0 + 1 >= 0 && b0 + 1 < static_cast<long>(bins)) g += dh[b0 + 1];
    out.grad[i] = g / width;
  }
  return out;
}

namespace {

// Zero-padded 5x5 stride-1 average with a fixed divisor of 25 on one channel.
// The operator is self-adjoint, so it also serves as its own transpose.
std::vector<double> avg_pool5(const std::vector<double>& in, std::size_t h, std::size_t w) {
  constexpr long half = AmConfig::pool_padding;
  constexpr double divisor = AmConfig::pool_kernel * AmConfig::pool_kernel;
  std::vector<double> out(h * w, 0.0);
  for (long r = 0; r < static_cast<long>(h); ++r) {
    for (long c = 0; c < static_cast<long>(w); ++c) {
      double s = 0.0;
      for (long rr = std::max(0L, r - half); rr <= std::min<long>(h - 1, r + half); ++rr) {
        for (long cc = std::max(0L, c - half); cc <= std::min<long>(w - 1, c + half); ++cc) {
          s += in[rr * w + cc];
        }
      }
      out[r * w + c] = s / divisor;
    }
  }
  return out;
}

std::vector<double> channel(const Image& img, std::size_t ch) {
  std::vector<double> out(img.height() * img.width());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = img[i * img.channels() + ch];
  return out;
}

}  // namespace

LossGrad noise_loss(const Image& img) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t nch = img.channels();
  const double count = static_cast<double>(img.size());
  LossGrad out{0.0, Image(h, w, nch)};
  for (std::size_t ch = 0; ch < nch; ++ch) {
    const std::vector<double> x = channel(img, ch);
    std::vector<double> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    const std::vector<double> mu = avg_pool5(x, h, w);
    const std::vector<double> m2 = avg_pool5(x2, h, w);

    std::vector<double> d_mu(x.size());
    std::vector<double> d_m2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = mu[i] - (m2[i] - mu[i] * mu[i]);
      out.value += d * d;
      d_mu[i] = 2.0 * d / count * (1.0 + 2.0 * mu[i]);
      d_m2[i] = -2.0 * d / count;
    }
    const std::vector<double> g_mu = avg_pool5(d_mu, h, w);
    const std::vector<double> g_m2 = avg_pool5(d_m2, h, w);
    for (std::size_t i = 0; i < x.size(); ++i) out.grad[i * nch + ch] = g_mu[i] + 2.0 * x[i] * g_m2[i];
  }
  out.value /= count;
  return out;
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place forward 2-D DFT (sign -1, unnormalized) of an h x w grid.
void dft2(std::vector<std::complex<double>>& data, std::size_t h, std::size_t w) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w), buf, buf, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

std::vector<std::complex<double>> spectrum(const Image& img, std::size_t ch) {
  std::vector<std::complex<double>> data(img.height() * img.width());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = img[i * img.channels() + ch];
  dft2(data, img.height(), img.width());
  return data;
}

}  // namespace

LossGrad frequency_loss(const Image& img, const Image& reference, double epsilon) {
  if (!img.same_shape(reference)) {
    throw Error(ErrorKind::ShapeMismatch, "frequency loss needs image and reference of equal shape");
  }
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const std::size_t nch = img.channels();
  const double count = static_cast<double>(img.size());
  LossGrad out{0.0, Image(h, w, nch)};
  for (std::size_t ch = 0; ch < nch; ++ch) {
    const auto f = spectrum(img, ch);
    const auto r = spectrum(reference, ch);
    std::vector<std::complex<double>> g(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double mag = std::abs(f[k]);
      const double held = std::max(mag, epsilon);
      const double diff = held - std::abs(r[k]);
      out.value += diff * diff;
      g[k] = mag >= epsilon ? diff * std::conj(f[k]) / mag : 0.0;
    }
    // d|F_k|/dI_n = Re(conj(F_k) e^{-2 pi i k.n}) / |F_k|, so the gradient is
    // the real part of a forward transform of g.
    dft2(g, h, w);
    for (std::size_t i = 0; i < g.size(); ++i) out.grad[i * nch + ch] = 2.0 * g[i].real() / count;
  }
  out.value /= count;
  return out;
}

LossGrad combined_prior_loss(const Image& img, const AmConfig& cfg, const PriorTargets& targets) {
  LossGrad total{0.0, Image(img.height(), img.width(), img.channels())};
  for (const Regularizer& r : prior_regularizers(cfg, targets)) {
    const LossGrad lg = r.loss(img);
    total.value += r.weight * lg.value;
    for (std::size_t i = 0; i < img.size(); ++i) total.grad[i] += r.weight * lg.grad[i];
  }
  return total;
}

std::vector<Regularizer> prior_regularizers(const AmConfig& cfg, const PriorTargets& targets) {
  std::vector<Regularizer> out;
  const PriorWeights& w = cfg.prior_weights;
  if (w.histogram != 0.0) {
    if (targets.histogram.empty()) {
      throw Error(ErrorKind::InvalidInput, "histogram prior needs a target histogram");
    }
    out.push_back({"histogram", w.histogram, [t = targets.histogram, cfg](const Image& img) {
                     return histogram_loss(img, t, cfg.hist_lo, cfg.hist_hi, cfg.hist_epsilon);
                   }});
  }
  if (w.noise != 0.0) out.push_back({"noise", w.noise, [](const Image& img) { return noise_loss(img); }});
  if (w.symmetry != 0.0) {
    out.push_back({"symmetry", w.symmetry, [](const Image& img) { return symmetry_loss(img); }});
  }
  if (w.frequency != 0.0) {
    if (!targets.reference) {
      throw Error(ErrorKind::InvalidInput, "frequency prior needs a reference image");
    }
    out.push_back({"frequency", w.frequency, [ref = *targets.reference, eps = cfg.spectrum_epsilon](
                                                 const Image& img) { return frequency_loss(img, ref, eps); }});
  }
  return out;
}

Scorer quadratic_scorer(Image target) {
  return [target = std::move(target)](const Image& x) {
    if (!x.same_shape(target)) throw Error(ErrorKind::ShapeMismatch, "quadratic scorer shape mismatch");
    ScoreResult out{0.0, Image(x.height(), x.width(), x.channels())};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - target[i];
      out.activation -= d * d;
      out.gradient[i] = -2.0 * d;
    }
    return out;
  };
}

}  // namespace causal
