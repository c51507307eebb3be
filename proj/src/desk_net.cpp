#include "causal/desk_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "causal/error.hpp"
#include "causal/rng.hpp"

namespace causal {

namespace {

constexpr std::size_t kInputSide = kSampleSide;       // 16
constexpr std::size_t kMidSide = kInputSide / 2;      // 8
constexpr std::size_t kK = kConv2Filters;             // feature maps
constexpr std::size_t kFeatures = kK * kFeatureSide * kFeatureSide;

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Cat: return "cat";
    case Variant::Mulcat: return "mulcat";
    case Variant::Cab: return "cab";
    case Variant::DamagedCat: return "damaged_cat";
    case Variant::DamagedMulcat: return "damaged_mulcat";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::Baseline, Variant::Cat, Variant::Mulcat, Variant::Cab,
                    Variant::DamagedCat, Variant::DamagedMulcat}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorKind::InvalidInput, "unknown variant '" + s + "'");
}

Layout layout_of(Variant v) {
  switch (v) {
    case Variant::Baseline: return Layout::Baseline;
    case Variant::Cat:
    case Variant::DamagedCat: return Layout::Cat;
    case Variant::Mulcat:
    case Variant::DamagedMulcat: return Layout::Mulcat;
    case Variant::Cab: return Layout::Cab;
  }
  return Layout::Baseline;
}

std::size_t classifier_width(Variant v) { return layout_width(layout_of(v), kK, kFeatureSide); }

std::size_t DeskNetParams::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto* g : groups()) n += g->size();
  return n;
}

std::array<std::vector<double>*, 6> DeskNetParams::groups() {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
}

std::array<const std::vector<double>*, 6> DeskNetParams::groups() const {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
}

const std::array<const char*, 6>& DeskNetParams::group_names() {
  static const std::array<const char*, 6> names{"conv1_w", "conv1_b", "conv2_w",
                                                "conv2_b", "fc_w",    "fc_b"};
  return names;
}

DeskNetParams DeskNetParams::zeros_like() const {
  DeskNetParams z;
  z.variant = variant;
  auto dst = z.groups();
  const auto src = groups();
  for (std::size_t g = 0; g < dst.size(); ++g) dst[g]->assign(src[g]->size(), 0.0);
  return z;
}

DeskNetParams init_params(Variant v, std::uint64_t seed) {
  SplitMix64 rng(seed);
  DeskNetParams p;
  p.variant = v;
  auto fill = [&](std::vector<double>& w, std::size_t count, double bound) {
    w.resize(count);
    for (double& x : w) x = rng.uniform(-bound, bound);
  };
  fill(p.conv1_w, kConv1Filters * 9, std::sqrt(6.0 / 9.0));
  p.conv1_b.assign(kConv1Filters, 0.01);
  fill(p.conv2_w, kConv2Filters * kConv1Filters * 9, std::sqrt(6.0 / (kConv1Filters * 9.0)));
  p.conv2_b.assign(kConv2Filters, 0.01);
  const std::size_t width = classifier_width(v);
  fill(p.fc_w, kNumClasses * width, 1.0 / std::sqrt(static_cast<double>(width)));
  p.fc_b.assign(kNumClasses, 0.0);
  return p;
}

namespace {

// 3x3 convolution with zero padding 1 over `cin` planes of side `side`.
void conv3x3(const double* in, std::size_t cin, std::size_t side, const double* w, const double* b,
             std::size_t cout, double* out) {
  const long s = static_cast<long>(side);
  for (std::size_t o = 0; o < cout; ++o) {
    double* dst = out + o * side * side;
    std::fill(dst, dst + side * side, b[o]);
    for (std::size_t i = 0; i < cin; ++i) {
      const double* src = in + i * side * side;
      const double* k = w + (o * cin + i) * 9;
      for (long r = 0; r < s; ++r) {
        for (long kr = -1; kr <= 1; ++kr) {
          const long rr = r + kr;
          if (rr < 0 || rr >= s) continue;
          for (long kc = -1; kc <= 1; ++kc) {
            const double wk = k[(kr + 1) * 3 + (kc + 1)];
            const long c0 = std::max(0L, -kc);
            const long c1 = std::min(s, s - kc);
            const double* row = src + rr * s;
            double* drow = dst + r * s;
            for (long c = c0; c < c1; ++c) drow[c] += wk * row[c + kc];
          }
        }
      }
    }
  }
}

// Gradients of conv3x3 given d_out; d_in may be null.
void conv3x3_backward(const double* in, std::size_t cin, std::size_t side, const double* w,
                      std::size_t cout, const double* d_out, double* d_w, double* d_b, double* d_in) {
  const long s = static_cast<long>(side);
  for (std::size_t o = 0; o < cout; ++o) {
    const double* g = d_out + o * side * side;
    double gb = 0.0;
    for (std::size_t i = 0; i < side * side; ++i) gb += g[i];
    d_b[o] += gb;
    for (std::size_t i = 0; i < cin; ++i) {
      const double* src = in + i * side * side;
      const double* k = w + (o * cin + i) * 9;
      double* dk = d_w + (o * cin + i) * 9;
      double* dsrc = d_in ? d_in + i * side * side : nullptr;
      for (long kr = -1; kr <= 1; ++kr) {
        for (long kc = -1; kc <= 1; ++kc) {
          const double wk = k[(kr + 1) * 3 + (kc + 1)];
          double acc = 0.0;
          const long c0 = std::max(0L, -kc);
          const long c1 = std::min(s, s - kc);
          for (long r = 0; r < s; ++r) {
            const long rr = r + kr;
            if (rr < 0 || rr >= s) continue;
            const double* grow = g + r * s;
            const double* row = src + rr * s;
            for (long c = c0; c < c1; ++c) acc += grow[c] * row[c + kc];
            if (dsrc) {
              double* drow = dsrc + rr * s;
              for (long c = c0; c < c1; ++c) drow[c + kc] += wk * grow[c];
            }
          }
          dk[(kr + 1) * 3 + (kc + 1)] += acc;
        }
      }
    }
  }
}

// ReLU then 2x2/2 max pooling; arg holds the winning input index (first in
// row-major order on ties).
void relu_pool(const std::vector<double>& pre, std::size_t channels, std::size_t side,
               std::vector<double>& out, std::vector<std::size_t>& arg) {
  const std::size_t half = side / 2;
  out.assign(channels * half * half, 0.0);
  arg.assign(out.size(), 0);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    for (std::size_t r = 0; r < half; ++r) {
      for (std::size_t c = 0; c < half; ++c) {
        std::size_t best = ch * side * side + (2 * r) * side + 2 * c;
        double best_v = std::max(pre[best], 0.0);
        for (std::size_t dr = 0; dr < 2; ++dr) {
          for (std::size_t dc = 0; dc < 2; ++dc) {
            const std::size_t idx = ch * side * side + (2 * r + dr) * side + 2 * c + dc;
            const double v = std::max(pre[idx], 0.0);
            if (v > best_v) {
              best_v = v;
              best = idx;
            }
          }
        }
        const std::size_t o = (ch * half + r) * half + c;
        out[o] = best_v;
        arg[o] = best;
      }
    }
  }
}

// Routes pooled gradients back through max pooling and ReLU.
void relu_pool_backward(const std::vector<double>& d_out, const std::vector<std::size_t>& arg,
                        const std::vector<double>& pre, std::vector<double>& d_pre) {
  d_pre.assign(pre.size(), 0.0);
  for (std::size_t o = 0; o < d_out.size(); ++o) {
    const std::size_t idx = arg[o];
    if (pre[idx] > 0.0) d_pre[idx] += d_out[o];
  }
}

void check_params(const DeskNetParams& p, Variant v) {
  if (p.conv1_w.size() != kConv1Filters * 9 || p.conv1_b.size() != kConv1Filters ||
      p.conv2_w.size() != kConv2Filters * kConv1Filters * 9 || p.conv2_b.size() != kConv2Filters ||
      p.fc_b.size() != kNumClasses || p.fc_w.size() % kNumClasses != 0) {
    throw Error(ErrorKind::ShapeMismatch, "desk net parameter groups have the wrong sizes");
  }
  if (p.fc_width() != classifier_width(v)) {
    throw Error(ErrorKind::ShapeMismatch, "classifier width " + std::to_string(p.fc_width()) +
                                              " does not match variant " + to_string(v) + " (" +
                                              std::to_string(classifier_width(v)) + ")");
  }
}

// Gradient of the Max-estimator causality map with respect to the raw
// (un-normalized) feature stack, accumulated into d_x.
void max_map_backward(const std::vector<double>& x, std::span<const double> d_map, double eps,
                      std::vector<double>& d_x) {
  const std::size_t m = kFeatureSide * kFeatureSide;
  const std::size_t g_arg = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
  const double g = x[g_arg];

  std::vector<double> peak(kK), mass(kK), denom(kK);
  std::vector<std::size_t> peak_arg(kK);
  for (std::size_t i = 0; i < kK; ++i) {
    const auto first = x.begin() + static_cast<long>(i * m);
    const auto it = std::max_element(first, first + static_cast<long>(m));
    peak_arg[i] = static_cast<std::size_t>(it - x.begin());
    peak[i] = *it / g;
    double s = 0.0;
    for (std::size_t t = 0; t < m; ++t) s += x[i * m + t] / g;
    mass[i] = s;
    denom[i] = std::max(s, eps);
  }

  std::vector<double> d_peak(kK, 0.0), d_mass(kK, 0.0);
  for (std::size_t i = 0; i < kK; ++i) {
    for (std::size_t j = 0; j < kK; ++j) {
      const double gij = d_map[i * kK + j];
      if (gij == 0.0) continue;
      d_peak[i] += gij * peak[j] / denom[j];
      d_peak[j] += gij * peak[i] / denom[j];
      if (mass[j] >= eps) d_mass[j] -= gij * peak[i] * peak[j] / (denom[j] * denom[j]);
    }
  }

  std::vector<double> d_xh(x.size(), 0.0);
  for (std::size_t i = 0; i < kK; ++i) {
    for (std::size_t t = 0; t < m; ++t) d_xh[i * m + t] += d_mass[i];
    d_xh[peak_arg[i]] += d_peak[i];
  }
  double d_g = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    d_x[t] += d_xh[t] / g;
    d_g -= d_xh[t] * x[t] / (g * g);
  }
  d_x[g_arg] += d_g;
}

// Backward pass from d_logits; returns d_input when requested.
std::vector<double> backward(const DeskNetParams& params, const ForwardCache& cache,
                             const NetConfig& cfg, const std::array<double, 2>& d_logits,
                             DeskNetParams& grads, bool want_input) {
  const std::size_t width = cache.payload.size();
  std::vector<double> d_payload(width, 0.0);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    grads.fc_b[c] += d_logits[c];
    const double* w = params.fc_w.data() + c * width;
    double* dw = grads.fc_w.data() + c * width;
    for (std::size_t t = 0; t < width; ++t) {
      dw[t] += d_logits[c] * cache.payload[t];
      d_payload[t] += d_logits[c] * w[t];
    }
  }

  const std::size_t m = kFeatureSide * kFeatureSide;
  std::vector<double> d_feat(kFeatures, 0.0);
  switch (cfg.variant) {
    case Variant::Baseline:
    case Variant::DamagedCat:
      std::copy_n(d_payload.begin(), kFeatures, d_feat.begin());
      break;
    case Variant::Cat:
      std::copy_n(d_payload.begin(), kFeatures, d_feat.begin());
      if (cfg.cmap_backprop && cfg.estimator.method == Estimator::Max && !cache.zero_stack) {
        max_map_backward(cache.features, std::span<const double>(d_payload).subspan(kFeatures),
                         cfg.estimator.epsilon, d_feat);
      }
      break;
    case Variant::Mulcat:
    case Variant::DamagedMulcat:
      for (std::size_t t = 0; t < kFeatures; ++t) {
        d_feat[t] = d_payload[t] + cache.factors[t / m] * d_payload[kFeatures + t];
      }
      break;
    case Variant::Cab: {
      const double scale = static_cast<double>(kK) - 1.0;
      for (std::size_t t = 0; t < kFeatures; ++t) {
        d_feat[t] = d_payload[t] * (1.0 + cache.factors[t / m] / scale);
      }
      break;
    }
  }

  std::vector<double> d_conv2;
  relu_pool_backward(d_feat, cache.pool2_arg, cache.conv2, d_conv2);
  std::vector<double> d_pool1(cache.pool1.size(), 0.0);
  conv3x3_backward(cache.pool1.data(), kConv1Filters, kMidSide, params.conv2_w.data(), kConv2Filters,
                   d_conv2.data(), grads.conv2_w.data(), grads.conv2_b.data(), d_pool1.data());
  std::vector<double> d_conv1;
  relu_pool_backward(d_pool1, cache.pool1_arg, cache.conv1, d_conv1);
  std::vector<double> d_input;
  if (want_input) d_input.assign(cache.input.size(), 0.0);
  conv3x3_backward(cache.input.data(), 1, kInputSide, params.conv1_w.data(), kConv1Filters,
                   d_conv1.data(), grads.conv1_w.data(), grads.conv1_b.data(),
                   want_input ? d_input.data() : nullptr);
  return d_input;
}

}  // namespace

ForwardResult forward(const DeskNetParams& params, const Image& image, const NetConfig& cfg,
                      std::uint64_t noise_key) {
  if (image.height() != kInputSide || image.width() != kInputSide || image.channels() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "desk net expects a 16 x 16 x 1 image");
  }
  check_params(params, cfg.variant);

  ForwardResult res;
  ForwardCache& c = res.cache;
  c.input.assign(image.pixels().begin(), image.pixels().end());
  c.conv1.resize(kConv1Filters * kInputSide * kInputSide);
  conv3x3(c.input.data(), 1, kInputSide, params.conv1_w.data(), params.conv1_b.data(), kConv1Filters,
          c.conv1.data());
  relu_pool(c.conv1, kConv1Filters, kInputSide, c.pool1, c.pool1_arg);
  c.conv2.resize(kConv2Filters * kMidSide * kMidSide);
  conv3x3(c.pool1.data(), kConv1Filters, kMidSide, params.conv2_w.data(), params.conv2_b.data(),
          kConv2Filters, c.conv2.data());
  relu_pool(c.conv2, kConv2Filters, kMidSide, c.features, c.pool2_arg);

  if (!std::all_of(c.features.begin(), c.features.end(), [](double v) { return std::isfinite(v); })) {
    // blown-up weights; let the caller see a non-finite logit
    res.logits.fill(std::numeric_limits<double>::quiet_NaN());
    return res;
  }
  const FeatureStack stack(kK, kFeatureSide, c.features);
  c.zero_stack = std::all_of(c.features.begin(), c.features.end(), [](double v) { return v == 0.0; });
  auto real_map = [&] {
    return c.zero_stack ? CausalityMap(kK, std::vector<double>(kK * kK, 0.0), cfg.estimator.method)
                        : compute_causality_map(stack, cfg.estimator);
  };
  auto real_factors = [&] {
    return c.zero_stack ? FactorVector{std::vector<double>(kK, 0.0), cfg.factors}
                        : extract_factors(compute_causality_map(stack, cfg.estimator), cfg.factors);
  };

  EnhancedFeatures enhanced;
  switch (cfg.variant) {
    case Variant::Baseline: enhanced = enhance_baseline(stack); break;
    case Variant::Cat: enhanced = enhance_cat(stack, real_map()); break;
    case Variant::DamagedCat: enhanced = damaged_cat(stack, noise_key); break;
    case Variant::Mulcat:
    case Variant::DamagedMulcat:
    case Variant::Cab: {
      const FactorVector f = cfg.variant == Variant::DamagedMulcat
                                 ? damaged_factors(kK, cfg.factors.mode, noise_key)
                                 : real_factors();
      c.factors = f.weights;
      enhanced = cfg.variant == Variant::Cab ? enhance_cab(stack, f) : enhance_mulcat(stack, f);
      break;
    }
  }
  c.payload = std::move(enhanced.payload);

  const std::size_t width = c.payload.size();
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double* w = params.fc_w.data() + k * width;
    double z = params.fc_b[k];
    for (std::size_t t = 0; t < width; ++t) z += w[t] * c.payload[t];
    res.logits[k] = z;
  }
  return res;
}

namespace {

struct Xent {
  double loss;
  double p_other;  // softmax probability of the wrong class
};

// Two-class cross entropy in softplus form; no cancellation when saturated.
Xent cross_entropy(const std::array<double, 2>& z, int y) {
  const double d = z[1 - y] - z[y];
  if (d > 0.0) return {d + std::log1p(std::exp(-d)), 1.0 / (1.0 + std::exp(-d))};
  const double e = std::exp(d);
  return {std::log1p(e), e / (1.0 + e)};
}

}  // namespace

LossAndGrads loss_and_grads(const DeskNetParams& params, std::span<const SyntheticSample> batch,
                            const NetConfig& cfg, std::uint64_t noise_key) {
  if (batch.empty()) throw Error(ErrorKind::EmptyBatch, "loss of an empty batch");
  LossAndGrads out{0.0, 0, params.zeros_like()};
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const ForwardResult f = forward(params, batch[b].image, cfg, derive_seed(noise_key, b));
    if (!std::isfinite(f.logits[0]) || !std::isfinite(f.logits[1])) {
      out.loss = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    const int y = batch[b].label;
    const Xent ce = cross_entropy(f.logits, y);
    out.loss += ce.loss * inv_b;
    const int predicted = f.logits[1] > f.logits[0] ? 1 : 0;
    if (predicted == y) ++out.correct;
    std::array<double, 2> d_logits{};
    d_logits[y] = -ce.p_other * inv_b;
    d_logits[1 - y] = ce.p_other * inv_b;
    backward(params, f.cache, cfg, d_logits, out.grads, false);
  }
  return out;
}

ScoreResult logit_and_input_grad(const DeskNetParams& params, const Image& image, int cls,
                                 const NetConfig& cfg, std::uint64_t noise_key) {
  if (cls < 0 || cls >= static_cast<int>(kNumClasses)) {
    throw Error(ErrorKind::InvalidInput, "class index out of range");
  }
  const ForwardResult f = forward(params, image, cfg, noise_key);
  if (f.cache.payload.empty()) {
    return {f.logits[cls], Image(kInputSide, kInputSide, 1, std::numeric_limits<double>::quiet_NaN())};
  }
  std::array<double, 2> d_logits{0.0, 0.0};
  d_logits[cls] = 1.0;
  DeskNetParams scratch = params.zeros_like();
  std::vector<double> d_input = backward(params, f.cache, cfg, d_logits, scratch, true);
  return {f.logits[cls], Image(kInputSide, kInputSide, 1, std::move(d_input))};
}

Scorer desknet_scorer(DeskNetParams params, NetConfig cfg, int cls) {
  check_params(params, cfg.variant);
  return [params = std::move(params), cfg, cls](const Image& x) {
    return logit_and_input_grad(params, x, cls, cfg);
  };
}

void TrainConfig::validate() const {
  net.estimator.validate();
  if (epochs < 1 || batch_size < 1 || !(learning_rate > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "epochs, batch_size and learning_rate must be positive");
  }
  if (n_samples < 6) throw Error(ErrorKind::InvalidInput, "n_samples too small to split");
}

EvalResult evaluate(const DeskNetParams& params, const std::vector<SyntheticSample>& data,
                    std::span<const std::size_t> indices, const NetConfig& cfg,
                    std::uint64_t noise_key) {
  EvalResult r;
  if (indices.empty()) return r;
  std::size_t correct = 0;
  for (std::size_t i : indices) {
    const ForwardResult f = forward(params, data[i].image, cfg, derive_seed(noise_key, i));
    r.loss += cross_entropy(f.logits, data[i].label).loss;
    if ((f.logits[1] > f.logits[0] ? 1 : 0) == data[i].label) ++correct;
  }
  r.loss /= static_cast<double>(indices.size());
  r.accuracy = static_cast<double>(correct) / static_cast<double>(indices.size());
  return r;
}

TrainResult train(const TrainConfig& cfg) {
  cfg.validate();
  const auto data = generate_dataset(cfg.n_samples, derive_seed(cfg.seed, 1));
  const DatasetSplit split =
      split_dataset(data, cfg.train_fraction, cfg.val_fraction, derive_seed(cfg.seed, 2));
  DeskNetParams params = init_params(cfg.net.variant, derive_seed(cfg.seed, 3));
  SplitMix64 shuffle_rng(derive_seed(cfg.seed, 4));
  const std::uint64_t train_noise = derive_seed(cfg.seed, 5);
  const std::uint64_t eval_noise = derive_seed(cfg.seed, 6);

  TrainResult result;
  result.config = cfg;
  result.parameter_count = params.parameter_count();
  result.params = params;
  double best_val = -1.0;

  std::vector<std::size_t> order = split.train;
  std::vector<SyntheticSample> batch;
  std::uint64_t step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t t = start; t < end; ++t) batch.push_back(data[order[t]]);
      const LossAndGrads lg = loss_and_grads(params, batch, cfg.net, derive_seed(train_noise, step++));
      if (!std::isfinite(lg.loss)) {
        throw Error(ErrorKind::DivergedLoss,
                    "training loss is not finite at epoch " + std::to_string(epoch) + " (seed " +
                        std::to_string(cfg.seed) + ")",
                    epoch);
      }
      loss_sum += lg.loss * static_cast<double>(batch.size());
      correct += lg.correct;
      auto dst = params.groups();
      const auto src = lg.grads.groups();
      for (std::size_t g = 0; g < dst.size(); ++g) {
        for (std::size_t t = 0; t < dst[g]->size(); ++t) (*dst[g])[t] -= cfg.learning_rate * (*src[g])[t];
      }
    }
    const EvalResult val = evaluate(params, data, split.val, cfg.net, eval_noise);
    EpochMetrics em;
    em.epoch = epoch;
    em.train_loss = loss_sum / static_cast<double>(order.size());
    em.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    em.val_loss = val.loss;
    em.val_accuracy = val.accuracy;
    result.history.push_back(em);
    if (val.accuracy > best_val) {
      best_val = val.accuracy;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  result.test_accuracy = evaluate(result.params, data, split.test, cfg.net, eval_noise).accuracy;
  return result;
}

std::size_t count_parameters(const ArchitectureSpec& spec) {
  const std::size_t width = layout_width(layout_of(spec.variant), spec.k, spec.n);
  return spec.backbone_parameters + width * spec.classes + spec.classes;
}

std::size_t resnet18_backbone_parameters() {
  auto conv = [](std::size_t cin, std::size_t cout, std::size_t ks) { return cin * cout * ks * ks; };
  auto bn = [](std::size_t c) { return 2 * c; };
  // stem: 7x7 conv + BN
  std::size_t total = conv(3, 64, 7) + bn(64);
  std::size_t cin = 64;
  for (std::size_t cout : {64, 128, 256, 512}) {
    for (int block = 0; block < 2; ++block) {
      const std::size_t in = block == 0 ? cin : cout;
      total += conv(in, cout, 3) + bn(cout) + conv(cout, cout, 3) + bn(cout);
      if (block == 0 && in != cout) total += conv(in, cout, 1) + bn(cout);  // downsample
    }
    cin = cout;
  }
  return total;
}

std::size_t desknet_backbone_parameters() {
  return kConv1Filters * 9 + kConv1Filters + kConv2Filters * kConv1Filters * 9 + kConv2Filters;
}

}  // namespace causal
