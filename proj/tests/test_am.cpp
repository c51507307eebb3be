#include <doctest.h>

#include "causal/am.hpp"
#include "causal/error.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

Image random_image(SplitMix64& rng, std::size_t h, std::size_t w, std::size_t c = 1, double lo = 0.0,
                   double hi = 1.0) {
  Image img(h, w, c);
  for (double& v : img.pixels()) v = rng.uniform(lo, hi);
  return img;
}

std::vector<double> to_vec(const Image& img) { return {img.pixels().begin(), img.pixels().end()}; }

// Relative error of loss(img).grad against central differences.
double grad_error(const std::function<LossGrad(const Image&)>& loss, const Image& img) {
  const auto analytic = to_vec(loss(img).grad);
  auto f = [&](const std::vector<double>& x) {
    return loss(Image(img.height(), img.width(), img.channels(), x)).value;
  };
  return oracle::rel_err(analytic, oracle::finite_diff(f, to_vec(img)));
}

// Triangular soft binning: weight max(0, 1 - |v - centre_b| / width).
std::vector<double> hist_oracle(const Image& img, std::size_t bins, double lo, double hi) {
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> h(bins, 0.0);
  for (double v : img.pixels()) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double centre = lo + (static_cast<double>(b) + 0.5) * width;
      h[b] += std::max(0.0, 1.0 - std::abs(v - centre) / width);
    }
  }
  return h;
}

// Keeps every pixel at least `gap` away from a bin centre.
void avoid_centres(Image& img, std::size_t bins, double gap) {
  const double width = 1.0 / static_cast<double>(bins);
  for (double& v : img.pixels()) {
    const double pos = v / width - 0.5;
    const double off = pos - std::round(pos);
    if (std::abs(off) * width < gap) v += (off >= 0 ? 1.0 : -1.0) * 2.0 * gap;
  }
}

std::vector<double> random_target(SplitMix64& rng, std::size_t bins) {
  std::vector<double> t(bins);
  double s = 0.0;
  for (double& v : t) s += (v = rng.uniform(0.05, 1.0));
  for (double& v : t) v /= s;
  return t;
}

}  // namespace

TEST_CASE("symmetry loss values") {
  SplitMix64 rng(51);
  auto img = random_image(rng, 6, 7, 3);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t k = 0; k < 3; ++k) img.at(r, 6 - c, k) = img.at(r, c, k);
    }
  }
  CHECK(symmetry_loss(img).value == 0.0);

  Image half(4, 4, 1);
  for (std::size_t r = 0; r < 4; ++r) half.at(r, 0) = half.at(r, 1) = 1.0;
  CHECK(symmetry_loss(half).value == 1.0);
}

TEST_CASE("soft histogram matches the kernel oracle") {
  SplitMix64 rng(52);
  for (int t = 0; t < 20; ++t) {
    auto img = random_image(rng, 5, 6, 1 + 2 * rng.below(2));
    const std::size_t bins = 2 + rng.below(10);
    CHECK(oracle::max_abs_diff(soft_histogram(img, bins), hist_oracle(img, bins, 0.0, 1.0)) <= 1e-12);
  }
}

TEST_CASE("histogram loss values") {
  SplitMix64 rng(53);
  auto img = random_image(rng, 8, 8);
  auto h = soft_histogram(img, 10);
  double s = 0.0;
  for (double v : h) s += v;
  for (double& v : h) v /= s;
  CHECK(std::abs(histogram_loss(img, h).value) <= 1e-12);
  for (int t = 0; t < 100; ++t) {
    auto x = random_image(rng, 6, 6);
    CHECK(histogram_loss(x, random_target(rng, 2 + rng.below(12))).value >= 0.0);
  }
  CHECK_THROWS_AS(histogram_loss(img, std::vector<double>{0.5, 0.6}), Error);
  CHECK_THROWS_AS(histogram_loss(img, std::vector<double>{1.5, -0.5}), Error);
  try {
    histogram_loss(img, std::vector<double>{0.2, 0.2});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateTarget);
  }
}

TEST_CASE("noise loss values") {
  CHECK(noise_loss(Image(8, 8, 1)).value == 0.0);
  for (double c : {0.3, 1.0}) {
    Image img(9, 7, 1, c);
    auto x = to_vec(img);
    std::vector<double> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    auto mu = oracle::avg_pool5(x, 9, 7);
    auto m2 = oracle::avg_pool5(x2, 9, 7);
    double want = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = mu[i] - (m2[i] - mu[i] * mu[i]);
      want += d * d;
    }
    want /= static_cast<double>(x.size());
    CHECK(std::abs(noise_loss(img).value - want) <= 1e-12);
    // an interior pixel sees no padding: mu = c and var = 0
    CHECK(std::abs(mu[4 * 7 + 3] - c) <= 1e-15);
  }
}

TEST_CASE("noise loss matches the pooling oracle on random images") {
  SplitMix64 rng(54);
  for (int t = 0; t < 10; ++t) {
    auto img = random_image(rng, 3 + rng.below(8), 3 + rng.below(8));
    auto x = to_vec(img);
    std::vector<double> x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    auto mu = oracle::avg_pool5(x, img.height(), img.width());
    auto m2 = oracle::avg_pool5(x2, img.height(), img.width());
    double want = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = mu[i] - (m2[i] - mu[i] * mu[i]);
      want += d * d;
    }
    CHECK(std::abs(noise_loss(img).value - want / static_cast<double>(x.size())) <= 1e-12);
  }
}

TEST_CASE("frequency loss values") {
  SplitMix64 rng(55);
  for (int t = 0; t < 10; ++t) {
    auto ref = random_image(rng, 4 + rng.below(6), 4 + rng.below(6), 1 + 2 * rng.below(2));
    CHECK(std::abs(frequency_loss(ref, ref).value) <= 1e-12);
    auto shifted = circular_shift(ref, static_cast<long>(rng.below(5)), -static_cast<long>(rng.below(5)));
    CHECK(std::abs(frequency_loss(shifted, ref).value) <= 1e-12);

    auto img = random_image(rng, ref.height(), ref.width(), ref.channels());
    double want = 0.0;
    for (std::size_t ch = 0; ch < ref.channels(); ++ch) {
      auto a = oracle::dft_magnitude(img, ch);
      auto b = oracle::dft_magnitude(ref, ch);
      for (std::size_t i = 0; i < a.size(); ++i) want += (a[i] - b[i]) * (a[i] - b[i]);
    }
    want /= static_cast<double>(ref.size());
    CHECK(frequency_loss(img, ref).value == doctest::Approx(want).epsilon(1e-10));
  }
  CHECK_THROWS_AS(frequency_loss(Image(4, 4, 1), Image(4, 5, 1)), Error);
}

TEST_CASE("analytic gradients match central differences on 8x8 images") {
  SplitMix64 rng(56);
  double worst_sym = 0, worst_noise = 0, worst_freq = 0, worst_hist = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t ch = t % 4 == 3 ? 3 : 1;
    auto img = random_image(rng, 8, 8, ch);
    auto ref = random_image(rng, 8, 8, ch);
    worst_sym = std::max(worst_sym, grad_error(symmetry_loss, img));
    worst_noise = std::max(worst_noise, grad_error(noise_loss, img));
    worst_freq = std::max(worst_freq, grad_error([&](const Image& x) { return frequency_loss(x, ref); }, img));
    const std::size_t bins = 4 + rng.below(12);
    avoid_centres(img, bins, 1e-4);
    const auto target = random_target(rng, bins);
    worst_hist = std::max(worst_hist, grad_error([&](const Image& x) { return histogram_loss(x, target); }, img));
  }
  CHECK(worst_sym <= 1e-4);
  CHECK(worst_noise <= 1e-4);
  CHECK(worst_freq <= 1e-4);
  CHECK(worst_hist <= 1e-3);
}

TEST_CASE("property: losses are non-negative with image-shaped gradients") {
  SplitMix64 rng(57);
  for (int t = 0; t < 20; ++t) {
    auto img = random_image(rng, 3 + rng.below(6), 3 + rng.below(6), 1 + 2 * rng.below(2));
    auto ref = random_image(rng, img.height(), img.width(), img.channels());
    for (const auto& lg : {symmetry_loss(img), noise_loss(img), frequency_loss(img, ref),
                           histogram_loss(img, random_target(rng, 6))}) {
      CHECK(lg.value >= 0.0);
      CHECK(lg.grad.same_shape(img));
    }
  }
}

TEST_CASE("combined prior loss") {
  SplitMix64 rng(58);
  auto img = random_image(rng, 8, 8);
  PriorTargets targets{random_target(rng, 8), random_image(rng, 8, 8)};
  AmConfig cfg;
  CHECK(combined_prior_loss(img, cfg, targets).value == 0.0);
  CHECK(combined_prior_loss(img, cfg, PriorTargets{}).value == 0.0);

  Image sym(4, 4, 1);
  for (std::size_t r = 0; r < 4; ++r) sym.at(r, 0) = sym.at(r, 3) = 0.7;
  AmConfig only_sym;
  only_sym.prior_weights.symmetry = 1.0;
  CHECK(combined_prior_loss(sym, only_sym, {}).value == 0.0);

  // linear in each weight with the others held fixed
  AmConfig base;
  base.prior_weights = {0.3, 0.2, 0.1, 0.05};
  const double l0 = combined_prior_loss(img, base, targets).value;
  for (int which = 0; which < 4; ++which) {
    AmConfig c1 = base, c2 = base;
    double* w1[] = {&c1.prior_weights.histogram, &c1.prior_weights.noise, &c1.prior_weights.symmetry,
                    &c1.prior_weights.frequency};
    double* w2[] = {&c2.prior_weights.histogram, &c2.prior_weights.noise, &c2.prior_weights.symmetry,
                    &c2.prior_weights.frequency};
    *w1[which] += 1.0;
    *w2[which] += 2.0;
    const double l1 = combined_prior_loss(img, c1, targets).value;
    const double l2 = combined_prior_loss(img, c2, targets).value;
    CHECK(std::abs((l2 - l1) - (l1 - l0)) <= 1e-12 * std::max(1.0, std::abs(l2)));
  }

  AmConfig need_hist;
  need_hist.prior_weights.histogram = 1.0;
  CHECK_THROWS_AS(combined_prior_loss(img, need_hist, PriorTargets{}), Error);
}

TEST_CASE("am_run converges on the quadratic scorer") {
  SplitMix64 rng(59);
  auto target = random_image(rng, 8, 8, 1, 0.2, 0.8);
  auto init = random_image(rng, 8, 8);
  AmConfig cfg;
  cfg.step_size = 0.1;
  cfg.iterations = 500;
  auto res = am_run(quadratic_scorer(target), init, cfg);
  CHECK(oracle::max_abs_diff(res.image.pixels(), target.pixels()) <= 1e-3);
  REQUIRE(res.trace.size() == 500);
  for (std::size_t t = 11; t < res.trace.size(); ++t) CHECK(res.trace[t].activation >= res.trace[t - 1].activation);
}

TEST_CASE("am_run identities") {
  SplitMix64 rng(60);
  auto init = random_image(rng, 8, 8);
  auto scorer = quadratic_scorer(random_image(rng, 8, 8));
  AmConfig zero;
  zero.iterations = 0;
  auto r0 = am_run(scorer, init, zero);
  CHECK(r0.image == init);
  CHECK(r0.trace.empty());

  AmConfig tiny;
  tiny.step_size = 1e-300;
  tiny.iterations = 20;
  CHECK(am_run(scorer, init, tiny).image == init);

  AmConfig jit;
  jit.iterations = 50;
  jit.jitter_px = 2;
  jit.blur_every = 7;
  jit.seed = 1234;
  jit.prior_weights.noise = 0.1;
  jit.prior_weights.symmetry = 0.2;
  auto regs = prior_regularizers(jit, {});
  auto a = am_run(scorer, init, jit, regs);
  auto b = am_run(scorer, init, jit, regs);
  CHECK(a.image == b.image);
  for (double v : a.image.pixels()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("am_run reports the iteration of a non-finite gradient") {
  Image init(4, 4, 1, 0.5);
  int calls = 0;
  Scorer bad = [&](const Image& x) {
    ScoreResult r{0.0, Image(x.height(), x.width(), x.channels())};
    if (++calls == 4) r.gradient[3] = std::nan("");
    return r;
  };
  AmConfig cfg;
  cfg.iterations = 10;
  try {
    am_run(bad, init, cfg);
    FAIL("expected NonFiniteGradient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteGradient);
    CHECK(e.index() == 3);
  }
}

TEST_CASE("am config validation") {
  AmConfig c;
  c.step_size = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = AmConfig{};
  c.clip_lo = 1.0;
  c.clip_hi = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = AmConfig{};
  c.prior_every = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("image helpers") {
  Image img(2, 3, 1, std::vector<double>{1, 2, 3, 4, 5, 6});
  auto s = circular_shift(img, 1, 1);
  CHECK(s.at(0, 0) == 6.0);
  CHECK(s.at(1, 1) == 1.0);
  auto b = box_blur3(Image(3, 3, 1, 1.0));
  for (double v : b.pixels()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  auto c = box_blur3(Image(3, 3, 1, std::vector<double>{9, 0, 0, 0, 0, 0, 0, 0, 0}));
  CHECK(c.at(0, 0) == doctest::Approx(9.0 / 4.0).epsilon(1e-15));
  CHECK(c.at(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(Image(2, 2, 2), Error);
}
