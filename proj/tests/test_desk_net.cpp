#include <doctest.h>

#include "causal/dataset.hpp"
#include "causal/desk_net.hpp"
#include "causal/error.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

const Variant kAll[] = {Variant::Baseline,   Variant::Cat,          Variant::Mulcat,
                        Variant::Cab,        Variant::DamagedCat,   Variant::DamagedMulcat};

std::vector<SyntheticSample> random_batch(SplitMix64& rng, std::size_t b) {
  std::vector<SyntheticSample> out;
  for (std::size_t i = 0; i < b; ++i) {
    Image img(16, 16, 1);
    for (double& v : img.pixels()) v = rng.uniform();
    out.push_back({std::move(img), static_cast<int>(rng.below(2))});
  }
  return out;
}

// Worst relative error over every parameter group, on up to `per_group`
// randomly chosen coordinates of each (all of them when the group is small).
double param_grad_error(const DeskNetParams& params, const std::vector<SyntheticSample>& batch,
                        const NetConfig& cfg, std::uint64_t key, SplitMix64& rng, std::size_t per_group) {
  const auto lg = loss_and_grads(params, batch, cfg, key);
  double worst = 0.0;
  for (std::size_t g = 0; g < 6; ++g) {
    const std::vector<double>& full = *params.groups()[g];
    const auto idx = oracle::distinct_indices(rng, full.size(), per_group);
    std::vector<double> analytic, x;
    for (std::size_t i : idx) {
      analytic.push_back((*lg.grads.groups()[g])[i]);
      x.push_back(full[i]);
    }
    auto f = [&](const std::vector<double>& v) {
      DeskNetParams p = params;
      for (std::size_t t = 0; t < idx.size(); ++t) (*p.groups()[g])[idx[t]] = v[t];
      return loss_and_grads(p, batch, cfg, key).loss;
    };
    const double e = oracle::rel_err(analytic, oracle::finite_diff(f, x));
    CHECK_MESSAGE(e <= 1e-4, to_string(cfg.variant) << " group " << std::string(DeskNetParams::group_names()[g]));
    worst = std::max(worst, e);
  }
  return worst;
}

}  // namespace

TEST_CASE("classifier widths per variant") {
  CHECK(classifier_width(Variant::Baseline) == 256);
  CHECK(classifier_width(Variant::Mulcat) == 512);
  CHECK(classifier_width(Variant::Cat) == 512);
  CHECK(classifier_width(Variant::Cab) == 256);
  SplitMix64 rng(61);
  auto batch = random_batch(rng, 1);
  for (Variant v : kAll) {
    auto p = init_params(v, 3);
    CHECK(p.fc_width() == classifier_width(v));
    NetConfig cfg;
    cfg.variant = v;
    auto r = forward(p, batch[0].image, cfg, 9);
    CHECK(r.cache.payload.size() == classifier_width(v));
    CHECK(std::isfinite(r.logits[0]));
  }
}

TEST_CASE("forward rejects a classifier of the wrong width and a wrong image") {
  auto p = init_params(Variant::Baseline, 1);
  NetConfig cat;
  cat.variant = Variant::Cat;
  try {
    forward(p, Image(16, 16, 1), cat);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ShapeMismatch);
  }
  CHECK_THROWS_AS(forward(p, Image(8, 8, 1), NetConfig{}), Error);
}

TEST_CASE("an all-zero feature stack is handled") {
  // negative biases and zero weights keep every activation at 0
  for (Variant v : kAll) {
    auto p = init_params(v, 2);
    for (auto* g : {&p.conv1_w, &p.conv2_w}) std::fill(g->begin(), g->end(), 0.0);
    std::fill(p.conv1_b.begin(), p.conv1_b.end(), -1.0);
    std::fill(p.conv2_b.begin(), p.conv2_b.end(), -1.0);
    NetConfig cfg;
    cfg.variant = v;
    auto r = forward(p, Image(16, 16, 1, 0.5), cfg, 4);
    CHECK(r.cache.zero_stack);
    CHECK(std::isfinite(r.logits[0]));
    SyntheticSample s{Image(16, 16, 1, 0.5), 1};
    auto lg = loss_and_grads(p, std::span<const SyntheticSample>(&s, 1), cfg, 4);
    CHECK(std::isfinite(lg.loss));
  }
}

TEST_CASE("parameter gradients match central differences for every variant") {
  SplitMix64 rng(62);
  for (Variant v : kAll) {
    for (int rep = 0; rep < 2; ++rep) {
      auto batch = random_batch(rng, 4);
      auto p = init_params(v, rng.next());
      NetConfig cfg;
      cfg.variant = v;
      param_grad_error(p, batch, cfg, rng.next(), rng, 60);
    }
  }
}

TEST_CASE("cat gradients with and without the map backward pass") {
  SplitMix64 rng(63);
  auto batch = random_batch(rng, 4);
  auto p = init_params(Variant::Cat, 5);
  NetConfig on;
  on.variant = Variant::Cat;
  NetConfig off = on;
  off.cmap_backprop = false;
  auto a = loss_and_grads(p, batch, on);
  auto b = loss_and_grads(p, batch, off);
  CHECK(a.loss == b.loss);
  CHECK(a.grads.fc_w == b.grads.fc_w);
  CHECK(a.grads.conv1_w != b.grads.conv1_w);

  // every coordinate, map path included
  auto on_full = param_grad_error(p, batch, on, 0, rng, 2000);
  CHECK(on_full <= 1e-4);
}

TEST_CASE("input gradient matches central differences") {
  SplitMix64 rng(64);
  for (Variant v : kAll) {
    auto p = init_params(v, rng.next());
    auto img = random_batch(rng, 1)[0].image;
    NetConfig cfg;
    cfg.variant = v;
    const std::uint64_t key = rng.next();
    for (int cls : {0, 1}) {
      auto r = logit_and_input_grad(p, img, cls, cfg, key);
      auto f = [&](const std::vector<double>& x) {
        return forward(p, Image(16, 16, 1, x), cfg, key).logits[cls];
      };
      const std::vector<double> x(img.pixels().begin(), img.pixels().end());
      const std::vector<double> a(r.gradient.pixels().begin(), r.gradient.pixels().end());
      CHECK_MESSAGE(oracle::rel_err(a, oracle::finite_diff(f, x)) <= 1e-4, to_string(v));
      CHECK(r.activation == forward(p, img, cfg, key).logits[cls]);
    }
  }
}

TEST_CASE("duplicated samples give the single-sample gradient") {
  SplitMix64 rng(65);
  auto one = random_batch(rng, 1);
  std::vector<SyntheticSample> two{one[0], one[0]};
  for (Variant v : {Variant::Baseline, Variant::Cat, Variant::Mulcat, Variant::Cab}) {
    auto p = init_params(v, 8);
    NetConfig cfg;
    cfg.variant = v;
    auto a = loss_and_grads(p, one, cfg);
    auto b = loss_and_grads(p, two, cfg);
    CHECK(std::abs(a.loss - b.loss) <= 1e-15);
    for (std::size_t g = 0; g < 6; ++g) {
      CHECK(oracle::max_abs_diff(*a.grads.groups()[g], *b.grads.groups()[g]) <= 1e-15);
    }
  }
  CHECK_THROWS_AS(loss_and_grads(init_params(Variant::Baseline, 1), {}, NetConfig{}), Error);
}

TEST_CASE("a zero-rate step leaves the loss unchanged") {
  SplitMix64 rng(66);
  auto batch = random_batch(rng, 4);
  auto p = init_params(Variant::Mulcat, 4);
  NetConfig cfg;
  cfg.variant = Variant::Mulcat;
  auto lg = loss_and_grads(p, batch, cfg);
  DeskNetParams q = p;
  for (std::size_t g = 0; g < 6; ++g) {
    for (std::size_t i = 0; i < q.groups()[g]->size(); ++i) (*q.groups()[g])[i] -= 0.0 * (*lg.grads.groups()[g])[i];
  }
  CHECK(loss_and_grads(q, batch, cfg).loss == lg.loss);
}

TEST_CASE("parameter counts") {
  ArchitectureSpec r18{512, 4, 2, Variant::Baseline, resnet18_backbone_parameters()};
  CHECK(resnet18_backbone_parameters() == 11176512);
  auto with = [&](Variant v) {
    auto s = r18;
    s.variant = v;
    return count_parameters(s);
  };
  CHECK(with(Variant::Cat) - with(Variant::Baseline) == 524288);
  CHECK(with(Variant::Mulcat) - with(Variant::Baseline) == 16384);
  CHECK(with(Variant::Cab) == with(Variant::Baseline));
  CHECK(std::lround(with(Variant::Baseline) / 1e4) == 1119);
  CHECK(std::lround(with(Variant::Cat) / 1e4) == 1172);
  CHECK(std::lround(with(Variant::Mulcat) / 1e4) == 1121);

  for (std::size_t k = 2; k < 20; ++k) {
    for (std::size_t n = 1; n < 6; ++n) {
      ArchitectureSpec s{k, n, 2, Variant::Baseline, 1000};
      auto c = [&](Variant v) {
        s.variant = v;
        return count_parameters(s);
      };
      // cat adds the k x k map, mulcat a second copy of the stack
      CHECK(c(Variant::Cat) - c(Variant::Baseline) == 2 * k * k);
      CHECK(c(Variant::Mulcat) - c(Variant::Baseline) == 2 * k * n * n);
      CHECK(c(Variant::Baseline) == 1000 + 2 * (k * n * n + 1));
      CHECK(c(Variant::Baseline) == c(Variant::Cab));
      CHECK((c(Variant::Cat) > c(Variant::Mulcat)) == (k > n * n));
    }
  }
  for (Variant v : kAll) {
    ArchitectureSpec s{16, 4, 2, v, desknet_backbone_parameters()};
    CHECK(count_parameters(s) == init_params(v, 0).parameter_count());
  }
}

TEST_CASE("dataset basics") {
  std::vector<BlobLayout> lay;
  auto d = generate_dataset(100, 5, &lay);
  int ones = 0;
  for (const auto& s : d) {
    ones += s.label;
    for (double v : s.image.pixels()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(ones == 50);
  auto e = generate_dataset(100, 5);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i].image == e[i].image);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool paired = lay[i].b_row - lay[i].a_row == kPairRowOffset && lay[i].b_col - lay[i].a_col == kPairColOffset;
    CHECK(paired == (d[i].label == 1));
  }
  auto split = split_dataset(d, 0.7, 0.15, 3);
  CHECK(split.train.size() == 70);
  CHECK(split.val.size() == 16);
  CHECK(split.test.size() == 14);
  CHECK_THROWS_AS(generate_dataset(1, 0), Error);
}

TEST_CASE("dataset signal is relational, not positional") {
  auto data = generate_dataset(3000, 17);
  auto split = split_dataset(data, 2.0 / 3.0, 0.0, 18);

  // logistic regression on raw pixels, full-batch gradient descent
  std::vector<double> w(257, 0.0);
  for (int it = 0; it < 300; ++it) {
    std::vector<double> g(257, 0.0);
    for (std::size_t i : split.train) {
      double z = w[256];
      for (std::size_t p = 0; p < 256; ++p) z += w[p] * data[i].image[p];
      const double err = 1.0 / (1.0 + std::exp(-z)) - data[i].label;
      for (std::size_t p = 0; p < 256; ++p) g[p] += err * data[i].image[p];
      g[256] += err;
    }
    for (std::size_t p = 0; p < 257; ++p) w[p] -= 0.5 * g[p] / static_cast<double>(split.train.size());
  }
  int linear_ok = 0, pair_ok = 0;
  const auto& ta = blob_a_template();
  const auto& tb = blob_b_template();
  auto best = [](const Image& img, const std::vector<double>& t) {
    double best_ssd = 1e300;
    std::pair<int, int> at{0, 0};
    for (int r = 0; r <= 13; ++r) {
      for (int c = 0; c <= 13; ++c) {
        double ssd = 0.0;
        for (int i = 0; i < 9; ++i) {
          const double d = img.at(r + i / 3, c + i % 3) - t[i];
          ssd += d * d;
        }
        if (ssd < best_ssd) {
          best_ssd = ssd;
          at = {r, c};
        }
      }
    }
    return at;
  };
  for (std::size_t i : split.test) {
    double z = w[256];
    for (std::size_t p = 0; p < 256; ++p) z += w[p] * data[i].image[p];
    linear_ok += (z > 0) == (data[i].label == 1);
    const auto a = best(data[i].image, ta);
    const auto b = best(data[i].image, tb);
    const bool paired = b.first - a.first == kPairRowOffset && b.second - a.second == kPairColOffset;
    pair_ok += paired == (data[i].label == 1);
  }
  const double n = static_cast<double>(split.test.size());
  MESSAGE("linear " << linear_ok / n << ", pair-distance " << pair_ok / n);
  CHECK(linear_ok / n < 0.95);
  CHECK(pair_ok / n > 0.99);
}

TEST_CASE("training is deterministic and reports divergence") {
  TrainConfig cfg;
  cfg.net.variant = Variant::DamagedMulcat;
  cfg.n_samples = 200;
  cfg.epochs = 2;
  cfg.seed = 9;
  auto a = train(cfg);
  auto b = train(cfg);
  CHECK(a.test_accuracy == b.test_accuracy);
  CHECK(a.params.fc_w == b.params.fc_w);
  REQUIRE(a.history.size() == 2);
  CHECK(a.history[1].train_loss == b.history[1].train_loss);
  CHECK(a.parameter_count == init_params(Variant::DamagedMulcat, 0).parameter_count());

  cfg.learning_rate = 1e250;
  cfg.net.variant = Variant::Baseline;
  try {
    train(cfg);
    FAIL("expected DivergedLoss");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivergedLoss);
    CHECK(e.index() >= 0);
  }
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(cfg), Error);
}

TEST_CASE("baseline learns something on 2000 training images") {
  TrainConfig cfg;
  cfg.n_samples = 3000;
  cfg.train_fraction = 2.0 / 3.0;
  cfg.val_fraction = 1.0 / 6.0;
  cfg.epochs = 30;
  cfg.seed = 100;
  auto r = train(cfg);
  MESSAGE("baseline test accuracy " << r.test_accuracy);
  CHECK(r.test_accuracy > 0.6);
}
