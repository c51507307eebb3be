#include <doctest.h>

#include "causal/causality.hpp"
#include "causal/enhancement.hpp"
#include "causal/error.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

FactorVector fv(std::vector<double> w, WeighMode m = WeighMode::Full) { return {std::move(w), {Direction::Causes, m}}; }

}  // namespace

TEST_CASE("cat layout") {
  FeatureStack s(2, 2, {1, 2, 3, 4, 5, 6, 7, 8});
  auto c = compute_causality_map(s, {});
  auto e = enhance_cat(s, c);
  REQUIRE(e.payload.size() == 12);
  CHECK(std::equal(s.values().begin(), s.values().end(), e.payload.begin()));
  CHECK(std::equal(c.entries().begin(), c.entries().end(), e.payload.begin() + 8));
  CHECK(layout_width(Layout::Cat, 512, 4) == 270336);
  CHECK_THROWS_AS(enhance_cat(s, CausalityMap(3, std::vector<double>(9, 0.0))), Error);
}

TEST_CASE("mulcat layout") {
  FeatureStack s(2, 1, {3, 4});
  CHECK(enhance_mulcat(s, fv({2, 0})).payload == std::vector<double>{3, 4, 6, 0});

  SplitMix64 rng(31);
  auto r = oracle::random_stack(rng, 5, 3);
  auto zero = enhance_mulcat(r, fv(std::vector<double>(5, 0.0)));
  for (std::size_t i = 45; i < 90; ++i) CHECK(zero.payload[i] == 0.0);
  auto ones = enhance_mulcat(r, fv(std::vector<double>(5, 1.0), WeighMode::Bool));
  for (std::size_t i = 0; i < 45; ++i) CHECK(ones.payload[45 + i] == ones.payload[i]);
  CHECK_THROWS_AS(enhance_mulcat(r, fv({1, 1})), Error);
}

TEST_CASE("cab layout") {
  SplitMix64 rng(32);
  auto s = oracle::random_stack(rng, 3, 2);
  auto same = enhance_cab(s, fv({0, 0, 0}));
  CHECK(std::equal(s.values().begin(), s.values().end(), same.payload.begin()));
  auto dbl = enhance_cab(s, fv({2, 2, 2}));
  for (std::size_t i = 0; i < s.values().size(); ++i) CHECK(dbl.payload[i] == 2.0 * s.values()[i]);
  CHECK(cab_gains(fv({2, 0, 1})) == std::vector<double>{2.0, 1.0, 1.5});
  CHECK(same.payload.size() == layout_width(Layout::Cab, 3, 2));
}

TEST_CASE("damaged cat") {
  SplitMix64 rng(33);
  auto s = oracle::random_stack(rng, 4, 3);
  auto a = damaged_cat(s, 77);
  auto b = damaged_cat(s, 77);
  CHECK(a.payload == b.payload);
  auto real = enhance_cat(s, compute_causality_map(s, {}));
  CHECK(std::equal(real.payload.begin(), real.payload.begin() + 36, a.payload.begin()));
  for (std::size_t i = 36; i < a.payload.size(); ++i) {
    CHECK(a.payload[i] >= 0.0);
    CHECK(a.payload[i] < 1.0);
  }
  CHECK(damaged_cat(s, 78).payload != a.payload);
}

TEST_CASE("property: layout lengths, bool mulcat never grows, cab gains in [1, 2]") {
  SplitMix64 rng(34);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = 2 + rng.below(10), n = 1 + rng.below(5);
    auto s = oracle::random_stack(rng, k, n);
    auto c = compute_causality_map(s, {});
    std::vector<double> full(k), flags(k);
    for (std::size_t i = 0; i < k; ++i) {
      full[i] = static_cast<double>(rng.below(k));
      flags[i] = static_cast<double>(rng.below(2));
    }
    CHECK(enhance_baseline(s).payload.size() == layout_width(Layout::Baseline, k, n));
    CHECK(enhance_cat(s, c).payload.size() == layout_width(Layout::Cat, k, n));
    CHECK(enhance_cab(s, fv(full)).payload.size() == layout_width(Layout::Cab, k, n));
    auto mb = enhance_mulcat(s, fv(flags, WeighMode::Bool));
    REQUIRE(mb.payload.size() == layout_width(Layout::Mulcat, k, n));
    const std::size_t half = k * n * n;
    for (std::size_t i = 0; i < half; ++i) CHECK(mb.payload[half + i] <= mb.payload[i]);
    for (double g : cab_gains(fv(full))) {
      CHECK(g >= 1.0);
      CHECK(g <= 2.0);
    }
  }
}
