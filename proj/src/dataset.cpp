#include "causal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "causal/error.hpp"
#include "causal/rng.hpp"

namespace causal {

namespace {

constexpr int kSide = static_cast<int>(kSampleSide);
constexpr int kBlob = 3;
constexpr int kDistractor = 2;
constexpr double kNoiseSigma = 0.05;

struct Box {
  int row, col, size;
  bool overlaps(const Box& o) const {
    return row < o.row + o.size && o.row < row + size && col < o.col + o.size && o.col < col + size;
  }
};

void stamp(Image& img, int row, int col, const std::vector<double>& tmpl, int size) {
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double& px = img.at(row + r, col + c);
      px = std::max(px, tmpl[r * size + c]);
    }
  }
}

}  // namespace

const std::vector<double>& blob_a_template() {
  static const std::vector<double> t{0, 1, 0,  //
                                     1, 1, 1,  //
                                     0, 1, 0};
  return t;
}

const std::vector<double>& blob_b_template() {
  static const std::vector<double> t{1, 1, 1,  //
                                     1, 0, 1,  //
                                     1, 1, 1};
  return t;
}

std::vector<SyntheticSample> generate_dataset(std::size_t n_samples, std::uint64_t seed,
                                              std::vector<BlobLayout>* layouts) {
  if (n_samples < 2) throw Error(ErrorKind::InvalidInput, "dataset needs at least 2 samples");
  static const std::vector<double> distractor(kDistractor * kDistractor, 0.8);

  // A and B share these ranges in both classes, so the classes differ only in
  // the joint placement.
  const int max_row = kSide - kBlob;
  const int a_max_col = kSide - kBlob - kPairColOffset;
  const int b_min_col = kPairColOffset;

  SplitMix64 rng(seed);
  std::vector<SyntheticSample> out;
  out.reserve(n_samples);
  if (layouts) layouts->clear();

  for (std::size_t s = 0; s < n_samples; ++s) {
    const int label = static_cast<int>(s % 2);
    BlobLayout lay;
    lay.a_row = static_cast<int>(rng.below(max_row + 1));
    lay.a_col = static_cast<int>(rng.below(a_max_col + 1));
    if (label == 1) {
      lay.b_row = lay.a_row + kPairRowOffset;
      lay.b_col = lay.a_col + kPairColOffset;
    } else {
      for (;;) {
        lay.b_row = static_cast<int>(rng.below(max_row + 1));
        lay.b_col = b_min_col + static_cast<int>(rng.below(kSide - kBlob - b_min_col + 1));
        const bool paired = lay.b_row - lay.a_row == kPairRowOffset &&
                            lay.b_col - lay.a_col == kPairColOffset;
        const bool overlap = Box{lay.a_row, lay.a_col, kBlob}.overlaps({lay.b_row, lay.b_col, kBlob});
        if (!paired && !overlap) break;
      }
    }

    std::vector<Box> placed{{lay.a_row, lay.a_col, kBlob}, {lay.b_row, lay.b_col, kBlob}};
    const int n_distractors = static_cast<int>(rng.below(3));
    for (int d = 0; d < n_distractors; ++d) {
      for (int attempt = 0; attempt < 100; ++attempt) {
        const Box box{static_cast<int>(rng.below(kSide - kDistractor + 1)),
                      static_cast<int>(rng.below(kSide - kDistractor + 1)), kDistractor};
        if (std::none_of(placed.begin(), placed.end(), [&](const Box& p) { return p.overlaps(box); })) {
          placed.push_back(box);
          lay.distractors.emplace_back(box.row, box.col);
          break;
        }
      }
    }

    Image img(kSampleSide, kSampleSide, 1);
    stamp(img, lay.a_row, lay.a_col, blob_a_template(), kBlob);
    stamp(img, lay.b_row, lay.b_col, blob_b_template(), kBlob);
    for (const auto& [r, c] : lay.distractors) stamp(img, r, c, distractor, kDistractor);
    for (double& px : img.pixels()) px = std::clamp(px + kNoiseSigma * rng.normal(), 0.0, 1.0);

    out.push_back({std::move(img), label});
    if (layouts) layouts->push_back(std::move(lay));
  }
  return out;
}

DatasetSplit split_dataset(const std::vector<SyntheticSample>& data, double train_fraction,
                           double val_fraction, std::uint64_t seed) {
  if (train_fraction <= 0.0 || val_fraction < 0.0 || train_fraction + val_fraction >= 1.0) {
    throw Error(ErrorKind::InvalidInput, "split fractions must leave a non-empty test share");
  }
  SplitMix64 rng(seed);
  DatasetSplit split;
  for (int label : {0, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i].label == label) idx.push_back(i);
    }
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * idx.size()));
    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * idx.size()));
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + n_train);
    split.val.insert(split.val.end(), idx.begin() + n_train, idx.begin() + n_train + n_val);
    split.test.insert(split.test.end(), idx.begin() + n_train + n_val, idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

void write_dataset_csv(std::ostream& out, const std::vector<SyntheticSample>& data) {
  out << "label";
  for (std::size_t i = 0; i < kSampleSide * kSampleSide; ++i) out << ",p" << i;
  out << '\n' << std::setprecision(17);
  for (const auto& s : data) {
    out << s.label;
    for (double v : s.image.pixels()) out << ',' << v;
    out << '\n';
  }
}

}  // namespace causal
