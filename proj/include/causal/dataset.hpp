#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "causal/image.hpp"

namespace causal {

inline constexpr std::size_t kSampleSide = 16;

struct SyntheticSample {
  Image image;  // 16 x 16 x 1, pixels in [0, 1]
  int label = 0;
};

/// Where the generator put each blob; kept for inspection and for tests.
struct BlobLayout {
  int a_row = 0, a_col = 0;
  int b_row = 0, b_col = 0;
  std::vector<std::pair<int, int>> distractors;
};

/// Blob B sits this far from blob A in every class-1 image and never in a
/// class-0 image.
inline constexpr int kPairRowOffset = 0;
inline constexpr int kPairColOffset = 6;

/// Two-class co-occurrence images. Every image holds a "plus" blob A, a
/// "ring" blob B and 0-2 solid 2x2 distractors on a dark background, plus
/// N(0, 0.05^2) pixel noise clipped to [0, 1]. In class 1, B is placed at a
/// fixed offset from A; in class 0, A and B are drawn independently from the
/// same marginals and the class-1 offset is rejected. Classes alternate, so
/// an even count is exactly balanced.
std::vector<SyntheticSample> generate_dataset(std::size_t n_samples, std::uint64_t seed,
                                              std::vector<BlobLayout>* layouts = nullptr);

/// Rendered 3x3 templates, row-major, for the two blob types.
const std::vector<double>& blob_a_template();
const std::vector<double>& blob_b_template();

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Stratified, seeded split of sample indices. Fractions apply per class;
/// the test split gets the remainder.
DatasetSplit split_dataset(const std::vector<SyntheticSample>& data, double train_fraction,
                           double val_fraction, std::uint64_t seed);

/// One row per sample: label followed by 256 pixel values.
void write_dataset_csv(std::ostream& out, const std::vector<SyntheticSample>& data);

}  // namespace causal
