#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causal/am.hpp"
#include "causal/causality.hpp"
#include "causal/dataset.hpp"
#include "causal/enhancement.hpp"
#include "causal/factors.hpp"

namespace causal {

enum class Variant { Baseline, Cat, Mulcat, Cab, DamagedCat, DamagedMulcat };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);
Layout layout_of(Variant v);

// conv(3x3, pad 1) -> ReLU -> maxpool 2 -> conv(3x3, pad 1) -> ReLU -> maxpool 2
inline constexpr std::size_t kConv1Filters = 8;
inline constexpr std::size_t kConv2Filters = 16;
inline constexpr std::size_t kFeatureSide = 4;
inline constexpr std::size_t kNumClasses = 2;

struct DeskNetParams {
  Variant variant = Variant::Baseline;
  std::vector<double> conv1_w;  // [8][1][3][3]
  std::vector<double> conv1_b;  // [8]
  std::vector<double> conv2_w;  // [16][8][3][3]
  std::vector<double> conv2_b;  // [16]
  std::vector<double> fc_w;     // [2][width]
  std::vector<double> fc_b;     // [2]

  /// Classifier input width implied by fc_w.
  std::size_t fc_width() const noexcept { return fc_w.size() / kNumClasses; }
  std::size_t parameter_count() const noexcept;

  /// The six parameter groups, in declaration order.
  std::array<std::vector<double>*, 6> groups();
  std::array<const std::vector<double>*, 6> groups() const;
  static const std::array<const char*, 6>& group_names();

  /// Same shapes, all zeros.
  DeskNetParams zeros_like() const;
};

/// Classifier width for a variant: 256 for baseline/cab, 512 otherwise.
std::size_t classifier_width(Variant v);

/// He-uniform convolution weights, small positive biases, uniform classifier
/// weights scaled by 1/sqrt(width). Deterministic in `seed`.
DeskNetParams init_params(Variant v, std::uint64_t seed);

struct NetConfig {
  Variant variant = Variant::Baseline;
  FactorConfig factors;
  EstimatorConfig estimator;
  /// Route gradients through the causality map of the Cat variant. Only
  /// honoured for the Max estimator.
  bool cmap_backprop = true;
};

/// Intermediates kept for the backward pass.
struct ForwardCache {
  std::vector<double> input;      // 16 x 16
  std::vector<double> conv1;      // pre-activation, 8 x 16 x 16
  std::vector<double> pool1;      // 8 x 8 x 8
  std::vector<std::size_t> pool1_arg;
  std::vector<double> conv2;      // pre-activation, 16 x 8 x 8
  std::vector<double> features;   // 16 x 4 x 4 feature stack
  std::vector<std::size_t> pool2_arg;
  std::vector<double> payload;    // classifier input
  std::vector<double> factors;    // Mulcat / CAB weights, empty otherwise
  bool zero_stack = false;        // features were all zero; no causality signal
};

struct ForwardResult {
  std::array<double, 2> logits{};
  ForwardCache cache;
};

/// Throws ShapeMismatch when the image is not 16 x 16 x 1 or when
/// params.fc_width() disagrees with the variant's layout. `noise_key` seeds
/// the random map / factors of the damaged variants. A feature stack that is
/// entirely zero yields an all-zero causality map and zero factors. Non-finite
/// features give NaN logits.
ForwardResult forward(const DeskNetParams& params, const Image& image, const NetConfig& cfg,
                      std::uint64_t noise_key = 0);

struct LossAndGrads {
  double loss = 0.0;
  std::size_t correct = 0;
  DeskNetParams grads;
};

/// Mean softmax cross-entropy over the batch and its gradient by hand-rolled
/// reverse mode. Factors are constants; the Cat map is differentiated under
/// the Max estimator when cfg.cmap_backprop is set (max nodes route to their
/// first row-major maximum). Sample b of a damaged variant uses noise key
/// derive_seed(noise_key, b). Throws EmptyBatch.
LossAndGrads loss_and_grads(const DeskNetParams& params, std::span<const SyntheticSample> batch,
                            const NetConfig& cfg, std::uint64_t noise_key = 0);

/// Logit of `cls` and its gradient with respect to the input image.
ScoreResult logit_and_input_grad(const DeskNetParams& params, const Image& image, int cls,
                                 const NetConfig& cfg, std::uint64_t noise_key = 0);

/// Activation-maximization scorer backed by a trained desk net.
Scorer desknet_scorer(DeskNetParams params, NetConfig cfg, int cls);

struct TrainConfig {
  NetConfig net;
  int epochs = 30;
  int batch_size = 32;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  std::size_t n_samples = 2858;
  double train_fraction = 0.70;
  double val_fraction = 0.15;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  TrainConfig config;
  double test_accuracy = 0.0;
  std::size_t parameter_count = 0;
  int best_epoch = 0;
  std::vector<EpochMetrics> history;
  DeskNetParams params;  // weights from the best validation epoch
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Evaluates `indices` of `data`; sample i of a damaged variant draws its
/// noise from derive_seed(noise_key, i).
EvalResult evaluate(const DeskNetParams& params, const std::vector<SyntheticSample>& data,
                    std::span<const std::size_t> indices, const NetConfig& cfg,
                    std::uint64_t noise_key);

/// Mini-batch gradient descent on the synthetic dataset with a stratified
/// split. The test accuracy is measured with the weights of the epoch with
/// the best validation accuracy. Throws DivergedLoss (index() = epoch) when
/// the training loss stops being finite.
TrainResult train(const TrainConfig& cfg);

struct ArchitectureSpec {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t classes = 2;
  Variant variant = Variant::Baseline;
  std::size_t backbone_parameters = 0;
};

/// Backbone parameters plus the variant-dependent linear classifier.
std::size_t count_parameters(const ArchitectureSpec& spec);

/// Convolution and batch-norm parameters of ResNet-18 without its head.
std::size_t resnet18_backbone_parameters();

/// Convolution parameters of the desk net.
std::size_t desknet_backbone_parameters();

}  // namespace causal
