#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace causal {

/// H x W x C image, channels interleaved (HWC).
class Image {
 public:
  Image() = default;
  /// Throws InvalidInput unless H, W >= 1 and C is 1 or 3.
  Image(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> pixels);

  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  std::size_t channels() const noexcept { return c_; }
  std::size_t size() const noexcept { return px_.size(); }

  double& at(std::size_t r, std::size_t c, std::size_t ch = 0) noexcept {
    return px_[(r * w_ + c) * c_ + ch];
  }
  double at(std::size_t r, std::size_t c, std::size_t ch = 0) const noexcept {
    return px_[(r * w_ + c) * c_ + ch];
  }
  double& operator[](std::size_t i) noexcept { return px_[i]; }
  double operator[](std::size_t i) const noexcept { return px_[i]; }

  std::span<double> pixels() noexcept { return px_; }
  std::span<const double> pixels() const noexcept { return px_; }

  bool same_shape(const Image& o) const noexcept {
    return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }
  bool operator==(const Image& o) const = default;

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::size_t c_ = 0;
  std::vector<double> px_;
};

/// out(r, c) = in(r - dy mod H, c - dx mod W).
Image circular_shift(const Image& img, long dy, long dx);

/// 3x3 mean filter; border pixels average only their in-bounds neighbours.
Image box_blur3(const Image& img);

}  // namespace causal
