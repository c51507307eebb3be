#include "causal/image.hpp"

#include <cmath>

#include "causal/error.hpp"

namespace causal {

namespace {

void check_shape(std::size_t h, std::size_t w, std::size_t c) {
  if (h < 1 || w < 1) throw Error(ErrorKind::InvalidInput, "image needs H, W >= 1");
  if (c != 1 && c != 3) throw Error(ErrorKind::InvalidInput, "image needs 1 or 3 channels");
}

}  // namespace

Image::Image(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : h_(height), w_(width), c_(channels) {
  check_shape(h_, w_, c_);
  px_.assign(h_ * w_ * c_, fill);
}

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> pixels)
    : h_(height), w_(width), c_(channels), px_(std::move(pixels)) {
  check_shape(h_, w_, c_);
  if (px_.size() != h_ * w_ * c_) throw Error(ErrorKind::ShapeMismatch, "pixel count != H*W*C");
  for (double v : px_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "image pixels must be finite");
  }
}

Image circular_shift(const Image& img, long dy, long dx) {
  const long h = static_cast<long>(img.height());
  const long w = static_cast<long>(img.width());
  Image out(img.height(), img.width(), img.channels());
  for (long r = 0; r < h; ++r) {
    const long sr = ((r - dy) % h + h) % h;
    for (long c = 0; c < w; ++c) {
      const long sc = ((c - dx) % w + w) % w;
      for (std::size_t ch = 0; ch < img.channels(); ++ch) out.at(r, c, ch) = img.at(sr, sc, ch);
    }
  }
  return out;
}

Image box_blur3(const Image& img) {
  const long h = static_cast<long>(img.height());
  const long w = static_cast<long>(img.width());
  Image out(img.height(), img.width(), img.channels());
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      for (std::size_t ch = 0; ch < img.channels(); ++ch) {
        double sum = 0.0;
        int count = 0;
        for (long dr = -1; dr <= 1; ++dr) {
          for (long dc = -1; dc <= 1; ++dc) {
            const long rr = r + dr;
            const long cc = c + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            sum += img.at(rr, cc, ch);
            ++count;
          }
        }
        out.at(r, c, ch) = sum / count;
      }
    }
  }
  return out;
}

}  // namespace causal
