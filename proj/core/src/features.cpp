#include "amvs/features.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "amvs/error.hpp"
#include "amvs/parallel.hpp"

namespace amvs {
namespace {

struct Offset {
  int dy;
  int dx;
};

// Census neighbours ordered ring by ring, row-major within a ring, so a cap
// keeps the closest comparisons.
std::vector<Offset> census_offsets(int window) {
  const int r = window / 2;
  std::vector<Offset> offsets;
  for (int ring = 1; ring <= r; ++ring) {
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dy), std::abs(dx)) == ring) offsets.push_back({dy, dx});
      }
    }
  }
  if (offsets.size() > static_cast<std::size_t>(kMaxCensusBits)) offsets.resize(kMaxCensusBits);
  return offsets;
}

}  // namespace

GrayImage to_grayscale(const ColorImage& image) {
  GrayImage gray(image.dim0(), image.dim1());
  for (int y = 0; y < image.dim0(); ++y) {
    for (int x = 0; x < image.dim1(); ++x) {
      gray(y, x) = (0.299 * image(y, x, 0) + 0.587 * image(y, x, 1) + 0.114 * image(y, x, 2)) / 255.0;
    }
  }
  return gray;
}

int feature_channels(int window) {
  return 3 + std::min(window * window - 1, kMaxCensusBits);
}

FeatureMap extract_raw_features(const GrayImage& image, int window) {
  require(window >= 3 && window % 2 == 1, ErrorCode::InvalidConfig, "census window must be odd and at least 3");
  const int h = image.height();
  const int w = image.width();
  require(h >= window && w >= window, ErrorCode::ImageTooSmall, "image is smaller than the census window");

  const auto offsets = census_offsets(window);
  const int channels = 3 + static_cast<int>(offsets.size());
  FeatureMap out(h, w, channels, 0.0);
  parallel_for(0, h, [&](int y) {
    for (int x = 0; x < w; ++x) {
      const double center = image(y, x);
      out(y, x, 0) = center;
      out(y, x, 1) = x + 1 < w ? image(y, x + 1) - center : 0.0;
      out(y, x, 2) = y + 1 < h ? image(y + 1, x) - center : 0.0;
      for (std::size_t k = 0; k < offsets.size(); ++k) {
        const int sy = std::clamp(y + offsets[k].dy, 0, h - 1);
        const int sx = std::clamp(x + offsets[k].dx, 0, w - 1);
        out(y, x, 3 + static_cast<int>(k)) = image(sy, sx) < center ? 1.0 : 0.0;
      }
    }
  });
  return out;
}

void normalize_channels(FeatureMap& features) {
  const int h = features.dim0();
  const int w = features.dim1();
  const int c = features.dim2();
  const double n = static_cast<double>(h) * w;
  for (int k = 0; k < c; ++k) {
    double sum = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) sum += features(y, x, k);
    const double mean = sum / n;
    double sq = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double d = features(y, x, k) - mean;
        sq += d * d;
      }
    const double stddev = std::sqrt(sq / n);
    const bool constant = !(stddev > 1e-12 * std::max(1.0, std::abs(mean)));
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double& v = features(y, x, k);
        v = constant ? 0.0 : (v - mean) / stddev;
      }
  }
}

FeatureMap extract_features(const GrayImage& image, int window) {
  FeatureMap features = extract_raw_features(image, window);
  normalize_channels(features);
  return features;
}

GrayImage pad_to_multiple(const GrayImage& image, int multiple) {
  const int h = (image.height() + multiple - 1) / multiple * multiple;
  const int w = (image.width() + multiple - 1) / multiple * multiple;
  if (h == image.height() && w == image.width()) return image;
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out(y, x) = image(std::min(y, image.height() - 1), std::min(x, image.width() - 1));
  return out;
}

GrayImage downsample_box(const GrayImage& image, int factor) {
  require(factor >= 1 && (factor & (factor - 1)) == 0, ErrorCode::InvalidConfig, "factor must be a power of two");
  require(image.height() % factor == 0 && image.width() % factor == 0, ErrorCode::ShapeMismatch,
          "image dimensions must be divisible by the downsampling factor");
  GrayImage current = image;
  for (int f = factor; f > 1; f /= 2) {
    GrayImage half(current.height() / 2, current.width() / 2);
    for (int y = 0; y < half.height(); ++y) {
      for (int x = 0; x < half.width(); ++x) {
        half(y, x) = 0.25 * ((current(2 * y, 2 * x) + current(2 * y, 2 * x + 1)) +
                             (current(2 * y + 1, 2 * x) + current(2 * y + 1, 2 * x + 1)));
      }
    }
    current = std::move(half);
  }
  return current;
}

FeaturePyramid build_pyramid(const GrayImage& image, int window) {
  require(!image.empty(), ErrorCode::ImageTooSmall, "empty image");
  FeaturePyramid pyramid;
  pyramid.source_height = image.height();
  pyramid.source_width = image.width();
  const GrayImage padded = pad_to_multiple(image, 8);
  require(padded.height() / 8 >= window && padded.width() / 8 >= window, ErrorCode::ImageTooSmall,
          "coarsest pyramid level is smaller than the census window");
  // Each level halves the previous one, so levels share their box sums.
  pyramid.images[kPyramidLevels - 1] = padded;
  for (int k = kPyramidLevels - 2; k >= 0; --k) pyramid.images[k] = downsample_box(pyramid.images[k + 1], 2);
  for (int k = 0; k < kPyramidLevels; ++k) pyramid.levels[k] = extract_features(pyramid.images[k], window);
  return pyramid;
}

}  // namespace amvs
