#pragma once

#include <array>
#include <cstdint>

#include "amvs/array.hpp"

namespace amvs {

using GrayImage = Array2<double>;
using ColorImage = Array3<std::uint8_t>;  // H x W x 3, RGB

// H x W x C feature vectors. Channel order: intensity, x-gradient,
// y-gradient, then census bits.
using FeatureMap = Array3<double>;

inline constexpr int kDefaultCensusWindow = 5;
inline constexpr int kMaxCensusBits = 24;
inline constexpr int kPyramidLevels = 4;

// (0.299, 0.587, 0.114) luma, scaled to [0, 1].
GrayImage to_grayscale(const ColorImage& image);

int feature_channels(int window);

// Unnormalized channels; translation-equivariant away from the borders.
FeatureMap extract_raw_features(const GrayImage& image, int window = kDefaultCensusWindow);

// Shifts every channel to zero mean and scales it to unit population
// variance. Zero-variance channels become all zero.
void normalize_channels(FeatureMap& features);

FeatureMap extract_features(const GrayImage& image, int window = kDefaultCensusWindow);

GrayImage pad_to_multiple(const GrayImage& image, int multiple);
// Repeated 2x box averaging; factor must be a power of two dividing both dimensions.
GrayImage downsample_box(const GrayImage& image, int factor);

struct FeaturePyramid {
  // Level k has scale 2^k / 8 of the padded input: 1/8, 1/4, 1/2, 1.
  std::array<FeatureMap, kPyramidLevels> levels;
  std::array<GrayImage, kPyramidLevels> images;
  int source_height = 0;
  int source_width = 0;
};

FeaturePyramid build_pyramid(const GrayImage& image, int window = kDefaultCensusWindow);

}  // namespace amvs
