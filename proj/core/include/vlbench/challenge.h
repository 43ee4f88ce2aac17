#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace vlbench {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major intensities

  double at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

// Luminance 0.299 R + 0.587 G + 0.114 B of interleaved 8-bit RGB.
GrayImage GrayFromRgb(int width, int height, std::span<const std::uint8_t> rgb);

struct BlurConfig {
  int cutoff = 60;
  double threshold = 20.0;
};

struct BlurScore {
  double mad = 0.0;
  bool blurry = false;
};

// Mean absolute difference between the image and its reconstruction from
// the centered (2 cutoff + 1)^2 block of low Fourier frequencies. Small
// values mean little high-frequency content; blurry iff mad <= threshold.
// Throws InvalidArgument if either side is smaller than 2 cutoff + 1.
BlurScore ComputeBlurScore(const GrayImage& image, const BlurConfig& config = {});

// Separable Gaussian blur, kernel truncated at 4 sigma, borders clamped.
// sigma = 0 returns the image unchanged.
GrayImage GaussianBlur(const GrayImage& image, double sigma);

struct LabelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;
};

struct DynamicFraction {
  double fraction = 0.0;
  bool dynamic = false;
  // Pixels whose label is not in the known label table; counted as static.
  std::size_t unknown_pixels = 0;
};

// Share of pixels whose label is in `dynamic_labels`; dynamic iff the share
// is at least `min_fraction`. An empty `known_labels` disables the unknown
// label check.
DynamicFraction ComputeDynamicFraction(const LabelMask& mask,
                                       const std::set<std::uint8_t>& dynamic_labels,
                                       const std::set<std::uint8_t>& known_labels = {},
                                       double min_fraction = 0.20);

}  // namespace vlbench
