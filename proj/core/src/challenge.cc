#include "vlbench/challenge.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include <fftw3.h>

#include "vlbench/types.h"

namespace vlbench {
namespace {

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDestroy>;

FftwBuffer AllocateComplex(std::size_t n) {
  auto* raw = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (raw == nullptr) throw std::bad_alloc();
  return FftwBuffer(raw);
}

// Signed frequency of DFT bin i out of n, so that bin 0 is the center after
// an fftshift.
int SignedFrequency(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

}  // namespace

GrayImage GrayFromRgb(int width, int height,
                      std::span<const std::uint8_t> rgb) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (rgb.size() != 3 * n) throw InvalidArgument("RGB buffer size mismatch");
  GrayImage gray{width, height, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    gray.pixels[i] = 0.299 * rgb[3 * i] + 0.587 * rgb[3 * i + 1] +
                     0.114 * rgb[3 * i + 2];
  }
  return gray;
}

BlurScore ComputeBlurScore(const GrayImage& image, const BlurConfig& config) {
  const int window = 2 * config.cutoff + 1;
  if (config.cutoff < 0 || image.width < window || image.height < window) {
    throw InvalidArgument("image " + std::to_string(image.width) + "x" +
                          std::to_string(image.height) +
                          " is smaller than the low-pass window " +
                          std::to_string(window));
  }
  const auto n = static_cast<std::size_t>(image.width) *
                 static_cast<std::size_t>(image.height);
  if (image.pixels.size() != n) throw InvalidArgument("pixel buffer size mismatch");

  FftwBuffer spatial = AllocateComplex(n);
  FftwBuffer spectrum = AllocateComplex(n);
  const FftwPlan forward(fftw_plan_dft_2d(image.height, image.width,
                                          spatial.get(), spectrum.get(),
                                          FFTW_FORWARD, FFTW_ESTIMATE));
  const FftwPlan inverse(fftw_plan_dft_2d(image.height, image.width,
                                          spectrum.get(), spatial.get(),
                                          FFTW_BACKWARD, FFTW_ESTIMATE));
  for (std::size_t i = 0; i < n; ++i) {
    spatial[i][0] = image.pixels[i];
    spatial[i][1] = 0.0;
  }
  fftw_execute(forward.get());

  for (int y = 0; y < image.height; ++y) {
    const bool keep_row = std::abs(SignedFrequency(y, image.height)) <= config.cutoff;
    for (int x = 0; x < image.width; ++x) {
      const bool keep =
          keep_row && std::abs(SignedFrequency(x, image.width)) <= config.cutoff;
      if (!keep) {
        const std::size_t i = static_cast<std::size_t>(y) * image.width + x;
        spectrum[i][0] = 0.0;
        spectrum[i][1] = 0.0;
      }
    }
  }
  fftw_execute(inverse.get());

  // FFTW's inverse is unnormalized.
  const double scale = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // The retained block is symmetric, so the reconstruction is real.
    const double reconstructed = spatial[i][0] * scale;
    total += std::abs(image.pixels[i] - reconstructed);
  }
  BlurScore score;
  score.mad = total / static_cast<double>(n);
  score.blurry = score.mad <= config.threshold;
  return score;
}

GrayImage GaussianBlur(const GrayImage& image, double sigma) {
  if (sigma < 0.0) throw InvalidArgument("negative blur sigma");
  if (sigma == 0.0) return image;
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const int w = image.width;
  const int h = image.height;
  GrayImage tmp{w, h, std::vector<double>(image.pixels.size())};
  GrayImage out{w, h, std::vector<double>(image.pixels.size())};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * image.at(std::clamp(x + i, 0, w - 1), y);
      }
      tmp.pixels[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp.at(x, std::clamp(y + i, 0, h - 1));
      }
      out.pixels[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

DynamicFraction ComputeDynamicFraction(const LabelMask& mask,
                                       const std::set<std::uint8_t>& dynamic_labels,
                                       const std::set<std::uint8_t>& known_labels,
                                       double min_fraction) {
  const auto n = static_cast<std::size_t>(mask.width) *
                 static_cast<std::size_t>(mask.height);
  if (n == 0 || mask.labels.size() != n) {
    throw InvalidArgument("label mask size mismatch");
  }
  DynamicFraction out;
  std::size_t dynamic = 0;
  for (std::uint8_t label : mask.labels) {
    if (!known_labels.empty() && !known_labels.contains(label)) {
      ++out.unknown_pixels;
      continue;
    }
    if (dynamic_labels.contains(label)) ++dynamic;
  }
  out.fraction = static_cast<double>(dynamic) / static_cast<double>(n);
  out.dynamic = out.fraction >= min_fraction;
  return out;
}

}  // namespace vlbench
