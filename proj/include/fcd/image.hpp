#ifndef FCD_IMAGE_HPP
#define FCD_IMAGE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcd/lzw.hpp"

namespace fcd {

/// Row-major 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height, r g b interleaved

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("RgbImage: empty raster");
    pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
  }

  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
};

/// Hue in [0, 1), saturation and value in [0, 1].
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

struct HsvImage {
  int width = 0;
  int height = 0;
  std::vector<HsvPixel> pixels;

  const HsvPixel& at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

/// Quantization and stringification parameters.
struct PipelineConfig {
  int hue_bins = 16;
  int sat_bins = 4;
  int val_bins = 4;
  double texture_threshold = 0.4;  // t in [0, 1]
  int target_side = 64;

  int color_levels() const { return hue_bins * sat_bins * val_bins; }
  int alphabet_size() const { return 2 * color_levels(); }  // texture bit doubles it
  int alphabet_width() const { return bits_for_alphabet(alphabet_size()); }

  /// Throws std::invalid_argument outside the supported ranges.
  void validate() const;
};

/// 1-D sequence of symbols: low bits = quantized HSV code, top bit = texture.
struct SymbolString {
  std::vector<Symbol> symbols;
  std::string source_id;
};

/// Standard hexcone conversion; achromatic pixels get h = 0.
HsvPixel rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Uniform quantization to a single code in [0, color_levels).
/// Components equal to 1.0 clamp into the top bin.
int quantize(const HsvPixel& p, const PipelineConfig& cfg);

/// Plain Euclidean distance over (h, s, v); range [0, sqrt(3)].
/// Hue is treated as a scalar, so near-wraparound hues measure as far apart.
double hsv_distance(const HsvPixel& a, const HsvPixel& b);

/// 1 if the distance to either vertical neighbour exceeds t, else 0.
/// Missing neighbours at the first/last row contribute no exceedance.
int texture_bit(const HsvImage& img, int row, int col, double t);

/// Exact box/area-average resample to side x side.
RgbImage resample_box(const RgbImage& img, int side);

HsvImage to_hsv(const RgbImage& img);

/// Full image-to-string pipeline: resample in RGB, convert to HSV, quantize,
/// add the vertical-texture bit, emit in raster order. Pure function of
/// (pixel data, cfg).
SymbolString encode_image(const RgbImage& img, const PipelineConfig& cfg,
                          std::string source_id = "");

}  // namespace fcd

#endif  // FCD_IMAGE_HPP
