#include "fcd/image.hpp"

#include <algorithm>
#include <cmath>

namespace fcd {

void PipelineConfig::validate() const {
  if (hue_bins < 1 || sat_bins < 1 || val_bins < 1)
    throw std::invalid_argument("PipelineConfig: bin counts must be >= 1");
  if (color_levels() > 256)
    throw std::invalid_argument("PipelineConfig: hue*sat*val bins exceed 256");
  if (texture_threshold < 0.0 || texture_threshold > 1.0)
    throw std::invalid_argument("PipelineConfig: threshold outside [0, 1]");
  if (target_side < 2)
    throw std::invalid_argument("PipelineConfig: target side must be >= 2");
}

HsvPixel rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;

  HsvPixel p;
  p.v = mx;
  p.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    p.h = 0.0;  // achromatic: hue undefined, pinned to 0
    return p;
  }
  double sector;
  if (mx == r)
    sector = (g - b) / delta;
  else if (mx == g)
    sector = (b - r) / delta + 2.0;
  else
    sector = (r - g) / delta + 4.0;
  double h = sector / 6.0;
  if (h < 0.0) h += 1.0;
  if (h >= 1.0) h -= 1.0;
  p.h = h;
  return p;
}

namespace {

inline int bin_of(double x, int bins) {
  int b = static_cast<int>(x * bins);  // x == 1.0 lands here as bins
  return std::clamp(b, 0, bins - 1);
}

}  // namespace

int quantize(const HsvPixel& p, const PipelineConfig& cfg) {
  const int bh = bin_of(p.h, cfg.hue_bins);
  const int bs = bin_of(p.s, cfg.sat_bins);
  const int bv = bin_of(p.v, cfg.val_bins);
  return (bh * cfg.sat_bins + bs) * cfg.val_bins + bv;
}

double hsv_distance(const HsvPixel& a, const HsvPixel& b) {
  const double dh = a.h - b.h;
  const double ds = a.s - b.s;
  const double dv = a.v - b.v;
  return std::sqrt(dh * dh + ds * ds + dv * dv);
}

int texture_bit(const HsvImage& img, int row, int col, double t) {
  const HsvPixel& p = img.at(col, row);
  if (row + 1 < img.height && hsv_distance(p, img.at(col, row + 1)) > t) return 1;
  if (row > 0 && hsv_distance(p, img.at(col, row - 1)) > t) return 1;
  return 0;
}

RgbImage resample_box(const RgbImage& img, int side) {
  if (img.width < 1 || img.height < 1)
    throw std::invalid_argument("resample_box: empty raster");
  if (side < 1) throw std::invalid_argument("resample_box: bad target side");
  if (img.width == side && img.height == side) return img;

  RgbImage out(side, side);
  const double sx = static_cast<double>(img.width) / side;
  const double sy = static_cast<double>(img.height) / side;
  for (int ty = 0; ty < side; ++ty) {
    const double y0 = ty * sy, y1 = y0 + sy;
    const int iy0 = static_cast<int>(y0);
    const int iy1 = std::min(img.height, static_cast<int>(std::ceil(y1)));
    for (int tx = 0; tx < side; ++tx) {
      const double x0 = tx * sx, x1 = x0 + sx;
      const int ix0 = static_cast<int>(x0);
      const int ix1 = std::min(img.width, static_cast<int>(std::ceil(x1)));
      double acc[3] = {0, 0, 0};
      double area = 0.0;
      for (int iy = iy0; iy < iy1; ++iy) {
        const double wy = std::min(y1, iy + 1.0) - std::max(y0, static_cast<double>(iy));
        if (wy <= 0.0) continue;
        for (int ix = ix0; ix < ix1; ++ix) {
          const double wx = std::min(x1, ix + 1.0) - std::max(x0, static_cast<double>(ix));
          if (wx <= 0.0) continue;
          const double w = wx * wy;
          const std::uint8_t* px = img.at(ix, iy);
          acc[0] += w * px[0];
          acc[1] += w * px[1];
          acc[2] += w * px[2];
          area += w;
        }
      }
      std::uint8_t* dst = out.at(tx, ty);
      for (int c = 0; c < 3; ++c) {
        const int v = static_cast<int>(std::lround(acc[c] / area));
        dst[c] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
      }
    }
  }
  return out;
}

HsvImage to_hsv(const RgbImage& img) {
  HsvImage out;
  out.width = img.width;
  out.height = img.height;
  out.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  const std::uint8_t* src = img.pixels.data();
  for (std::size_t i = 0; i < out.pixels.size(); ++i, src += 3)
    out.pixels[i] = rgb_to_hsv(src[0], src[1], src[2]);
  return out;
}

SymbolString encode_image(const RgbImage& img, const PipelineConfig& cfg,
                          std::string source_id) {
  cfg.validate();
  const HsvImage hsv = to_hsv(resample_box(img, cfg.target_side));

  SymbolString out;
  out.source_id = std::move(source_id);
  out.symbols.reserve(static_cast<std::size_t>(cfg.target_side) * cfg.target_side);
  const int texture_offset = cfg.color_levels();
  for (int y = 0; y < hsv.height; ++y) {
    for (int x = 0; x < hsv.width; ++x) {
      const int code = quantize(hsv.at(x, y), cfg);
      const int bit = texture_bit(hsv, y, x, cfg.texture_threshold);
      out.symbols.push_back(static_cast<Symbol>(code + texture_offset * bit));
    }
  }
  return out;
}

}  // namespace fcd
