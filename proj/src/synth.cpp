#include "fcd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fcd::synth {

namespace {

// Inverse of the pipeline's hexcone conversion, for building test rasters
// from HSV palettes.
void hsv_to_rgb(double h, double s, double v, std::uint8_t* rgb) {
  h = h - std::floor(h);
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  rgb[0] = static_cast<std::uint8_t>(std::lround(std::clamp(r + m, 0.0, 1.0) * 255));
  rgb[1] = static_cast<std::uint8_t>(std::lround(std::clamp(g + m, 0.0, 1.0) * 255));
  rgb[2] = static_cast<std::uint8_t>(std::lround(std::clamp(b + m, 0.0, 1.0) * 255));
}

double jitter(std::mt19937_64& rng, double center, double radius) {
  std::uniform_real_distribution<double> d(center - radius, center + radius);
  return d(rng);
}

std::vector<double> plasma_field(std::mt19937_64& rng, int grid) {
  // Diamond-square over a (grid+1)^2 lattice, grid a power of two.
  const int n = grid + 1;
  std::vector<double> f(static_cast<std::size_t>(n) * n, 0.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto at = [&](int x, int y) -> double& { return f[static_cast<std::size_t>(y) * n + x]; };

  at(0, 0) = u(rng);
  at(grid, 0) = u(rng);
  at(0, grid) = u(rng);
  at(grid, grid) = u(rng);

  double amp = 1.0;
  for (int step = grid; step > 1; step /= 2, amp *= 0.55) {
    const int half = step / 2;
    for (int y = half; y < n; y += step)
      for (int x = half; x < n; x += step)
        at(x, y) = (at(x - half, y - half) + at(x + half, y - half) +
                    at(x - half, y + half) + at(x + half, y + half)) / 4.0 +
                   amp * u(rng);
    for (int y = 0; y < n; y += half) {
      for (int x = (y / half) % 2 == 0 ? half : 0; x < n; x += step) {
        double sum = 0.0;
        int cnt = 0;
        if (x - half >= 0) { sum += at(x - half, y); ++cnt; }
        if (x + half < n) { sum += at(x + half, y); ++cnt; }
        if (y - half >= 0) { sum += at(x, y - half); ++cnt; }
        if (y + half < n) { sum += at(x, y + half); ++cnt; }
        at(x, y) = sum / cnt + amp * u(rng);
      }
    }
  }
  return f;
}

}  // namespace

RgbImage random_image(std::uint64_t seed, int side) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> byte(0, 255);
  RgbImage img(side, side);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(byte(rng));
  return img;
}

RgbImage class_image(int class_id, std::uint64_t seed, int side) {
  std::mt19937_64 rng(seed * 1000003ull + static_cast<std::uint64_t>(class_id));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(3, 8);
  RgbImage img(side, side);

  // Each class keeps its hue inside one quantization bin (width 1/16) so the
  // palette, not the jitter, decides the symbol alphabet.
  switch (class_id % 5) {
    case 0: {  // horizontal stripes, warm palette
      const double h = jitter(rng, 0.094, 0.015);
      const int period = small(rng);
      const int phase = static_cast<int>(unit(rng) * period);
      for (int y = 0; y < side; ++y) {
        const bool on = ((y + phase) / period) % 2 == 0;
        for (int x = 0; x < side; ++x)
          hsv_to_rgb(h, 0.85, on ? 0.9 : 0.3, img.at(x, y));
      }
      break;
    }
    case 1: {  // vertical stripes, green palette
      const double h = jitter(rng, 0.34, 0.015);
      const int period = small(rng);
      const int phase = static_cast<int>(unit(rng) * period);
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
          const bool on = ((x + phase) / period) % 2 == 0;
          hsv_to_rgb(h, on ? 0.95 : 0.4, 0.8, img.at(x, y));
        }
      break;
    }
    case 2: {  // checkerboard, blue palette
      const double h = jitter(rng, 0.59, 0.015);
      const int cell = small(rng);
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
          const bool on = ((x / cell) + (y / cell)) % 2 == 0;
          hsv_to_rgb(h, 0.8, on ? 0.85 : 0.35, img.at(x, y));
        }
      break;
    }
    case 3: {  // value ramp with dark blobs, violet palette
      const double h = jitter(rng, 0.78, 0.015);
      const int blobs = 4 + static_cast<int>(unit(rng) * 4);
      std::vector<std::pair<int, int>> centers;
      for (int b = 0; b < blobs; ++b)
        centers.emplace_back(static_cast<int>(unit(rng) * side),
                             static_cast<int>(unit(rng) * side));
      const int radius = side / 8;
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
          double v = 0.25 + 0.65 * x / (side - 1);
          for (const auto& [cx, cy] : centers)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) < radius * radius)
              v = 0.15;
          hsv_to_rgb(h, 0.7, v, img.at(x, y));
        }
      break;
    }
    default: {  // two-tone speckle, yellow palette
      const double h = jitter(rng, 0.16, 0.015);
      const double density = 0.2 + 0.2 * unit(rng);
      for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
          const bool speck = unit(rng) < density;
          hsv_to_rgb(h, 0.9, speck ? 0.95 : 0.45, img.at(x, y));
        }
      break;
    }
  }
  return img;
}

RgbImage plasma_image(std::uint64_t seed, int side) {
  std::mt19937_64 rng(seed);
  int grid = 1;
  while (grid < side) grid *= 2;

  const auto base = plasma_field(rng, grid);
  const auto da = plasma_field(rng, grid);
  const auto db = plasma_field(rng, grid);
  const auto dc = plasma_field(rng, grid);

  RgbImage img(side, side);
  const int n = grid + 1;
  double mn[3] = {1e9, 1e9, 1e9}, mx[3] = {-1e9, -1e9, -1e9};
  std::vector<double> ch(static_cast<std::size_t>(side) * side * 3);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const std::size_t s = static_cast<std::size_t>(y) * n + x;
      const std::size_t d = (static_cast<std::size_t>(y) * side + x) * 3;
      ch[d + 0] = base[s] + 0.35 * da[s];
      ch[d + 1] = base[s] + 0.35 * db[s];
      ch[d + 2] = base[s] + 0.35 * dc[s];
      for (int c = 0; c < 3; ++c) {
        mn[c] = std::min(mn[c], ch[d + c]);
        mx[c] = std::max(mx[c], ch[d + c]);
      }
    }
  for (std::size_t i = 0; i < ch.size(); i += 3)
    for (int c = 0; c < 3; ++c) {
      const double span = mx[c] - mn[c] > 1e-12 ? mx[c] - mn[c] : 1.0;
      img.pixels[i + c] =
          static_cast<std::uint8_t>(std::lround(255.0 * (ch[i + c] - mn[c]) / span));
    }
  return img;
}

std::vector<Symbol> random_symbols(std::uint64_t seed, std::size_t n, int alphabet) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  std::vector<Symbol> out(n);
  for (auto& s : out) s = static_cast<Symbol>(sym(rng));
  return out;
}

std::vector<Symbol> structured_symbols(std::uint64_t seed, std::size_t n, int alphabet) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  std::uniform_int_distribution<int> motif_len(3, 10);
  std::uniform_int_distribution<int> motif_count(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<Symbol>> motifs(motif_count(rng));
  for (auto& m : motifs) {
    m.resize(motif_len(rng));
    for (auto& s : m) s = static_cast<Symbol>(sym(rng));
  }

  std::vector<Symbol> out;
  out.reserve(n + 16);
  std::uniform_int_distribution<std::size_t> pick(0, motifs.size() - 1);
  while (out.size() < n) {
    const auto& m = motifs[pick(rng)];
    out.insert(out.end(), m.begin(), m.end());
  }
  out.resize(n);
  for (auto& s : out)
    if (unit(rng) < 0.02) s = static_cast<Symbol>(sym(rng));  // sparse mutations
  return out;
}

}  // namespace fcd::synth
