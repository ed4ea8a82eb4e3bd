#ifndef FCD_SYNTH_HPP
#define FCD_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "fcd/image.hpp"
#include "fcd/lzw.hpp"

namespace fcd::synth {

/// Uniform RGB noise.
RgbImage random_image(std::uint64_t seed, int side);

/// Procedural texture family `class_id` (0..4): each class owns a distinct
/// palette and texture; the seed jitters phase, period and noise within the
/// class.
RgbImage class_image(int class_id, std::uint64_t seed, int side);

/// Diamond-square cloud with natural-looking 1/f statistics; stands in for a
/// photograph where none is available.
RgbImage plasma_image(std::uint64_t seed, int side);

/// Uniform random symbols over [0, alphabet).
std::vector<Symbol> random_symbols(std::uint64_t seed, std::size_t n, int alphabet);

/// Repetitive symbols: a few short motifs tiled with occasional mutations.
std::vector<Symbol> structured_symbols(std::uint64_t seed, std::size_t n, int alphabet);

}  // namespace fcd::synth

#endif  // FCD_SYNTH_HPP
