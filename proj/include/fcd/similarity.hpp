#ifndef FCD_SIMILARITY_HPP
#define FCD_SIMILARITY_HPP

#include <cstdint>
#include <span>

#include "fcd/lzw.hpp"

namespace fcd {

/// Deterministic lossless compressor contract: bytes in, compressed size out.
struct Compressor {
  virtual ~Compressor() = default;
  virtual std::size_t compressed_size(std::span<const std::uint8_t> data) const = 0;
};

/// Built-in size estimator: LZW over the byte alphabet, summing the growing
/// code width at each emission, rounded up to whole bytes. No output file is
/// produced, only the size.
std::size_t lzw_size(std::span<const std::uint8_t> data);

struct LzwSizeCompressor final : Compressor {
  std::size_t compressed_size(std::span<const std::uint8_t> data) const override {
    return lzw_size(data);
  }
};

/// Dictionary distance: fraction of x's phrases absent from y, in [0, 1].
/// Asymmetric: the denominator is |D(x)|. Degenerate cases: both dictionaries
/// empty -> 0, x empty against a non-empty y -> 1.
double fcd(const Dictionary& x, const Dictionary& y, bool filter_pairs = false);

/// max(fcd(x, y), fcd(y, x)) — symmetrized variant for ranking experiments.
double fcd_symmetric(const Dictionary& x, const Dictionary& y,
                     bool filter_pairs = false);

/// Normalized compression distance:
/// (C(xy) - min(C(x), C(y))) / max(C(x), C(y)).
/// Throws std::invalid_argument on empty input.
double ncd(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
           const Compressor& c);

struct CostModelInput {
  std::uint64_t n_x = 1;  // string lengths in symbols
  std::uint64_t n_y = 1;
  std::uint64_t m_x = 1;  // dictionary entry counts
  std::uint64_t m_y = 1;
};

struct CostModelResult {
  double fcd_ops = 0.0;  // m_x * log2(m_y)
  double ncd_ops = 0.0;  // (n_x + n_y) * log2(m_x + m_y)
};

/// Operation-count model for the per-pair step of each measure.
CostModelResult cost_model(const CostModelInput& in);

}  // namespace fcd

#endif  // FCD_SIMILARITY_HPP
