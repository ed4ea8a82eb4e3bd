#ifndef FCD_LZW_HPP
#define FCD_LZW_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fcd {

using Symbol = std::uint16_t;

// A multi-symbol LZW phrase. std::u16string gives us lexicographic ordering
// (shorter prefix sorts before its extensions), hashing and prefix tests for
// free; symbol codes never exceed 511 so they fit in char16_t.
using Pattern = std::u16string;

/// Sorted, prefix-closed set of multi-symbol phrases learned by one LZW parse.
/// Single symbols form the implicit base alphabet and are never stored.
struct Dictionary {
  std::string source_id;
  int alphabet_width = 9;         // bits per symbol
  std::vector<Pattern> entries;   // strictly ascending, prefix-closed

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Binary search for an exact entry; O(log size()) pattern comparisons.
  bool contains(const Pattern& p) const;

  /// Entry count after dropping phrases shorter than min_len.
  std::size_t size_min_len(std::size_t min_len) const;
};

struct IntersectionStats {
  std::size_t matched = 0;      // probe entries found in the target
  std::size_t comparisons = 0;  // lookups actually executed
};

/// Output of one LZW pass: the emitted code sequence plus the number of
/// input symbols consumed (instrumentation for cost comparisons).
struct CodeStream {
  std::vector<std::uint32_t> codes;
  std::size_t symbol_steps = 0;
};

/// Runs an LZW parse of `s` over an implicit base alphabet of
/// `alphabet_size` single symbols and returns every multi-symbol phrase the
/// parse added, sorted ascending. Dictionary growth is unbounded (no code
/// width reset, no buffer cap).
/// Throws std::invalid_argument on empty input or out-of-range symbols.
Dictionary extract_dictionary(std::span<const Symbol> s, int alphabet_size,
                              std::string source_id = "");

/// LZW code stream for `s`; decode() reproduces the input exactly.
CodeStream lzw_encode(std::span<const Symbol> s, int alphabet_size);

/// Standard LZW decoder matching lzw_encode (handles the self-referential
/// "phrase + first symbol" case).
std::vector<Symbol> lzw_decode(std::span<const std::uint32_t> codes,
                               int alphabet_size);

/// Counts how many probe entries appear in the target using binary search.
/// When a probe entry misses, every probe entry extending it is skipped
/// without a lookup; the target's prefix closure makes that sound. With
/// filter_pairs, two-symbol entries are ignored on both sides.
/// Throws std::invalid_argument on alphabet width mismatch.
IntersectionStats intersect(const Dictionary& probe, const Dictionary& target,
                            bool filter_pairs = false);

int bits_for_alphabet(int alphabet_size);

}  // namespace fcd

#endif  // FCD_LZW_HPP
