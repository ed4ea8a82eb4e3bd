#include "fcd/similarity.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace fcd {

std::size_t lzw_size(std::span<const std::uint8_t> data) {
  if (data.empty()) throw std::invalid_argument("lzw_size: empty input");

  std::unordered_map<std::uint64_t, std::uint32_t> trie;
  trie.reserve(data.size());
  std::uint32_t dict_size = 256;  // implicit byte alphabet
  std::uint32_t w = 0xffffffffu;
  std::size_t bits = 0;
  auto emit = [&] { bits += static_cast<std::size_t>(bits_for_alphabet(dict_size)); };
  for (std::uint8_t c : data) {
    if (w == 0xffffffffu) {
      w = c;
      continue;
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(w) << 16) | c;
    auto it = trie.find(key);
    if (it != trie.end()) {
      w = it->second;
    } else {
      emit();
      trie.emplace(key, dict_size);
      ++dict_size;
      w = c;
    }
  }
  emit();
  return (bits + 7) / 8;
}

double fcd(const Dictionary& x, const Dictionary& y, bool filter_pairs) {
  if (x.alphabet_width != y.alphabet_width)
    throw std::invalid_argument("fcd: alphabet width mismatch");
  const std::size_t denom = filter_pairs ? x.size_min_len(3) : x.size();
  const std::size_t other = filter_pairs ? y.size_min_len(3) : y.size();
  if (denom == 0) return other == 0 ? 0.0 : 1.0;
  const IntersectionStats stats = intersect(x, y, filter_pairs);
  return static_cast<double>(denom - stats.matched) / static_cast<double>(denom);
}

double fcd_symmetric(const Dictionary& x, const Dictionary& y, bool filter_pairs) {
  return std::max(fcd(x, y, filter_pairs), fcd(y, x, filter_pairs));
}

double ncd(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y,
           const Compressor& c) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ncd: empty input");
  const auto cx = static_cast<double>(c.compressed_size(x));
  const auto cy = static_cast<double>(c.compressed_size(y));

  std::vector<std::uint8_t> joint;
  joint.reserve(x.size() + y.size());
  joint.insert(joint.end(), x.begin(), x.end());
  joint.insert(joint.end(), y.begin(), y.end());
  const auto cxy = static_cast<double>(c.compressed_size(joint));

  return (cxy - std::min(cx, cy)) / std::max(cx, cy);
}

CostModelResult cost_model(const CostModelInput& in) {
  CostModelResult r;
  r.fcd_ops = static_cast<double>(in.m_x) * std::log2(static_cast<double>(in.m_y));
  r.ncd_ops = static_cast<double>(in.n_x + in.n_y) *
              std::log2(static_cast<double>(in.m_x + in.m_y));
  return r;
}

}  // namespace fcd
