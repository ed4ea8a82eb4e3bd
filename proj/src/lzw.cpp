#include "fcd/lzw.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace fcd {

namespace {

constexpr std::uint32_t kNoPhrase = 0xffffffffu;

// Trie edge key: (phrase code, next symbol). Codes stay well below 2^48.
inline std::uint64_t edge_key(std::uint32_t code, Symbol sym) {
  return (static_cast<std::uint64_t>(code) << 16) | sym;
}

void check_input(std::span<const Symbol> s, int alphabet_size) {
  if (s.empty()) throw std::invalid_argument("lzw: empty input");
  if (alphabet_size < 2) throw std::invalid_argument("lzw: alphabet too small");
  for (Symbol sym : s) {
    if (sym >= alphabet_size)
      throw std::invalid_argument("lzw: symbol out of alphabet range");
  }
}

struct Phrase {
  std::uint32_t parent;  // code of the length-(L-1) prefix
  Symbol sym;
};

// Core LZW parse. Emits codes when `codes` is non-null and collects the
// phrases added to the dictionary when `phrases` is non-null.
std::size_t parse(std::span<const Symbol> s, int alphabet_size,
                  std::vector<std::uint32_t>* codes,
                  std::vector<Phrase>* phrases) {
  std::unordered_map<std::uint64_t, std::uint32_t> trie;
  trie.reserve(s.size());
  std::uint32_t next_code = static_cast<std::uint32_t>(alphabet_size);
  std::uint32_t w = kNoPhrase;
  std::size_t steps = 0;
  for (Symbol c : s) {
    ++steps;
    if (w == kNoPhrase) {
      w = c;
      continue;
    }
    auto it = trie.find(edge_key(w, c));
    if (it != trie.end()) {
      w = it->second;
    } else {
      if (codes) codes->push_back(w);
      trie.emplace(edge_key(w, c), next_code);
      if (phrases) phrases->push_back({w, c});
      ++next_code;
      w = c;
    }
  }
  if (codes) codes->push_back(w);
  return steps;
}

}  // namespace

int bits_for_alphabet(int alphabet_size) {
  int bits = 1;
  while ((1 << bits) < alphabet_size) ++bits;
  return bits;
}

bool Dictionary::contains(const Pattern& p) const {
  return std::binary_search(entries.begin(), entries.end(), p);
}

std::size_t Dictionary::size_min_len(std::size_t min_len) const {
  std::size_t n = 0;
  for (const Pattern& p : entries)
    if (p.size() >= min_len) ++n;
  return n;
}

Dictionary extract_dictionary(std::span<const Symbol> s, int alphabet_size,
                              std::string source_id) {
  check_input(s, alphabet_size);
  std::vector<Phrase> phrases;
  phrases.reserve(s.size());
  parse(s, alphabet_size, nullptr, &phrases);

  // Materialize each added code; parents always precede children, so one
  // forward pass reconstructs every phrase in O(total length).
  std::vector<Pattern> pats(phrases.size());
  const auto base = static_cast<std::uint32_t>(alphabet_size);
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    const Phrase& ph = phrases[i];
    if (ph.parent < base) {
      pats[i].reserve(2);
      pats[i].push_back(static_cast<char16_t>(ph.parent));
    } else {
      const Pattern& prefix = pats[ph.parent - base];
      pats[i].reserve(prefix.size() + 1);
      pats[i] = prefix;
    }
    pats[i].push_back(static_cast<char16_t>(ph.sym));
  }
  std::sort(pats.begin(), pats.end());

  Dictionary d;
  d.source_id = std::move(source_id);
  d.alphabet_width = bits_for_alphabet(alphabet_size);
  d.entries = std::move(pats);
  return d;
}

CodeStream lzw_encode(std::span<const Symbol> s, int alphabet_size) {
  check_input(s, alphabet_size);
  CodeStream out;
  out.codes.reserve(s.size());
  out.symbol_steps = parse(s, alphabet_size, &out.codes, nullptr);
  return out;
}

std::vector<Symbol> lzw_decode(std::span<const std::uint32_t> codes,
                               int alphabet_size) {
  std::vector<Symbol> out;
  if (codes.empty()) return out;

  const auto base = static_cast<std::uint32_t>(alphabet_size);
  std::vector<Phrase> phrases;  // phrases[i] = code base + i
  auto expand = [&](std::uint32_t code, std::vector<Symbol>& dst) {
    std::size_t mark = dst.size();
    while (code >= base) {
      dst.push_back(phrases[code - base].sym);
      code = phrases[code - base].parent;
    }
    dst.push_back(static_cast<Symbol>(code));
    std::reverse(dst.begin() + mark, dst.end());
  };
  auto first_symbol = [&](std::uint32_t code) {
    while (code >= base) code = phrases[code - base].parent;
    return static_cast<Symbol>(code);
  };

  std::uint32_t prev = codes[0];
  if (prev >= base) throw std::invalid_argument("lzw_decode: bad first code");
  expand(prev, out);
  for (std::size_t i = 1; i < codes.size(); ++i) {
    std::uint32_t code = codes[i];
    std::uint32_t limit = base + static_cast<std::uint32_t>(phrases.size());
    if (code > limit) throw std::invalid_argument("lzw_decode: code out of range");
    // The encoder registers prev+first(cur) before consuming cur, so the
    // one-past-the-end code expands to prev + first(prev).
    Symbol first = (code == limit) ? first_symbol(prev) : first_symbol(code);
    phrases.push_back({prev, first});
    expand(code, out);
    prev = code;
  }
  return out;
}

IntersectionStats intersect(const Dictionary& probe, const Dictionary& target,
                            bool filter_pairs) {
  if (probe.alphabet_width != target.alphabet_width)
    throw std::invalid_argument("intersect: alphabet width mismatch");

  IntersectionStats stats;
  const auto& entries = probe.entries;
  std::size_t i = 0;
  while (i < entries.size()) {
    const Pattern& p = entries[i];
    if (filter_pairs && p.size() == 2) {
      ++i;
      continue;
    }
    ++stats.comparisons;
    if (target.contains(p)) {
      ++stats.matched;
      ++i;
    } else {
      // Prefix closure of the target: no extension of p can be present.
      // Extensions are contiguous right after p in sorted order.
      ++i;
      while (i < entries.size() && entries[i].starts_with(p)) ++i;
    }
  }
  return stats;
}

}  // namespace fcd
