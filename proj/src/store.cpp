#include "fcd/store.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fcd/image_io.hpp"

namespace fs = std::filesystem;

namespace fcd {

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos >= data.size()) throw std::runtime_error("dictionary file truncated");
    return data[pos++];
  }
  std::uint16_t u16() {
    std::uint16_t lo = u8(), hi = u8();
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
};

std::vector<std::uint8_t> read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const fs::path& file, std::span<const std::uint8_t> bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + file.string());
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Symbol strings for every manifest item, re-encoded from the source images
// with the store's pipeline config (the NCD path has no use for dictionaries).
std::vector<std::vector<std::uint8_t>> encode_item_bytes(const Store& store,
                                                         int threads) {
  const auto& items = store.manifest.items;
  std::vector<std::vector<std::uint8_t>> bytes(items.size());
  std::vector<std::string> errors(items.size());
  const int nt = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(items.size()); ++i) {
    try {
      const RgbImage img = load_image(items[i].path);
      const SymbolString s = encode_image(img, store.config, items[i].id);
      bytes[i] = symbols_to_bytes(s.symbols);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  (void)nt;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (!errors[i].empty())
      throw std::runtime_error("cannot encode " + items[i].path + ": " + errors[i]);
  return bytes;
}

}  // namespace

Manifest load_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest " + file.string());

  Manifest m;
  m.name = file.stem().string();
  const fs::path base = file.parent_path();

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("manifest is empty: " + file.string());
  auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "item_id" || header[1] != "path" ||
      header[2] != "label")
    throw std::runtime_error("manifest header must be item_id,path,label");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": expected 3 fields");
    ManifestItem item{fields[0], fields[1], fields[2]};
    if (item.id.empty() || item.id.find('/') != std::string::npos ||
        item.id.find('\\') != std::string::npos)
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": bad item id");
    fs::path p(item.path);
    if (p.is_relative()) item.path = (base / p).lexically_normal().string();
    m.items.push_back(std::move(item));
  }

  std::vector<std::string> ids;
  ids.reserve(m.items.size());
  for (const auto& it : m.items) ids.push_back(it.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::runtime_error("manifest has duplicate item ids");
  return m;
}

void save_manifest(const Manifest& m, const fs::path& file) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest " + file.string());
  out << "item_id,path,label\n";
  for (const auto& it : m.items)
    out << it.id << ',' << it.path << ',' << it.label << '\n';
  if (!out) throw std::runtime_error("short write to " + file.string());
}

const char* measure_name(Measure m) {
  switch (m) {
    case Measure::Fcd: return "fcd";
    case Measure::FcdSymmetric: return "fcd-sym";
    case Measure::Ncd: return "ncd";
  }
  return "fcd";
}

std::optional<Measure> measure_from_name(std::string_view name) {
  if (name == "fcd") return Measure::Fcd;
  if (name == "fcd-sym") return Measure::FcdSymmetric;
  if (name == "ncd") return Measure::Ncd;
  return std::nullopt;
}

std::vector<std::uint8_t> serialize_dictionary(const Dictionary& d) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + d.entries.size() * 8);
  out.insert(out.end(), {'F', 'C', 'D', '1'});
  out.push_back(0x01);
  out.push_back(static_cast<std::uint8_t>(d.alphabet_width));
  append_u32(out, static_cast<std::uint32_t>(d.entries.size()));
  for (const Pattern& p : d.entries) {
    if (p.size() > 0xffff)
      throw std::runtime_error("dictionary entry too long to serialize");
    append_u16(out, static_cast<std::uint16_t>(p.size()));
    for (char16_t sym : p) append_u16(out, static_cast<std::uint16_t>(sym));
  }
  return out;
}

Dictionary deserialize_dictionary(std::span<const std::uint8_t> bytes,
                                  std::string source_id) {
  ByteReader r{bytes};
  if (bytes.size() < 10 || r.u8() != 'F' || r.u8() != 'C' || r.u8() != 'D' ||
      r.u8() != '1')
    throw std::runtime_error("not a dictionary file (bad magic)");
  if (r.u8() != 0x01) throw std::runtime_error("unsupported dictionary version");

  Dictionary d;
  d.source_id = std::move(source_id);
  d.alphabet_width = r.u8();
  if (d.alphabet_width < 1 || d.alphabet_width > 16)
    throw std::runtime_error("bad alphabet width in dictionary file");

  const std::uint32_t count = r.u32();
  d.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint16_t len = r.u16();
    if (len < 2) throw std::runtime_error("dictionary entry shorter than 2");
    Pattern p;
    p.reserve(len);
    for (std::uint16_t j = 0; j < len; ++j)
      p.push_back(static_cast<char16_t>(r.u16()));
    if (!d.entries.empty() && !(d.entries.back() < p))
      throw std::runtime_error("dictionary entries not strictly sorted");
    d.entries.push_back(std::move(p));
  }
  if (r.pos != bytes.size())
    throw std::runtime_error("trailing bytes in dictionary file");
  return d;
}

Store Store::open(const fs::path& root) {
  Store s;
  s.root = root;
  s.manifest = load_manifest(root / "manifest.csv");

  std::ifstream in(root / "pipeline.csv");
  if (!in)
    throw std::runtime_error("cannot open " + (root / "pipeline.csv").string());
  std::string line;
  bool have[5] = {};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) throw std::runtime_error("bad pipeline.csv line: " + line);
    const std::string& key = fields[0];
    const double value = std::strtod(fields[1].c_str(), nullptr);
    if (key == "hue_bins") { s.config.hue_bins = static_cast<int>(value); have[0] = true; }
    else if (key == "sat_bins") { s.config.sat_bins = static_cast<int>(value); have[1] = true; }
    else if (key == "val_bins") { s.config.val_bins = static_cast<int>(value); have[2] = true; }
    else if (key == "texture_threshold") { s.config.texture_threshold = value; have[3] = true; }
    else if (key == "target_side") { s.config.target_side = static_cast<int>(value); have[4] = true; }
  }
  for (bool h : have)
    if (!h) throw std::runtime_error("pipeline.csv is missing a required key");
  s.config.validate();
  return s;
}

fs::path Store::dict_path(const std::string& id) const {
  return root / "dicts" / (id + ".fcd");
}

fs::path Store::matrix_path(Measure m) const {
  return root / (std::string("matrix-") + measure_name(m) + ".csv");
}

Dictionary Store::load_dictionary(const std::string& id) const {
  return deserialize_dictionary(read_file(dict_path(id)), id);
}

std::vector<Dictionary> Store::load_all_dictionaries() const {
  std::vector<Dictionary> dicts;
  dicts.reserve(manifest.items.size());
  for (const auto& item : manifest.items) dicts.push_back(load_dictionary(item.id));
  return dicts;
}

IngestResult ingest(const Manifest& manifest, const fs::path& root,
                    const PipelineConfig& cfg, int threads,
                    const std::function<void(const ManifestItem&, bool ok)>& progress) {
  cfg.validate();
  fs::create_directories(root / "dicts");
  save_manifest(manifest, root / "manifest.csv");
  {
    std::ofstream out(root / "pipeline.csv", std::ios::trunc);
    out << "hue_bins," << cfg.hue_bins << '\n'
        << "sat_bins," << cfg.sat_bins << '\n'
        << "val_bins," << cfg.val_bins << '\n'
        << "texture_threshold," << format_double(cfg.texture_threshold) << '\n'
        << "target_side," << cfg.target_side << '\n';
    if (!out) throw std::runtime_error("cannot write pipeline.csv");
  }

  IngestResult result;
  const int nt = resolve_threads(threads);
  const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(nt) * 8);
  const std::size_t n = manifest.items.size();

  std::vector<std::vector<std::uint8_t>> bytes(std::min(block, n));
  std::vector<std::string> errors(std::min(block, n));
  for (std::size_t begin = 0; begin < n; begin += block) {
    const std::size_t end = std::min(n, begin + block);
    const auto count = static_cast<std::int64_t>(end - begin);
    // Encode a block in parallel, then flush in manifest order so progress
    // output and on-disk bytes never depend on the thread count.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
    for (std::int64_t k = 0; k < count; ++k) {
      const ManifestItem& item = manifest.items[begin + k];
      bytes[k].clear();
      errors[k].clear();
      try {
        const RgbImage img = load_image(item.path);
        const SymbolString s = encode_image(img, cfg, item.id);
        const Dictionary d = extract_dictionary(s.symbols, cfg.alphabet_size(), item.id);
        bytes[k] = serialize_dictionary(d);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
    for (std::int64_t k = 0; k < count; ++k) {
      const ManifestItem& item = manifest.items[begin + k];
      if (errors[k].empty()) {
        write_file(root / "dicts" / (item.id + ".fcd"), bytes[k]);
        ++result.ingested;
        if (progress) progress(item, true);
      } else {
        result.failures.push_back({item.id, item.path, errors[k]});
        if (progress) progress(item, false);
      }
    }
  }
  return result;
}

namespace {

double fcd_cell(const Dictionary& a, const Dictionary& b, Measure measure,
                bool filter_pairs) {
  return measure == Measure::FcdSymmetric ? fcd_symmetric(a, b, filter_pairs)
                                          : fcd(a, b, filter_pairs);
}

double ncd_cell(const std::vector<std::uint8_t>& a,
                const std::vector<std::uint8_t>& b, double ca, double cb,
                const Compressor& c) {
  std::vector<std::uint8_t> joint;
  joint.reserve(a.size() + b.size());
  joint.insert(joint.end(), a.begin(), a.end());
  joint.insert(joint.end(), b.begin(), b.end());
  const auto cab = static_cast<double>(c.compressed_size(joint));
  return (cab - std::min(ca, cb)) / std::max(ca, cb);
}

}  // namespace

DistanceMatrix pairwise_fcd_serial(std::span<const Dictionary> dicts,
                                   std::span<const std::string> ids,
                                   Measure measure, bool filter_pairs) {
  const std::size_t n = dicts.size();
  DistanceMatrix m;
  m.ids.assign(ids.begin(), ids.end());
  m.measure = measure;
  m.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.values[i * n + j] = fcd_cell(dicts[i], dicts[j], measure, filter_pairs);
  return m;
}

DistanceMatrix pairwise_fcd(std::span<const Dictionary> dicts,
                            std::span<const std::string> ids, Measure measure,
                            bool filter_pairs, int threads) {
  const std::size_t n = dicts.size();
  DistanceMatrix m;
  m.ids.assign(ids.begin(), ids.end());
  m.measure = measure;
  m.values.resize(n * n);
  const int nt = resolve_threads(threads);
  (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.values[i * n + j] = fcd_cell(dicts[i], dicts[j], measure, filter_pairs);
  return m;
}

DistanceMatrix pairwise_ncd_serial(std::span<const std::vector<std::uint8_t>> items,
                                   std::span<const std::string> ids,
                                   const Compressor& c) {
  const std::size_t n = items.size();
  DistanceMatrix m;
  m.ids.assign(ids.begin(), ids.end());
  m.measure = Measure::Ncd;
  m.values.resize(n * n);
  std::vector<double> sizes(n);
  for (std::size_t i = 0; i < n; ++i)
    sizes[i] = static_cast<double>(c.compressed_size(items[i]));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.values[i * n + j] = ncd_cell(items[i], items[j], sizes[i], sizes[j], c);
  return m;
}

DistanceMatrix pairwise_ncd(std::span<const std::vector<std::uint8_t>> items,
                            std::span<const std::string> ids,
                            const Compressor& c, int threads) {
  const std::size_t n = items.size();
  DistanceMatrix m;
  m.ids.assign(ids.begin(), ids.end());
  m.measure = Measure::Ncd;
  m.values.resize(n * n);
  const int nt = resolve_threads(threads);
  (void)nt;
  std::vector<double> sizes(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    sizes[i] = static_cast<double>(c.compressed_size(items[i]));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#endif
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.values[i * n + j] = ncd_cell(items[i], items[j], sizes[i], sizes[j], c);
  return m;
}

DistanceMatrix build_matrix_serial(const Store& store, Measure measure,
                                   bool filter_pairs) {
  if (store.manifest.items.empty())
    throw std::runtime_error("build_matrix: empty store");
  std::vector<std::string> ids;
  ids.reserve(store.manifest.items.size());
  for (const auto& item : store.manifest.items) ids.push_back(item.id);

  if (measure == Measure::Ncd) {
    const auto items = encode_item_bytes(store, 1);
    const LzwSizeCompressor c;
    return pairwise_ncd_serial(items, ids, c);
  }
  const auto dicts = store.load_all_dictionaries();
  return pairwise_fcd_serial(dicts, ids, measure, filter_pairs);
}

DistanceMatrix build_matrix(const Store& store, Measure measure,
                            bool filter_pairs, int threads) {
  if (store.manifest.items.empty())
    throw std::runtime_error("build_matrix: empty store");
  std::vector<std::string> ids;
  ids.reserve(store.manifest.items.size());
  for (const auto& item : store.manifest.items) ids.push_back(item.id);

  if (measure == Measure::Ncd) {
    const auto items = encode_item_bytes(store, threads);
    const LzwSizeCompressor c;
    return pairwise_ncd(items, ids, c, threads);
  }
  const auto dicts = store.load_all_dictionaries();
  return pairwise_fcd(dicts, ids, measure, filter_pairs, threads);
}

void write_matrix_csv(const DistanceMatrix& m, std::ostream& out) {
  const std::size_t n = m.size();
  out << "id";
  for (const auto& id : m.ids) out << ',' << id;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    out << m.ids[i];
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.6f", m.at(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

DistanceMatrix read_matrix_csv(std::istream& in, Measure measure) {
  DistanceMatrix m;
  m.measure = measure;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix csv is empty");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "id")
    throw std::runtime_error("matrix csv: bad header");
  m.ids.assign(header.begin() + 1, header.end());

  const std::size_t n = m.ids.size();
  m.values.reserve(n * n);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != n + 1)
      throw std::runtime_error("matrix csv: wrong field count on data row");
    if (row >= n || fields[0] != m.ids[row])
      throw std::runtime_error("matrix csv: row ids do not match header");
    for (std::size_t j = 1; j <= n; ++j)
      m.values.push_back(std::strtod(fields[j].c_str(), nullptr));
    ++row;
  }
  if (row != n) throw std::runtime_error("matrix csv: missing rows");
  return m;
}

std::vector<QueryHit> query(const Store& store, const Dictionary& q,
                            std::size_t k, Measure measure, bool filter_pairs,
                            const SymbolString* q_symbols) {
  if (store.manifest.items.empty()) throw std::runtime_error("query: empty store");
  if (k < 1) throw std::invalid_argument("query: k must be >= 1");

  const auto& items = store.manifest.items;
  std::vector<QueryHit> hits(items.size());

  if (measure == Measure::Ncd) {
    if (!q_symbols)
      throw std::invalid_argument("query: NCD needs the query symbol string");
    const auto item_bytes = encode_item_bytes(store, 0);
    const auto q_bytes = symbols_to_bytes(q_symbols->symbols);
    const LzwSizeCompressor c;
    for (std::size_t i = 0; i < items.size(); ++i)
      hits[i] = {items[i].id, ncd(q_bytes, item_bytes[i], c)};
  } else {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Dictionary d = store.load_dictionary(items[i].id);
      const double score = measure == Measure::FcdSymmetric
                               ? fcd_symmetric(q, d, filter_pairs)
                               : fcd(q, d, filter_pairs);
      hits[i] = {items[i].id, score};
    }
  }

  std::sort(hits.begin(), hits.end(), [](const QueryHit& a, const QueryHit& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.id < b.id;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

std::vector<std::uint8_t> symbols_to_bytes(std::span<const Symbol> symbols) {
  std::vector<std::uint8_t> out;
  out.reserve(symbols.size() * 2);
  for (Symbol s : symbols) {
    out.push_back(static_cast<std::uint8_t>(s & 0xff));
    out.push_back(static_cast<std::uint8_t>(s >> 8));
  }
  return out;
}

}  // namespace fcd
