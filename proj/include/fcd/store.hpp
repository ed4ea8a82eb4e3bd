#ifndef FCD_STORE_HPP
#define FCD_STORE_HPP

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcd/image.hpp"
#include "fcd/lzw.hpp"
#include "fcd/similarity.hpp"

namespace fcd {

struct ManifestItem {
  std::string id;
  std::string path;
  std::string label;
};

/// Dataset description: unique item ids, image paths, class labels.
struct Manifest {
  std::string name;
  std::vector<ManifestItem> items;
};

/// Reads a `item_id,path,label` CSV (header required). Relative paths are
/// resolved against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& file);
void save_manifest(const Manifest& m, const std::filesystem::path& file);

/// Bit-exact dictionary file format:
///   "FCD1" | version 0x01 | alphabet width (1 byte) |
///   entry count (u32 LE) | entries in sorted order, each
///   length L (u16 LE) followed by L symbol codes (u16 LE).
std::vector<std::uint8_t> serialize_dictionary(const Dictionary& d);
Dictionary deserialize_dictionary(std::span<const std::uint8_t> bytes,
                                  std::string source_id = "");

enum class Measure { Fcd, FcdSymmetric, Ncd };

const char* measure_name(Measure m);                    // fcd | fcd-sym | ncd
std::optional<Measure> measure_from_name(std::string_view name);

/// On-disk layout: <root>/manifest.csv, <root>/pipeline.csv,
/// <root>/dicts/<item_id>.fcd, <root>/matrix-<measure>.csv.
struct Store {
  std::filesystem::path root;
  Manifest manifest;
  PipelineConfig config;

  static Store open(const std::filesystem::path& root);

  std::filesystem::path dict_path(const std::string& id) const;
  std::filesystem::path matrix_path(Measure m) const;
  Dictionary load_dictionary(const std::string& id) const;
  /// All dictionaries in manifest order.
  std::vector<Dictionary> load_all_dictionaries() const;
};

struct IngestFailure {
  std::string id;
  std::string path;
  std::string error;
};

struct IngestResult {
  std::size_t ingested = 0;
  std::vector<IngestFailure> failures;
};

/// Encodes every manifest item, extracts its dictionary and writes it under
/// <root>/dicts. Deterministic: re-ingesting unchanged files rewrites
/// identical bytes regardless of thread count. Unreadable items are skipped
/// and reported in the result. `progress`, when set, is called once per item
/// in manifest order.
IngestResult ingest(const Manifest& manifest, const std::filesystem::path& root,
                    const PipelineConfig& cfg, int threads = 1,
                    const std::function<void(const ManifestItem&, bool ok)>& progress = {});

/// Dense pairwise scores; rows are the probe side (the FCD denominator).
struct DistanceMatrix {
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major n x n
  Measure measure = Measure::Fcd;

  std::size_t size() const { return ids.size(); }
  double at(std::size_t row, std::size_t col) const {
    return values[row * ids.size() + col];
  }
};

/// Pairwise-distance kernels over in-memory items. The *_serial forms are
/// the reference implementations; the others distribute rows with OpenMP and
/// produce identical values for any thread count.
DistanceMatrix pairwise_fcd_serial(std::span<const Dictionary> dicts,
                                   std::span<const std::string> ids,
                                   Measure measure, bool filter_pairs);
DistanceMatrix pairwise_fcd(std::span<const Dictionary> dicts,
                            std::span<const std::string> ids, Measure measure,
                            bool filter_pairs, int threads = 0);
DistanceMatrix pairwise_ncd_serial(std::span<const std::vector<std::uint8_t>> items,
                                   std::span<const std::string> ids,
                                   const Compressor& c);
DistanceMatrix pairwise_ncd(std::span<const std::vector<std::uint8_t>> items,
                            std::span<const std::string> ids,
                            const Compressor& c, int threads = 0);

/// Serial reference implementation kept for testing the parallel build.
DistanceMatrix build_matrix_serial(const Store& store, Measure measure,
                                   bool filter_pairs = false);

/// OpenMP-parallel build; produces bytes identical to the serial reference.
DistanceMatrix build_matrix(const Store& store, Measure measure,
                            bool filter_pairs = false, int threads = 0);

/// Scores are fixed-point with 6 decimals; first row/column carry item ids.
void write_matrix_csv(const DistanceMatrix& m, std::ostream& out);
DistanceMatrix read_matrix_csv(std::istream& in, Measure measure = Measure::Fcd);

struct QueryHit {
  std::string id;
  double score = 0.0;
};

/// The k best-scoring items, ascending, ties broken by item id. Scores are
/// computed on demand from the stored dictionaries; Measure::Ncd re-encodes
/// the stored images and needs the query's symbol string.
std::vector<QueryHit> query(const Store& store, const Dictionary& q,
                            std::size_t k, Measure measure,
                            bool filter_pairs = false,
                            const SymbolString* q_symbols = nullptr);

/// Symbol string -> bytes (2 bytes per symbol, little endian) for the NCD
/// baseline path.
std::vector<std::uint8_t> symbols_to_bytes(std::span<const Symbol> symbols);

}  // namespace fcd

#endif  // FCD_STORE_HPP
