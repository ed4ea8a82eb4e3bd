#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "fcd/image_io.hpp"
#include "fcd/lzw.hpp"
#include "fcd/store.hpp"
#include "fcd/synth.hpp"

namespace fs = std::filesystem;
using fcd::Dictionary;
using fcd::Measure;
using fcd::Symbol;

namespace {

// Fresh scratch directory per test, removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("fcd_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Dictionary dict_of(const std::string& text) {
  std::vector<Symbol> s(text.begin(), text.end());
  return fcd::extract_dictionary(s, 256);
}

std::vector<std::uint8_t> read_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes `count` small procedural images and a matching manifest.
fcd::Manifest write_corpus(const fs::path& dir, int count, int classes,
                           int side = 24) {
  fs::create_directories(dir);
  fcd::Manifest m;
  m.name = "synthetic";
  for (int i = 0; i < count; ++i) {
    const int cls = i % classes;
    const fs::path file = dir / ("img" + std::to_string(i) + ".ppm");
    fcd::save_ppm(fcd::synth::class_image(cls, 500 + i, side), file);
    m.items.push_back({"item" + std::to_string(i), file.string(),
                       "class" + std::to_string(cls)});
  }
  return m;
}

}  // namespace

TEST_CASE("dictionary files serialize to the documented byte layout") {
  const auto d = dict_of("ABAB");  // entries AB, BA at width 8
  const std::vector<std::uint8_t> expected{
      0x46, 0x43, 0x44, 0x31,  // magic
      0x01,                    // version
      0x08,                    // alphabet width
      0x02, 0x00, 0x00, 0x00,  // entry count
      0x02, 0x00, 0x41, 0x00, 0x42, 0x00,  // "AB"
      0x02, 0x00, 0x42, 0x00, 0x41, 0x00,  // "BA"
  };
  CHECK(fcd::serialize_dictionary(d) == expected);

  const auto back = fcd::deserialize_dictionary(expected, "restored");
  CHECK(back.entries == d.entries);
  CHECK(back.alphabet_width == 8);
  CHECK(back.source_id == "restored");
}

TEST_CASE("dictionary serialization round-trips arbitrary parses") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto s = fcd::synth::structured_symbols(seed, 1200, 512);
    const auto d = fcd::extract_dictionary(s, 512, "src");
    const auto back = fcd::deserialize_dictionary(fcd::serialize_dictionary(d));
    CHECK(back.entries == d.entries);
    CHECK(back.alphabet_width == d.alphabet_width);
  }
}

TEST_CASE("malformed dictionary files are rejected") {
  auto good = fcd::serialize_dictionary(dict_of("ABAB"));

  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);

  bad = good;
  bad[4] = 0x02;  // unknown version
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);

  bad = good;
  bad[5] = 0x00;  // width out of range
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);

  bad = good;
  bad.pop_back();  // truncated
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);

  bad = good;
  bad.push_back(0x00);  // trailing garbage
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);

  bad = good;
  std::swap(bad[12], bad[18]);  // entries out of order ("BA" before "AB")
  std::swap(bad[14], bad[20]);
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);

  bad = good;
  bad[10] = 0x01;  // one-symbol entry
  CHECK_THROWS_AS(fcd::deserialize_dictionary(bad), std::runtime_error);
}

TEST_CASE("manifest loading resolves relative paths against its directory") {
  TempDir tmp("manifest");
  {
    std::ofstream out(tmp.path / "list.csv");
    out << "item_id,path,label\n";
    out << "a,img_a.ppm,red\n";
    out << "b,sub/img_b.ppm,blue\n";
  }
  const auto m = fcd::load_manifest(tmp.path / "list.csv");
  REQUIRE(m.items.size() == 2);
  CHECK(m.items[0].id == "a");
  CHECK(m.items[0].label == "red");
  CHECK(fs::path(m.items[0].path) == (tmp.path / "img_a.ppm").lexically_normal());
  CHECK(fs::path(m.items[1].path) ==
        (tmp.path / "sub" / "img_b.ppm").lexically_normal());
}

TEST_CASE("manifest writing round-trips") {
  TempDir tmp("manifest_rt");
  fcd::Manifest m;
  m.items.push_back({"x1", (tmp.path / "x1.ppm").string(), "cats"});
  m.items.push_back({"x2", (tmp.path / "x2.ppm").string(), "dogs"});
  fcd::save_manifest(m, tmp.path / "m.csv");
  const auto back = fcd::load_manifest(tmp.path / "m.csv");
  REQUIRE(back.items.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.items[i].id == m.items[i].id);
    CHECK(back.items[i].label == m.items[i].label);
    CHECK(fs::path(back.items[i].path) ==
          fs::path(m.items[i].path).lexically_normal());
  }
}

TEST_CASE("broken manifests are rejected") {
  TempDir tmp("manifest_bad");
  auto write = [&](const std::string& body) {
    std::ofstream out(tmp.path / "m.csv", std::ios::trunc);
    out << body;
  };

  write("id,file,tag\na,x.ppm,red\n");
  CHECK_THROWS_AS(fcd::load_manifest(tmp.path / "m.csv"), std::runtime_error);

  write("item_id,path,label\na,x.ppm\n");
  CHECK_THROWS_AS(fcd::load_manifest(tmp.path / "m.csv"), std::runtime_error);

  write("item_id,path,label\na,x.ppm,red\na,y.ppm,red\n");
  CHECK_THROWS_AS(fcd::load_manifest(tmp.path / "m.csv"), std::runtime_error);

  write("item_id,path,label\na/b,x.ppm,red\n");
  CHECK_THROWS_AS(fcd::load_manifest(tmp.path / "m.csv"), std::runtime_error);

  CHECK_THROWS_AS(fcd::load_manifest(tmp.path / "missing.csv"),
                  std::runtime_error);
}

TEST_CASE("ingest writes one dictionary per readable item") {
  TempDir tmp("ingest");
  const auto manifest = write_corpus(tmp.path / "images", 6, 3);
  fcd::PipelineConfig cfg;
  cfg.target_side = 16;

  std::vector<std::string> seen;
  const auto result =
      fcd::ingest(manifest, tmp.path / "store", cfg, 2,
                  [&](const fcd::ManifestItem& item, bool ok) {
                    if (ok) seen.push_back(item.id);
                  });
  CHECK(result.ingested == 6);
  CHECK(result.failures.empty());
  // Progress arrives in manifest order regardless of worker threads.
  REQUIRE(seen.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(seen[i] == manifest.items[i].id);

  CHECK(fs::exists(tmp.path / "store" / "manifest.csv"));
  CHECK(fs::exists(tmp.path / "store" / "pipeline.csv"));
  for (const auto& item : manifest.items)
    CHECK(fs::exists(tmp.path / "store" / "dicts" / (item.id + ".fcd")));

  const auto store = fcd::Store::open(tmp.path / "store");
  CHECK(store.manifest.items.size() == 6);
  CHECK(store.config.target_side == 16);
  CHECK(store.config.hue_bins == cfg.hue_bins);
  CHECK(store.config.texture_threshold ==
        doctest::Approx(cfg.texture_threshold));
  const auto dicts = store.load_all_dictionaries();
  REQUIRE(dicts.size() == 6);
  for (const auto& d : dicts) CHECK(!d.empty());
}

TEST_CASE("ingest skips unreadable images and reports them") {
  TempDir tmp("ingest_bad");
  auto manifest = write_corpus(tmp.path / "images", 4, 2);
  {
    std::ofstream out(tmp.path / "images" / "broken.ppm");
    out << "this is not an image";
  }
  manifest.items.push_back(
      {"broken", (tmp.path / "images" / "broken.ppm").string(), "class0"});

  fcd::PipelineConfig cfg;
  cfg.target_side = 16;
  const auto result = fcd::ingest(manifest, tmp.path / "store", cfg, 1);
  CHECK(result.ingested == 4);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].id == "broken");
  CHECK(!fs::exists(tmp.path / "store" / "dicts" / "broken.fcd"));
}

TEST_CASE("ingest output is byte-identical for any thread count") {
  TempDir tmp("ingest_det");
  const auto manifest = write_corpus(tmp.path / "images", 5, 5);
  fcd::PipelineConfig cfg;
  cfg.target_side = 16;

  fcd::ingest(manifest, tmp.path / "s1", cfg, 1);
  fcd::ingest(manifest, tmp.path / "s4", cfg, 4);
  for (const auto& item : manifest.items) {
    const auto a = read_bytes(tmp.path / "s1" / "dicts" / (item.id + ".fcd"));
    const auto b = read_bytes(tmp.path / "s4" / "dicts" / (item.id + ".fcd"));
    CHECK(a == b);
  }
}

TEST_CASE("parallel matrix construction equals the serial reference") {
  TempDir tmp("matrix");
  const auto manifest = write_corpus(tmp.path / "images", 8, 4);
  fcd::PipelineConfig cfg;
  cfg.target_side = 16;
  REQUIRE(fcd::ingest(manifest, tmp.path / "store", cfg, 2).failures.empty());
  const auto store = fcd::Store::open(tmp.path / "store");

  for (Measure measure : {Measure::Fcd, Measure::FcdSymmetric, Measure::Ncd}) {
    const auto serial = fcd::build_matrix_serial(store, measure);
    const auto parallel = fcd::build_matrix(store, measure, false, 3);
    CHECK(serial.ids == parallel.ids);
    CHECK(serial.values == parallel.values);  // bitwise, not approximate
    REQUIRE(serial.size() == 8);

    for (std::size_t i = 0; i < 8; ++i) {
      if (measure != Measure::Ncd) CHECK(serial.at(i, i) == 0.0);
      for (std::size_t j = 0; j < 8; ++j) CHECK(serial.at(i, j) >= 0.0);
    }
    if (measure == Measure::FcdSymmetric)
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < i; ++j)
          CHECK(serial.at(i, j) == serial.at(j, i));
  }
}

TEST_CASE("matrix CSV round-trips to fixed-point precision") {
  TempDir tmp("matrix_csv");
  const auto manifest = write_corpus(tmp.path / "images", 5, 5);
  fcd::PipelineConfig cfg;
  cfg.target_side = 16;
  REQUIRE(fcd::ingest(manifest, tmp.path / "store", cfg, 1).failures.empty());
  const auto store = fcd::Store::open(tmp.path / "store");
  const auto matrix = fcd::build_matrix(store, Measure::Fcd);

  std::stringstream buf;
  fcd::write_matrix_csv(matrix, buf);
  const std::string text = buf.str();
  CHECK(text.rfind("id,item0,item1,item2,item3,item4\n", 0) == 0);

  std::stringstream in(text);
  const auto back = fcd::read_matrix_csv(in, Measure::Fcd);
  CHECK(back.ids == matrix.ids);
  REQUIRE(back.values.size() == matrix.values.size());
  for (std::size_t i = 0; i < matrix.values.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(matrix.values[i]).epsilon(1e-6));

  std::stringstream bad("nonsense,a\n0.5\n");
  CHECK_THROWS_AS(fcd::read_matrix_csv(bad, Measure::Fcd), std::runtime_error);
}

TEST_CASE("query ranks a stored image's own dictionary first") {
  TempDir tmp("query");
  const auto manifest = write_corpus(tmp.path / "images", 8, 4);
  fcd::PipelineConfig cfg;
  cfg.target_side = 16;
  REQUIRE(fcd::ingest(manifest, tmp.path / "store", cfg, 2).failures.empty());
  const auto store = fcd::Store::open(tmp.path / "store");

  const auto img = fcd::load_image(manifest.items[2].path);
  const auto s = fcd::encode_image(img, store.config, "query");
  const auto q = fcd::extract_dictionary(s.symbols, store.config.alphabet_size());

  const auto hits = fcd::query(store, q, 3, Measure::Fcd);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0].id == "item2");
  CHECK(hits[0].score == 0.0);
  CHECK(hits[0].score <= hits[1].score);
  CHECK(hits[1].score <= hits[2].score);

  // k beyond the store size returns the full ranking without error.
  CHECK(fcd::query(store, q, 100, Measure::Fcd).size() == 8);

  // The compression baseline needs the raw symbols, not just the dictionary.
  CHECK_THROWS_AS(fcd::query(store, q, 3, Measure::Ncd), std::invalid_argument);
  const auto ncd_hits = fcd::query(store, q, 3, Measure::Ncd, false, &s);
  REQUIRE(ncd_hits.size() == 3);
  CHECK(ncd_hits[0].id == "item2");

  CHECK_THROWS_AS(fcd::query(store, q, 0, Measure::Fcd), std::invalid_argument);
}

TEST_CASE("measure names map both ways") {
  CHECK(std::string(fcd::measure_name(Measure::Fcd)) == "fcd");
  CHECK(std::string(fcd::measure_name(Measure::FcdSymmetric)) == "fcd-sym");
  CHECK(std::string(fcd::measure_name(Measure::Ncd)) == "ncd");
  CHECK(fcd::measure_from_name("fcd") == Measure::Fcd);
  CHECK(fcd::measure_from_name("fcd-sym") == Measure::FcdSymmetric);
  CHECK(fcd::measure_from_name("ncd") == Measure::Ncd);
  CHECK(!fcd::measure_from_name("zip").has_value());
}

TEST_CASE("symbol strings flatten to little-endian bytes") {
  const std::vector<Symbol> s{0x0102, 0x0003, 0x01ff};
  const auto bytes = fcd::symbols_to_bytes(s);
  CHECK(bytes == std::vector<std::uint8_t>{0x02, 0x01, 0x03, 0x00, 0xff, 0x01});
}

TEST_CASE("store paths follow the documented layout") {
  fcd::Store store;
  store.root = "/data/st";
  CHECK(store.dict_path("item7") == fs::path("/data/st/dicts/item7.fcd"));
  CHECK(store.matrix_path(Measure::Fcd) == fs::path("/data/st/matrix-fcd.csv"));
  CHECK(store.matrix_path(Measure::FcdSymmetric) ==
        fs::path("/data/st/matrix-fcd-sym.csv"));
  CHECK(store.matrix_path(Measure::Ncd) == fs::path("/data/st/matrix-ncd.csv"));
}
