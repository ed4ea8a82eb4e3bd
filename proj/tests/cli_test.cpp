// End-to-end checks of the command-line binary. The harness passes the
// binary's location in the FCD_CLI environment variable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fcd/image_io.hpp"
#include "fcd/store.hpp"
#include "fcd/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string cli_path() {
  const char* env = std::getenv("FCD_CLI");
  REQUIRE_MESSAGE(env != nullptr, "FCD_CLI must point at the fcd binary");
  return env;
}

RunResult run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[512];
  while (std::fgets(buf, sizeof(buf), pipe)) r.output += buf;
  const int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

struct Workspace {
  fs::path root;
  fs::path images;
  fs::path manifest;
  fs::path store;

  explicit Workspace(const std::string& tag, int count, int classes) {
    root = fs::temp_directory_path() / ("fcd_cli_" + tag);
    fs::remove_all(root);
    images = root / "images";
    store = root / "store";
    manifest = root / "manifest.csv";
    fs::create_directories(images);

    fcd::Manifest m;
    for (int i = 0; i < count; ++i) {
      const fs::path file = images / ("img" + std::to_string(i) + ".ppm");
      fcd::save_ppm(fcd::synth::class_image(i % classes, 300 + i, 32), file);
      m.items.push_back({"item" + std::to_string(i), file.string(),
                         "class" + std::to_string(i % classes)});
    }
    fcd::save_manifest(m, manifest);
  }
  ~Workspace() { fs::remove_all(root); }
};

}  // namespace

TEST_CASE("ingest, matrix, eval and query round-trip on a small corpus") {
  Workspace ws("roundtrip", 12, 3);

  const auto ingest = run("ingest --manifest " + ws.manifest.string() +
                          " --store " + ws.store.string() +
                          " --size 16 --threads 2");
  CHECK(ingest.status == 0);
  CHECK(contains(ingest.output, "ingested=12 skipped=0"));
  CHECK(fs::exists(ws.store / "dicts" / "item0.fcd"));

  const auto matrix = run("matrix --store " + ws.store.string() + " --threads 2");
  CHECK(matrix.status == 0);
  REQUIRE(fs::exists(ws.store / "matrix-fcd.csv"));

  const auto eval = run("eval --store " + ws.store.string() +
                        " --protocol classify");
  CHECK(eval.status == 0);
  CHECK(contains(eval.output, "average_accuracy="));
  CHECK(fs::exists(ws.store / "report-classify-fcd.csv"));

  const auto anr = run("eval --store " + ws.store.string() + " --protocol anr");
  CHECK(anr.status == 0);
  CHECK(contains(anr.output, "mean_anr="));

  const auto pr = run("eval --store " + ws.store.string() + " --protocol pr");
  CHECK(pr.status == 0);
  CHECK(contains(pr.output, "mean_precision@"));

  // Querying an ingested image must rank that item first at distance zero.
  const auto query = run("query --store " + ws.store.string() + " --image " +
                         (ws.images / "img3.ppm").string() + " --k 5");
  CHECK(query.status == 0);
  const auto lines = lines_of(query.output);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "1,item3,0.000000");
  for (const auto& line : lines) {
    CHECK(std::count(line.begin(), line.end(), ',') == 2);
  }

  // Repeat runs are byte-identical.
  CHECK(run("query --store " + ws.store.string() + " --image " +
            (ws.images / "img3.ppm").string() + " --k 5")
            .output == query.output);

  // k beyond the corpus returns every item without complaint.
  const auto all = run("query --store " + ws.store.string() + " --image " +
                       (ws.images / "img3.ppm").string() + " --k 999");
  CHECK(all.status == 0);
  CHECK(lines_of(all.output).size() == 12);
}

TEST_CASE("group evaluation runs on a quadruple-structured corpus") {
  Workspace ws("ns", 8, 2);  // 2 classes x 4 images

  REQUIRE(run("ingest --manifest " + ws.manifest.string() + " --store " +
              ws.store.string() + " --size 16")
              .status == 0);
  REQUIRE(run("matrix --store " + ws.store.string()).status == 0);
  const auto ns = run("eval --store " + ws.store.string() + " --protocol ns");
  CHECK(ns.status == 0);
  CHECK(contains(ns.output, "mean_ns_score="));
}

TEST_CASE("a corrupt image is skipped, reported and fails the exit status") {
  Workspace ws("corrupt", 5, 5);
  {
    std::ofstream bad(ws.images / "junk.ppm");
    bad << "definitely not pixels";
  }
  {
    // Append the broken row to the manifest.
    std::ofstream app(ws.manifest, std::ios::app);
    app << "junk," << (ws.images / "junk.ppm").string() << ",classX\n";
  }

  const auto ingest = run("ingest --manifest " + ws.manifest.string() +
                          " --store " + ws.store.string() + " --size 16");
  CHECK(ingest.status != 0);
  CHECK(contains(ingest.output, "ingested=5 skipped=1"));
  CHECK(contains(ingest.output, "junk.ppm"));
  CHECK(!fs::exists(ws.store / "dicts" / "junk.fcd"));
  CHECK(fs::exists(ws.store / "dicts" / "item4.fcd"));
}

TEST_CASE("alternate measures and the pair filter plumb through") {
  Workspace ws("measures", 6, 3);
  REQUIRE(run("ingest --manifest " + ws.manifest.string() + " --store " +
              ws.store.string() + " --size 16")
              .status == 0);

  CHECK(run("matrix --store " + ws.store.string() + " --measure fcd-sym")
            .status == 0);
  CHECK(fs::exists(ws.store / "matrix-fcd-sym.csv"));

  CHECK(run("matrix --store " + ws.store.string() + " --measure ncd").status == 0);
  CHECK(fs::exists(ws.store / "matrix-ncd.csv"));

  CHECK(run("query --store " + ws.store.string() + " --image " +
            (ws.images / "img0.ppm").string() + " --k 3 --filter-pairs")
            .status == 0);
  CHECK(run("query --store " + ws.store.string() + " --image " +
            (ws.images / "img0.ppm").string() + " --k 3 --measure ncd")
            .status == 0);

  CHECK(run("matrix --store " + ws.store.string() + " --measure zpaq").status != 0);
}

TEST_CASE("calibration reports a best threshold from the sample") {
  Workspace ws("calib", 6, 3);
  const fs::path report = ws.root / "calibration.csv";
  const auto r = run("calibrate --manifest " + ws.manifest.string() +
                     " --size 24 --out " + report.string());
  CHECK(r.status == 0);
  CHECK(contains(r.output, "best_t="));
  REQUIRE(fs::exists(report));
  std::ifstream in(report);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,ones_fraction,entropy");
}

TEST_CASE("the benchmark emits the documented CSV schema") {
  Workspace ws("bench", 1, 1);
  const fs::path report = ws.root / "bench.csv";
  const auto r = run("bench --sizes 200,400 --trials 2 --out " + report.string());
  CHECK(r.status == 0);
  REQUIRE(fs::exists(report));

  std::ifstream in(report);
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,m_x,m_y,fcd_comparisons,ncd_symbol_steps,model_fcd,model_ncd");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 8);  // 2 sizes x 2 trials x 2 workloads
}

TEST_CASE("usage errors exit nonzero") {
  CHECK(run("query --store /nonexistent --image nothing.ppm").status != 0);
  CHECK(run("frobnicate").status != 0);
  CHECK(run("ingest --store only").status != 0);
}
