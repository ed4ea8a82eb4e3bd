// Times the serial reference kernels against their OpenMP counterparts on a
// synthetic corpus and verifies both produce identical results.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fcd/lzw.hpp"
#include "fcd/similarity.hpp"
#include "fcd/store.hpp"
#include "fcd/synth.hpp"

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

bool same_matrix(const fcd::DistanceMatrix& a, const fcd::DistanceMatrix& b) {
  return a.ids == b.ids && a.values == b.values;
}

}  // namespace

int main(int argc, char** argv) {
  int items = 120;
  int side = 48;
  int threads = 0;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--items") && i + 1 < argc)
      items = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--side") && i + 1 < argc)
      side = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc)
      threads = std::atoi(argv[++i]);
    else {
      std::cerr << "usage: bench_parallel [--items N] [--side PX] [--threads N]\n";
      return 2;
    }
  }

#ifdef _OPENMP
  const int max_threads = threads > 0 ? threads : omp_get_max_threads();
#else
  const int max_threads = 1;
  std::cout << "(built without OpenMP; parallel kernels run serially)\n";
#endif

  fcd::PipelineConfig cfg;
  cfg.target_side = side;
  const int alphabet = cfg.alphabet_size();

  std::vector<fcd::Dictionary> dicts(items);
  std::vector<std::vector<std::uint8_t>> bytes(items);
  std::vector<std::string> ids(items);
  {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < items; ++i) {
      ids[i] = "item" + std::to_string(i);
      const auto img = fcd::synth::class_image(i % 5, 1000 + i, side);
      const auto s = fcd::encode_image(img, cfg, ids[i]);
      dicts[i] = fcd::extract_dictionary(s.symbols, alphabet, s.source_id);
      bytes[i] = fcd::symbols_to_bytes(s.symbols);
    }
    std::printf("prepared %d items (%dx%d) in %.1f ms\n", items, side, side,
                ms_since(start));
  }

  std::printf("%-14s %8s %12s %12s %9s %6s\n", "kernel", "items", "serial_ms",
              "parallel_ms", "speedup", "same");

  {
    auto start = std::chrono::steady_clock::now();
    const auto serial =
        fcd::pairwise_fcd_serial(dicts, ids, fcd::Measure::Fcd, false);
    const double t_serial = ms_since(start);
    start = std::chrono::steady_clock::now();
    const auto parallel =
        fcd::pairwise_fcd(dicts, ids, fcd::Measure::Fcd, false, max_threads);
    const double t_parallel = ms_since(start);
    std::printf("%-14s %8d %12.1f %12.1f %8.2fx %6s\n", "pairwise_fcd", items,
                t_serial, t_parallel, t_serial / t_parallel,
                same_matrix(serial, parallel) ? "yes" : "NO");
    if (!same_matrix(serial, parallel)) return 1;
  }

  {
    fcd::LzwSizeCompressor compressor;
    auto start = std::chrono::steady_clock::now();
    const auto serial = fcd::pairwise_ncd_serial(bytes, ids, compressor);
    const double t_serial = ms_since(start);
    start = std::chrono::steady_clock::now();
    const auto parallel = fcd::pairwise_ncd(bytes, ids, compressor, max_threads);
    const double t_parallel = ms_since(start);
    std::printf("%-14s %8d %12.1f %12.1f %8.2fx %6s\n", "pairwise_ncd", items,
                t_serial, t_parallel, t_serial / t_parallel,
                same_matrix(serial, parallel) ? "yes" : "NO");
    if (!same_matrix(serial, parallel)) return 1;
  }

  std::printf("threads=%d\n", max_threads);
  return 0;
}
