#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcd/eval.hpp"
#include "fcd/image_io.hpp"
#include "fcd/lzw.hpp"
#include "fcd/similarity.hpp"
#include "fcd/store.hpp"
#include "fcd/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string store;
  std::string manifest;
  fcd::PipelineConfig cfg;
  std::string measure = "fcd";
  bool filter_pairs = false;
  int threads = 0;
  std::size_t k = 10;
};

void add_pipeline_flags(CLI::App* cmd, fcd::PipelineConfig& cfg) {
  cmd->add_option("--hue-bins", cfg.hue_bins, "Hue quantization levels")
      ->capture_default_str();
  cmd->add_option("--sat-bins", cfg.sat_bins, "Saturation quantization levels")
      ->capture_default_str();
  cmd->add_option("--val-bins", cfg.val_bins, "Value quantization levels")
      ->capture_default_str();
  cmd->add_option("--threshold", cfg.texture_threshold,
                  "Vertical-texture threshold t in [0,1]")
      ->capture_default_str();
  cmd->add_option("--size", cfg.target_side, "Resample side in pixels")
      ->capture_default_str();
}

fcd::Measure parse_measure(const std::string& name) {
  auto m = fcd::measure_from_name(name);
  if (!m) throw CLI::ValidationError("--measure", "expected fcd, fcd-sym or ncd");
  return *m;
}

std::string fmt_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int cmd_ingest(const CommonOpts& o) {
  const fcd::Manifest manifest = fcd::load_manifest(o.manifest);
  const auto result = fcd::ingest(
      manifest, o.store, o.cfg, o.threads,
      [](const fcd::ManifestItem& item, bool ok) {
        if (ok)
          std::cout << "ingested " << item.id << '\n';
        else
          std::cerr << "skipped " << item.path << '\n';
      });
  std::cout << "ingested=" << result.ingested
            << " skipped=" << result.failures.size() << '\n';
  for (const auto& f : result.failures)
    std::cerr << "error: " << f.path << ": " << f.error << '\n';
  return result.failures.empty() ? 0 : 1;
}

int cmd_query(const CommonOpts& o, const std::string& image) {
  const fcd::Store store = fcd::Store::open(o.store);
  const fcd::RgbImage img = fcd::load_image(image);
  const fcd::SymbolString s = fcd::encode_image(img, store.config, image);
  const fcd::Dictionary q =
      fcd::extract_dictionary(s.symbols, store.config.alphabet_size(), image);

  const auto hits = fcd::query(store, q, o.k, parse_measure(o.measure),
                               o.filter_pairs, &s);
  for (std::size_t i = 0; i < hits.size(); ++i)
    std::cout << (i + 1) << ',' << hits[i].id << ',' << fmt_score(hits[i].score)
              << '\n';
  return 0;
}

int cmd_matrix(const CommonOpts& o) {
  const fcd::Store store = fcd::Store::open(o.store);
  const fcd::Measure measure = parse_measure(o.measure);
  const auto matrix = fcd::build_matrix(store, measure, o.filter_pairs, o.threads);

  const fs::path out_path = store.matrix_path(measure);
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path.string());
  fcd::write_matrix_csv(matrix, out);
  std::cout << "matrix " << matrix.size() << 'x' << matrix.size()
            << " written to " << out_path.string() << '\n';
  return 0;
}

std::vector<std::string> labels_for(const fcd::Store& store,
                                    const fcd::DistanceMatrix& matrix) {
  std::map<std::string, std::string> by_id;
  for (const auto& item : store.manifest.items) by_id[item.id] = item.label;
  std::vector<std::string> labels;
  labels.reserve(matrix.size());
  for (const auto& id : matrix.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw std::runtime_error("matrix item missing from manifest: " + id);
    labels.push_back(it->second);
  }
  return labels;
}

int cmd_eval(const CommonOpts& o, const std::string& protocol,
             std::string matrix_path, std::string out_path) {
  const fcd::Store store = fcd::Store::open(o.store);
  const fcd::Measure measure = parse_measure(o.measure);
  if (matrix_path.empty()) matrix_path = store.matrix_path(measure).string();

  std::ifstream min(matrix_path);
  if (!min)
    throw std::runtime_error("cannot open matrix " + matrix_path +
                             " (run `fcd matrix` first)");
  const fcd::DistanceMatrix matrix = fcd::read_matrix_csv(min, measure);
  const auto labels = labels_for(store, matrix);
  const std::size_t n = matrix.size();

  if (out_path.empty())
    out_path = (store.root / ("report-" + protocol + "-" +
                              fcd::measure_name(measure) + ".csv"))
                   .string();
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);

  if (protocol == "pr") {
    // Mean precision/recall over all queries at each cutoff, query excluded
    // from its own ranking.
    if (n < 2) throw std::runtime_error("pr: need at least 2 items");
    std::vector<double> prec(n - 1, 0.0), rec(n - 1, 0.0);
    std::size_t queries = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const auto order = fcd::rank_row(matrix, q, /*exclude_self=*/true);
      std::vector<bool> relevant(n, false);
      std::size_t n_rel = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != q && labels[j] == labels[q]) {
          relevant[j] = true;
          ++n_rel;
        }
      if (n_rel == 0) continue;
      const auto points = fcd::pr_curve(order, relevant);
      for (std::size_t i = 0; i < points.size(); ++i) {
        prec[i] += points[i].precision;
        rec[i] += points[i].recall;
      }
      ++queries;
    }
    if (queries == 0) throw std::runtime_error("pr: no query has relevant items");
    out << "cutoff,precision,recall\n";
    for (std::size_t i = 0; i < prec.size(); ++i)
      out << (i + 1) << ',' << fmt_score(prec[i] / queries) << ','
          << fmt_score(rec[i] / queries) << '\n';
    const std::size_t at = std::min<std::size_t>(10, prec.size());
    std::cout << "queries=" << queries << '\n'
              << "mean_precision@" << at << '=' << fmt_score(prec[at - 1] / queries)
              << '\n';
  } else if (protocol == "anr") {
    out << "item_id,anr\n";
    double total = 0.0;
    std::size_t queries = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const auto order = fcd::rank_row(matrix, q, /*exclude_self=*/true);
      std::vector<std::size_t> ranks;
      for (std::size_t r = 0; r < order.size(); ++r)
        if (labels[order[r]] == labels[q]) ranks.push_back(r + 1);
      if (ranks.empty()) continue;
      const double a = fcd::anr(order.size(), ranks);
      out << matrix.ids[q] << ',' << fmt_score(a) << '\n';
      total += a;
      ++queries;
    }
    if (queries == 0) throw std::runtime_error("anr: no query has relevant items");
    std::cout << "queries=" << queries << '\n'
              << "mean_anr=" << fmt_score(total / queries) << '\n';
  } else if (protocol == "ns") {
    const double score = fcd::ns_score(matrix, labels);
    out << "item_id,hits\n";
    for (std::size_t q = 0; q < n; ++q) {
      const auto order = fcd::rank_row(matrix, q, false);
      std::size_t hits = 0;
      for (std::size_t r = 0; r < std::min<std::size_t>(4, order.size()); ++r)
        if (labels[order[r]] == labels[q]) ++hits;
      out << matrix.ids[q] << ',' << hits << '\n';
    }
    std::cout << "queries=" << n << '\n'
              << "mean_ns_score=" << fmt_score(score) << '\n';
  } else if (protocol == "classify") {
    const auto cm = fcd::classify_all(matrix, labels);
    out << "class";
    for (const auto& c : cm.classes) out << ',' << c;
    out << '\n';
    for (std::size_t t = 0; t < cm.classes.size(); ++t) {
      out << cm.classes[t];
      for (std::size_t p = 0; p < cm.classes.size(); ++p) out << ',' << cm.at(t, p);
      out << '\n';
    }
    std::cout << "classes=" << cm.classes.size() << '\n'
              << "average_accuracy=" << fmt_score(cm.average_accuracy) << '\n';
  } else {
    throw CLI::ValidationError("--protocol", "expected pr, anr, ns or classify");
  }
  std::cout << "report written to " << out_path << '\n';
  return 0;
}

int cmd_calibrate(const CommonOpts& o, const std::string& grid_arg,
                  std::string out_path) {
  const fcd::Manifest manifest = fcd::load_manifest(o.manifest);
  if (manifest.items.empty()) throw std::runtime_error("calibrate: empty manifest");

  std::vector<fcd::HsvImage> sample;
  sample.reserve(manifest.items.size());
  for (const auto& item : manifest.items) {
    const fcd::RgbImage img = fcd::load_image(item.path);
    sample.push_back(fcd::to_hsv(fcd::resample_box(img, o.cfg.target_side)));
  }

  std::vector<double> grid;
  if (grid_arg.empty()) {
    grid = fcd::default_threshold_grid();
  } else {
    std::stringstream ss(grid_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::strtod(tok.c_str(), nullptr));
  }

  const auto result = fcd::calibrate_threshold(sample, grid);
  if (out_path.empty()) out_path = "calibration.csv";
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "t,ones_fraction,entropy\n";
  for (const auto& p : result.points)
    out << fmt_score(p.t) << ',' << fmt_score(p.ones_fraction) << ','
        << fmt_score(p.entropy) << '\n';
  std::cout << "images=" << sample.size() << '\n'
            << "best_t=" << fmt_score(result.best_t) << '\n'
            << "report written to " << out_path << '\n';
  return 0;
}

int cmd_bench(const std::string& sizes_arg, int trials, int alphabet,
              std::uint64_t seed, std::string out_path) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(sizes_arg);
  std::string tok;
  while (std::getline(ss, tok, ','))
    sizes.push_back(static_cast<std::size_t>(std::strtoull(tok.c_str(), nullptr, 10)));
  if (sizes.empty()) throw std::runtime_error("bench: no sizes given");

  if (out_path.empty()) out_path = "bench.csv";
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "n,m_x,m_y,fcd_comparisons,ncd_symbol_steps,model_fcd,model_ncd\n";

  double ratio_sum = 0.0;
  std::size_t rows = 0;
  for (std::size_t n : sizes) {
    for (int trial = 0; trial < trials; ++trial) {
      for (int workload = 0; workload < 2; ++workload) {
        const std::uint64_t s = seed + rows * 7919ull;
        const auto x = workload == 0 ? fcd::synth::random_symbols(s, n, alphabet)
                                     : fcd::synth::structured_symbols(s, n, alphabet);
        const auto y = workload == 0
                           ? fcd::synth::random_symbols(s + 1, n, alphabet)
                           : fcd::synth::structured_symbols(s + 1, n, alphabet);
        const auto dx = fcd::extract_dictionary(x, alphabet);
        const auto dy = fcd::extract_dictionary(y, alphabet);
        const auto stats = fcd::intersect(dx, dy);

        std::vector<fcd::Symbol> joint(x);
        joint.insert(joint.end(), y.begin(), y.end());
        const auto stream = fcd::lzw_encode(joint, alphabet);

        const fcd::CostModelResult model = fcd::cost_model(
            {n, n, dx.size(), dy.size()});
        out << n << ',' << dx.size() << ',' << dy.size() << ','
            << stats.comparisons << ',' << stream.symbol_steps << ','
            << fmt_score(model.fcd_ops) << ',' << fmt_score(model.ncd_ops) << '\n';
        if (stats.comparisons > 0)
          ratio_sum += static_cast<double>(stream.symbol_steps) /
                       static_cast<double>(stats.comparisons);
        ++rows;
      }
    }
  }
  std::cout << "rows=" << rows << '\n'
            << "mean_steps_per_comparison="
            << fmt_score(ratio_sum / static_cast<double>(rows)) << '\n'
            << "report written to " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-based image similarity and retrieval toolkit"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string image, protocol, matrix_path, out_path, grid_arg;
  std::string sizes_arg = "256,1024,4096";
  int trials = 5;
  int alphabet = 512;
  std::uint64_t seed = 42;

  auto* ingest = app.add_subcommand("ingest", "Encode images and store their dictionaries");
  ingest->add_option("--manifest", o.manifest, "Dataset CSV: item_id,path,label")->required();
  ingest->add_option("--store", o.store, "Store directory")->required();
  ingest->add_option("--threads", o.threads, "Worker threads (0 = auto)");
  add_pipeline_flags(ingest, o.cfg);

  auto* query = app.add_subcommand("query", "Rank stored items against a query image");
  query->add_option("--store", o.store)->required();
  query->add_option("--image", image, "Query image path")->required();
  query->add_option("--k", o.k, "Results to return")->capture_default_str();
  query->add_option("--measure", o.measure, "fcd | fcd-sym | ncd")->capture_default_str();
  query->add_flag("--filter-pairs", o.filter_pairs, "Ignore two-symbol patterns");

  auto* matrix = app.add_subcommand("matrix", "Build the full pairwise distance matrix");
  matrix->add_option("--store", o.store)->required();
  matrix->add_option("--measure", o.measure)->capture_default_str();
  matrix->add_flag("--filter-pairs", o.filter_pairs);
  matrix->add_option("--threads", o.threads, "Worker threads (0 = auto)");

  auto* eval = app.add_subcommand("eval", "Score retrieval quality from a distance matrix");
  eval->add_option("--store", o.store)->required();
  eval->add_option("--protocol", protocol, "pr | anr | ns | classify")->required();
  eval->add_option("--measure", o.measure)->capture_default_str();
  eval->add_option("--matrix", matrix_path, "Matrix CSV (default: the store's)");
  eval->add_option("--out", out_path, "Report CSV path");

  auto* calibrate = app.add_subcommand("calibrate", "Pick the texture threshold maximizing bit entropy");
  calibrate->add_option("--manifest", o.manifest)->required();
  calibrate->add_option("--out", out_path, "Report CSV path")->capture_default_str();
  calibrate->add_option("--grid", grid_arg, "Comma-separated candidate thresholds");
  add_pipeline_flags(calibrate, o.cfg);

  auto* bench = app.add_subcommand("bench", "Compare dictionary-intersection and joint-compression work");
  bench->add_option("--sizes", sizes_arg, "Comma-separated string lengths")->capture_default_str();
  bench->add_option("--trials", trials)->capture_default_str();
  bench->add_option("--alphabet", alphabet)->capture_default_str();
  bench->add_option("--seed", seed)->capture_default_str();
  bench->add_option("--out", out_path, "Report CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(o);
    if (query->parsed()) return cmd_query(o, image);
    if (matrix->parsed()) return cmd_matrix(o);
    if (eval->parsed()) return cmd_eval(o, protocol, matrix_path, out_path);
    if (calibrate->parsed()) return cmd_calibrate(o, grid_arg, out_path);
    if (bench->parsed()) return cmd_bench(sizes_arg, trials, alphabet, seed, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
