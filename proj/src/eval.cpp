#include "fcd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fcd {

std::vector<PrPoint> pr_curve(std::span<const std::size_t> ranking,
                              const std::vector<bool>& relevant) {
  std::size_t total_relevant = 0;
  for (std::size_t idx : ranking) total_relevant += relevant[idx] ? 1 : 0;
  if (total_relevant == 0)
    throw std::invalid_argument("pr_curve: no relevant items in the ranking");

  std::vector<PrPoint> points;
  points.reserve(ranking.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (relevant[ranking[i]]) ++hits;
    const std::size_t cutoff = i + 1;
    points.push_back({cutoff, static_cast<double>(hits) / cutoff,
                      static_cast<double>(hits) / total_relevant});
  }
  return points;
}

double anr(std::size_t n, std::span<const std::size_t> relevant_ranks) {
  const std::size_t nr = relevant_ranks.size();
  if (nr == 0) throw std::invalid_argument("anr: no relevant items");
  if (nr > n) throw std::invalid_argument("anr: more relevant items than items");

  std::vector<std::size_t> sorted(relevant_ranks.begin(), relevant_ranks.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1 || sorted.back() > n ||
      std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("anr: ranks must be distinct and within 1..n");

  const double sum = static_cast<double>(
      std::accumulate(sorted.begin(), sorted.end(), std::size_t{0}));
  const double base = static_cast<double>(nr) * (nr + 1) / 2.0;
  return (sum - base) / (static_cast<double>(n) * static_cast<double>(nr));
}

std::vector<std::size_t> rank_row(const DistanceMatrix& m, std::size_t row,
                                  bool exclude_self) {
  std::vector<std::size_t> order;
  order.reserve(m.size());
  for (std::size_t j = 0; j < m.size(); ++j)
    if (!(exclude_self && j == row)) order.push_back(j);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = m.at(row, a), db = m.at(row, b);
    if (da != db) return da < db;
    return a < b;
  });
  return order;
}

double ns_score(const DistanceMatrix& m, std::span<const std::string> labels) {
  const std::size_t n = m.size();
  if (labels.size() != n)
    throw std::invalid_argument("ns_score: label count does not match matrix");

  std::map<std::string, std::size_t> group_sizes;
  for (const auto& l : labels) ++group_sizes[std::string(l)];
  for (const auto& [label, count] : group_sizes)
    if (count != 4)
      throw std::invalid_argument("ns_score: group '" + label +
                                  "' does not have exactly 4 members");

  double total = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    const auto order = rank_row(m, q, /*exclude_self=*/false);
    std::size_t hits = 0;
    const std::size_t top = std::min<std::size_t>(4, order.size());
    for (std::size_t r = 0; r < top; ++r)
      if (labels[order[r]] == labels[q]) ++hits;
    total += static_cast<double>(hits);
  }
  return total / static_cast<double>(n);
}

std::string classify_min_avg_distance(const DistanceMatrix& m,
                                      std::span<const std::string> labels,
                                      std::size_t query_index) {
  const std::size_t n = m.size();
  if (labels.size() != n)
    throw std::invalid_argument("classify: label count does not match matrix");
  if (query_index >= n) throw std::invalid_argument("classify: bad query index");

  std::map<std::string, std::pair<double, std::size_t>> sums;  // label -> (sum, count)
  for (std::size_t j = 0; j < n; ++j) {
    if (j == query_index) continue;  // leave-one-out
    auto& [sum, count] = sums[std::string(labels[j])];
    sum += m.at(query_index, j);
    ++count;
  }
  if (sums.empty()) throw std::runtime_error("classify: no candidate items");

  std::string best;
  double best_mean = 0.0;
  for (const auto& [label, sc] : sums) {
    if (sc.second == 0)
      throw std::runtime_error("classify: class '" + label + "' has no members left");
    const double mean = sc.first / static_cast<double>(sc.second);
    if (best.empty() || mean < best_mean) {  // map order = ties go to first label
      best = label;
      best_mean = mean;
    }
  }
  return best;
}

ConfusionMatrix classify_all(const DistanceMatrix& m,
                             std::span<const std::string> labels) {
  const std::size_t n = m.size();
  std::vector<std::string> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  auto class_index = [&](const std::string& label) {
    return static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
  };

  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size() * classes.size(), 0);
  for (std::size_t q = 0; q < n; ++q) {
    const std::string predicted = classify_min_avg_distance(m, labels, q);
    ++cm.counts[class_index(std::string(labels[q])) * classes.size() +
                class_index(predicted)];
  }

  double acc = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::size_t row_sum = 0;
    for (std::size_t p = 0; p < classes.size(); ++p) row_sum += cm.at(c, p);
    if (row_sum > 0)
      acc += static_cast<double>(cm.at(c, c)) / static_cast<double>(row_sum);
  }
  cm.average_accuracy = acc / static_cast<double>(classes.size());
  return cm;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

CalibrationResult calibrate_threshold(std::span<const HsvImage> sample,
                                      std::span<const double> candidates) {
  if (sample.empty()) throw std::invalid_argument("calibrate: empty sample");
  if (candidates.empty())
    throw std::invalid_argument("calibrate: empty candidate set");

  // The bit for pixel p is 1 iff max distance to a vertical neighbour exceeds
  // t, so the pooled ones-count at any t follows from the per-pixel maxima.
  std::vector<double> max_dist;
  for (const HsvImage& img : sample) {
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const HsvPixel& p = img.at(x, y);
        double d = 0.0;
        if (y + 1 < img.height) d = std::max(d, hsv_distance(p, img.at(x, y + 1)));
        if (y > 0) d = std::max(d, hsv_distance(p, img.at(x, y - 1)));
        max_dist.push_back(d);
      }
    }
  }

  std::vector<double> ts(candidates.begin(), candidates.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  CalibrationResult result;
  double best_entropy = -1.0;
  for (double t : ts) {
    std::size_t ones = 0;
    for (double d : max_dist) ones += d > t ? 1 : 0;
    const double p = static_cast<double>(ones) / static_cast<double>(max_dist.size());
    const double h = binary_entropy(p);
    result.points.push_back({t, p, h});
    if (h > best_entropy) {  // strict: ties keep the smaller t
      best_entropy = h;
      result.best_t = t;
    }
  }
  return result;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(i * 0.05);
  return grid;
}

}  // namespace fcd
