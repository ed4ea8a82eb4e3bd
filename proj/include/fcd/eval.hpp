#ifndef FCD_EVAL_HPP
#define FCD_EVAL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fcd/image.hpp"
#include "fcd/store.hpp"

namespace fcd {

struct PrPoint {
  std::size_t cutoff = 0;
  double precision = 0.0;
  double recall = 0.0;
};

/// One point per rank cutoff 1..N over a ranking of item indices;
/// relevant[i] marks relevant items. Throws if no item is relevant.
std::vector<PrPoint> pr_curve(std::span<const std::size_t> ranking,
                              const std::vector<bool>& relevant);

/// Average Normalized Rank over 1-based ranks of the relevant items within a
/// ranking of n items: 0 = perfect retrieval, ~0.5 = random.
double anr(std::size_t n, std::span<const std::size_t> relevant_ranks);

/// Row ranking by ascending score, ties broken by index; optionally drops the
/// query itself.
std::vector<std::size_t> rank_row(const DistanceMatrix& m, std::size_t row,
                                  bool exclude_self);

/// Mean count of same-group items (query included) inside each query's 4
/// nearest neighbours. Every label must name exactly 4 items. Upper bound 4.
double ns_score(const DistanceMatrix& m, std::span<const std::string> labels);

/// Leave-one-out minimum-average-distance label for one query row; ties go to
/// the lexicographically first label.
std::string classify_min_avg_distance(const DistanceMatrix& m,
                                      std::span<const std::string> labels,
                                      std::size_t query_index);

struct ConfusionMatrix {
  std::vector<std::string> classes;       // sorted labels
  std::vector<std::size_t> counts;        // row = true class, col = predicted
  double average_accuracy = 0.0;          // mean of per-class diagonal fractions

  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts[truth * classes.size() + predicted];
  }
};

/// Classifies every item leave-one-out and tabulates the confusion matrix.
ConfusionMatrix classify_all(const DistanceMatrix& m,
                             std::span<const std::string> labels);

/// Binary entropy in bits; maximum 1 at p = 0.5.
double binary_entropy(double p);

struct CalibrationPoint {
  double t = 0.0;
  double ones_fraction = 0.0;
  double entropy = 0.0;
};

struct CalibrationResult {
  double best_t = 0.0;
  std::vector<CalibrationPoint> points;
};

/// Picks the candidate threshold maximizing the entropy of the texture-bit
/// stream pooled over the sample; ties go to the smaller t.
CalibrationResult calibrate_threshold(std::span<const HsvImage> sample,
                                      std::span<const double> candidates);

/// t in {0.05, 0.10, ..., 0.95}.
std::vector<double> default_threshold_grid();

}  // namespace fcd

#endif  // FCD_EVAL_HPP
