#ifndef FSVI_MODELS_SYNTHETIC_HPP
#define FSVI_MODELS_SYNTHETIC_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

struct ClassificationData {
  Mat inputs;               // N x D
  std::vector<int> labels;  // class index per row
  int classes = 2;

  Index size() const { return inputs.rows(); }

  Vec binary() const {
    Vec y(size());
    for (Index i = 0; i < size(); ++i) y[i] = labels[static_cast<size_t>(i)];
    return y;
  }

  Mat one_hot() const {
    Mat y = Mat::Zero(size(), classes);
    for (Index i = 0; i < size(); ++i) y(i, labels[static_cast<size_t>(i)]) = 1.0;
    return y;
  }
};

enum class BlobKind { kTwoClass, kMultiClass };

struct BlobSpec {
  BlobKind kind = BlobKind::kTwoClass;
  int classes = 3;          // multi-class only
  double separation = 6.0;  // distance between adjacent blob centres
  double spread = 1.0;      // per-axis standard deviation
};

// Isotropic 2-D Gaussian blobs. Two-class centres sit at (+-sep/2, 0);
// K-class centres on a circle with adjacent centres sep apart. Labels
// cycle through the classes, so class counts differ by at most one, and
// rows are shuffled.
inline ClassificationData synth_classification_data(const BlobSpec& spec,
                                                    Index n,
                                                    std::uint64_t seed) {
  const int k = spec.kind == BlobKind::kTwoClass ? 2 : spec.classes;
  detail::require(k >= 2, ErrorKind::kConfig, "need at least two classes");
  detail::require(n >= k, ErrorKind::kConfig, "need n >= number of classes");
  Mat centres(k, 2);
  if (spec.kind == BlobKind::kTwoClass) {
    centres << -0.5 * spec.separation, 0.0, 0.5 * spec.separation, 0.0;
  } else {
    const double angle = 2.0 * std::numbers::pi / k;
    const double radius = 0.5 * spec.separation / std::sin(0.5 * angle);
    for (int c = 0; c < k; ++c)
      centres.row(c) << radius * std::cos(c * angle), radius * std::sin(c * angle);
  }

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, spec.spread);
  std::vector<Index> order(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);

  ClassificationData data{Mat(n, 2), std::vector<int>(static_cast<size_t>(n)), k};
  for (Index i = 0; i < n; ++i) {
    const Index row = order[static_cast<size_t>(i)];
    const int label = static_cast<int>(i % k);
    data.labels[static_cast<size_t>(row)] = label;
    data.inputs(row, 0) = centres(label, 0) + normal(rng);
    data.inputs(row, 1) = centres(label, 1) + normal(rng);
  }
  return data;
}

}  // namespace fsvi

#endif  // FSVI_MODELS_SYNTHETIC_HPP
