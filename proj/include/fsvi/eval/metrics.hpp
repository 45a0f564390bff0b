#ifndef FSVI_EVAL_METRICS_HPP
#define FSVI_EVAL_METRICS_HPP

#include <vector>

#include "fsvi/error.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// argmax per row; ties go to the lowest index.
inline std::vector<int> decide(const Mat& probabilities) {
  std::vector<int> out(static_cast<size_t>(probabilities.rows()));
  for (Index n = 0; n < probabilities.rows(); ++n) {
    Index best = 0;
    for (Index k = 1; k < probabilities.cols(); ++k)
      if (probabilities(n, k) > probabilities(n, best)) best = k;
    out[static_cast<size_t>(n)] = static_cast<int>(best);
  }
  return out;
}

// Fraction of rows whose argmax class equals the label.
inline double accuracy(const Mat& probabilities, const std::vector<int>& labels) {
  detail::require(probabilities.rows() == static_cast<Index>(labels.size()),
                  ErrorKind::kDimension,
                  "accuracy: predictions and labels differ in length");
  detail::require(!labels.empty(), ErrorKind::kDimension,
                  "accuracy: no labels");
  const std::vector<int> chosen = decide(probabilities);
  size_t hits = 0;
  for (size_t i = 0; i < labels.size(); ++i) hits += chosen[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

inline double mse(const Vec& predictions, const Vec& targets) {
  detail::require(predictions.size() == targets.size() && targets.size() > 0,
                  ErrorKind::kDimension, "mse: length mismatch");
  return (predictions - targets).squaredNorm() /
         static_cast<double>(targets.size());
}

// |y_orig - y_rec|^2 / |y_orig|^2
inline double reconstruction_error(const Vec& original,
                                   const Vec& reconstructed) {
  detail::require(original.size() == reconstructed.size(),
                  ErrorKind::kDimension,
                  "reconstruction_error: length mismatch");
  const double norm = original.squaredNorm();
  detail::require(norm > 0.0, ErrorKind::kDegenerate,
                  "reconstruction_error: original is all zero");
  return (original - reconstructed).squaredNorm() / norm;
}

}  // namespace fsvi

#endif  // FSVI_EVAL_METRICS_HPP
