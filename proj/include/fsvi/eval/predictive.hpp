#ifndef FSVI_EVAL_PREDICTIVE_HPP
#define FSVI_EVAL_PREDICTIVE_HPP

#include <cstdint>
#include <random>

#include "fsvi/error.hpp"
#include "fsvi/linalg.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// Per-datum Monte-Carlo predictive summary; rows are data, columns are
// outputs (class probabilities, or a single regression output).
struct PredictiveSummary {
  Mat mean;
  Mat variance;
};

enum class PredictiveMode { kSample, kPlugIn };

inline constexpr int kDefaultPredictiveDraws = 200;

// Averages predict(w) over w ~ N(mu, L L^T). predict maps a parameter
// vector to an N x K matrix. kPlugIn evaluates at mu only and accepts a
// degenerate factor.
template <class Predict>
PredictiveSummary predictive_mc(const VariationalPosterior& post,
                                Predict&& predict,
                                int draws = kDefaultPredictiveDraws,
                                std::uint64_t seed = 0,
                                PredictiveMode mode = PredictiveMode::kSample) {
  PredictiveSummary out;
  if (mode == PredictiveMode::kPlugIn) {
    out.mean = predict(post.mean());
    out.variance = Mat::Zero(out.mean.rows(), out.mean.cols());
    return out;
  }
  detail::require(draws >= 1, ErrorKind::kConfig, "need at least one draw");
  log_abs_det(post);  // rejects a singular factor

  Rng rng(seed);
  std::normal_distribution<double> normal;
  Vec z(post.dim());
  Mat sum, sum_sq;
  for (int d = 0; d < draws; ++d) {
    for (Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    const Mat y = predict(post.transform(z));
    if (d == 0) {
      sum = Mat::Zero(y.rows(), y.cols());
      sum_sq = Mat::Zero(y.rows(), y.cols());
    }
    sum += y;
    sum_sq += y.cwiseProduct(y);
  }
  const double n = static_cast<double>(draws);
  out.mean = sum / n;
  out.variance = (sum_sq / n - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0);
  return out;
}

}  // namespace fsvi

#endif  // FSVI_EVAL_PREDICTIVE_HPP
