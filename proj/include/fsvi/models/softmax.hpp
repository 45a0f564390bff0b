#ifndef FSVI_MODELS_SOFTMAX_HPP
#define FSVI_MODELS_SOFTMAX_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

inline void check_one_hot(const Mat& labels) {
  for (Index n = 0; n < labels.rows(); ++n) {
    int ones = 0;
    for (Index k = 0; k < labels.cols(); ++k) {
      const double v = labels(n, k);
      detail::require(v == 0.0 || v == 1.0, ErrorKind::kData,
                      "row " + std::to_string(n) + " is not one-hot");
      ones += v == 1.0;
    }
    detail::require(ones == 1, ErrorKind::kData,
                    "row " + std::to_string(n) + " is not one-hot");
  }
}

// Row-wise softmax of the logits Phi W, W = [w_1 ... w_K] (M x K) taken
// from the stacked parameter vector.
inline Mat softmax_probabilities(const Mat& design, const Vec& stacked,
                                 Index classes) {
  const Index m = design.cols();
  detail::require(stacked.size() == m * classes, ErrorKind::kDimension,
                  "stacked weights have wrong length");
  const Eigen::Map<const Mat> weights(stacked.data(), m, classes);
  Mat p = design * weights;
  for (Index n = 0; n < p.rows(); ++n) {
    const double top = p.row(n).maxCoeff();
    p.row(n) = (p.row(n).array() - top).exp();
    p.row(n) /= p.row(n).sum();
  }
  return p;
}

// sum_n sum_k y_nk ln p(C_k | phi_n); gradient for class k is
// Phi^T (y_.k - p_.k), stacked class after class.
inline double softmax_loglik(const Vec& stacked, const Mat& design,
                             const Mat& one_hot, Vec* grad = nullptr) {
  const Index m = design.cols(), k = one_hot.cols();
  detail::require(k >= 2, ErrorKind::kConfig, "softmax needs K >= 2");
  detail::require(design.rows() == one_hot.rows(), ErrorKind::kDimension,
                  "design rows differ from number of labels");
  detail::require(stacked.size() == m * k, ErrorKind::kDimension,
                  "stacked weights have wrong length");
  const Eigen::Map<const Mat> weights(stacked.data(), m, k);
  const Mat logits = design * weights;
  double ll = 0.0;
  Mat p(logits.rows(), k);
  for (Index n = 0; n < logits.rows(); ++n) {
    const double top = logits.row(n).maxCoeff();
    const double lse =
        top + std::log((logits.row(n).array() - top).exp().sum());
    ll += one_hot.row(n).dot(logits.row(n)) - lse;
    p.row(n) = (logits.row(n).array() - lse).exp();
  }
  if (grad) {
    grad->resize(m * k);
    Eigen::Map<Mat>(grad->data(), m, k) =
        design.transpose() * (one_hot - p);
  }
  return ll;
}

// Multiclass logistic regression. The posterior over the stacked weights
// factorises per class: use layout() for the fit.
class SoftmaxModel : public TargetModel {
 public:
  SoftmaxModel(Mat design, Mat one_hot)
      : design_(std::move(design)), one_hot_(std::move(one_hot)) {
    detail::require(one_hot_.cols() >= 2, ErrorKind::kConfig,
                    "softmax needs K >= 2");
    check_one_hot(one_hot_);
  }

  Index dim() const override { return design_.cols() * one_hot_.cols(); }
  Index classes() const { return one_hot_.cols(); }
  BlockLayout layout() const {
    return BlockLayout::uniform(classes(), design_.cols());
  }

  double log_lik(const Vec& w, double) const override {
    return softmax_loglik(w, design_, one_hot_);
  }
  double log_lik_grad(const Vec& w, double, Vec& grad) const override {
    return softmax_loglik(w, design_, one_hot_, &grad);
  }

  // Class k's logits for every sample are one product Phi W_k, with W_k
  // the rows of ws holding that class's weights.
  Vec log_lik_batch(const Mat& ws, double, Mat* grads) const override {
    const Index m = design_.cols(), k = classes(), n = design_.rows();
    const Index count = ws.cols();
    std::vector<Mat> logits(static_cast<size_t>(k));
    for (Index c = 0; c < k; ++c)
      logits[static_cast<size_t>(c)] = design_ * ws.middleRows(c * m, m);
    Vec values = Vec::Zero(count);
    Vec row(k);
    for (Index s = 0; s < count; ++s)
      for (Index i = 0; i < n; ++i) {
        for (Index c = 0; c < k; ++c)
          row[c] = logits[static_cast<size_t>(c)](i, s);
        const double top = row.maxCoeff();
        const double lse = top + std::log((row.array() - top).exp().sum());
        for (Index c = 0; c < k; ++c) {
          values[s] += one_hot_(i, c) * row[c];
          // Reuse the logit storage for y - p.
          logits[static_cast<size_t>(c)](i, s) =
              one_hot_(i, c) - std::exp(row[c] - lse);
        }
        values[s] -= lse;
      }
    if (grads) {
      grads->resize(m * k, count);
      for (Index c = 0; c < k; ++c)
        grads->middleRows(c * m, m).noalias() =
            design_.transpose() * logits[static_cast<size_t>(c)];
    }
    return values;
  }

 private:
  Mat design_;
  Mat one_hot_;
};

}  // namespace fsvi

#endif  // FSVI_MODELS_SOFTMAX_HPP
