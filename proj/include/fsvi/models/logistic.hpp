#ifndef FSVI_MODELS_LOGISTIC_HPP
#define FSVI_MODELS_LOGISTIC_HPP

#include <algorithm>
#include <cmath>
#include <utility>

#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// log(1 + e^a) without overflow.
inline double log1p_exp(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

inline double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

inline void check_binary_labels(const Vec& labels) {
  for (Index i = 0; i < labels.size(); ++i)
    detail::require(labels[i] == 0.0 || labels[i] == 1.0, ErrorKind::kData,
                    "label at row " + std::to_string(i) + " is not 0 or 1");
}

// sum_n y_n ln s(a_n) + (1 - y_n) ln(1 - s(a_n)) with a = Phi w, written as
// y a - log(1 + e^a). Gradient Phi^T (y - s(Phi w)).
inline double logistic_loglik(const Vec& w, const Mat& design,
                              const Vec& labels, Vec* grad = nullptr) {
  detail::require(design.cols() == w.size() && design.rows() == labels.size(),
                  ErrorKind::kDimension, "logistic dimensions inconsistent");
  const Vec a = design * w;
  double ll = 0.0;
  Vec resid(a.size());
  for (Index n = 0; n < a.size(); ++n) {
    ll += labels[n] * a[n] - log1p_exp(a[n]);
    resid[n] = labels[n] - sigmoid(a[n]);
  }
  if (grad) *grad = design.transpose() * resid;
  return ll;
}

class LogisticModel : public TargetModel {
 public:
  LogisticModel(Mat design, Vec labels)
      : design_(std::move(design)), labels_(std::move(labels)) {
    detail::require(design_.rows() == labels_.size(), ErrorKind::kDimension,
                    "design rows differ from number of labels");
    check_binary_labels(labels_);
  }

  Index dim() const override { return design_.cols(); }
  double log_lik(const Vec& w, double) const override {
    return logistic_loglik(w, design_, labels_);
  }
  double log_lik_grad(const Vec& w, double, Vec& grad) const override {
    return logistic_loglik(w, design_, labels_, &grad);
  }
  Vec log_lik_batch(const Mat& ws, double, Mat* grads) const override {
    const Mat a = design_ * ws;
    Vec values = Vec::Zero(ws.cols());
    Mat resid(a.rows(), a.cols());
    for (Index s = 0; s < a.cols(); ++s)
      for (Index n = 0; n < a.rows(); ++n) {
        // One exponential serves both log(1 + e^a) and the sigmoid.
        const double v = a(n, s);
        const double e = std::exp(-std::abs(v));
        values[s] += labels_[n] * v - (std::max(v, 0.0) + std::log1p(e));
        resid(n, s) = labels_[n] - (v >= 0.0 ? 1.0 : e) / (1.0 + e);
      }
    if (grads) *grads = design_.transpose() * resid;
    return values;
  }
  const Mat& design() const { return design_; }

 private:
  Mat design_;
  Vec labels_;
};

// P(y = 1 | phi, w) for every row.
inline Vec logistic_predict(const Mat& design, const Vec& w) {
  return (design * w).unaryExpr([](double a) { return sigmoid(a); });
}

}  // namespace fsvi

#endif  // FSVI_MODELS_LOGISTIC_HPP
