#ifndef FSVI_MODELS_AZZALINI_HPP
#define FSVI_MODELS_AZZALINI_HPP

#include <array>
#include <cmath>
#include <numbers>

#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// ln Phi(h) for the standard normal CDF, accurate far into the left tail.
inline double log_normal_cdf(double h) {
  if (h > -20.0) return std::log(0.5 * std::erfc(-h / std::numbers::sqrt2));
  // Phi(h) ~ phi(h)/(-h) * (1 - 1/h^2 + 3/h^4 - 15/h^6 + 105/h^8)
  const double h2 = h * h;
  const double series =
      1.0 - 1.0 / h2 + 3.0 / (h2 * h2) - 15.0 / (h2 * h2 * h2) +
      105.0 / (h2 * h2 * h2 * h2);
  return -0.5 * h2 - 0.5 * std::log(2.0 * std::numbers::pi) -
         std::log(-h) + std::log(series);
}

// phi(h) / Phi(h).
inline double normal_hazard(double h) {
  if (h > -20.0) {
    const double log_pdf = -0.5 * h * h - 0.5 * std::log(2.0 * std::numbers::pi);
    return std::exp(log_pdf - log_normal_cdf(h));
  }
  const double h2 = h * h;
  const double series =
      1.0 - 1.0 / h2 + 3.0 / (h2 * h2) - 15.0 / (h2 * h2 * h2) +
      105.0 / (h2 * h2 * h2 * h2);
  return -h / series;
}

// f(w) = 2 N(w | 0, I_2) Phi(h(w)),
// h(w) = (w1, w2, w1 w2^2, w1^2 w2, w1^3, w2^3) . a. Every monomial is odd,
// so h(-w) = -h(w) and f integrates to one.
class AzzaliniTarget : public TargetModel {
 public:
  using Coefficients = std::array<double, 6>;

  explicit AzzaliniTarget(Coefficients a) : a_(a) {}

  const Coefficients& coefficients() const { return a_; }

  double skew(double w1, double w2) const {
    return a_[0] * w1 + a_[1] * w2 + a_[2] * w1 * w2 * w2 +
           a_[3] * w1 * w1 * w2 + a_[4] * w1 * w1 * w1 + a_[5] * w2 * w2 * w2;
  }

  double log_density(double w1, double w2) const {
    return std::log(2.0) - std::log(2.0 * std::numbers::pi) -
           0.5 * (w1 * w1 + w2 * w2) + log_normal_cdf(skew(w1, w2));
  }

  double log_density_grad(double w1, double w2, double& g1, double& g2) const {
    const double h = skew(w1, w2);
    const double dh1 = a_[0] + a_[2] * w2 * w2 + 2.0 * a_[3] * w1 * w2 +
                       3.0 * a_[4] * w1 * w1;
    const double dh2 = a_[1] + 2.0 * a_[2] * w1 * w2 + a_[3] * w1 * w1 +
                       3.0 * a_[5] * w2 * w2;
    const double ratio = normal_hazard(h);
    g1 = -w1 + ratio * dh1;
    g2 = -w2 + ratio * dh2;
    return log_density(w1, w2);
  }

  // As a target the density itself is the (flat-prior) posterior.
  Index dim() const override { return 2; }
  PriorKind prior() const override { return PriorKind::kFlat; }
  double log_lik(const Vec& w, double) const override {
    return log_density(w[0], w[1]);
  }
  double log_lik_grad(const Vec& w, double, Vec& grad) const override {
    grad.resize(2);
    return log_density_grad(w[0], w[1], grad[0], grad[1]);
  }

 private:
  Coefficients a_;
};

// Coefficient vectors of the three bivariate benchmark targets.
inline constexpr std::array<AzzaliniTarget::Coefficients, 3>
    kBivariateBenchmarks = {{{-3, 1, -1, -1, -1, -1},
                             {0, -2, -4, -1, -3, 0},
                             {1, 0, 2, 1, -1, 0}}};

}  // namespace fsvi

#endif  // FSVI_MODELS_AZZALINI_HPP
