#ifndef FSVI_MODELS_ATTENUATION_HPP
#define FSVI_MODELS_ATTENUATION_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "fsvi/error.hpp"
#include "fsvi/model.hpp"
#include "fsvi/types.hpp"

namespace fsvi {

// Synthetic spectral-attenuation regression used in place of the
// stochastic ground-motion simulator. Log Fourier amplitude at frequency f
// and distance R for a record from source e:
//
//   y = -ln(1 + (f / fc_e)^2) - eta ln R - pi f R / (Q v) - pi kappa f
//
// with corner frequency fc_e = base_e exp(s_e / 3), Q = exp(q) and
// kappa = exp(k). Parameters w = [s_1..s_E, eta, q, k].
struct AttenuationData {
  std::vector<int> source;
  Vec distance;
  Vec frequency;
  Vec targets;

  Index size() const { return targets.size(); }

  AttenuationData subset(const std::vector<Index>& rows) const {
    AttenuationData out;
    const Index n = static_cast<Index>(rows.size());
    out.distance.resize(n);
    out.frequency.resize(n);
    out.targets.resize(n);
    for (Index i = 0; i < n; ++i) {
      const Index r = rows[static_cast<size_t>(i)];
      out.source.push_back(source[static_cast<size_t>(r)]);
      out.distance[i] = distance[r];
      out.frequency[i] = frequency[r];
      out.targets[i] = targets[r];
    }
    return out;
  }
};

class AttenuationModel : public GaussianNoiseModel {
 public:
  static constexpr double kShearVelocity = 3.5;

  AttenuationModel(AttenuationData data, Vec corner_base)
      : GaussianNoiseModel(PriorKind::kFlat), data_(std::move(data)),
        corner_base_(std::move(corner_base)) {
    for (int e : data_.source)
      detail::require(e >= 0 && e < corner_base_.size(), ErrorKind::kData,
                      "record refers to an unknown source");
    log_distance_ = data_.distance.array().log();
  }

  Index num_sources() const { return corner_base_.size(); }
  Index dim() const override { return num_sources() + 3; }
  const Vec& targets() const override { return data_.targets; }

  Vec predict(const Vec& w) const override {
    Vec out(data_.size());
    for (Index n = 0; n < data_.size(); ++n) out[n] = record_value(w, n);
    return out;
  }

  // Per-column versions that hoist the per-source and global exponentials
  // out of the record loop.
  Mat predict_batch(const Mat& ws) const override {
    const Index e_count = num_sources();
    Mat out(data_.size(), ws.cols());
    Vec inv_fc(e_count);
    for (Index s = 0; s < ws.cols(); ++s) {
      for (Index e = 0; e < e_count; ++e)
        inv_fc[e] = std::exp(-ws(e, s) / 3.0) / corner_base_[e];
      const double eta = ws(e_count, s);
      const double path =
          std::numbers::pi * std::exp(-ws(e_count + 1, s)) / kShearVelocity;
      const double site = std::numbers::pi * std::exp(ws(e_count + 2, s));
      for (Index n = 0; n < data_.size(); ++n) {
        const double f = data_.frequency[n];
        const double ratio = f * inv_fc[data_.source[static_cast<size_t>(n)]];
        out(n, s) = -std::log1p(ratio * ratio) - eta * log_distance_[n] -
                    path * f * data_.distance[n] - site * f;
      }
    }
    return out;
  }

  Mat jacobian_transpose_times_batch(const Mat& ws,
                                     const Mat& r) const override {
    const Index e_count = num_sources();
    Mat out = Mat::Zero(dim(), ws.cols());
    Vec inv_fc(e_count);
    for (Index s = 0; s < ws.cols(); ++s) {
      for (Index e = 0; e < e_count; ++e)
        inv_fc[e] = std::exp(-ws(e, s) / 3.0) / corner_base_[e];
      const double path =
          std::numbers::pi * std::exp(-ws(e_count + 1, s)) / kShearVelocity;
      const double site = std::numbers::pi * std::exp(ws(e_count + 2, s));
      auto g = out.col(s);
      for (Index n = 0; n < data_.size(); ++n) {
        const int e = data_.source[static_cast<size_t>(n)];
        const double f = data_.frequency[n], rn = r(n, s);
        const double ratio = f * inv_fc[e];
        const double u = ratio * ratio;
        g[e] += rn * (2.0 / 3.0) * u / (1.0 + u);
        g[e_count] -= rn * log_distance_[n];
        g[e_count + 1] += rn * path * f * data_.distance[n];
        g[e_count + 2] -= rn * site * f;
      }
    }
    return out;
  }

  Vec jacobian_transpose_times(const Vec& w, const Vec& r) const override {
    const Index e_count = num_sources();
    Vec g = Vec::Zero(dim());
    const double inv_q = std::exp(-w[e_count + 1]);
    const double kappa = std::exp(w[e_count + 2]);
    for (Index n = 0; n < data_.size(); ++n) {
      const int e = data_.source[static_cast<size_t>(n)];
      const double f = data_.frequency[n], dist = data_.distance[n];
      const double u = corner_ratio_sq(w, e, f);
      g[e] += r[n] * (2.0 / 3.0) * u / (1.0 + u);
      g[e_count] += r[n] * -std::log(dist);
      g[e_count + 1] += r[n] * std::numbers::pi * f * dist * inv_q /
                        kShearVelocity;
      g[e_count + 2] += r[n] * -std::numbers::pi * f * kappa;
    }
    return g;
  }

 private:
  // (f / fc_e)^2
  double corner_ratio_sq(const Vec& w, int e, double f) const {
    const double fc = corner_base_[e] * std::exp(w[e] / 3.0);
    return (f / fc) * (f / fc);
  }

  double record_value(const Vec& w, Index n) const {
    const Index e_count = num_sources();
    const int e = data_.source[static_cast<size_t>(n)];
    const double f = data_.frequency[n], dist = data_.distance[n];
    return -std::log1p(corner_ratio_sq(w, e, f)) -
           w[e_count] * std::log(dist) -
           std::numbers::pi * f * dist * std::exp(-w[e_count + 1]) /
               kShearVelocity -
           std::numbers::pi * f * std::exp(w[e_count + 2]);
  }

  AttenuationData data_;
  Vec corner_base_;
  Vec log_distance_;
};

struct AttenuationProblem {
  AttenuationData data;
  Vec corner_base;
  Vec truth;
  double noise_sd = 0.5;
};

// E sources with distinct base corner frequencies; distances log-uniform
// on [5, 150] km and frequencies log-uniform on [0.5, 25] Hz.
inline AttenuationProblem synth_attenuation_problem(Index n, std::uint64_t seed,
                                                    Index sources = 8,
                                                    double noise_sd = 0.5) {
  detail::require(n >= 1 && sources >= 1, ErrorKind::kConfig,
                  "attenuation problem needs records and sources");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;

  AttenuationProblem p;
  p.noise_sd = noise_sd;
  p.corner_base.resize(sources);
  p.truth.resize(sources + 3);
  for (Index e = 0; e < sources; ++e) {
    p.corner_base[e] = 0.8 + 3.2 * static_cast<double>(e) /
                                 static_cast<double>(std::max<Index>(sources - 1, 1));
    p.truth[e] = std::log(50.0) + 0.3 * normal(rng);
  }
  p.truth[sources] = 1.0;                    // eta
  p.truth[sources + 1] = std::log(300.0);    // q = ln Q
  p.truth[sources + 2] = std::log(0.03);     // k = ln kappa

  AttenuationData& d = p.data;
  d.distance.resize(n);
  d.frequency.resize(n);
  d.targets.resize(n);
  for (Index i = 0; i < n; ++i) {
    d.source.push_back(static_cast<int>(i % sources));
    d.distance[i] = 5.0 * std::pow(30.0, unit(rng));
    d.frequency[i] = 0.5 * std::pow(50.0, unit(rng));
  }
  const AttenuationModel clean(d, p.corner_base);
  const Vec mean = clean.predict(p.truth);
  for (Index i = 0; i < n; ++i) d.targets[i] = mean[i] + noise_sd * normal(rng);
  return p;
}

}  // namespace fsvi

#endif  // FSVI_MODELS_ATTENUATION_HPP
