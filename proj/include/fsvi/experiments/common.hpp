#ifndef FSVI_EXPERIMENTS_COMMON_HPP
#define FSVI_EXPERIMENTS_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsvi/fit.hpp"
#include "fsvi/io/csv.hpp"
#include "fsvi/types.hpp"

namespace fsvi::experiments {

// Overrides of the fit settings shared by every pipeline; unset fields keep
// the pipeline's own defaults.
struct RunSettings {
  std::optional<Index> samples;
  std::optional<Index> holdout_samples;
  std::optional<int> inner_iters;
  std::optional<int> max_iter;
  std::optional<double> tolerance;
  std::uint64_t seed = 0;

  FitConfig apply(FitConfig base) const {
    if (samples) base.samples = *samples;
    if (holdout_samples) base.holdout_samples = *holdout_samples;
    if (inner_iters) base.inner_iters = *inner_iters;
    if (max_iter) base.max_iter = *max_iter;
    if (tolerance) base.tolerance = *tolerance;
    return base;
  }
};

inline std::string fmt(double v) { return io::format_double(v); }

inline io::CsvTable trace_table(const FitReport& report) {
  io::CsvTable t({"iteration", "train_bound", "holdout_bound"});
  for (const TraceRow& r : report.trace)
    t.add_row({std::to_string(r.iteration), fmt(r.train_bound),
               fmt(r.holdout_bound)});
  return t;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample mean and (n - 1)-normalised standard deviation.
inline MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

inline Mat column(const Vec& v) { return Mat(v); }

}  // namespace fsvi::experiments

#endif  // FSVI_EXPERIMENTS_COMMON_HPP
