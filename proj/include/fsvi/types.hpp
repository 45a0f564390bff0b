#ifndef FSVI_TYPES_HPP
#define FSVI_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fsvi/error.hpp"

namespace fsvi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using Rng = std::mt19937_64;

// Partition of the parameter vector into contiguous blocks. The posterior
// factor is block diagonal with respect to it; a single block means a
// full M x M factor.
class BlockLayout {
 public:
  BlockLayout() = default;

  explicit BlockLayout(Index dim) : sizes_{dim}, offsets_{0} {}

  explicit BlockLayout(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    offsets_.reserve(sizes_.size());
    Index off = 0;
    for (Index s : sizes_) {
      detail::require(s > 0, ErrorKind::kDimension,
                      "block sizes must be positive");
      offsets_.push_back(off);
      off += s;
    }
  }

  static BlockLayout uniform(Index count, Index size) {
    return BlockLayout(std::vector<Index>(static_cast<size_t>(count), size));
  }

  Index dim() const {
    return sizes_.empty() ? 0 : offsets_.back() + sizes_.back();
  }
  size_t count() const { return sizes_.size(); }
  Index size(size_t b) const { return sizes_[b]; }
  Index offset(size_t b) const { return offsets_[b]; }
  const std::vector<Index>& sizes() const { return sizes_; }

  // Number of free entries in a block-diagonal factor.
  Index num_factor_entries() const {
    Index n = 0;
    for (Index s : sizes_) n += s * s;
    return n;
  }

  bool operator==(const BlockLayout& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

// q(w) = N(mu, L L^T). L is square and block diagonal under layout().
class VariationalPosterior {
 public:
  VariationalPosterior() = default;

  VariationalPosterior(Vec mu, Mat factor)
      : VariationalPosterior(std::move(mu), std::move(factor),
                             BlockLayout(0)) {}

  VariationalPosterior(Vec mu, Mat factor, BlockLayout layout)
      : mu_(std::move(mu)), factor_(std::move(factor)),
        layout_(std::move(layout)) {
    if (layout_.dim() == 0) layout_ = BlockLayout(mu_.size());
    validate();
  }

  // mu and c * I.
  static VariationalPosterior isotropic(Vec mu, double c,
                                       std::optional<BlockLayout> layout = {}) {
    const Index m = mu.size();
    Mat factor = c * Mat::Identity(m, m);
    return VariationalPosterior(std::move(mu), std::move(factor),
                                layout.value_or(BlockLayout(m)));
  }

  Index dim() const { return mu_.size(); }
  const Vec& mean() const { return mu_; }
  const Mat& factor() const { return factor_; }
  const BlockLayout& layout() const { return layout_; }

  void set_mean(Vec mu) {
    detail::require(mu.size() == dim(), ErrorKind::kDimension,
                    "mean length does not match posterior dimension");
    mu_ = std::move(mu);
  }

  void set_factor(Mat factor) {
    detail::require(factor.rows() == dim() && factor.cols() == dim(),
                    ErrorKind::kDimension,
                    "factor must be square with the posterior dimension");
    factor_ = std::move(factor);
    zero_off_block();
  }

  // w = mu + L z, evaluated block by block.
  Vec transform(const Eigen::Ref<const Vec>& z) const {
    Vec w = mu_;
    for (size_t b = 0; b < layout_.count(); ++b) {
      const Index o = layout_.offset(b), s = layout_.size(b);
      w.segment(o, s).noalias() += factor_.block(o, o, s, s) * z.segment(o, s);
    }
    return w;
  }

  // Column s of the result is mu + L z_s for column s of zs.
  Mat transform_batch(const Mat& zs) const {
    Mat ws(dim(), zs.cols());
    for (size_t b = 0; b < layout_.count(); ++b) {
      const Index o = layout_.offset(b), s = layout_.size(b);
      ws.middleRows(o, s).noalias() =
          factor_.block(o, o, s, s) * zs.middleRows(o, s);
    }
    ws.colwise() += mu_;
    return ws;
  }

  Mat covariance() const { return factor_ * factor_.transpose(); }

  // In-block factor entries, block by block, column-major within a block.
  Vec pack_factor() const {
    Vec flat(layout_.num_factor_entries());
    Index k = 0;
    for (size_t b = 0; b < layout_.count(); ++b) {
      const Index o = layout_.offset(b), s = layout_.size(b);
      for (Index j = 0; j < s; ++j)
        for (Index i = 0; i < s; ++i) flat[k++] = factor_(o + i, o + j);
    }
    return flat;
  }

  void unpack_factor(const Eigen::Ref<const Vec>& flat) {
    detail::require(flat.size() == layout_.num_factor_entries(),
                    ErrorKind::kDimension, "packed factor has wrong length");
    Index k = 0;
    for (size_t b = 0; b < layout_.count(); ++b) {
      const Index o = layout_.offset(b), s = layout_.size(b);
      for (Index j = 0; j < s; ++j)
        for (Index i = 0; i < s; ++i) factor_(o + i, o + j) = flat[k++];
    }
  }

  // Restricts a full M x M matrix (e.g. a gradient) to the block pattern.
  Vec pack_matrix(const Mat& full) const {
    VariationalPosterior tmp = *this;
    tmp.factor_ = full;
    return tmp.pack_factor();
  }

 private:
  void validate() {
    detail::require(factor_.rows() == factor_.cols(), ErrorKind::kDimension,
                    "factor must be square");
    detail::require(factor_.rows() == mu_.size(), ErrorKind::kDimension,
                    "factor dimension differs from mean length");
    detail::require(layout_.dim() == mu_.size(), ErrorKind::kDimension,
                    "block layout does not cover the posterior dimension");
    detail::require(mu_.allFinite() && factor_.allFinite(),
                    ErrorKind::kInvalidPosterior,
                    "posterior contains non-finite entries");
    for (size_t b = 0; b < layout_.count(); ++b) {
      const Index o = layout_.offset(b), s = layout_.size(b);
      const bool clean = factor_.block(o, 0, s, o).isZero(0.0) &&
                         factor_.block(o, o + s, s, dim() - o - s).isZero(0.0);
      detail::require(clean, ErrorKind::kInvalidPosterior,
                      "factor has entries outside its diagonal blocks");
    }
  }

  void zero_off_block() {
    if (layout_.count() == 1) return;
    Mat kept = Mat::Zero(dim(), dim());
    for (size_t b = 0; b < layout_.count(); ++b) {
      const Index o = layout_.offset(b), s = layout_.size(b);
      kept.block(o, o, s, s) = factor_.block(o, o, s, s);
    }
    factor_ = std::move(kept);
  }

  Vec mu_;
  Mat factor_;
  BlockLayout layout_;
};

// Fixed standard-normal draws z_(1..S); column s is draw s.
class SampleSet {
 public:
  SampleSet() = default;

  SampleSet(Mat draws, std::uint64_t seed)
      : draws_(std::move(draws)), seed_(seed) {
    detail::require(draws_.cols() >= 1, ErrorKind::kConfig,
                    "sample set needs at least one draw");
  }

  static SampleSet standard_normal(Index count, Index dim,
                                   std::uint64_t seed) {
    detail::require(count >= 1, ErrorKind::kConfig,
                    "sample set needs at least one draw");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Mat draws(dim, count);
    for (Index s = 0; s < count; ++s)
      for (Index i = 0; i < dim; ++i) draws(i, s) = normal(rng);
    return SampleSet(std::move(draws), seed);
  }

  Index size() const { return draws_.cols(); }
  Index dim() const { return draws_.rows(); }
  auto draw(Index s) const { return draws_.col(s); }
  const Mat& draws() const { return draws_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Mat draws_;
  std::uint64_t seed_ = 0;
};

struct Hyperparameters {
  double alpha = 0.1;
  std::optional<double> beta;

  void validate() const {
    detail::require(std::isfinite(alpha) && alpha > 0.0, ErrorKind::kConfig,
                    "alpha must be positive");
    detail::require(!beta || (std::isfinite(*beta) && *beta > 0.0),
                    ErrorKind::kConfig, "beta must be positive");
  }
};

struct TraceRow {
  int iteration = 0;
  double train_bound = 0.0;
  double holdout_bound = 0.0;  // NaN when no holdout set is used
};

struct FitReport {
  VariationalPosterior posterior;
  Hyperparameters hyper;
  Vec model_hyper;  // trainable model hyperparameters, empty if none
  std::vector<TraceRow> trace;
  bool converged = false;
  bool monotone = true;  // false if the bound ever dropped between iterations
  int iterations = 0;
};

}  // namespace fsvi

#endif  // FSVI_TYPES_HPP
