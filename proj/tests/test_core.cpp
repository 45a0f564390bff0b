#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsvi/experiments/blr.hpp"
#include "test_support.hpp"

using namespace fsvi;
using namespace fsvi::testing;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(Posterior, RejectsMismatchedShapes) {
  EXPECT_THROW(VariationalPosterior(Vec::Zero(3), Mat::Identity(2, 2)), Error);
  EXPECT_THROW(VariationalPosterior(Vec::Zero(2), Mat::Zero(2, 3)), Error);
}

TEST(Posterior, RejectsEntriesOutsideBlocks) {
  Mat l = Mat::Identity(4, 4);
  l(0, 3) = 0.1;
  try {
    VariationalPosterior(Vec::Zero(4), l, BlockLayout::uniform(2, 2));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidPosterior);
  }
}

TEST(Posterior, PackUnpackRoundTrip) {
  Rng rng(3);
  VariationalPosterior p = random_posterior(BlockLayout({2, 3}), rng);
  const Vec flat = p.pack_factor();
  EXPECT_EQ(flat.size(), 4 + 9);
  VariationalPosterior q = p;
  q.unpack_factor(Vec::Zero(flat.size()));
  q.unpack_factor(flat);
  EXPECT_EQ(q.factor(), p.factor());
}

TEST(Posterior, TransformMatchesExplicitProduct) {
  Rng rng(4);
  const VariationalPosterior p = random_posterior(BlockLayout::uniform(3, 2), rng);
  const Vec z = random_vector(6, rng);
  const Vec explicit_w = p.mean() + p.factor() * z;
  EXPECT_LT((p.transform(z) - explicit_w).cwiseAbs().maxCoeff(), 1e-12);
  Mat zs(6, 2);
  zs << z, -z;
  const Mat ws = p.transform_batch(zs);
  EXPECT_LT((ws.col(0) - explicit_w).cwiseAbs().maxCoeff(), 1e-12);
}

// Evaluating the model at mu + L z must equal evaluating at the same
// vector assembled explicitly, for every model.
TEST(Posterior, ReparameterisationIdentity) {
  Rng rng(8);
  for (const ModelCase& c : model_zoo()) {
    VariationalPosterior p = random_posterior(c.layout, rng, c.mean_sd);
    p.set_mean(p.mean() + zoo_centre(c));
    const SampleSet z = SampleSet::standard_normal(4, p.dim(), 1);
    const double beta = c.hyper.beta.value_or(1.0);
    const Vec batch = c.model->log_lik_batch(p.transform_batch(z.draws()), beta, nullptr);
    for (Index s = 0; s < z.size(); ++s) {
      Vec w(p.dim());
      for (Index i = 0; i < p.dim(); ++i) {
        w[i] = p.mean()[i];
        for (Index j = 0; j < p.dim(); ++j) w[i] += p.factor()(i, j) * z.draws()(j, s);
      }
      const double direct = c.model->log_lik(w, beta);
      EXPECT_NEAR(batch[s], direct, 1e-12 * (1.0 + std::abs(direct))) << c.name;
    }
  }
}

TEST(SampleSet, DeterministicPerSeed) {
  const SampleSet a = SampleSet::standard_normal(5, 3, 11);
  const SampleSet b = SampleSet::standard_normal(5, 3, 11);
  const SampleSet c = SampleSet::standard_normal(5, 3, 12);
  EXPECT_EQ(a.draws(), b.draws());
  EXPECT_NE(a.draws(), c.draws());
  EXPECT_THROW(SampleSet::standard_normal(0, 3, 1), Error);
}

TEST(Linalg, LogDetHandlesSignAndBlocks) {
  Mat l(3, 3);
  l << 2, 0, 0,
       0, 0, 1,
       0, 3, 0;
  const VariationalPosterior p(Vec::Zero(3), l, BlockLayout({1, 2}));
  const LogDet ld = log_abs_det(p);
  EXPECT_NEAR(ld.log_abs, std::log(6.0), 1e-14);
  EXPECT_EQ(ld.sign, -1);
}

TEST(Linalg, SingularFactorRejected) {
  const VariationalPosterior p(Vec::Zero(2), Mat::Zero(2, 2));
  EXPECT_THROW(log_abs_det(p), Error);
  const VariationalPosterior tiny(Vec::Zero(2), 1e-160 * Mat::Identity(2, 2));
  EXPECT_THROW(log_abs_det(tiny), Error);
}

TEST(Linalg, PseudoInverseOfInvertibleIsInverse) {
  Rng rng(2);
  const Mat a = Mat::Identity(4, 4) + random_matrix(4, 4, rng, 0.2);
  EXPECT_LT((pseudo_inverse(a) * a - Mat::Identity(4, 4)).norm(), 1e-12);
  Mat rank1 = Vec::Ones(3) * Vec::Ones(3).transpose();
  const Mat pinv = pseudo_inverse(rank1);
  EXPECT_LT((rank1 * pinv * rank1 - rank1).norm(), 1e-12);
}

// ---- KL and bound -----------------------------------------------------

TEST(Kl, ExamplesFromDefinition) {
  EXPECT_NEAR(kl_gaussian_prior(VariationalPosterior(Vec::Zero(3), Mat::Identity(3, 3)), 1.0),
              0.0, 1e-15);
  Vec mu(2);
  mu << 1, 0;
  EXPECT_NEAR(kl_gaussian_prior(VariationalPosterior(mu, Mat::Identity(2, 2)), 1.0), 0.5,
              1e-15);
}

TEST(Kl, NonNegativeAndZeroOnlyAtPrior) {
  Rng rng(21);
  std::uniform_real_distribution<double> alpha(0.1, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const VariationalPosterior p = random_posterior(BlockLayout(3), rng, 1.0, 0.8, 0.3);
    EXPECT_GE(kl_gaussian_prior(p, alpha(rng)), 0.0);
  }
  const double a = 2.5;
  const VariationalPosterior at_prior(Vec::Zero(4), Mat::Identity(4, 4) / std::sqrt(a));
  EXPECT_NEAR(kl_gaussian_prior(at_prior, a), 0.0, 1e-10);
}

// Monte-Carlo estimate of E_q[log q - log p] with the densities written
// out directly.
TEST(Kl, AgreesWithMonteCarlo) {
  Rng rng(99);
  std::uniform_real_distribution<double> alpha_dist(0.3, 3.0);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 3; ++t) {
    const Index m = 2 + t;
    const VariationalPosterior p = random_posterior(BlockLayout(m), rng, 1.0, 0.7, 0.3);
    const double alpha = alpha_dist(rng);
    const double log_det = std::log(std::abs(p.factor().determinant()));
    const int draws = 200000;
    double acc = 0.0;
    Vec z(m);
    for (int d = 0; d < draws; ++d) {
      for (Index i = 0; i < m; ++i) z[i] = normal(rng);
      const Vec w = p.mean() + p.factor() * z;
      const double log_q = -0.5 * m * std::log(2 * kPi) - log_det - 0.5 * z.squaredNorm();
      const double log_p = 0.5 * m * std::log(alpha / (2 * kPi)) - 0.5 * alpha * w.squaredNorm();
      acc += log_q - log_p;
    }
    const double mc = acc / draws;
    const double kl = kl_gaussian_prior(p, alpha);
    EXPECT_NEAR(kl, mc, 0.02 * std::max(kl, 0.1)) << "M=" << m;
  }
}

TEST(Bound, ZeroModelAtPriorIsZero) {
  ZeroModel model(2);
  const VariationalPosterior p(Vec::Zero(2), Mat::Identity(2, 2));
  const SampleSet z = SampleSet::standard_normal(7, 2, 1);
  EXPECT_NEAR(lower_bound_fs(model, p, {1.0, std::nullopt}, z), 0.0, 1e-15);
}

TEST(Bound, ZeroModelAlphaTwo) {
  for (Index m : {1, 3, 6}) {
    ZeroModel model(m);
    const VariationalPosterior p(Vec::Zero(m), Mat::Identity(m, m));
    const SampleSet z = SampleSet::standard_normal(3, m, 1);
    const double expected = -0.5 * m * (1.0 - std::log(2.0));
    EXPECT_NEAR(lower_bound_fs(model, p, {2.0, std::nullopt}, z), expected, 1e-13);
  }
}

TEST(Bound, FlatPriorUsesEntropy) {
  ZeroModel model(2, PriorKind::kFlat);
  Mat l(2, 2);
  l << 2, 0, 0, 0.5;
  const VariationalPosterior p(Vec::Zero(2), l);
  const SampleSet z = SampleSet::standard_normal(2, 2, 1);
  const double h = std::log(2 * kPi * std::numbers::e) + std::log(1.0);
  EXPECT_NEAR(lower_bound_fs(model, p, {}, z), h, 1e-13);
}

TEST(Bound, GaussianNoiseNeedsBeta) {
  const RegressionData d = synth_regression_data(5, 1);
  LinearGaussianModel model(Mat::Ones(5, 1), d.targets);
  const VariationalPosterior p(Vec::Zero(1), Mat::Identity(1, 1));
  const SampleSet z = SampleSet::standard_normal(2, 1, 1);
  try {
    lower_bound_fs(model, p, {1.0, std::nullopt}, z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

TEST(Bound, DimensionMismatch) {
  ZeroModel model(3);
  const VariationalPosterior p(Vec::Zero(2), Mat::Identity(2, 2));
  const SampleSet z = SampleSet::standard_normal(2, 2, 1);
  try {
    lower_bound_fs(model, p, {}, z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
  }
}

// The bound of an RBF regression evaluated by plain loops, with
// determinants from a dense LU of L L^T.
TEST(Bound, MatchesDirectSummationOracle) {
  Rng rng(17);
  const Index m = 3, n = 5, s_count = 8;
  const Mat phi = random_matrix(n, m, rng);
  const Vec y = random_vector(n, rng);
  const double alpha = 0.6, beta = 3.0;
  LinearGaussianModel model(phi, y);
  const VariationalPosterior p = random_posterior(BlockLayout(m), rng);
  const SampleSet z = SampleSet::standard_normal(s_count, m, 5);

  double sampled = 0.0;
  for (Index s = 0; s < s_count; ++s) {
    double sq = 0.0;
    for (Index i = 0; i < n; ++i) {
      double f = 0.0;
      for (Index j = 0; j < m; ++j) {
        double w = p.mean()[j];
        for (Index k = 0; k < m; ++k) w += p.factor()(j, k) * z.draws()(k, s);
        f += phi(i, j) * w;
      }
      sq += (y[i] - f) * (y[i] - f);
    }
    sampled += 0.5 * n * std::log(beta) - 0.5 * n * std::log(2 * kPi) - 0.5 * beta * sq;
  }
  sampled /= s_count;
  const Mat cov = p.factor() * p.factor().transpose();
  const double kl = 0.5 * (alpha * cov.trace() + alpha * p.mean().squaredNorm() - m -
                           std::log((alpha * cov).determinant()));
  const double oracle = sampled - kl;
  EXPECT_NEAR(lower_bound_fs(model, p, {alpha, beta}, z), oracle, 1e-10 * std::abs(oracle));
}

// ---- gradients --------------------------------------------------------

TEST(Gradient, ZeroModelExamples) {
  ZeroModel model(2);
  Vec mu(2);
  mu << 2, -1;
  const SampleSet z = SampleSet::standard_normal(3, 2, 1);
  const VariationalPosterior p(mu, Mat::Identity(2, 2));
  const Vec g = grad_mu(model, p, {1.0, std::nullopt}, z);
  EXPECT_NEAR(g[0], -2.0, 1e-15);
  EXPECT_NEAR(g[1], 1.0, 1e-15);
  EXPECT_LT(grad_L(model, p, {1.0, std::nullopt}, z).norm(), 1e-15);

  Mat l = Mat::Zero(2, 2);
  l(0, 0) = 2;
  l(1, 1) = 1;
  const Mat gl = grad_L(model, VariationalPosterior(Vec::Zero(2), l), {1.0, std::nullopt}, z);
  EXPECT_NEAR(gl(0, 0), -1.5, 1e-15);
  EXPECT_NEAR(gl(1, 1), 0.0, 1e-15);
  EXPECT_NEAR(gl(0, 1), 0.0, 1e-15);
}

// Finite-difference contract on every model: 20 random posteriors each.
TEST(Gradient, MatchesFiniteDifferencesForEveryModel) {
  for (const ModelCase& c : model_zoo()) {
    Rng rng(1234);
    for (int t = 0; t < 20; ++t) {
      VariationalPosterior p = random_posterior(c.layout, rng, c.mean_sd);
      p.set_mean(p.mean() + zoo_centre(c));
      const SampleSet z = SampleSet::standard_normal(6, p.dim(), 100 + t);
      const BoundGradient bg = bound_and_gradient(*c.model, p, c.hyper, z);

      const Vec fd_mu = finite_difference(
          [&](const Vec& x) {
            VariationalPosterior q = p;
            q.set_mean(x);
            return lower_bound_fs(*c.model, q, c.hyper, z);
          },
          p.mean());
      EXPECT_LT(relative_error(bg.mu, fd_mu), 1e-5) << c.name << " mu, trial " << t;

      const Vec fd_l = finite_difference(
          [&](const Vec& x) {
            VariationalPosterior q = p;
            q.unpack_factor(x);
            return lower_bound_fs(*c.model, q, c.hyper, z);
          },
          p.pack_factor());
      EXPECT_LT(relative_error(p.pack_matrix(bg.factor), fd_l), 1e-5)
          << c.name << " L, trial " << t;
    }
  }
}

TEST(Gradient, ModelHyperparametersMatchFiniteDifferences) {
  Rng rng(6);
  const Index d = 5, q = 2, n = 4;
  CauchyPpcaParams params{random_matrix(d, q, rng), random_vector(d, rng), 1.3};
  CauchyPpcaModel model(random_matrix(d, n, rng, 2.0), params);
  const VariationalPosterior p = random_posterior(model.layout(), rng);
  const SampleSet z = SampleSet::standard_normal(5, p.dim(), 3);
  const Hyperparameters hyper{1.0, std::nullopt};
  const Vec theta = model.model_hyper();
  Vec g;
  bound_model_hyper_gradient(model, p, hyper, z, g);
  const Vec fd = finite_difference(
      [&](const Vec& x) {
        model.set_model_hyper(x);
        return lower_bound_fs(model, p, hyper, z);
      },
      theta);
  model.set_model_hyper(theta);
  EXPECT_LT(relative_error(g, fd), 1e-6);
}

// ---- hyperparameter updates ------------------------------------------

TEST(Hyper, AlphaExamples) {
  EXPECT_DOUBLE_EQ(update_alpha(VariationalPosterior(Vec::Zero(4), Mat::Identity(4, 4))), 1.0);
  EXPECT_DOUBLE_EQ(update_alpha(VariationalPosterior(Vec::Ones(2), Mat::Identity(2, 2))), 0.5);
}

class FixedResidualModel : public GaussianNoiseModel {
 public:
  explicit FixedResidualModel(Vec residuals_sq) : sq_(std::move(residuals_sq)) {}
  Index dim() const override { return 1; }
  // w is the draw index; the single target residual is sqrt(sq[w]).
  Vec predict(const Vec& w) const override {
    Vec out(1);
    out[0] = -std::sqrt(sq_[static_cast<Index>(std::lround(w[0]))]);
    return out;
  }
  Vec jacobian_transpose_times(const Vec&, const Vec&) const override { return Vec::Zero(1); }
  const Vec& targets() const override { return zero_; }

 private:
  Vec sq_;
  Vec zero_ = Vec::Zero(1);
};

TEST(Hyper, BetaExamples) {
  Vec sq1(1);
  sq1 << 2.0;
  FixedResidualModel one(sq1);
  const VariationalPosterior p0(Vec::Zero(1), Mat::Identity(1, 1));
  SampleSet z1(Mat::Zero(1, 1), 0);
  EXPECT_DOUBLE_EQ(update_beta(one, p0, z1), 0.5);

  Vec sq2(2);
  sq2 << 1.0, 3.0;
  FixedResidualModel two(sq2);
  Mat draws(1, 2);
  draws << 0.0, 1.0;
  EXPECT_DOUBLE_EQ(update_beta(two, p0, SampleSet(draws, 0)), 0.5);
}

TEST(Hyper, BetaDegenerateWhenResidualsVanish) {
  LinearGaussianModel model(Mat::Identity(2, 2), Vec::Zero(2));
  const VariationalPosterior p(Vec::Zero(2), Mat::Identity(2, 2));
  try {
    update_beta(model, p, SampleSet(Mat::Zero(2, 1), 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerate);
  }
}

// Stationarity of the bound after the closed-form updates. The partial
// derivatives are written out independently:
//   dL/dalpha = M / (2 alpha) - (mu^T mu + tr L L^T) / 2
//   dL/dbeta  = N / (2 beta)  - sum_s |r_s|^2 / (2 S)
TEST(Hyper, UpdatesAreStationary) {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    const Index m = 2 + t % 4, n = 6;
    LinearGaussianModel model(random_matrix(n, m, rng), random_vector(n, rng));
    const VariationalPosterior p = random_posterior(BlockLayout(m), rng, 1.0, 0.5, 0.2);
    const SampleSet z = SampleSet::standard_normal(5, m, t);

    const double alpha = update_alpha(p);
    const double d_alpha =
        0.5 * m / alpha - 0.5 * (p.mean().squaredNorm() + p.factor().squaredNorm());
    EXPECT_NEAR(d_alpha, 0.0, 1e-8);

    const double beta = update_beta(model, p, z);
    double sq = 0.0;
    for (Index s = 0; s < z.size(); ++s) {
      const Vec w = p.mean() + p.factor() * z.draws().col(s);
      sq += (model.targets() - model.design() * w).squaredNorm();
    }
    const double d_beta = 0.5 * n / beta - 0.5 * sq / z.size();
    EXPECT_NEAR(d_beta, 0.0, 1e-8);

    // And a finite-difference cross-check of the same derivatives.
    auto bound_at = [&](double a, double b) { return lower_bound_fs(model, p, {a, b}, z); };
    const double ha = 1e-6 * alpha, hb = 1e-6 * beta;
    EXPECT_NEAR((bound_at(alpha + ha, beta) - bound_at(alpha - ha, beta)) / (2 * ha), 0.0,
                1e-4 * (1.0 + 1.0 / alpha));
    EXPECT_NEAR((bound_at(alpha, beta + hb) - bound_at(alpha, beta - hb)) / (2 * hb), 0.0,
                1e-4 * (1.0 + n / beta));
  }
}

TEST(Hyper, SharedAlphaOverBlocks) {
  const VariationalPosterior p(Vec::Ones(6), Mat::Identity(6, 6), BlockLayout::uniform(3, 2));
  EXPECT_DOUBLE_EQ(update_alpha(p), 6.0 / 12.0);
}

// ---- fit --------------------------------------------------------------

TEST(Fit, ZeroModelConvergesToPrior) {
  ZeroModel model(3);
  FitConfig c;
  c.samples = 20;
  c.holdout_samples = 0;
  c.init_alpha = 1.0;
  c.update_alpha = false;
  c.tolerance = 1e-10;
  const FitReport r = fit(model, c, 4);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.posterior.mean().norm(), 1e-4);
  EXPECT_LT((r.posterior.covariance() - Mat::Identity(3, 3)).norm(), 1e-4);
  EXPECT_NEAR(r.trace.back().train_bound, 0.0, 1e-8);
}

TEST(Fit, ConjugateRegressionMatchesExactMean) {
  Rng rng(8);
  const Index m = 3, n = 50;
  const Mat phi = random_matrix(n, m, rng);
  Vec w_true(m);
  w_true << 1.0, -0.5, 0.25;
  const Vec y = phi * w_true + random_vector(n, rng, 0.3);
  LinearGaussianModel model(phi, y);
  FitConfig c;
  c.samples = 200;
  c.holdout_samples = 0;
  c.init_alpha = 1.0;
  c.init_beta = 10.0;
  c.update_alpha = false;
  c.update_beta = false;
  const FitReport r = fit(model, c, 2);
  const GaussianPosteriorExact exact = exact_blr_posterior(phi, y, 1.0, 10.0);
  EXPECT_LT((r.posterior.mean() - exact.mean).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Fit, IdenticalSeedsGiveIdenticalTraces) {
  const RegressionData d = synth_regression_data(30, 2);
  const Mat x = Mat(d.inputs);
  const RbfDesign design = RbfDesign::from_inputs(x, 1.0, 6);
  LinearGaussianModel model(design.features(x), d.targets);
  FitConfig c;
  c.samples = 20;
  c.max_iter = 25;
  const FitReport a = fit(model, c, 9);
  const FitReport b = fit(model, c, 9);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].train_bound, b.trace[i].train_bound);
    EXPECT_EQ(a.trace[i].holdout_bound, b.trace[i].holdout_bound);
    EXPECT_EQ(a.trace[i].iteration, static_cast<int>(i) + 1);
  }
  EXPECT_EQ(a.posterior.factor(), b.posterior.factor());
  EXPECT_LE(a.iterations, c.max_iter);
}

TEST(Fit, InnerPhasesNeverDecreaseBoundWithFixedHyper) {
  const RegressionData d = synth_regression_data(30, 3);
  const Mat x = Mat(d.inputs);
  const RbfDesign design = RbfDesign::from_inputs(x, 1.0, 6);
  LinearGaussianModel model(design.features(x), d.targets);
  FitConfig c;
  c.samples = 20;
  c.max_iter = 40;
  c.holdout_samples = 0;
  c.update_alpha = false;
  c.update_beta = false;
  const FitReport r = fit(model, c, 1);
  EXPECT_TRUE(r.monotone);
  for (size_t i = 1; i < r.trace.size(); ++i)
    EXPECT_GE(r.trace[i].train_bound, r.trace[i - 1].train_bound);
}

TEST(Fit, ConfigValidation) {
  ZeroModel model(2);
  FitConfig c;
  c.samples = 0;
  EXPECT_THROW(fit(model, c, 1), Error);
  c = FitConfig{};
  c.samples = 10;
  c.holdout_samples = 5;  // monitoring needs S' > S
  try {
    fit(model, c, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  c.holdout_samples = 0;
  c.init_scale = 0.0;
  EXPECT_THROW(fit(model, c, 1), Error);
}

class ExplodingModel : public TargetModel {
 public:
  Index dim() const override { return 1; }
  double log_lik(const Vec& w, double) const override {
    return w[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -w[0] * w[0];
  }
  double log_lik_grad(const Vec& w, double b, Vec& g) const override {
    g = Vec::Constant(1, 1e6);
    return log_lik(w, b);
  }
};

TEST(Fit, NonFiniteBoundReportsIteration) {
  ExplodingModel model;
  FitConfig c;
  c.samples = 5;
  c.holdout_samples = 0;
  c.init_mean = Vec::Constant(1, 2.0);
  try {
    fit(model, c, 1);
    FAIL();
  } catch (const NumericalFailure& e) {
    EXPECT_GE(e.iteration(), 0);
    EXPECT_EQ(e.kind(), ErrorKind::kNumericalFailure);
  }
}

// ---- monitor ----------------------------------------------------------

std::vector<TraceRow> make_trace(const std::vector<double>& train,
                                 const std::vector<double>& held) {
  std::vector<TraceRow> t;
  for (size_t i = 0; i < train.size(); ++i)
    t.push_back({static_cast<int>(i) + 1, train[i], held[i]});
  return t;
}

TEST(Monitor, IncreasingHoldoutIsOk) {
  std::vector<double> tr, ho;
  for (int i = 0; i < 12; ++i) {
    tr.push_back(i);
    ho.push_back(i * 0.5);
  }
  EXPECT_EQ(monitor_generalisation(make_trace(tr, ho)), Generalisation::kOk);
}

TEST(Monitor, FallingHoldoutWithRisingTrainIsOverfitting) {
  std::vector<double> tr, ho;
  for (int i = 0; i < 12; ++i) {
    tr.push_back(i);
    ho.push_back(i < 5 ? i : 5 - 2.0 * (i - 5));
  }
  EXPECT_EQ(monitor_generalisation(make_trace(tr, ho)), Generalisation::kOverfitting);
}

TEST(Monitor, TooShortOrMissingHoldout) {
  std::vector<double> v(5, 1.0);
  try {
    monitor_generalisation(make_trace(v, v));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInsufficientData);
  }
  std::vector<double> tr(12, 1.0), ho(12, std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(monitor_generalisation(make_trace(tr, ho)), Error);
}

// |L_FS(Z) - exact bound| shrinks as S grows (median over 20 seeds). The
// exact bound for BLR replaces the sampled term by its expectation.
TEST(Consistency, SampledBoundApproachesExactBound) {
  const RegressionData d = synth_regression_data(30, 4);
  const Mat x = Mat(d.inputs);
  const RbfDesign design = RbfDesign::from_inputs(x, 1.0, 8);
  const Mat phi = design.features(x);
  LinearGaussianModel model(phi, d.targets);
  Rng rng(10);
  const VariationalPosterior p = random_posterior(BlockLayout(phi.cols()), rng);
  const Hyperparameters hyper{0.5, 5.0};
  const double exact = blr_exact_bound(phi, d.targets, p, hyper);
  std::vector<double> medians;
  for (Index s : {10, 100, 1000}) {
    std::vector<double> gaps;
    for (int seed = 0; seed < 20; ++seed) {
      const SampleSet z = SampleSet::standard_normal(s, phi.cols(), seed);
      gaps.push_back(std::abs(lower_bound_fs(model, p, hyper, z) - exact));
    }
    std::nth_element(gaps.begin(), gaps.begin() + 10, gaps.end());
    medians.push_back(gaps[10]);
  }
  EXPECT_GT(medians[0], medians[1]);
  EXPECT_GT(medians[1], medians[2]);
}

}  // namespace
