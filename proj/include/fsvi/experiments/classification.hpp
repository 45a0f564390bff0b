#ifndef FSVI_EXPERIMENTS_CLASSIFICATION_HPP
#define FSVI_EXPERIMENTS_CLASSIFICATION_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsvi/eval/metrics.hpp"
#include "fsvi/eval/predictive.hpp"
#include "fsvi/experiments/common.hpp"
#include "fsvi/fit.hpp"
#include "fsvi/io/csv.hpp"
#include "fsvi/models/logistic.hpp"
#include "fsvi/models/rbf.hpp"
#include "fsvi/models/softmax.hpp"
#include "fsvi/models/synthetic.hpp"

namespace fsvi::experiments {

inline FitConfig classification_fit_defaults() {
  FitConfig c;
  c.samples = 200;
  c.holdout_samples = 0;
  return c;
}

struct ClassificationSetup {
  double width = 0.5;     // RBF width r
  Index centres = 50;     // taken from the training inputs
  int predictive_draws = kDefaultPredictiveDraws;
};

struct SplitResult {
  double accuracy = 0.0;
  FitReport report;
};

inline std::vector<int> labels_from_targets(const Mat& targets) {
  std::vector<int> out(static_cast<size_t>(targets.rows()));
  for (Index i = 0; i < targets.rows(); ++i) {
    if (targets.cols() == 1) {
      out[static_cast<size_t>(i)] = static_cast<int>(targets(i, 0));
    } else {
      Index k = 0;
      targets.row(i).maxCoeff(&k);
      out[static_cast<size_t>(i)] = static_cast<int>(k);
    }
  }
  return out;
}

// Fits one train/test split and scores the Monte-Carlo predictive on the
// test set. Binary targets are N x 1 in {0, 1}; K-class targets are
// one-hot N x K.
inline SplitResult run_classification_split(const io::Dataset& train,
                                            const io::Dataset& test,
                                            const ClassificationSetup& setup,
                                            const FitConfig& config,
                                            std::uint64_t seed) {
  const RbfDesign design =
      RbfDesign::from_inputs(train.inputs, setup.width, setup.centres);
  const Mat phi_train = design.features(train.inputs);
  const Mat phi_test = design.features(test.inputs);
  const std::vector<int> test_labels = labels_from_targets(test.targets);

  SplitResult out;
  if (train.targets.cols() == 1) {
    LogisticModel model(phi_train, train.targets.col(0));
    out.report = fit(model, config, seed);
    auto predict = [&](const Vec& w) {
      const Vec p = logistic_predict(phi_test, w);
      Mat two(p.size(), 2);
      two.col(0) = (1.0 - p.array()).matrix();
      two.col(1) = p;
      return two;
    };
    const PredictiveSummary s = predictive_mc(
        out.report.posterior, predict, setup.predictive_draws, seed + 1);
    out.accuracy = accuracy(s.mean, test_labels);
  } else {
    SoftmaxModel model(phi_train, train.targets);
    FitConfig c = config;
    c.layout = model.layout();
    out.report = fit(model, c, seed);
    const Index k = model.classes();
    auto predict = [&](const Vec& w) {
      return softmax_probabilities(phi_test, w, k);
    };
    const PredictiveSummary s = predictive_mc(
        out.report.posterior, predict, setup.predictive_draws, seed + 1);
    out.accuracy = accuracy(s.mean, test_labels);
  }
  return out;
}

inline io::Dataset to_dataset(const ClassificationData& d) {
  return {d.inputs, d.classes == 2 ? Mat(d.binary()) : d.one_hot()};
}

struct SyntheticClassificationSetup {
  BlobSpec blobs;
  Index train = 150;
  Index test = 500;
  std::uint64_t data_seed = 11;
};

inline SplitResult run_synthetic_classification(
    const SyntheticClassificationSetup& data_setup,
    const ClassificationSetup& setup, const FitConfig& config,
    std::uint64_t seed) {
  const ClassificationData train = synth_classification_data(
      data_setup.blobs, data_setup.train, data_setup.data_seed);
  const ClassificationData test = synth_classification_data(
      data_setup.blobs, data_setup.test, data_setup.data_seed + 1);
  return run_classification_split(to_dataset(train), to_dataset(test), setup,
                                  config, seed);
}

struct SplitProtocolResult {
  std::vector<double> accuracies;
  MeanStd summary;
};

// Runs every train_<i>.csv / test_<i>.csv pair found in a directory,
// i = 1, 2, ...; split i uses seed + i.
inline SplitProtocolResult run_split_directory(
    const std::filesystem::path& dir, const io::CsvSchema& schema,
    const ClassificationSetup& setup, const FitConfig& config,
    std::uint64_t seed, bool has_header = false) {
  SplitProtocolResult out;
  for (int i = 1;; ++i) {
    const auto train_path = dir / ("train_" + std::to_string(i) + ".csv");
    const auto test_path = dir / ("test_" + std::to_string(i) + ".csv");
    if (!std::filesystem::exists(train_path) ||
        !std::filesystem::exists(test_path))
      break;
    const io::Dataset train = io::load_csv_dataset(train_path, schema, has_header);
    const io::Dataset test = io::load_csv_dataset(test_path, schema, has_header);
    out.accuracies.push_back(
        run_classification_split(train, test, setup, config,
                                 seed + static_cast<std::uint64_t>(i))
            .accuracy);
  }
  detail::require(!out.accuracies.empty(), ErrorKind::kData,
                  "no train_<i>.csv / test_<i>.csv pairs in " + dir.string());
  out.summary = mean_std(out.accuracies);
  return out;
}

}  // namespace fsvi::experiments

#endif  // FSVI_EXPERIMENTS_CLASSIFICATION_HPP
