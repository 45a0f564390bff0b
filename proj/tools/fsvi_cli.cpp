// Command-line experiment runner. One experiment per invocation; settings
// come from an optional JSON config file, overridden by flags.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "fsvi/experiments.hpp"
#include "fsvi/fsvi.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fsvi;
using namespace fsvi::experiments;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kData:
    case ErrorKind::kParse:
    case ErrorKind::kDimension:
    case ErrorKind::kInsufficientData:
      return kExitData;
    default:
      return kExitNumerical;
  }
}

[[noreturn]] void config_error(const std::string& what) {
  fsvi::detail::fail(ErrorKind::kConfig, what);
}

// Reads model settings with a whitelist so that typos surface as errors.
class Settings {
 public:
  Settings(json j, std::set<std::string> allowed) : j_(std::move(j)) {
    if (!j_.is_object()) config_error("\"model\" must be an object");
    for (const auto& [key, _] : j_.items())
      if (!allowed.count(key)) config_error("unknown model setting \"" + key + "\"");
  }

  template <class T>
  void read(const char* key, T& into) const {
    if (!j_.contains(key)) return;
    try {
      into = j_.at(key).get<T>();
    } catch (const json::exception&) {
      config_error(std::string("model setting \"") + key + "\" has the wrong type");
    }
  }

 private:
  json j_;
};

struct Options {
  std::string experiment;
  std::optional<std::string> config_path;
  std::optional<std::string> data;
  std::optional<Index> samples;
  std::optional<Index> holdout_samples;
  std::optional<int> inner_iters;
  std::optional<int> max_iter;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  json model = json::object();
};

template <class T>
void take(const json& j, const char* key, std::optional<T>& into) {
  if (into || !j.contains(key)) return;  // flags win
  try {
    into = j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("config key \"") + key + "\" has the wrong type");
  }
}

void merge_config(Options& opt) {
  if (!opt.config_path) return;
  std::ifstream in(*opt.config_path);
  if (!in) config_error("cannot open config " + *opt.config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  static const std::set<std::string> known = {
      "experiment", "data", "samples", "holdout_samples", "inner_iters",
      "max_iter", "tolerance", "seed", "out", "model"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) config_error("unknown config key \"" + key + "\"");

  std::optional<std::string> experiment, out;
  take(j, "experiment", experiment);
  if (opt.experiment.empty() && experiment) opt.experiment = *experiment;
  take(j, "out", out);
  if (out && opt.out == "out") opt.out = *out;
  take(j, "data", opt.data);
  take(j, "samples", opt.samples);
  take(j, "holdout_samples", opt.holdout_samples);
  take(j, "inner_iters", opt.inner_iters);
  take(j, "max_iter", opt.max_iter);
  take(j, "tolerance", opt.tolerance);
  take(j, "seed", opt.seed);
  if (j.contains("model")) opt.model = j["model"];
}

RunSettings run_settings(const Options& opt) {
  RunSettings r;
  r.samples = opt.samples;
  r.holdout_samples = opt.holdout_samples;
  r.inner_iters = opt.inner_iters;
  r.max_iter = opt.max_iter;
  r.tolerance = opt.tolerance;
  r.seed = *opt.seed;
  return r;
}

void save_fit(const fs::path& dir, const std::string& stem,
              const FitReport& report, std::uint64_t seed) {
  io::save_posterior({report.posterior, report.hyper, seed},
                     dir / (stem + "posterior.json"));
  trace_table(report).save(dir / (stem + "trace.csv"));
}

io::CsvTable key_values(
    std::initializer_list<std::pair<std::string, std::string>> rows) {
  io::CsvTable t({"metric", "value"});
  for (const auto& [k, v] : rows) t.add_row({k, v});
  return t;
}

std::string verdict_name(Generalisation g) {
  return g == Generalisation::kOk ? "ok" : "overfitting";
}

// --- pipelines --------------------------------------------------------

void read_blr_setup(const Settings& s, BlrSetup& setup) {
  s.read("data", setup.data);
  s.read("params", setup.params);
  s.read("width", setup.width);
  s.read("noise_sd", setup.noise_sd);
  s.read("grid_points", setup.grid_points);
  s.read("data_seed", setup.data_seed);
}

void run_blr_cli(const Options& opt, const fs::path& dir) {
  BlrSetup setup;
  read_blr_setup(Settings(opt.model, {"data", "params", "width", "noise_sd",
                                      "grid_points", "data_seed"}),
                 setup);
  const RunSettings rs = run_settings(opt);
  const BlrResult r = run_blr(setup, rs.apply(blr_fit_defaults()), rs.seed);
  save_fit(dir, "", r.report, rs.seed);
  key_values({{"prediction_rmse", fmt(r.prediction_rmse)},
              {"covariance_rel_frobenius", fmt(r.covariance_rel_frobenius)},
              {"alpha", fmt(r.report.hyper.alpha)},
              {"beta", fmt(*r.report.hyper.beta)},
              {"iterations", std::to_string(r.report.iterations)},
              {"converged", r.report.converged ? "1" : "0"}})
      .save(dir / "metrics.csv");
  io::CsvTable pred({"x", "exact_mean", "proposed_mean"});
  for (Index i = 0; i < r.grid.size(); ++i)
    pred.add_row({fmt(r.grid[i]), fmt(r.exact_mean_prediction[i]),
                  fmt(r.proposed_mean_prediction[i])});
  pred.save(dir / "predictions.csv");
}

void run_blr_overfit_cli(const Options& opt, const fs::path& dir) {
  BlrSetup setup;
  Index small = 10, large = 100, holdout = 500;
  const Settings s(opt.model, {"data", "params", "width", "noise_sd",
                               "grid_points", "data_seed", "small_samples",
                               "large_samples", "holdout"});
  read_blr_setup(s, setup);
  s.read("small_samples", small);
  s.read("large_samples", large);
  s.read("holdout", holdout);
  const RunSettings rs = run_settings(opt);

  io::CsvTable metrics({"samples", "holdout_samples", "verdict", "iterations",
                        "final_train_bound", "final_holdout_bound"});
  for (Index S : {large, small}) {
    RunSettings each = rs;
    each.samples.reset();  // the pair defines S; S' may be overridden
    FitConfig c = each.apply(blr_overfit_config(S, holdout));
    const OverfitResult r = run_blr_overfit(setup, c, rs.seed);
    const std::string stem = "S" + std::to_string(S) + "_";
    save_fit(dir, stem, r.report, rs.seed);
    metrics.add_row({std::to_string(S), std::to_string(c.holdout_count()),
                     verdict_name(r.verdict),
                     std::to_string(r.report.iterations),
                     fmt(r.report.trace.back().train_bound),
                     fmt(r.report.trace.back().holdout_bound)});
  }
  metrics.save(dir / "metrics.csv");
}

void run_bivariate_cli(const Options& opt, const fs::path& dir) {
  BivariateSetup setup;
  int repeats = 1;
  const Settings s(opt.model, {"half_width", "resolution", "repeats"});
  s.read("half_width", setup.half_width);
  s.read("resolution", setup.resolution);
  s.read("repeats", repeats);
  if (repeats < 1) config_error("repeats must be at least 1");
  const RunSettings rs = run_settings(opt);
  const FitConfig config = rs.apply(bivariate_fit_defaults());

  io::CsvTable kld({"target", "seed", "proposed_kl_target_approx",
                    "proposed_kl_approx_target", "laplace_kl_target_approx",
                    "laplace_kl_approx_target"});
  for (size_t t = 0; t < kBivariateBenchmarks.size(); ++t)
    for (int k = 0; k < repeats; ++k) {
      const std::uint64_t seed = rs.seed + static_cast<std::uint64_t>(k);
      const BivariateRow row =
          run_bivariate_one(kBivariateBenchmarks[t], setup, config, seed);
      kld.add_row({std::to_string(t), std::to_string(seed),
                   fmt(row.proposed_target_to_approx),
                   fmt(row.proposed_approx_to_target),
                   fmt(row.laplace_target_to_approx),
                   fmt(row.laplace_approx_to_target)});
      if (k == 0) save_fit(dir, "target" + std::to_string(t) + "_", row.report, seed);
    }
  kld.save(dir / "metrics.csv");
}

void run_classification_cli(const Options& opt, const fs::path& dir,
                            bool multiclass) {
  ClassificationSetup setup;
  SyntheticClassificationSetup synth;
  synth.blobs.kind = multiclass ? BlobKind::kMultiClass : BlobKind::kTwoClass;
  synth.blobs.classes = multiclass ? 3 : 2;
  synth.blobs.separation = 4.0;
  bool has_header = false;
  const Settings s(opt.model, {"width", "centres", "predictive_draws", "train",
                               "test", "classes", "separation", "spread",
                               "data_seed", "has_header"});
  s.read("width", setup.width);
  s.read("centres", setup.centres);
  s.read("predictive_draws", setup.predictive_draws);
  s.read("train", synth.train);
  s.read("test", synth.test);
  s.read("classes", synth.blobs.classes);
  s.read("separation", synth.blobs.separation);
  s.read("spread", synth.blobs.spread);
  s.read("data_seed", synth.data_seed);
  s.read("has_header", has_header);
  if (!multiclass && synth.blobs.classes != 2)
    config_error("logistic experiment is two-class");

  const RunSettings rs = run_settings(opt);
  const FitConfig config = rs.apply(classification_fit_defaults());
  if (opt.data) {
    const io::CsvSchema schema =
        multiclass ? io::CsvSchema::one_hot(static_cast<int>(synth.blobs.classes))
                   : io::CsvSchema::binary();
    const fs::path data_dir(*opt.data);
    if (!fs::is_directory(data_dir))
      fsvi::detail::fail(ErrorKind::kData, "data directory not found: " + *opt.data);
    const SplitProtocolResult r =
        run_split_directory(data_dir, schema, setup, config, rs.seed, has_header);
    io::CsvTable table({"split", "accuracy"});
    for (size_t i = 0; i < r.accuracies.size(); ++i)
      table.add_row({std::to_string(i + 1), fmt(r.accuracies[i])});
    table.save(dir / "accuracy.csv");
    std::ostringstream summary;
    summary.precision(4);
    summary << std::fixed << r.summary.mean << " +- " << r.summary.std;
    key_values({{"splits", std::to_string(r.accuracies.size())},
                {"accuracy_mean", fmt(r.summary.mean)},
                {"accuracy_std", fmt(r.summary.std)},
                {"table", summary.str()}})
        .save(dir / "metrics.csv");
    return;
  }
  const SplitResult r = run_synthetic_classification(synth, setup, config, rs.seed);
  save_fit(dir, "", r.report, rs.seed);
  key_values({{"accuracy", fmt(r.accuracy)},
              {"alpha", fmt(r.report.hyper.alpha)},
              {"iterations", std::to_string(r.report.iterations)},
              {"converged", r.report.converged ? "1" : "0"}})
      .save(dir / "metrics.csv");
}

void run_cauchy_ppca_cli(const Options& opt, const fs::path& dir) {
  ImageSetup setup;
  std::uint64_t data_seed = *opt.seed;
  const Settings s(opt.model, {"rows", "cols", "count", "rank", "corruption",
                               "pixel_noise_sd", "data_seed"});
  s.read("rows", setup.rows);
  s.read("cols", setup.cols);
  s.read("count", setup.count);
  s.read("rank", setup.rank);
  s.read("corruption", setup.corruption);
  s.read("pixel_noise_sd", setup.pixel_noise_sd);
  s.read("data_seed", data_seed);
  if (opt.data) config_error("cauchy-ppca uses synthetic images only");

  const RunSettings rs = run_settings(opt);
  const ImageData images = synth_low_rank_images(setup, data_seed);
  const CauchyPpcaResult r =
      run_cauchy_ppca(images, setup.rank, rs.apply(cauchy_ppca_fit_defaults()),
                      rs.seed);
  save_fit(dir, "", r.train_report, rs.seed);
  key_values({{"ppca_reconstruction_error", fmt(r.ppca_error)},
              {"cauchy_ppca_reconstruction_error", fmt(r.cauchy_error)},
              {"gamma", fmt(r.params.gamma)},
              {"train_iterations", std::to_string(r.train_report.iterations)}})
      .save(dir / "metrics.csv");
  // Reconstruction panel: clean, corrupted and reconstructed first test image.
  const Index first = images.clean.cols() / 2;
  io::CsvTable panel({"pixel", "clean", "corrupted", "cauchy_ppca"});
  for (Index i = 0; i < images.clean.rows(); ++i)
    panel.add_row({std::to_string(i), fmt(images.clean(i, first)),
                   fmt(images.corrupted(i, first)),
                   fmt(r.test_reconstruction(i, 0))});
  panel.save(dir / "panel.csv");
}

void run_attenuation_cli(const Options& opt, const fs::path& dir) {
  AttenuationSetup setup;
  const Settings s(opt.model, {"pool", "train", "splits", "sources",
                               "noise_sd", "predictive_draws", "data_seed",
                               "laplace_min_curvature"});
  s.read("pool", setup.pool);
  s.read("train", setup.train);
  s.read("splits", setup.splits);
  s.read("sources", setup.sources);
  s.read("noise_sd", setup.noise_sd);
  s.read("predictive_draws", setup.predictive_draws);
  s.read("data_seed", setup.data_seed);
  s.read("laplace_min_curvature", setup.laplace_min_curvature);
  if (opt.data) config_error("attenuation uses synthetic records only");

  const RunSettings rs = run_settings(opt);
  const AttenuationResult r =
      run_attenuation(setup, rs.apply(attenuation_fit_defaults()), rs.seed);
  io::CsvTable table({"split", "proposed_mse", "laplace_mse", "laplace_failure"});
  for (size_t i = 0; i < r.splits.size(); ++i)
    table.add_row({std::to_string(i + 1), fmt(r.splits[i].proposed_mse),
                   fmt(r.splits[i].laplace_mse), r.splits[i].laplace_failure});
  table.save(dir / "splits.csv");
  key_values({{"proposed_mean", fmt(r.proposed.mean)},
              {"proposed_std", fmt(r.proposed.std)},
              {"laplace_mean", fmt(r.laplace.mean)},
              {"laplace_std", fmt(r.laplace.std)},
              {"laplace_failures", std::to_string(r.laplace_failures)}})
      .save(dir / "metrics.csv");
}

int run(const Options& opt) {
  if (opt.experiment.empty()) config_error("no experiment given (--experiment)");
  if (!opt.seed) config_error("a seed is required (--seed or \"seed\")");
  const fs::path dir(opt.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) config_error("cannot create output directory " + opt.out);

  if (opt.data && opt.experiment != "logistic" && opt.experiment != "multiclass")
    config_error("--data is only used by logistic and multiclass");
  if (opt.experiment == "blr") run_blr_cli(opt, dir);
  else if (opt.experiment == "blr-overfit") run_blr_overfit_cli(opt, dir);
  else if (opt.experiment == "bivariate") run_bivariate_cli(opt, dir);
  else if (opt.experiment == "logistic") run_classification_cli(opt, dir, false);
  else if (opt.experiment == "multiclass") run_classification_cli(opt, dir, true);
  else if (opt.experiment == "cauchy-ppca") run_cauchy_ppca_cli(opt, dir);
  else if (opt.experiment == "attenuation") run_attenuation_cli(opt, dir);
  else config_error("unknown experiment \"" + opt.experiment + "\"");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-sample variational inference experiments"};
  Options opt;
  std::string config;
  app.add_option("--experiment", opt.experiment,
                 "bivariate, blr, blr-overfit, logistic, multiclass, "
                 "cauchy-ppca or attenuation");
  app.add_option("--config", config, "JSON config file");
  app.add_option_function<std::string>("--data", [&](const std::string& v) { opt.data = v; },
                                       "dataset directory (train_<i>.csv / test_<i>.csv)");
  app.add_option_function<Index>("--samples", [&](Index v) { opt.samples = v; }, "S");
  app.add_option_function<Index>("--holdout-samples",
                                 [&](Index v) { opt.holdout_samples = v; },
                                 "S' (0 disables the holdout monitor)");
  app.add_option_function<int>("--inner-iters", [&](int v) { opt.inner_iters = v; }, "J");
  app.add_option_function<int>("--max-iter", [&](int v) { opt.max_iter = v; },
                               "outer iteration limit");
  app.add_option_function<double>("--tol", [&](double v) { opt.tolerance = v; },
                                  "convergence tolerance on the bound");
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { opt.seed = v; },
                                         "master seed");
  app.add_option("--out", opt.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!config.empty()) opt.config_path = config;
    merge_config(opt);
    return run(opt);
  } catch (const Error& e) {
    std::cerr << "fsvi: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "fsvi: " << e.what() << "\n";
    return kExitNumerical;
  }
}
