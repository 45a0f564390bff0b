#ifndef FSVI_IO_POSTERIOR_IO_HPP
#define FSVI_IO_POSTERIOR_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fsvi/error.hpp"
#include "fsvi/io/atomic_write.hpp"
#include "fsvi/types.hpp"

namespace fsvi::io {

inline constexpr const char* kPosteriorFormat = "fsvi-posterior";
inline constexpr int kPosteriorVersion = 1;

struct PosteriorDocument {
  VariationalPosterior posterior;
  Hyperparameters hyper;
  std::uint64_t seed = 0;
};

// JSON document: format tag, version, M, mu, L (row-major), block sizes,
// alpha, beta (null when absent) and seed. Doubles are written with
// shortest round-trip precision.
inline std::string posterior_to_string(const PosteriorDocument& doc) {
  const VariationalPosterior& p = doc.posterior;
  nlohmann::json j;
  j["format"] = kPosteriorFormat;
  j["version"] = kPosteriorVersion;
  j["M"] = p.dim();
  j["mu"] = std::vector<double>(p.mean().data(), p.mean().data() + p.dim());
  std::vector<double> rows;
  rows.reserve(static_cast<size_t>(p.dim() * p.dim()));
  for (Index r = 0; r < p.dim(); ++r)
    for (Index c = 0; c < p.dim(); ++c) rows.push_back(p.factor()(r, c));
  j["L"] = rows;
  j["blocks"] = p.layout().sizes();
  j["alpha"] = doc.hyper.alpha;
  j["beta"] = doc.hyper.beta ? nlohmann::json(*doc.hyper.beta) : nlohmann::json();
  j["seed"] = doc.seed;
  return j.dump(2) + "\n";
}

inline PosteriorDocument posterior_from_string(const std::string& text) {
  using fsvi::detail::fail;
  using fsvi::detail::require;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("posterior file: ") + e.what());
  }
  try {
    require(j.is_object() && j.value("format", "") == kPosteriorFormat,
            ErrorKind::kParse, "posterior file: not an fsvi-posterior document");
    const int version = j.at("version").get<int>();
    require(version == kPosteriorVersion, ErrorKind::kParse,
            "posterior file: version " + std::to_string(version) +
                " unsupported (expected " + std::to_string(kPosteriorVersion) +
                ")");
    const Index m = j.at("M").get<Index>();
    require(m >= 1, ErrorKind::kInvalidPosterior, "posterior file: M < 1");
    const auto mu = j.at("mu").get<std::vector<double>>();
    const auto l = j.at("L").get<std::vector<double>>();
    require(static_cast<Index>(mu.size()) == m, ErrorKind::kInvalidPosterior,
            "posterior file: M is " + std::to_string(m) + " but mu has " +
                std::to_string(mu.size()) + " entries");
    require(static_cast<Index>(l.size()) == m * m, ErrorKind::kInvalidPosterior,
            "posterior file: L must have M*M entries");
    std::vector<Index> blocks{m};
    if (j.contains("blocks")) blocks = j.at("blocks").get<std::vector<Index>>();

    PosteriorDocument doc;
    Vec mean = Eigen::Map<const Vec>(mu.data(), m);
    Mat factor(m, m);
    for (Index r = 0; r < m; ++r)
      for (Index c = 0; c < m; ++c)
        factor(r, c) = l[static_cast<size_t>(r * m + c)];
    doc.posterior = VariationalPosterior(std::move(mean), std::move(factor),
                                         BlockLayout(blocks));
    doc.hyper.alpha = j.at("alpha").get<double>();
    if (j.contains("beta") && !j.at("beta").is_null())
      doc.hyper.beta = j.at("beta").get<double>();
    try {
      doc.hyper.validate();
    } catch (const Error& e) {
      fail(ErrorKind::kInvalidPosterior, e.what());
    }
    doc.seed = j.value("seed", std::uint64_t{0});
    return doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kParse, std::string("posterior file: ") + e.what());
  }
}

inline void save_posterior(const PosteriorDocument& doc,
                           const std::filesystem::path& path) {
  write_file_atomic(path, posterior_to_string(doc));
}

inline PosteriorDocument load_posterior(const std::filesystem::path& path) {
  std::ifstream in(path);
  fsvi::detail::require(static_cast<bool>(in), ErrorKind::kData,
                        "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return posterior_from_string(ss.str());
}

}  // namespace fsvi::io

#endif  // FSVI_IO_POSTERIOR_IO_HPP
