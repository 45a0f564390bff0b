#ifndef FSVI_ERROR_HPP
#define FSVI_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fsvi {

// Error categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kInvalidPosterior,
  kDimension,
  kDegenerate,
  kNumericalFailure,
  kConfig,
  kData,
  kInsufficientData,
  kCoverage,
  kIndefiniteHessian,
  kParse,
  kInvalidStart,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown by the fit loop; carries the outer iteration at which the
// bound or a gradient stopped being finite.
class NumericalFailure : public Error {
 public:
  NumericalFailure(int iteration, const std::string& what)
      : Error(ErrorKind::kNumericalFailure,
              what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidPosterior: return "invalid posterior";
    case ErrorKind::kDimension: return "dimension mismatch";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kNumericalFailure: return "numerical failure";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kCoverage: return "grid coverage";
    case ErrorKind::kIndefiniteHessian: return "indefinite Hessian";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kInvalidStart: return "invalid start";
  }
  return "unknown";
}

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace detail
}  // namespace fsvi

#endif  // FSVI_ERROR_HPP
