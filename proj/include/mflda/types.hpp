#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace mflda {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IVector = Eigen::VectorXi;
using Index = Eigen::Index;

// Scatter/eigen machinery runs in one of two operator layouts: a single
// pT x pT operator coupling all time points, or T independent p x p blocks.
enum class Mode { time_dependent, time_independent };

inline std::string to_string(Mode m) {
  return m == Mode::time_dependent ? "time_dependent" : "time_independent";
}

// Error taxonomy mirrored by the CLI exit codes.
enum class ErrorCategory { io = 2, config = 3, numeric = 4, data = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& what)
      : std::runtime_error(what), cat_(cat) {}
  ErrorCategory category() const { return cat_; }

 private:
  ErrorCategory cat_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorCategory::numeric, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorCategory::data, what) {}
};

inline Mode mode_from_string(const std::string& s) {
  if (s == "time_dependent") return Mode::time_dependent;
  if (s == "time_independent") return Mode::time_independent;
  throw ConfigError("unknown mode: " + s);
}

}  // namespace mflda
