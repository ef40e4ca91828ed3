#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace jss {

/// Absolute or relative time in integer units. All clock arithmetic is exact.
using Time = std::int64_t;
using JobId = int;
using MachineId = int;

inline constexpr int kFeatureCount = 7;

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatureCount, Eigen::RowMajor>;
using TimeMatrix = Eigen::Matrix<Time, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using TimeVector = Eigen::Matrix<Time, Eigen::Dynamic, 1>;
using MachineMatrix = Eigen::Matrix<MachineId, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace jss
