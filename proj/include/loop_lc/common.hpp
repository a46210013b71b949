#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace loop_lc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Base class for every domain error raised by the library. The CLI maps
/// these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// The feasible set is nonempty but has no strict interior (or the finder
/// could not certify one).
class EmptyInteriorError : public Error {
 public:
  using Error::Error;
};

/// A supplied shift point is not strictly inside the reduced polytope.
class NotInteriorError : public Error {
 public:
  NotInteriorError(const std::string& what, Index row, double offset)
      : Error(what), row_(row), offset_(offset) {}
  Index row() const noexcept { return row_; }
  double offset() const noexcept { return offset_; }

 private:
  Index row_;
  double offset_;
};

/// Phase-I model of the two-phase finder predicted a non-negative slack.
class PredictionMissError : public Error {
 public:
  PredictionMissError(const std::string& what, double slack) : Error(what), slack_(slack) {}
  double predicted_slack() const noexcept { return slack_; }

 private:
  double slack_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

inline Vec concat(const Vec& a, const Vec& b) {
  Vec out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace loop_lc
