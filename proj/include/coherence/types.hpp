#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coherence {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Default tolerance for declaring a credence base coherent.
inline constexpr double kCoherenceTol = 1e-7;
/// Pivot threshold for rank decisions on 0/1 matrices.
inline constexpr double kPivotTol = 1e-10;
/// Tolerance on |sum(pi) - 1| for probability vectors.
inline constexpr double kSimplexSumTol = 1e-9;

/// Bad input: out-of-range credences, unknown labels, malformed files, ...
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is structurally fine but too large for the exact algorithms here.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed (no bracket, infeasible constraints, ...).
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered outcome atoms of the Boolean algebra generated by the events.
struct AtomSpace {
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(labels.size()); }
  void validate() const;
};

/// 0/1 indicator vector of an event over the atoms.
struct EventVector {
  Vec indicator;

  int size() const { return static_cast<int>(indicator.size()); }
  void validate() const;

  static EventVector from_bits(const std::vector<int>& bits);
};

/// Nonnegative vector summing to one (within kSimplexSumTol).
struct ProbabilityVector {
  Vec pi;

  int size() const { return static_cast<int>(pi.size()); }
  void validate() const;

  static ProbabilityVector uniform(int n);
};

inline bool is_zero_one(double x, double tol = 0.0) {
  return std::abs(x) <= tol || std::abs(x - 1.0) <= tol;
}

}  // namespace coherence
