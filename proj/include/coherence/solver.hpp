#pragma once

#include "coherence/types.hpp"

#include <functional>

namespace coherence {

enum class StepRule { backtracking_line_search };

struct SolverConfig {
  double tolerance = 1e-9;     // projected-gradient norm target
  int max_iterations = 100000;
  StepRule step_rule = StepRule::backtracking_line_search;
  int restarts = 1;            // deterministic perturbed starts
  std::vector<double>* trace = nullptr;  // objective value per accepted step
};

struct SolveOutcome {
  ProbabilityVector argmin;
  double objective_value = kInf;
  bool converged = false;
  int iterations = 0;
  double gap_estimate = kInf;  // final projected-gradient norm
};

/// Objective oracle: returns the value at x and, when grad is non-null and the
/// value is finite, fills the gradient. Infinite values mark infeasible points.
using Objective = std::function<double(const Vec& x, Vec* grad)>;

struct LinearEqualities {
  Mat A;
  Vec b;
};

/// Euclidean projection onto {x >= 0, sum x = 1} (exact, sort-based).
Vec project_to_simplex(const Vec& v);

/// Minimizes a convex objective over the simplex, optionally intersected with
/// extra equalities A pi = b. Projected gradient with a Barzilai-Borwein step
/// and backtracking; steps landing on infinite objective values are rejected.
/// Throws SolveError when the equality system is infeasible.
SolveOutcome minimize_on_simplex(const Objective& objective, int dimension,
                                 const std::optional<LinearEqualities>& extra_equalities,
                                 const SolverConfig& config,
                                 const std::optional<Vec>& start = std::nullopt);

}  // namespace coherence
