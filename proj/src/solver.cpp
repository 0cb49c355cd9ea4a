#include "coherence/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace coherence {

Vec project_to_simplex(const Vec& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (int k = 0; k < n; ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - 1.0) / (k + 1);
    if (u[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

namespace {

// Feasible region: the simplex, optionally intersected with A pi = b.
class FeasibleSet {
 public:
  FeasibleSet(int dimension, const std::optional<LinearEqualities>& extra)
      : dimension_(dimension) {
    if (!extra) return;
    if (extra->A.cols() != dimension || extra->A.rows() != extra->b.size())
      throw ValidationError("equality system shape mismatch");
    const int m = static_cast<int>(extra->A.rows());
    affine_ = Mat(m + 1, dimension);
    affine_->topRows(m) = extra->A;
    affine_->row(m).setOnes();
    rhs_ = Vec(m + 1);
    rhs_->head(m) = extra->b;
    (*rhs_)[m] = 1.0;
    gram_ = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Mat>>(*affine_ *
                                                                          affine_->transpose());
  }

  bool has_equalities() const { return affine_.has_value(); }

  Vec project_affine(const Vec& z) const {
    return z - affine_->transpose() * gram_->solve(*affine_ * z - *rhs_);
  }

  // Euclidean projection onto the feasible region. Exact for the plain
  // simplex; Dykstra's alternating scheme when equalities are present.
  Vec project(const Vec& z) const {
    if (!affine_) return project_to_simplex(z);
    Vec x = z;
    Vec correction = Vec::Zero(dimension_);
    for (int it = 0; it < 4000; ++it) {
      const Vec y = project_affine(x);
      const Vec clipped = (y + correction).cwiseMax(0.0);
      correction = y + correction - clipped;
      const double feas = (*affine_ * clipped - *rhs_).lpNorm<Eigen::Infinity>();
      const double moved = (clipped - x).lpNorm<Eigen::Infinity>();
      x = clipped;
      if (feas <= 1e-13 && moved <= 1e-14) break;
    }
    return x;
  }

  double infeasibility(const Vec& x) const {
    double worst = std::abs(x.sum() - 1.0);
    worst = std::max(worst, -x.minCoeff());
    if (affine_) worst = std::max(worst, (*affine_ * x - *rhs_).lpNorm<Eigen::Infinity>());
    return worst;
  }

 private:
  int dimension_;
  std::optional<Mat> affine_;
  std::optional<Vec> rhs_;
  std::shared_ptr<Eigen::CompleteOrthogonalDecomposition<Mat>> gram_;
};

// Direction used for steps and the optimality measure: entries sanitized, then
// rescaled (a positive scalar, so stationarity is preserved) when enormous.
Vec sanitized_gradient(Vec g) {
  for (int i = 0; i < g.size(); ++i) {
    if (std::isnan(g[i])) g[i] = 0.0;
    g[i] = std::clamp(g[i], -1e12, 1e12);
  }
  const double scale = g.lpNorm<Eigen::Infinity>();
  if (scale > 1e3) g *= 1e3 / scale;
  return g;
}

struct RunResult {
  Vec x;
  double value = kInf;
  bool converged = false;
  int iterations = 0;
  double gap = kInf;
};

RunResult run_descent(const Objective& objective, const FeasibleSet& feasible, Vec x,
                      const SolverConfig& config) {
  RunResult run;
  Vec grad(x.size());
  double value = objective(x, &grad);
  if (!std::isfinite(value)) {
    run.x = std::move(x);
    run.value = value;
    return run;
  }

  double step = 1.0;
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    const Vec g = sanitized_gradient(grad);
    const double pg = (x - feasible.project(x - g)).lpNorm<Eigen::Infinity>();
    if (config.trace) config.trace->push_back(value);
    if (pg <= config.tolerance) {
      run.converged = true;
      run.gap = pg;
      break;
    }
    run.gap = pg;

    double trial = std::clamp(step, 1e-16, 1e10);
    bool accepted = false;
    Vec xn, gn(x.size());
    double vn = kInf;
    for (int backtrack = 0; backtrack < 90; ++backtrack) {
      xn = feasible.project(x - trial * g);
      const Vec d = xn - x;
      const double dd = d.squaredNorm();
      if (dd == 0.0) {
        // No movement: either numerically optimal or the step underflowed.
        if (trial < 1.0) {
          trial *= 8.0;
          continue;
        }
        break;
      }
      vn = objective(xn, &gn);
      const bool usable = std::isfinite(vn) && gn.allFinite();
      const double slack = 1e-14 * (1.0 + std::abs(value));
      if (usable && vn <= value + g.dot(d) + dd / (2.0 * trial) + slack) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;  // stalled at floating-point resolution

    const Vec s = xn - x;
    const Vec y = gn - grad;
    const double sy = s.dot(y);
    step = sy > 1e-300 ? s.squaredNorm() / sy : std::min(4.0 * trial, 1.0);
    x = std::move(xn);
    value = vn;
    grad = gn;
  }

  run.x = std::move(x);
  run.value = value;
  run.iterations = iter;
  return run;
}

}  // namespace

SolveOutcome minimize_on_simplex(const Objective& objective, int dimension,
                                 const std::optional<LinearEqualities>& extra_equalities,
                                 const SolverConfig& config, const std::optional<Vec>& start) {
  if (dimension < 1) throw ValidationError("simplex dimension must be at least 1");
  if (!(config.tolerance > 0.0) || config.max_iterations < 1)
    throw ValidationError("solver tolerance must be positive, max_iterations >= 1");
  FeasibleSet feasible(dimension, extra_equalities);

  Vec x0 = start ? feasible.project(*start)
                 : feasible.project(Vec::Constant(dimension, 1.0 / dimension));
  if (feasible.infeasibility(x0) > 1e-8) throw SolveError("infeasible equality system");

  RunResult best = run_descent(objective, feasible, x0, config);
  int total_iterations = best.iterations;
  for (int r = 1; r < config.restarts; ++r) {
    // Deterministic perturbed starts: mix toward each vertex in turn.
    Vec seed = 0.7 * x0 + 0.3 * Vec::Unit(dimension, (r - 1) % dimension);
    RunResult candidate = run_descent(objective, feasible, feasible.project(seed), config);
    total_iterations += candidate.iterations;
    if (candidate.value < best.value) std::swap(best, candidate);
  }

  SolveOutcome outcome;
  outcome.argmin = ProbabilityVector{best.x};
  outcome.objective_value = best.value;
  outcome.converged = best.converged;
  outcome.iterations = total_iterations;
  outcome.gap_estimate = best.gap;
  return outcome;
}

}  // namespace coherence
