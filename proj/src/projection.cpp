#include "coherence/projection.hpp"

#include <cmath>

namespace coherence {

namespace {

double logit(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return std::log(p / (1.0 - p));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Objective make_projection_objective(const CredenceBase& base, const DissimilaritySpec& spec) {
  return [&base, spec](const Vec& pi, Vec* grad) {
    const Vec p = base.events * pi;
    double total = 0.0;
    Vec dp(p.size());
    for (int i = 0; i < p.size(); ++i) {
      const double v = spec.eval(p[i], base.credences[i]);
      if (!std::isfinite(v)) return kInf;
      total += base.weights[i] * v;
      if (grad) dp[i] = base.weights[i] * spec.grad_p(p[i], base.credences[i]);
    }
    if (grad) *grad = base.events.transpose() * dp;
    return total;
  };
}

ProjectionResult exact_match_projection(const CredenceBase& base) {
  ProjectionResult result;
  const CoherenceVerdict verdict = coherence_check(base);
  if (verdict.coherent) {
    result.pi_star = *verdict.witness;
    result.p_star = base.events * result.pi_star.pi;
    result.incoherence = 0.0;
    result.converged = true;
  } else {
    // Incoherent input: every coherent vector has infinite loss. Report the
    // degenerate value instead of inventing a minimizer.
    result.pi_star = ProbabilityVector::uniform(base.num_atoms());
    result.p_star = base.events * result.pi_star.pi;
    result.incoherence = kInf;
    result.converged = false;
  }
  return result;
}

}  // namespace

ProjectionResult project(const CredenceBase& base, const DissimilaritySpec& spec,
                         const SolverConfig& config) {
  base.validate();
  if (!spec.is_true_dissimilarity())
    throw ValidationError("half dissimilarities are only valid inside the asymmetric aggregation");
  if (spec.kind == DissimilarityKind::exact_match) return exact_match_projection(base);

  const int num_atoms = base.num_atoms();
  const Objective objective = make_projection_objective(base, spec);

  // Starts, in order: uniform; the squared-loss witness; the witness nudged
  // toward the interior. The later ones matter when f-style losses are
  // infinite at uniform, or when a first run stalls.
  std::vector<Vec> starts;
  starts.push_back(Vec::Constant(num_atoms, 1.0 / num_atoms));
  SolveOutcome outcome;
  bool solved = false;
  for (size_t attempt = 0; attempt < 3; ++attempt) {
    if (attempt == starts.size()) {
      const CoherenceVerdict verdict = coherence_check(base);
      const Vec witness =
          verdict.witness ? verdict.witness->pi : Vec::Constant(num_atoms, 1.0 / num_atoms);
      starts.push_back(witness);
      starts.push_back(project_to_simplex(0.999 * witness +
                                          Vec::Constant(num_atoms, 0.001 / num_atoms)));
    }
    if (!std::isfinite(objective(starts[attempt], nullptr))) continue;
    SolveOutcome candidate =
        minimize_on_simplex(objective, num_atoms, std::nullopt, config, starts[attempt]);
    const bool better = !solved ||
                        (candidate.converged && !outcome.converged) ||
                        (candidate.converged == outcome.converged &&
                         candidate.objective_value < outcome.objective_value);
    if (better) outcome = std::move(candidate);
    solved = true;
    if (outcome.converged) break;
  }

  ProjectionResult result;
  if (!solved) {
    result.pi_star = ProbabilityVector{starts.front()};
    result.p_star = base.events * starts.front();
    result.incoherence = kInf;
    result.converged = false;
    return result;
  }
  result.pi_star = outcome.argmin;
  result.p_star = base.events * outcome.argmin.pi;
  result.incoherence = outcome.objective_value;
  result.converged = outcome.converged;
  result.iterations = outcome.iterations;
  return result;
}

double closed_form_repetition(const Vec& q, const DissimilaritySpec& spec) {
  if (q.size() == 0) throw ValidationError("repetition closed form needs at least one estimate");
  switch (spec.kind) {
    case DissimilarityKind::binary_kl: {
      bool has_zero = false, has_one = false;
      double mean_logit = 0.0;
      for (int i = 0; i < q.size(); ++i) {
        if (q[i] <= 0.0) has_zero = true;
        else if (q[i] >= 1.0) has_one = true;
        else mean_logit += logit(q[i]);
      }
      if (has_zero && has_one)
        throw ValidationError("estimates mixing 0 and 1 have no finite f-minimizer");
      if (has_zero) return 0.0;
      if (has_one) return 1.0;
      return sigmoid(mean_logit / q.size());
    }
    case DissimilarityKind::transposed_binary_kl:
      return q.mean();
    default:
      throw ValidationError("repetition closed form is defined for f and fo only");
  }
}

namespace {

// Strictly decreasing in the shift; solves sum_i p_i(shift) = 1 by bisection.
double bisect_shift(const std::function<double(double)>& excess_mass, const RootConfig& rc) {
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < rc.max_bracket_expansions && excess_mass(lo) < 0.0; ++i) lo *= 2.0;
  for (int i = 0; i < rc.max_bracket_expansions && excess_mass(hi) > 0.0; ++i) hi *= 2.0;
  if (excess_mass(lo) < 0.0 || excess_mass(hi) > 0.0)
    throw SolveError("failed to bracket the partition shift");
  while (hi - lo > rc.tolerance) {
    const double mid = 0.5 * (lo + hi);
    (excess_mass(mid) >= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Vec closed_form_partition(const Vec& q, const DissimilaritySpec& spec,
                          const RootConfig& root_config) {
  const int n = static_cast<int>(q.size());
  if (n == 0) throw ValidationError("partition closed form needs at least one event");
  for (int i = 0; i < n; ++i) {
    if (q[i] <= 0.0 || q[i] >= 1.0)
      throw ValidationError("partition closed form requires interior credences");
  }
  switch (spec.kind) {
    case DissimilarityKind::binary_kl: {
      // ln odds(p_i) = ln odds(q_i) + shift for a common shift; the total mass
      // grows with the shift, so 1 - mass is decreasing as the helper expects.
      const auto excess = [&](double shift) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += sigmoid(logit(q[i]) + shift);
        return 1.0 - total;
      };
      const double shift = bisect_shift(excess, root_config);
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = sigmoid(logit(q[i]) + shift);
      return p;
    }
    case DissimilarityKind::transposed_binary_kl: {
      // (q_i - p_i) / (p_i (1 - p_i)) = c. The root of c p^2 - (1+c) p + q_i
      // continuous in c at 0, in the cancellation-free form 2q / (b + sqrt(D)).
      const auto p_of = [&](double c, double qi) {
        const double disc = (1.0 + c) * (1.0 + c) - 4.0 * c * qi;
        return 2.0 * qi / (1.0 + c + std::sqrt(std::max(disc, 0.0)));
      };
      const auto excess = [&](double c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += p_of(c, q[i]);
        return total - 1.0;  // decreasing in c
      };
      const double c = bisect_shift(excess, root_config);
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = p_of(c, q[i]);
      return p;
    }
    default:
      throw ValidationError("partition closed form is defined for f and fo only");
  }
}

ComplementPairResult closed_form_complement_pair(double q_event, double q_complement,
                                                 const DissimilaritySpec& spec) {
  const double qe = q_event, qc = q_complement;
  if (qe < 0.0 || qe > 1.0 || qc < 0.0 || qc > 1.0)
    throw ValidationError("credences must lie in [0,1]");
  switch (spec.kind) {
    case DissimilarityKind::squared: {
      const double p = (qe + 1.0 - qc) / 2.0;
      const double gap = qe + qc - 1.0;
      return {p, gap * gap};
    }
    case DissimilarityKind::binary_kl: {
      if (qe <= 0.0 || qe >= 1.0 || qc <= 0.0 || qc >= 1.0)
        throw ValidationError("f closed form requires interior credences");
      const double odds = std::sqrt(qe * (1.0 - qc) / ((1.0 - qe) * qc));
      const double p = odds / (1.0 + odds);
      return {p, std::log((1.0 - p) * (1.0 - p) / ((1.0 - qe) * qc))};
    }
    case DissimilarityKind::transposed_binary_kl: {
      if (qe <= 0.0 || qe >= 1.0 || qc <= 0.0 || qc >= 1.0)
        throw ValidationError("fo closed form requires interior credences");
      const double p = (qe + 1.0 - qc) / 2.0;
      return {p, spec.eval(p, qe) + spec.eval(1.0 - p, qc)};
    }
    default:
      throw ValidationError("complement-pair closed form is defined for squared, f, and fo");
  }
}

Vec incoherence_gradient(const CredenceBase& base, const DissimilaritySpec& spec,
                         const SolverConfig& config) {
  for (int i = 0; i < base.n(); ++i) {
    if (base.credences[i] <= 0.0 || base.credences[i] >= 1.0)
      throw ValidationError("the incoherence gradient requires interior credences");
  }
  const ProjectionResult projection = project(base, spec, config);
  if (!projection.converged) throw SolveError("projection did not converge");
  Vec grad(base.n());
  for (int i = 0; i < base.n(); ++i)
    grad[i] = base.weights[i] * spec.grad_q(projection.p_star[i], base.credences[i]);
  return grad;
}

}  // namespace coherence
