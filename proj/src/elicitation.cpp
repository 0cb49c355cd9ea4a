#include "coherence/elicitation.hpp"

#include <cmath>

namespace coherence {

void ProbeCredences::validate() const {
  if (events.rows() < 1) throw ValidationError("probe credences need at least one event");
  if (probes < 1 || rephrasings < 1)
    throw ValidationError("probe and rephrasing counts must be positive");
  const size_t expected =
      static_cast<size_t>(probes) * static_cast<size_t>(events.rows()) * static_cast<size_t>(rephrasings);
  if (values.size() != expected)
    throw ValidationError("probe value count does not match probes * events * rephrasings");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("probe credences must lie in [0,1]");
  for (int i = 0; i < events.rows(); ++i)
    for (int j = 0; j < events.cols(); ++j)
      if (events(i, j) != 0.0 && events(i, j) != 1.0)
        throw ValidationError("event matrix entries must be 0 or 1");
}

namespace {

// Minimization form of the expected self-score sum_w pi(w) s(1, pi(w)); with
// the log rule this is negative entropy.
Objective negative_gain(const ScoringRule& rule) {
  return [rule](const Vec& pi, Vec* grad) {
    double total = 0.0;
    for (int j = 0; j < pi.size(); ++j) {
      if (pi[j] > 0.0) total -= pi[j] * rule(1, pi[j]);
      if (grad) {
        const double h = 1e-7;
        const double x = std::clamp(pi[j], h, 1.0 - h);
        const double ds = (rule(1, x + h) - rule(1, x - h)) / (2.0 * h);
        (*grad)[j] = -(rule(1, std::max(pi[j], 1e-300)) + pi[j] * ds);
      }
    }
    return total;
  };
}

// Every (probe, rephrasing) copy of event h is one more estimate of row E_h.
CredenceBase flatten(const ProbeCredences& pc) {
  const int n = pc.num_events();
  const int rows = pc.probes * n * pc.rephrasings;
  Mat v(rows, pc.events.cols());
  Vec q(rows);
  int r = 0;
  for (int i = 0; i < pc.probes; ++i) {
    for (int h = 0; h < n; ++h) {
      for (int j = 0; j < pc.rephrasings; ++j, ++r) {
        v.row(r) = pc.events.row(h);
        q[r] = pc.value(i, h, j);
      }
    }
  }
  return make_base(std::move(v), std::move(q));
}

}  // namespace

double incoherence_term(const ProbeCredences& pc, const DissimilaritySpec& spec,
                        const SolverConfig& config) {
  pc.validate();
  return project(flatten(pc), spec, config).incoherence;
}

double decisiveness_term(const Vec& p_star, const Mat& events, const DecisivenessSpec& kind,
                         const SolverConfig& config) {
  const int num_atoms = static_cast<int>(events.cols());
  switch (kind.kind) {
    case DecisivenessKind::none:
      return 0.0;
    case DecisivenessKind::legacy_min_sq:
      throw ValidationError("the legacy decisiveness applies to raw probe pairs; use probe_loss");
    case DecisivenessKind::max_entropy:
    case DecisivenessKind::scoring_rule_entropy: {
      const ScoringRule rule = (kind.kind == DecisivenessKind::max_entropy || !kind.rule)
                                   ? log_score()
                                   : *kind.rule;
      LinearEqualities equalities{events, p_star};
      const SolveOutcome outcome =
          minimize_on_simplex(negative_gain(rule), num_atoms, equalities, config);
      if (!outcome.converged && !std::isfinite(outcome.objective_value))
        throw SolveError("decisiveness maximization failed");
      return -outcome.objective_value;
    }
    case DecisivenessKind::distance_from_least_decisive: {
      const ScoringRule rule = kind.rule ? *kind.rule : log_score();
      const SolveOutcome outcome =
          minimize_on_simplex(negative_gain(rule), num_atoms, std::nullopt, config);
      const Vec least_decisive = events * outcome.argmin.pi;
      const DissimilaritySpec ell = kind.ell ? *kind.ell : DissimilaritySpec::f();
      double loss = 0.0;
      for (int i = 0; i < least_decisive.size(); ++i) {
        loss += kind.direction == DecisivenessSpec::Direction::least_to_p
                    ? ell.eval(least_decisive[i], p_star[i])
                    : ell.eval(p_star[i], least_decisive[i]);
      }
      return -loss;
    }
  }
  return 0.0;
}

double probe_loss(const ProbeCredences& pc, const DissimilaritySpec& spec,
                  const DecisivenessSpec& kind, double mix_weight, const SolverConfig& config) {
  pc.validate();
  if (mix_weight < 0.0) throw ValidationError("mix weight must be nonnegative");
  if (kind.kind == DecisivenessKind::legacy_min_sq) {
    if (pc.probes != 1 || pc.rephrasings != 1 || pc.num_events() != 2)
      throw ValidationError("the legacy decisiveness needs a single event/complement pair");
    const Vec pair_sum = pc.events.row(0) + pc.events.row(1);
    if ((pair_sum.array() != 1.0).any())
      throw ValidationError("the legacy decisiveness needs complementary events");
    const double q_e = pc.value(0, 0, 0), q_ec = pc.value(0, 1, 0);
    const double j = std::min(q_e, q_ec);
    return incoherence_term(pc, spec, config) + mix_weight * j * j;
  }
  const ProjectionResult projection = project(flatten(pc), spec, config);
  const double incoherence = projection.incoherence;
  if (kind.kind == DecisivenessKind::none || mix_weight == 0.0) return incoherence;
  if (!projection.converged) throw SolveError("probe projection did not converge");
  // J is evaluated on one copy of each distinct event row.
  DecisivenessSpec with_ell = kind;
  if (!with_ell.ell) with_ell.ell = spec;
  Vec p_star(pc.num_events());
  for (int h = 0; h < pc.num_events(); ++h)
    p_star[h] = pc.events.row(h).dot(projection.pi_star.pi);
  return incoherence + mix_weight * decisiveness_term(p_star, pc.events, with_ell, config);
}

}  // namespace coherence
