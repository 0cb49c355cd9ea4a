#pragma once

#include "coherence/credence.hpp"
#include "coherence/dissimilarity.hpp"
#include "coherence/solver.hpp"

namespace coherence {

struct ProjectionResult {
  Vec p_star;                  // nearest coherent credences, V * pi_star
  ProbabilityVector pi_star;   // witnessing distribution
  double incoherence = kInf;   // L*(q); 0 iff q coherent
  bool converged = false;
  int iterations = 0;
};

/// Nearest coherent vector under sum_i w_i * ell(p_i, q_i). Half variants are
/// rejected (they are not dissimilarities). If the loss is infinite on all of
/// C(E), reports incoherence = inf with converged = false.
ProjectionResult project(const CredenceBase& base, const DissimilaritySpec& spec,
                         const SolverConfig& config = {});

/// All estimates concern one event (Table-1 repetition row).
/// f: odds(p*) is the geometric mean of the odds; fo: p* is the plain mean.
double closed_form_repetition(const Vec& q, const DissimilaritySpec& spec);

struct RootConfig {
  double tolerance = 1e-12;
  int max_bracket_expansions = 200;
};

/// Events partition the space (Table-1 partition row): a single scalar shift
/// makes the per-event stationarity constant; solved by bracketed bisection.
Vec closed_form_partition(const Vec& q, const DissimilaritySpec& spec,
                          const RootConfig& root_config = {});

struct ComplementPairResult {
  double p_event = 0.0;
  double incoherence = 0.0;
};

/// Closed forms for one event and its complement.
ComplementPairResult closed_form_complement_pair(double q_event, double q_complement,
                                                 const DissimilaritySpec& spec);

/// Gradient of L* at q: componentwise w_i * d ell(p*_i, q_i) / d q_i.
/// Requires interior q and a converged projection.
Vec incoherence_gradient(const CredenceBase& base, const DissimilaritySpec& spec,
                         const SolverConfig& config = {});

}  // namespace coherence
