#pragma once

#include "coherence/dissimilarity.hpp"
#include "coherence/projection.hpp"

namespace coherence {

/// Credence estimates indexed by (probe, event, rephrasing) over a shared
/// event structure. Values arrive precomputed; probe internals are out of
/// scope here.
struct ProbeCredences {
  Mat events;                  // n x N event matrix
  int probes = 1;              // k
  int rephrasings = 1;         // m
  std::vector<double> values;  // k * n * m, layout (probe, event, rephrasing)

  int num_events() const { return static_cast<int>(events.rows()); }
  double value(int probe, int event, int rephrasing) const {
    return values[static_cast<size_t>((probe * num_events() + event) * rephrasings + rephrasing)];
  }
  void validate() const;
};

enum class DecisivenessKind {
  max_entropy,
  scoring_rule_entropy,
  distance_from_least_decisive,
  legacy_min_sq,  // min(q_E, q_Ec)^2 from the original probe objective
  none,
};

struct DecisivenessSpec {
  DecisivenessKind kind = DecisivenessKind::none;
  std::optional<ScoringRule> rule;       // scoring_rule_entropy / least-decisive point
  std::optional<DissimilaritySpec> ell;  // loss for the distance variant
  enum class Direction { least_to_p, p_to_least } direction = Direction::least_to_p;
};

/// I(q) = L* of the flattened credences, where every (probe, rephrasing) copy
/// of event h is one more estimate of row E_h.
double incoherence_term(const ProbeCredences& pc, const DissimilaritySpec& spec,
                        const SolverConfig& config = {});

/// J at a coherent p*: max-entropy of a distribution realizing p*, its
/// scoring-rule generalization, or minus the loss to the least decisive
/// coherent belief.
double decisiveness_term(const Vec& p_star, const Mat& events, const DecisivenessSpec& kind,
                         const SolverConfig& config = {});

/// I(q) + mix_weight * J(q). kind = none reduces to the incoherence term;
/// legacy_min_sq requires a single (event, complement) estimate pair.
double probe_loss(const ProbeCredences& pc, const DissimilaritySpec& spec,
                  const DecisivenessSpec& kind, double mix_weight = 1.0,
                  const SolverConfig& config = {});

}  // namespace coherence
