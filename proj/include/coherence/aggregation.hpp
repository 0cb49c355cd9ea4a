#pragma once

#include "coherence/credence.hpp"
#include "coherence/dissimilarity.hpp"
#include "coherence/solver.hpp"

namespace coherence {

/// One internally coherent expert, reduced to full row rank, with the cached
/// content-invariant data: the inferable set I, the implied beliefs Q on I,
/// and the minimal positive spanning set B (the maximally-0 elements of I).
struct ExpertReport {
  CredenceBase stated;   // as submitted (over the joint atoms)
  CredenceBase base;     // full-row-rank reduction of `stated`
  std::vector<EventVector> inferable;  // I, includes the zero and sure events
  Vec inferable_beliefs;               // Q on I
  std::vector<int> basis_indices;      // B as indices into `inferable`

  static ExpertReport build(const CredenceBase& base, double tolerance = kCoherenceTol);

  std::vector<EventVector> basis() const;
  /// Q(event); event must be inferable.
  double belief_on(const EventVector& event) const;
};

/// I = { R^T v : v in {0,1}^(n+1), R^T v in {0,1}^N } for R = rref(Vbar).
/// Requires Vbar of full row rank; refuses n+1 > 20.
std::vector<EventVector> inferable_set(const CredenceBase& base);

/// The maximally-0 (minimal-support) nonzero elements of I.
std::vector<EventVector> positive_basis(const std::vector<EventVector>& inferable);

/// All subsets of B whose element-wise sum is the all-ones vector, as sorted
/// index lists in canonical order. Throws SizeError past the node budget.
std::vector<std::vector<int>> exact_covers(const std::vector<EventVector>& basis,
                                           long node_budget = 1000000);

enum class SummationSet { stated_events_only, full_i, basis_b, asymmetric_basis };

enum class ExpertNormalization {
  per_expert,  // 1/#S_i (or 1/M_i for the asymmetric variant)
  none,        // unit weight per term
};

struct AggregationMethod {
  SummationSet summation_set = SummationSet::basis_b;
  DissimilaritySpec spec;
  ExpertNormalization normalization = ExpertNormalization::per_expert;

  /// Paper-calibrated defaults: the comparison table's stated-beliefs row is
  /// reproduced by unit weights, the content-invariant rows by 1/#S_i.
  static AggregationMethod of(SummationSet set, DissimilaritySpec spec);

  void validate() const;
};

/// D_i(p, expert): the method's average dissimilarity between the candidate
/// belief p (a distribution over the joint atoms) and the expert's implied
/// beliefs on the method's summation set.
double disagreement(const ExpertReport& report, const ProbabilityVector& p,
                    const AggregationMethod& method);

struct AggregationResult {
  AtomSpace joint_atoms;
  std::vector<int> atom_groups;  // original atom index -> joint atom index
  ProbabilityVector pi_star;     // over the joint atoms
  std::vector<ExpertReport> reports;
  Vec per_expert_disagreement;
  double total_loss = kInf;
  bool converged = false;
  int iterations = 0;

  /// P(event) for an event over the original shared atoms; the event must be
  /// measurable, i.e. constant on each merged atom group.
  double merged_belief(const EventVector& event) const;
};

/// Minimizes sum_i D_i over the simplex of the common refinement of the
/// experts' atoms. All experts must be over the same declared atom space.
AggregationResult aggregate(const std::vector<CredenceBase>& experts,
                            const AggregationMethod& method,
                            const SolverConfig& config = {});

}  // namespace coherence
