#pragma once

#include "coherence/types.hpp"

namespace coherence {

/// A credence base: events encoded as rows of a 0/1 matrix V over the atoms,
/// a credence in [0,1] per event, and a positive weight per event.
/// Repeated rows are allowed and meaningful (several estimates of one event).
struct CredenceBase {
  AtomSpace atoms;
  Mat events;     // n x N, entries in {0,1}
  Vec credences;  // n, entries in [0,1]
  Vec weights;    // n, entries > 0

  int n() const { return static_cast<int>(events.rows()); }
  int num_atoms() const { return static_cast<int>(events.cols()); }

  /// V with an appended all-ones row (the certainty constraint).
  Mat extended_matrix() const;
  /// q with an appended 1.
  Vec extended_credences() const;

  void validate() const;
};

/// Builds a CredenceBase from named events over a declared outcome set.
/// Outcomes sharing an identical membership pattern collapse into one atom;
/// the atom label joins its member outcomes with '|'.
CredenceBase build_base(const std::vector<std::string>& outcomes,
                        const std::vector<std::pair<std::string, std::vector<std::string>>>& events,
                        const std::vector<double>& credences,
                        const std::vector<double>& weights = {});

/// Wraps an explicit event matrix; atoms get synthetic labels w1..wN.
CredenceBase make_base(Mat events, Vec credences, Vec weights = Vec());

enum class RankVerdict { consistent, inconsistent };

struct RankReduction {
  CredenceBase reduced;       // extended matrix has full row rank
  RankVerdict verdict = RankVerdict::consistent;
  std::vector<int> kept_rows; // indices into the original base
  /// For an inconsistent dependency: a bet a with Vbar^T a = 0, a.qbar != 0,
  /// oriented so the cost a.qbar is negative. Indices over original rows + ones.
  std::optional<Vec> inconsistent_bet;
};

/// Removes stated rows that are linear combinations of the remaining extended
/// rows. A dependency whose credences disagree (|qbar.a| > 1e-9 * ||a||_1)
/// proves incoherence and flags the verdict; consistent dependencies are
/// dropped without changing coherence.
RankReduction reduce_full_rank(const CredenceBase& base);

struct CoherenceVerdict {
  bool coherent = false;
  std::optional<ProbabilityVector> witness;
  double residual = 0.0;  // L* under the squared dissimilarity
};

/// Decides whether q lies in the convex hull of the columns of V.
CoherenceVerdict coherence_check(const CredenceBase& base, double tolerance = kCoherenceTol);

/// The unique probability of `event` forced by a coherent base, defined when
/// event lies in rowspan(Vbar). Throws ValidationError otherwise.
double implied_belief(const CredenceBase& base, const EventVector& event);

}  // namespace coherence
