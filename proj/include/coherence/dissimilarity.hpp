#pragma once

#include "coherence/credence.hpp"
#include "coherence/types.hpp"

#include <functional>

namespace coherence {

/// Penalty s(outcome, forecast) for a realized binary outcome. Proper rules
/// are finite everywhere except possibly s(0,1) and s(1,0).
struct ScoringRule {
  std::string name;
  std::function<double(int outcome, double q)> penalty;

  double operator()(int outcome, double q) const { return penalty(outcome, q); }
};

ScoringRule log_score();
ScoringRule brier_score();
/// |outcome - q|; improper, kept for negative tests.
ScoringRule absolute_score();

/// Numeric properness gate: on a 101-point grid in p and q, the expected
/// penalty p*s(1,q) + (1-p)*s(0,q) must be uniquely minimized at q = p.
bool properness_check(const ScoringRule& rule, int grid_points = 101);

enum class DissimilarityKind {
  binary_kl,             // f(p,q) = p ln(p/q) + (1-p) ln((1-p)/(1-q))
  transposed_binary_kl,  // f(q,p)
  squared,               // 2 (p-q)^2
  exact_match,           // 0 if p == q else infinity
  from_scoring_rule,     // expected excess penalty of q over p
  half_f,                // p ln(p/q); not a dissimilarity on its own
  half_fo,               // q ln(q/p); not a dissimilarity on its own
};

struct DissimilaritySpec {
  DissimilarityKind kind = DissimilarityKind::binary_kl;
  std::optional<ScoringRule> rule;  // required for from_scoring_rule

  /// ell(p, q); infinities are values, never errors. 0*ln(0/x) = 0.
  double eval(double p, double q) const;
  /// d ell / dp. May be +-infinity on the boundary.
  double grad_p(double p, double q) const;
  /// d ell / dq.
  double grad_q(double p, double q) const;

  /// Half variants fail ell(p,q)=0 iff p=q and are only admissible inside the
  /// asymmetric aggregation sum.
  bool is_true_dissimilarity() const {
    return kind != DissimilarityKind::half_f && kind != DissimilarityKind::half_fo;
  }

  std::string name() const;

  static DissimilaritySpec f() { return {DissimilarityKind::binary_kl, std::nullopt}; }
  static DissimilaritySpec fo() { return {DissimilarityKind::transposed_binary_kl, std::nullopt}; }
  static DissimilaritySpec sq() { return {DissimilarityKind::squared, std::nullopt}; }
  static DissimilaritySpec exact() { return {DissimilarityKind::exact_match, std::nullopt}; }
  static DissimilaritySpec half(bool transposed) {
    return {transposed ? DissimilarityKind::half_fo : DissimilarityKind::half_f, std::nullopt};
  }
};

/// ell(p,q) = p[s(1,q) - s(1,p)] + (1-p)[s(0,q) - s(0,p)].
/// Throws ValidationError when the rule fails the properness gate.
DissimilaritySpec ell_from_scoring(const ScoringRule& rule);

struct ScoreReport {
  Vec penalties;  // one per event
  double total = 0.0;
};

/// Total penalty of the forecasts in `base` when atom `realized_atom` occurs.
ScoreReport score_forecast(const CredenceBase& base, const ScoringRule& rule, int realized_atom);

}  // namespace coherence
