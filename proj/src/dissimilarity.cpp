#include "coherence/dissimilarity.hpp"

#include <cmath>

namespace coherence {

namespace {

// a * ln(a/b) with the conventions 0*ln(0/b) = 0 and a*ln(a/0) = inf for a > 0.
double xlog_ratio(double a, double b) {
  if (a <= 0.0) return 0.0;
  if (b <= 0.0) return kInf;
  return a * std::log(a / b);
}

double logit(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return std::log(p / (1.0 - p));
}

double binary_kl(double p, double q) { return xlog_ratio(p, q) + xlog_ratio(1.0 - p, 1.0 - q); }

double scoring_ell(const ScoringRule& s, double p, double q) {
  double total = 0.0;
  if (p > 0.0) {
    const double d = s(1, q) - s(1, p);
    if (std::isinf(d)) return d > 0 ? kInf : -kInf;
    total += p * d;
  }
  if (p < 1.0) {
    const double d = s(0, q) - s(0, p);
    if (std::isinf(d)) return d > 0 ? kInf : -kInf;
    total += (1.0 - p) * d;
  }
  return total;
}

double fd_grad_q(const DissimilaritySpec& spec, double p, double q) {
  const double h = 1e-7;
  const double lo = std::max(0.0, q - h);
  const double hi = std::min(1.0, q + h);
  return (spec.eval(p, hi) - spec.eval(p, lo)) / (hi - lo);
}

}  // namespace

double DissimilaritySpec::eval(double p, double q) const {
  switch (kind) {
    case DissimilarityKind::binary_kl:
      return binary_kl(p, q);
    case DissimilarityKind::transposed_binary_kl:
      return binary_kl(q, p);
    case DissimilarityKind::squared:
      return 2.0 * (p - q) * (p - q);
    case DissimilarityKind::exact_match:
      return p == q ? 0.0 : kInf;
    case DissimilarityKind::from_scoring_rule:
      return scoring_ell(*rule, p, q);
    case DissimilarityKind::half_f:
      return xlog_ratio(p, q);
    case DissimilarityKind::half_fo:
      return xlog_ratio(q, p);
  }
  return kInf;
}

double DissimilaritySpec::grad_p(double p, double q) const {
  switch (kind) {
    case DissimilarityKind::binary_kl:
      return logit(p) - logit(q);
    case DissimilarityKind::transposed_binary_kl: {
      double g = 0.0;
      if (q > 0.0) g -= q / p;  // -inf at p = 0
      if (q < 1.0) g += (1.0 - q) / (1.0 - p);
      return g;
    }
    case DissimilarityKind::squared:
      return 4.0 * (p - q);
    case DissimilarityKind::exact_match:
      return 0.0;
    case DissimilarityKind::from_scoring_rule:
      // d/dp of p[s1(q)-s1(p)] + (1-p)[s0(q)-s0(p)]; the p s1'(p) + (1-p) s0'(p)
      // term vanishes by properness.
      return ((*rule)(1, q) - (*rule)(1, p)) - ((*rule)(0, q) - (*rule)(0, p));
    case DissimilarityKind::half_f:
      if (p <= 0.0) return -kInf;
      return std::log(p / q) + 1.0;
    case DissimilarityKind::half_fo:
      return q > 0.0 ? -q / p : 0.0;
  }
  return 0.0;
}

double DissimilaritySpec::grad_q(double p, double q) const {
  switch (kind) {
    case DissimilarityKind::binary_kl: {
      double g = 0.0;
      if (p > 0.0) g -= p / q;
      if (p < 1.0) g += (1.0 - p) / (1.0 - q);
      return g;
    }
    case DissimilarityKind::transposed_binary_kl:
      return logit(q) - logit(p);
    case DissimilarityKind::squared:
      return -4.0 * (p - q);
    case DissimilarityKind::exact_match:
      return 0.0;
    case DissimilarityKind::from_scoring_rule:
      return fd_grad_q(*this, p, q);
    case DissimilarityKind::half_f:
      return p > 0.0 ? -p / q : 0.0;
    case DissimilarityKind::half_fo:
      if (q <= 0.0) return -kInf;
      return std::log(q / p) + 1.0;
  }
  return 0.0;
}

std::string DissimilaritySpec::name() const {
  switch (kind) {
    case DissimilarityKind::binary_kl: return "f";
    case DissimilarityKind::transposed_binary_kl: return "fo";
    case DissimilarityKind::squared: return "squared";
    case DissimilarityKind::exact_match: return "exact";
    case DissimilarityKind::from_scoring_rule: return "score:" + rule->name;
    case DissimilarityKind::half_f: return "half-f";
    case DissimilarityKind::half_fo: return "half-fo";
  }
  return "?";
}

ScoringRule log_score() {
  return {"log", [](int i, double q) {
            const double x = i ? q : 1.0 - q;
            return x <= 0.0 ? kInf : -std::log(x);
          }};
}

ScoringRule brier_score() {
  return {"brier", [](int i, double q) {
            const double d = i - q;
            return d * d;
          }};
}

ScoringRule absolute_score() {
  return {"absolute", [](int i, double q) { return std::abs(i - q); }};
}

bool properness_check(const ScoringRule& rule, int grid_points) {
  const int g = grid_points;
  std::vector<double> s1(g), s0(g);
  for (int j = 0; j < g; ++j) {
    const double q = static_cast<double>(j) / (g - 1);
    s1[j] = rule(1, q);
    s0[j] = rule(0, q);
    if (std::isnan(s1[j]) || std::isnan(s0[j])) return false;
    // Only s(0,1) and s(1,0) may be infinite.
    if (std::isinf(s1[j]) && j != 0) return false;
    if (std::isinf(s0[j]) && j != g - 1) return false;
  }
  const auto expected = [&](double p, int j) {
    if (p <= 0.0) return s0[j];
    if (p >= 1.0) return s1[j];
    return p * s1[j] + (1.0 - p) * s0[j];
  };
  for (int i = 0; i < g; ++i) {
    const double p = static_cast<double>(i) / (g - 1);
    const double at_p = expected(p, i);
    if (std::isinf(at_p)) return false;
    for (int j = 0; j < g; ++j) {
      if (j == i) continue;
      if (!(expected(p, j) > at_p + 1e-12)) return false;
    }
  }
  return true;
}

DissimilaritySpec ell_from_scoring(const ScoringRule& rule) {
  if (!properness_check(rule))
    throw ValidationError("scoring rule '" + rule.name + "' fails the properness check");
  return {DissimilarityKind::from_scoring_rule, rule};
}

ScoreReport score_forecast(const CredenceBase& base, const ScoringRule& rule, int realized_atom) {
  if (realized_atom < 0 || realized_atom >= base.num_atoms())
    throw ValidationError("realized atom index out of range");
  ScoreReport report;
  report.penalties.resize(base.n());
  for (int i = 0; i < base.n(); ++i) {
    const int occurred = base.events(i, realized_atom) > 0.5 ? 1 : 0;
    report.penalties[i] = rule(occurred, base.credences[i]);
  }
  report.total = report.penalties.sum();
  return report;
}

}  // namespace coherence
