#include "coherence/aggregation.hpp"

#include "coherence/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace coherence {

std::vector<EventVector> inferable_set(const CredenceBase& base) {
  const Mat vbar = base.extended_matrix();
  const int rows = static_cast<int>(vbar.rows());
  const int num_atoms = base.num_atoms();
  {
    Eigen::ColPivHouseholderQR<Mat> qr(vbar);
    qr.setThreshold(kPivotTol);
    if (static_cast<int>(qr.rank()) != rows)
      throw ValidationError("inferable set requires Vbar of full row rank; reduce first");
  }
  if (rows > 16) throw SizeError("inferable-set enumeration is exponential; refusing n+1 > 16");

  const Mat r = rref(vbar);
  std::vector<EventVector> inferable;
  std::map<std::vector<int>, bool> seen;
  for (long mask = 0; mask < (1L << rows); ++mask) {
    Vec combo = Vec::Zero(num_atoms);
    for (int i = 0; i < rows; ++i)
      if (mask & (1L << i)) combo += r.row(i);
    std::vector<int> bits(num_atoms);
    bool ok = true;
    for (int j = 0; j < num_atoms && ok; ++j) {
      if (std::abs(combo[j]) <= 1e-9) bits[j] = 0;
      else if (std::abs(combo[j] - 1.0) <= 1e-9) bits[j] = 1;
      else ok = false;
    }
    if (!ok || !seen.emplace(bits, true).second) continue;
    inferable.push_back(EventVector::from_bits(bits));
  }
  // Canonical order: by support size, then lexicographically.
  std::sort(inferable.begin(), inferable.end(), [](const EventVector& x, const EventVector& y) {
    const double sx = x.indicator.sum(), sy = y.indicator.sum();
    if (sx != sy) return sx < sy;
    for (int j = 0; j < x.indicator.size(); ++j)
      if (x.indicator[j] != y.indicator[j]) return x.indicator[j] < y.indicator[j];
    return false;
  });
  return inferable;
}

std::vector<EventVector> positive_basis(const std::vector<EventVector>& inferable) {
  // Maximally-0 = minimal support. Scanning by increasing support size against
  // the kept minimal elements is enough: any dominated event contains a
  // minimal one.
  struct Masked {
    uint64_t mask;
    int bits;
    const EventVector* event;
  };
  std::vector<Masked> masked;
  for (const auto& e : inferable) {
    if (e.size() > 63) throw SizeError("positive basis limited to 63 atoms");
    uint64_t m = 0;
    for (int j = 0; j < e.size(); ++j)
      if (e.indicator[j] == 1.0) m |= uint64_t{1} << j;
    if (m != 0) masked.push_back({m, static_cast<int>(e.indicator.sum()), &e});
  }
  std::stable_sort(masked.begin(), masked.end(),
                   [](const Masked& a, const Masked& b) { return a.bits < b.bits; });
  std::vector<uint64_t> kept;
  std::vector<EventVector> basis;
  for (const auto& c : masked) {
    bool minimal = true;
    for (uint64_t b : kept) {
      if ((b & c.mask) == b && b != c.mask) {
        minimal = false;
        break;
      }
    }
    if (minimal) {
      kept.push_back(c.mask);
      basis.push_back(*c.event);
    }
  }
  return basis;
}

namespace {

void cover_search(const std::vector<EventVector>& basis, std::vector<char>& covered,
                  int atoms_left, int next_index, std::vector<int>& chosen,
                  std::vector<std::vector<int>>& covers, long& nodes, long budget) {
  if (++nodes > budget) throw SizeError("exact-cover search exceeded its node budget");
  if (atoms_left == 0) {
    covers.push_back(chosen);
    return;
  }
  // Branch on the lowest uncovered atom to keep the search canonical.
  int atom = 0;
  while (covered[atom]) ++atom;
  for (int k = next_index; k < static_cast<int>(basis.size()); ++k) {
    const Vec& b = basis[k].indicator;
    if (b[atom] != 1.0) continue;
    bool fits = true;
    for (int j = 0; j < b.size() && fits; ++j)
      if (b[j] == 1.0 && covered[j]) fits = false;
    if (!fits) continue;
    for (int j = 0; j < b.size(); ++j)
      if (b[j] == 1.0) covered[j] = 1;
    chosen.push_back(k);
    cover_search(basis, covered, atoms_left - static_cast<int>(b.sum()), 0, chosen, covers,
                 nodes, budget);
    chosen.pop_back();
    for (int j = 0; j < b.size(); ++j)
      if (b[j] == 1.0) covered[j] = 0;
  }
}

}  // namespace

std::vector<std::vector<int>> exact_covers(const std::vector<EventVector>& basis,
                                           long node_budget) {
  if (basis.empty()) return {};
  const int num_atoms = basis.front().size();
  std::vector<char> covered(num_atoms, 0);
  std::vector<int> chosen;
  std::vector<std::vector<int>> covers;
  long nodes = 0;
  cover_search(basis, covered, num_atoms, 0, chosen, covers, nodes, node_budget);
  for (auto& cover : covers) std::sort(cover.begin(), cover.end());
  std::sort(covers.begin(), covers.end());
  return covers;
}

ExpertReport ExpertReport::build(const CredenceBase& base, double tolerance) {
  base.validate();
  RankReduction reduction = reduce_full_rank(base);
  if (reduction.verdict == RankVerdict::inconsistent)
    throw ValidationError("expert base is internally inconsistent (incoherent)");
  const CoherenceVerdict verdict = coherence_check(reduction.reduced, tolerance);
  if (!verdict.coherent) throw ValidationError("expert base must be coherent");

  ExpertReport report;
  report.stated = base;
  report.base = std::move(reduction.reduced);
  report.inferable = inferable_set(report.base);
  // One shared factorization; coherence was already verified above.
  const Mat vbar = report.base.extended_matrix();
  const Vec qbar = report.base.extended_credences();
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(vbar.transpose());
  report.inferable_beliefs.resize(static_cast<Eigen::Index>(report.inferable.size()));
  for (size_t k = 0; k < report.inferable.size(); ++k) {
    const Vec a = cod.solve(report.inferable[k].indicator);
    double belief = a.dot(qbar);
    if (std::abs(belief) < 1e-12) belief = 0.0;
    if (std::abs(belief - 1.0) < 1e-12) belief = 1.0;
    report.inferable_beliefs[static_cast<Eigen::Index>(k)] = belief;
  }

  const auto basis = positive_basis(report.inferable);
  for (const auto& b : basis) {
    for (size_t k = 0; k < report.inferable.size(); ++k) {
      if ((report.inferable[k].indicator - b.indicator).lpNorm<Eigen::Infinity>() == 0.0) {
        report.basis_indices.push_back(static_cast<int>(k));
        break;
      }
    }
  }
  return report;
}

std::vector<EventVector> ExpertReport::basis() const {
  std::vector<EventVector> out;
  for (int k : basis_indices) out.push_back(inferable[static_cast<size_t>(k)]);
  return out;
}

double ExpertReport::belief_on(const EventVector& event) const {
  for (size_t k = 0; k < inferable.size(); ++k) {
    if ((inferable[k].indicator - event.indicator).lpNorm<Eigen::Infinity>() == 0.0)
      return inferable_beliefs[static_cast<Eigen::Index>(k)];
  }
  throw ValidationError("event is not inferable from this expert");
}

AggregationMethod AggregationMethod::of(SummationSet set, DissimilaritySpec spec) {
  AggregationMethod method;
  method.summation_set = set;
  method.spec = std::move(spec);
  method.normalization = set == SummationSet::stated_events_only ? ExpertNormalization::none
                                                                 : ExpertNormalization::per_expert;
  return method;
}

void AggregationMethod::validate() const {
  const bool half = !spec.is_true_dissimilarity();
  if (summation_set == SummationSet::asymmetric_basis && !half)
    throw ValidationError("the asymmetric variant requires half-f or half-fo");
  if (summation_set != SummationSet::asymmetric_basis && half)
    throw ValidationError("half dissimilarities require the asymmetric variant");
  if (spec.kind == DissimilarityKind::exact_match)
    throw ValidationError("exact-match makes every disagreement degenerate; not supported here");
}

namespace {

struct Term {
  Vec event;
  double belief = 0.0;
  double weight = 1.0;
};

// The summation terms of D_i for one expert under `method`.
std::vector<Term> expert_terms(const ExpertReport& report, const AggregationMethod& method) {
  std::vector<Term> terms;
  switch (method.summation_set) {
    case SummationSet::stated_events_only: {
      const CredenceBase& stated = report.stated;
      for (int i = 0; i < stated.n(); ++i)
        terms.push_back({stated.events.row(i).transpose(), stated.credences[i], 1.0});
      break;
    }
    case SummationSet::full_i: {
      // The zero and sure events carry forced beliefs and a zero term for any
      // candidate distribution; they are excluded from the sum and the count.
      for (size_t k = 0; k < report.inferable.size(); ++k) {
        const Vec& e = report.inferable[k].indicator;
        const double support = e.sum();
        if (support == 0.0 || support == static_cast<double>(e.size())) continue;
        terms.push_back({e, report.inferable_beliefs[static_cast<Eigen::Index>(k)], 1.0});
      }
      break;
    }
    case SummationSet::basis_b: {
      for (int k : report.basis_indices)
        terms.push_back({report.inferable[static_cast<size_t>(k)].indicator,
                         report.inferable_beliefs[k], 1.0});
      break;
    }
    case SummationSet::asymmetric_basis: {
      const auto basis = report.basis();
      const auto covers = exact_covers(basis);
      if (covers.empty())
        throw SolveError("no exact cover of the sure event; the asymmetric sum is undefined");
      for (const auto& cover : covers) {
        for (int k : cover) {
          terms.push_back({basis[static_cast<size_t>(k)].indicator,
                           report.inferable_beliefs[report.basis_indices[static_cast<size_t>(k)]],
                           1.0});
        }
      }
      break;
    }
  }
  if (method.normalization == ExpertNormalization::per_expert && !terms.empty()) {
    const double w = 1.0 / static_cast<double>(terms.size());
    for (auto& t : terms) t.weight = w;
  }
  return terms;
}

}  // namespace

double disagreement(const ExpertReport& report, const ProbabilityVector& p,
                    const AggregationMethod& method) {
  method.validate();
  p.validate();
  double total = 0.0;
  for (const auto& term : expert_terms(report, method)) {
    const double prob = term.event.dot(p.pi);
    total += term.weight * method.spec.eval(prob, term.belief);
  }
  return total;
}

AggregationResult aggregate(const std::vector<CredenceBase>& experts,
                            const AggregationMethod& method, const SolverConfig& config) {
  method.validate();
  if (experts.empty()) throw ValidationError("aggregation needs at least one expert");
  const int raw_atoms = experts.front().num_atoms();
  for (const auto& e : experts) {
    if (e.num_atoms() != raw_atoms)
      throw ValidationError("experts must share one declared atom space");
  }

  // Common refinement: stack every stated row and merge identical columns.
  AggregationResult result;
  result.atom_groups.assign(static_cast<size_t>(raw_atoms), -1);
  std::map<std::vector<double>, int> column_of;
  std::vector<std::vector<int>> group_members;
  for (int j = 0; j < raw_atoms; ++j) {
    std::vector<double> signature;
    for (const auto& e : experts)
      for (int i = 0; i < e.n(); ++i) signature.push_back(e.events(i, j));
    auto [it, fresh] = column_of.emplace(std::move(signature), static_cast<int>(group_members.size()));
    if (fresh) group_members.emplace_back();
    group_members[static_cast<size_t>(it->second)].push_back(j);
    result.atom_groups[static_cast<size_t>(j)] = it->second;
  }
  const int joint_atoms = static_cast<int>(group_members.size());
  for (const auto& members : group_members) {
    std::string label;
    for (int j : members) {
      if (!label.empty()) label += '|';
      label += experts.front().atoms.labels[static_cast<size_t>(j)];
    }
    result.joint_atoms.labels.push_back(label);
  }

  for (const auto& expert : experts) {
    Mat v(expert.n(), joint_atoms);
    for (int g = 0; g < joint_atoms; ++g)
      for (int i = 0; i < expert.n(); ++i) v(i, g) = expert.events(i, group_members[static_cast<size_t>(g)].front());
    CredenceBase remapped{result.joint_atoms, std::move(v), expert.credences, expert.weights};
    result.reports.push_back(ExpertReport::build(remapped));
  }

  std::vector<std::vector<Term>> terms;
  for (const auto& report : result.reports) terms.push_back(expert_terms(report, method));

  const DissimilaritySpec& spec = method.spec;
  Objective objective = [&](const Vec& pi, Vec* grad) {
    double total = 0.0;
    Vec g = Vec::Zero(pi.size());
    for (const auto& expert : terms) {
      for (const auto& term : expert) {
        const double prob = term.event.dot(pi);
        const double v = spec.eval(prob, term.belief);
        if (!std::isfinite(v)) return kInf;
        total += term.weight * v;
        if (grad) g += term.weight * spec.grad_p(prob, term.belief) * term.event;
      }
    }
    if (grad) *grad = std::move(g);
    return total;
  };

  SolveOutcome outcome = minimize_on_simplex(objective, joint_atoms, std::nullopt, config);
  result.pi_star = outcome.argmin;
  result.total_loss = outcome.objective_value;
  result.converged = outcome.converged;
  result.iterations = outcome.iterations;
  result.per_expert_disagreement.resize(static_cast<Eigen::Index>(result.reports.size()));
  for (size_t i = 0; i < result.reports.size(); ++i)
    result.per_expert_disagreement[static_cast<Eigen::Index>(i)] =
        disagreement(result.reports[i], result.pi_star, method);
  return result;
}

double AggregationResult::merged_belief(const EventVector& event) const {
  if (event.size() != static_cast<int>(atom_groups.size()))
    throw ValidationError("event length does not match the shared atom count");
  Vec joint = Vec::Constant(pi_star.size(), -1.0);
  for (size_t j = 0; j < atom_groups.size(); ++j) {
    double& slot = joint[atom_groups[j]];
    if (slot == -1.0) slot = event.indicator[static_cast<Eigen::Index>(j)];
    else if (slot != event.indicator[static_cast<Eigen::Index>(j)])
      throw ValidationError("event is not measurable on the joint atoms");
  }
  return joint.dot(pi_star.pi);
}

}  // namespace coherence
