#include "coherence/credence.hpp"

#include "coherence/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace coherence {

Mat CredenceBase::extended_matrix() const {
  Mat vbar(events.rows() + 1, events.cols());
  vbar.topRows(events.rows()) = events;
  vbar.row(events.rows()).setOnes();
  return vbar;
}

Vec CredenceBase::extended_credences() const {
  Vec qbar(credences.size() + 1);
  qbar.head(credences.size()) = credences;
  qbar[credences.size()] = 1.0;
  return qbar;
}

void CredenceBase::validate() const {
  atoms.validate();
  if (events.cols() != atoms.size()) throw ValidationError("event matrix width != atom count");
  if (events.rows() != credences.size() || events.rows() != weights.size())
    throw ValidationError("event, credence, and weight counts disagree");
  if (events.rows() == 0) throw ValidationError("credence base must contain at least one event");
  for (int i = 0; i < events.rows(); ++i) {
    for (int j = 0; j < events.cols(); ++j) {
      if (events(i, j) != 0.0 && events(i, j) != 1.0)
        throw ValidationError("event matrix entries must be 0 or 1");
    }
    if (credences[i] < 0.0 || credences[i] > 1.0 || !std::isfinite(credences[i]))
      throw ValidationError("credences must lie in [0,1]");
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw ValidationError("weights must be strictly positive");
  }
}

CredenceBase build_base(const std::vector<std::string>& outcomes,
                        const std::vector<std::pair<std::string, std::vector<std::string>>>& events,
                        const std::vector<double>& credences,
                        const std::vector<double>& weights) {
  if (events.empty()) throw ValidationError("empty event list");
  if (events.size() != credences.size())
    throw ValidationError("credence count does not match event count");
  if (!weights.empty() && weights.size() != events.size())
    throw ValidationError("weight count does not match event count");

  std::map<std::string, int> outcome_index;
  for (const auto& o : outcomes) {
    if (!outcome_index.emplace(o, static_cast<int>(outcome_index.size())).second)
      throw ValidationError("duplicate outcome label: " + o);
  }
  if (outcome_index.empty()) throw ValidationError("empty outcome set");

  const int n = static_cast<int>(events.size());
  // Membership pattern of every outcome across the events.
  std::vector<std::vector<char>> pattern(outcomes.size(), std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    std::set<std::string> members;
    for (const auto& o : events[i].second) {
      auto it = outcome_index.find(o);
      if (it == outcome_index.end())
        throw ValidationError("event '" + events[i].first + "' uses unknown outcome '" + o + "'");
      members.insert(o);
    }
    for (const auto& o : members) pattern[outcome_index[o]][i] = 1;
  }

  // Outcomes with identical patterns are indistinguishable: one atom each,
  // ordered by first occurrence.
  std::map<std::vector<char>, int> pattern_to_atom;
  std::vector<std::vector<int>> atom_members;
  for (size_t o = 0; o < outcomes.size(); ++o) {
    auto [it, fresh] = pattern_to_atom.emplace(pattern[o], static_cast<int>(atom_members.size()));
    if (fresh) atom_members.emplace_back();
    atom_members[it->second].push_back(static_cast<int>(o));
  }

  const int num_atoms = static_cast<int>(atom_members.size());
  AtomSpace atoms;
  Mat v = Mat::Zero(n, num_atoms);
  for (int a = 0; a < num_atoms; ++a) {
    std::string label;
    for (int o : atom_members[a]) {
      if (!label.empty()) label += '|';
      label += outcomes[o];
    }
    atoms.labels.push_back(label);
    const auto& pat = pattern[atom_members[a][0]];
    for (int i = 0; i < n; ++i) v(i, a) = pat[i];
  }

  Vec q(n), w(n);
  for (int i = 0; i < n; ++i) {
    q[i] = credences[i];
    w[i] = weights.empty() ? 1.0 : weights[i];
  }
  CredenceBase base{std::move(atoms), std::move(v), std::move(q), std::move(w)};
  base.validate();
  return base;
}

CredenceBase make_base(Mat events, Vec credences, Vec weights) {
  AtomSpace atoms;
  for (int j = 0; j < events.cols(); ++j) atoms.labels.push_back("w" + std::to_string(j + 1));
  if (weights.size() == 0) weights = Vec::Ones(events.rows());
  CredenceBase base{std::move(atoms), std::move(events), std::move(credences), std::move(weights)};
  base.validate();
  return base;
}

RankReduction reduce_full_rank(const CredenceBase& base) {
  const Mat vbar = base.extended_matrix();
  const Vec qbar = base.extended_credences();
  const int n = base.n();
  const int cols = base.num_atoms();

  // The ones row is processed first so it is always kept; dependent stated
  // rows are then expressible through it and earlier kept rows, matching the
  // removal lemmas row by row.
  std::vector<int> kept;           // kept stated rows, original indices
  Mat basis(n + 1, cols);          // kept rows, ones row first
  basis.row(0).setOnes();
  int basis_rows = 1;

  RankReduction out;
  for (int i = 0; i < n; ++i) {
    Eigen::ColPivHouseholderQR<Mat> qr(basis.topRows(basis_rows).transpose());
    const Vec row = vbar.row(i).transpose();
    const Vec coeff = qr.solve(row);
    const double residual = (basis.topRows(basis_rows).transpose() * coeff - row).lpNorm<Eigen::Infinity>();
    if (residual > kPivotTol) {
      basis.row(basis_rows++) = vbar.row(i);
      kept.push_back(i);
      continue;
    }
    // Dependent: a = e_i - sum_k coeff_k e_(basis row k), with Vbar^T a = 0.
    Vec a = Vec::Zero(n + 1);
    a[i] = 1.0;
    a[n] -= coeff[0];
    for (int k = 1; k < basis_rows; ++k) a[kept[k - 1]] -= coeff[k];
    const double gap = qbar.dot(a);
    if (std::abs(gap) > 1e-9 * a.lpNorm<1>()) {
      out.verdict = RankVerdict::inconsistent;
      if (!out.inconsistent_bet) {
        if (gap > 0) a = -a;
        out.inconsistent_bet = a;
      }
    }
  }

  Mat v(kept.size(), cols);
  Vec q(kept.size()), w(kept.size());
  for (size_t k = 0; k < kept.size(); ++k) {
    v.row(static_cast<int>(k)) = base.events.row(kept[k]);
    q[static_cast<int>(k)] = base.credences[kept[k]];
    w[static_cast<int>(k)] = base.weights[kept[k]];
  }
  out.reduced = CredenceBase{base.atoms, std::move(v), std::move(q), std::move(w)};
  out.kept_rows = std::move(kept);
  return out;
}

CoherenceVerdict coherence_check(const CredenceBase& base, double tolerance) {
  if (!(tolerance > 0.0)) throw ValidationError("coherence tolerance must be positive");
  const Mat& v = base.events;
  const Vec& q = base.credences;
  const Vec& w = base.weights;
  const int num_atoms = base.num_atoms();

  Objective objective = [&](const Vec& pi, Vec* grad) {
    const Vec p = v * pi;
    const Vec d = p - q;
    if (grad) *grad = v.transpose() * (4.0 * w.cwiseProduct(d));
    return 2.0 * w.dot(d.cwiseProduct(d));
  };
  SolverConfig config;
  config.tolerance = 1e-10;
  SolveOutcome outcome = minimize_on_simplex(objective, num_atoms, std::nullopt, config);

  CoherenceVerdict verdict;
  const Vec gap = v * outcome.argmin.pi - q;
  verdict.residual = outcome.objective_value;
  verdict.coherent = gap.lpNorm<Eigen::Infinity>() <= tolerance;
  if (verdict.coherent) verdict.witness = outcome.argmin;
  return verdict;
}

double implied_belief(const CredenceBase& base, const EventVector& event) {
  event.validate();
  if (event.size() != base.num_atoms())
    throw ValidationError("event length does not match the atom count");
  const CoherenceVerdict verdict = coherence_check(base);
  if (!verdict.coherent) throw ValidationError("implied beliefs require a coherent base");

  const Mat vbar = base.extended_matrix();
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(vbar.transpose());
  const Vec a = cod.solve(event.indicator);
  const double residual = (vbar.transpose() * a - event.indicator).lpNorm<Eigen::Infinity>();
  if (residual > 1e-9) throw ValidationError("event is not inferable from the base");

  double belief = a.dot(base.extended_credences());
  // Snap away least-squares dust so exact 0/1 beliefs stay exact.
  if (std::abs(belief) < 1e-12) belief = 0.0;
  if (std::abs(belief - 1.0) < 1e-12) belief = 1.0;
  return belief;
}

}  // namespace coherence
