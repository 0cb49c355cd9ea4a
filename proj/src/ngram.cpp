#include "coherence/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace coherence {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

bool all_lower_alpha(const std::string& w) {
  if (w.empty()) return false;
  for (char c : w)
    if (c < 'a' || c > 'z') return false;
  return true;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read corpus file: " + path);
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    std::string word = line;
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!all_lower_alpha(word)) {
      corpus.dropped_lines++;
      continue;
    }
    if (seen.insert(word).second) corpus.words.push_back(std::move(word));
  }
  if (corpus.words.empty()) throw ValidationError("corpus contains no usable words: " + path);
  return corpus;
}

TrigramCounts::TrigramCounts(const Corpus& corpus) {
  counts_.fill(0);
  for (const auto& w : corpus.words)
    for (size_t i = 0; i + 2 < w.size(); ++i) counts_[index(w[i], w[i + 1], w[i + 2])]++;
}

void TrigramCounts::remove_word(const std::string& word) {
  for (size_t i = 0; i + 2 < word.size(); ++i) counts_[index(word[i], word[i + 1], word[i + 2])]--;
}

void TrigramCounts::restore_word(const std::string& word) {
  for (size_t i = 0; i + 2 < word.size(); ++i) counts_[index(word[i], word[i + 1], word[i + 2])]++;
}

HeuristicPair build_heuristics(const TrigramCounts& counts, const std::string& prefix,
                               const std::string& suffix) {
  if (prefix.size() != 2 || suffix.size() != 2 || !all_lower_alpha(prefix) ||
      !all_lower_alpha(suffix))
    throw ValidationError("prefix and suffix must be two lowercase letters each");

  std::string support;
  std::vector<double> after, before;
  for (char c = 'a'; c <= 'z'; ++c) {
    const int n_after = counts.count(prefix[0], prefix[1], c);
    const int n_before = counts.count(c, suffix[0], suffix[1]);
    if (n_after > 0 && n_before > 0) {
      support.push_back(c);
      after.push_back(n_after);
      before.push_back(n_before);
    }
  }
  if (support.empty())
    throw ValidationError("no letter occurs both after '" + prefix + "' and before '" + suffix +
                          "'");

  HeuristicPair pair;
  pair.support = support;
  const auto normalize = [](std::vector<double> counts_vec) {
    Vec v = Eigen::Map<Vec>(counts_vec.data(), static_cast<Eigen::Index>(counts_vec.size()));
    return Vec(v / v.sum());
  };
  pair.h1 = {NgramHeuristic::Direction::after_prefix, prefix, support, normalize(after)};
  pair.h2 = {NgramHeuristic::Direction::before_suffix, suffix, support, normalize(before)};
  return pair;
}

HeuristicPair build_heuristics(const Corpus& corpus, const std::string& prefix,
                               const std::string& suffix) {
  return build_heuristics(TrigramCounts(corpus), prefix, suffix);
}

namespace {

Vec arithmetic_mean(const Vec& q1, const Vec& q2) { return 0.5 * (q1 + q2); }

Vec normalized_geometric_mean(const Vec& q1, const Vec& q2) {
  Vec g = (q1.cwiseProduct(q2)).cwiseSqrt();
  return g / g.sum();
}

// Stationarity of the basis-B sum under f: logit(pi_a) minus the mean logit of
// the heuristics is constant; bisect the constant until the mass is one.
Vec f_log_odds_merge(const Vec& q1, const Vec& q2) {
  const int m = static_cast<int>(q1.size());
  if (m == 1) return Vec::Ones(1);
  Vec base(m);
  for (int i = 0; i < m; ++i) base[i] = 0.5 * (logit(q1[i]) + logit(q2[i]));
  double lo = -750.0, hi = 750.0;
  const auto mass = [&](double shift) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += sigmoid(base[i] + shift);
    return total;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > 1.0 ? hi : lo) = mid;
  }
  Vec p(m);
  for (int i = 0; i < m; ++i) p[i] = sigmoid(base[i] + 0.5 * (lo + hi));
  return p;
}

// The two heuristics as coherent singleton-event experts over the support.
std::vector<CredenceBase> heuristic_bases(const HeuristicPair& pair) {
  const int m = static_cast<int>(pair.support.size());
  AtomSpace atoms;
  for (char c : pair.support) atoms.labels.push_back(std::string(1, c));
  std::vector<CredenceBase> experts;
  for (const Vec& q : {pair.h1.distribution, pair.h2.distribution}) {
    experts.push_back(CredenceBase{atoms, Mat::Identity(m, m), q, Vec::Ones(m)});
  }
  return experts;
}

}  // namespace

Vec predict_masked(const HeuristicPair& pair, const AggregationMethod& method,
                   const SolverConfig& config) {
  method.validate();
  const Vec& q1 = pair.h1.distribution;
  const Vec& q2 = pair.h2.distribution;
  const auto kind = method.spec.kind;

  if (kind == DissimilarityKind::transposed_binary_kl || kind == DissimilarityKind::half_fo)
    return arithmetic_mean(q1, q2);
  if (kind == DissimilarityKind::half_f) return normalized_geometric_mean(q1, q2);
  if (kind == DissimilarityKind::binary_kl &&
      (method.summation_set == SummationSet::basis_b ||
       method.summation_set == SummationSet::stated_events_only))
    return f_log_odds_merge(q1, q2);

  // Uncommon combinations go through the generic aggregator.
  AggregationResult result = aggregate(heuristic_bases(pair), method, config);
  if (!result.converged) throw SolveError("masked-letter aggregation did not converge");
  Vec p(pair.support.size());
  const int m = static_cast<int>(pair.support.size());
  for (int i = 0; i < m; ++i) {
    Vec e = Vec::Zero(m);
    e[i] = 1.0;
    p[i] = result.merged_belief(EventVector{e});
  }
  return p;
}

AccuracyReport evaluate_accuracy(const Corpus& corpus, const AggregationMethod& method,
                                 const SolverConfig& config, int mask_position, bool holdout) {
  if (mask_position < 0 || mask_position > 4)
    throw ValidationError("mask position must lie in [0,4] for 5-letter words");
  TrigramCounts counts(corpus);
  AccuracyReport report;
  int correct = 0;
  for (const auto& word : corpus.words) {
    if (word.size() != 5) continue;
    // The prediction needs a full bigram on each flank; in a 5-letter word
    // only the middle position has both, other positions count as skipped.
    if (mask_position - 2 < 0 || mask_position + 2 > 4) {
      report.skipped++;
      continue;
    }
    const char truth = word[static_cast<size_t>(mask_position)];
    const std::string prefix = word.substr(static_cast<size_t>(mask_position - 2), 2);
    const std::string suffix = word.substr(static_cast<size_t>(mask_position + 1), 2);
    if (holdout) counts.remove_word(word);
    try {
      const HeuristicPair pair = build_heuristics(counts, prefix, suffix);
      const Vec p = predict_masked(pair, method, config);
      int best = 0;
      for (int i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;  // ties keep the alphabetically first
      report.n_evaluated++;
      if (pair.support[static_cast<size_t>(best)] == truth) correct++;
    } catch (const ValidationError&) {
      report.skipped++;  // empty support
    }
    if (holdout) counts.restore_word(word);
  }
  report.top1_accuracy = report.n_evaluated > 0
                             ? static_cast<double>(correct) / report.n_evaluated
                             : 0.0;
  return report;
}

}  // namespace coherence
