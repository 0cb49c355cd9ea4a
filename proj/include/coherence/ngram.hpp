#pragma once

#include "coherence/aggregation.hpp"

#include <array>

namespace coherence {

/// Deduplicated lowercase [a-z]+ words, order preserved.
struct Corpus {
  std::vector<std::string> words;
  int dropped_lines = 0;
};

/// One word per line; lines that are not purely alphabetic after lowercasing
/// are dropped and counted. Throws ValidationError on unreadable or empty input.
Corpus load_corpus(const std::string& path);

/// Occurrence counts of all letter trigrams across the corpus.
class TrigramCounts {
 public:
  explicit TrigramCounts(const Corpus& corpus);

  int count(char a, char b, char c) const { return counts_[index(a, b, c)]; }
  /// Temporarily remove / restore one word's own trigrams (leave-one-out).
  void remove_word(const std::string& word);
  void restore_word(const std::string& word);

 private:
  static size_t index(char a, char b, char c) {
    return (static_cast<size_t>(a - 'a') * 26 + (b - 'a')) * 26 + (c - 'a');
  }
  std::array<int, 26 * 26 * 26> counts_{};
};

struct NgramHeuristic {
  enum class Direction { after_prefix, before_suffix };
  Direction direction = Direction::after_prefix;
  std::string context;       // the two fixed letters
  std::string support;       // letters with positive probability, sorted
  Vec distribution;          // over `support`, sums to 1
};

struct HeuristicPair {
  NgramHeuristic h1;  // letters following the prefix
  NgramHeuristic h2;  // letters preceding the suffix
  std::string support;  // shared support (intersection, both renormalized to it)
};

/// Relative trigram frequencies after `prefix` and before `suffix`, restricted
/// to the intersection of their supports. Throws ValidationError when empty.
HeuristicPair build_heuristics(const TrigramCounts& counts, const std::string& prefix,
                               const std::string& suffix);
HeuristicPair build_heuristics(const Corpus& corpus, const std::string& prefix,
                               const std::string& suffix);

/// Merged letter distribution. Closed routes: basis-B/f solves the log-odds
/// stationarity by bisection, fo variants average the two heuristics, the
/// asymmetric half-f variant is the normalized geometric mean. Other method
/// combinations fall back to the generic aggregator.
Vec predict_masked(const HeuristicPair& pair, const AggregationMethod& method,
                   const SolverConfig& config = {});

struct AccuracyReport {
  double top1_accuracy = 0.0;
  int n_evaluated = 0;
  int skipped = 0;
};

/// Masks one letter of every 5-letter word (the middle one by default),
/// predicts it from the flanking bigrams, and scores top-1 matches with
/// alphabetical tie-breaking. holdout excludes the word's own trigrams.
AccuracyReport evaluate_accuracy(const Corpus& corpus, const AggregationMethod& method,
                                 const SolverConfig& config = {}, int mask_position = 2,
                                 bool holdout = false);

}  // namespace coherence
