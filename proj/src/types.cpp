#include "coherence/types.hpp"

#include <cmath>
#include <set>

namespace coherence {

void AtomSpace::validate() const {
  if (labels.empty()) throw ValidationError("atom space must contain at least one outcome");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw ValidationError("duplicate atom label: " + l);
  }
}

void EventVector::validate() const {
  for (int i = 0; i < indicator.size(); ++i) {
    if (indicator[i] != 0.0 && indicator[i] != 1.0)
      throw ValidationError("event indicator entries must be 0 or 1");
  }
}

EventVector EventVector::from_bits(const std::vector<int>& bits) {
  Vec v(static_cast<int>(bits.size()));
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw ValidationError("event bits must be 0 or 1");
    v[static_cast<int>(i)] = bits[i];
  }
  return EventVector{std::move(v)};
}

void ProbabilityVector::validate() const {
  if (pi.size() == 0) throw ValidationError("probability vector must be nonempty");
  for (int i = 0; i < pi.size(); ++i) {
    if (!(pi[i] >= 0.0)) throw ValidationError("probability vector entries must be nonnegative");
  }
  if (std::abs(pi.sum() - 1.0) > kSimplexSumTol)
    throw ValidationError("probability vector must sum to 1");
}

ProbabilityVector ProbabilityVector::uniform(int n) {
  return ProbabilityVector{Vec::Constant(n, 1.0 / n)};
}

}  // namespace coherence
