#pragma once

#include "coherence/credence.hpp"

namespace coherence {

/// Reduced row-echelon form with pivot threshold kPivotTol.
Mat rref(Mat m, double pivot_tol = kPivotTol);

/// Nonnegative payout vector in rowspan(Vbar), scaled so its first nonzero
/// entry is 1 (membership in O1).
struct PayoutVector {
  Vec b;
};

/// Facet a.x >= c of the coherent polytope, carrying the extremal payout
/// b = Vbar^T (a, -c).
struct FacetInequality {
  Vec a;      // length n
  double c = 0.0;
  PayoutVector payout;
};

/// A bet with nonnegative payout in every atom and negative cost against qbar.
struct BetCertificate {
  Vec a;        // length n+1; last entry bets on the sure event
  Vec payouts;  // Vbar^T a, >= 0
  double cost = 0.0;  // a . qbar, < 0
};

/// True iff the columns of Vbar indexed by the zero set of b span rank exactly
/// n (one less than the full row rank n+1). b must lie in rowspan(Vbar).
bool is_maximally_zero(const Vec& b, const Mat& vbar);

/// All facets of conv(columns of V), one per element of M cap O1.
/// Requires Vbar of full row rank; refuses N > 12 (exponential enumeration).
std::vector<FacetInequality> enumerate_facets(const Mat& events);
std::vector<FacetInequality> enumerate_facets(const CredenceBase& base);

/// std::nullopt iff the base is coherent; otherwise the certificate of the
/// facet inequality q violates most (or of an inconsistent row dependency).
std::optional<BetCertificate> dutch_book(const CredenceBase& base);

}  // namespace coherence
