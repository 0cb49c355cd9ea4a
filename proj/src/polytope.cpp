#include "coherence/polytope.hpp"

#include <algorithm>
#include <cmath>

namespace coherence {

Mat rref(Mat m, double pivot_tol) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  int lead = 0;
  for (int r = 0; r < rows && lead < cols; ++r) {
    // Partial pivoting: largest magnitude in the current column.
    int pivot = -1;
    double best = pivot_tol;
    while (lead < cols) {
      for (int i = r; i < rows; ++i) {
        if (std::abs(m(i, lead)) > best) {
          best = std::abs(m(i, lead));
          pivot = i;
        }
      }
      if (pivot >= 0) break;
      ++lead;
    }
    if (pivot < 0) break;
    m.row(r).swap(m.row(pivot));
    m.row(r) /= m(r, lead);
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      if (std::abs(m(i, lead)) > 0.0) m.row(i) -= m(i, lead) * m.row(r);
    }
    ++lead;
  }
  // Flush elimination dust.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (std::abs(m(i, j)) < pivot_tol) m(i, j) = 0.0;
  return m;
}

namespace {

int rank_of_columns(const Mat& vbar, const std::vector<int>& cols) {
  if (cols.empty()) return 0;
  Mat sub(vbar.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = vbar.col(cols[k]);
  Eigen::ColPivHouseholderQR<Mat> qr(sub);
  qr.setThreshold(kPivotTol);
  return static_cast<int>(qr.rank());
}

bool in_row_span(const Vec& b, const Mat& vbar) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(vbar.transpose());
  const Vec a = cod.solve(b);
  return (vbar.transpose() * a - b).lpNorm<Eigen::Infinity>() <= 1e-9 * std::max(1.0, b.lpNorm<Eigen::Infinity>());
}

std::vector<int> zero_set(const Vec& b, double tol = 1e-9) {
  std::vector<int> z;
  for (int j = 0; j < b.size(); ++j)
    if (std::abs(b[j]) <= tol) z.push_back(j);
  return z;
}

}  // namespace

bool is_maximally_zero(const Vec& b, const Mat& vbar) {
  const int n = static_cast<int>(vbar.rows()) - 1;
  if (b.size() != vbar.cols()) throw ValidationError("payout length does not match atom count");
  if (b.minCoeff() < -1e-12) throw ValidationError("payout must be nonnegative");
  if (!in_row_span(b, vbar)) throw ValidationError("payout lies outside rowspan(Vbar)");
  return rank_of_columns(vbar, zero_set(b)) == n;
}

std::vector<FacetInequality> enumerate_facets(const Mat& events) {
  const int n = static_cast<int>(events.rows());
  const int num_atoms = static_cast<int>(events.cols());
  if (num_atoms > 12)
    throw SizeError("facet enumeration is exponential in the atom count; refusing N > 12");
  Mat vbar(n + 1, num_atoms);
  vbar.topRows(n) = events;
  vbar.row(n).setOnes();
  {
    Eigen::ColPivHouseholderQR<Mat> qr(vbar);
    qr.setThreshold(kPivotTol);
    if (static_cast<int>(qr.rank()) != n + 1)
      throw ValidationError("facet enumeration requires Vbar of full row rank; reduce first");
  }

  std::vector<FacetInequality> facets;
  const auto already_have = [&](const Vec& payout) {
    for (const auto& f : facets)
      if ((f.payout.b - payout).lpNorm<Eigen::Infinity>() <= 1e-8) return true;
    return false;
  };

  // Every facet's tight column set has rank exactly n, hence contains an
  // n-subset of rank n whose orthogonal direction recovers the facet.
  std::vector<int> subset(n);
  const auto process = [&](const std::vector<int>& cols) {
    Mat sub(n + 1, n);
    for (int k = 0; k < n; ++k) sub.col(k) = vbar.col(cols[k]);
    Eigen::FullPivLU<Mat> lu(sub.transpose());
    lu.setThreshold(kPivotTol);
    if (lu.dimensionOfKernel() != 1) return;
    Vec a = lu.kernel().col(0);
    Vec payout = vbar.transpose() * a;
    const double floor = payout.minCoeff(), ceil = payout.maxCoeff();
    if (floor < -1e-9 && ceil > 1e-9) return;  // mixed signs: no orientation works
    if (ceil <= 1e-9) {
      a = -a;
      payout = -payout;
    }
    int first = 0;
    while (first < payout.size() && payout[first] <= 1e-9) ++first;
    if (first == payout.size()) return;
    a /= payout[first];
    payout /= payout[first];
    for (int j = 0; j < payout.size(); ++j)
      if (std::abs(payout[j]) <= 1e-9) payout[j] = 0.0;
    if (already_have(payout)) return;
    if (rank_of_columns(vbar, zero_set(payout)) != n) return;
    FacetInequality facet;
    facet.a = a.head(n);
    facet.c = -a[n];
    facet.payout = PayoutVector{payout};
    facets.push_back(std::move(facet));
  };

  // Iterate over all size-n column subsets in lexicographic order.
  for (int i = 0; i < n; ++i) subset[i] = i;
  if (n <= num_atoms) {
    while (true) {
      process(subset);
      int i = n - 1;
      while (i >= 0 && subset[i] == num_atoms - n + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int k = i + 1; k < n; ++k) subset[k] = subset[k - 1] + 1;
    }
  }

  std::sort(facets.begin(), facets.end(), [](const FacetInequality& x, const FacetInequality& y) {
    for (int j = 0; j < x.payout.b.size(); ++j) {
      if (x.payout.b[j] != y.payout.b[j]) return x.payout.b[j] < y.payout.b[j];
    }
    return false;
  });
  return facets;
}

std::vector<FacetInequality> enumerate_facets(const CredenceBase& base) {
  return enumerate_facets(base.events);
}

std::optional<BetCertificate> dutch_book(const CredenceBase& base) {
  const RankReduction reduction = reduce_full_rank(base);
  if (reduction.verdict == RankVerdict::inconsistent) {
    BetCertificate cert;
    Vec a = *reduction.inconsistent_bet;
    a /= a.cwiseAbs().maxCoeff();
    cert.a = a;
    cert.payouts = base.extended_matrix().transpose() * cert.a;
    cert.cost = cert.a.dot(base.extended_credences());
    return cert;
  }

  const CredenceBase& red = reduction.reduced;
  const int n_red = red.n();
  const auto facets = enumerate_facets(red);
  double worst_margin = 0.0;
  const FacetInequality* worst = nullptr;
  for (const auto& facet : facets) {
    const double margin = facet.c - facet.a.dot(red.credences);  // > 0 when violated
    if (margin > worst_margin) {
      worst_margin = margin;
      worst = &facet;
    }
  }
  if (!worst || worst_margin <= 1e-9) return std::nullopt;

  // Map the reduced-facet bet back onto the original rows (removed rows bet 0).
  BetCertificate cert;
  cert.a = Vec::Zero(base.n() + 1);
  for (int k = 0; k < n_red; ++k) cert.a[reduction.kept_rows[k]] = worst->a[k];
  cert.a[base.n()] = -worst->c;
  cert.payouts = base.extended_matrix().transpose() * cert.a;
  cert.cost = cert.a.dot(base.extended_credences());
  return cert;
}

}  // namespace coherence
