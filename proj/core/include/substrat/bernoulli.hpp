#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace substrat {

using Rational = boost::multiprecision::cpp_rational;

/// b_k = (-1)^{k-1} 2^{2k} B_{2k} / (2k)!, the Maclaurin coefficients of
/// 1 - w / tan w = sum_k b_k w^{2k}.
struct BernoulliCoefficient {
  int k = 0;
  Rational exact;
  double value = 0.0;
};

/// Range of the precomputed table (b_1 .. b_30, i.e. B_2 .. B_60). Larger k
/// extend the table on demand.
inline constexpr int kBernoulliTableSize = 30;

/// Bernoulli number B_n from sum_{j<=n} C(n+1, j) B_j = 0, B_0 = 1.
Rational bernoulli_number(int n);

BernoulliCoefficient bernoulli_b(int k);
double bernoulli_b_value(int k);

/// b_1 .. b_n, index k - 1 holds b_k.
std::vector<Rational> bernoulli_table(int n = kBernoulliTableSize);

/// det (b_{m+i+j-1})_{i,j=1..s} by exact elimination. `table` replaces the
/// coefficient source (index k - 1 holds b_k) when given.
Rational hankel_det(int m, int s, const std::vector<Rational>* table = nullptr);

/// Truncated positive-sum representation of hankel_det(m, s) over
/// 1 <= k_i <= kmax. Increasing in kmax.
double zeta_series_det(int m, int s, long kmax);

/// Smallest tabulated kmax at which zeta_series_det(m, s, kmax) is within
/// 1e-6 relative of hankel_det(m, s), for m <= 2 and s <= 3; 0 otherwise.
long documented_kmax(int m, int s);

}  // namespace substrat
