#include "substrat/bernoulli.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "substrat/error.hpp"

namespace substrat {
namespace {

std::mutex g_mutex;
std::vector<Rational> g_numbers{Rational(1)};  // B_0, B_1, ...

void extend_to(int n) {
  using boost::multiprecision::cpp_int;
  for (int m = static_cast<int>(g_numbers.size()); m <= n; ++m) {
    // sum_{j=0}^{m} C(m+1, j) B_j = 0.
    Rational acc(0);
    cpp_int binom(1);  // C(m+1, 0)
    for (int j = 0; j < m; ++j) {
      acc += Rational(binom) * g_numbers[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    g_numbers.push_back(-acc / Rational(m + 1));
  }
}

Rational factorial(int n) {
  boost::multiprecision::cpp_int f(1);
  for (int i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

}  // namespace

Rational bernoulli_number(int n) {
  if (n < 0) fail(ErrorKind::InvalidInput, "Bernoulli index must be >= 0");
  std::lock_guard<std::mutex> lock(g_mutex);
  extend_to(std::max(n, 2 * kBernoulliTableSize));
  return g_numbers[n];
}

BernoulliCoefficient bernoulli_b(int k) {
  if (k < 1) fail(ErrorKind::InvalidInput, "b_k needs k >= 1");
  Rational pow2(boost::multiprecision::cpp_int(1) << (2 * k));
  Rational b = pow2 * bernoulli_number(2 * k) / factorial(2 * k);
  if (k % 2 == 0) b = -b;
  BernoulliCoefficient out;
  out.k = k;
  out.exact = b;
  out.value = static_cast<double>(b);
  return out;
}

double bernoulli_b_value(int k) {
  if (k < 1) fail(ErrorKind::InvalidInput, "b_k needs k >= 1");
  // Exact values where tabulated, 2 zeta(2k) / pi^{2k} beyond; zeta(2k) is
  // 1 to within 2^{-2k} there, so a few terms reach full precision.
  static const std::vector<double> table = [] {
    std::vector<double> out;
    for (int j = 1; j <= kBernoulliTableSize; ++j) out.push_back(bernoulli_b(j).value);
    for (int j = kBernoulliTableSize + 1; j <= 400; ++j) {
      double zeta = 0.0;
      for (int n = 12; n >= 1; --n) zeta += std::pow(static_cast<double>(n), -2.0 * j);
      out.push_back(2.0 * zeta * std::pow(std::numbers::pi, -2.0 * j));
    }
    return out;
  }();
  if (k <= static_cast<int>(table.size())) return table[k - 1];
  return 0.0;  // below the smallest denormal
}

std::vector<Rational> bernoulli_table(int n) {
  std::vector<Rational> out;
  out.reserve(n);
  for (int k = 1; k <= n; ++k) out.push_back(bernoulli_b(k).exact);
  return out;
}

Rational hankel_det(int m, int s, const std::vector<Rational>* table) {
  if (m < 0 || s < 1) fail(ErrorKind::InvalidInput, "hankel_det needs m >= 0, s >= 1");
  const int top = m + 2 * s - 1;
  std::vector<Rational> own;
  if (table == nullptr) {
    own = bernoulli_table(std::max(top, kBernoulliTableSize));
    table = &own;
  }
  if (static_cast<int>(table->size()) < top) {
    fail(ErrorKind::InvalidInput, "Bernoulli table too short for this Hankel matrix");
  }
  std::vector<std::vector<Rational>> a(s, std::vector<Rational>(s));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) a[i][j] = (*table)[m + i + j];  // b_{m+i+j+1}, 0-based i, j
  }
  Rational det(1);
  for (int c = 0; c < s; ++c) {
    int pivot = c;
    while (pivot < s && a[pivot][c] == 0) ++pivot;
    if (pivot == s) return Rational(0);
    if (pivot != c) {
      std::swap(a[pivot], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < s; ++r) {
      if (a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (int k = c; k < s; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

namespace {

using LD = long double;

// Ordered sum over 1 <= k_1 < ... < k_s <= kmax of
// prod k_i^{-2p} prod_{i<j} (k_i^2 - k_j^2)^2.
LD ordered_sum(int s, int p, long kmax) {
  std::vector<long> k(s);
  LD total = 0.0L;
  // Recursive enumeration with an explicit stack keeps the inner term exact
  // up to long double rounding.
  auto rec = [&](auto&& self, int level, long start) -> void {
    if (level == s) {
      LD term = 1.0L;
      for (int i = 0; i < s; ++i) term *= std::pow(static_cast<LD>(k[i]), -2.0L * p);
      for (int i = 0; i < s; ++i) {
        for (int j = i + 1; j < s; ++j) {
          const LD d = static_cast<LD>(k[i]) * k[i] - static_cast<LD>(k[j]) * k[j];
          term *= d * d;
        }
      }
      total += term;
      return;
    }
    for (long v = start; v <= kmax - (s - 1 - level); ++v) {
      k[level] = v;
      self(self, level + 1, v + 1);
    }
  };
  rec(rec, 0, 1);
  return total;
}

// Truncated power sums sum_{k<=kmax} k^{-2q} for q = qmin..qmax, summed from
// the small terms up.
std::vector<LD> power_sums(int qmin, int qmax, long kmax) {
  std::vector<LD> out(qmax - qmin + 1, 0.0L);
  for (long k = kmax; k >= 1; --k) {
    const LD inv2 = 1.0L / (static_cast<LD>(k) * k);
    LD p = std::pow(inv2, static_cast<LD>(qmin));
    for (int q = qmin; q <= qmax; ++q) {
      out[q - qmin] += p;
      p *= inv2;
    }
  }
  return out;
}

LD det_leibniz(const std::vector<std::vector<LD>>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  LD total = 0.0L;
  do {
    LD term = 1.0L;
    for (int i = 0; i < n; ++i) term *= a[i][perm[i]];
    int inversions = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    total += (inversions % 2 ? -term : term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace

double zeta_series_det(int m, int s, long kmax) {
  if (m < 0 || s < 1) fail(ErrorKind::InvalidInput, "zeta_series_det needs m >= 0, s >= 1");
  if (kmax < s) fail(ErrorKind::InvalidInput, "kmax must be >= s");
  const int p = 2 * s + m - 1;
  LD ordered = 0.0L;
  // Number of ordered tuples ~ kmax^s / s!.
  LD tuples = 1.0L;
  for (int i = 0; i < s; ++i) tuples *= static_cast<LD>(kmax - i) / (i + 1);
  if (tuples <= 2e6L || s > 6) {
    ordered = ordered_sum(s, p, kmax);
  } else {
    // Heine identity: the unordered sum is s! det(sum_k k^{-2(p - i - j)}).
    const std::vector<LD> zeta = power_sums(p - 2 * (s - 1), p, kmax);
    std::vector<std::vector<LD>> h(s, std::vector<LD>(s));
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) h[i][j] = zeta[p - i - j - (p - 2 * (s - 1))];
    }
    ordered = det_leibniz(h);  // unordered / s!
  }
  const LD pi = std::numbers::pi_v<long double>;
  return static_cast<double>(std::pow(2.0L, s) * ordered /
                             std::pow(pi, static_cast<LD>(2 * s * (s + m))));
}

long documented_kmax(int m, int s) {
  if (m < 0 || m > 2 || s < 1 || s > 3) return 0;
  static constexpr long table[3][3] = {
      {1000000, 10000000, 10000000},
      {200, 200, 1000},
      {200, 200, 200},
  };
  return table[m][s - 1];
}

}  // namespace substrat
