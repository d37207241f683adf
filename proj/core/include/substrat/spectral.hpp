#pragma once

#include <cstdint>
#include <vector>

#include "substrat/group.hpp"
#include "substrat/linalg.hpp"

namespace substrat {

/// sqrt(-J^2) = sum_j b_j P_j with b_1 > ... > b_M > 0, plus the kernel
/// projection P_0. rank(P_j) = 2 r_j.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Mat> projections;
  std::vector<int> ranks;
  Mat kernel_projection;
  int kernel_rank = 0;  // dim ker J
  /// Smallest gap between neighbouring clusters (kernel included) relative
  /// to b_1; +inf when there is at most one cluster.
  double min_relative_gap = 0.0;
  /// Largest spread inside a merged nonzero cluster relative to b_1.
  double max_merged_spread = 0.0;

  int M() const { return static_cast<int>(eigenvalues.size()); }
  int dim() const { return static_cast<int>(kernel_projection.rows()); }
  double b_max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
};

inline constexpr double kDefaultClusterTol = 1e-8;

/// Decomposition of a real skew-symmetric matrix.
SpectralDecomposition decompose(const Mat& J, double cluster_tol = kDefaultClusterTol);
SpectralDecomposition decompose(const StratifiedGroup& g, const DualVector& mu,
                                double cluster_tol = kDefaultClusterTol);

/// Max over `samples` random unit mu of M + [ker J_mu != 0].
int generic_eigencount(const StratifiedGroup& g, int samples, std::uint64_t seed);

/// Uniformly distributed unit vector in R^n.
template <class Rng>
Vec random_unit(int n, Rng& rng);

/// hT(w) = w / tan w and hS(w) = w / sin w, both even and equal to 1 at 0.
/// Throw NearPole within kPoleTol of k pi, k != 0.
inline constexpr double kPoleTol = 1e-8;
Complex hT(Complex w);
Complex hS(Complex w);

enum class SpectralFunction { T, S };

/// f(z J) with f = hT or hS, evaluated spectrally.
CMat spectral_apply(SpectralFunction which, Complex z, const SpectralDecomposition& sd);
CMat spectral_apply(SpectralFunction which, Complex z, const StratifiedGroup& g,
                    const DualVector& mu);

/// sqrt det hS(z J) as prod_j hS(i z b_j)^{r_j}; requires |Im z| b_1 < pi,
/// otherwise throws BranchRegionViolated.
Complex srdet_hS(Complex z, const SpectralDecomposition& sd);
Complex srdet_hS(Complex z, const StratifiedGroup& g, const DualVector& mu);

/// The same pair product without the region check. On Re z > 0 each factor
/// z b / sinh(z b) is analytic and nonzero, so this continues srdet_hS.
Complex pair_product_hS(Complex z, const SpectralDecomposition& sd);

}  // namespace substrat

#include <random>

namespace substrat {

template <class Rng>
Vec random_unit(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

}  // namespace substrat
