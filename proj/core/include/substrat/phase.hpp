#pragma once

#include <cstdint>
#include <vector>

#include "substrat/group.hpp"
#include "substrat/linalg.hpp"
#include "substrat/spectral.hpp"

namespace substrat {

/// g(b) = 1 - b cot b = sum_k b_k b^{2k}; accurate for small b.
double one_minus_hT(double b);

enum class Phi0Method { Spectral, Series };

/// Phi_0(y, mu) = |y|^2 - <hT(i J_mu) y, y> = sum_k b_k |J_mu^k y|^2.
/// Series truncates at kmax and throws SeriesDiverges when |J_mu| >= pi.
double phi0(const StratifiedGroup& g, const Vec& y, const DualVector& mu,
            Phi0Method method = Phi0Method::Spectral, int kmax = 60);

/// Phi(y, v, mu) = -|y|^2 + Phi_0(y, mu) + <mu, v>.
double phi(const StratifiedGroup& g, const Vec& y, const Vec& v, const DualVector& mu);

/// Central differences in mu with one Richardson step (h and h / 2),
/// h = 1e-4 (1 + |mu|). The Hessian does not depend on v.
struct MuDerivatives {
  Vec gradient;
  Mat hessian;
  /// Largest entry of |D(h / 2) - D(h)|, a proxy for the difference error.
  double discrepancy = 0.0;
};

MuDerivatives phi_mu_derivatives(const StratifiedGroup& g, const Vec& y, const Vec& v,
                                 const DualVector& mu, int order);

/// Hessian of mu -> Phi_0(y, mu) from the power series, differentiated term
/// by term. Requires |J_mu| < pi.
Mat phi0_series_hessian(const StratifiedGroup& g, const Vec& y, const DualVector& mu,
                        int kmax = 200);

/// Filtration V_0 = V, V_j = {T in V : T S^l e = 0, l < j} of the dual
/// second layer (identified with {J_mu}), complements W_j = V_j minus V_{j+1}
/// and the form H(eps) = (1/2) Hess Phi_0(e, eps S) in the W basis.
struct FiltrationBlocks {
  /// W[j] holds an orthonormal basis of W_j as columns (dual coordinates).
  std::vector<Mat> W;
  std::vector<int> ranks;
  int r = 0;
  /// Concatenated W basis, d2 x d2.
  Mat basis;
  /// Block index of every basis column.
  std::vector<int> block_of;
  Mat H;
  /// Diagonal of M_eps: (-1)^{floor(j/2)} eps^j on block j.
  Vec scaling;
  /// Predicted eps^{i+j} coefficient of H_ij for i + j even, zero otherwise:
  /// (-1)^{(i-j)/2} b_{1+(i+j)/2} <A S^i e, B S^j e>.
  Mat predicted_leading;
};

/// Throws NonGenericDirection, BadAnchorVector, FiltrationNotTerminating.
FiltrationBlocks filtration_blocks(const StratifiedGroup& g, const DualVector& S_mu,
                                   const Vec& e, double eps);

/// e = sum_j w_j / |w_j| with w_j the projection of a random vector onto the
/// j-th eigenspace of S^2 (kernel included).
template <class Rng>
Vec anchor_vector(const SpectralDecomposition& sd, Rng& rng);

struct CriticalPointCertificate {
  Vec y0;
  Vec v0;
  DualVector mu0;
  Mat hessian;
  Vec hessian_eigenvalues;
  double min_abs_eigenvalue = 0.0;
  double margin = 0.0;  // min eigenvalue / |y0|^2
  double gradient_norm = 0.0;
  double epsilon_used = 0.0;
  DualVector S_direction;
  std::vector<int> filtration_ranks;
  int direction_attempts = 0;
};

/// Default scan {2^-2, ..., 2^-12} (times the pole-free radius 1).
std::vector<double> default_eps_grid();

/// Throws SearchFailed with the best margin when no eps certifies.
CriticalPointCertificate find_critical(const StratifiedGroup& g, std::uint64_t seed,
                                       const std::vector<double>& eps_grid = {});

}  // namespace substrat

namespace substrat {

template <class Rng>
Vec anchor_vector(const SpectralDecomposition& sd, Rng& rng) {
  const int n = sd.dim();
  Vec e = Vec::Zero(n);
  auto add = [&](const Mat& P) {
    Vec w;
    do {
      w = P * random_unit(n, rng);
    } while (w.norm() < 1e-6);
    e += w / w.norm();
  };
  for (const Mat& P : sd.projections) add(P);
  if (sd.kernel_rank > 0) add(sd.kernel_projection);
  return e;
}

}  // namespace substrat
