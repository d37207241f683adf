#pragma once

#include <string>

#include "substrat/group.hpp"
#include "substrat/linalg.hpp"
#include "substrat/spectral.hpp"

namespace substrat {

struct HeatQuery {
  Complex z;
  DualVector mu;
  Vec x;
};

/// Partial Fourier transform in the centre of the heat kernel p_z:
/// (4 pi z)^{-d1/2} sqrt det hS(z J) exp(-<hT(z J) x, x> / (4 z)).
/// Throws InvalidTime when Re z <= 0 and BranchRegionViolated outside
/// |Im z| |J| < pi.
Complex heat_partial_ft(const StratifiedGroup& g, const HeatQuery& q);

/// Same formula from a precomputed decomposition, using the pair-product
/// continuation of the determinant (no region check).
Complex heat_partial_ft(const SpectralDecomposition& sd, Complex z, const Vec& x);

/// Tensor composite Gauss–Legendre grid on a box |mu_k| <= radius.
/// Zero radius or panels mean automatic choice.
struct QuadratureGrid {
  double radius = 0.0;
  int panels = 0;
  int order = 16;
  /// Relative tolerance for the comparison against the grid with half the
  /// panels; <= 0 disables the comparison.
  double tolerance = 1e-8;
  /// Cap on nodes per axis.
  int max_nodes_per_axis = 8192;
};

struct HeatValue {
  Complex value;
  double error_estimate = 0.0;
  /// Set when Re z is small against |Im z| or the grid leaves the region
  /// where the determinant branch is certified.
  bool flagged = false;
  std::string note;
  double radius = 0.0;
  int nodes_per_axis = 0;
};

/// p_z(x, u) = (2 pi)^{-d2} int heat_partial_ft(z, mu, x) e^{i <mu, u>} dmu.
/// Supports d2 <= 3. Throws InvalidTime or GridTooCoarse.
HeatValue heat_space(const StratifiedGroup& g, Complex z, const Vec& x, const Vec& u,
                     const QuadratureGrid& grid = {});

}  // namespace substrat
