#pragma once

#include "substrat/linalg.hpp"

namespace substrat {

enum class CutoffShape { StdBump, ScaledBump };

/// x -> amplitude * exp(-1 / (1 - |x - c|^2 / rho^2)) on |x - c| < rho and 0
/// outside, rho = radius (StdBump) or radius * lambda (ScaledBump). The bump
/// is radial, so its support is exactly the closed ball and its value at the
/// centre is amplitude / e.
struct CutoffSpec {
  Vec center;
  double radius = 0.5;
  CutoffShape shape = CutoffShape::StdBump;
  double lambda = 1.0;
  double amplitude = 1.0;

  static CutoffSpec scalar(double c, double rho, CutoffShape shape = CutoffShape::StdBump,
                           double lambda = 1.0);

  double effective_radius() const {
    return shape == CutoffShape::ScaledBump ? radius * lambda : radius;
  }
  int dim() const { return static_cast<int>(center.size()); }
  double operator()(const Vec& x) const;
  double operator()(double s) const;
};

/// x -> chi(-x).
CutoffSpec mirrored(const CutoffSpec& chi);

/// chi-hat(lambda) = int chi(s) e^{-i s lambda} ds for a scalar cutoff, by a
/// composite Gauss–Legendre rule on its support with enough panels to
/// resolve the oscillation.
Complex cutoff_fourier(const CutoffSpec& chi, double lambda);

/// e^{i t lambda} chi-hat(lambda).
Complex multiplier_m(const CutoffSpec& chi, double t, double lambda);

}  // namespace substrat
