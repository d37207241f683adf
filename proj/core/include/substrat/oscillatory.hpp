#pragma once

#include <array>
#include <utility>
#include <vector>

#include "substrat/cutoff.hpp"
#include "substrat/group.hpp"
#include "substrat/linalg.hpp"
#include "substrat/phase.hpp"
#include "substrat/spectral.hpp"

namespace substrat {

/// B(sigma, mu) = (1 - sigma)^{-d1/2} sqrt det hS((1 - sigma) i J_mu).
/// Throws BranchRegionViolated unless |1 - sigma| b_1 < pi.
Complex amplitude_B(const SpectralDecomposition& sd, double sigma);
Complex amplitude_B(const StratifiedGroup& g, double sigma, const DualVector& mu);

/// Sigma(y, mu) = |hS(i J_mu) y|^2.
double sigma_form(const SpectralDecomposition& sd, const Vec& y);
double sigma_form(const StratifiedGroup& g, const Vec& y, const DualVector& mu);

/// R_0(sigma, z) defined by
/// hT((1 - sigma) z) / (1 - sigma) = hT(z) + hS(z)^2 sigma + R_0(sigma, z) sigma^2.
/// Built once per z; small |sigma| uses a degree-8 Taylor polynomial whose
/// coefficients come from a Cauchy integral on a circle inside the disc of
/// analyticity, larger |sigma| the direct quotient.
class RemainderSeries {
 public:
  explicit RemainderSeries(Complex z);

  Complex operator()(Complex sigma) const;

  Complex z() const { return z_; }
  /// |sigma| below which the Taylor polynomial is used.
  double switch_radius() const { return switch_; }
  /// Taylor coefficients of R_0 in sigma, degree 0..8.
  const std::array<Complex, 9>& coefficients() const { return coeffs_; }

 private:
  Complex direct(Complex sigma) const;

  Complex z_;
  Complex hT_z_;
  Complex hS2_z_;
  double switch_ = 0.05;
  std::array<Complex, 9> coeffs_{};
};

Complex remainder_R0(Complex sigma, Complex z);

struct OmegaGrid {
  /// Nodes per mu axis; 0 means 32 ceil(sqrt t).
  int mu_nodes = 0;
  int s_nodes = 64;
  /// Relative tolerance on the comparison with the half grid; <= 0 skips it.
  double tolerance = 1e-6;
};

struct OmegaQuery {
  double t = 1.0;
  Vec y;
  Vec v;
  CutoffSpec chi;
  CutoffSpec theta;
  OmegaGrid quadrature;
};

struct OmegaValue {
  Complex value;
  double error_estimate = 0.0;
  int mu_nodes = 0;
  int s_nodes = 0;
};

/// Omega_t(2 t y, t^2 v) for the multiplier chi-hat(L) e^{itL} cut off by
/// theta(t U), from the oscillatory double integral over s and mu.
/// Throws InvalidTime (t < 1), BranchRegionViolated, GridTooCoarse.
OmegaValue omega(const StratifiedGroup& g, const OmegaQuery& q);

struct StationaryPrediction {
  Complex value;
  DualVector mu_c;
  double psi = 0.0;
  Complex amplitude;
  double hessian_det = 0.0;
  int newton_iterations = 0;
};

/// e^{i pi d/4} e^{i t Psi(y, v)} A(y, v) with mu_c the critical point of
/// Phi(y, v, .) reached by damped Newton from the certificate's mu_0.
/// Throws NewtonDiverged, DegenerateHessian.
StationaryPrediction stationary_prediction(const StratifiedGroup& g, double t, const Vec& y,
                                           const Vec& v, const CutoffSpec& chi,
                                           const CutoffSpec& theta,
                                           const CriticalPointCertificate& cert);

/// theta centred at mu_0 with radius min(1 - |mu_0|, (pi - b_1(mu_0)) / 2).
CutoffSpec choose_theta(const StratifiedGroup& g, const CriticalPointCertificate& cert);

/// chi = even bump of radius lambda / 2, lambda halved from 1 until
/// |chi-hat(Sigma(y_0, mu_0))| >= chi-hat(0) / 2.
CutoffSpec choose_chi(const StratifiedGroup& g, const CriticalPointCertificate& cert);

struct PowerLawFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Least-squares line through (log t, log value). Throws NonpositiveValue.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

}  // namespace substrat
