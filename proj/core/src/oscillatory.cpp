#include "substrat/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "substrat/error.hpp"
#include "substrat/parallel.hpp"
#include "substrat/quadrature.hpp"

namespace substrat {

Complex amplitude_B(const SpectralDecomposition& sd, double sigma) {
  if (sigma == 1.0) fail(ErrorKind::InvalidInput, "amplitude_B needs sigma != 1");
  const double scale = 1.0 - sigma;
  if (std::abs(scale) * sd.b_max() >= std::numbers::pi) {
    fail(ErrorKind::BranchRegionViolated, "|1 - sigma| b_1 must stay below pi");
  }
  const Complex pref = std::pow(Complex(scale, 0.0), -0.5 * sd.dim());
  return pref * srdet_hS(Complex(0.0, scale), sd);
}

Complex amplitude_B(const StratifiedGroup& g, double sigma, const DualVector& mu) {
  return amplitude_B(decompose(g, mu), sigma);
}

double sigma_form(const SpectralDecomposition& sd, const Vec& y) {
  double out = (sd.kernel_projection * y).squaredNorm();
  for (int j = 0; j < sd.M(); ++j) {
    const double h = hS(Complex(sd.eigenvalues[j], 0.0)).real();
    out += h * h * (sd.projections[j] * y).squaredNorm();
  }
  return out;
}

double sigma_form(const StratifiedGroup& g, const Vec& y, const DualVector& mu) {
  if (y.size() != g.d1()) fail(ErrorKind::InvalidInput, "y has wrong length");
  return sigma_form(decompose(g, mu), y);
}

namespace {

// sigma -> hT((1 - sigma) z) / (1 - sigma).
Complex scaled_hT(Complex sigma, Complex z) {
  const Complex one_minus = 1.0 - sigma;
  if (std::abs(one_minus) == 0.0) fail(ErrorKind::NearPole, "sigma = 1 is a pole");
  return hT(one_minus * z) / one_minus;
}

}  // namespace

RemainderSeries::RemainderSeries(Complex z) : z_(z) {
  hT_z_ = hT(z);
  const Complex s = hS(z);
  hS2_z_ = s * s;
  // Distance from sigma = 0 to the nearest singularity: sigma = 1, and
  // sigma = 1 - k pi / z for k != 0.
  double dist = 1.0;
  if (std::abs(z) > 0.0) {
    const double k0 = std::round(z.real() / std::numbers::pi);
    for (double k = k0 - 1.0; k <= k0 + 1.0; k += 1.0) {
      if (k == 0.0) continue;
      dist = std::min(dist, std::abs(z - k * std::numbers::pi) / std::abs(z));
    }
  }
  const double rho = 0.5 * dist;
  // The truncation error of the degree-8 polynomial is about
  // (|sigma| / rho)^9, the cancellation error of the direct quotient about
  // eps / sigma^2; rho / 16 balances both well below 1e-11.
  switch_ = std::min(0.05, rho / 16.0);
  constexpr int N = 64;
  std::array<Complex, N> samples;
  for (int m = 0; m < N; ++m) {
    const Complex w = rho * std::exp(Complex(0.0, 2.0 * std::numbers::pi * m / N));
    samples[m] = scaled_hT(w, z);
  }
  for (int n = 2; n <= 10; ++n) {
    Complex c(0.0, 0.0);
    for (int m = 0; m < N; ++m) {
      c += samples[m] * std::exp(Complex(0.0, -2.0 * std::numbers::pi * n * m / N));
    }
    coeffs_[n - 2] = c / (static_cast<double>(N) * std::pow(rho, n));
  }
}

Complex RemainderSeries::direct(Complex sigma) const {
  return (scaled_hT(sigma, z_) - hT_z_ - hS2_z_ * sigma) / (sigma * sigma);
}

Complex RemainderSeries::operator()(Complex sigma) const {
  if (std::abs(sigma) > switch_) return direct(sigma);
  Complex acc(0.0, 0.0);
  for (int n = 8; n >= 0; --n) acc = acc * sigma + coeffs_[n];
  return acc;
}

Complex remainder_R0(Complex sigma, Complex z) { return RemainderSeries(z)(sigma); }

namespace {

Complex omega_integral(const StratifiedGroup& g, const OmegaQuery& q, int mu_nodes,
                       int s_nodes) {
  const int d2 = g.d2();
  const double rho_t = q.theta.effective_radius();
  const double rho_c = q.chi.effective_radius();
  if (q.theta.amplitude == 0.0 || q.chi.amplitude == 0.0 || !(rho_t > 0.0) ||
      !(rho_c > 0.0)) {
    return Complex(0.0, 0.0);
  }
  // One rule per mu axis, shifted by the theta centre.
  const Rule base = gauss_legendre(mu_nodes, -rho_t, rho_t);
  const double c_chi = q.chi.center[0];
  const Rule srule = gauss_legendre(s_nodes, c_chi - rho_c, c_chi + rho_c);
  std::vector<double> chi_w(srule.size());
  for (std::size_t k = 0; k < srule.size(); ++k) chi_w[k] = srule.weights[k] * q.chi(srule.nodes[k]);

  const std::size_t n = base.size();
  std::size_t total = 1;
  for (int k = 0; k < d2; ++k) total *= n;
  const double t = q.t;
  const double y2 = q.y.squaredNorm();

  return parallel::deterministic_sum(
      total,
      [&](std::size_t flat) -> Complex {
        Vec mu(d2);
        double w = 1.0;
        std::size_t rest = flat;
        for (int k = 0; k < d2; ++k) {
          const std::size_t i = rest % n;
          rest /= n;
          mu[k] = q.theta.center[k] + base.nodes[i];
          w *= base.weights[i];
        }
        const double th = q.theta(mu);
        if (th == 0.0) return Complex(0.0, 0.0);
        const SpectralDecomposition sd = decompose(g, DualVector(mu));
        double phi0_val = 0.0;
        std::vector<double> proj(sd.M());
        for (int j = 0; j < sd.M(); ++j) {
          proj[j] = (sd.projections[j] * q.y).squaredNorm();
          phi0_val += one_minus_hT(sd.eigenvalues[j]) * proj[j];
        }
        const double kernel_part = (sd.kernel_projection * q.y).squaredNorm();
        const double Phi = -y2 + phi0_val + mu.dot(q.v);
        const double Sig = sigma_form(sd, q.y);
        std::vector<RemainderSeries> rem;
        rem.reserve(sd.M());
        for (int j = 0; j < sd.M(); ++j) rem.emplace_back(Complex(sd.eigenvalues[j], 0.0));

        Complex acc(0.0, 0.0);
        for (std::size_t k = 0; k < srule.size(); ++k) {
          if (chi_w[k] == 0.0) continue;
          const double s = srule.nodes[k];
          const double sigma = s / t;
          Complex R = kernel_part / (1.0 - sigma);
          for (int j = 0; j < sd.M(); ++j) R += rem[j](Complex(sigma, 0.0)) * proj[j];
          R *= s * s;
          const Complex phase = Complex(0.0, 1.0) * (t * Phi - s * Sig) - Complex(0.0, 1.0) * R / t;
          acc += chi_w[k] * std::exp(phase) * amplitude_B(sd, sigma);
        }
        return w * th * acc;
      },
      Complex(0.0, 0.0));
}

}  // namespace

OmegaValue omega(const StratifiedGroup& g, const OmegaQuery& q) {
  if (!(q.t >= 1.0) || !std::isfinite(q.t)) fail(ErrorKind::InvalidTime, "omega needs t >= 1");
  if (q.y.size() != g.d1() || q.v.size() != g.d2()) {
    fail(ErrorKind::InvalidInput, "y or v has wrong length");
  }
  if (q.theta.dim() != g.d2() || q.chi.dim() != 1) {
    fail(ErrorKind::InvalidInput, "theta must live on the dual second layer, chi on R");
  }
  if (g.d2() > 3) fail(ErrorKind::UnsupportedDimensions, "omega supports d2 <= 3");
  const int d1 = g.d1(), d2 = g.d2();
  const double Q = d1 + 2.0 * d2;
  const int mu_nodes =
      q.quadrature.mu_nodes > 0 ? q.quadrature.mu_nodes
                                : 32 * static_cast<int>(std::ceil(std::sqrt(q.t)));
  const int s_nodes = q.quadrature.s_nodes;
  if (mu_nodes < 2 || s_nodes < 2) fail(ErrorKind::InvalidInput, "need at least 2 nodes");

  const Complex pref = std::pow(q.t, -Q / 2.0) *
                       std::exp(Complex(0.0, std::numbers::pi * d1 / 4.0)) /
                       (std::pow(4.0 * std::numbers::pi, d1 / 2.0) *
                        std::pow(2.0 * std::numbers::pi, d2));
  OmegaValue out;
  out.mu_nodes = mu_nodes;
  out.s_nodes = s_nodes;
  out.value = pref * omega_integral(g, q, mu_nodes, s_nodes);
  if (q.quadrature.tolerance > 0.0) {
    const Complex half = pref * omega_integral(g, q, mu_nodes / 2, s_nodes / 2);
    out.error_estimate = std::max(std::abs(out.value - half), 1e-13 * std::abs(out.value));
    if (out.error_estimate > q.quadrature.tolerance * std::abs(out.value) &&
        std::abs(out.value) > 0.0) {
      fail(ErrorKind::GridTooCoarse,
           "omega changes by " + std::to_string(out.error_estimate / std::abs(out.value)) +
               " relative against the half grid");
    }
  }
  return out;
}

StationaryPrediction stationary_prediction(const StratifiedGroup& g, double t, const Vec& y,
                                           const Vec& v, const CutoffSpec& chi,
                                           const CutoffSpec& theta,
                                           const CriticalPointCertificate& cert) {
  const int d1 = g.d1(), d2 = g.d2();
  const double scale = 1.0 + y.squaredNorm();
  Vec mu = cert.mu0.coords;
  auto residual = [&](const Vec& m) {
    return phi_mu_derivatives(g, y, v, DualVector(m), 1).gradient;
  };
  Vec F = residual(mu);
  int it = 0;
  bool converged = F.norm() <= 1e-12 * scale;
  while (!converged) {
    if (++it > 50) fail(ErrorKind::NewtonDiverged, "Newton did not converge in 50 steps");
    const Mat H = phi_mu_derivatives(g, y, v, DualVector(mu), 2).hessian;
    const Vec step = H.fullPivLu().solve(-F);
    if (!step.allFinite()) fail(ErrorKind::NewtonDiverged, "singular Newton system");
    double damp = 1.0;
    Vec trial;
    Vec Ft;
    for (int k = 0; k < 30; ++k) {
      trial = mu + damp * step;
      try {
        Ft = residual(trial);
        if (Ft.norm() < F.norm() || damp * step.norm() <= 1e-14 * (1.0 + mu.norm())) break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NearPole) throw;
      }
      damp *= 0.5;
    }
    if (Ft.size() == 0) fail(ErrorKind::NewtonDiverged, "line search left the pole-free region");
    const double moved = (trial - mu).norm();
    mu = trial;
    F = Ft;
    converged = F.norm() <= 1e-12 * scale || moved <= 1e-14 * (1.0 + mu.norm());
  }
  if (mu.norm() >= 1.0 && (mu - cert.mu0.coords).norm() > 0.5) {
    fail(ErrorKind::NewtonDiverged, "Newton left the neighbourhood of mu_0");
  }

  StationaryPrediction out;
  out.mu_c = DualVector(mu);
  out.newton_iterations = it;
  const Mat H = phi_mu_derivatives(g, y, v, out.mu_c, 2).hessian;
  Eigen::SelfAdjointEigenSolver<Mat> eig(H);
  const Vec& lam = eig.eigenvalues();
  double det = 1.0;
  int signature = 0;
  for (int k = 0; k < d2; ++k) {
    det *= lam[k];
    signature += lam[k] > 0 ? 1 : -1;
  }
  out.hessian_det = det;
  if (std::abs(det) < 1e-12 * std::pow(scale, d2)) {
    fail(ErrorKind::DegenerateHessian, "Hessian determinant vanishes at the critical point");
  }
  const SpectralDecomposition sd = decompose(g, out.mu_c);
  out.psi = phi(g, y, v, out.mu_c);
  // A positive definite Hessian gives the plain positive det^{-1/2}; other
  // signatures shift the phase by (signature - d2) pi / 4.
  const Complex branch =
      std::exp(Complex(0.0, std::numbers::pi * (signature - d2) / 4.0)) / std::sqrt(std::abs(det));
  out.amplitude = std::pow(4.0 * std::numbers::pi, -d1 / 2.0) *
                  std::pow(2.0 * std::numbers::pi, -d2 / 2.0) * srdet_hS(Complex(0.0, 1.0), sd) *
                  theta(mu) * branch * cutoff_fourier(chi, sigma_form(sd, y));
  out.value = std::exp(Complex(0.0, std::numbers::pi * (d1 + d2) / 4.0)) *
              std::exp(Complex(0.0, t * out.psi)) * out.amplitude;
  return out;
}

CutoffSpec choose_theta(const StratifiedGroup& g, const CriticalPointCertificate& cert) {
  const double b1 = decompose(g, cert.mu0).b_max();
  CutoffSpec theta;
  theta.center = cert.mu0.coords;
  theta.radius = std::min(1.0 - cert.mu0.norm(), 0.5 * (std::numbers::pi - b1));
  if (!(theta.radius > 0.0)) fail(ErrorKind::InvalidInput, "mu_0 leaves no room for theta");
  return theta;
}

CutoffSpec choose_chi(const StratifiedGroup& g, const CriticalPointCertificate& cert) {
  const double Sig = sigma_form(g, cert.y0, cert.mu0);
  double lambda = 1.0;
  for (int k = 0; k < 60; ++k, lambda *= 0.5) {
    const CutoffSpec chi = CutoffSpec::scalar(0.0, 0.5, CutoffShape::ScaledBump, lambda);
    if (std::abs(cutoff_fourier(chi, Sig)) >= 0.5 * std::abs(cutoff_fourier(chi, 0.0))) {
      return chi;
    }
  }
  fail(ErrorKind::SearchFailed, "no cutoff scale keeps chi-hat(Sigma) away from zero");
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) fail(ErrorKind::InvalidInput, "power-law fit needs >= 3 samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first > 0.0)) fail(ErrorKind::InvalidInput, "sample times must be positive");
    if (i > 0 && !(samples[i].first > samples[i - 1].first)) {
      fail(ErrorKind::InvalidInput, "sample times must increase strictly");
    }
    if (!(samples[i].second > 0.0)) {
      fail(ErrorKind::NonpositiveValue, "power-law fit needs positive values");
    }
  }
  const int n = static_cast<int>(samples.size());
  Mat A(n, 2);
  Vec b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = std::log(samples[i].first);
    A(i, 1) = 1.0;
    b[i] = std::log(samples[i].second);
  }
  const Vec coef = A.colPivHouseholderQr().solve(b);
  PowerLawFit out;
  out.exponent = coef[0];
  out.intercept = coef[1];
  out.residual = (A * coef - b).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace substrat
