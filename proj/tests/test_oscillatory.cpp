#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "substrat/cutoff.hpp"
#include "substrat/error.hpp"
#include "substrat/group_io.hpp"
#include "substrat/oscillatory.hpp"

using namespace substrat;

namespace {

constexpr double kPi = std::numbers::pi;
using LComplex = std::complex<long double>;

// R_0 by the defining quotient in extended precision.
Complex R0_oracle(Complex sigma, Complex z) {
  auto hTl = [](LComplex w) {
    return std::abs(w) == 0.0L ? LComplex(1.0L) : w / std::tan(w);
  };
  auto hSl = [](LComplex w) {
    return std::abs(w) == 0.0L ? LComplex(1.0L) : w / std::sin(w);
  };
  const LComplex s(sigma.real(), sigma.imag()), zz(z.real(), z.imag());
  const LComplex h = hSl(zz);
  const LComplex r = (hTl((1.0L - s) * zz) / (1.0L - s) - hTl(zz) - h * h * s) / (s * s);
  return Complex(static_cast<double>(r.real()), static_cast<double>(r.imag()));
}

Vec one(double v) {
  Vec out(1);
  out << v;
  return out;
}

}  // namespace

TEST(Cutoff, SupportCentreAndMirror) {
  CutoffSpec c;
  c.center = Vec::Zero(2);
  c.center << 0.2, -0.1;
  c.radius = 0.3;
  EXPECT_NEAR(c(c.center), std::exp(-1.0), 1e-15);
  Vec edge = c.center;
  edge[0] += 0.3;
  EXPECT_EQ(c(edge), 0.0);
  edge[0] -= 1e-3;
  EXPECT_GT(c(edge), 0.0);
  const CutoffSpec m = mirrored(c);
  EXPECT_EQ(m(-edge), c(edge));
  const CutoffSpec s = CutoffSpec::scalar(0.0, 0.5, CutoffShape::ScaledBump, 0.25);
  EXPECT_DOUBLE_EQ(s.effective_radius(), 0.125);
  EXPECT_EQ(s(0.13), 0.0);
}

TEST(Cutoff, FourierAgainstAdaptiveQuadrature) {
  const CutoffSpec chi = CutoffSpec::scalar(0.1, 0.4);
  for (double lam : {0.0, 1.0, 7.5, 60.0, -20.0}) {
    auto re = [&](double s) { return chi(s) * std::cos(s * lam); };
    auto im = [&](double s) { return -chi(s) * std::sin(s * lam); };
    boost::math::quadrature::tanh_sinh<double> ts;
    const Complex ref(ts.integrate(re, -0.3, 0.5), ts.integrate(im, -0.3, 0.5));
    const Complex got = cutoff_fourier(chi, lam);
    EXPECT_LE(std::abs(got - ref), 1e-13) << lam;
    EXPECT_LE(std::abs(multiplier_m(chi, 0.0, lam) - got), 1e-15);
    EXPECT_LE(std::abs(multiplier_m(chi, 2.0, lam) - std::exp(Complex(0, 2 * lam)) * got), 1e-14);
  }
}

TEST(AmplitudeB, Examples) {
  const StratifiedGroup g = heisenberg(1);
  EXPECT_NEAR(std::abs(amplitude_B(g, 0.0, DualVector::zero(1)) - 1.0), 0.0, 1e-15);
  const Complex b = amplitude_B(g, 0.0, DualVector(one(std::sqrt(2.0))));
  EXPECT_NEAR(b.real(), 1.0 / std::sin(1.0), 1e-14);
  EXPECT_NEAR(b.real(), 1.188395, 1e-6);
  EXPECT_NEAR(std::abs(amplitude_B(g, 0.5, DualVector::zero(1)) - 2.0), 0.0, 1e-15);
  EXPECT_THROW(amplitude_B(g, 1.0, DualVector::zero(1)), Error);
  EXPECT_THROW(amplitude_B(g, -1.0, DualVector(one(1.6 * std::sqrt(2.0)))), Error);
}

TEST(SigmaForm, Examples) {
  const StratifiedGroup g = heisenberg(1);
  Vec y(2);
  y << 0.6, -0.8;
  EXPECT_NEAR(sigma_form(g, y, DualVector::zero(1)), 1.0, 1e-15);
  EXPECT_EQ(sigma_form(g, Vec::Zero(2), DualVector(one(1.0))), 0.0);
  EXPECT_NEAR(sigma_form(g, y, DualVector(one(std::sqrt(2.0)))),
              1.0 / std::pow(std::sin(1.0), 2), 1e-14);
  EXPECT_NEAR(1.0 / std::pow(std::sin(1.0), 2), 1.412283, 1e-6);
}

TEST(RemainderR0, ExactValues) {
  EXPECT_LE(std::abs(remainder_R0(0.0, 0.0) - 1.0), 1e-12);
  EXPECT_LE(std::abs(remainder_R0(0.5, 0.0) - 2.0), 1e-12);
}

TEST(RemainderR0, TaylorIdentityAndOracle) {
  double worst = 0.0;
  for (double zr = -2.0; zr <= 2.0; zr += 0.25) {
    for (double zi = -2.0; zi <= 2.0; zi += 0.25) {
      const Complex z(zr, zi);
      if (std::abs(z) > 2.0) continue;
      const RemainderSeries R(z);
      for (double sr = -0.3; sr <= 0.3001; sr += 0.05) {
        for (double si = -0.3; si <= 0.3001; si += 0.05) {
          const Complex s(sr, si);
          if (std::abs(s) > 0.3) continue;
          const Complex lhs = hT((1.0 - s) * z) / (1.0 - s) - hT(z) - hS(z) * hS(z) * s -
                              R(s) * s * s;
          worst = std::max(worst, std::abs(lhs));
          if (std::abs(s) > 0.01) {
            const Complex ref = R0_oracle(s, z);
            EXPECT_LE(std::abs(R(s) - ref), 1e-11 * (1 + std::abs(ref)));
          }
        }
      }
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(RemainderR0, ContinuousAcrossSwitch) {
  for (Complex z : {Complex(0.3, 0.0), Complex(1.7, 0.4), Complex(0.0, 2.0)}) {
    const RemainderSeries R(z);
    const double r = R.switch_radius();
    for (double phase : {0.0, 1.1, 2.5}) {
      const Complex a = R(std::polar(r * (1 - 1e-9), phase));
      const Complex b = R(std::polar(r * (1 + 1e-9), phase));
      EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(a));
    }
  }
}

TEST(FitPowerLaw, Examples) {
  std::vector<std::pair<double, double>> sq, flat, noisy;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double t : {8.0, 16.0, 32.0, 64.0}) {
    sq.emplace_back(t, 3.0 * t * t);
    flat.emplace_back(t, 0.7);
    noisy.emplace_back(t, 2.0 * std::pow(t, -2.5) * (1 + 0.01 * u(rng)));
  }
  EXPECT_NEAR(fit_power_law(sq).exponent, 2.0, 1e-12);
  EXPECT_NEAR(fit_power_law(sq).intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(fit_power_law(flat).exponent, 0.0, 1e-12);
  EXPECT_NEAR(fit_power_law(noisy).exponent, -2.5, 0.05);
  flat[1].second = 0.0;
  EXPECT_THROW(fit_power_law(flat), Error);
}

class OmegaFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    cert = find_critical(g, 0);
    chi = choose_chi(g, cert);
    theta = choose_theta(g, cert);
  }
  OmegaValue run(double t, const Vec& v, const CutoffSpec& c, const CutoffSpec& th,
                 OmegaGrid grid = {}) {
    return omega(g, {t, cert.y0, v, c, th, grid});
  }
  StratifiedGroup g = heisenberg(1);
  CriticalPointCertificate cert;
  CutoffSpec chi, theta;
};

TEST_F(OmegaFixture, CutoffChoices) {
  EXPECT_LE(chi.effective_radius(), 0.5);
  EXPECT_EQ(chi.center.norm(), 0.0);
  const double S = sigma_form(g, cert.y0, cert.mu0);
  EXPECT_GE(std::abs(cutoff_fourier(chi, S)), 0.5 * std::abs(cutoff_fourier(chi, 0.0)));
  EXPECT_LE((theta.center - cert.mu0.coords).norm(), 1e-15);
  EXPECT_LE(theta.effective_radius(), 1.0 - cert.mu0.norm() + 1e-15);
  EXPECT_GT(theta(cert.mu0.coords), 0.0);
}

TEST_F(OmegaFixture, ZeroCutoffsGiveZero) {
  CutoffSpec zchi = chi, ztheta = theta;
  zchi.amplitude = 0.0;
  ztheta.amplitude = 0.0;
  EXPECT_EQ(run(8.0, cert.v0, zchi, theta).value, Complex(0.0));
  EXPECT_EQ(run(8.0, cert.v0, chi, ztheta).value, Complex(0.0));
  EXPECT_THROW(run(0.5, cert.v0, chi, theta), Error);
}

TEST_F(OmegaFixture, DualReflection) {
  // Phi_0 is even in mu, so (v, theta) -> (-v, theta(-.)) leaves Omega fixed.
  const Complex a = run(8.0, cert.v0, chi, theta).value;
  const Complex b = run(8.0, -cert.v0, chi, mirrored(theta)).value;
  EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a));
}

TEST_F(OmegaFixture, QuadratureConvergence) {
  for (double t : {8.0, 16.0}) {
    const OmegaValue base = run(t, cert.v0, chi, theta);
    OmegaGrid fine;
    fine.mu_nodes = 2 * base.mu_nodes;
    fine.s_nodes = 2 * base.s_nodes;
    const OmegaValue ref = run(t, cert.v0, chi, theta, fine);
    EXPECT_LE(std::abs(ref.value - base.value), std::max(base.error_estimate, 1e-13 * std::abs(ref.value)));
  }
}

TEST_F(OmegaFixture, StationaryPredictionAtCertifiedPoint) {
  const StationaryPrediction sp = stationary_prediction(g, 8.0, cert.y0, cert.v0, chi, theta, cert);
  EXPECT_LE((sp.mu_c.coords - cert.mu0.coords).norm(), 1e-8);
  EXPECT_NEAR(sp.psi, phi(g, cert.y0, cert.v0, cert.mu0), 1e-10 * (1 + std::abs(sp.psi)));
  EXPECT_GT(std::abs(sp.amplitude), 0.0);
  EXPECT_NEAR(std::abs(sp.hessian_det), cert.hessian.determinant(), 1e-6 * cert.hessian.determinant());
  // |prediction| does not depend on t.
  const StationaryPrediction sp2 = stationary_prediction(g, 32.0, cert.y0, cert.v0, chi, theta, cert);
  EXPECT_NEAR(std::abs(sp2.value), std::abs(sp.value), 1e-14);
}
