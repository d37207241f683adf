#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "substrat/error.hpp"
#include "substrat/group_io.hpp"
#include "substrat/mehler.hpp"

using namespace substrat;

namespace {

constexpr double kPi = std::numbers::pi;

// Heisenberg(1) in the orthonormal coordinate: b = |mu| / sqrt 2.
double heisenberg_oracle(double t, double x2, double u) {
  auto f = [&](double mu) {
    const double b = t * mu / std::sqrt(2.0);
    const double s = b < 1e-8 ? 1.0 : b / std::sinh(b);
    const double c = b < 1e-8 ? 1.0 : b / std::tanh(b);
    return s * std::exp(-c * x2 / (4 * t)) * std::cos(mu * u);
  };
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
  return 2.0 * I / (2 * kPi) / (4 * kPi * t);
}

}  // namespace

TEST(HeatPartialFt, ReducesToEuclideanAtZero) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> re(0.1, 5.0), im(-3.0, 3.0), co(-2.0, 2.0);
  for (const char* name : {"heisenberg:1", "htype:4,3", "free2step:3"}) {
    const StratifiedGroup g = builtin_group(name);
    for (int trial = 0; trial < 20; ++trial) {
      const Complex z(re(rng), im(rng));
      Vec x(g.d1());
      for (int i = 0; i < g.d1(); ++i) x[i] = co(rng);
      const Complex a = heat_partial_ft(g, {z, DualVector::zero(g.d2()), x});
      const Complex b = std::pow(4 * kPi * z, -0.5 * g.d1()) * std::exp(-x.squaredNorm() / (4.0 * z));
      EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(b)) << name;
    }
  }
}

TEST(HeatPartialFt, HeisenbergValue) {
  const StratifiedGroup g = heisenberg(1);
  Vec m(1);
  m << std::sqrt(2.0);
  const Complex v = heat_partial_ft(g, {1.0, DualVector(m), Vec::Zero(2)});
  EXPECT_NEAR(v.real(), 1.0 / (4 * kPi) / std::sinh(1.0), 1e-15);
  EXPECT_NEAR(v.real(), 0.0677139, 1e-6);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(HeatPartialFt, GaussianHessian) {
  std::mt19937_64 rng(8);
  for (const char* name : {"heisenberg:1", "htype:4,3", "free2step:3", "rotfam:1,2"}) {
    const StratifiedGroup g = builtin_group(name);
    const DualVector mu(random_unit(g.d2(), rng) * 0.9);
    const Complex z(0.7, 0.3);
    const int n = g.d1();
    const double h = 1e-3;
    auto p = [&](const Vec& x) { return heat_partial_ft(g, {z, mu, x}); };
    const Complex p0 = p(Vec::Zero(n));
    const CMat expected = -spectral_apply(SpectralFunction::T, z, g, mu) / (2.0 * z);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Vec ei = h * Vec::Unit(n, i), ej = h * Vec::Unit(n, j);
        const Complex d2 = (p(ei + ej) - p(ei - ej) - p(ej - ei) + p(-ei - ej)) / (4 * h * h);
        EXPECT_LE(std::abs(d2 / p0 - expected(i, j)), 1e-6) << name;
      }
    }
  }
}

TEST(HeatPartialFt, ConjugateSymmetryAndErrors) {
  const StratifiedGroup g = builtin_group("htype:4,3");
  Vec x(4);
  x << 0.3, -0.2, 0.5, 1.0;
  Vec m(3);
  m << 0.4, 0.1, -0.7;
  const Complex z(1.2, 0.8);
  const Complex a = heat_partial_ft(g, {z, DualVector(m), x});
  const Complex b = heat_partial_ft(g, {std::conj(z), DualVector(m), x});
  EXPECT_LE(std::abs(a - std::conj(b)), 1e-15 * std::abs(a));
  EXPECT_THROW(heat_partial_ft(g, {Complex(0.0, 1.0), DualVector(m), x}), Error);
  EXPECT_THROW(heat_partial_ft(g, {Complex(1.0, 40.0), DualVector(m), x}), Error);
}

TEST(HeatSpace, HeisenbergOrigin) {
  const HeatValue v = heat_space(heisenberg(1), 1.0, Vec::Zero(2), Vec::Zero(1));
  // int b / sinh b = pi^2 / 2 gives sqrt 2 / 16.
  EXPECT_NEAR(v.value.real(), std::sqrt(2.0) / 16.0, 1e-10);
  EXPECT_FALSE(v.flagged);
}

TEST(HeatSpace, HeisenbergAgainstAdaptiveQuadrature) {
  const StratifiedGroup g = heisenberg(1);
  for (double t : {0.5, 1.0, 2.0}) {
    for (auto [x1, u] : {std::pair{0.0, 0.7}, {0.8, 0.0}, {1.5, -2.0}}) {
      Vec x(2);
      x << x1, 0.4;
      Vec uu(1);
      uu << u;
      const HeatValue v = heat_space(g, t, x, uu);
      const double ref = heisenberg_oracle(t, x.squaredNorm(), u);
      EXPECT_LE(std::abs(v.value - ref), 1e-9 * std::abs(ref)) << t << " " << x1 << " " << u;
      EXPECT_LE(std::abs(v.value.imag()), 1e-15);
    }
  }
}

TEST(HeatSpace, DilationCovariance) {
  const StratifiedGroup g = heisenberg(1);
  const int Q = g.dimensions().Q;
  Vec x(2);
  x << 0.6, -0.3;
  Vec u(1);
  u << 0.9;
  for (double t : {0.25, 3.0}) {
    const Complex a = heat_space(g, t, x, u).value;
    const Complex b = std::pow(t, -0.5 * Q) * heat_space(g, 1.0, x / std::sqrt(t), u / t).value;
    EXPECT_LE(std::abs(a - b), 1e-8 * std::abs(b));
  }
}

TEST(HeatSpace, ComplexTimeConjugationAndFlags) {
  const StratifiedGroup g = heisenberg(1);
  Vec x(2);
  x << 0.5, 0.0;
  Vec u(1);
  u << 0.4;
  const HeatValue a = heat_space(g, Complex(1.0, 0.3), x, u);
  const HeatValue b = heat_space(g, Complex(1.0, -0.3), x, u);
  EXPECT_LE(std::abs(a.value - std::conj(b.value)), 1e-10 * std::abs(a.value));
  const HeatValue c = heat_space(g, Complex(0.02, 1.0), x, u, {0, 0, 16, -1.0});
  EXPECT_TRUE(c.flagged);
  EXPECT_FALSE(c.note.empty());
  EXPECT_THROW(heat_space(g, Complex(-1.0, 0.0), x, u), Error);
}

TEST(HeatSpace, HigherDimensionalSecondLayer) {
  // htype(4, d2) has b = |mu| / 2 of multiplicity 2, so the mu-integral is
  // radial: a 1-D oracle over spheres.
  for (int d2 : {2, 3}) {
    const StratifiedGroup g = htype(4, d2);
    const HeatValue v = heat_space(g, 1.0, Vec::Zero(4), Vec::Zero(d2));
    auto f = [d2](double r) {
      const double b = r / 2.0;
      const double s = b < 1e-8 ? 1.0 : b / std::sinh(b);
      const double shell = d2 == 2 ? 2 * kPi * r : 4 * kPi * r * r;
      return shell * s * s;
    };
    const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
    const double ref = I / std::pow(2 * kPi, d2) / std::pow(4 * kPi, 2);
    EXPECT_LE(std::abs(v.value - ref), 1e-8 * ref) << d2;
  }
}
