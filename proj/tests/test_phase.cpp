#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "substrat/error.hpp"
#include "substrat/group_io.hpp"
#include "substrat/phase.hpp"

using namespace substrat;

namespace {

// g(b) = 1 - b cot b and its derivatives, closed forms.
double g0(double b) { return 1.0 - b / std::tan(b); }
double g1(double b) { return -1.0 / std::tan(b) + b / std::pow(std::sin(b), 2); }
double g2(double b) {
  return 2.0 / std::pow(std::sin(b), 2) - 2.0 * b * std::cos(b) / std::pow(std::sin(b), 3);
}

// Phi_0 = |y|^2 g(c |mu|) for groups with J_mu^2 = -c^2 |mu|^2 I; Hessian in mu.
Mat radial_hessian(double y2, double c, const Vec& mu) {
  const double r = mu.norm();
  const Vec n = mu / r;
  const int k = static_cast<int>(mu.size());
  const Mat nn = n * n.transpose();
  return y2 * (c * c * g2(c * r) * nn + c * g1(c * r) / r * (Mat::Identity(k, k) - nn));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

const char* kCorpus[] = {"heisenberg:1", "htype:4,3", "free2step:3", "rotfam:1,2"};

}  // namespace

TEST(OneMinusHT, SeriesAndClosedFormAgree) {
  for (double b : {1e-6, 0.1, 0.49, 0.51, 1.0, 2.0, 3.0}) {
    EXPECT_NEAR(one_minus_hT(b), g0(b), 1e-14 * (1 + std::abs(g0(b))));
    EXPECT_NEAR(one_minus_hT(-b), g0(b), 1e-14 * (1 + std::abs(g0(b))));
  }
}

TEST(Phi0, Examples) {
  const StratifiedGroup g = builtin_group("free2step:3");
  Vec y(3);
  y << 0.3, -1.0, 2.0;
  EXPECT_EQ(phi0(g, y, DualVector::zero(3)), 0.0);
  Vec m(3);
  m << 0.4, -0.2, 0.9;
  const SpectralDecomposition sd = decompose(g, DualVector(m));
  const Vec k = sd.kernel_projection * y;
  EXPECT_NEAR(phi0(g, k, DualVector(m)), 0.0, 1e-15);
  EXPECT_NEAR(phi0(g, k, DualVector(m), Phi0Method::Series), 0.0, 1e-15);
}

TEST(Phi, Examples) {
  const StratifiedGroup g = builtin_group("htype:4,3");
  Vec y(4), v(3), m(3);
  y << 1.0, 0.5, -0.5, 2.0;
  v << 0.2, -0.1, 0.7;
  m << 0.3, 0.4, -0.2;
  EXPECT_NEAR(phi(g, Vec::Zero(4), v, DualVector(m)), m.dot(v), 1e-15);
  EXPECT_NEAR(phi(g, y, v, DualVector::zero(3)), -y.squaredNorm(), 1e-15);
}

TEST(Phi0, SpectralAgainstDenseAndSeries) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const char* name : {"heisenberg:1", "htype:4,3", "htype:8,7", "rotfam:1,2"}) {
    const StratifiedGroup g = builtin_group(name);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec dir = random_unit(g.d2(), rng);
      const DualVector mu(dir * (0.05 + 1.9 * unit(rng)) / decompose(g, DualVector(dir)).b_max());
      const Vec y = random_unit(g.d1(), rng) * (0.2 + 2 * unit(rng));
      const double a = phi0(g, y, mu);
      const double s = phi0(g, y, mu, Phi0Method::Series, 60);
      EXPECT_LE(std::abs(a - s), 1e-10 * std::abs(s)) << name;
      if (trial < 5) {
        // Dense oracle: hT(iJ) = iJ cos(iJ) sin(iJ)^{-1}.
        const CMat M = Complex(0, 1) * g.j_matrix(mu).cast<Complex>();
        const CMat T = M * M.cos() * M.sin().inverse();
        const double ref = y.squaredNorm() - (y.cast<Complex>().dot(T * y.cast<Complex>())).real();
        EXPECT_LE(std::abs(a - ref), 1e-10 * std::abs(ref)) << name;
      }
    }
  }
}

TEST(Phi0, SeriesDiverges) {
  Vec m(1);
  m << 3.2 * std::sqrt(2.0);
  EXPECT_EQ(kind_of([&] { phi0(heisenberg(1), Vec::Ones(2), DualVector(m), Phi0Method::Series); }),
            ErrorKind::SeriesDiverges);
}

TEST(MuDerivatives, RadialClosedForms) {
  // heisenberg(1): c = 1/sqrt 2; htype(4,3): c = 1/2.
  for (auto [name, c] : {std::pair{"heisenberg:1", 1.0 / std::sqrt(2.0)}, {"htype:4,3", 0.5}}) {
    const StratifiedGroup g = builtin_group(name);
    std::mt19937_64 rng(3);
    const Vec y = random_unit(g.d1(), rng) * 1.3;
    const Vec v = random_unit(g.d2(), rng);
    const Vec mu = random_unit(g.d2(), rng) * 0.8;
    const MuDerivatives d1 = phi_mu_derivatives(g, y, v, DualVector(mu), 1);
    const double r = mu.norm();
    const Vec grad = y.squaredNorm() * c * g1(c * r) * mu / r + v;
    EXPECT_LE((d1.gradient - grad).norm(), 1e-8 * grad.norm()) << name;
    const MuDerivatives d2 = phi_mu_derivatives(g, y, v, DualVector(mu), 2);
    const Mat H = radial_hessian(y.squaredNorm(), c, mu);
    EXPECT_LE((d2.hessian - H).norm(), 1e-6 * H.norm()) << name;
    EXPECT_LE((phi0_series_hessian(g, y, DualVector(mu)) - H).norm(), 1e-12 * H.norm()) << name;
  }
  EXPECT_THROW(phi_mu_derivatives(heisenberg(1), Vec::Ones(2), Vec::Ones(1),
                                  DualVector(Vec::Ones(1)), 3),
               Error);
}

TEST(MuDerivatives, SeriesHessianMatchesDifferences) {
  std::mt19937_64 rng(12);
  for (const char* name : kCorpus) {
    const StratifiedGroup g = builtin_group(name);
    const Vec y = random_unit(g.d1(), rng);
    const DualVector mu(random_unit(g.d2(), rng) * 0.7);
    const Mat a = phi0_series_hessian(g, y, mu);
    const Mat b = phi_mu_derivatives(g, y, Vec::Zero(g.d2()), mu, 2).hessian;
    EXPECT_LE((a - b).norm(), 1e-6 * a.norm()) << name;
  }
}

TEST(FiltrationBlocks, HtypeHasOneBlock) {
  const StratifiedGroup g = builtin_group("htype:4,3");
  std::mt19937_64 rng(1);
  const Vec S = random_unit(3, rng);
  const SpectralDecomposition sd = decompose(g, DualVector(S));
  const Vec e = anchor_vector(sd, rng);
  const FiltrationBlocks fb = filtration_blocks(g, DualVector(S), e, 0.01);
  EXPECT_EQ(fb.r, 1);
  ASSERT_EQ(fb.ranks.size(), 1u);
  EXPECT_EQ(fb.ranks[0], 3);
  Eigen::SelfAdjointEigenSolver<Mat> eig(fb.H);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(FiltrationBlocks, HessianConsistency) {
  std::mt19937_64 rng(6);
  for (const char* name : kCorpus) {
    const StratifiedGroup g = builtin_group(name);
    Vec S;
    SpectralDecomposition sd;
    do {
      S = random_unit(g.d2(), rng);
      sd = decompose(g, DualVector(S));
    } while (sd.min_relative_gap < 1e-3);
    const Vec e = anchor_vector(sd, rng);
    const double eps = 0.3;
    const FiltrationBlocks fb = filtration_blocks(g, DualVector(S), e, eps);
    // The W basis is orthonormal and spans the dual.
    EXPECT_LE((fb.basis.transpose() * fb.basis - Mat::Identity(g.d2(), g.d2())).norm(), 1e-10);
    const Mat hess = phi_mu_derivatives(g, e, Vec::Zero(g.d2()), DualVector(eps * S), 2).hessian;
    const Mat H = 0.5 * fb.basis.transpose() * hess * fb.basis;
    EXPECT_LE((fb.H - H).norm(), 1e-6 * H.norm()) << name;
  }
}

TEST(FiltrationBlocks, Errors) {
  const StratifiedGroup g = builtin_group("free2step:3");
  Vec e(3);
  e << 1.0, 1.0, 1.0;
  EXPECT_EQ(kind_of([&] { filtration_blocks(g, DualVector::zero(3), e, 0.1); }),
            ErrorKind::NonGenericDirection);
  Vec S(3);
  S << 0.3, 0.5, -0.8;
  const SpectralDecomposition sd = decompose(g, DualVector(S));
  const Vec bad = sd.projections[0] * e;  // no kernel component
  EXPECT_EQ(kind_of([&] { filtration_blocks(g, DualVector(S), bad, 0.1); }),
            ErrorKind::BadAnchorVector);
  EXPECT_EQ(kind_of([&] { filtration_blocks(g, DualVector(S), Vec::Zero(3), 0.1); }),
            ErrorKind::BadAnchorVector);
}

TEST(FindCritical, CertificatesAreValid) {
  for (const char* name : kCorpus) {
    const StratifiedGroup g = builtin_group(name);
    const CriticalPointCertificate c = find_critical(g, 0);
    const double y2 = c.y0.squaredNorm();
    EXPECT_LT(c.mu0.norm(), 1.0) << name;
    const MuDerivatives d = phi_mu_derivatives(g, c.y0, c.v0, c.mu0, 1);
    EXPECT_LE(d.gradient.norm(), 1e-8 * (1 + y2)) << name;
    EXPECT_LE(c.gradient_norm, 1e-8 * (1 + y2)) << name;
    Eigen::SelfAdjointEigenSolver<Mat> eig(c.hessian);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0) << name;
    EXPECT_NEAR(c.min_abs_eigenvalue, eig.eigenvalues().cwiseAbs().minCoeff(), 1e-15);
    EXPECT_GE(std::abs(c.hessian.determinant()),
              0.5 * std::pow(c.min_abs_eigenvalue, g.d2())) << name;
    // Reproducible for a fixed seed.
    const CriticalPointCertificate again = find_critical(g, 0);
    EXPECT_EQ((again.y0 - c.y0).norm(), 0.0);
    EXPECT_EQ((again.v0 - c.v0).norm(), 0.0);
  }
}

TEST(FindCritical, HeisenbergAndHtypeClosedForms) {
  for (auto [name, c] : {std::pair{"heisenberg:1", 1.0 / std::sqrt(2.0)}, {"htype:4,3", 0.5}}) {
    const StratifiedGroup g = builtin_group(name);
    const CriticalPointCertificate cert = find_critical(g, 0);
    const Mat H = radial_hessian(cert.y0.squaredNorm(), c, cert.mu0.coords);
    EXPECT_LE((cert.hessian - H).norm(), 1e-6 * H.norm()) << name;
  }
  // Raw coordinate tau, b = |tau|: d^2/dtau^2 of |y|^2 g(tau) -> (2/3)|y|^2 at 0.
  const StratifiedGroup g = heisenberg(1);
  const CriticalPointCertificate cert = find_critical(g, 0, {1e-3});
  const double raw = cert.hessian(0, 0) * g.gram()(0, 0);
  EXPECT_NEAR(raw, (2.0 / 3.0) * cert.y0.squaredNorm(), 1e-6 * cert.y0.squaredNorm());
}

TEST(FindCritical, InvalidGrid) {
  EXPECT_EQ(kind_of([] { find_critical(heisenberg(1), 0, {1.5}); }), ErrorKind::InvalidInput);
  const std::vector<double> grid = default_eps_grid();
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_EQ(grid.front(), 0.25);
  EXPECT_EQ(grid.back(), std::ldexp(1.0, -12));
}
