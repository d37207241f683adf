#include <gtest/gtest.h>

#include <random>

#include "substrat/error.hpp"
#include "substrat/group.hpp"
#include "substrat/group_io.hpp"

using namespace substrat;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidInput;
}

const char* kBuiltins[] = {"heisenberg:1", "heisenberg:2", "htype:4,3", "htype:8,7",
                           "free2step:3", "free2step:4", "rotfam:1,2"};

}  // namespace

TEST(BuildGroup, HeisenbergTensor) {
  Mat c = Mat::Zero(2, 2);
  c(0, 1) = 1.0;
  c(1, 0) = -1.0;
  const StratifiedGroup g = build_group({c});
  EXPECT_EQ(g.d1(), 2);
  EXPECT_EQ(g.d2(), 1);
}

TEST(BuildGroup, RejectsNonAntisymmetric) {
  Mat c = Mat::Zero(2, 2);
  c(0, 1) = 1.0;
  EXPECT_EQ(kind_of([&] { build_group({c}); }), ErrorKind::NotAntisymmetric);
}

TEST(BuildGroup, RejectsDependentSecondLayer) {
  Mat c = Mat::Zero(2, 2);
  c(0, 1) = 1.0;
  c(1, 0) = -1.0;
  EXPECT_EQ(kind_of([&] { build_group({c, c}); }), ErrorKind::SecondLayerDegenerate);
}

TEST(GroupDimensions, Examples) {
  auto dims = [](const char* name) { return group_dimensions(builtin_group(name)); };
  Dimensions h = dims("heisenberg:1");
  EXPECT_EQ(h.d1, 2); EXPECT_EQ(h.d2, 1); EXPECT_EQ(h.d, 3); EXPECT_EQ(h.Q, 4);
  Dimensions q = dims("htype:4,3");
  EXPECT_EQ(q.d1, 4); EXPECT_EQ(q.d2, 3); EXPECT_EQ(q.d, 7); EXPECT_EQ(q.Q, 10);
  Dimensions f = dims("free2step:3");
  EXPECT_EQ(f.d1, 3); EXPECT_EQ(f.d2, 3); EXPECT_EQ(f.d, 6); EXPECT_EQ(f.Q, 9);
}

TEST(JMatrix, HeisenbergRawCoordinate) {
  const StratifiedGroup g = heisenberg(1);
  Vec tau(1);
  tau << 1.0;
  const Mat J = g.j_matrix_raw(tau);
  EXPECT_EQ(J(0, 0), 0.0);
  EXPECT_EQ(J(0, 1), 1.0);
  EXPECT_EQ(J(1, 0), -1.0);
  EXPECT_EQ(J(1, 1), 0.0);
  // The same functional in orthonormal coordinates.
  EXPECT_NEAR((g.j_matrix(g.from_raw(tau)) - J).norm(), 0.0, 1e-15);
}

TEST(JMatrix, ZeroAndLinearity) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  for (const char* name : kBuiltins) {
    const StratifiedGroup g = builtin_group(name);
    EXPECT_EQ(g.j_matrix(DualVector::zero(g.d2())).norm(), 0.0) << name;
    Vec a(g.d2()), b(g.d2());
    for (int i = 0; i < g.d2(); ++i) {
      a[i] = n01(rng);
      b[i] = n01(rng);
    }
    const double s = 0.7, t = -1.3;
    const Mat lhs = g.j_matrix(DualVector(s * a + t * b));
    const Mat rhs = s * g.j_matrix(DualVector(a)) + t * g.j_matrix(DualVector(b));
    EXPECT_LE((lhs - rhs).norm(), 1e-13 * (1.0 + rhs.norm())) << name;
  }
}

TEST(JMatrix, InjectiveOnBasis) {
  for (const char* name : kBuiltins) {
    const StratifiedGroup g = builtin_group(name);
    Mat stacked(g.d1() * g.d1(), g.d2());
    for (int k = 0; k < g.d2(); ++k) {
      const Mat J = g.j_matrix(DualVector(Vec::Unit(g.d2(), k)));
      stacked.col(k) = J.reshaped();
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    EXPECT_GT(svd.singularValues().minCoeff(), 1e-8) << name;
    // The orthonormal basis is HS-orthonormal.
    EXPECT_LE((stacked.transpose() * stacked - Mat::Identity(g.d2(), g.d2())).norm(), 1e-12);
  }
}

TEST(DualInner, Examples) {
  const StratifiedGroup g = heisenberg(1);
  EXPECT_EQ(g.dual_inner(DualVector::zero(1), DualVector::zero(1)), 0.0);
  Vec tau(1);
  tau << 1.0;
  // tr(R^T R) for the rotation generator R.
  EXPECT_NEAR(g.dual_inner(g.from_raw(tau), g.from_raw(tau)), 2.0, 1e-14);
}

TEST(Htype, SquareIsScalar) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (const char* name : {"htype:4,3", "htype:8,7", "htype:4,1", "htype:8,5"}) {
    const StratifiedGroup g = builtin_group(name);
    for (int trial = 0; trial < 10; ++trial) {
      Vec mu(g.d2());
      for (int i = 0; i < g.d2(); ++i) mu[i] = n01(rng);
      const Mat J = g.j_matrix(DualVector(mu));
      const Mat K = -(J * J);
      const double q = K(0, 0);
      EXPECT_GT(q, 0.0);
      EXPECT_LE((K - q * Mat::Identity(g.d1(), g.d1())).cwiseAbs().maxCoeff(), 1e-12 * q)
          << name;
      // q(mu) = <mu, mu>_HS / d1.
      EXPECT_NEAR(q, g.dual_inner(DualVector(mu), DualVector(mu)) / g.d1(), 1e-12 * q);
    }
  }
}

TEST(Htype, UnsupportedDimensions) {
  EXPECT_EQ(kind_of([] { htype(6, 3); }), ErrorKind::UnsupportedDimensions);
  EXPECT_EQ(kind_of([] { htype(4, 5); }), ErrorKind::UnsupportedDimensions);
}

TEST(GroupIo, ParsesJsonAndRejectsBadInput) {
  const StratifiedGroup g =
      parse_group_json(R"({"d1": 2, "d2": 1, "c": [[[0, 1], [-1, 0]]]})");
  EXPECT_EQ(g.d1(), 2);
  EXPECT_NEAR(g.gram()(0, 0), 2.0, 1e-15);
  EXPECT_EQ(kind_of([] { parse_group_json(R"({"d1": 2, "d2": 1, "c": [[[0, 1], [0, 0]]]})"); }),
            ErrorKind::NotAntisymmetric);
  EXPECT_EQ(kind_of([] { parse_group_json("{nonsense"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { builtin_group("heisenberg"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { builtin_group("torus:3"); }), ErrorKind::InvalidInput);
}

TEST(Builtins, FreeAndRotationFamily) {
  const StratifiedGroup f = free2step(4);
  EXPECT_EQ(f.d2(), 6);
  const StratifiedGroup r = rotation_family({1.0, 2.0});
  EXPECT_EQ(r.d1(), 4);
  EXPECT_EQ(r.d2(), 1);
}
