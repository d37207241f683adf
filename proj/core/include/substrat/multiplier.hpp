#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "substrat/group.hpp"
#include "substrat/linalg.hpp"
#include "substrat/spectral.hpp"

namespace substrat {

/// Compactly supported F on [0, support_bound], evaluated as 0 outside.
struct MultiplierSpec {
  std::function<Complex(double)> evaluator;
  double support_bound = 0.0;
  bool real_valued = true;
  std::string name;

  Complex operator()(double lambda) const {
    if (!(lambda >= 0.0) || lambda > support_bound || !evaluator) return Complex(0.0, 0.0);
    return evaluator(lambda);
  }

  static MultiplierSpec zero();
  /// e^{-z lambda} times a smooth cap equal to 1 on [0, 3 Kmax / 4] and
  /// vanishing from Kmax on.
  static MultiplierSpec heatcap(double z, double Kmax);
  /// Standard bump supported on [a, b], 0 <= a < b.
  static MultiplierSpec bump(double a, double b);
  /// Piecewise-linear interpolation of (lambda, value) nodes, increasing in
  /// lambda, 0 beyond the last node.
  static MultiplierSpec table(std::vector<std::pair<double, double>> nodes);
  /// "heatcap:z,Kmax", "bump:a,b" or "table:file.csv".
  static MultiplierSpec parse(std::string_view spec);
};

/// l_m^{(k)}(t) = 2^{k+1} (-1)^m e^{-t} L_m^{(k)}(2t).
double laguerre_ell(int m, int k, double t);
/// l_0^{(k)}(t) .. l_n^{(k)}(t).
std::vector<double> laguerre_ell_all(int n, int k, double t);

struct KernelFtOptions {
  double cluster_tol = kDefaultClusterTol;
  /// Reject mu whose eigenvalue clusters lie within 10 cluster_tol instead
  /// of merging them.
  bool strict = false;
};

/// Fourier transform in both layers of the convolution kernel of F(L):
/// sum over n in N^M of F(sum_j (2 n_j + r_j) b_j + |P_0 xi|^2)
/// prod_j l_{n_j}^{(r_j - 1)}(|P_j xi|^2 / b_j). Throws NonGenericMu.
Complex kernel_ft(const StratifiedGroup& g, const MultiplierSpec& F, const Vec& xi,
                  const DualVector& mu, const KernelFtOptions& opts = {});
Complex kernel_ft(const SpectralDecomposition& sd, const MultiplierSpec& F, const Vec& xi);

/// Lattice over the box [-Lx, Lx)^{d1} x [-Lu, Lu)^{d2} with nx / nu points
/// per axis (even).
struct KernelGrid {
  int nx = 32;
  int nu = 64;
  double Lx = 10.0;
  double Lu = 10.0;
  /// Compare against the lattice with doubled point counts; the relative
  /// change of the l1 norm must stay below `tolerance`.
  bool self_check = true;
  double tolerance = 0.02;
};

struct KernelLattice {
  int d1 = 0;
  int d2 = 0;
  int nx = 0;
  int nu = 0;
  double dx = 0.0;
  double du = 0.0;
  double Lx = 0.0;
  double Lu = 0.0;
  /// Row-major, first-layer axes first; index (i_1, ..., i_d).
  std::vector<Complex> values;
  /// sum |K| dx^{d1} du^{d2}.
  double l1_norm = 0.0;
  /// Relative l1 change against the refined lattice (0 if not computed).
  double self_convergence = 0.0;
  /// max |Im K| / max |K|.
  double imag_ratio = 0.0;

  /// Coordinates of a multi-index.
  void point(const std::vector<int>& index, Vec& x, Vec& u) const;
  Complex at(const std::vector<int>& index) const;
};

/// Inverse FFT of kernel_ft sampled on the dual lattice. Throws GridTooCoarse.
KernelLattice kernel_space(const StratifiedGroup& g, const MultiplierSpec& F,
                           const KernelGrid& grid = {});

/// D(mu) = prod_j b_j^2 prod_{i<j} (b_i^2 - b_j^2)^2 over the distinct
/// eigenvalues of the generic pattern; 0 where the pattern degenerates.
double eigen_symmetric_poly(const StratifiedGroup& g, const DualVector& mu);

/// Homogeneity degree of D: 2 M + 2 M (M - 1) for M generic distinct
/// nonzero eigenvalues.
int eigen_poly_degree(const StratifiedGroup& g);

/// Degree of the square-free part of D. Throws DegreeInconsistent.
int homogeneity_degree(const StratifiedGroup& g, std::uint64_t seed = 0);

struct LemmaSample {
  /// max |mu| |d b_j / b_j| H~(mu) over the draw.
  double C_b = 0.0;
  /// max |mu| |d P_j| H~(mu) over the draw.
  double C_P = 0.0;
  int samples = 0;
};

struct ThresholdReport {
  int h = 0;
  int h0 = 0;
  double bound = 0.0;
  double half_Q = 0.0;
  int degree_D = 0;
  LemmaSample draw_a;
  LemmaSample draw_b;
  /// Both constants finite and within a factor 2 between the draws
  /// (values below 1e-6 count as zero).
  bool constants_stable = false;
};

ThresholdReport threshold_report(const StratifiedGroup& g, std::optional<int> h = std::nullopt,
                                 std::uint64_t seed = 0, int samples = 200);

}  // namespace substrat
