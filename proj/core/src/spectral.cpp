#include "substrat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "substrat/error.hpp"

namespace substrat {

SpectralDecomposition decompose(const Mat& J, double cluster_tol) {
  if (!(cluster_tol > 0.0)) fail(ErrorKind::InvalidInput, "cluster_tol must be positive");
  const int n = static_cast<int>(J.rows());
  SpectralDecomposition sd;
  sd.kernel_projection = Mat::Zero(n, n);
  sd.min_relative_gap = std::numeric_limits<double>::infinity();

  // Singular values of J are the b_j (each twice) with error eps*|J|; going
  // through -J^2 would put the kernel at sqrt(eps)*|J|.
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = svd.singularValues()[i];
  const Mat& V = svd.matrixV();
  auto column = [&](int i) { return V.col(i); };

  const double top = n ? b[0] : 0.0;
  if (!(top > 0.0)) {
    sd.kernel_projection = Mat::Identity(n, n);
    sd.kernel_rank = n;
    return sd;
  }
  const double tol = cluster_tol * top;
  std::vector<double> cluster_means;
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && b[j - 1] - b[j] <= tol) ++j;
    double mean = 0.0;
    for (int k = i; k < j; ++k) mean += b[k];
    mean /= (j - i);
    Mat P = Mat::Zero(n, n);
    for (int k = i; k < j; ++k) P += column(k) * column(k).transpose();
    if (b[j - 1] <= tol) {
      // Zero cluster.
      sd.kernel_projection = P;
      sd.kernel_rank = j - i;
      cluster_means.push_back(0.0);
    } else {
      sd.eigenvalues.push_back(mean);
      sd.max_merged_spread = std::max(sd.max_merged_spread, (b[i] - b[j - 1]) / top);
      sd.projections.push_back(P);
      sd.ranks.push_back((j - i + 1) / 2);
      cluster_means.push_back(mean);
    }
    i = j;
  }
  for (std::size_t k = 1; k < cluster_means.size(); ++k) {
    sd.min_relative_gap =
        std::min(sd.min_relative_gap, (cluster_means[k - 1] - cluster_means[k]) / top);
  }
  return sd;
}

SpectralDecomposition decompose(const StratifiedGroup& g, const DualVector& mu,
                                double cluster_tol) {
  return decompose(g.j_matrix(mu), cluster_tol);
}

int generic_eigencount(const StratifiedGroup& g, int samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorKind::InvalidInput, "samples must be >= 1");
  std::mt19937_64 rng(seed);
  int best = 0;
  for (int s = 0; s < samples; ++s) {
    const SpectralDecomposition sd = decompose(g, DualVector(random_unit(g.d2(), rng)));
    best = std::max(best, sd.M() + (sd.kernel_rank > 0 ? 1 : 0));
  }
  return best;
}

namespace {

void check_pole(Complex w) {
  const double k = std::round(w.real() / std::numbers::pi);
  if (k != 0.0 && std::abs(w - Complex(k * std::numbers::pi, 0.0)) < kPoleTol) {
    fail(ErrorKind::NearPole, "argument within tolerance of a pole at k pi");
  }
}

}  // namespace

Complex hT(Complex w) {
  check_pole(w);
  if (std::abs(w) < 1e-3) {
    const Complex w2 = w * w;
    return 1.0 - w2 * (1.0 / 3.0 + w2 * (1.0 / 45.0 + w2 * (2.0 / 945.0)));
  }
  // For large |Im w| tan saturates at +-i; w / tan w stays finite.
  return w / std::tan(w);
}

Complex hS(Complex w) {
  check_pole(w);
  if (std::abs(w) < 1e-3) {
    const Complex w2 = w * w;
    return 1.0 + w2 * (1.0 / 6.0 + w2 * (7.0 / 360.0 + w2 * (31.0 / 15120.0)));
  }
  const Complex s = std::sin(w);
  if (!std::isfinite(std::abs(s))) return Complex(0.0, 0.0);
  return w / s;
}

CMat spectral_apply(SpectralFunction which, Complex z, const SpectralDecomposition& sd) {
  const Complex I(0.0, 1.0);
  CMat out = sd.kernel_projection.cast<Complex>();
  for (int j = 0; j < sd.M(); ++j) {
    const Complex w = I * z * sd.eigenvalues[j];
    const Complex f = which == SpectralFunction::T ? hT(w) : hS(w);
    out += f * sd.projections[j].cast<Complex>();
  }
  return out;
}

CMat spectral_apply(SpectralFunction which, Complex z, const StratifiedGroup& g,
                    const DualVector& mu) {
  return spectral_apply(which, z, decompose(g, mu));
}

Complex pair_product_hS(Complex z, const SpectralDecomposition& sd) {
  const Complex I(0.0, 1.0);
  Complex out(1.0, 0.0);
  for (int j = 0; j < sd.M(); ++j) {
    const Complex f = hS(I * z * sd.eigenvalues[j]);
    for (int r = 0; r < sd.ranks[j]; ++r) out *= f;
  }
  return out;
}

Complex srdet_hS(Complex z, const SpectralDecomposition& sd) {
  if (std::abs(z.imag()) * sd.b_max() >= std::numbers::pi) {
    fail(ErrorKind::BranchRegionViolated, "|Im z| * |J| must stay below pi");
  }
  return pair_product_hS(z, sd);
}

Complex srdet_hS(Complex z, const StratifiedGroup& g, const DualVector& mu) {
  return srdet_hS(z, decompose(g, mu));
}

}  // namespace substrat
