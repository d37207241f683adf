#include "substrat/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "substrat/bernoulli.hpp"
#include "substrat/error.hpp"

namespace substrat {

double one_minus_hT(double b) {
  if (std::abs(b) < 0.5) {
    const double b2 = b * b;
    double term = b2;
    double sum = 0.0;
    for (int k = 1; k <= 40; ++k) {
      const double add = bernoulli_b_value(k) * term;
      sum += add;
      if (std::abs(add) < 1e-18 * sum) break;
      term *= b2;
    }
    return sum;
  }
  return 1.0 - hT(Complex(b, 0.0)).real();
}

double phi0(const StratifiedGroup& g, const Vec& y, const DualVector& mu, Phi0Method method,
            int kmax) {
  if (y.size() != g.d1()) fail(ErrorKind::InvalidInput, "y has wrong length");
  if (method == Phi0Method::Spectral) {
    const SpectralDecomposition sd = decompose(g, mu);
    double out = 0.0;
    for (int j = 0; j < sd.M(); ++j) {
      out += one_minus_hT(sd.eigenvalues[j]) * (sd.projections[j] * y).squaredNorm();
    }
    return out;
  }
  const Mat J = g.j_matrix(mu);
  if (decompose(J).b_max() >= std::numbers::pi) {
    fail(ErrorKind::SeriesDiverges, "power series for Phi_0 needs |J_mu| < pi");
  }
  Vec w = y;
  double out = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    w = J * w;
    out += bernoulli_b_value(k) * w.squaredNorm();
  }
  return out;
}

double phi(const StratifiedGroup& g, const Vec& y, const Vec& v, const DualVector& mu) {
  if (v.size() != g.d2()) fail(ErrorKind::InvalidInput, "v has wrong length");
  return -y.squaredNorm() + phi0(g, y, mu) + mu.coords.dot(v);
}

namespace {

Vec gradient_fd(const StratifiedGroup& g, const Vec& y, const Vec& mu, double h) {
  const int n = static_cast<int>(mu.size());
  Vec out(n);
  for (int k = 0; k < n; ++k) {
    Vec p = mu, m = mu;
    p[k] += h;
    m[k] -= h;
    out[k] = (phi0(g, y, DualVector(p)) - phi0(g, y, DualVector(m))) / (2.0 * h);
  }
  return out;
}

Mat hessian_fd(const StratifiedGroup& g, const Vec& y, const Vec& mu, double h) {
  const int n = static_cast<int>(mu.size());
  auto f = [&](const Vec& x) { return phi0(g, y, DualVector(x)); };
  const double f0 = f(mu);
  Mat out(n, n);
  for (int k = 0; k < n; ++k) {
    Vec p = mu, m = mu;
    p[k] += h;
    m[k] -= h;
    out(k, k) = (f(p) - 2.0 * f0 + f(m)) / (h * h);
    for (int l = k + 1; l < n; ++l) {
      Vec pp = mu, pm = mu, mp = mu, mm = mu;
      pp[k] += h, pp[l] += h;
      pm[k] += h, pm[l] -= h;
      mp[k] -= h, mp[l] += h;
      mm[k] -= h, mm[l] -= h;
      out(k, l) = out(l, k) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return out;
}

}  // namespace

MuDerivatives phi_mu_derivatives(const StratifiedGroup& g, const Vec& y, const Vec& v,
                                 const DualVector& mu, int order) {
  if (order != 1 && order != 2) fail(ErrorKind::InvalidInput, "order must be 1 or 2");
  if (v.size() != g.d2() || mu.size() != g.d2()) {
    fail(ErrorKind::InvalidInput, "v or mu has wrong length");
  }
  const double h = 1e-4 * (1.0 + mu.norm());
  MuDerivatives out;
  if (order == 1) {
    const Vec coarse = gradient_fd(g, y, mu.coords, h);
    const Vec fine = gradient_fd(g, y, mu.coords, 0.5 * h);
    out.gradient = (4.0 * fine - coarse) / 3.0 + v;
    out.discrepancy = (fine - coarse).cwiseAbs().maxCoeff();
  } else {
    const Mat coarse = hessian_fd(g, y, mu.coords, h);
    const Mat fine = hessian_fd(g, y, mu.coords, 0.5 * h);
    out.hessian = (4.0 * fine - coarse) / 3.0;
    out.discrepancy = (fine - coarse).cwiseAbs().maxCoeff();
  }
  return out;
}

Mat phi0_series_hessian(const StratifiedGroup& g, const Vec& y, const DualVector& mu,
                        int kmax) {
  const Mat J = g.j_matrix(mu);
  const double norm = decompose(J).b_max();
  if (norm >= std::numbers::pi) {
    fail(ErrorKind::SeriesDiverges, "power series for Phi_0 needs |J_mu| < pi");
  }
  const int n = g.d2();
  const std::vector<Mat>& A = g.basis();
  Vec w0 = y;
  std::vector<Vec> wa(n, Vec::Zero(y.size()));
  std::vector<std::vector<Vec>> wab(n, std::vector<Vec>(n, Vec::Zero(y.size())));
  Mat H = Mat::Zero(n, n);
  int quiet = 0;
  for (int k = 1; k <= kmax; ++k) {
    std::vector<std::vector<Vec>> next_ab(n, std::vector<Vec>(n));
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        next_ab[a][b] = J * wab[a][b] + A[a] * wa[b] + A[b] * wa[a];
      }
    }
    std::vector<Vec> next_a(n);
    for (int a = 0; a < n; ++a) next_a[a] = J * wa[a] + A[a] * w0;
    w0 = J * w0;
    wa = std::move(next_a);
    const double bk = bernoulli_b_value(k);
    Mat term(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        wab[a][b] = next_ab[a][b];
        term(a, b) = term(b, a) = 2.0 * bk * (wa[a].dot(wa[b]) + w0.dot(wab[a][b]));
      }
    }
    H += term;
    const double size = term.cwiseAbs().maxCoeff();
    quiet = (size <= 1e-19 * H.cwiseAbs().maxCoeff()) ? quiet + 1 : 0;
    if (quiet >= 3) break;
  }
  return H;
}

namespace {

// Orthonormal basis of the null space of A (columns), rank decided by
// singular values relative to the largest.
Mat null_space(const Mat& A, double tol) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double top = s.size() ? s[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) rank += s[i] > tol * top;
  return svd.matrixV().rightCols(n - rank);
}

// Orthonormal basis of span(A); A has orthonormal-ish columns.
Mat range_basis(const Mat& A, int rank) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(rank);
}

int generic_reference(const StratifiedGroup& g) {
  return generic_eigencount(g, 64, 0x9e3779b97f4a7c15ULL);
}

}  // namespace

FiltrationBlocks filtration_blocks(const StratifiedGroup& g, const DualVector& S_mu,
                                   const Vec& e, double eps) {
  if (S_mu.size() != g.d2() || e.size() != g.d1()) {
    fail(ErrorKind::InvalidInput, "S or e has wrong length");
  }
  const SpectralDecomposition sd = decompose(g, S_mu);
  const int distinct = sd.M() + (sd.kernel_rank > 0 ? 1 : 0);
  if (sd.M() == 0 || distinct < generic_reference(g) || sd.min_relative_gap < 1e-6) {
    fail(ErrorKind::NonGenericDirection, "S does not attain the generic eigenvalue count");
  }
  const double enorm = e.norm();
  double min_proj = std::numeric_limits<double>::infinity();
  for (const Mat& P : sd.projections) min_proj = std::min(min_proj, (P * e).norm());
  if (sd.kernel_rank > 0) min_proj = std::min(min_proj, (sd.kernel_projection * e).norm());
  if (!(enorm > 0.0) || min_proj <= 1e-6 * enorm) {
    fail(ErrorKind::BadAnchorVector, "e has a vanishing eigenspace projection");
  }

  const int d2 = g.d2();
  const Mat S = g.j_matrix(S_mu);
  const double snorm = sd.b_max();
  const int bound = 2 * distinct;

  FiltrationBlocks out;
  Mat stacked(0, d2);
  Mat V = Mat::Identity(d2, d2);
  Vec Sle = e;  // S^l e
  std::vector<Vec> powers;  // S^l e for l < r
  int j = 0;
  while (V.cols() > 0) {
    if (j >= bound) {
      fail(ErrorKind::FiltrationNotTerminating,
           "filtration exceeds the minimal-polynomial bound " + std::to_string(bound));
    }
    powers.push_back(Sle);
    Mat L(g.d1(), d2);
    const double scale = std::pow(snorm, j) * enorm;
    for (int a = 0; a < d2; ++a) L.col(a) = g.basis()[a] * Sle / scale;
    Mat grown(stacked.rows() + L.rows(), d2);
    grown << stacked, L;
    stacked = grown;
    const Mat next = null_space(stacked, 1e-9);
    // W_j: part of V_j orthogonal to V_{j+1}.
    const Mat residual = V - next * (next.transpose() * V);
    const int rank = static_cast<int>(V.cols() - next.cols());
    out.W.push_back(range_basis(residual, rank));
    out.ranks.push_back(rank);
    V = next;
    Sle = S * Sle;
    ++j;
  }
  out.r = j;

  out.basis.resize(d2, d2);
  int col = 0;
  out.scaling.resize(d2);
  for (int b = 0; b < out.r; ++b) {
    const double sign = ((b / 2) % 2 == 0) ? 1.0 : -1.0;
    for (int c = 0; c < out.W[b].cols(); ++c, ++col) {
      out.basis.col(col) = out.W[b].col(c);
      out.block_of.push_back(b);
      out.scaling[col] = sign * std::pow(eps, b);
    }
  }

  const DualVector at(eps * S_mu.coords);
  Mat hess;
  if (decompose(g, at).b_max() < 2.5) {
    hess = phi0_series_hessian(g, e, at);
  } else {
    hess = phi_mu_derivatives(g, e, Vec::Zero(d2), at, 2).hessian;
  }
  out.H = 0.5 * out.basis.transpose() * hess * out.basis;

  out.predicted_leading = Mat::Zero(d2, d2);
  auto J_of = [&](const Vec& coeffs) {
    Mat T = Mat::Zero(g.d1(), g.d1());
    for (int a = 0; a < d2; ++a) T += coeffs[a] * g.basis()[a];
    return T;
  };
  for (int p = 0; p < d2; ++p) {
    for (int q = 0; q < d2; ++q) {
      const int bi = out.block_of[p], bj = out.block_of[q];
      if ((bi + bj) % 2 != 0) continue;
      const double sign = ((std::abs(bi - bj) / 2) % 2 == 0) ? 1.0 : -1.0;
      const Vec left = J_of(out.basis.col(p)) * powers[bi];
      const Vec right = J_of(out.basis.col(q)) * powers[bj];
      out.predicted_leading(p, q) =
          sign * bernoulli_b_value(1 + (bi + bj) / 2) * left.dot(right);
    }
  }
  return out;
}

std::vector<double> default_eps_grid() {
  std::vector<double> out;
  for (int k = 2; k <= 12; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

CriticalPointCertificate find_critical(const StratifiedGroup& g, std::uint64_t seed,
                                       const std::vector<double>& eps_grid) {
  const std::vector<double> grid = eps_grid.empty() ? default_eps_grid() : eps_grid;
  for (double eps : grid) {
    if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::InvalidInput, "eps values must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  const int generic = generic_reference(g);
  const int d2 = g.d2();

  CriticalPointCertificate cert;
  SpectralDecomposition sd;
  Vec S;
  int attempts = 0;
  for (;;) {
    if (++attempts > 100) fail(ErrorKind::SearchFailed, "no generic direction found");
    S = random_unit(d2, rng);
    sd = decompose(g, DualVector(S));
    const int distinct = sd.M() + (sd.kernel_rank > 0 ? 1 : 0);
    if (sd.M() > 0 && distinct >= generic && sd.min_relative_gap > 1e-6) break;
  }
  const Vec e = anchor_vector(sd, rng);
  const FiltrationBlocks blocks = filtration_blocks(g, DualVector(S), e, grid.front());

  // |S| = 1, so |J_{eps S}| <= 1 and every eps in (0, 1) keeps mu_0 in the
  // unit ball and away from the first pole at pi.
  const double e2 = e.squaredNorm();
  double best = -std::numeric_limits<double>::infinity();
  for (double eps : grid) {
    const DualVector mu0(eps * S);
    const MuDerivatives hess = phi_mu_derivatives(g, e, Vec::Zero(d2), mu0, 2);
    Eigen::SelfAdjointEigenSolver<Mat> eig(hess.hessian);
    const double lo = eig.eigenvalues().minCoeff();
    best = std::max(best, lo / e2);
    if (lo > std::max(1e-6 * e2, 100.0 * hess.discrepancy)) {
      cert.y0 = e;
      cert.v0 = -phi_mu_derivatives(g, e, Vec::Zero(d2), mu0, 1).gradient;
      cert.mu0 = mu0;
      cert.hessian = hess.hessian;
      cert.hessian_eigenvalues = eig.eigenvalues();
      cert.min_abs_eigenvalue = eig.eigenvalues().cwiseAbs().minCoeff();
      cert.margin = lo / e2;
      cert.gradient_norm = phi_mu_derivatives(g, e, cert.v0, mu0, 1).gradient.norm();
      cert.epsilon_used = eps;
      cert.S_direction = DualVector(S);
      cert.filtration_ranks = blocks.ranks;
      cert.direction_attempts = attempts;
      return cert;
    }
  }
  std::ostringstream msg;
  msg.precision(6);
  msg << "no eps in the grid gives a positive definite Hessian; best margin " << best;
  fail(ErrorKind::SearchFailed, msg.str());
}

}  // namespace substrat
