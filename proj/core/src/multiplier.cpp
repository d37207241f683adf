#include "substrat/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <fftw3.h>

#include "substrat/error.hpp"
#include "substrat/parallel.hpp"

namespace substrat {

namespace {

// Smooth step: 1 for x <= 0, 0 for x >= 1.
double smooth_step_down(double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - x));
  const double b = std::exp(-1.0 / x);
  return a / (a + b);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    fail(ErrorKind::InvalidInput, "expected a finite number, got '" + s + "'");
  }
  return v;
}

}  // namespace

MultiplierSpec MultiplierSpec::zero() {
  MultiplierSpec F;
  F.evaluator = [](double) { return Complex(0.0, 0.0); };
  F.support_bound = 0.0;
  F.name = "zero";
  return F;
}

MultiplierSpec MultiplierSpec::heatcap(double z, double Kmax) {
  if (!(Kmax > 0.0) || !std::isfinite(z)) fail(ErrorKind::InvalidInput, "heatcap needs Kmax > 0");
  MultiplierSpec F;
  F.support_bound = Kmax;
  F.evaluator = [z, Kmax](double lambda) {
    const double cap = smooth_step_down((lambda - 0.75 * Kmax) / (0.25 * Kmax));
    return Complex(std::exp(-z * lambda) * cap, 0.0);
  };
  std::ostringstream name;
  name.precision(17);
  name << "heatcap:" << z << "," << Kmax;
  F.name = name.str();
  return F;
}

MultiplierSpec MultiplierSpec::bump(double a, double b) {
  if (!(a >= 0.0 && b > a)) fail(ErrorKind::InvalidInput, "bump needs 0 <= a < b");
  MultiplierSpec F;
  F.support_bound = b;
  F.evaluator = [a, b](double lambda) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    const double q = (lambda - c) / r;
    return Complex(q * q < 1.0 ? std::exp(-1.0 / (1.0 - q * q)) : 0.0, 0.0);
  };
  std::ostringstream name;
  name.precision(17);
  name << "bump:" << a << "," << b;
  F.name = name.str();
  return F;
}

MultiplierSpec MultiplierSpec::table(std::vector<std::pair<double, double>> nodes) {
  if (nodes.size() < 2) fail(ErrorKind::InvalidInput, "table needs at least two nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].first) || !std::isfinite(nodes[i].second)) {
      fail(ErrorKind::InvalidInput, "table entries must be finite");
    }
    if (i > 0 && !(nodes[i].first > nodes[i - 1].first)) {
      fail(ErrorKind::InvalidInput, "table abscissae must increase");
    }
  }
  if (nodes.front().first < 0.0) fail(ErrorKind::InvalidInput, "table must start at lambda >= 0");
  MultiplierSpec F;
  F.support_bound = nodes.back().first;
  F.evaluator = [nodes = std::move(nodes)](double lambda) {
    if (lambda < nodes.front().first) return Complex(0.0, 0.0);
    auto it = std::upper_bound(nodes.begin(), nodes.end(), lambda,
                               [](double l, const auto& p) { return l < p.first; });
    if (it == nodes.end()) return Complex(nodes.back().second, 0.0);
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (lambda - lo.first) / (hi.first - lo.first);
    return Complex((1.0 - w) * lo.second + w * hi.second, 0.0);
  };
  F.name = "table";
  return F;
}

MultiplierSpec MultiplierSpec::parse(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) fail(ErrorKind::InvalidInput, "F needs name:params");
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);
  if (kind == "heatcap" || kind == "bump") {
    const auto args = split(rest, ',');
    if (args.size() != 2) fail(ErrorKind::InvalidInput, std::string(kind) + " needs two parameters");
    return kind == "heatcap" ? heatcap(number(args[0]), number(args[1]))
                             : bump(number(args[0]), number(args[1]));
  }
  if (kind == "table") {
    std::ifstream in{std::string(rest)};
    if (!in) fail(ErrorKind::InvalidInput, "cannot open table '" + std::string(rest) + "'");
    std::vector<std::pair<double, double>> nodes;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto cols = split(line, ',');
      if (cols.size() != 2) fail(ErrorKind::InvalidInput, "table rows need lambda,value");
      // Tolerate a header row.
      if (nodes.empty() && (cols[0].empty() || std::isalpha(static_cast<unsigned char>(cols[0][0])))) {
        continue;
      }
      nodes.emplace_back(number(cols[0]), number(cols[1]));
    }
    MultiplierSpec F = table(std::move(nodes));
    F.name = std::string(spec);
    return F;
  }
  fail(ErrorKind::InvalidInput, "unknown multiplier family '" + std::string(kind) + "'");
}

std::vector<double> laguerre_ell_all(int n, int k, double t) {
  if (n < 0 || k < 0 || t < 0.0) fail(ErrorKind::InvalidInput, "laguerre_ell needs m, k, t >= 0");
  // q_m = (-1)^m e^{-t} L_m^{(k)}(2t) satisfies the sign-flipped recurrence.
  // It runs on e^{t} q_m with a rescaled exponent so e^{-t} cannot underflow.
  const double x = 2.0 * t;
  const double scale = std::ldexp(1.0, k + 1);
  std::vector<double> out(n + 1);
  double prev = 0.0;
  double cur = 1.0;
  double log_shift = -t;
  out[0] = scale * std::exp(log_shift);
  for (int m = 0; m < n; ++m) {
    double next = (-(2.0 * m + 1.0 + k - x) * cur - (m + k) * prev) / (m + 1.0);
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150 || (mag > 0.0 && mag < 1e-150)) {
      const double lg = std::log(mag);
      prev /= mag;
      cur /= mag;
      log_shift += lg;
    }
    out[m + 1] = scale * cur * std::exp(log_shift);
  }
  return out;
}

double laguerre_ell(int m, int k, double t) { return laguerre_ell_all(m, k, t).back(); }

Complex kernel_ft(const SpectralDecomposition& sd, const MultiplierSpec& F, const Vec& xi) {
  if (sd.M() == 0) return F(xi.squaredNorm());
  const double K = F.support_bound;
  double base = (sd.kernel_projection * xi).squaredNorm();
  for (int j = 0; j < sd.M(); ++j) base += sd.ranks[j] * sd.eigenvalues[j];
  if (base > K) return Complex(0.0, 0.0);
  // Pairs with more than kMaxLevels admissible levels are replaced by their
  // b -> 0 limit, which folds the projection into the kernel part.
  constexpr double kMaxLevels = 4e6;
  std::vector<int> active;
  for (int j = 0; j < sd.M(); ++j) {
    if ((K - base) / (2.0 * sd.eigenvalues[j]) > kMaxLevels) {
      base += (sd.projections[j] * xi).squaredNorm();
    } else {
      active.push_back(j);
    }
  }
  if (base > K) return Complex(0.0, 0.0);
  const int M = static_cast<int>(active.size());
  std::vector<std::vector<double>> ell(M);
  std::vector<double> steps(M);
  for (int a = 0; a < M; ++a) {
    const int j = active[a];
    const double b = sd.eigenvalues[j];
    const int nmax = static_cast<int>(std::floor((K - base) / (2.0 * b)));
    const double arg = (sd.projections[j] * xi).squaredNorm() / b;
    ell[a] = laguerre_ell_all(nmax, sd.ranks[j] - 1, arg);
    steps[a] = 2.0 * b;
  }
  auto rec = [&](auto&& self, int j, double energy, double weight) -> Complex {
    if (j == M) return F(energy) * weight;
    Complex acc(0.0, 0.0);
    const double step = steps[j];
    for (std::size_t n = 0; n < ell[j].size(); ++n) {
      const double e = energy + step * static_cast<double>(n);
      if (e > K) break;
      acc += self(self, j + 1, e, weight * ell[j][n]);
    }
    return acc;
  };
  return rec(rec, 0, base, 1.0);
}

namespace {

// Spread of an exact multiplicity after the SVD stays at rounding level.
constexpr double kMergeRoundoff = 1e-12;

}  // namespace

Complex kernel_ft(const StratifiedGroup& g, const MultiplierSpec& F, const Vec& xi,
                  const DualVector& mu, const KernelFtOptions& opts) {
  if (xi.size() != g.d1() || mu.size() != g.d2()) {
    fail(ErrorKind::InvalidInput, "xi or mu has wrong length");
  }
  if (mu.norm() == 0.0) return F(xi.squaredNorm());
  const SpectralDecomposition sd = decompose(g, mu, opts.cluster_tol);
  if (opts.strict && sd.min_relative_gap < 10.0 * opts.cluster_tol) {
    fail(ErrorKind::NonGenericMu, "eigenvalue clusters closer than 10 cluster_tol");
  }
  if (opts.strict && sd.max_merged_spread > kMergeRoundoff) {
    fail(ErrorKind::NonGenericMu, "distinct eigenvalues merged into one cluster");
  }
  return kernel_ft(sd, F, xi);
}

void KernelLattice::point(const std::vector<int>& index, Vec& x, Vec& u) const {
  x.resize(d1);
  u.resize(d2);
  for (int k = 0; k < d1; ++k) x[k] = -Lx + index[k] * dx;
  for (int k = 0; k < d2; ++k) u[k] = -Lu + index[d1 + k] * du;
}

Complex KernelLattice::at(const std::vector<int>& index) const {
  std::size_t flat = 0;
  for (int k = 0; k < d1 + d2; ++k) flat = flat * (k < d1 ? nx : nu) + index[k];
  return values[flat];
}

namespace {

std::mutex g_fftw_mutex;

KernelLattice synthesize(const StratifiedGroup& g, const MultiplierSpec& F, int nx, int nu,
                         double Lx, double Lu) {
  const int d1 = g.d1(), d2 = g.d2(), d = d1 + d2;
  KernelLattice out;
  out.d1 = d1;
  out.d2 = d2;
  out.nx = nx;
  out.nu = nu;
  out.Lx = Lx;
  out.Lu = Lu;
  out.dx = 2.0 * Lx / nx;
  out.du = 2.0 * Lu / nu;
  const double dxi = std::numbers::pi / Lx;
  const double dmu = std::numbers::pi / Lu;
  std::size_t nxi = 1, nmu = 1;
  for (int k = 0; k < d1; ++k) nxi *= nx;
  for (int k = 0; k < d2; ++k) nmu *= nu;
  out.values.assign(nxi * nmu, Complex(0.0, 0.0));

  // Frequency of sample m on an n-point axis is (m - n/2) * spacing; the
  // (-1)^m factor turns the centred sum into a plain DFT.
  parallel::for_each_index(nmu, [&](std::size_t jm) {
    Vec mu(d2);
    int parity = 0;
    std::size_t rest = jm;
    for (int k = d2 - 1; k >= 0; --k) {
      const int m = static_cast<int>(rest % nu);
      rest /= nu;
      mu[k] = (m - nu / 2) * dmu;
      parity += m;
    }
    const SpectralDecomposition sd = decompose(g, DualVector(mu));
    Vec xi(d1);
    for (std::size_t jx = 0; jx < nxi; ++jx) {
      int par = parity;
      std::size_t r = jx;
      for (int k = d1 - 1; k >= 0; --k) {
        const int m = static_cast<int>(r % nx);
        r /= nx;
        xi[k] = (m - nx / 2) * dxi;
        par += m;
      }
      const Complex val = mu.norm() == 0.0 ? F(xi.squaredNorm()) : kernel_ft(sd, F, xi);
      out.values[jx * nmu + jm] = (par % 2 ? -val : val);
    }
  });

  std::vector<int> dims(d);
  for (int k = 0; k < d; ++k) dims[k] = k < d1 ? nx : nu;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    auto* data = reinterpret_cast<fftw_complex*>(out.values.data());
    fftw_plan plan = fftw_plan_dft(d, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  double norm = std::pow(dxi, d1) * std::pow(dmu, d2) / std::pow(2.0 * std::numbers::pi, d);
  // Output phase: (-1)^{sum k} times (-1)^{n/2} per axis.
  int half_sum = 0;
  for (int k = 0; k < d; ++k) half_sum += dims[k] / 2;
  if (half_sum % 2) norm = -norm;
  double max_abs = 0.0, max_imag = 0.0, l1 = 0.0;
  const std::size_t total = out.values.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    int par = 0;
    std::size_t r = flat;
    for (int k = d - 1; k >= 0; --k) {
      par += static_cast<int>(r % dims[k]);
      r /= dims[k];
    }
    Complex& v = out.values[flat];
    v *= (par % 2 ? -norm : norm);
    max_abs = std::max(max_abs, std::abs(v));
    max_imag = std::max(max_imag, std::abs(v.imag()));
    l1 += std::abs(v);
  }
  out.l1_norm = l1 * std::pow(out.dx, d1) * std::pow(out.du, d2);
  out.imag_ratio = max_abs > 0.0 ? max_imag / max_abs : 0.0;
  return out;
}

}  // namespace

KernelLattice kernel_space(const StratifiedGroup& g, const MultiplierSpec& F,
                           const KernelGrid& grid) {
  if (grid.nx < 2 || grid.nu < 2 || grid.nx % 2 || grid.nu % 2) {
    fail(ErrorKind::InvalidInput, "lattice sizes must be even and >= 2");
  }
  if (!(grid.Lx > 0.0) || !(grid.Lu > 0.0)) fail(ErrorKind::InvalidInput, "box sizes must be positive");
  KernelLattice out = synthesize(g, F, grid.nx, grid.nu, grid.Lx, grid.Lu);
  if (grid.self_check) {
    const KernelLattice fine = synthesize(g, F, 2 * grid.nx, 2 * grid.nu, grid.Lx, grid.Lu);
    const double ref = std::max(fine.l1_norm, std::numeric_limits<double>::min());
    out.self_convergence = std::abs(fine.l1_norm - out.l1_norm) / ref;
    if (fine.l1_norm == 0.0 && out.l1_norm == 0.0) out.self_convergence = 0.0;
    if (out.self_convergence > grid.tolerance) {
      fail(ErrorKind::GridTooCoarse,
           "l1 norm changes by " + std::to_string(out.self_convergence) + " under refinement");
    }
  }
  return out;
}

namespace {

// Largest number of distinct nonzero eigenvalues over random directions.
int generic_nonzero_count(const StratifiedGroup& g) {
  std::mt19937_64 rng(0x2545f4914f6cdd1dULL);
  int best = 0;
  for (int s = 0; s < 32; ++s) {
    best = std::max(best, decompose(g, DualVector(random_unit(g.d2(), rng))).M());
  }
  return best;
}

double symmetric_poly(const SpectralDecomposition& sd, int generic_M) {
  if (sd.M() < generic_M || sd.M() == 0) return 0.0;
  double out = 1.0;
  for (int i = 0; i < sd.M(); ++i) {
    const double li = sd.eigenvalues[i] * sd.eigenvalues[i];
    out *= li;
    for (int j = i + 1; j < sd.M(); ++j) {
      const double diff = li - sd.eigenvalues[j] * sd.eigenvalues[j];
      out *= diff * diff;
    }
  }
  return out;
}

// Numerical rank of A relative to its largest singular value.
int numeric_rank(const Mat& A, double tol) {
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) rank += s[i] > tol * s[0];
  return rank;
}

}  // namespace

double eigen_symmetric_poly(const StratifiedGroup& g, const DualVector& mu) {
  if (mu.norm() == 0.0) return 0.0;
  return symmetric_poly(decompose(g, mu), generic_nonzero_count(g));
}

int eigen_poly_degree(const StratifiedGroup& g) {
  const int M = generic_nonzero_count(g);
  return 2 * M + 2 * M * (M - 1);
}

int homogeneity_degree(const StratifiedGroup& g, std::uint64_t seed) {
  const int M = generic_nonzero_count(g);
  const int deg = 2 * M + 2 * M * (M - 1);
  std::mt19937_64 rng(seed ^ 0x6a09e667f3bcc909ULL);

  // Homogeneity check of D itself.
  for (int trial = 0; trial < 3; ++trial) {
    const Vec mu = random_unit(g.d2(), rng);
    const SpectralDecomposition base = decompose(g, DualVector(mu));
    const double D1 = symmetric_poly(base, M);
    for (double lam : {2.0, 4.0, 8.0}) {
      const double D2 = symmetric_poly(decompose(g, DualVector(lam * mu)), M);
      const double slope = std::log(D2 / D1) / std::log(lam);
      if (!(std::abs(slope - deg) < 1e-6)) {
        fail(ErrorKind::DegreeInconsistent, "D is not homogeneous of the expected degree");
      }
    }
  }
  if (g.d2() == 1) return 1;  // D = c tau^deg, radical tau.

  int h = -1;
  const int samples = 2 * deg + 8;
  for (int line = 0; line < 10; ++line) {
    const Vec a = random_unit(g.d2(), rng);
    const Vec w = random_unit(g.d2(), rng);
    Mat V(samples, deg + 1);
    Vec vals(samples);
    for (int i = 0; i < samples; ++i) {
      const double s = std::cos(std::numbers::pi * (i + 0.5) / samples);
      double p = 1.0;
      for (int c = 0; c <= deg; ++c, p *= s) V(i, c) = p;
      vals[i] = symmetric_poly(decompose(g, DualVector(a + s * w)), M);
    }
    const Vec coef = V.colPivHouseholderQr().solve(vals);
    const double fit = (V * coef - vals).norm() / std::max(vals.norm(), 1e-300);
    if (!(fit < 1e-8)) fail(ErrorKind::DegreeInconsistent, "D is not polynomial along a line");
    int n = deg;
    const double cmax = coef.cwiseAbs().maxCoeff();
    while (n > 0 && std::abs(coef[n]) < 1e-10 * cmax) --n;
    int line_h = n;
    if (n >= 1) {
      // Sylvester matrix of p and p' in descending coefficients.
      Vec p(n + 1), dp(n);
      for (int c = 0; c <= n; ++c) p[c] = coef[n - c] / cmax;
      for (int c = 0; c < n; ++c) dp[c] = (n - c) * p[c];
      const int size = 2 * n - 1;
      Mat syl = Mat::Zero(size, size);
      for (int r = 0; r < n - 1; ++r) syl.block(r, r, 1, n + 1) = p.transpose();
      for (int r = 0; r < n; ++r) syl.block(n - 1 + r, r, 1, n) = dp.transpose();
      const int gcd_degree = size - numeric_rank(syl, 1e-8);
      line_h = n - gcd_degree;
    }
    if (h < 0) {
      h = line_h;
    } else if (h != line_h) {
      fail(ErrorKind::DegreeInconsistent, "square-free degree differs between lines");
    }
  }
  return h;
}

ThresholdReport threshold_report(const StratifiedGroup& g, std::optional<int> h,
                                 std::uint64_t seed, int samples) {
  ThresholdReport rep;
  rep.h = h ? *h : homogeneity_degree(g, seed);
  if (rep.h < 0) fail(ErrorKind::InvalidInput, "h must be >= 0");
  rep.h0 = std::max(rep.h, 1);
  const auto dims = g.dimensions();
  rep.half_Q = dims.Q / 2.0;
  rep.bound = rep.half_Q - 1.0 / (2.0 * rep.h0);
  const int M = generic_nonzero_count(g);
  rep.degree_D = 2 * M + 2 * M * (M - 1);

  auto draw = [&](std::uint64_t draw_seed) {
    std::mt19937_64 rng(draw_seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    LemmaSample out;
    int attempts = 0;
    while (out.samples < samples && attempts < 20 * samples) {
      ++attempts;
      Vec mu(g.d2());
      for (int k = 0; k < g.d2(); ++k) mu[k] = normal(rng);
      const double r = mu.norm();
      if (r < 1e-3) continue;
      const SpectralDecomposition sd = decompose(g, DualVector(mu));
      if (sd.M() < M || sd.min_relative_gap < 1e-6) continue;
      const double D = symmetric_poly(sd, M);
      const double Hn = std::pow(std::abs(D) / std::pow(r, rep.degree_D),
                                 static_cast<double>(rep.h0) / rep.degree_D);
      const double step = 1e-6 * r;
      bool ok = true;
      double cb = 0.0, cp = 0.0;
      for (int k = 0; k < g.d2() && ok; ++k) {
        Vec p = mu, m = mu;
        p[k] += step;
        m[k] -= step;
        const SpectralDecomposition sp = decompose(g, DualVector(p));
        const SpectralDecomposition sm = decompose(g, DualVector(m));
        if (sp.M() != sd.M() || sm.M() != sd.M()) {
          ok = false;
          break;
        }
        for (int j = 0; j < sd.M(); ++j) {
          const double db = (sp.eigenvalues[j] - sm.eigenvalues[j]) / (2.0 * step);
          const double dP = (sp.projections[j] - sm.projections[j]).norm() / (2.0 * step);
          cb = std::max(cb, r * std::abs(db) / sd.eigenvalues[j] * Hn);
          cp = std::max(cp, r * dP * Hn);
        }
      }
      if (!ok) continue;
      out.C_b = std::max(out.C_b, cb);
      out.C_P = std::max(out.C_P, cp);
      ++out.samples;
    }
    return out;
  };
  rep.draw_a = draw(2 * seed + 1);
  rep.draw_b = draw(2 * seed + 2);
  auto comparable = [](double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    const double za = a < 1e-6 ? 0.0 : a, zb = b < 1e-6 ? 0.0 : b;
    if (za == 0.0 && zb == 0.0) return true;
    if (za == 0.0 || zb == 0.0) return false;
    return std::max(za, zb) <= 2.0 * std::min(za, zb);
  };
  rep.constants_stable = rep.draw_a.samples == samples && rep.draw_b.samples == samples &&
                         comparable(rep.draw_a.C_b, rep.draw_b.C_b) &&
                         comparable(rep.draw_a.C_P, rep.draw_b.C_P);
  return rep;
}

}  // namespace substrat
