#include "substrat/mehler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "substrat/error.hpp"
#include "substrat/parallel.hpp"
#include "substrat/quadrature.hpp"

namespace substrat {

namespace {

void check_time(Complex z) {
  if (!(z.real() > 0.0) || !std::isfinite(std::abs(z))) {
    fail(ErrorKind::InvalidTime, "heat kernel needs Re z > 0");
  }
}

}  // namespace

Complex heat_partial_ft(const SpectralDecomposition& sd, Complex z, const Vec& x) {
  const Complex I(0.0, 1.0);
  const int d1 = sd.dim();
  Complex quad = (sd.kernel_projection * x).squaredNorm();
  for (int j = 0; j < sd.M(); ++j) {
    quad += hT(I * z * sd.eigenvalues[j]) * (sd.projections[j] * x).squaredNorm();
  }
  const Complex pref = std::pow(4.0 * std::numbers::pi * z, -0.5 * d1);
  return pref * pair_product_hS(z, sd) * std::exp(-quad / (4.0 * z));
}

Complex heat_partial_ft(const StratifiedGroup& g, const HeatQuery& q) {
  check_time(q.z);
  if (q.x.size() != g.d1()) fail(ErrorKind::InvalidInput, "x has wrong length");
  const SpectralDecomposition sd = decompose(g, q.mu);
  if (std::abs(q.z.imag()) * sd.b_max() >= std::numbers::pi) {
    fail(ErrorKind::BranchRegionViolated, "|Im z| * |J| must stay below pi");
  }
  return heat_partial_ft(sd, q.z, q.x);
}

namespace {

struct GridResult {
  Complex value;
  double l1;
  double b_max;
};

GridResult integrate(const StratifiedGroup& g, Complex z, const Vec& x, const Vec& u,
                     double radius, int panels, int order) {
  const int d2 = g.d2();
  const Rule rule = composite_gauss_legendre(-radius, radius, panels, order);
  const std::size_t n = rule.size();
  std::size_t total = 1;
  for (int k = 0; k < d2; ++k) total *= n;
  struct Acc {
    Complex value;
    double l1;
    double b_max;
    Acc& operator+=(const Acc& o) {
      value += o.value;
      l1 += o.l1;
      b_max = std::max(b_max, o.b_max);
      return *this;
    }
  };
  const Acc acc = parallel::deterministic_sum(
      total,
      [&](std::size_t flat) {
        Vec mu(d2);
        double w = 1.0;
        std::size_t rest = flat;
        for (int k = 0; k < d2; ++k) {
          const std::size_t i = rest % n;
          rest /= n;
          mu[k] = rule.nodes[i];
          w *= rule.weights[i];
        }
        const SpectralDecomposition sd = decompose(g, DualVector(mu));
        const Complex p = heat_partial_ft(sd, z, x);
        const Complex phase = std::exp(Complex(0.0, mu.dot(u)));
        return Acc{w * p * phase, w * std::abs(p), sd.b_max()};
      },
      Acc{Complex(0.0, 0.0), 0.0, 0.0});
  const double norm = std::pow(2.0 * std::numbers::pi, -d2);
  return {acc.value * norm, acc.l1 * norm, acc.b_max};
}

// Probe directions: coordinate axes both ways and the diagonal.
std::vector<Vec> probe_directions(int d2) {
  std::vector<Vec> out;
  for (int k = 0; k < d2; ++k) {
    out.push_back(Vec::Unit(d2, k));
    out.push_back(-Vec::Unit(d2, k));
  }
  out.push_back(Vec::Ones(d2) / std::sqrt(static_cast<double>(d2)));
  return out;
}

// Largest |heat_partial_ft| over the probe directions at radius r.
double envelope(const StratifiedGroup& g, Complex z, const Vec& x, double r) {
  double out = 0.0;
  for (const Vec& dir : probe_directions(g.d2())) {
    out = std::max(out, std::abs(heat_partial_ft(decompose(g, DualVector(r * dir)), z, x)));
  }
  return out;
}

}  // namespace

HeatValue heat_space(const StratifiedGroup& g, Complex z, const Vec& x, const Vec& u,
                     const QuadratureGrid& grid) {
  check_time(z);
  if (x.size() != g.d1() || u.size() != g.d2()) {
    fail(ErrorKind::InvalidInput, "point has wrong dimensions");
  }
  if (g.d2() > 3) fail(ErrorKind::UnsupportedDimensions, "heat_space supports d2 <= 3");
  if (grid.order < 1) fail(ErrorKind::InvalidInput, "quadrature order must be positive");

  HeatValue out;
  if (z.real() < 0.05 * std::abs(z.imag())) {
    out.flagged = true;
    out.note = "Re z small against |Im z|; accuracy degraded";
  }

  double radius = grid.radius;
  if (radius <= 0.0) {
    const Vec zero = Vec::Zero(g.d2());
    double peak = std::abs(heat_partial_ft(decompose(g, DualVector(zero)), z, x));
    radius = 1.0;
    while (radius < 1e6) {
      const double e = envelope(g, z, x, radius);
      peak = std::max(peak, e);
      if (e < 1e-13 * peak) break;
      radius *= 1.25;
    }
  }
  int panels = grid.panels;
  if (panels <= 0) {
    // Poles of 1 / sinh(z b) sit at b = i k pi / z, i.e. at distance
    // pi Re z / (|z|^2 c) from the real mu axes when b <= c |mu|. A panel no
    // wider than that distance gives 16-point Gauss–Legendre ~1e-20 accuracy;
    // the phase e^{i <mu, u>} needs at most ~4 radians per panel.
    double c = 0.0;
    for (const Vec& dir : probe_directions(g.d2())) {
      c = std::max(c, decompose(g, DualVector(dir)).b_max());
    }
    const double az = std::abs(z);
    const double pole = std::numbers::pi * z.real() / (az * az * c);
    const double h = std::min(pole, 4.0 / std::max(u.cwiseAbs().maxCoeff(), 1e-300));
    panels = static_cast<int>(std::ceil(2.0 * radius / h));
    panels = std::clamp(panels, 2, std::max(2, grid.max_nodes_per_axis / grid.order));
  }
  out.radius = radius;

  // The estimate compares with half the panels, which overstates the error
  // of the returned value.
  GridResult result = integrate(g, z, x, u, radius, panels, grid.order);
  out.nodes_per_axis = panels * grid.order;
  if (grid.tolerance > 0.0) {
    const GridResult coarse = integrate(g, z, x, u, radius, (panels + 1) / 2, grid.order);
    out.error_estimate = std::abs(result.value - coarse.value);
    const double allowed = grid.tolerance * std::abs(result.value) + 1e-15 * result.l1;
    if (out.error_estimate > allowed) {
      fail(ErrorKind::GridTooCoarse,
           "half grid differs by " + std::to_string(out.error_estimate));
    }
  }
  if (std::abs(z.imag()) * result.b_max >= std::numbers::pi) {
    out.flagged = true;
    if (!out.note.empty()) out.note += "; ";
    out.note += "grid leaves |Im z| |J| < pi";
  }
  out.value = result.value;
  return out;
}

}  // namespace substrat
