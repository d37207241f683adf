#include "substrat/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "substrat/bernoulli.hpp"
#include "substrat/error.hpp"
#include "substrat/group.hpp"
#include "substrat/group_io.hpp"
#include "substrat/mehler.hpp"
#include "substrat/multiplier.hpp"
#include "substrat/oscillatory.hpp"
#include "substrat/phase.hpp"
#include "substrat/quadrature.hpp"
#include "substrat/spectral.hpp"

namespace substrat {
namespace {

const char* const kNames[kCriterionCount] = {
    "hankel_positivity",    "mehler_reduction",   "mehler_laguerre_cross_oracle",
    "phi0_dual_representation", "critical_point_certification", "block_asymptotics",
    "stationary_phase",     "taylor_remainder",   "threshold_bound",
    "determinism",
};

const std::vector<std::string> kCorpus = {"heisenberg:1", "htype:4,3", "free2step:3",
                                          "rotfam:1,2"};

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string to_string(const Rational& r) {
  std::ostringstream out;
  out << r;
  return out.str();
}

// 1. Exact Hankel positivity and the zeta-series oracle.
void hankel(CriterionResult& res, const SelftestOptions& opts) {
  std::vector<Rational> table = bernoulli_table(kBernoulliTableSize);
  if (opts.tamper_bernoulli) table[2] = Rational(1);  // b_3
  int positive = 0, total = 0;
  Json negatives = Json::array();
  for (int m = 0; m <= 8; ++m) {
    for (int s = 1; s <= 8; ++s) {
      ++total;
      if (hankel_det(m, s, &table) > 0) {
        ++positive;
      } else {
        negatives.push_back(Json::array({m, s}));
      }
    }
  }
  const Rational z12 = hankel_det(1, 2, &table);
  const bool spot = z12 == Rational(1, 4465125);
  double worst = 0.0;
  Json series = Json::array();
  for (int m = 0; m <= 2; ++m) {
    for (int s = 1; s <= 3; ++s) {
      const long kmax = documented_kmax(m, s);
      const double exact = static_cast<double>(hankel_det(m, s, &table));
      const double approx = zeta_series_det(m, s, kmax);
      const double err = std::abs(approx - exact) / std::abs(exact);
      worst = std::max(worst, err);
      series.push_back({{"m", m}, {"s", s}, {"kmax", kmax}, {"rel_err", err}});
    }
  }
  res.measured = {{"positive", positive},
                  {"total", total},
                  {"nonpositive", negatives},
                  {"Z_1_2", to_string(z12)},
                  {"Z_1_2_expected", "1/4465125"},
                  {"zeta_series", series},
                  {"zeta_series_worst_rel_err", worst},
                  {"zeta_series_tolerance", 1e-6}};
  res.passed = positive == total && spot && worst < 1e-6;
}

// 2. mu = 0 reduces to the Euclidean Gaussian.
void mehler_reduction(CriterionResult& res) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> re(0.1, 5.0), im(-5.0, 5.0), coord(-3.0, 3.0);
  double worst = 0.0;
  int count = 0;
  for (const auto& name : {"heisenberg:1", "htype:4,3", "free2step:3"}) {
    const StratifiedGroup g = builtin_group(name);
    for (int i = 0; i < 34 && count < 100; ++i, ++count) {
      const Complex z(re(rng), im(rng));
      Vec x(g.d1());
      for (int k = 0; k < g.d1(); ++k) x[k] = coord(rng);
      const Complex value = heat_partial_ft(g, {z, DualVector::zero(g.d2()), x});
      // Independent evaluation through the principal logarithm.
      const Complex oracle =
          std::exp(-0.5 * g.d1() * std::log(4.0 * std::numbers::pi * z) - x.squaredNorm() / (4.0 * z));
      worst = std::max(worst, rel_err(value, oracle));
    }
  }
  res.measured = {{"samples", count}, {"worst_rel_err", worst}, {"tolerance", 1e-12}};
  res.passed = count == 100 && worst <= 1e-12;
}

// 3. x-Fourier transform of the Mehler kernel against the Laguerre formula.
void cross_oracle(CriterionResult& res) {
  const StratifiedGroup g = heisenberg(1);
  const MultiplierSpec F = MultiplierSpec::heatcap(1.0, 40.0);
  const double b_unit = decompose(g, DualVector(Vec::Ones(1))).b_max();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> bdist(0.2, 2.0), unit(0.0, 1.0);
  const double L = 12.0;
  const Rule rule = composite_gauss_legendre(-L, L, 24, 16);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    const DualVector mu(Vec::Constant(1, sign * bdist(rng) / b_unit));
    const double r = 3.0 * unit(rng), phi = 2.0 * std::numbers::pi * unit(rng);
    Vec xi(2);
    xi << r * std::cos(phi), r * std::sin(phi);
    const SpectralDecomposition sd = decompose(g, mu);
    Complex oracle(0.0, 0.0);
    Vec x(2);
    for (std::size_t a = 0; a < rule.size(); ++a) {
      for (std::size_t b = 0; b < rule.size(); ++b) {
        x << rule.nodes[a], rule.nodes[b];
        oracle += rule.weights[a] * rule.weights[b] * heat_partial_ft(sd, 1.0, x) *
                  std::exp(Complex(0.0, -xi.dot(x)));
      }
    }
    worst = std::max(worst, rel_err(kernel_ft(g, F, xi, mu), oracle));
  }
  res.measured = {{"samples", 20}, {"worst_rel_err", worst}, {"tolerance", 1e-6}};
  res.passed = worst < 1e-6;
}

// 4. Spectral and power-series forms of Phi_0.
void phi0_dual(CriterionResult& res) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  Json per_group = Json::object();
  for (const auto& name : {"heisenberg:1", "htype:4,3", "free2step:3"}) {
    const StratifiedGroup g = builtin_group(name);
    double group_worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      Vec dir = random_unit(g.d2(), rng);
      const double b = decompose(g, DualVector(dir)).b_max();
      const DualVector mu(dir * (2.0 * std::max(unit(rng), 1e-3) / b));
      const Vec y = random_unit(g.d1(), rng) * (0.5 + 2.0 * unit(rng));
      const double a = phi0(g, y, mu, Phi0Method::Spectral);
      const double s = phi0(g, y, mu, Phi0Method::Series, 60);
      group_worst = std::max(group_worst, std::abs(a - s) / std::abs(s));
    }
    per_group[name] = group_worst;
    worst = std::max(worst, group_worst);
  }
  res.measured = {{"worst_rel_err", worst}, {"per_group", per_group}, {"tolerance", 1e-10}};
  res.passed = worst <= 1e-10;
}

// 5. Certificates on the corpus and the Heisenberg closed form.
void certification(CriterionResult& res) {
  bool ok = true;
  Json groups = Json::object();
  double heis_err = 1.0;
  for (const auto& name : kCorpus) {
    const StratifiedGroup g = builtin_group(name);
    Json entry;
    try {
      const CriticalPointCertificate c = find_critical(g, 0);
      const double grad_scale = 1e-8 * (1.0 + c.y0.squaredNorm());
      const bool good = c.mu0.norm() < 1.0 && c.gradient_norm <= grad_scale &&
                        c.hessian_eigenvalues.minCoeff() > 0.0;
      ok = ok && good;
      entry = {{"mu0_norm", c.mu0.norm()},
               {"gradient_norm", c.gradient_norm},
               {"gradient_bound", grad_scale},
               {"min_eigenvalue", c.hessian_eigenvalues.minCoeff()},
               {"epsilon", c.epsilon_used},
               {"filtration_ranks", c.filtration_ranks},
               {"valid", good}};
      if (name == "heisenberg:1") {
        // Raw coordinate tau = mu / sqrt(G); Phi_0 = |y|^2 (1 - tau cot tau).
        const double G = g.gram()(0, 0);
        const double tau = c.mu0.coords[0] / std::sqrt(G);
        const double s = std::sin(tau);
        const double closed =
            c.y0.squaredNorm() * 2.0 / (s * s) * (1.0 - tau * std::cos(tau) / s);
        const double raw = G * c.hessian(0, 0);
        heis_err = std::abs(raw - closed) / closed;
        entry["raw_hessian"] = raw;
        entry["closed_form"] = closed;
        entry["closed_form_at_zero"] = 2.0 / 3.0 * c.y0.squaredNorm();
        entry["closed_form_rel_err"] = heis_err;
      }
    } catch (const Error& e) {
      ok = false;
      entry = {{"error", std::string(e.kind_name())}, {"message", e.what()}};
    }
    groups[name] = entry;
  }
  res.measured = {{"groups", groups}, {"heisenberg_tolerance", 1e-6}};
  res.passed = ok && heis_err < 1e-6;
}

// 6. Block asymptotics of H(eps) on free2step(3).
void block_asymptotics(CriterionResult& res) {
  const StratifiedGroup g = free2step(3);
  const CriticalPointCertificate c = find_critical(g, 0);
  std::vector<double> eps;
  for (int k = 3; k <= 8; ++k) eps.push_back(std::ldexp(1.0, -k));
  std::vector<FiltrationBlocks> fb;
  for (double e : eps) fb.push_back(filtration_blocks(g, c.S_direction, c.y0, e));
  const FiltrationBlocks& ref = fb.front();
  auto block = [&](const Mat& A, int i, int j) {
    std::vector<int> rows, cols;
    for (int p = 0; p < static_cast<int>(ref.block_of.size()); ++p) {
      if (ref.block_of[p] == i) rows.push_back(p);
      if (ref.block_of[p] == j) cols.push_back(p);
    }
    Mat out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
      for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = A(rows[a], cols[b]);
    }
    return out;
  };
  bool ok = true;
  Json blocks = Json::array();
  for (int i = 0; i < ref.r; ++i) {
    for (int j = i; j < ref.r; ++j) {
      Json entry = {{"i", i}, {"j", j}};
      if ((i + j) % 2) {
        std::vector<std::pair<double, double>> samples;
        for (std::size_t k = eps.size(); k-- > 0;) {
          samples.emplace_back(eps[k], block(fb[k].H, i, j).norm());
        }
        const PowerLawFit fit = fit_power_law(samples);
        const bool good = std::abs(fit.exponent - (i + j + 1)) <= 0.2;
        ok = ok && good;
        entry["slope"] = fit.exponent;
        entry["expected_slope"] = i + j + 1;
        entry["pass"] = good;
      } else {
        // Entrywise fit of H_ij / eps^{i+j} as c0 + c1 eps^2 + c2 eps^4.
        const Mat pred = block(ref.predicted_leading, i, j);
        Mat lead(pred.rows(), pred.cols());
        Mat V(eps.size(), 3);
        for (std::size_t k = 0; k < eps.size(); ++k) {
          const double e2 = eps[k] * eps[k];
          V(k, 0) = 1.0;
          V(k, 1) = e2;
          V(k, 2) = e2 * e2;
        }
        for (int a = 0; a < pred.rows(); ++a) {
          for (int b = 0; b < pred.cols(); ++b) {
            Vec vals(eps.size());
            for (std::size_t k = 0; k < eps.size(); ++k) {
              vals[k] = block(fb[k].H, i, j)(a, b) / std::pow(eps[k], i + j);
            }
            lead(a, b) = V.colPivHouseholderQr().solve(vals)[0];
          }
        }
        const double err = (lead - pred).norm() / pred.norm();
        const bool good = err < 1e-4;
        ok = ok && good;
        entry["leading_rel_err"] = err;
        entry["pass"] = good;
      }
      blocks.push_back(entry);
    }
  }
  res.measured = {{"r", ref.r},
                  {"ranks", ref.ranks},
                  {"blocks", blocks},
                  {"slope_tolerance", 0.2},
                  {"leading_tolerance", 1e-4}};
  res.passed = ok && ref.r >= 2;
}

// 7. Stationary-phase asymptotics of Omega_t along (2 t y0, t^2 v0).
void stationary_phase(CriterionResult& res) {
  bool ok = true;
  Json groups = Json::object();
  for (const auto& [name, tol] :
       std::vector<std::pair<std::string, double>>{{"heisenberg:1", 0.1}, {"rotfam:1,2", 0.2}}) {
    const StratifiedGroup g = builtin_group(name);
    const CriticalPointCertificate c = find_critical(g, 0);
    const CutoffSpec chi = choose_chi(g, c);
    const CutoffSpec theta = choose_theta(g, c);
    const auto dims = g.dimensions();
    const double power = dims.Q - dims.d / 2.0;
    std::vector<std::pair<double, double>> errors;
    Json rows = Json::array();
    double ratio = 0.0;
    for (double t : {8.0, 16.0, 32.0, 64.0}) {
      OmegaQuery q;
      q.t = t;
      q.y = c.y0;
      q.v = c.v0;
      q.chi = chi;
      q.theta = theta;
      const OmegaValue om = omega(g, q);
      const StationaryPrediction sp = stationary_prediction(g, t, c.y0, c.v0, chi, theta, c);
      const Complex scaled = std::pow(t, power) * om.value;
      const double E = std::abs(scaled - sp.value);
      errors.emplace_back(t, E);
      ratio = std::abs(scaled) / std::abs(sp.amplitude);
      rows.push_back({{"t", t},
                      {"omega_re", om.value.real()},
                      {"omega_im", om.value.imag()},
                      {"quadrature_error", om.error_estimate},
                      {"prediction_abs", std::abs(sp.value)},
                      {"error", E},
                      {"ratio", ratio}});
    }
    const PowerLawFit fit = fit_power_law(errors);
    const bool good = fit.exponent >= -1.4 && fit.exponent <= -0.6 && std::abs(ratio - 1.0) < tol;
    ok = ok && good;
    groups[name] = {{"rows", rows},
                    {"slope", fit.exponent},
                    {"ratio_at_64", ratio},
                    {"ratio_tolerance", tol},
                    {"pass", good}};
  }
  res.measured = {{"groups", groups}, {"slope_range", Json::array({-1.4, -0.6})}};
  res.passed = ok;
}

// 8. Taylor remainder identity.
void taylor(CriterionResult& res) {
  double worst = 0.0, worst_switch = 0.0;
  int points = 0;
  for (int a = 0; a <= 8; ++a) {
    const double zr = 2.0 * a / 8.0;
    for (int b = 0; b < 8; ++b) {
      const Complex z = std::polar(zr, 2.0 * std::numbers::pi * b / 8.0);
      const RemainderSeries R(z);
      const Complex hz = hT(z), sz = hS(z);
      for (int c = 0; c <= 6; ++c) {
        const double sr = 0.3 * c / 6.0;
        for (int d = 0; d < 8; ++d) {
          const Complex sigma = std::polar(sr, 2.0 * std::numbers::pi * d / 8.0 + 0.1);
          const Complex lhs = hT((1.0 - sigma) * z) / (1.0 - sigma);
          const Complex resid = lhs - hz - sz * sz * sigma - R(sigma) * sigma * sigma;
          worst = std::max(worst, std::abs(resid) / std::max(1.0, std::abs(lhs)));
          ++points;
        }
      }
      // Both regimes at the switchover.
      const Complex at = R.switch_radius();
      const Complex taylor_side = R(at * (1.0 - 1e-12));
      const Complex direct_side = R(at * (1.0 + 1e-12));
      worst_switch = std::max(worst_switch, rel_err(taylor_side, direct_side));
    }
  }
  const double r00 = std::abs(remainder_R0(0.0, 0.0) - 1.0);
  const double r05 = std::abs(remainder_R0(0.5, 0.0) - 2.0);
  res.measured = {{"points", points},
                  {"worst_residual", worst},
                  {"residual_tolerance", 1e-12},
                  {"switchover_rel_diff", worst_switch},
                  {"R0_0_0_err", r00},
                  {"R0_half_0_err", r05}};
  res.passed = worst <= 1e-12 && worst_switch <= 1e-9 && r00 <= 1e-12 && r05 <= 1e-12;
}

// 9. Threshold bound and Lemma sampling.
void threshold(CriterionResult& res) {
  bool ok = true;
  Json groups = Json::object();
  double heis_bound = 0.0;
  for (const auto& name : kCorpus) {
    const StratifiedGroup g = builtin_group(name);
    const ThresholdReport rep = threshold_report(g);
    const bool good = rep.bound < rep.half_Q && rep.constants_stable;
    ok = ok && good;
    if (name == "heisenberg:1") heis_bound = rep.bound;
    groups[name] = {{"h", rep.h},
                    {"bound", rep.bound},
                    {"half_Q", rep.half_Q},
                    {"C_b", Json::array({rep.draw_a.C_b, rep.draw_b.C_b})},
                    {"C_P", Json::array({rep.draw_a.C_P, rep.draw_b.C_P})},
                    {"stable", rep.constants_stable}};
  }
  res.measured = {{"groups", groups}, {"heisenberg_bound", heis_bound}, {"expected", 1.5}};
  res.passed = ok && heis_bound == 1.5;
}

void determinism(CriterionResult& res) {
  SelftestOptions quick;
  quick.level = SelftestLevel::Quick;
  const std::vector<int> ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::string first = dump_report(to_json(run_selftest(quick, ids)));
  const std::string second = dump_report(to_json(run_selftest(quick, ids)));
  res.measured = {{"bytes", first.size()}, {"identical", first == second}};
  res.passed = first == second;
}

}  // namespace

CriterionResult run_criterion(int id, const SelftestOptions& opts) {
  if (id < 1 || id > kCriterionCount) fail(ErrorKind::InvalidInput, "criterion id out of range");
  CriterionResult res;
  res.id = id;
  res.name = kNames[id - 1];
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: hankel(res, opts); break;
      case 2: mehler_reduction(res); break;
      case 3: cross_oracle(res); break;
      case 4: phi0_dual(res); break;
      case 5: certification(res); break;
      case 6: block_asymptotics(res); break;
      case 7:
        if (opts.level == SelftestLevel::Quick) {
          res.skipped = true;
          res.passed = true;
          res.detail = "runs at the full level only";
        } else {
          stationary_phase(res);
        }
        break;
      case 8: taylor(res); break;
      case 9: threshold(res); break;
      case 10: determinism(res); break;
    }
  } catch (const Error& e) {
    res.passed = false;
    res.measured["error"] = std::string(e.kind_name());
    res.detail = e.what();
  }
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

bool SelftestReport::all_passed() const {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return true;
}

SelftestReport run_selftest(const SelftestOptions& opts, const std::vector<int>& ids) {
  SelftestReport rep;
  rep.level = opts.level;
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) rep.criteria.push_back(run_criterion(id, opts));
  } else {
    for (int id : ids) rep.criteria.push_back(run_criterion(id, opts));
  }
  return rep;
}

Json to_json(const SelftestReport& report) {
  Json items = Json::array();
  for (const auto& c : report.criteria) {
    Json item = {{"id", c.id},
                 {"name", c.name},
                 {"status", c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL")},
                 {"measured", c.measured}};
    if (!c.detail.empty()) item["detail"] = c.detail;
    items.push_back(item);
  }
  return {{"level", report.level == SelftestLevel::Quick ? "quick" : "full"},
          {"passed", report.all_passed()},
          {"criteria", items}};
}

}  // namespace substrat
