#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "substrat/bernoulli.hpp"
#include "substrat/error.hpp"
#include "substrat/group.hpp"
#include "substrat/group_io.hpp"
#include "substrat/mehler.hpp"
#include "substrat/multiplier.hpp"
#include "substrat/oscillatory.hpp"
#include "substrat/parallel.hpp"
#include "substrat/phase.hpp"
#include "substrat/report.hpp"
#include "substrat/selftest.hpp"
#include "substrat/spectral.hpp"

namespace substrat::cli {
namespace {

struct GroupSource {
  std::string builtin;
  std::string file;
  std::string any;

  void attach(CLI::App* app) {
    app->add_option("--builtin", builtin, "builtin group, e.g. heisenberg:1, htype:4,3");
    app->add_option("--file", file, "group definition file (JSON)");
    app->add_option("--group", any, "builtin name or group file");
  }

  StratifiedGroup load() const {
    const int given = !builtin.empty() + !file.empty() + !any.empty();
    if (given != 1) throw CLI::ValidationError("exactly one of --builtin, --file, --group is required");
    if (!builtin.empty()) return builtin_group(builtin);
    if (!file.empty()) return read_group_file(file);
    return load_group(any);
  }
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw CLI::ValidationError(std::string(what) + ": bad number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
  return out;
}

Vec sized(const std::string& text, int n, const char* what) {
  std::vector<double> v = parse_list(text, what);
  if (v.empty()) v.assign(n, 0.0);
  if (static_cast<int>(v.size()) != n) {
    throw CLI::ValidationError(std::string(what) + " needs " + std::to_string(n) + " entries");
  }
  return to_vec(v);
}

Json vec_json(const Vec& v, const char* what) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(finite(v[i], what));
  return out;
}

Json mat_json(const Mat& m, const char* what) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(vec_json(m.row(i).transpose(), what));
  return out;
}

std::string num(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::InvalidInput, "non-finite value in table output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Output {
  std::string path;
  std::ostream* fallback = nullptr;

  void write(const std::string& text) const {
    if (path.empty()) {
      *fallback << text;
      fallback->flush();
      return;
    }
    std::ofstream f(path);
    if (!f) fail(ErrorKind::InvalidInput, "cannot write '" + path + "'");
    f << text;
  }
};

Json certificate_json(const CriticalPointCertificate& c) {
  return {{"y0", vec_json(c.y0, "y0")},
          {"v0", vec_json(c.v0, "v0")},
          {"mu0", vec_json(c.mu0.coords, "mu0")},
          {"mu0_norm", finite(c.mu0.norm(), "mu0_norm")},
          {"hessian", mat_json(c.hessian, "hessian")},
          {"hessian_eigenvalues", vec_json(c.hessian_eigenvalues, "eigenvalues")},
          {"min_abs_eigenvalue", finite(c.min_abs_eigenvalue, "min_abs_eigenvalue")},
          {"margin", finite(c.margin, "margin")},
          {"gradient_norm", finite(c.gradient_norm, "gradient_norm")},
          {"epsilon_used", finite(c.epsilon_used, "epsilon")},
          {"S_direction", vec_json(c.S_direction.coords, "S")},
          {"filtration_ranks", c.filtration_ranks}};
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for heat kernels, oscillatory kernels and spectral "
               "multipliers on 2-step stratified groups",
               "substrat"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  std::string output_path;
  bool csv = false;
  app.add_option("--threads", threads, "worker thread cap (default: SUBSTRAT_THREADS or 1)");
  app.add_option("--output,-o", output_path, "write the report to this file");
  app.add_flag("--csv", csv, "tabular output where available");

  // group info
  auto* group_cmd = app.add_subcommand("group", "group data");
  group_cmd->require_subcommand(1);
  auto* group_info = group_cmd->add_subcommand("info", "dimensions and dual metric");
  GroupSource group_src;
  group_src.attach(group_info);

  // heat
  auto* heat_cmd = app.add_subcommand("heat", "heat kernel p_z(x, u) as CSV rows");
  GroupSource heat_src;
  heat_src.attach(heat_cmd);
  std::string heat_z = "1", heat_x, heat_u;
  double heat_umax = 0.0, heat_tol = 1e-8;
  int heat_steps = 0;
  heat_cmd->add_option("--z", heat_z, "time, re[,im]");
  heat_cmd->add_option("--x", heat_x, "first-layer point, comma separated (default 0)");
  heat_cmd->add_option("--u", heat_u, "centre point, comma separated (default 0)");
  heat_cmd->add_option("--u-steps", heat_steps, "sweep the first u coordinate over N points");
  heat_cmd->add_option("--u-max", heat_umax, "sweep range [-U, U]");
  heat_cmd->add_option("--tol", heat_tol, "relative refinement tolerance");

  // phase
  auto* phase_cmd = app.add_subcommand("phase", "phase function and Hankel determinants");
  phase_cmd->require_subcommand(1);
  auto* find_cmd = phase_cmd->add_subcommand("find-critical", "certified nondegenerate critical point");
  GroupSource find_src;
  find_src.attach(find_cmd);
  std::uint64_t find_seed = 0;
  std::string find_eps;
  find_cmd->add_option("--seed", find_seed, "random seed");
  find_cmd->add_option("--eps", find_eps, "comma separated eps grid");
  auto* hankel_cmd = phase_cmd->add_subcommand("hankel", "exact det Z_{m,s}");
  int hankel_m = 0, hankel_s = 1;
  hankel_cmd->add_option("--m", hankel_m, "m >= 0")->required();
  hankel_cmd->add_option("--s", hankel_s, "s >= 1")->required();

  // osc
  auto* osc_cmd = app.add_subcommand("osc", "oscillatory kernel");
  osc_cmd->require_subcommand(1);
  auto* verify_cmd = osc_cmd->add_subcommand("verify", "Omega_t against stationary phase");
  GroupSource osc_src;
  osc_src.attach(verify_cmd);
  std::string osc_t = "8,16,32,64", osc_plot;
  std::uint64_t osc_seed = 0;
  verify_cmd->add_option("--t", osc_t, "comma separated times >= 1");
  verify_cmd->add_option("--seed", osc_seed, "seed of the critical-point search");
  verify_cmd->add_option("--emit-plot", osc_plot, "write a gnuplot data file");

  // kernel
  auto* kernel_cmd = app.add_subcommand("kernel", "multiplier kernels");
  kernel_cmd->require_subcommand(1);
  auto* kft_cmd = kernel_cmd->add_subcommand("ft", "Laguerre formula for the kernel transform");
  GroupSource kernel_src;
  kernel_src.attach(kft_cmd);
  std::string kernel_F = "heatcap:1,40", kernel_xi, kernel_mu;
  bool kernel_strict = false;
  kft_cmd->add_option("--F", kernel_F, "heatcap:z,Kmax | bump:a,b | table:file.csv");
  kft_cmd->add_option("--xi", kernel_xi, "first-layer frequency, comma separated");
  kft_cmd->add_option("--mu", kernel_mu, "dual vector, comma separated");
  kft_cmd->add_flag("--strict", kernel_strict, "reject near-degenerate mu");

  // threshold
  auto* thr_cmd = app.add_subcommand("threshold", "Q/2 - 1/(2 h0) bound with sampled checks");
  GroupSource thr_src;
  thr_src.attach(thr_cmd);
  std::optional<int> thr_h;
  std::uint64_t thr_seed = 0;
  thr_cmd->add_option("--degree", thr_h, "use this degree instead of detecting it");
  thr_cmd->add_option("--seed", thr_seed, "sampling seed");

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "acceptance suite");
  std::string level = "quick", fault;
  self_cmd->add_option("--level", level, "quick | full")
      ->check(CLI::IsMember({"quick", "full"}));
  self_cmd->add_option("--inject-fault", fault, "bernoulli: corrupt the Bernoulli table")
      ->check(CLI::IsMember({"bernoulli"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  int n_threads = threads > 0 ? threads : parallel::threads_from_environment();
  parallel::set_max_threads(n_threads > 0 ? n_threads : 1);
  const Output sink{output_path, &out};
  const auto start = std::chrono::steady_clock::now();

  auto finish = [&](const char* what) {
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << what << ": " << sec << " s\n";
  };

  try {
    if (group_info->parsed()) {
      const StratifiedGroup g = group_src.load();
      const Dimensions d = g.dimensions();
      Json rep = {{"group", g.label()}, {"d1", d.d1}, {"d2", d.d2}, {"d", d.d}, {"Q", d.Q},
                  {"gram", mat_json(g.gram(), "gram")},
                  {"dual_basis_transform", mat_json(g.dual_basis_transform(), "transform")},
                  {"generic_eigencount", generic_eigencount(g, 64, 0)}};
      sink.write(dump_report(rep));
      return 0;
    }
    if (heat_cmd->parsed()) {
      const StratifiedGroup g = heat_src.load();
      const std::vector<double> zv = parse_list(heat_z, "--z");
      if (zv.empty() || zv.size() > 2) throw CLI::ValidationError("--z takes re[,im]");
      const Complex z(zv[0], zv.size() > 1 ? zv[1] : 0.0);
      const Vec x = sized(heat_x, g.d1(), "--x");
      Vec u = sized(heat_u, g.d2(), "--u");
      QuadratureGrid grid;
      grid.tolerance = heat_tol;
      std::ostringstream csv_out;
      for (int k = 0; k < g.d1(); ++k) csv_out << "x" << k + 1 << ",";
      for (int k = 0; k < g.d2(); ++k) csv_out << "u" << k + 1 << ",";
      csv_out << "re,im\n";
      const int rows = heat_steps > 1 ? heat_steps : 1;
      for (int r = 0; r < rows; ++r) {
        if (heat_steps > 1) u[0] = -heat_umax + 2.0 * heat_umax * r / (heat_steps - 1);
        const HeatValue hv = heat_space(g, z, x, u, grid);
        if (hv.flagged) err << "warning: " << hv.note << "\n";
        for (int k = 0; k < g.d1(); ++k) csv_out << num(x[k]) << ",";
        for (int k = 0; k < g.d2(); ++k) csv_out << num(u[k]) << ",";
        csv_out << num(hv.value.real()) << "," << num(hv.value.imag()) << "\n";
      }
      sink.write(csv_out.str());
      finish("heat");
      return 0;
    }
    if (find_cmd->parsed()) {
      const StratifiedGroup g = find_src.load();
      const CriticalPointCertificate c = find_critical(g, find_seed, parse_list(find_eps, "--eps"));
      Json rep = {{"group", g.label()}, {"seed", find_seed}, {"certificate", certificate_json(c)}};
      sink.write(dump_report(rep));
      finish("phase find-critical");
      return 0;
    }
    if (hankel_cmd->parsed()) {
      const Rational det = hankel_det(hankel_m, hankel_s);
      std::ostringstream exact;
      exact << det;
      Json rep = {{"m", hankel_m}, {"s", hankel_s}, {"exact", exact.str()},
                  {"decimal", finite(static_cast<double>(det), "det")}, {"positive", det > 0}};
      sink.write(dump_report(rep));
      return 0;
    }
    if (verify_cmd->parsed()) {
      const StratifiedGroup g = osc_src.load();
      const std::vector<double> ts = parse_list(osc_t, "--t");
      const CriticalPointCertificate c = find_critical(g, osc_seed);
      const CutoffSpec chi = choose_chi(g, c);
      const CutoffSpec theta = choose_theta(g, c);
      const Dimensions d = g.dimensions();
      const double power = d.Q - d.d / 2.0;
      std::ostringstream table, plot;
      table << "t,re_omega,im_omega,abs_prediction,error\n";
      plot << "# t  error  |omega| t^(Q-d/2)  |A|\n";
      std::vector<std::pair<double, double>> errors;
      double amp = 0.0, last_scaled = 0.0;
      for (double t : ts) {
        OmegaQuery q{t, c.y0, c.v0, chi, theta, {}};
        const OmegaValue om = omega(g, q);
        const StationaryPrediction sp = stationary_prediction(g, t, c.y0, c.v0, chi, theta, c);
        const Complex scaled = std::pow(t, power) * om.value;
        const double E = std::abs(scaled - sp.value);
        errors.emplace_back(t, E);
        amp = std::abs(sp.amplitude);
        last_scaled = std::abs(scaled);
        table << num(t) << "," << num(om.value.real()) << "," << num(om.value.imag()) << ","
              << num(std::abs(sp.value)) << "," << num(E) << "\n";
        plot << num(t) << " " << num(E) << " " << num(last_scaled) << " " << num(amp) << "\n";
      }
      if (errors.size() >= 3) {
        const PowerLawFit fit = fit_power_law(errors);
        table << "# exponent=" << num(fit.exponent) << " residual=" << num(fit.residual)
              << " ratio_last=" << num(last_scaled / amp) << "\n";
      }
      sink.write(table.str());
      if (!osc_plot.empty()) Output{osc_plot, &out}.write(plot.str());
      finish("osc verify");
      return 0;
    }
    if (kft_cmd->parsed()) {
      const StratifiedGroup g = kernel_src.load();
      const MultiplierSpec F = MultiplierSpec::parse(kernel_F);
      const Vec xi = sized(kernel_xi, g.d1(), "--xi");
      const Vec mu = sized(kernel_mu, g.d2(), "--mu");
      KernelFtOptions opts;
      opts.strict = kernel_strict;
      const Complex v = kernel_ft(g, F, xi, DualVector(mu), opts);
      if (csv) {
        sink.write("re,im\n" + num(v.real()) + "," + num(v.imag()) + "\n");
      } else {
        Json rep = {{"group", g.label()}, {"F", F.name}, {"xi", vec_json(xi, "xi")},
                    {"mu", vec_json(mu, "mu")}, {"re", finite(v.real(), "re")},
                    {"im", finite(v.imag(), "im")}};
        sink.write(dump_report(rep));
      }
      return 0;
    }
    if (thr_cmd->parsed()) {
      const StratifiedGroup g = thr_src.load();
      const ThresholdReport r = threshold_report(g, thr_h, thr_seed);
      auto sample = [](const LemmaSample& s) {
        return Json{{"samples", s.samples}, {"C_b", finite(s.C_b, "C_b")}, {"C_P", finite(s.C_P, "C_P")}};
      };
      Json rep = {{"group", g.label()}, {"h", r.h}, {"h0", r.h0}, {"bound", r.bound},
                  {"half_Q", r.half_Q}, {"degree_D", r.degree_D},
                  {"sample_check", {{"draw_a", sample(r.draw_a)}, {"draw_b", sample(r.draw_b)},
                                    {"constants_stable", r.constants_stable}}}};
      sink.write(dump_report(rep));
      finish("threshold");
      return 0;
    }
    if (self_cmd->parsed()) {
      SelftestOptions opts;
      opts.level = level == "full" ? SelftestLevel::Full : SelftestLevel::Quick;
      opts.tamper_bernoulli = fault == "bernoulli";
      SelftestReport rep = run_selftest(opts);
      for (const auto& c : rep.criteria) {
        err << "criterion " << c.id << " " << c.name << ": "
            << (c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL")) << " (" << c.seconds << " s)\n";
      }
      sink.write(dump_report(to_json(rep)));
      return rep.all_passed() ? 0 : 2;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const Error& e) {
    Json rep = {{"error", std::string(e.kind_name())}, {"message", e.what()}};
    try {
      sink.write(dump_report(rep));
    } catch (const Error&) {
      out << dump_report(rep);
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace substrat::cli
