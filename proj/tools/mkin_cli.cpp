// Batch entry point: configuration-driven verification suites, single runs of
// either kinetic model, and twin-solution experiments. Exit codes: 0 success,
// 1 scientific failure (failed check or solver abort), 2 usage/config error.

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mkin/config.hpp"
#include "mkin/dyadic.hpp"
#include "mkin/harness.hpp"
#include "mkin/initial.hpp"
#include "mkin/io.hpp"
#include "mkin/landau.hpp"
#include "mkin/quadrature.hpp"
#include "mkin/solver.hpp"
#include "mkin/spectral.hpp"
#include "mkin/symbol.hpp"

namespace fs = std::filesystem;
using namespace mkin;

namespace {

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string output_dir = ".";
  std::uint64_t seed = 20240101;
  std::string log_level = "info";
};

struct CheckRow {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

int log_rank(const std::string& level) {
  if (level == "quiet") return 0;
  if (level == "debug") return 2;
  return 1;
}

void log_line(const RunManifest& man, int rank, const std::string& msg) {
  if (log_rank(man.log_level) >= rank) std::printf("%s\n", msg.c_str());
}

std::string stamp(const Config& cfg, const RunManifest& man) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "config_hash=%016" PRIx64 " seed=%" PRIu64,
                cfg.hash(man.seed), man.seed);
  return buf;
}

PhaseGrid grid_from(const Config& cfg) {
  PhaseGrid g;
  g.dim_x = cfg.get_int("grid", "dim_x", 1);
  g.n_x = cfg.get_int("grid", "n_x", 16);
  g.n_v = cfg.get_int("grid", "n_v", 16);
  g.l_v = cfg.get_double("grid", "l_v", 6.0);
  g.validate();
  return g;
}

ModelParams params_from(const Config& cfg) {
  ModelParams p;
  p.nu = cfg.get_double("model", "nu", 0.0);
  p.beta = cfg.get_double("model", "beta", 0.0);
  p.m = cfg.get_double("model", "m", 4.0);
  p.k0 = cfg.get_double("model", "k0", 10.0);
  p.c0 = cfg.get_double("model", "c0", 0.01);
  p.c_small = cfg.get_double("model", "c_small", 10.0);
  p.m0 = cfg.get_double("model", "m0", 1.0);
  p.validate();
  return p;
}

SolverConfig solver_from(const Config& cfg, const PhaseGrid& g, Model model) {
  SolverConfig sc;
  sc.model = model;
  sc.params = params_from(cfg);
  const int dt_steps = cfg.get_int("solver", "dt_steps", 1);
  sc.dt = dt_steps * g.dxi();
  sc.t_end = cfg.get_int("solver", "n_steps", 20) * sc.dt;
  const std::string scheme = cfg.get_string("solver", "scheme", "strang");
  if (scheme == "strang") {
    sc.scheme = Scheme::strang;
  } else if (scheme == "lie") {
    sc.scheme = Scheme::lie;
  } else {
    throw ConfigError("solver.scheme must be lie or strang, got '" + scheme + "'");
  }
  sc.cfl_safety = cfg.get_double("solver", "cfl_safety", 0.5);
  sc.snapshot_every = cfg.get_int("solver", "snapshot_every", 0);
  sc.collision_enabled = cfg.get_bool("solver", "collision", true);
  sc.validate_initial_data = cfg.get_bool("solver", "validate_initial", false);
  const std::string form = cfg.get_string("solver", "kernel_form", "riesz");
  if (form == "riesz") {
    sc.kernel_form = KernelForm::riesz;
  } else if (form == "sampled") {
    sc.kernel_form = KernelForm::sampled;
  } else {
    throw ConfigError("solver.kernel_form must be riesz or sampled, got '" + form + "'");
  }
  sc.validate(g);
  return sc;
}

Field initial_from(const Config& cfg, const PhaseGrid& g) {
  const std::string family = cfg.get_string("initial", "family", "perturbed-maxwellian");
  const double mass = cfg.get_double("initial", "mass", 0.25);
  const double sigma = cfg.get_double("initial", "sigma", 1.0);
  const Eigen::Vector3d u(cfg.get_double("initial", "ux", 0.0),
                          cfg.get_double("initial", "uy", 0.0),
                          cfg.get_double("initial", "uz", 0.0));
  if (family == "maxwellian") return maxwellian(g, mass, sigma, u);
  if (family == "perturbed-maxwellian") {
    return perturbed_maxwellian(g, mass, sigma, cfg.get_double("initial", "eps", 0.1),
                                cfg.get_int("initial", "k_mode", 1), u);
  }
  if (family == "two-bump") {
    return two_bump(g, mass, sigma, cfg.get_double("initial", "drift", 1.0));
  }
  if (family == "snapshot") {
    return read_snapshot(cfg.require_string("initial", "path"));
  }
  throw ConfigError("initial.family must be maxwellian, perturbed-maxwellian, two-bump or "
                    "snapshot, got '" + family + "'");
}

void write_rows(const std::string& path, const std::vector<CheckRow>& rows,
                const std::string& header) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "# " << header << "\n";
  os << "check,measured,bound,pass\n";
  char buf[256];
  for (const auto& r : rows) {
    if (r.skipped) {
      os << r.name << ",,,SKIP (" << r.note << ")\n";
    } else {
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%s\n", r.name.c_str(), r.measured,
                    r.bound, r.pass ? "PASS" : "FAIL");
      os << buf;
    }
  }
}

// ---------------------------------------------------------------------------
// verify: the lemma-level property suites at desk scale
// ---------------------------------------------------------------------------

void verify_symbol(const Config& cfg, std::mt19937_64& rng, std::vector<CheckRow>& rows) {
  const double delta = cfg.get_double("symbol", "delta", 0.25);
  const double eps = cfg.get_double("symbol", "epsilon", 0.5);
  const bool custom_p = cfg.has("symbol", "exponent_p");
  const SymbolParams sym = custom_p
      ? SymbolParams(delta, eps, cfg.get_double("symbol", "exponent_p", 1.0))
      : SymbolParams(delta, eps);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 5.0);

  {
    CheckRow row{"phase_integral_vs_quadrature"};
    const int n = cfg.get_int("verify", "n_phase_samples", 2000);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      PhasePoint p;
      p.T = 2.0 * u01(rng);
      p.t = p.T * u01(rng);
      p.xi = Vector3d(gauss(rng), gauss(rng), gauss(rng));
      p.eta = Vector3d(std::round(gauss(rng)), std::round(gauss(rng)), std::round(gauss(rng)));
      const double exact = phase_integral(p);
      const double quad = adaptive_simpson(
          [&](double tau) { return 1.0 + (p.xi + (p.t - tau) * p.eta).squaredNorm(); }, p.t,
          p.T, 1e-12);
      worst = std::max(worst, std::abs(exact - quad) / std::max(1.0, std::abs(exact)));
    }
    row.measured = worst;
    row.bound = 1e-10;
    row.pass = worst < row.bound;
    rows.push_back(row);
  }

  {
    CheckRow row{"transport_commutator_fd_slope"};
    std::vector<double> steps{4e-3, 2e-3, 1e-3}, errs;
    std::vector<PhasePoint> pts;
    for (int i = 0; i < 64; ++i) {
      PhasePoint p;
      p.T = 0.5 + 1.2 * u01(rng);
      p.t = (0.2 + 0.6 * u01(rng)) * p.T;
      p.xi = Vector3d(gauss(rng), gauss(rng), gauss(rng)) / 2.5;
      p.eta = Vector3d(std::round(2.0 * u01(rng)), std::round(2.0 * u01(rng)), 0);
      pts.push_back(p);
    }
    for (double h : steps) {
      double acc = 0.0;
      for (const auto& p : pts) {
        PhasePoint pt = p, mt = p, pe = p, me = p;
        pt.t += h;
        mt.t -= h;
        pe.xi += h * p.eta;
        me.xi -= h * p.eta;
        const double d_t = (eval_m(sym, pt) - eval_m(sym, mt)) / (2.0 * h);
        const double d_e = (eval_m(sym, pe) - eval_m(sym, me)) / (2.0 * h);
        const double phi = phase_integral(p);
        const double expect = sym.delta * sym.exponent_p * (1.0 + p.xi.squaredNorm()) /
                              (1.0 + sym.delta * phi) * eval_m(sym, p);
        acc += std::abs(d_t - d_e - expect);
      }
      errs.push_back(acc / pts.size());
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      sx += std::log(steps[i]);
      sy += std::log(errs[i]);
      sxx += std::log(steps[i]) * std::log(steps[i]);
      sxy += std::log(steps[i]) * std::log(errs[i]);
    }
    const double n = static_cast<double>(steps.size());
    row.measured = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    row.bound = 1.9;
    row.pass = row.measured >= row.bound;
    rows.push_back(row);
  }

  {
    CheckRow row{"time_integral_bound_sweep"};
    if (custom_p && std::abs(sym.exponent_p - (0.5 + eps)) > 1e-12) {
      row.skipped = true;
      row.note = "exponent_p != 1/2+epsilon; bound only proved there";
      rows.push_back(row);
    } else {
      const int n = cfg.get_int("verify", "n_bound_samples", 400);
      double worst_ratio = 0.0;
      bool all = true;
      for (int i = 0; i < n; ++i) {
        const SymbolParams s(1e-3 + u01(rng), 1e-3 + u01(rng));
        const double T0 = 0.1 + 2.0 * u01(rng);
        const double t = 0.9 * T0 * u01(rng);
        const Vector3d xi(gauss(rng), gauss(rng), gauss(rng));
        const Vector3d eta(std::round(gauss(rng)), std::round(gauss(rng)),
                           std::round(gauss(rng)));
        const auto chk = check_time_integral_bound(s, xi, eta, t, T0);
        all = all && chk.pass;
        worst_ratio = std::max(worst_ratio, chk.lhs / chk.rhs);
      }
      row.measured = worst_ratio;
      row.bound = 1.0;
      row.pass = all;
      rows.push_back(row);
    }
  }

  {
    CheckRow row{"derivative_bound_T_halving"};
    auto mk = [](double T, unsigned seed) {
      std::mt19937_64 r2(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<PhasePoint> pts;
      for (int i = 0; i < 128; ++i) {
        PhasePoint p;
        p.T = T;
        p.t = (0.05 + 0.9 * u(r2)) * T;
        const double rr = 4.0 + 28.0 * u(r2);
        const double th = 2.0 * kPi * u(r2), ph = kPi * u(r2);
        p.xi = rr * Vector3d(std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th),
                             std::cos(ph));
        p.eta = Vector3d(std::round(6.0 * (u(r2) - 0.5)), std::round(6.0 * (u(r2) - 0.5)),
                         std::round(6.0 * (u(r2) - 0.5)));
        pts.push_back(p);
      }
      return pts;
    };
    const unsigned sub_seed = static_cast<unsigned>(rng());
    const SymbolParams s1(1.0, 0.4);
    const auto full = check_derivative_bounds(s1, mk(0.5, sub_seed));
    const auto half = check_derivative_bounds(s1, mk(0.25, sub_seed));
    row.measured = half.max_eta_order1 / full.max_eta_order1;
    row.bound = 0.5;
    row.pass = row.measured > 0.4 && row.measured < 0.6;
    rows.push_back(row);
  }
}

void verify_dyadic(const Config& cfg, std::mt19937_64& rng, std::vector<CheckRow>& rows) {
  const DyadicPartition part(8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Eigen::Vector3d> samples;
  const int n = cfg.get_int("verify", "n_partition_samples", 10000);
  for (int i = 0; i < n; ++i) {
    const double r = u01(rng) * part.r_max();
    const double th = 2.0 * kPi * u01(rng), ph = kPi * u01(rng);
    samples.emplace_back(r * std::sin(ph) * std::cos(th), r * std::sin(ph) * std::sin(th),
                         r * std::cos(ph));
  }
  for (double r : {4.0, 8.0, 16.0}) samples.emplace_back(r, 0.0, 0.0);
  const PartitionReport rep = verify_partition(part, samples);
  rows.push_back({"partition_sum_defect", rep.max_sum_defect, 1e-12,
                  rep.max_sum_defect < 1e-12, false, ""});
  rows.push_back({"partition_sum_squares", rep.min_sum_squares, 1.0 / 3.0 - 1e-12,
                  rep.min_sum_squares >= 1.0 / 3.0 - 1e-12, false, ""});
  rows.push_back({"partition_support_violations", double(rep.support_violations), 0.0,
                  rep.support_violations == 0, false, ""});

  std::vector<int> ks;
  for (int k = 1; k <= 8; ++k) ks.push_back(k);
  const DerivativeDecayReport der = verify_derivative_decay(part, ks);
  double worst = 0.5;
  for (std::size_t i = 0; i + 1 < der.rings.size(); ++i) {
    const double ratio = der.rings[i + 1].sup_grad / der.rings[i].sup_grad;
    if (std::abs(ratio - 0.5) > std::abs(worst - 0.5)) worst = ratio;
  }
  rows.push_back({"derivative_halving_worst_ratio", worst, 0.5,
                  worst > 0.4 && worst < 0.6, false, ""});
}

void verify_spectral(const Config& cfg, std::mt19937_64& rng, std::vector<CheckRow>& rows) {
  const PhaseGrid g(1, 8, cfg.get_int("verify", "n_v_small", 16), 6.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(g);
  for (long i = 0; i < f.values.size(); ++i) f.values[i] = gauss(rng);

  const SpectralField F = forward(f);
  const Field back = inverse(F);
  const double rt = (back.values - f.values).abs().maxCoeff() / f.values.abs().maxCoeff();
  rows.push_back({"fft_roundtrip", rt, 1e-12, rt < 1e-12, false, ""});
  const double pa = std::abs(l2_norm(F) - l2_norm(f)) / l2_norm(f);
  rows.push_back({"parseval", pa, 1e-12, pa < 1e-12, false, ""});

  const Field sheared = transport_shear(f, 3.0 * g.dxi());
  const double shear_l2 = std::abs(l2_norm(sheared) - l2_norm(f)) / l2_norm(f);
  rows.push_back({"shear_l2_preservation", shear_l2, 1e-12, shear_l2 < 1e-12, false, ""});

  const SymbolParams sym(1.0, 0.5);
  const Field mf = apply_multiplier(f, [&](const Vector3d& eta, const Vector3d& xi) {
    return eval_m(sym, {0.0, 1.0, xi, eta});
  });
  const double ratio = l2_norm(mf) / l2_norm(f);
  rows.push_back({"contractive_multiplier", ratio, 1.0, ratio <= 1.0 + 1e-12, false, ""});

  // discrete quadruple-sum bound: sum over (t, T, modes) of |xi|^2 M^2 |h_hat|^2
  // stays under 2/(eps delta) times the (t, modes) base sum
  {
    const SpectralField H = forward(f);
    const double T0 = 1.0;
    const int n_t = 8, n_T = 64;
    double lhs = 0.0, base = 0.0;
    for (int it = 0; it < n_t; ++it) {
      const double t = T0 * it / n_t;
      const double wt = T0 / n_t;
      base += wt * H.modes.abs2().sum();
      long idx = 0;
      for (long ix = 0; ix < g.n_space(); ++ix) {
        const Vector3d eta(PhaseGrid::signed_index(static_cast<int>(ix), g.n_x), 0, 0);
        for (int j0 = 0; j0 < g.n_v; ++j0)
          for (int j1 = 0; j1 < g.n_v; ++j1)
            for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
              const Vector3d xi(g.xi_coord(j0), g.xi_coord(j1), g.xi_coord(j2));
              const double amp = std::norm(H.modes[idx]);
              if (amp == 0.0) continue;
              double acc = 0.0;
              for (int iT = 0; iT < n_T; ++iT) {
                const double T = t + (T0 - t) * (iT + 0.5) / n_T;
                const double m = eval_m(sym, {t, T, xi, eta});
                acc += (T0 - t) / n_T * m * m;
              }
              lhs += wt * xi.squaredNorm() * acc * amp;
            }
      }
    }
    const double bound = 2.0 / (sym.epsilon * sym.delta) * base;
    rows.push_back({"quadruple_sum_bound_ratio", lhs / bound, 1.0,
                    lhs <= bound * (1.0 + 1e-9), false, ""});
  }
}

void verify_landau(const Config& cfg, std::mt19937_64& rng, std::vector<CheckRow>& rows) {
  const int n_v = cfg.get_int("verify", "n_v_landau", 32);
  const PhaseGrid g(1, 1, n_v, 8.0);
  const Field f = maxwellian(g, 2.0 * kPi);

  LandauCoefficients::Request req;
  req.want_div_A = true;
  req.want_neg_lap_a = true;
  const CoefficientSet cs = landau_engine(g).compute(f, req);

  {
    const Eigen::ArrayXd tr = cs.A[0] + cs.A[3] + cs.A[5];
    const double err = std::sqrt((tr - cs.a).square().sum() / cs.a.square().sum());
    rows.push_back({"landau_trace_identity", err, 1e-10, err < 1e-10, false, ""});
  }
  {
    double num = 0.0, den = 0.0;
    for (int d = 0; d < 3; ++d) {
      num += (cs.div_A[d] - cs.grad_a[d]).square().sum();
      den += cs.grad_a[d].square().sum();
    }
    const double err = std::sqrt(num / den);
    rows.push_back({"landau_divergence_identity", err, 1e-8, err < 1e-8, false, ""});
  }
  {
    double num = 0.0, den = 0.0;
    long idx = 0;
    for (int j0 = 0; j0 < g.n_v; ++j0)
      for (int j1 = 0; j1 < g.n_v; ++j1)
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double r2 = g.v_coord(j0) * g.v_coord(j0) + g.v_coord(j1) * g.v_coord(j1) +
                            g.v_coord(j2) * g.v_coord(j2);
          if (r2 < 0.25 * g.l_v * g.l_v) {
            num += std::pow(cs.neg_lap_a[idx] - f.values[idx], 2);
            den += f.values[idx] * f.values[idx];
          }
        }
    const double err = std::sqrt(num / den);
    rows.push_back({"landau_poisson_residual", err, 1e-3, err < 1e-3, false, ""});
  }
  {
    const int j = static_cast<int>((1.0 + g.l_v) / g.dv());
    const double got = cs.a[g.index(0, j, g.n_v / 2, g.n_v / 2)];
    const double want = std::erf(1.0 / std::sqrt(2.0)) / (4.0 * kPi);
    const double err = std::abs(got - want) / want;
    rows.push_back({"landau_gaussian_potential", err, 1e-3, err < 1e-3, false, ""});
  }
  {
    double worst = 0.0;
    const int n_fields = cfg.get_int("verify", "n_l6_fields", 8);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n_fields; ++i) {
      Field rf(g);
      long idx = 0;
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double r2 = g.v_coord(j0) * g.v_coord(j0) + g.v_coord(j1) * g.v_coord(j1) +
                              g.v_coord(j2) * g.v_coord(j2);
            rf.values[idx] = std::abs(gauss(rng)) * std::exp(-0.4 * r2);
          }
      LandauCoefficients::Request gr;
      gr.want_a = gr.want_A = gr.want_div_A = false;
      const CoefficientSet cg = landau_engine(g).compute(rf, gr);
      const Eigen::ArrayXd gmag =
          (cg.grad_a[0].square() + cg.grad_a[1].square() + cg.grad_a[2].square()).sqrt();
      const double l6 = std::pow(gmag.pow(6.0).sum() * g.cell_volume(), 1.0 / 6.0);
      const double l2 = std::sqrt(rf.values.square().sum() * g.cell_volume());
      worst = std::max(worst, l6 / l2);
    }
    rows.push_back({"landau_grad_a_L6_over_f_L2", worst, 1.0, worst <= 1.0 + 1e-8, false, ""});
  }
}

int cmd_verify(const RunManifest& man, const Config& cfg) {
  std::mt19937_64 rng(man.seed);
  std::vector<CheckRow> rows;
  verify_symbol(cfg, rng, rows);
  verify_dyadic(cfg, rng, rows);
  verify_spectral(cfg, rng, rows);
  verify_landau(cfg, rng, rows);

  fs::create_directories(man.output_dir);
  write_rows((fs::path(man.output_dir) / "verify.csv").string(), rows, stamp(cfg, man));

  bool all = true;
  for (const auto& r : rows) {
    if (r.skipped) {
      log_line(man, 1, "SKIP " + r.name + " (" + r.note + ")");
      continue;
    }
    all = all && r.pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %s (measured=%.3e bound=%.3e)",
                  r.pass ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.bound);
    log_line(man, 1, buf);
  }
  return all ? 0 : 1;
}

int cmd_solve(const RunManifest& man, const Config& cfg, Model model) {
  const PhaseGrid g = grid_from(cfg);
  const SolverConfig sc = solver_from(cfg, g, model);
  Field f0 = initial_from(cfg, g);
  if (!(f0.grid == g)) throw ConfigError("snapshot grid does not match [grid] section");

  const Solver solver(g, sc);
  log_line(man, 1, "running " + std::string(model == Model::toy ? "toy" : "landau") +
                       " model, " + std::to_string(std::lround(sc.t_end / sc.dt)) + " steps");
  Trajectory tr = solver.run(std::move(f0));

  fs::create_directories(man.output_dir);
  write_diagnostics_csv((fs::path(man.output_dir) / "diagnostics.csv").string(), tr.series,
                        stamp(cfg, man));
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%04zu.mkin", i);
    write_snapshot((fs::path(man.output_dir) / name).string(), tr.snapshots[i]);
  }
  if (!tr.snapshots.empty()) {
    write_density_csv((fs::path(man.output_dir) / "density.csv").string(),
                      tr.snapshots.back(), stamp(cfg, man));
    if (model == Model::landau && cfg.get_bool("solver", "export_coefficients", false)) {
      LandauCoefficients::Request req;
      req.want_grad_a = req.want_div_A = false;
      const CoefficientSet coeffs =
          landau_engine(g, sc.kernel_form).compute(tr.snapshots.back(), req);
      const char* names[6] = {"Axx", "Axy", "Axz", "Ayy", "Ayz", "Azz"};
      write_snapshot((fs::path(man.output_dir) / "coeff_a.mkin").string(),
                     Field(g, coeffs.a, tr.snapshots.back().time));
      for (int c = 0; c < 6; ++c) {
        write_snapshot((fs::path(man.output_dir) / ("coeff_" + std::string(names[c]) + ".mkin")).string(),
                       Field(g, coeffs.A[c], tr.snapshots.back().time));
      }
    }
  }
  {
    std::ofstream os(fs::path(man.output_dir) / "run_info.txt");
    os << "# " << stamp(cfg, man) << "\n";
    os << "command = " << man.command << "\n";
    os << "steps = " << tr.series.size() - 1 << "\n";
    os << "aborted = " << (tr.aborted ? "yes" : "no") << "\n";
    if (tr.aborted) os << "abort_reason = " << tr.abort_reason << "\n";
  }
  if (tr.aborted) {
    log_line(man, 1, "ABORTED: " + tr.abort_reason);
    return 1;
  }
  const auto& a = tr.series.front();
  const auto& b = tr.series.back();
  char buf[200];
  std::snprintf(buf, sizeof buf, "done: t=%.4g mass drift=%.3e rho_min=%.4g min_f=%.3e",
                b.time, std::abs(b.mass - a.mass) / std::max(1e-300, std::abs(a.mass)),
                b.rho_min, b.min_f);
  log_line(man, 1, buf);
  return 0;
}

int cmd_twin(const RunManifest& man, const Config& cfg) {
  const PhaseGrid g = grid_from(cfg);
  if (!cfg.has("symbol", "delta") || !cfg.has("symbol", "epsilon")) {
    throw ConfigError("twin experiments need [symbol] delta and epsilon");
  }

  ExperimentConfig ec;
  ec.grid = g;
  const std::string model = cfg.get_string("model", "type", "toy");
  ec.solver = solver_from(cfg, g, model == "landau" ? Model::landau : Model::toy);
  ec.initial = [&cfg](const PhaseGrid& gg) { return initial_from(cfg, gg); };
  const std::string kind = cfg.get_string("experiment", "kind", "bump");
  if (kind == "bump") {
    ec.kind = PerturbationKind::initial_bump;
  } else if (kind == "resolution") {
    ec.kind = PerturbationKind::resolution;
  } else if (kind == "timestep") {
    ec.kind = PerturbationKind::timestep;
  } else {
    throw ConfigError("experiment.kind must be bump, resolution or timestep");
  }
  ec.delta0 = cfg.get_double("experiment", "delta0", 1e-3);
  ec.sym = SymbolParams(cfg.require_double("symbol", "delta"),
                        cfg.require_double("symbol", "epsilon"));
  ec.weighted_delta = cfg.get_double("weighted", "delta", ec.sym.delta);
  ec.T0 = cfg.get_int("experiment", "t0_steps", 0) * ec.solver.dt;
  ec.ring_m = cfg.get_double("experiment", "ring_m", 4.0);
  ec.mollifier_radii = cfg.get_list("experiment", "radii", {0.8, 0.4, 0.2, 0.1});
  ec.commutator_T_list = cfg.get_list("experiment", "commutator_t_list", {});
  ec.snapshot_every = cfg.get_int("experiment", "snapshot_every", 1);
  ec.gauss_nodes = cfg.get_int("experiment", "gauss_nodes", 48);
  ec.validate();

  log_line(man, 1, "twin experiment: kind=" + kind + " delta0=" + std::to_string(ec.delta0));
  const UniquenessReport rep = twin_run(ec);
  fs::create_directories(man.output_dir);

  {
    std::ofstream os(fs::path(man.output_dir) / "report.csv");
    os << "# " << stamp(cfg, man) << "\n";
    os << "t,distance\n";
    char buf[96];
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rep.times[i], rep.distance[i]);
      os << buf;
    }
  }

  bool pass = !rep.aborted && rep.lapl.pass;
  if (ec.kind == PerturbationKind::initial_bump && ec.delta0 == 0.0) {
    pass = pass && rep.zero_distance;
  }
  if (!ec.mollifier_radii.empty()) pass = pass && rep.mollifier_decreasing;
  if (ec.solver.model == Model::toy) pass = pass && rep.rho_lower_ok;

  double sweep_slope = 0.0;
  const bool have_sweep = cfg.has("experiment", "delta_sweep");
  if (have_sweep) {
    const std::vector<double> deltas = cfg.get_list("experiment", "delta_sweep", {});
    const StabilitySweep sweep = stability_sweep(ec, deltas);
    sweep_slope = sweep.slope;
    std::ofstream os(fs::path(man.output_dir) / "slope.csv");
    os << "# " << stamp(cfg, man) << "\n";
    os << "delta0,sup_distance\n";
    char buf[96];
    for (std::size_t i = 0; i < sweep.delta0.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", sweep.delta0[i], sweep.sup_distance[i]);
      os << buf;
    }
    os << "# slope = " << sweep.slope << "\n";
    pass = pass && sweep.slope > 0.85 && sweep.slope < 1.15;
  }

  {
    std::ofstream os(fs::path(man.output_dir) / "report.txt");
    os << "# " << stamp(cfg, man) << "\n";
    os << "twin experiment (" << kind << ", delta0 = " << ec.delta0 << ")\n";
    os << "aborted:              " << (rep.aborted ? "yes: " + rep.note : "no") << "\n";
    os << "sup distance:         " << rep.sup_distance << "\n";
    os << "zero distance:        " << (rep.zero_distance ? "yes" : "no") << "\n";
    os << "weighted base energy: " << rep.energy.base << "\n";
    os << "ring dissipation:     " << rep.energy.dissipation << "\n";
    os << "lapl bound:           lhs = " << rep.lapl.lhs << " <= rhs = " << rep.lapl.rhs
       << " : " << (rep.lapl.pass ? "PASS" : "FAIL") << "\n";
    os << "rho lower bound:      min " << rep.rho_min_observed << " vs " << rep.rho_bound
       << " : " << (rep.rho_lower_ok ? "PASS" : "FAIL") << "\n";
    if (!rep.mollifier.empty()) {
      os << "mollifier gaps (a, eps_rho, eps_phase):\n";
      for (const auto& p : rep.mollifier) {
        os << "  " << p.a << "  " << p.eps_rho << "  " << p.eps_phase << "\n";
      }
      os << "mollifier decreasing: " << (rep.mollifier_decreasing ? "PASS" : "FAIL") << "\n";
    }
    if (rep.commutator_run) {
      os << "commutator ratios r(T) against the initial density:\n";
      for (const auto& pt : rep.commutator.points) {
        os << "  T = " << pt.T << "  |[M,phi]f| = " << pt.comm_norm << "  r = " << pt.ratio
           << "\n";
      }
      os << "commutator slope:     " << rep.commutator.slope << "\n";
    }
    if (have_sweep) os << "stability slope:      " << sweep_slope << "\n";
    os << "verdict:              " << (pass ? "PASS" : "FAIL") << "\n";
  }
  log_line(man, 1, std::string("twin verdict: ") + (pass ? "PASS" : "FAIL"));
  return pass ? 0 : 1;
}

int cmd_report(const RunManifest& man) {
  const fs::path dir(man.output_dir);
  const fs::path diag = dir / "diagnostics.csv";
  const fs::path rep = dir / "report.txt";
  if (fs::exists(rep)) {
    std::ifstream is(rep);
    std::string line;
    while (std::getline(is, line)) std::printf("%s\n", line.c_str());
    return 0;
  }
  if (!fs::exists(diag)) {
    std::fprintf(stderr, "report: no diagnostics.csv or report.txt under %s\n",
                 man.output_dir.c_str());
    return 2;
  }
  std::ifstream is(diag);
  std::string line;
  std::vector<StepDiagnostics> series;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    StepDiagnostics d;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &d.time, &d.mass,
                    &d.momentum[0], &d.momentum[1], &d.momentum[2], &d.energy, &d.min_f,
                    &d.rho_min, &d.wsup_k0) == 9) {
      series.push_back(d);
    }
  }
  if (series.size() < 2) {
    std::fprintf(stderr, "report: diagnostics.csv has no usable rows\n");
    return 2;
  }
  const auto& a = series.front();
  const auto& b = series.back();
  std::printf("trajectory summary over t in [%g, %g], %zu records\n", a.time, b.time,
              series.size());
  std::printf("  mass drift     : %.3e relative\n",
              std::abs(b.mass - a.mass) / std::max(1e-300, std::abs(a.mass)));
  std::printf("  momentum drift : %.3e absolute\n", (b.momentum - a.momentum).norm());
  std::printf("  energy change  : %.6g -> %.6g\n", a.energy, b.energy);
  double rho_min = 1e300, min_f = 1e300;
  for (const auto& d : series) {
    rho_min = std::min(rho_min, d.rho_min);
    min_f = std::min(min_f, d.min_f);
  }
  std::printf("  min rho        : %.6g\n", rho_min);
  std::printf("  min f          : %.3e\n", min_f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral kinetic toolkit"};
  app.require_subcommand(1);

  RunManifest man;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", man.config_path, "configuration file");
    if (needs_config) opt->required();
    sub->add_option("--out", man.output_dir, "output directory");
    sub->add_option("--seed", man.seed, "seed for randomized sweeps");
    sub->add_option("--log", man.log_level, "log level: quiet|info|debug");
  };

  add_common(app.add_subcommand("verify", "run the lemma-level property suites"), true);
  add_common(app.add_subcommand("solve-toy", "integrate the toy model"), true);
  add_common(app.add_subcommand("solve-landau", "integrate the viscous Landau model"), true);
  add_common(app.add_subcommand("twin", "twin-solution uniqueness experiment"), true);
  add_common(app.add_subcommand("report", "summarize an existing output directory"), false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  man.command = app.get_subcommands().front()->get_name();

  try {
    if (man.command == "report") return cmd_report(man);
    const Config cfg = Config::from_file(man.config_path);
    if (man.command == "verify") return cmd_verify(man, cfg);
    if (man.command == "solve-toy") return cmd_solve(man, cfg, Model::toy);
    if (man.command == "solve-landau") return cmd_solve(man, cfg, Model::landau);
    if (man.command == "twin") return cmd_twin(man, cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
