#include "mkin/harness.hpp"

#include <cmath>
#include <stdexcept>

#include "mkin/initial.hpp"
#include "mkin/quadrature.hpp"
#include "mkin/spectral.hpp"

namespace mkin {

void ExperimentConfig::validate() const {
  if (delta0 < 0.0) throw std::invalid_argument("ExperimentConfig: delta0 must be >= 0");
  if (T0 > solver.t_end + 1e-12)
    throw std::invalid_argument("ExperimentConfig: T0 must not exceed t_end");
  if (!(ring_m > 3.0)) throw std::invalid_argument("ExperimentConfig: ring_m must be > 3");
  if (ring_m > solver.params.k0 || ring_m + solver.params.beta > solver.params.k0)
    throw std::invalid_argument("ExperimentConfig: need m <= k0 and m + beta <= k0");
  if (!initial) throw std::invalid_argument("ExperimentConfig: initial data builder missing");
}

Field weighted_difference(const Field& f, const Field& g, double m) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("weighted_difference: grid mismatch");
  Field w(f.grid);
  w.time = f.time;
  const PhaseGrid& gr = f.grid;
  long idx = 0;
  for (long ix = 0; ix < gr.n_space(); ++ix) {
    for (int j0 = 0; j0 < gr.n_v; ++j0) {
      const double v0 = gr.v_coord(j0);
      for (int j1 = 0; j1 < gr.n_v; ++j1) {
        const double v1 = gr.v_coord(j1);
        for (int j2 = 0; j2 < gr.n_v; ++j2, ++idx) {
          const double v2 = gr.v_coord(j2);
          const double wm = std::pow(1.0 + v0 * v0 + v1 * v1 + v2 * v2, 0.5 * m);
          w.values[idx] = wm * (f.values[idx] - g.values[idx]);
        }
      }
    }
  }
  return w;
}

std::vector<Field> ring_decompose(const Field& w, const DyadicPartition& part, double m) {
  const PhaseGrid& g = w.grid;
  std::vector<Field> rings;
  rings.reserve(part.n_max() + 1);
  for (int k = 0; k <= part.n_max(); ++k) rings.emplace_back(g);

  long idx = 0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      const double v0 = g.v_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        const double v1 = g.v_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double v2 = g.v_coord(j2);
          const double r2 = v0 * v0 + v1 * v1 + v2 * v2;
          const double wm = std::pow(1.0 + r2, 0.5 * m) * w.values[idx];
          if (wm == 0.0) continue;
          const double r = std::sqrt(r2);
          for (int k = 0; k <= part.n_max(); ++k) {
            const double th = part.theta(k, r);
            if (th != 0.0) rings[k].values[idx] = th * wm;
          }
        }
      }
    }
  }
  for (auto& rk : rings) rk.time = w.time;
  return rings;
}

namespace {

// trapezoid weights over the recorded times, truncated at T0
std::vector<double> trapezoid_weights(const std::vector<double>& times, double T0) {
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double a = times[i];
    const double b = std::min(times[i + 1], T0);
    if (b <= a) break;
    const double h = b - a;
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

// sum_modes |xi|^2 * [int_t^{T0} M^2 dT] * |w_hat|^2 * cell_volume, with M the
// ring symbol of strength delta_eff and exponent p.
double dissipation_at_t(const SpectralField& What, double t, double T0, double delta_eff,
                        double exponent_p, int gauss_nodes) {
  const PhaseGrid& g = What.grid;
  std::vector<double> nodes(gauss_nodes), wts(gauss_nodes);
  gauss_legendre(gauss_nodes, t, T0, nodes.data(), wts.data());

  double acc = 0.0;
  long idx = 0;
  const long nsp = g.n_space();
  for (long ix = 0; ix < nsp; ++ix) {
    Eigen::Vector3d eta = Eigen::Vector3d::Zero();
    if (g.dim_x == 1) {
      eta[0] = PhaseGrid::signed_index(static_cast<int>(ix), g.n_x);
    } else {
      const int i2 = static_cast<int>(ix % g.n_x);
      const int i1 = static_cast<int>((ix / g.n_x) % g.n_x);
      const int i0 = static_cast<int>(ix / (static_cast<long>(g.n_x) * g.n_x));
      eta = Eigen::Vector3d(PhaseGrid::signed_index(i0, g.n_x),
                            PhaseGrid::signed_index(i1, g.n_x),
                            PhaseGrid::signed_index(i2, g.n_x));
    }
    const double eta_sq = eta.squaredNorm();
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      const double x0 = g.xi_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        const double x1 = g.xi_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double x2 = g.xi_coord(j2);
          const double amp = std::norm(What.modes[idx]);
          if (amp == 0.0) continue;
          const double xi_sq = x0 * x0 + x1 * x1 + x2 * x2;
          if (xi_sq == 0.0) continue;
          const double xi_eta = x0 * eta[0] + x1 * eta[1] + x2 * eta[2];
          double it = 0.0;
          for (int q = 0; q < gauss_nodes; ++q) {
            const double s = nodes[q] - t;
            const double phi = phase_integral_core(s, xi_sq, xi_eta, eta_sq);
            const double m = std::pow(1.0 + delta_eff * phi, -exponent_p);
            it += wts[q] * m * m;
          }
          acc += xi_sq * it * amp;
        }
      }
    }
  }
  return acc * g.cell_volume();
}

}  // namespace

MWeightedEnergy m_weighted_energy(const std::vector<Field>& w, const std::vector<double>& times,
                                  double weighted_delta, double beta,
                                  const DyadicPartition& part, double T0, int gauss_nodes) {
  if (w.size() != times.size() || w.empty())
    throw std::invalid_argument("m_weighted_energy: snapshot/time mismatch");
  MWeightedEnergy out;
  const std::vector<double> wt = trapezoid_weights(times, T0);

  for (std::size_t i = 0; i < w.size(); ++i) {
    if (wt[i] == 0.0) continue;
    const double nrm = l2_norm(w[i]);
    out.base += wt[i] * nrm * nrm;

    // w already carries the <v>^m weight; the rings only localize it
    const std::vector<Field> rings = ring_decompose(w[i], part, 0.0);
    for (int n = 0; n <= part.n_max(); ++n) {
      if (rings[n].values.cwiseAbs().maxCoeff() == 0.0) continue;
      const SpectralField What = forward(rings[n]);
      const double delta_n = weighted_delta * std::exp2(beta * n);
      const double diss = dissipation_at_t(What, times[i], T0, delta_n, 1.0, gauss_nodes);
      out.dissipation += wt[i] * std::exp2(beta * n) * diss;
    }
  }
  return out;
}

LaplCheck lapl_trajectory_check(const std::vector<Field>& w, const std::vector<double>& times,
                                const SymbolParams& sym, double T0, int gauss_nodes) {
  if (w.size() != times.size() || w.empty())
    throw std::invalid_argument("lapl_trajectory_check: snapshot/time mismatch");
  LaplCheck out;
  const std::vector<double> wt = trapezoid_weights(times, T0);
  double base = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (wt[i] == 0.0) continue;
    const double nrm = l2_norm(w[i]);
    base += wt[i] * nrm * nrm;
    const SpectralField What = forward(w[i]);
    out.lhs += wt[i] * dissipation_at_t(What, times[i], T0, sym.delta, sym.exponent_p,
                                        gauss_nodes);
  }
  out.rhs = 2.0 / (sym.epsilon * sym.delta) * base;
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

CommutatorReport commutator_x_experiment(const Eigen::ArrayXd& phi, const Field& f,
                                         const SymbolParams& sym,
                                         const std::vector<double>& T_list) {
  CommutatorReport rep;
  const PhaseGrid& g = f.grid;
  rep.h5_norm = sobolev_norm_spatial(phi, g, 5.0);

  const Field phif = scale_by_spatial(f, phi);
  std::vector<double> logT, logC;
  for (double T : T_list) {
    auto mult = [&](const Vector3d& eta, const Vector3d& xi) {
      const double phase =
          phase_integral_core(T, xi.squaredNorm(), xi.dot(eta), eta.squaredNorm());
      return std::pow(1.0 + sym.delta * phase, -sym.exponent_p);
    };
    const Field Mf = apply_multiplier(f, mult);
    const Field Mphif = apply_multiplier(phif, mult);
    // [M, phi] f = M(phi f) - phi (M f)
    const Field phiMf = scale_by_spatial(Mf, phi);
    Field comm(g);
    comm.values = Mphif.values - phiMf.values;

    CommutatorPoint pt;
    pt.T = T;
    pt.comm_norm = l2_norm(comm);
    const double denom = T * rep.h5_norm * l2_norm(Mf);
    pt.ratio = denom > 0.0 ? pt.comm_norm / denom : 0.0;
    rep.points.push_back(pt);
    rep.max_ratio = std::max(rep.max_ratio, pt.ratio);
    if (pt.comm_norm > 0.0) {
      logT.push_back(std::log(T));
      logC.push_back(std::log(pt.comm_norm));
    }
  }
  rep.slope = fit_loglog_slope(logT, logC);
  return rep;
}

std::vector<MollifierPoint> mollifier_convergence(const std::vector<Field>& snaps,
                                                  const std::vector<double>& radii, double m,
                                                  double beta) {
  if (snaps.empty()) throw std::invalid_argument("mollifier_convergence: no snapshots");
  std::vector<MollifierPoint> out;
  const PhaseGrid& g = snaps.front().grid;
  const double wexp = m + 0.5 * std::abs(beta);

  for (double a : radii) {
    MollifierPoint pt;
    pt.a = a;
    for (const Field& f : snaps) {
      const Eigen::ArrayXd rho = density(f);
      const Eigen::ArrayXd rho_a = mollify_spatial(rho, g, a, MollifyKernel::fejer_x);
      pt.eps_rho = std::max(pt.eps_rho, (rho - rho_a).abs().maxCoeff());

      const Field fa = mollify(f, a, MollifyKernel::gaussian_xv);
      Field diff(g);
      diff.values = f.values - fa.values;
      const double sup_part = weighted_sup_norm(diff, wexp);
      // L1_v per x-point of the weighted difference
      double l1_part = 0.0;
      long idx = 0;
      for (long ix = 0; ix < g.n_space(); ++ix) {
        double acc = 0.0;
        for (int j0 = 0; j0 < g.n_v; ++j0) {
          const double v0 = g.v_coord(j0);
          for (int j1 = 0; j1 < g.n_v; ++j1) {
            const double v1 = g.v_coord(j1);
            for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
              const double v2 = g.v_coord(j2);
              acc += std::pow(1.0 + v0 * v0 + v1 * v1 + v2 * v2, 0.5 * wexp) *
                     std::abs(diff.values[idx]);
            }
          }
        }
        l1_part = std::max(l1_part, acc * g.vel_cell_volume());
      }
      pt.eps_phase = std::max(pt.eps_phase, std::max(sup_part, l1_part));
    }
    out.push_back(pt);
  }
  return out;
}

Field restrict_velocity(const Field& fine, const PhaseGrid& coarse) {
  const PhaseGrid& gf = fine.grid;
  if (coarse.n_v * 2 != gf.n_v || coarse.l_v != gf.l_v || coarse.n_x != gf.n_x ||
      coarse.dim_x != gf.dim_x) {
    throw std::invalid_argument("restrict_velocity: grids do not nest");
  }
  Field out(coarse);
  out.time = fine.time;
  long idx = 0;
  for (long ix = 0; ix < coarse.n_space(); ++ix) {
    for (int j0 = 0; j0 < coarse.n_v; ++j0) {
      for (int j1 = 0; j1 < coarse.n_v; ++j1) {
        for (int j2 = 0; j2 < coarse.n_v; ++j2, ++idx) {
          out.values[idx] = fine.values[gf.index(ix, 2 * j0, 2 * j1, 2 * j2)];
        }
      }
    }
  }
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

UniquenessReport twin_run(const ExperimentConfig& cfg) {
  cfg.validate();
  UniquenessReport rep;

  SolverConfig base_cfg = cfg.solver;
  base_cfg.snapshot_every = cfg.snapshot_every;

  const Field f0 = cfg.initial(cfg.grid);
  const Solver base_solver(cfg.grid, base_cfg);
  Trajectory tf = base_solver.run(f0);
  if (tf.aborted) {
    rep.aborted = true;
    rep.note = "base run aborted: " + tf.abort_reason;
    return rep;
  }

  // perturbed sibling
  Trajectory tg;
  PhaseGrid diag_grid = cfg.grid;
  std::vector<Field> f_snap = tf.snapshots;
  std::vector<double> snap_times = tf.snapshot_times;
  std::vector<Field> g_snap;

  if (cfg.kind == PerturbationKind::initial_bump) {
    Field g0 = f0;
    if (cfg.delta0 > 0.0) {
      const Field bump = bump_perturbation(cfg.grid, cfg.delta0);
      g0.values += bump.values;
    }
    tg = base_solver.run(std::move(g0));
    g_snap = tg.snapshots;
  } else if (cfg.kind == PerturbationKind::resolution) {
    PhaseGrid coarse = cfg.grid;
    coarse.n_v /= 2;
    coarse.validate();
    const Solver coarse_solver(coarse, base_cfg);
    tg = coarse_solver.run(cfg.initial(coarse));
    diag_grid = coarse;
    f_snap.clear();
    for (const Field& s : tf.snapshots) f_snap.push_back(restrict_velocity(s, coarse));
    g_snap = tg.snapshots;
  } else {  // timestep
    SolverConfig alt = base_cfg;
    alt.dt = 2.0 * base_cfg.dt;
    alt.snapshot_every = std::max(1, cfg.snapshot_every / 2);
    const Solver alt_solver(cfg.grid, alt);
    tg = alt_solver.run(f0);
    // align the common snapshot times
    std::vector<Field> fa, ga;
    std::vector<double> ta;
    std::size_t j = 0;
    for (std::size_t i = 0; i < snap_times.size(); ++i) {
      while (j < tg.snapshot_times.size() && tg.snapshot_times[j] < snap_times[i] - 1e-9) ++j;
      if (j < tg.snapshot_times.size() &&
          std::abs(tg.snapshot_times[j] - snap_times[i]) < 1e-9) {
        fa.push_back(f_snap[i]);
        ga.push_back(tg.snapshots[j]);
        ta.push_back(snap_times[i]);
      }
    }
    f_snap = std::move(fa);
    g_snap = std::move(ga);
    snap_times = std::move(ta);
  }

  if (tg.aborted) {
    rep.aborted = true;
    rep.note = "perturbed run aborted: " + tg.abort_reason;
    return rep;
  }
  if (f_snap.size() != g_snap.size() || f_snap.empty()) {
    rep.aborted = true;
    rep.note = "snapshot cadences do not align";
    return rep;
  }

  // distance series and weighted differences
  std::vector<Field> w_snap;
  bool all_zero = true;
  for (std::size_t i = 0; i < f_snap.size(); ++i) {
    Field diff(diag_grid);
    diff.values = f_snap[i].values - g_snap[i].values;
    diff.time = snap_times[i];
    const double dist = l2_norm(diff);
    rep.times.push_back(snap_times[i]);
    rep.distance.push_back(dist);
    rep.sup_distance = std::max(rep.sup_distance, dist);
    if (dist != 0.0) all_zero = false;
    w_snap.push_back(weighted_difference(f_snap[i], g_snap[i], cfg.ring_m));
  }
  rep.zero_distance = all_zero;

  const double T0 = std::min(cfg.horizon(), snap_times.back());
  const DyadicPartition part = DyadicPartition::for_box(diag_grid.l_v);
  rep.energy = m_weighted_energy(w_snap, snap_times, cfg.weighted_delta,
                                 cfg.solver.params.beta, part, T0, cfg.gauss_nodes);
  rep.lapl = lapl_trajectory_check(w_snap, snap_times, cfg.sym, T0, cfg.gauss_nodes);

  if (!cfg.mollifier_radii.empty()) {
    rep.mollifier = mollifier_convergence(f_snap, cfg.mollifier_radii,
                                          cfg.ring_m, cfg.solver.params.beta);
    rep.mollifier_decreasing = true;
    for (std::size_t i = 0; i + 1 < rep.mollifier.size(); ++i) {
      if (rep.mollifier[i + 1].eps_rho > rep.mollifier[i].eps_rho * (1.0 + 1e-9) ||
          rep.mollifier[i + 1].eps_phase > rep.mollifier[i].eps_phase * (1.0 + 1e-9)) {
        rep.mollifier_decreasing = false;
      }
    }
  }

  if (!cfg.commutator_T_list.empty()) {
    // multiplier: the initial density, the coefficient the models commute
    // against; field: the initial data itself
    rep.commutator =
        commutator_x_experiment(density(f0), f0, cfg.sym, cfg.commutator_T_list);
    rep.commutator_run = true;
  }

  rep.rho_bound = 0.5 * cfg.solver.params.c0;
  rep.rho_min_observed = 1e300;
  for (const auto& d : tf.series) {
    if (d.time > T0 + 1e-12) break;
    rep.rho_min_observed = std::min(rep.rho_min_observed, d.rho_min);
  }
  rep.rho_lower_ok = rep.rho_min_observed >= rep.rho_bound;
  return rep;
}

StabilitySweep stability_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas) {
  StabilitySweep sweep;
  std::vector<double> lx, ly;
  for (double d : deltas) {
    ExperimentConfig c = cfg;
    c.kind = PerturbationKind::initial_bump;
    c.delta0 = d;
    c.mollifier_radii.clear();
    const UniquenessReport rep = twin_run(c);
    if (rep.aborted) throw std::runtime_error("stability_sweep: " + rep.note);
    sweep.delta0.push_back(d);
    sweep.sup_distance.push_back(rep.sup_distance);
    if (d > 0.0 && rep.sup_distance > 0.0) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(rep.sup_distance));
    }
  }
  sweep.slope = fit_loglog_slope(lx, ly);
  return sweep;
}

}  // namespace mkin
