#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mkin/harness.hpp"
#include "mkin/initial.hpp"
#include "mkin/spectral.hpp"
#include "oracles.hpp"

using namespace mkin;

namespace {

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.grid = PhaseGrid(1, 8, 8, 4.0);
  cfg.solver.model = Model::toy;
  cfg.solver.scheme = Scheme::lie;
  cfg.solver.dt = cfg.grid.dxi();
  cfg.solver.t_end = 6 * cfg.solver.dt;
  cfg.solver.params.beta = 0.0;
  cfg.solver.params.c0 = 0.008;
  cfg.solver.cfl_safety = 0.4;
  cfg.initial = [](const PhaseGrid& g) {
    return perturbed_maxwellian(g, 0.01 * 2.0 * kPi, 0.8, 0.15);
  };
  cfg.delta0 = 1e-3;
  cfg.ring_m = 4.0;
  cfg.solver.params.k0 = 10.0;
  cfg.mollifier_radii = {0.8, 0.4, 0.2};
  cfg.T0 = cfg.solver.t_end;
  cfg.gauss_nodes = 32;
  return cfg;
}

}  // namespace

TEST_CASE("ring decomposition") {
  const PhaseGrid g(1, 2, 16, 6.0);
  const DyadicPartition part = DyadicPartition::for_box(g.l_v);
  const Field w = oracles::random_smooth_field(g, 3u, false);
  const double m = 4.0;
  const std::vector<Field> rings = ring_decompose(w, part, m);

  SUBCASE("reconstruction and support") {
    Field sum(g), weighted(g);
    for (const auto& r : rings) sum.values += r.values;
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix)
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double q = 1.0 + g.v_coord(j0) * g.v_coord(j0) +
                             g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
            weighted.values[idx] = std::pow(q, 0.5 * m) * w.values[idx];
          }
    CHECK((sum.values - weighted.values).abs().maxCoeff() /
              weighted.values.abs().maxCoeff() < 1e-12);

    // supports: ring k vanishes off V_k
    for (int k = 0; k <= part.n_max(); ++k) {
      idx = 0;
      for (long ix = 0; ix < g.n_space(); ++ix)
        for (int j0 = 0; j0 < g.n_v; ++j0)
          for (int j1 = 0; j1 < g.n_v; ++j1)
            for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
              const double r = std::sqrt(g.v_coord(j0) * g.v_coord(j0) +
                                         g.v_coord(j1) * g.v_coord(j1) +
                                         g.v_coord(j2) * g.v_coord(j2));
              const bool outside =
                  (k > 0 && r <= part.ring_lower(k)) || r >= part.ring_upper(k);
              if (outside) {
                CHECK(rings[k].values[idx] == 0.0);
              }
            }
    }

    // sum of squares keeps at least a third of the weighted mass
    double sq = 0.0;
    for (const auto& r : rings) sq += r.values.square().sum();
    CHECK(sq >= (1.0 / 3.0 - 1e-12) * weighted.values.square().sum());
  }

  SUBCASE("field concentrated under |v| < 3 only touches rings 0 and 1") {
    Field low(g);
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix)
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double r2 = g.v_coord(j0) * g.v_coord(j0) +
                              g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
            low.values[idx] = r2 < 9.0 ? std::exp(-r2) : 0.0;
          }
    const auto lr = ring_decompose(low, part, m);
    for (int k = 2; k <= part.n_max(); ++k) CHECK(lr[k].values.abs().maxCoeff() == 0.0);
    CHECK(lr[0].values.abs().maxCoeff() > 0.0);
  }
}

TEST_CASE("weighted energies") {
  const PhaseGrid g(1, 8, 8, 4.0);
  const DyadicPartition part = DyadicPartition::for_box(g.l_v);

  SUBCASE("zero trajectory") {
    std::vector<Field> w(3, Field(g));
    std::vector<double> times{0.0, 0.5, 1.0};
    const MWeightedEnergy e = m_weighted_energy(w, times, 0.25, 0.0, part, 1.0);
    CHECK(e.base == 0.0);
    CHECK(e.dissipation == 0.0);
  }

  SUBCASE("single mode matches the 1-D quadrature reduction") {
    // w(t) = cos(eta0 x1 + xi0 v1) psi(t)
    const int eta0 = 1;
    const double xi0 = 2.0 * g.dxi();
    auto psi = [](double t) { return std::exp(-0.7 * t); };
    std::vector<Field> w;
    std::vector<double> times;
    for (int s = 0; s <= 4; ++s) {
      const double t = 0.25 * s;
      Field f(g);
      long idx = 0;
      for (long ix = 0; ix < g.n_space(); ++ix) {
        const double x = g.x_coord(static_cast<int>(ix));
        for (int j0 = 0; j0 < g.n_v; ++j0)
          for (int j1 = 0; j1 < g.n_v; ++j1)
            for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
              f.values[idx] = std::cos(eta0 * x + xi0 * g.v_coord(j0)) * psi(t);
            }
      }
      w.push_back(std::move(f));
      times.push_back(t);
    }
    const double T0 = 1.0;
    const SymbolParams sym(0.5, 0.5);
    const LaplCheck chk = lapl_trajectory_check(w, times, sym, T0, 48);

    // oracle: trapezoid in t, adaptive quadrature of M^2 in T per mode pair
    const double n2 = l2_norm(w[0]) * l2_norm(w[0]) / (psi(0.0) * psi(0.0));
    double lhs = 0.0, base = 0.0;
    std::vector<double> wt(times.size(), 0.25);
    wt.front() = wt.back() = 0.125;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      const double amp = psi(t) * psi(t) * n2;
      base += wt[i] * amp;
      const double it = mkin::adaptive_simpson(
          [&](double T) {
            const PhasePoint p{t, T, Vector3d(xi0, 0, 0), Vector3d(eta0, 0, 0)};
            const double m = eval_m(sym, p);
            return m * m;
          },
          t, T0, 1e-12);
      lhs += wt[i] * amp * xi0 * xi0 * it;
    }
    CHECK(chk.lhs == doctest::Approx(lhs).epsilon(1e-6));
    CHECK(chk.rhs == doctest::Approx(2.0 / (sym.epsilon * sym.delta) * base).epsilon(1e-12));
    CHECK(chk.pass);
  }

  SUBCASE("weighted dissipation against a naive reimplementation") {
    std::vector<Field> w;
    std::vector<double> times;
    for (int s = 0; s < 3; ++s) {
      w.push_back(oracles::random_smooth_field(g, 40u + s, false, 1.0));
      times.push_back(0.4 * s);
    }
    const double T0 = 0.8, delta = 0.3, beta = -1.0;
    const MWeightedEnergy got = m_weighted_energy(w, times, delta, beta, part, T0, 48);

    double base = 0.0, diss = 0.0;
    std::vector<double> wt{0.2, 0.4, 0.2};
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double nrm = l2_norm(w[i]);
      base += wt[i] * nrm * nrm;
      const auto rings = ring_decompose(w[i], DyadicPartition::for_box(g.l_v), 0.0);
      for (int n = 0; n < static_cast<int>(rings.size()); ++n) {
        const SpectralField Wn = forward(rings[n]);
        const double dn = delta * std::exp2(beta * n);
        long idx = 0;
        double acc = 0.0;
        for (long ix = 0; ix < g.n_space(); ++ix) {
          const double eta = PhaseGrid::signed_index(static_cast<int>(ix), g.n_x);
          for (int j0 = 0; j0 < g.n_v; ++j0)
            for (int j1 = 0; j1 < g.n_v; ++j1)
              for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
                const Vector3d xi(g.xi_coord(j0), g.xi_coord(j1), g.xi_coord(j2));
                const double amp = std::norm(Wn.modes[idx]);
                if (amp == 0.0 || xi.squaredNorm() == 0.0) continue;
                const double it = mkin::adaptive_simpson(
                    [&](double T) {
                      const double phi = phase_integral_core(
                          T - times[i], xi.squaredNorm(), xi.dot(Vector3d(eta, 0, 0)),
                          eta * eta);
                      const double m = 1.0 / (1.0 + dn * phi);
                      return m * m;
                    },
                    times[i], T0, 1e-10);
                acc += xi.squaredNorm() * it * amp;
              }
        }
        diss += wt[i] * std::exp2(beta * n) * acc * g.cell_volume();
      }
    }
    CHECK(got.base == doctest::Approx(base).epsilon(1e-12));
    CHECK(got.dissipation == doctest::Approx(diss).epsilon(1e-7));
  }
}

TEST_CASE("commutator experiment") {
  const PhaseGrid g(1, 16, 8, 4.0);
  const Field f = oracles::random_smooth_field(g, 9u, false);
  const SymbolParams sym(0.5, 0.5);

  SUBCASE("constant multiplier commutes exactly") {
    Eigen::ArrayXd phi = Eigen::ArrayXd::Constant(g.n_space(), 2.5);
    const CommutatorReport rep = commutator_x_experiment(phi, f, sym, {0.1, 0.2, 0.4});
    for (const auto& pt : rep.points) CHECK(pt.comm_norm < 1e-12);
  }

  SUBCASE("cos(x) multiplier: slope near one and bounded ratios") {
    Eigen::ArrayXd phi(g.n_space());
    for (long ix = 0; ix < g.n_space(); ++ix) phi[ix] = std::cos(g.x_coord(static_cast<int>(ix)));
    // window where the saturation crossover delta T <xi>^2 ~ 1 sits mid-range
    std::vector<double> T_list;
    for (int i = 0; i <= 6; ++i) T_list.push_back(0.6 * std::pow(10.0, i / 6.0 - 0.5));
    const CommutatorReport rep = commutator_x_experiment(phi, f, sym, T_list);
    CHECK(rep.slope > 0.8);
    CHECK(rep.slope < 1.2);
    CHECK(rep.max_ratio < 10.0);
    CHECK(rep.max_ratio > 0.0);
    // commutator vanishes as T -> 0
    CHECK(rep.points.front().comm_norm < rep.points.back().comm_norm);
    const CommutatorReport tiny = commutator_x_experiment(phi, f, sym, {1e-5});
    CHECK(tiny.points.front().comm_norm < 1e-4 * rep.points.back().comm_norm);
  }
}

TEST_CASE("mollifier convergence") {
  const PhaseGrid g(1, 8, 16, 6.0);

  SUBCASE("constant field has zero gap") {
    Field c(g);
    c.values.setConstant(0.3);
    const auto pts = mollifier_convergence({c}, {0.5, 0.25}, 4.0, 0.0);
    for (const auto& p : pts) {
      CHECK(p.eps_rho < 1e-12);
      CHECK(p.eps_phase < 1e-9);  // roundoff amplified by the <v>^m weight
    }
  }

  SUBCASE("smooth field: decreasing to small") {
    const Field f = maxwellian(g, 1.0, 1.1);
    const auto pts = mollifier_convergence({f}, {0.8, 0.4, 0.2, 0.1, 0.05, 0.025}, 4.0, 0.0);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      CHECK(pts[i + 1].eps_rho <= pts[i].eps_rho * (1.0 + 1e-9));
      CHECK(pts[i + 1].eps_phase <= pts[i].eps_phase * (1.0 + 1e-9));
    }
    // the gap norm is measured in the same weighted Linf ^ L1 norm as f itself
    double b_l1 = 0.0;
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix) {
      double acc = 0.0;
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double q = 1.0 + g.v_coord(j0) * g.v_coord(j0) +
                             g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
            acc += q * q * std::abs(f.values[idx]);
          }
      b_l1 = std::max(b_l1, acc * g.vel_cell_volume());
    }
    const double baseline = std::max(weighted_sup_norm(f, 4.0), b_l1);
    CHECK(pts.back().eps_phase < 1e-3 * baseline);
  }

  SUBCASE("Lipschitz modulus bound") {
    // f = sin(v1): Lipschitz constant 1 in phase space; the x,v mollifier
    // shifts by at most a in RMS, so the weighted gap at weight 0 obeys L a
    Field f(g);
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix)
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx)
            f.values[idx] = std::sin(kPi / g.l_v * g.v_coord(j0));
    const double L = kPi / g.l_v;
    for (double a : {0.5, 0.25}) {
      const Field fa = mollify(f, a, MollifyKernel::gaussian_xv);
      const double gap = (f.values - fa.values).abs().maxCoeff();
      CHECK(gap <= L * a + 1e-9);
    }
  }
}

TEST_CASE("twin runs") {
  SUBCASE("zero perturbation: identically zero distance") {
    ExperimentConfig cfg = small_experiment();
    cfg.delta0 = 0.0;
    const UniquenessReport rep = twin_run(cfg);
    REQUIRE_FALSE(rep.aborted);
    CHECK(rep.zero_distance);
    for (double d : rep.distance) CHECK(d == 0.0);
    CHECK(rep.lapl.pass);
    CHECK(rep.rho_lower_ok);
  }

  SUBCASE("determinism: identical configs give bit-identical reports") {
    ExperimentConfig cfg = small_experiment();
    const UniquenessReport a = twin_run(cfg);
    const UniquenessReport b = twin_run(cfg);
    REQUIRE(a.distance.size() == b.distance.size());
    for (std::size_t i = 0; i < a.distance.size(); ++i) CHECK(a.distance[i] == b.distance[i]);
    CHECK(a.energy.base == b.energy.base);
    CHECK(a.energy.dissipation == b.energy.dissipation);
    CHECK(a.lapl.lhs == b.lapl.lhs);
  }

  SUBCASE("bump twin: finite distance, trajectory-wise bound, monitors") {
    ExperimentConfig cfg = small_experiment();
    const UniquenessReport rep = twin_run(cfg);
    REQUIRE_FALSE(rep.aborted);
    CHECK_FALSE(rep.zero_distance);
    CHECK(rep.sup_distance > 0.0);
    CHECK(rep.lapl.pass);
    CHECK(rep.mollifier_decreasing);
    CHECK(rep.energy.base > 0.0);
    CHECK(rep.energy.dissipation > 0.0);
  }

  SUBCASE("resolution twin restricts onto the coarse grid") {
    ExperimentConfig cfg = small_experiment();
    cfg.grid = PhaseGrid(1, 8, 16, 4.0);
    cfg.kind = PerturbationKind::resolution;
    cfg.mollifier_radii.clear();
    const UniquenessReport rep = twin_run(cfg);
    REQUIRE_FALSE(rep.aborted);
    CHECK(rep.sup_distance > 0.0);
    CHECK(rep.lapl.pass);
  }

  SUBCASE("timestep twin: splitting-order decay of the distance") {
    // needs the velocity spectrum resolved to machine level; otherwise the
    // distance floor is set by top-mode integration error, not the splitting
    ExperimentConfig cfg = small_experiment();
    cfg.grid = PhaseGrid(1, 8, 32, 8.0);
    cfg.initial = [](const PhaseGrid& g) {
      return perturbed_maxwellian(g, 0.02 * 2.0 * kPi, 1.0, 0.15);
    };
    cfg.solver.scheme = Scheme::strang;
    cfg.solver.dt = cfg.grid.dxi();
    cfg.solver.t_end = 8 * cfg.solver.dt;  // divisible through both doublings
    cfg.T0 = cfg.solver.t_end;
    cfg.kind = PerturbationKind::timestep;
    cfg.mollifier_radii.clear();
    const UniquenessReport d1 = twin_run(cfg);  // dt vs 2 dt

    ExperimentConfig cfg2 = cfg;
    cfg2.solver.dt = 2.0 * cfg.solver.dt;
    cfg2.snapshot_every = 1;
    const UniquenessReport d2 = twin_run(cfg2);  // 2 dt vs 4 dt
    REQUIRE_FALSE(d1.aborted);
    REQUIRE_FALSE(d2.aborted);
    const double slope = std::log(d2.sup_distance / d1.sup_distance) / std::log(2.0);
    CHECK(slope > 1.7);
    CHECK(slope < 2.4);
  }
}

TEST_CASE("stability sweep has unit slope") {
  ExperimentConfig cfg = small_experiment();
  cfg.mollifier_radii.clear();
  const StabilitySweep sweep = stability_sweep(cfg, {1e-2, 1e-3, 1e-4});
  CHECK(sweep.slope > 0.85);
  CHECK(sweep.slope < 1.15);
}

TEST_CASE("restriction to a nested grid") {
  const PhaseGrid fine(1, 4, 16, 6.0);
  PhaseGrid coarse = fine;
  coarse.n_v = 8;
  const Field f = oracles::random_smooth_field(fine, 21u, false);
  const Field r = restrict_velocity(f, coarse);
  CHECK(r.values[coarse.index(1, 2, 3, 1)] == f.values[fine.index(1, 4, 6, 2)]);
  CHECK_THROWS_AS(restrict_velocity(f, PhaseGrid(1, 4, 4, 6.0)), std::invalid_argument);
}
