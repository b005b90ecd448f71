#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mkin/initial.hpp"
#include "mkin/io.hpp"
#include "mkin/spectral.hpp"
#include "mkin/symbol.hpp"
#include "oracles.hpp"

using namespace mkin;

namespace {

Field random_field(const PhaseGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field f(g);
  for (long i = 0; i < f.values.size(); ++i) f.values[i] = gauss(rng);
  return f;
}

}  // namespace

TEST_CASE("roundtrip and Parseval") {
  const PhaseGrid g(1, 8, 8, 4.0);
  const Field f = random_field(g, 9u);
  const SpectralField F = forward(f);
  const Field back = inverse(F);

  CHECK((back.values - f.values).abs().maxCoeff() / f.values.abs().maxCoeff() < 1e-12);
  CHECK(l2_norm(F) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("impulse spreads flat, plane wave lands on two modes") {
  const PhaseGrid g(1, 8, 8, 4.0);

  Field spike(g);
  spike.values[0] = 1.0;
  const SpectralField S = forward(spike);
  const double mag0 = std::abs(S.modes[0]);
  for (long i = 0; i < S.modes.size(); ++i) {
    CHECK(std::abs(S.modes[i]) == doctest::Approx(mag0).epsilon(1e-12));
  }

  // cos(x1) e^{-|v|^2}: two conjugate eta-modes carrying a Gaussian xi-profile
  Field wave(g);
  long idx = 0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    const double c = std::cos(g.x_coord(static_cast<int>(ix)));
    for (int j0 = 0; j0 < g.n_v; ++j0)
      for (int j1 = 0; j1 < g.n_v; ++j1)
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double v2 = g.v_coord(j0) * g.v_coord(j0) + g.v_coord(j1) * g.v_coord(j1) +
                            g.v_coord(j2) * g.v_coord(j2);
          wave.values[idx] = c * std::exp(-v2);
        }
  }
  const SpectralField W = forward(wave);
  const long nv3 = g.n_vel();
  double off_mass = 0.0, on_mass = 0.0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    const double block = W.modes.segment(ix * nv3, nv3).abs2().sum();
    const int eta = PhaseGrid::signed_index(static_cast<int>(ix), g.n_x);
    if (eta == 1 || eta == -1) {
      on_mass += block;
    } else {
      off_mass += block;
    }
  }
  CHECK(off_mass / on_mass < 1e-20);
}

TEST_CASE("multiplier application") {
  const PhaseGrid g(1, 8, 8, 4.0);
  const Field f = random_field(g, 10u);

  SUBCASE("identity") {
    const Field same = apply_multiplier(f, [](const Vector3d&, const Vector3d&) { return 1.0; });
    CHECK((same.values - f.values).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("M at t = T is the identity") {
    const SymbolParams sym(1.0, 0.5);
    const Field same = apply_multiplier(f, [&](const Vector3d& eta, const Vector3d& xi) {
      return eval_m(sym, {1.0, 1.0, xi, eta});
    });
    CHECK((same.values - f.values).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("contractive symbols never grow the L2 norm") {
    const SymbolParams sym(1.0, 0.5);
    const Field mf = apply_multiplier(f, [&](const Vector3d& eta, const Vector3d& xi) {
      return eval_m(sym, {0.0, 1.0, xi, eta});
    });
    CHECK(l2_norm(mf) <= l2_norm(f) * (1.0 + 1e-12));
  }
}

TEST_CASE("transport shear") {
  const PhaseGrid g(1, 16, 16, 6.0);
  const double dxi = g.dxi();

  SUBCASE("dt = 0 is the identity") {
    const Field f = random_field(g, 12u);
    const Field moved = transport_shear(f, 0.0);
    CHECK((moved.values - f.values).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("x-independent fields are fixed points") {
    Field f = maxwellian(g, 1.0);
    const Field moved = transport_shear(f, 4.0 * dxi);
    CHECK((moved.values - f.values).abs().maxCoeff() /
              std::max(1e-300, f.values.abs().maxCoeff()) < 1e-11);
  }
  SUBCASE("rejects unaligned dt") {
    const Field f = random_field(g, 13u);
    CHECK_THROWS_AS(transport_shear(f, 0.5 * dxi), std::invalid_argument);
  }
  SUBCASE("closed-form characteristics") {
    // f0 = cos(x1) G(v) -> f(dt) = cos(x1 - dt v1) G(v)
    Field f0(g);
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix) {
      const double x0 = g.x_coord(static_cast<int>(ix));
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double q = g.v_coord(j0) * g.v_coord(j0) + g.v_coord(j1) * g.v_coord(j1) +
                             g.v_coord(j2) * g.v_coord(j2);
            f0.values[idx] = std::cos(x0) * std::exp(-0.5 * q);
          }
    }
    const double dt = 3.0 * g.dxi();
    const Field ft = transport_shear(f0, dt);
    idx = 0;
    double max_err = 0.0;
    for (long ix = 0; ix < g.n_space(); ++ix) {
      const double x0 = g.x_coord(static_cast<int>(ix));
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double q = g.v_coord(j0) * g.v_coord(j0) + g.v_coord(j1) * g.v_coord(j1) +
                             g.v_coord(j2) * g.v_coord(j2);
            const double expect = std::cos(x0 - dt * g.v_coord(j0)) * std::exp(-0.5 * q);
            max_err = std::max(max_err, std::abs(ft.values[idx] - expect));
          }
    }
    CHECK(max_err < 1e-10);
    CHECK(ft.time == doctest::Approx(dt));
  }
  SUBCASE("shear preserves moments and norms") {
    // n_x == n_v makes the shear a genuine permutation of real-space samples
    const PhaseGrid gp(1, 16, 16, 6.0);
    Field f = perturbed_maxwellian(gp, 0.5, 1.0, 0.3);
    const Moments before = moments(f);
    const double l2_before = l2_norm(f);
    const double l4_before = lp_norm(f, 4.0);
    const Field moved = transport_shear(f, gp.dxi());
    const Moments after = moments(moved);
    CHECK(after.mass == doctest::Approx(before.mass).epsilon(1e-13));
    CHECK(after.energy == doctest::Approx(before.energy).epsilon(1e-13));
    CHECK((after.momentum - before.momentum).norm() < 1e-13);
    CHECK(l2_norm(moved) == doctest::Approx(l2_before).epsilon(1e-13));
    CHECK(lp_norm(moved, 4.0) == doctest::Approx(l4_before).epsilon(1e-12));
  }
}

TEST_CASE("lapl inequality, discrete analogue") {
  // random modes, the M family over a (t, T) grid: quadruple sum bounded by
  // 2/(eps delta) times the base sum
  const PhaseGrid g(1, 8, 8, 4.0);
  const SymbolParams sym(0.5, 0.5);
  const Field h = random_field(g, 77u);
  const SpectralField H = forward(h);

  const double T0 = 1.0;
  const int n_t = 12, n_T = 200;
  double lhs = 0.0, base = 0.0;
  for (int it = 0; it < n_t; ++it) {
    const double t = T0 * it / n_t;
    const double wt = T0 / n_t;
    base += wt * H.modes.abs2().sum();
    // inner T-integral on a fine grid per mode
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix) {
      const double eta = PhaseGrid::signed_index(static_cast<int>(ix), g.n_x);
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const Vector3d xi(g.xi_coord(j0), g.xi_coord(j1), g.xi_coord(j2));
            const double amp = std::norm(H.modes[idx]);
            if (amp == 0.0) continue;
            double it_acc = 0.0;
            for (int iT = 0; iT < n_T; ++iT) {
              const double T = t + (T0 - t) * (iT + 0.5) / n_T;
              const double m = eval_m(sym, {t, T, xi, Vector3d(eta, 0, 0)});
              it_acc += (T0 - t) / n_T * m * m;
            }
            lhs += wt * xi.squaredNorm() * it_acc * amp;
          }
    }
  }
  CHECK(lhs <= 2.0 / (sym.epsilon * sym.delta) * base * (1.0 + 1e-9));
}

TEST_CASE("mollify") {
  const PhaseGrid g(1, 16, 16, 6.0);

  SUBCASE("constant fields are unchanged") {
    Field c(g);
    c.values.setConstant(0.7);
    for (auto kernel : {MollifyKernel::gaussian_xv, MollifyKernel::fejer_x}) {
      const Field out = mollify(c, 0.5, kernel);
      CHECK((out.values - 0.7).abs().maxCoeff() < 1e-13);
    }
  }
  SUBCASE("sup error decays with slope >= 1 on a smooth field") {
    const Field f = maxwellian(g, 1.0, 1.2);
    std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double a : radii) {
      const Field fa = mollify(f, a, MollifyKernel::gaussian_xv);
      errs.push_back((fa.values - f.values).abs().maxCoeff());
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(errs[i + 1] < errs[i]);
    CHECK(oracles::richardson_slope(radii, errs) >= 1.0);
  }
  SUBCASE("nonnegative kernel preserves positivity") {
    Field f = perturbed_maxwellian(g, 1.0, 1.0, 0.9);  // strongly modulated but >= 0
    CHECK(f.values.minCoeff() >= 0.0);
    const Field fa = mollify(f, 0.7, MollifyKernel::fejer_x);
    CHECK(fa.values.minCoeff() >= -1e-14);
  }
}

TEST_CASE("density and moments") {
  const PhaseGrid g(1, 8, 32, 8.0);

  SUBCASE("unit Gaussian in v, uniform in x") {
    const Field f = maxwellian(g, 2.0 * kPi);  // mean density 1
    const Eigen::ArrayXd rho = density(f);
    CHECK((rho - 1.0).abs().maxCoeff() < 1e-8);
  }
  SUBCASE("zero field") {
    const Field z(g);
    const Moments mom = moments(z);
    CHECK(mom.mass == 0.0);
    CHECK(mom.momentum.norm() == 0.0);
    CHECK(mom.energy == 0.0);
  }
  SUBCASE("shifted Gaussian carries momentum mass * u") {
    const Eigen::Vector3d u(0.75, -0.5, 0.25);
    const Field f = maxwellian(g, 3.0, 1.0, u);
    const Moments mom = moments(f);
    CHECK(mom.mass == doctest::Approx(3.0).epsilon(1e-9));
    CHECK((mom.momentum - mom.mass * u).norm() < 1e-8);
    // energy = mass (3 sigma^2 + |u|^2)
    CHECK(mom.energy ==
          doctest::Approx(mom.mass * (3.0 + u.squaredNorm())).epsilon(1e-8));
  }
}

TEST_CASE("weighted sup norm") {
  const PhaseGrid g(1, 4, 16, 6.0);

  SUBCASE("exact reciprocal weight") {
    Field f(g);
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix)
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double q = 1.0 + g.v_coord(j0) * g.v_coord(j0) +
                             g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
            f.values[idx] = std::pow(q, -2.0);
          }
    CHECK(weighted_sup_norm(f, 4.0) == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("zero field") {
    const Field z(g);
    CHECK(weighted_sup_norm(z, 4.0) == 0.0);
  }
  SUBCASE("Gaussian matches a brute-force scan") {
    const Field f = maxwellian(g, 1.0);
    const double k = 4.0;
    double brute = 0.0;
    long idx = 0;
    for (long ix = 0; ix < g.n_space(); ++ix)
      for (int j0 = 0; j0 < g.n_v; ++j0)
        for (int j1 = 0; j1 < g.n_v; ++j1)
          for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
            const double q = 1.0 + g.v_coord(j0) * g.v_coord(j0) +
                             g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
            brute = std::max(brute, std::pow(q, 0.5 * k) * std::abs(f.values[idx]));
          }
    CHECK(weighted_sup_norm(f, k) == doctest::Approx(brute).epsilon(1e-14));
  }
}

TEST_CASE("full 3-D spatial torus at small n_x") {
  const PhaseGrid g(3, 4, 8, 4.0);
  CHECK(g.n_space() == 64);
  const Field f = random_field(g, 77u);
  const Field back = inverse(forward(f));
  CHECK((back.values - f.values).abs().maxCoeff() / f.values.abs().maxCoeff() < 1e-12);

  // shear against characteristics: f0 = cos(x2) G(v) -> cos(x2 - dt v3) G(v)
  Field f0(g);
  long idx = 0;
  for (int i0 = 0; i0 < g.n_x; ++i0)
    for (int i1 = 0; i1 < g.n_x; ++i1)
      for (int i2 = 0; i2 < g.n_x; ++i2)
        for (int j0 = 0; j0 < g.n_v; ++j0)
          for (int j1 = 0; j1 < g.n_v; ++j1)
            for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
              const double q = g.v_coord(j0) * g.v_coord(j0) +
                               g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
              f0.values[idx] = std::cos(g.x_coord(i2)) * std::exp(-0.5 * q);
            }
  const double dt = 2.0 * g.dxi();
  const Field ft = transport_shear(f0, dt);
  idx = 0;
  double max_err = 0.0;
  for (int i0 = 0; i0 < g.n_x; ++i0)
    for (int i1 = 0; i1 < g.n_x; ++i1)
      for (int i2 = 0; i2 < g.n_x; ++i2)
        for (int j0 = 0; j0 < g.n_v; ++j0)
          for (int j1 = 0; j1 < g.n_v; ++j1)
            for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
              const double q = g.v_coord(j0) * g.v_coord(j0) +
                               g.v_coord(j1) * g.v_coord(j1) + g.v_coord(j2) * g.v_coord(j2);
              const double expect =
                  std::cos(g.x_coord(i2) - dt * g.v_coord(j2)) * std::exp(-0.5 * q);
              max_err = std::max(max_err, std::abs(ft.values[idx] - expect));
            }
  CHECK(max_err < 1e-10);
}

TEST_CASE("snapshot roundtrip") {
  const PhaseGrid g(1, 4, 8, 4.0);
  Field f = random_field(g, 123u);
  f.time = 1.75;
  const std::string path = "/tmp/mkin_test_snapshot.bin";
  write_snapshot(path, f);
  const Field back = read_snapshot(path);
  CHECK(back.grid.n_v == g.n_v);
  CHECK(back.grid.l_v == g.l_v);
  CHECK(back.time == f.time);
  CHECK((back.values - f.values).abs().maxCoeff() == 0.0);
}
