#include "mkin/initial.hpp"

#include <cmath>

namespace mkin {

namespace {

template <class SpatialFn, class VelocityFn>
Field build(const PhaseGrid& g, SpatialFn&& sx, VelocityFn&& fv) {
  Field f(g);
  long idx = 0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    double xfac;
    if (g.dim_x == 1) {
      xfac = sx(g.x_coord(static_cast<int>(ix)), 0.0, 0.0);
    } else {
      const int i2 = static_cast<int>(ix % g.n_x);
      const int i1 = static_cast<int>((ix / g.n_x) % g.n_x);
      const int i0 = static_cast<int>(ix / (static_cast<long>(g.n_x) * g.n_x));
      xfac = sx(g.x_coord(i0), g.x_coord(i1), g.x_coord(i2));
    }
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      const double v0 = g.v_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        const double v1 = g.v_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          f.values[idx] = xfac * fv(v0, v1, g.v_coord(j2));
        }
      }
    }
  }
  return f;
}

double gauss3(double v0, double v1, double v2, const Eigen::Vector3d& u, double sigma) {
  const double s2 = sigma * sigma;
  const double q = (v0 - u[0]) * (v0 - u[0]) + (v1 - u[1]) * (v1 - u[1]) +
                   (v2 - u[2]) * (v2 - u[2]);
  return std::exp(-0.5 * q / s2) / std::pow(2.0 * kPi * s2, 1.5);
}

}  // namespace

Field maxwellian(const PhaseGrid& g, double mass, double sigma, const Eigen::Vector3d& u) {
  const double rho = mass / std::pow(2.0 * kPi, g.dim_x);
  return build(
      g, [rho](double, double, double) { return rho; },
      [&](double v0, double v1, double v2) { return gauss3(v0, v1, v2, u, sigma); });
}

Field perturbed_maxwellian(const PhaseGrid& g, double mass, double sigma, double eps,
                           int k_mode, const Eigen::Vector3d& u) {
  const double rho = mass / std::pow(2.0 * kPi, g.dim_x);
  return build(
      g,
      [rho, eps, k_mode](double x0, double, double) {
        return rho * (1.0 + eps * std::cos(k_mode * x0));
      },
      [&](double v0, double v1, double v2) { return gauss3(v0, v1, v2, u, sigma); });
}

Field two_bump(const PhaseGrid& g, double mass, double sigma, double drift) {
  const double rho = 0.5 * mass / std::pow(2.0 * kPi, g.dim_x);
  const Eigen::Vector3d up(drift, 0.0, 0.0), um(-drift, 0.0, 0.0);
  return build(
      g, [rho](double, double, double) { return rho; },
      [&](double v0, double v1, double v2) {
        return gauss3(v0, v1, v2, up, sigma) + gauss3(v0, v1, v2, um, sigma);
      });
}

Field bump_perturbation(const PhaseGrid& g, double amplitude, const Eigen::Vector3d& v_c,
                        double width) {
  return build(
      g, [](double x0, double, double) { return 1.0 + std::cos(x0); },
      [&](double v0, double v1, double v2) {
        return amplitude * gauss3(v0, v1, v2, v_c, width);
      });
}

}  // namespace mkin
