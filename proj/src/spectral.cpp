#include "mkin/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mkin/fft.hpp"

namespace mkin {

namespace {

std::vector<int> full_dims(const PhaseGrid& g) {
  std::vector<int> dims;
  for (int d = 0; d < g.dim_x; ++d) dims.push_back(g.n_x);
  dims.push_back(g.n_v);
  dims.push_back(g.n_v);
  dims.push_back(g.n_v);
  return dims;
}

// Decode the flat x-index into the integer dual vector eta.
Vector3d eta_of(const PhaseGrid& g, long ix) {
  Vector3d eta = Vector3d::Zero();
  if (g.dim_x == 1) {
    eta[0] = PhaseGrid::signed_index(static_cast<int>(ix), g.n_x);
  } else {
    const int i2 = static_cast<int>(ix % g.n_x);
    const int i1 = static_cast<int>((ix / g.n_x) % g.n_x);
    const int i0 = static_cast<int>(ix / (static_cast<long>(g.n_x) * g.n_x));
    eta[0] = PhaseGrid::signed_index(i0, g.n_x);
    eta[1] = PhaseGrid::signed_index(i1, g.n_x);
    eta[2] = PhaseGrid::signed_index(i2, g.n_x);
  }
  return eta;
}

}  // namespace

SpectralField forward(const Field& f) {
  SpectralField F(f.grid);
  F.time = f.time;
  F.modes = f.values.cast<std::complex<double>>();
  fft::dft(F.modes.data(), full_dims(f.grid), -1);
  F.modes *= 1.0 / std::sqrt(static_cast<double>(f.grid.size()));
  return F;
}

Field inverse(const SpectralField& F) {
  Eigen::ArrayXcd work = F.modes;
  fft::dft(work.data(), full_dims(F.grid), +1);
  Field f(F.grid);
  f.time = F.time;
  f.values = work.real() * (1.0 / std::sqrt(static_cast<double>(F.grid.size())));
  return f;
}

void apply_multiplier_in_place(SpectralField& F, const Multiplier& m) {
  const PhaseGrid& g = F.grid;
  const long nsp = g.n_space();
  Vector3d xi;
  long idx = 0;
  for (long ix = 0; ix < nsp; ++ix) {
    const Vector3d eta = eta_of(g, ix);
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      xi[0] = g.xi_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        xi[1] = g.xi_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          xi[2] = g.xi_coord(j2);
          F.modes[idx] *= m(eta, xi);
        }
      }
    }
  }
}

SpectralField apply_multiplier(const SpectralField& F, const Multiplier& m) {
  SpectralField out = F;
  apply_multiplier_in_place(out, m);
  return out;
}

Field apply_multiplier(const Field& f, const Multiplier& m) {
  SpectralField F = forward(f);
  apply_multiplier_in_place(F, m);
  return inverse(F);
}

bool transport_dt_aligned(const PhaseGrid& g, double dt) {
  const double steps = dt / g.dxi();
  return std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, std::abs(steps));
}

void transport_shear_in_place(SpectralField& F, double dt) {
  const PhaseGrid& g = F.grid;
  if (!transport_dt_aligned(g, dt)) {
    throw std::invalid_argument("transport_shear: dt must be an integer multiple of dxi = pi/l_v");
  }
  const long m = std::lround(dt / g.dxi());
  if (m == 0) return;
  const long nsp = g.n_space();
  const int n = g.n_v;
  const long nv3 = g.n_vel();
  Eigen::ArrayXcd block(nv3);

  auto wrap = [n](long a) {
    long r = a % n;
    return r < 0 ? r + n : r;
  };

  for (long ix = 0; ix < nsp; ++ix) {
    const Vector3d eta = eta_of(g, ix);
    // Self-conjugate Nyquist slices in x pair with themselves, so a one-sided
    // frequency shift cannot stay real, and even the exact real-space shear of
    // Nyquist-x data aliases in its square. The shear acts on the properly
    // representable band and leaves those degenerate slices fixed.
    bool nyquist = false;
    for (int d = 0; d < g.dim_x; ++d) {
      if (static_cast<int>(eta[d]) == -g.n_x / 2) nyquist = true;
    }
    if (nyquist) continue;
    const long e_sum = static_cast<long>(eta[0]) + static_cast<long>(eta[1]) +
                       static_cast<long>(eta[2]);
    const long s0 = wrap(m * static_cast<long>(eta[0]));
    const long s1 = wrap(m * static_cast<long>(eta[1]));
    const long s2 = wrap(m * static_cast<long>(eta[2]));
    if (s0 == 0 && s1 == 0 && s2 == 0) continue;
    // the v-grid starts at -l_v, so the shear phase carries (-1)^{m eta} per axis
    const double sign = ((m * e_sum) % 2 == 0) ? 1.0 : -1.0;
    std::complex<double>* base = F.modes.data() + ix * nv3;
    // gather: out(j) = sign * in(j + s), cyclic per axis
    for (int j0 = 0; j0 < n; ++j0) {
      const long k0 = wrap(j0 + s0);
      for (int j1 = 0; j1 < n; ++j1) {
        const long k1 = wrap(j1 + s1);
        std::complex<double>* dst = block.data() + (static_cast<long>(j0) * n + j1) * n;
        const std::complex<double>* src = base + (k0 * n + k1) * n;
        if (s2 == 0) {
          for (int j2 = 0; j2 < n; ++j2) dst[j2] = sign * src[j2];
        } else {
          for (int j2 = 0; j2 < n; ++j2) dst[j2] = sign * src[wrap(j2 + s2)];
        }
      }
    }
    for (long i = 0; i < nv3; ++i) base[i] = block[i];
  }
  F.time += dt;
}

Field transport_shear(const Field& f, double dt) {
  SpectralField F = forward(f);
  transport_shear_in_place(F, dt);
  return inverse(F);
}

namespace {

double fejer_weight(double eta_abs, double K) {
  const double w = 1.0 - eta_abs / (K + 1.0);
  return w > 0.0 ? w : 0.0;
}

}  // namespace

Field mollify(const Field& f, double a, MollifyKernel kernel) {
  if (!(a > 0.0)) throw std::invalid_argument("mollify: radius must be > 0");
  const PhaseGrid& g = f.grid;
  SpectralField F = forward(f);
  if (kernel == MollifyKernel::gaussian_xv) {
    const double sig = a / std::sqrt(static_cast<double>(g.dim_x + 3));
    apply_multiplier_in_place(F, [sig](const Vector3d& eta, const Vector3d& xi) {
      return std::exp(-0.5 * sig * sig * (eta.squaredNorm() + xi.squaredNorm()));
    });
  } else {
    const double K = std::ceil(kPi / a);
    const int dim_x = g.dim_x;
    apply_multiplier_in_place(F, [K, dim_x](const Vector3d& eta, const Vector3d&) {
      double w = 1.0;
      for (int d = 0; d < dim_x; ++d) w *= fejer_weight(std::abs(eta[d]), K);
      return w;
    });
  }
  return inverse(F);
}

Eigen::ArrayXd mollify_spatial(const Eigen::ArrayXd& rho, const PhaseGrid& g, double a,
                               MollifyKernel kernel) {
  if (!(a > 0.0)) throw std::invalid_argument("mollify_spatial: radius must be > 0");
  if (rho.size() != g.n_space()) throw std::invalid_argument("mollify_spatial: size mismatch");
  Eigen::ArrayXcd modes = rho.cast<std::complex<double>>();
  std::vector<int> dims;
  for (int d = 0; d < g.dim_x; ++d) dims.push_back(g.n_x);
  fft::dft(modes.data(), dims, -1);
  const double K = std::ceil(kPi / a);
  const double sig = a / std::sqrt(static_cast<double>(g.dim_x));
  for (long ix = 0; ix < g.n_space(); ++ix) {
    const Vector3d eta = eta_of(g, ix);
    double w = 1.0;
    if (kernel == MollifyKernel::fejer_x) {
      for (int d = 0; d < g.dim_x; ++d) w *= fejer_weight(std::abs(eta[d]), K);
    } else {
      w = std::exp(-0.5 * sig * sig * eta.squaredNorm());
    }
    modes[ix] *= w;
  }
  fft::dft(modes.data(), dims, +1);
  return modes.real() / static_cast<double>(g.n_space());
}

Eigen::ArrayXd density(const Field& f) {
  const PhaseGrid& g = f.grid;
  const long nsp = g.n_space();
  const long nv3 = g.n_vel();
  Eigen::ArrayXd rho(nsp);
  for (long ix = 0; ix < nsp; ++ix) {
    rho[ix] = f.values.segment(ix * nv3, nv3).sum() * g.vel_cell_volume();
  }
  return rho;
}

Moments moments(const Field& f) {
  const PhaseGrid& g = f.grid;
  Moments mom;
  const long nsp = g.n_space();
  double m1x = 0.0, m1y = 0.0, m1z = 0.0;
  long idx = 0;
  for (long ix = 0; ix < nsp; ++ix) {
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      const double v0 = g.v_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        const double v1 = g.v_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double v2 = g.v_coord(j2);
          const double fv = f.values[idx];
          mom.mass += fv;
          m1x += v0 * fv;
          m1y += v1 * fv;
          m1z += v2 * fv;
          mom.energy += (v0 * v0 + v1 * v1 + v2 * v2) * fv;
        }
      }
    }
  }
  const double dV = g.cell_volume();
  mom.mass *= dV;
  mom.momentum = Vector3d(m1x, m1y, m1z) * dV;
  mom.energy *= dV;
  return mom;
}

double weighted_sup_norm(const Field& f, double k) {
  const PhaseGrid& g = f.grid;
  double sup = 0.0;
  long idx = 0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      const double v0 = g.v_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        const double v1 = g.v_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double v2 = g.v_coord(j2);
          const double w = std::pow(1.0 + v0 * v0 + v1 * v1 + v2 * v2, 0.5 * k);
          sup = std::max(sup, w * std::abs(f.values[idx]));
        }
      }
    }
  }
  return sup;
}

double shell_weighted_sup(const Field& f, double k) {
  const PhaseGrid& g = f.grid;
  double sup = 0.0;
  const int n = g.n_v;
  long idx = 0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    for (int j0 = 0; j0 < n; ++j0) {
      const double v0 = g.v_coord(j0);
      for (int j1 = 0; j1 < n; ++j1) {
        const double v1 = g.v_coord(j1);
        for (int j2 = 0; j2 < n; ++j2, ++idx) {
          const bool shell = j0 == 0 || j0 == n - 1 || j1 == 0 || j1 == n - 1 ||
                             j2 == 0 || j2 == n - 1;
          if (!shell) continue;
          const double v2 = g.v_coord(j2);
          const double w = std::pow(1.0 + v0 * v0 + v1 * v1 + v2 * v2, 0.5 * k);
          sup = std::max(sup, w * std::abs(f.values[idx]));
        }
      }
    }
  }
  return sup;
}

double l2_norm(const Field& f) {
  return std::sqrt(f.values.square().sum() * f.grid.cell_volume());
}

double l2_norm(const SpectralField& F) {
  return std::sqrt(F.modes.abs2().sum() * F.grid.cell_volume());
}

double lp_norm(const Field& f, double p) {
  return std::pow((f.values.abs().pow(p)).sum() * f.grid.cell_volume(), 1.0 / p);
}

double sobolev_norm_spatial(const Eigen::ArrayXd& phi, const PhaseGrid& g, double s) {
  Eigen::ArrayXcd modes = phi.cast<std::complex<double>>();
  std::vector<int> dims;
  for (int d = 0; d < g.dim_x; ++d) dims.push_back(g.n_x);
  fft::dft(modes.data(), dims, -1);
  modes *= 1.0 / std::sqrt(static_cast<double>(g.n_space()));
  double acc = 0.0;
  for (long ix = 0; ix < g.n_space(); ++ix) {
    const Vector3d eta = eta_of(g, ix);
    acc += std::pow(1.0 + eta.squaredNorm(), s) * std::norm(modes[ix]);
  }
  return std::sqrt(acc * std::pow(g.dx(), g.dim_x));
}

Field scale_by_spatial(const Field& f, const Eigen::ArrayXd& c) {
  if (c.size() != f.grid.n_space()) throw std::invalid_argument("scale_by_spatial: size mismatch");
  Field out = f;
  const long nv3 = f.grid.n_vel();
  for (long ix = 0; ix < f.grid.n_space(); ++ix) {
    out.values.segment(ix * nv3, nv3) *= c[ix];
  }
  return out;
}

void v_fft_forward(Eigen::ArrayXcd& data, const PhaseGrid& g) {
  fft::dft_v3_batch(data.data(), g.n_space(), g.n_v, -1);
}

void v_fft_inverse(Eigen::ArrayXcd& data, const PhaseGrid& g) {
  fft::dft_v3_batch(data.data(), g.n_space(), g.n_v, +1);
  data *= 1.0 / static_cast<double>(g.n_vel());
}

}  // namespace mkin
