#include "mkin/landau.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "mkin/fft.hpp"
#include "mkin/spectral.hpp"

namespace mkin {

void ModelParams::validate() const {
  if (nu < 0.0) throw std::invalid_argument("ModelParams: nu must be >= 0");
  if (beta > 2.0) throw std::invalid_argument("ModelParams: beta must be <= 2");
  if (!(m > 3.0)) throw std::invalid_argument("ModelParams: m must be > 3");
}

int CoefficientSet::sym_index(int d, int e) {
  if (d > e) std::swap(d, e);
  // (0,0)(0,1)(0,2)(1,1)(1,2)(2,2) -> 0..5
  static constexpr int lut[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return lut[d][e];
}

double cube_average_inv_r() {
  // int_cube 1/|u| du = (3/2) * int_{[-1/2,1/2]^2} dx dy / sqrt(x^2+y^2+1/4),
  // the planar integral having the classical rectangle-potential closed form.
  const double c = 0.5;
  auto F = [c](double x, double y) {
    const double R = std::sqrt(x * x + y * y + c * c);
    double out = 0.0;
    if (y + R > 0.0) out += x * std::log(y + R);
    if (x + R > 0.0) out += y * std::log(x + R);
    out -= c * std::atan2(x * y, c * R);
    return out;
  };
  const double I2 = 4.0 * (F(0.5, 0.5) - F(0.5, 0.0) - F(0.0, 0.5) + F(0.0, 0.0));
  return 1.5 * I2;
}

namespace {

inline long half_size(int np) { return static_cast<long>(np) * np * (np / 2 + 1); }

// Signed displacement of padded index i, in cells.
inline int wrap_cells(int i, int np) { return i <= np / 2 ? i : i - np; }

// Antiderivative of 1/|z| over a prism corner (MacMillan form).
double prism_w(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (r == 0.0) return 0.0;
  double w = 0.0;
  if (x + r > 0.0) w += y * z * std::log(x + r);
  if (y + r > 0.0) w += z * x * std::log(y + r);
  if (z + r > 0.0) w += x * y * std::log(z + r);
  w -= 0.5 * x * x * std::atan2(y * z, x * r);
  w -= 0.5 * y * y * std::atan2(z * x, y * r);
  w -= 0.5 * z * z * std::atan2(x * y, z * r);
  return w;
}

// int_0^a int_0^b int_0^c 1/|z| dz: alternating corner sum of the antiderivative.
double corner_potential(double a, double b, double c) {
  double v = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = (i & 1) ? a : 0.0;
    const double y = (i & 2) ? b : 0.0;
    const double z = (i & 4) ? c : 0.0;
    const int sign = (((i & 1) ? 0 : 1) + ((i & 2) ? 0 : 1) + ((i & 4) ? 0 : 1)) % 2 ? -1 : 1;
    v += sign * prism_w(x, y, z);
  }
  return v;
}

}  // namespace

struct LandauCoefficients::Impl {
  PhaseGrid grid;
  KernelForm form;
  int np;        // padded extent, 2 n_v
  long nph;      // half-spectrum size
  double dv;

  Eigen::ArrayXd ghat;                   // Coulomb kernel spectrum (real, even kernel)
  std::array<Eigen::ArrayXd, 6> Ahat;    // projection kernel spectra
  std::array<Eigen::ArrayXd, 3> gradhat; // i-times coefficients of grad a
  std::array<Eigen::ArrayXd, 3> divhat;  // i-times coefficients of div A rows
  Eigen::ArrayXd laphat;                 // coefficients of -Lap a
  std::array<Eigen::ArrayXd, 3> xi;      // padded duals per half-spectrum entry
  std::array<Eigen::ArrayXd, 3> xider;   // derivative duals (Nyquist planes zeroed)
  Eigen::ArrayXd band;                   // 0 on modes with any Nyquist component

  mutable std::mutex work_mutex;
  mutable Eigen::ArrayXd rwork;        // np^3 real scratch
  mutable Eigen::ArrayXcd cmul;        // half-spectrum scratch

  Impl(const PhaseGrid& g, KernelForm f) : grid(g), form(f) {
    grid.validate();
    np = 2 * grid.n_v;
    nph = half_size(np);
    dv = grid.dv();
    build_duals();
    build_kernels();
    // Derivative operators act on the non-Nyquist band; masking both sides
    // keeps div A = grad a a per-mode identity for the riesz form.
    for (int d = 0; d < 3; ++d) {
      gradhat[d] = ghat * xider[d] * band;
      divhat[d] = (Ahat[CoefficientSet::sym_index(d, 0)] * xider[0] +
                   Ahat[CoefficientSet::sym_index(d, 1)] * xider[1] +
                   Ahat[CoefficientSet::sym_index(d, 2)] * xider[2]) * band;
    }
    laphat = ghat * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
    rwork.resize(static_cast<long>(np) * np * np);
    cmul.resize(nph);
  }

  void build_duals() {
    const double dxi_pad = 2.0 * kPi / (np * dv);
    for (int d = 0; d < 3; ++d) {
      xi[d].resize(nph);
      xider[d].resize(nph);
    }
    band.resize(nph);
    long idx = 0;
    for (int k0 = 0; k0 < np; ++k0) {
      const int s0 = PhaseGrid::signed_index(k0, np);
      for (int k1 = 0; k1 < np; ++k1) {
        const int s1 = PhaseGrid::signed_index(k1, np);
        for (int k2 = 0; k2 <= np / 2; ++k2, ++idx) {
          xi[0][idx] = dxi_pad * s0;
          xi[1][idx] = dxi_pad * s1;
          xi[2][idx] = dxi_pad * k2;
          // derivatives drop the self-conjugate Nyquist planes
          xider[0][idx] = (k0 == np / 2) ? 0.0 : xi[0][idx];
          xider[1][idx] = (k1 == np / 2) ? 0.0 : xi[1][idx];
          xider[2][idx] = (k2 == np / 2) ? 0.0 : xi[2][idx];
          band[idx] = (k0 == np / 2 || k1 == np / 2 || k2 == np / 2) ? 0.0 : 1.0;
        }
      }
    }
  }

  // Spectrum of a real even kernel sampled on the padded box. Samples are
  // zeroed outside the displacement range |wrap|_inf <= n_v - 1 actually
  // realized between data cells, and the origin sample is moment-matched so
  // that the lattice sum reproduces the kernel's exact integral over that
  // range (kills the leading quadrature error of the singular kernel).
  Eigen::ArrayXd kernel_spectrum(auto&& kernel_at, double exact_integral) const {
    Eigen::ArrayXd samples(static_cast<long>(np) * np * np);
    const int reach = grid.n_v - 1;
    double lattice_sum = 0.0;
    long idx = 0;
    for (int i0 = 0; i0 < np; ++i0) {
      const int w0 = wrap_cells(i0, np);
      for (int i1 = 0; i1 < np; ++i1) {
        const int w1 = wrap_cells(i1, np);
        for (int i2 = 0; i2 < np; ++i2, ++idx) {
          const int w2 = wrap_cells(i2, np);
          if (std::abs(w0) > reach || std::abs(w1) > reach || std::abs(w2) > reach ||
              (w0 == 0 && w1 == 0 && w2 == 0)) {
            samples[idx] = 0.0;
            continue;
          }
          samples[idx] = kernel_at(w0 * dv, w1 * dv, w2 * dv);
          lattice_sum += samples[idx] * dv * dv * dv;
        }
      }
    }
    samples[0] = (exact_integral - lattice_sum) / (dv * dv * dv);
    Eigen::ArrayXcd spec(nph);
    fft::r2c_3d(samples.data(), spec.data(), np);
    return spec.real();
  }

  void build_kernels() {
    if (form == KernelForm::sampled) {
      // Coulomb kernel integral over the reachable box [-b, b]^3
      const double b = (grid.n_v - 0.5) * dv;
      const double coulomb_total = 8.0 * corner_potential(b, b, b) / (4.0 * kPi);

      ghat = kernel_spectrum(
          [&](double z0, double z1, double z2) {
            return 1.0 / (4.0 * kPi * std::sqrt(z0 * z0 + z1 * z1 + z2 * z2));
          },
          coulomb_total);
      for (int d = 0; d < 3; ++d) {
        for (int e = d; e < 3; ++e) {
          const int c = CoefficientSet::sym_index(d, e);
          // diagonal components integrate to (1/3) of the Coulomb total over
          // the symmetric box; off-diagonals integrate to zero
          const double total = (d == e) ? coulomb_total / 3.0 : 0.0;
          Ahat[c] = kernel_spectrum(
              [&](double z0, double z1, double z2) {
                const double z[3] = {z0, z1, z2};
                const double r2 = z0 * z0 + z1 * z1 + z2 * z2;
                const double r = std::sqrt(r2);
                const double pde = (d == e ? 1.0 : 0.0) - z[d] * z[e] / r2;
                return pde / (8.0 * kPi * r);
              },
              total);
        }
      }
    } else {
      // Analytically truncated Coulomb kernel: the transform of
      // 1/(4 pi |z|) 1_{|z| <= R} with R the padded half-period is entire in
      // xi, so its lattice samples carry no aliasing and the convolution is
      // spectrally accurate for data that keeps pair distances under R. The
      // division by dv^3 moves the continuous transform into DFT units.
      const double R = 2.0 * grid.l_v;
      const double cell = dv * dv * dv;
      ghat.resize(nph);
      for (long i = 0; i < nph; ++i) {
        const double x0 = xi[0][i], x1 = xi[1][i], x2 = xi[2][i];
        const double n2 = x0 * x0 + x1 * x1 + x2 * x2;
        ghat[i] = (n2 == 0.0) ? 0.5 * R * R / cell
                              : (1.0 - std::cos(R * std::sqrt(n2))) / (n2 * cell);
      }
      // A-kernel spectrum (xi_d xi_e / |xi|^2) ghat: the mode-space form of the
      // continuum projection kernel. Keeps tr A = a and div A = grad a exact
      // at the discrete level.
      for (int c = 0; c < 6; ++c) Ahat[c].resize(nph);
      for (long i = 0; i < nph; ++i) {
        const double x0 = xi[0][i], x1 = xi[1][i], x2 = xi[2][i];
        const double n2 = x0 * x0 + x1 * x1 + x2 * x2;
        if (n2 == 0.0) {
          // isotropic split of the zero mode, trace-consistent
          const double third = ghat[i] / 3.0;
          Ahat[0][i] = Ahat[3][i] = Ahat[5][i] = third;
          Ahat[1][i] = Ahat[2][i] = Ahat[4][i] = 0.0;
          continue;
        }
        const double s = ghat[i] / n2;
        Ahat[0][i] = x0 * x0 * s;
        Ahat[1][i] = x0 * x1 * s;
        Ahat[2][i] = x0 * x2 * s;
        Ahat[3][i] = x1 * x1 * s;
        Ahat[4][i] = x1 * x2 * s;
        Ahat[5][i] = x2 * x2 * s;
      }
    }
  }

  // Inverse transform of mult * fhat (times i when the multiplier encodes a
  // derivative) into the physical n^3 block of `out`.
  void convolve_into(const Eigen::ArrayXcd& fhat, const Eigen::ArrayXd& mult, bool imaginary,
                     Eigen::ArrayXd& out, long x_offset) const {
    if (imaginary) {
      cmul = fhat * (std::complex<double>(0.0, 1.0) * mult.cast<std::complex<double>>());
    } else {
      cmul = fhat * mult.cast<std::complex<double>>();
    }
    fft::c2r_3d(cmul.data(), rwork.data(), np);
    const int n = grid.n_v;
    const double scale = dv * dv * dv / (static_cast<double>(np) * np * np);
    for (int j0 = 0; j0 < n; ++j0) {
      for (int j1 = 0; j1 < n; ++j1) {
        const double* src = rwork.data() + (static_cast<long>(j0) * np + j1) * np;
        double* dst = out.data() + x_offset + (static_cast<long>(j0) * n + j1) * n;
        for (int j2 = 0; j2 < n; ++j2) dst[j2] = src[j2] * scale;
      }
    }
  }
};

LandauCoefficients::LandauCoefficients(const PhaseGrid& grid, KernelForm form)
    : impl_(std::make_unique<Impl>(grid, form)) {}
LandauCoefficients::~LandauCoefficients() = default;
LandauCoefficients::LandauCoefficients(LandauCoefficients&&) noexcept = default;
LandauCoefficients& LandauCoefficients::operator=(LandauCoefficients&&) noexcept = default;

const PhaseGrid& LandauCoefficients::grid() const { return impl_->grid; }
KernelForm LandauCoefficients::form() const { return impl_->form; }

CoefficientSet LandauCoefficients::compute(const Field& f, const Request& req) const {
  Impl& im = *impl_;
  if (!(f.grid == im.grid)) throw std::invalid_argument("LandauCoefficients: grid mismatch");
  std::lock_guard<std::mutex> lock(im.work_mutex);

  const long nsp = im.grid.n_space();
  const long nv3 = im.grid.n_vel();
  const int n = im.grid.n_v;
  const int np = im.np;

  CoefficientSet out;
  if (req.want_a) out.a.setZero(f.values.size());
  if (req.want_A)
    for (auto& c : out.A) c.setZero(f.values.size());
  if (req.want_grad_a)
    for (auto& c : out.grad_a) c.setZero(f.values.size());
  if (req.want_div_A)
    for (auto& c : out.div_A) c.setZero(f.values.size());
  if (req.want_neg_lap_a) out.neg_lap_a.setZero(f.values.size());

  double shell_abs = 0.0, total_abs = 0.0;
  Eigen::ArrayXcd fhat(im.nph);

  for (long ix = 0; ix < nsp; ++ix) {
    const long off = ix * nv3;
    im.rwork.setZero();
    for (int j0 = 0; j0 < n; ++j0) {
      for (int j1 = 0; j1 < n; ++j1) {
        const double* src = f.values.data() + off + (static_cast<long>(j0) * n + j1) * n;
        double* dst = im.rwork.data() + (static_cast<long>(j0) * np + j1) * np;
        for (int j2 = 0; j2 < n; ++j2) dst[j2] = src[j2];
      }
    }
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
          const double av = std::abs(f.values[off + (static_cast<long>(j0) * n + j1) * n + j2]);
          total_abs += av;
          if (j0 == 0 || j0 == n - 1 || j1 == 0 || j1 == n - 1 || j2 == 0 || j2 == n - 1)
            shell_abs += av;
        }

    fft::r2c_3d(im.rwork.data(), fhat.data(), np);

    if (req.want_a) im.convolve_into(fhat, im.ghat, false, out.a, off);
    if (req.want_A) {
      for (int c = 0; c < 6; ++c) im.convolve_into(fhat, im.Ahat[c], false, out.A[c], off);
    }
    if (req.want_grad_a) {
      for (int d = 0; d < 3; ++d) im.convolve_into(fhat, im.gradhat[d], true, out.grad_a[d], off);
    }
    if (req.want_div_A) {
      // spectral divergence of the A rows, taken on the padded grid
      for (int d = 0; d < 3; ++d) im.convolve_into(fhat, im.divhat[d], true, out.div_A[d], off);
    }
    if (req.want_neg_lap_a) im.convolve_into(fhat, im.laphat, false, out.neg_lap_a, off);
  }

  out.shell_mass_fraction = total_abs > 0.0 ? shell_abs / total_abs : 0.0;
  out.shell_warning = out.shell_mass_fraction > kShellMassThreshold;
  return out;
}

const LandauCoefficients& landau_engine(const PhaseGrid& grid, KernelForm form) {
  static std::mutex mu;
  static auto& cache = *new std::map<std::tuple<int, int, int, double, int>,
                                     std::unique_ptr<LandauCoefficients>>();
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(grid.dim_x, grid.n_x, grid.n_v, grid.l_v, static_cast<int>(form));
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<LandauCoefficients>(grid, form)).first;
  }
  return *it->second;
}

Eigen::ArrayXd compute_a(const Field& f, KernelForm form) {
  LandauCoefficients::Request req;
  req.want_A = req.want_grad_a = req.want_div_A = false;
  return landau_engine(f.grid, form).compute(f, req).a;
}

std::array<Eigen::ArrayXd, 6> compute_A(const Field& f, KernelForm form) {
  LandauCoefficients::Request req;
  req.want_a = req.want_grad_a = req.want_div_A = false;
  return landau_engine(f.grid, form).compute(f, req).A;
}

std::array<Eigen::ArrayXd, 3> compute_grad_a(const Field& f, KernelForm form) {
  LandauCoefficients::Request req;
  req.want_a = req.want_A = req.want_div_A = false;
  return landau_engine(f.grid, form).compute(f, req).grad_a;
}

namespace {

// Velocity duals on the unpadded grid, Nyquist zeroed for derivatives.
void unpadded_duals(const PhaseGrid& g, std::array<Eigen::ArrayXd, 3>& xid,
                    Eigen::ArrayXd& xi_sq) {
  const long nv3 = g.n_vel();
  for (auto& x : xid) x.resize(nv3);
  xi_sq.resize(nv3);
  long idx = 0;
  for (int j0 = 0; j0 < g.n_v; ++j0) {
    const double x0 = g.xi_coord(j0);
    const double d0 = (j0 == g.n_v / 2) ? 0.0 : x0;
    for (int j1 = 0; j1 < g.n_v; ++j1) {
      const double x1 = g.xi_coord(j1);
      const double d1 = (j1 == g.n_v / 2) ? 0.0 : x1;
      for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
        const double x2 = g.xi_coord(j2);
        xid[0][idx] = d0;
        xid[1][idx] = d1;
        xid[2][idx] = (j2 == g.n_v / 2) ? 0.0 : x2;
        xi_sq[idx] = x0 * x0 + x1 * x1 + x2 * x2;
      }
    }
  }
}

struct VDuals {
  std::array<Eigen::ArrayXd, 3> xid;
  Eigen::ArrayXd xi_sq;
};

const VDuals& v_duals(const PhaseGrid& g) {
  static std::mutex mu;
  static auto& cache = *new std::map<std::pair<int, double>, std::unique_ptr<VDuals>>();
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.n_v, g.l_v);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto d = std::make_unique<VDuals>();
    unpadded_duals(g, d->xid, d->xi_sq);
    it = cache.emplace(key, std::move(d)).first;
  }
  return *it->second;
}

constexpr std::complex<double> kImag(0.0, 1.0);

}  // namespace

Field toy_rhs(const Field& f, const ModelParams& p) {
  return toy_rhs(f, p, density(f));
}

Field toy_rhs(const Field& f, const ModelParams& p, const Eigen::ArrayXd& rho) {
  p.validate();
  const PhaseGrid& g = f.grid;
  const long nsp = g.n_space();
  const long nv3 = g.n_vel();
  const VDuals& du = v_duals(g);

  Eigen::ArrayXcd fhat = f.values.cast<std::complex<double>>();
  v_fft_forward(fhat, g);

  // <v>^beta on the velocity grid (beta = 0 short-circuits to rho only)
  Eigen::ArrayXd wbeta;
  if (p.beta != 0.0) {
    wbeta.resize(nv3);
    long idx = 0;
    for (int j0 = 0; j0 < g.n_v; ++j0) {
      const double v0 = g.v_coord(j0);
      for (int j1 = 0; j1 < g.n_v; ++j1) {
        const double v1 = g.v_coord(j1);
        for (int j2 = 0; j2 < g.n_v; ++j2, ++idx) {
          const double v2 = g.v_coord(j2);
          wbeta[idx] = std::pow(1.0 + v0 * v0 + v1 * v1 + v2 * v2, 0.5 * p.beta);
        }
      }
    }
  }

  Eigen::ArrayXcd flux(nsp * nv3);
  Eigen::ArrayXcd div = Eigen::ArrayXcd::Zero(nsp * nv3);
  for (int d = 0; d < 3; ++d) {
    for (long ix = 0; ix < nsp; ++ix) {
      flux.segment(ix * nv3, nv3) =
          fhat.segment(ix * nv3, nv3) * (kImag * du.xid[d].cast<std::complex<double>>());
    }
    v_fft_inverse(flux, g);
    for (long ix = 0; ix < nsp; ++ix) {
      auto seg = flux.segment(ix * nv3, nv3);
      if (p.beta != 0.0) {
        seg = seg.real().cwiseProduct(wbeta) * rho[ix];
      } else {
        seg = seg.real() * rho[ix];
      }
    }
    v_fft_forward(flux, g);
    for (long ix = 0; ix < nsp; ++ix) {
      div.segment(ix * nv3, nv3) +=
          flux.segment(ix * nv3, nv3) * (kImag * du.xid[d].cast<std::complex<double>>());
    }
  }
  v_fft_inverse(div, g);

  Field out(g);
  out.time = f.time;
  out.values = div.real();
  return out;
}

Field landau_rhs(const Field& f, const ModelParams& p) {
  LandauCoefficients::Request req;
  req.want_a = false;
  req.want_div_A = false;
  return landau_rhs(f, p, landau_engine(f.grid).compute(f, req));
}

Field landau_rhs(const Field& f, const ModelParams& p, const CoefficientSet& coeffs) {
  p.validate();
  const PhaseGrid& g = f.grid;
  const long nsp = g.n_space();
  const long nv3 = g.n_vel();
  const long ntot = nsp * nv3;
  const VDuals& du = v_duals(g);

  Eigen::ArrayXcd fhat = f.values.cast<std::complex<double>>();
  v_fft_forward(fhat, g);

  std::array<Eigen::ArrayXd, 3> grad;
  {
    Eigen::ArrayXcd work(ntot);
    for (int d = 0; d < 3; ++d) {
      for (long ix = 0; ix < nsp; ++ix) {
        work.segment(ix * nv3, nv3) =
            fhat.segment(ix * nv3, nv3) * (kImag * du.xid[d].cast<std::complex<double>>());
      }
      v_fft_inverse(work, g);
      grad[d] = work.real();
    }
  }

  // flux F_d = sum_e A_de grad_e f - f grad_a_d, assembled in real space
  Eigen::ArrayXcd div(ntot);
  {
    Eigen::ArrayXcd fwork(ntot);
    for (int d = 0; d < 3; ++d) {
      Eigen::ArrayXd Fd = coeffs.A[CoefficientSet::sym_index(d, 0)] * grad[0] +
                          coeffs.A[CoefficientSet::sym_index(d, 1)] * grad[1] +
                          coeffs.A[CoefficientSet::sym_index(d, 2)] * grad[2] -
                          f.values * coeffs.grad_a[d];
      fwork = Fd.cast<std::complex<double>>();
      v_fft_forward(fwork, g);
      for (long ix = 0; ix < nsp; ++ix) {
        auto seg = fwork.segment(ix * nv3, nv3) * (kImag * du.xid[d].cast<std::complex<double>>());
        if (d == 0) {
          div.segment(ix * nv3, nv3) = seg;
        } else {
          div.segment(ix * nv3, nv3) += seg;
        }
      }
    }
  }

  if (p.nu > 0.0) {
    for (long ix = 0; ix < nsp; ++ix) {
      div.segment(ix * nv3, nv3) -=
          p.nu * fhat.segment(ix * nv3, nv3) * du.xi_sq.cast<std::complex<double>>();
    }
  }
  v_fft_inverse(div, g);

  Field out(g);
  out.time = f.time;
  out.values = div.real();
  return out;
}

}  // namespace mkin
