#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace mkin {

inline constexpr double kPi = 3.14159265358979323846;

inline bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

// Discretized phase space: x on a torus of period 2pi per retained dimension
// (dim_x = 1 keeps slab symmetry with transport v1 d_x1; dim_x = 3 is the full
// torus), v on the periodic box [-l_v, l_v)^3 standing in for R^3. Velocity
// duals live on dxi * Z with dxi = pi / l_v; spatial duals are integers.
struct PhaseGrid {
  int dim_x = 1;
  int n_x = 16;
  int n_v = 16;
  double l_v = 6.0;

  PhaseGrid() = default;
  PhaseGrid(int dim_x_, int n_x_, int n_v_, double l_v_)
      : dim_x(dim_x_), n_x(n_x_), n_v(n_v_), l_v(l_v_) {
    validate();
  }

  void validate() const {
    if (dim_x != 1 && dim_x != 3) throw std::invalid_argument("PhaseGrid: dim_x must be 1 or 3");
    if (!is_pow2(n_x)) throw std::invalid_argument("PhaseGrid: n_x must be a power of two");
    if (!is_pow2(n_v) || n_v < 4) throw std::invalid_argument("PhaseGrid: n_v must be a power of two >= 4");
    if (!(l_v > 0.0)) throw std::invalid_argument("PhaseGrid: l_v must be > 0");
  }

  double dv() const { return 2.0 * l_v / n_v; }
  double dx() const { return 2.0 * kPi / n_x; }
  double dxi() const { return kPi / l_v; }

  long n_space() const {
    long s = 1;
    for (int d = 0; d < dim_x; ++d) s *= n_x;
    return s;
  }
  long n_vel() const { return static_cast<long>(n_v) * n_v * n_v; }
  long size() const { return n_space() * n_vel(); }

  double cell_volume() const { return std::pow(dx(), dim_x) * dv() * dv() * dv(); }
  double vel_cell_volume() const { return dv() * dv() * dv(); }

  double v_coord(int j) const { return -l_v + j * dv(); }
  double x_coord(int i) const { return i * dx(); }

  // FFT-ordered signed index: {0,..,n/2-1, -n/2,..,-1}.
  static int signed_index(int i, int n) { return i < n / 2 ? i : i - n; }

  double xi_coord(int j) const { return dxi() * signed_index(j, n_v); }
  int eta_coord(int i) const { return signed_index(i, n_x); }

  long index(long ix, int j0, int j1, int j2) const {
    return ((ix * n_v + j0) * n_v + j1) * n_v + j2;
  }

  bool operator==(const PhaseGrid& o) const {
    return dim_x == o.dim_x && n_x == o.n_x && n_v == o.n_v && l_v == o.l_v;
  }
};

// Real-valued distribution sample over the phase grid, x slowest / v2 fastest.
struct Field {
  PhaseGrid grid;
  Eigen::ArrayXd values;
  double time = 0.0;

  Field() = default;
  explicit Field(const PhaseGrid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
  Field(const PhaseGrid& g, Eigen::ArrayXd v, double t = 0.0)
      : grid(g), values(std::move(v)), time(t) {
    if (values.size() != grid.size()) throw std::invalid_argument("Field: size mismatch");
  }
};

// Mode-space counterpart; conjugate-symmetric whenever it represents a real
// field. Same layout as Field, index <-> (eta, xi) via the grid helpers.
struct SpectralField {
  PhaseGrid grid;
  Eigen::ArrayXcd modes;
  double time = 0.0;

  SpectralField() = default;
  explicit SpectralField(const PhaseGrid& g)
      : grid(g), modes(Eigen::ArrayXcd::Zero(g.size())) {}
};

}  // namespace mkin
