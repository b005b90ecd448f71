#pragma once

#include <Eigen/Core>

#include <complex>
#include <functional>

#include "mkin/grid.hpp"

// Phase-space transforms and the operations built on them. The (x, v)
// transform is unitary (scale 1/sqrt(N) both ways), so Parseval holds exactly
// mode-for-node and inverse(forward(f)) == f to roundoff.

namespace mkin {

using Eigen::Vector3d;

// Real symbol over (eta, xi). eta carries the integer spatial duals (zeros in
// suppressed dimensions when dim_x = 1), xi the velocity duals.
using Multiplier = std::function<double(const Vector3d& eta, const Vector3d& xi)>;

SpectralField forward(const Field& f);
Field inverse(const SpectralField& F);

SpectralField apply_multiplier(const SpectralField& F, const Multiplier& m);
void apply_multiplier_in_place(SpectralField& F, const Multiplier& m);

// Field-level convenience: inverse(m * forward(f)).
Field apply_multiplier(const Field& f, const Multiplier& m);

// Exact free streaming f(x, v) <- f(x - dt v, v). dt must be an integer
// multiple of dxi so the mode-side shear xi -> xi + dt eta is a cyclic index
// shift (a permutation: every Fourier mode moves, none is altered).
Field transport_shear(const Field& f, double dt);
void transport_shear_in_place(SpectralField& F, double dt);
bool transport_dt_aligned(const PhaseGrid& g, double dt);

enum class MollifyKernel {
  gaussian_xv,  // mollifies jointly in (x, v); a bounds the RMS displacement
  fejer_x       // nonnegative spatial kernel: positivity-preserving, x only
};

Field mollify(const Field& f, double a, MollifyKernel kernel = MollifyKernel::gaussian_xv);

// Same kernels for a plain spatial field (e.g. the density).
Eigen::ArrayXd mollify_spatial(const Eigen::ArrayXd& rho, const PhaseGrid& g, double a,
                               MollifyKernel kernel = MollifyKernel::fejer_x);

// rho(x) = int f dv, rectangle rule over the velocity box.
Eigen::ArrayXd density(const Field& f);

struct Moments {
  double mass = 0.0;
  Vector3d momentum = Vector3d::Zero();
  double energy = 0.0;  // int |v|^2 f
};
Moments moments(const Field& f);

double weighted_sup_norm(const Field& f, double k);
// Same restricted to cells touching the velocity box boundary; monitors how
// much of the decay weight the box truncation is eating.
double shell_weighted_sup(const Field& f, double k);

double l2_norm(const Field& f);
double l2_norm(const SpectralField& F);
double lp_norm(const Field& f, double p);

// Spectral H^s norm of a spatial field: sum <eta>^{2s} |phi_hat|^2.
double sobolev_norm_spatial(const Eigen::ArrayXd& phi, const PhaseGrid& g, double s);

// Pointwise multiply a field by a spatial profile c(x).
Field scale_by_spatial(const Field& f, const Eigen::ArrayXd& c);

// In-place batched v-transforms used by the collision operators; layout and
// normalization are internal (unnormalized forward, 1/n^3 on the inverse).
void v_fft_forward(Eigen::ArrayXcd& data, const PhaseGrid& g);
void v_fft_inverse(Eigen::ArrayXcd& data, const PhaseGrid& g);

}  // namespace mkin
