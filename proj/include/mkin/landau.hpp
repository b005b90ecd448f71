#pragma once

#include <Eigen/Core>

#include <array>
#include <memory>

#include "mkin/grid.hpp"

// Landau-Coulomb coefficient fields
//
//   A[f](v) = 1/(8 pi) int P(v-z)/|v-z| f(z) dz,  P(z) = Id - z z^T/|z|^2,
//   a[f](v) = 1/(4 pi) int     1/|v-z|  f(z) dz,
//
// computed per x-point as free-space convolutions: zero-padding to 2 n_v per
// axis kills the periodic images, the 1/|z| singularity is replaced by its
// analytic average over the origin cell. Structural identities tr A = a and
// div_v A = grad_v a and the right-hand sides of both kinetic models.

namespace mkin {

struct ModelParams {
  double nu = 0.0;        // viscosity, landau model
  double beta = 0.0;      // velocity weight exponent, toy model (<= 2)
  double m = 4.0;         // polynomial weight of the difference field (> 3)
  double k0 = 10.0;       // decay exponent of admissible data
  double c0 = 0.01;       // density lower bound
  double c_small = 10.0;  // bound on sup_x ||<v>^m f||_{L4 ^ L1} for small-data runs
  double m0 = 1.0;        // sup bound on initial data

  void validate() const;
};

struct CoefficientSet {
  // symmetric matrix field, components xx, xy, xz, yy, yz, zz
  std::array<Eigen::ArrayXd, 6> A;
  Eigen::ArrayXd a;
  std::array<Eigen::ArrayXd, 3> grad_a;
  std::array<Eigen::ArrayXd, 3> div_A;
  Eigen::ArrayXd neg_lap_a;  // -Lap_v a, for the Green's-identity residual
  double shell_mass_fraction = 0.0;
  bool shell_warning = false;

  static int sym_index(int d, int e);
  // max_v a(x, v) per x-point; cheap spectral-radius bound for A since tr A = a.
  double max_a() const { return a.size() ? a.maxCoeff() : 0.0; }
};

// Which discrete kernel family backs the convolutions.
//  sampled : each kernel component sampled pointwise (origin cell averaged).
//            Pointwise PSD by construction; div A = grad a only to the
//            discretization error.
//  riesz   : A-kernel synthesized in mode space as (xi xi^T/|xi|^2) ghat from
//            the sampled Coulomb kernel. tr A = a and div A = grad a hold to
//            roundoff; pointwise PSD inherited from the continuum operator up
//            to discretization error.
enum class KernelForm { sampled, riesz };

class LandauCoefficients {
 public:
  explicit LandauCoefficients(const PhaseGrid& grid, KernelForm form = KernelForm::riesz);
  ~LandauCoefficients();
  LandauCoefficients(LandauCoefficients&&) noexcept;
  LandauCoefficients& operator=(LandauCoefficients&&) noexcept;

  struct Request {
    bool want_a = true;
    bool want_A = true;
    bool want_grad_a = true;
    bool want_div_A = false;
    bool want_neg_lap_a = false;
  };

  CoefficientSet compute(const Field& f, const Request& req) const;
  CoefficientSet compute(const Field& f) const { return compute(f, Request{}); }
  const PhaseGrid& grid() const;
  KernelForm form() const;

  // Fraction of |f| mass sitting in the outermost velocity cells above which
  // the box truncation is flagged as unreliable.
  static constexpr double kShellMassThreshold = 1e-6;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Shared per-grid engines so the free functions below stay cheap to call.
const LandauCoefficients& landau_engine(const PhaseGrid& grid,
                                        KernelForm form = KernelForm::riesz);

Eigen::ArrayXd compute_a(const Field& f, KernelForm form = KernelForm::riesz);
std::array<Eigen::ArrayXd, 6> compute_A(const Field& f, KernelForm form = KernelForm::riesz);
std::array<Eigen::ArrayXd, 3> compute_grad_a(const Field& f, KernelForm form = KernelForm::riesz);

// Average of 1/|u| over the unit cube centered at the origin (closed form).
double cube_average_inv_r();

// d_t f = grad_v . (rho(x) <v>^beta grad_v f); rho frozen while the operator
// is applied. Pseudo-spectral: gradient and divergence in modes, the
// coefficient product in real space.
Field toy_rhs(const Field& f, const ModelParams& p);
Field toy_rhs(const Field& f, const ModelParams& p, const Eigen::ArrayXd& rho);

// d_t f = grad_v . (A[f] grad_v f - f grad_v a[f]) + nu Lap_v f, with the
// coefficient fields frozen to `coeffs`.
Field landau_rhs(const Field& f, const ModelParams& p);
Field landau_rhs(const Field& f, const ModelParams& p, const CoefficientSet& coeffs);

}  // namespace mkin
