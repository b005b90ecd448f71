#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mkin/dyadic.hpp"
#include "mkin/solver.hpp"
#include "mkin/symbol.hpp"

// Twin-solution experiments: run a base configuration against a perturbed
// sibling, form the weighted difference w = <v>^m (f - g), and measure it in
// the ring-localized M-weighted energies that drive the uniqueness estimates.

namespace mkin {

enum class PerturbationKind { initial_bump, resolution, timestep };

struct ExperimentConfig {
  PhaseGrid grid;
  SolverConfig solver;
  std::function<Field(const PhaseGrid&)> initial;

  PerturbationKind kind = PerturbationKind::initial_bump;
  double delta0 = 1e-3;

  SymbolParams sym{0.25, 0.5};  // unweighted family, exponent 1/2 + epsilon
  double weighted_delta = 0.25; // ring family M_n, exponent 1
  double T0 = 0.0;              // diagnostic horizon; 0 means t_end
  double ring_m = 4.0;
  std::vector<double> mollifier_radii{0.8, 0.4, 0.2, 0.1};
  std::vector<double> commutator_T_list;  // empty: skip the commutator ratios
  int snapshot_every = 1;
  int gauss_nodes = 48;         // T-quadrature order for the double time integrals

  void validate() const;
  double horizon() const { return T0 > 0.0 ? T0 : solver.t_end; }
};

struct MWeightedEnergy {
  double base = 0.0;         // ||w||^2_{L2_{t,x,v}} on [0, T0]
  double dissipation = 0.0;  // sum_n || 2^{beta n/2} grad_v M_n w_n ||^2_{L2_{T,t,x,v}}
};

struct LaplCheck {
  double lhs = 0.0;  // quadruple integral of |xi|^2 |M w_hat|^2
  double rhs = 0.0;  // 2/(eps delta) * base
  bool pass = false;
};

struct MollifierPoint {
  double a = 0.0;
  double eps_rho = 0.0;    // sup_t ||rho - rho * phi_a||_inf, nonnegative kernel
  double eps_phase = 0.0;  // sup_t,x ||<v>^{m+|beta|/2} (f - f*psi_a)||_{Linf ^ L1 in v}
};

struct CommutatorPoint {
  double T = 0.0;
  double comm_norm = 0.0;  // || [M, phi] f ||_2
  double ratio = 0.0;      // comm_norm / (T ||phi||_{H5} ||M f||_2)
};

struct CommutatorReport {
  std::vector<CommutatorPoint> points;
  double slope = 0.0;  // log-log slope of comm_norm vs T
  double max_ratio = 0.0;
  double h5_norm = 0.0;
};

struct UniquenessReport {
  std::vector<double> times;
  std::vector<double> distance;  // ||f - g||_2 at the recorded times
  double sup_distance = 0.0;
  bool zero_distance = false;    // distances identically zero

  MWeightedEnergy energy;
  LaplCheck lapl;

  std::vector<MollifierPoint> mollifier;
  bool mollifier_decreasing = false;

  // ratios r(T) of the spatial-multiplier commutator against the initial
  // density, when requested
  CommutatorReport commutator;
  bool commutator_run = false;

  double rho_min_observed = 0.0;
  double rho_bound = 0.0;        // c0 / 2
  bool rho_lower_ok = false;

  bool aborted = false;
  std::string note;
};

UniquenessReport twin_run(const ExperimentConfig& cfg);

// <v>^m (f - g) on a shared grid.
Field weighted_difference(const Field& f, const Field& g, double m);

// w_n = theta_n <v>^m w; sum_n w_n reconstructs <v>^m w.
std::vector<Field> ring_decompose(const Field& w, const DyadicPartition& part, double m);

// Energies of a w-trajectory. The t-integral runs over the snapshot times
// with trapezoid weights; the inner T-integral of the symbol is done by
// Gauss-Legendre since the bound it is checked against is pointwise in t.
MWeightedEnergy m_weighted_energy(const std::vector<Field>& w, const std::vector<double>& times,
                                  double weighted_delta, double beta,
                                  const DyadicPartition& part, double T0, int gauss_nodes = 48);

LaplCheck lapl_trajectory_check(const std::vector<Field>& w, const std::vector<double>& times,
                                const SymbolParams& sym, double T0, int gauss_nodes = 48);

// r(T) = ||M(phi f) - phi M f|| / (T ||phi||_{H5} ||M f||) over a list of
// horizons T, plus the scaling slope of the commutator norm itself.
CommutatorReport commutator_x_experiment(const Eigen::ArrayXd& phi, const Field& f,
                                         const SymbolParams& sym,
                                         const std::vector<double>& T_list);

std::vector<MollifierPoint> mollifier_convergence(const std::vector<Field>& snaps,
                                                  const std::vector<double>& radii, double m,
                                                  double beta);

struct StabilitySweep {
  std::vector<double> delta0;
  std::vector<double> sup_distance;
  double slope = 0.0;  // log-log slope, ~1 in the linear-response regime
};

StabilitySweep stability_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas);

// Restriction to a nested coarser grid (every other velocity node).
Field restrict_velocity(const Field& fine, const PhaseGrid& coarse);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mkin
