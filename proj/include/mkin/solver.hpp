#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "mkin/grid.hpp"
#include "mkin/landau.hpp"

// Split-step time integration: exact transport shear composed with an
// explicit, sub-cycled SSP-RK3 collision substep whose coefficient fields are
// frozen at the substep start. Per-step conservation and bound monitors.

namespace mkin {

enum class Model { toy, landau };
enum class Scheme { lie, strang };

struct Monitors {
  bool positivity = true;
  bool rho_lower = true;
  bool weighted_sup = true;
};

struct SolverConfig {
  Model model = Model::toy;
  double dt = 0.0;          // must be an integer multiple of dxi
  double t_end = 0.0;
  Scheme scheme = Scheme::strang;
  double cfl_safety = 0.5;  // in (0, 1]
  ModelParams params;
  Monitors monitors;
  int snapshot_every = 0;   // 0: keep no snapshots
  bool collision_enabled = true;
  bool validate_initial_data = false;
  KernelForm kernel_form = KernelForm::riesz;

  void validate(const PhaseGrid& g) const;
};

struct StepDiagnostics {
  double time = 0.0;
  double mass = 0.0;
  Eigen::Vector3d momentum = Eigen::Vector3d::Zero();
  double energy = 0.0;
  double min_f = 0.0;
  double rho_min = 0.0;
  double wsup_k0 = 0.0;
};

struct InitialCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
};

struct InitialDataReport {
  std::vector<InitialCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Positivity, sup bound, density lower bound, decay of the weighted tail at
// the box shell, and the weighted smallness quantity sup_x ||<v>^m f||_{L4 ^ L1}.
InitialDataReport validate_initial(const Field& f0, const ModelParams& params);

struct Trajectory {
  std::vector<StepDiagnostics> series;
  std::vector<Field> snapshots;     // cadence per SolverConfig::snapshot_every
  std::vector<double> snapshot_times;
  bool aborted = false;
  std::string abort_reason;
};

class Solver {
 public:
  Solver(const PhaseGrid& grid, const SolverConfig& cfg);

  // One full step dt: Lie T(dt) C(dt) or Strang C(dt/2) T(dt) C(dt/2); the
  // collision half is sub-cycled under the explicit diffusion CFL.
  StepDiagnostics step(Field& state) const;

  Trajectory run(Field initial) const;

  StepDiagnostics diagnostics(const Field& state) const;
  double collision_dt_limit(const Field& state) const;

  const SolverConfig& config() const { return cfg_; }

 private:
  void collision_substep(Field& state, double dt) const;

  PhaseGrid grid_;
  SolverConfig cfg_;
};

}  // namespace mkin
