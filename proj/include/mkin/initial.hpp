#pragma once

#include <Eigen/Core>

#include "mkin/grid.hpp"

// Built-in initial data families. `mass` is the total phase-space mass; the
// mean density is mass / (2 pi)^dim_x.

namespace mkin {

// f0 = mass * G_sigma(v - u) / (2 pi)^dim_x, an isotropic Gaussian in v.
Field maxwellian(const PhaseGrid& g, double mass, double sigma = 1.0,
                 const Eigen::Vector3d& u = Eigen::Vector3d::Zero());

// maxwellian modulated by (1 + eps cos(k x1)).
Field perturbed_maxwellian(const PhaseGrid& g, double mass, double sigma, double eps,
                           int k_mode = 1, const Eigen::Vector3d& u = Eigen::Vector3d::Zero());

// two counter-drifting Gaussians, equal mass split
Field two_bump(const PhaseGrid& g, double mass, double sigma, double drift);

// Smooth localized bump used as a twin-run perturbation: amplitude times a
// Gaussian blob in v centered at v_c, modulated by (1 + cos(x1)) in space.
Field bump_perturbation(const PhaseGrid& g, double amplitude,
                        const Eigen::Vector3d& v_c = Eigen::Vector3d(0.5, 0.0, 0.0),
                        double width = 1.0);

}  // namespace mkin
