#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

// Radial dyadic partition of unity theta_k over velocity space. Ring k lives
// on V_0 = B(0,4), V_k = B(0, 2^{k+2}) \ closure B(0, 2^k); at most two
// consecutive rings overlap at any radius and the thetas sum to one.

namespace mkin {

// C^inf step built from sigma(x) = exp(-1/x): 0 for x<=0, 1 for x>=1.
double smooth_step(double x);

// Generator bumps. bump1: supported on [2,8], equal to 1 on [3,7].
// bump0: supported on [0,4], equal to 1 on [0,3.5] and matching bump1(2r) on
// the descent so that every ring profile is an exact dyadic rescaling of its
// neighbors (the derivative-halving law then holds ring to ring, not just
// asymptotically).
double bump0(double r);
double bump1(double r);

class DyadicPartition {
 public:
  explicit DyadicPartition(int n_max, int table_points = 1 << 16);

  // Smallest partition whose rings cover the corner of the velocity box
  // [-l_v, l_v)^3: n_max = ceil(log2(l_v)) + 1.
  static DyadicPartition for_box(double l_v);

  int n_max() const { return n_max_; }
  double r_max() const { return r_max_; }  // 2^{n_max+1}

  double ring_lower(int k) const;  // 0 for k=0 else 2^k
  double ring_upper(int k) const;  // 2^{k+2}

  // Table-backed evaluation (cubic interpolation on a shared radial grid,
  // clamped to the exact ring support). Throws outside [0, r_max].
  double theta(int k, double r) const;
  double theta(int k, const Eigen::Vector3d& v) const { return theta(k, v.norm()); }

  // Direct evaluation from the bump generators; reference path for checks.
  double theta_direct(int k, double r) const;

  // d theta_k / dr by central differences on the direct path.
  double theta_radial_derivative(int k, double r, double fd_step) const;

 private:
  double phi(int k, double r) const;
  double bump_sum(double r) const;

  int n_max_;
  double r_max_;
  int table_points_;
  double table_h_;
  std::vector<std::vector<double>> tables_;  // per ring, shared radial nodes
};

struct PartitionReport {
  double max_sum_defect = 0.0;     // max |sum_k theta_k - 1|
  double min_sum_squares = 1e300;  // min sum_k theta_k^2
  long support_violations = 0;     // theta_k > 0 strictly outside V_k
  long n_samples = 0;
};

PartitionReport verify_partition(const DyadicPartition& part,
                                 const std::vector<Eigen::Vector3d>& samples);

struct RingDerivativeStats {
  int k = 0;
  double sup_grad = 0.0;         // sup |grad theta_k|
  double sup_grad_scaled = 0.0;  // sup |grad theta_k| * 2^k
  double sup_hess = 0.0;         // sup |grad^2 theta_k| (spectral norm)
  double sup_hess_scaled = 0.0;  // * 2^{2k}
};

struct DerivativeDecayReport {
  std::vector<RingDerivativeStats> rings;
  double sup_weighted_grad_sum = 0.0;  // sup_r sum_k <r> |grad theta_k|
  double two_sup_weighted_grad = 0.0;  // 2 * sup_k sup_r <r> |grad theta_k|
};

DerivativeDecayReport verify_derivative_decay(const DyadicPartition& part,
                                              const std::vector<int>& k_list,
                                              double fd_step = 1e-5);

}  // namespace mkin
