#include "mkin/dyadic.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mkin {

namespace {

inline double sigma(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = sigma(x);
  const double b = sigma(1.0 - x);
  return a / (a + b);
}

double bump1(double r) {
  if (r <= 2.0 || r >= 8.0) return 0.0;
  if (r < 3.0) return smooth_step(r - 2.0);
  if (r <= 7.0) return 1.0;
  return 1.0 - smooth_step(r - 7.0);
}

double bump0(double r) {
  if (r < 0.0 || r >= 4.0) return 0.0;
  if (r <= 3.5) return 1.0;
  return bump1(2.0 * r);
}

double DyadicPartition::phi(int k, double r) const {
  if (k == 0) return bump0(r);
  return bump1(std::ldexp(r, 1 - k));  // bump1(2^{1-k} r)
}

double DyadicPartition::bump_sum(double r) const {
  // Rings beyond n_max only open up strictly above r_max, so the materialized
  // bumps are the full sum on [0, r_max].
  double s = 0.0;
  for (int j = 0; j <= n_max_; ++j) s += phi(j, r);
  return s;
}

DyadicPartition::DyadicPartition(int n_max, int table_points)
    : n_max_(n_max), table_points_(table_points) {
  if (n_max < 1) throw std::invalid_argument("DyadicPartition: n_max must be >= 1");
  if (table_points < 16) throw std::invalid_argument("DyadicPartition: table too small");
  r_max_ = std::ldexp(1.0, n_max_ + 1);
  table_h_ = r_max_ / (table_points_ - 1);
  tables_.resize(n_max_ + 1);
  for (int k = 0; k <= n_max_; ++k) {
    tables_[k].resize(table_points_);
    for (int i = 0; i < table_points_; ++i) {
      tables_[k][i] = theta_direct(k, i * table_h_);
    }
  }
}

DyadicPartition DyadicPartition::for_box(double l_v) {
  if (!(l_v > 0.0)) throw std::invalid_argument("DyadicPartition: l_v must be > 0");
  const int n = static_cast<int>(std::ceil(std::log2(l_v))) + 1;
  return DyadicPartition(std::max(1, n));
}

double DyadicPartition::ring_lower(int k) const { return k == 0 ? 0.0 : std::ldexp(1.0, k); }
double DyadicPartition::ring_upper(int k) const { return std::ldexp(1.0, k + 2); }

double DyadicPartition::theta_direct(int k, double r) const {
  if (k < 0 || k > n_max_) throw std::out_of_range("DyadicPartition: ring index");
  if (r < 0.0 || r > r_max_) {
    throw std::domain_error("DyadicPartition: radius " + std::to_string(r) +
                            " outside materialized range [0, " + std::to_string(r_max_) + "]");
  }
  const double p = phi(k, r);
  if (p == 0.0) return 0.0;
  return p / bump_sum(r);
}

double DyadicPartition::theta(int k, double r) const {
  if (k < 0 || k > n_max_) throw std::out_of_range("DyadicPartition: ring index");
  if (r < 0.0 || r > r_max_) {
    throw std::domain_error("DyadicPartition: radius " + std::to_string(r) +
                            " outside materialized range [0, " + std::to_string(r_max_) + "]");
  }
  // The profiles are flat to all orders at the support edges, so clamping to
  // the exact support keeps the interpolated sum a partition of unity. Ring 0
  // is a full ball: its lower edge is interior.
  if ((k > 0 && r <= ring_lower(k)) || r >= ring_upper(k)) return 0.0;

  const double u = r / table_h_;
  long i = static_cast<long>(u);
  if (i >= table_points_ - 1) i = table_points_ - 2;
  const double t = u - i;
  const auto& y = tables_[k];
  const double ym = (i > 0) ? y[i - 1] : y[0];
  const double y0 = y[i];
  const double y1 = y[i + 1];
  const double yp = (i + 2 < table_points_) ? y[i + 2] : y[i + 1];
  // Catmull-Rom; reproduces constants exactly, so the ring tables still sum
  // to one pointwise.
  const double a0 = -0.5 * ym + 1.5 * y0 - 1.5 * y1 + 0.5 * yp;
  const double a1 = ym - 2.5 * y0 + 2.0 * y1 - 0.5 * yp;
  const double a2 = -0.5 * ym + 0.5 * y1;
  return ((a0 * t + a1) * t + a2) * t + y0;
}

double DyadicPartition::theta_radial_derivative(int k, double r, double fd_step) const {
  const double h = fd_step;
  const double rp = std::min(r + h, r_max_);
  const double rm = std::max(r - h, 0.0);
  return (theta_direct(k, rp) - theta_direct(k, rm)) / (rp - rm);
}

PartitionReport verify_partition(const DyadicPartition& part,
                                 const std::vector<Eigen::Vector3d>& samples) {
  PartitionReport rep;
  rep.n_samples = static_cast<long>(samples.size());
  for (const auto& v : samples) {
    const double r = v.norm();
    double sum = 0.0, sum_sq = 0.0;
    for (int k = 0; k <= part.n_max(); ++k) {
      const double th = part.theta(k, r);
      sum += th;
      sum_sq += th * th;
      const bool outside = (r <= part.ring_lower(k)) || (r >= part.ring_upper(k));
      if (outside && th != 0.0) ++rep.support_violations;
    }
    rep.max_sum_defect = std::max(rep.max_sum_defect, std::abs(sum - 1.0));
    rep.min_sum_squares = std::min(rep.min_sum_squares, sum_sq);
  }
  return rep;
}

DerivativeDecayReport verify_derivative_decay(const DyadicPartition& part,
                                              const std::vector<int>& k_list,
                                              double fd_step) {
  DerivativeDecayReport rep;
  const int probes = 4096;
  for (int k : k_list) {
    RingDerivativeStats st;
    st.k = k;
    const double lo = part.ring_lower(k);
    const double hi = std::min(part.ring_upper(k), part.r_max());
    const double h = fd_step * std::ldexp(1.0, k);
    for (int i = 1; i < probes; ++i) {
      const double r = lo + (hi - lo) * i / probes;
      if (r - h <= 0.0 || r + h >= part.r_max()) continue;
      const double g = (part.theta_direct(k, r + h) - part.theta_direct(k, r - h)) / (2.0 * h);
      const double g2 = (part.theta_direct(k, r + h) - 2.0 * part.theta_direct(k, r) +
                         part.theta_direct(k, r - h)) / (h * h);
      // theta_k is radial: Hessian eigenvalues are theta'' and theta'/r.
      const double hess = std::max(std::abs(g2), std::abs(g) / r);
      st.sup_grad = std::max(st.sup_grad, std::abs(g));
      st.sup_hess = std::max(st.sup_hess, hess);
    }
    st.sup_grad_scaled = st.sup_grad * std::ldexp(1.0, k);
    st.sup_hess_scaled = st.sup_hess * std::ldexp(1.0, 2 * k);
    rep.rings.push_back(st);
    rep.two_sup_weighted_grad = std::max(
        rep.two_sup_weighted_grad, 2.0 * st.sup_grad * std::sqrt(1.0 + hi * hi));
  }
  // sup over r of sum_k <r> |theta_k'(r)|, all materialized rings.
  const double h0 = fd_step;
  for (int i = 1; i < 4 * probes; ++i) {
    const double r = part.r_max() * i / (4.0 * probes + 1.0);
    if (r - h0 <= 0.0 || r + h0 >= part.r_max()) continue;
    double s = 0.0;
    for (int k = 0; k <= part.n_max(); ++k) {
      const double g = (part.theta_direct(k, r + h0) - part.theta_direct(k, r - h0)) / (2.0 * h0);
      s += std::sqrt(1.0 + r * r) * std::abs(g);
    }
    rep.sup_weighted_grad_sum = std::max(rep.sup_weighted_grad_sum, s);
  }
  return rep;
}

}  // namespace mkin
