#pragma once

// Fixed-point iteration for the velocity v(u) = du/dr of radial large
// solutions, and the blow-up profiles d -> u_k(d) obtained from it.
//
//   v_k(u) = sqrt(2 (F(u) - (N-1) int_U0^u v_{k-1}/r dt)),
//   r(t)   = 1 - int_t^inf ds / v_{k-1},
//
// stored as the ratio w = v_k / v0 on a geometric grid over [U0, Umax].

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "blowup/nonlinearity.hpp"
#include "blowup/numerics/cumulative.hpp"

namespace blowup {

/// Radius of the ball |v/v0 - 1| < rho in which iterates must stay.
inline constexpr double kBallRadius = 0.25;

struct ExpansionOptions {
  int grid = 2048;               // M, number of nodes
  std::optional<double> umax;    // default 1e6 * U0, clamped below F overflow
  double tol = 1e-12;            // per-segment quadrature tolerance
};

/// k-th iterate as w_i = v_k(u_i)/v0(u_i) on u_i = U0 (Umax/U0)^(i/(M-1)).
/// Between nodes w is linear in log u; beyond Umax it is frozen at w_M.
/// `tail_i` caches int_{u_i}^inf dt/v_k.
class VelocityProfile {
 public:
  int k = 0;
  int N = 1;
  double U0 = 0.0;
  double Umax = 0.0;
  Eigen::ArrayXd u;
  Eigen::ArrayXd w;
  Eigen::ArrayXd tail;

  const Nonlinearity& nonlinearity() const { return *nl_; }
  Eigen::Index size() const { return u.size(); }

  /// w at an arbitrary point (1 below U0, w_M above Umax).
  double ratio(double t) const;
  double velocity(double t) const;
  /// int_t^inf ds / v_k.
  double tail_integral(double t) const;
  /// r(t) = 1 - tail_integral(t).
  double radius(double t) const { return 1.0 - tail_integral(t); }

 private:
  friend VelocityProfile make_v0(const Nonlinearity&, double, const ExpansionOptions&);
  friend VelocityProfile iterate(const Nonlinearity&, int, const VelocityProfile&);
  void fill_tail();
  double inv_velocity(double t) const;
  std::shared_ptr<const Nonlinearity> nl_;
  std::shared_ptr<const TailIntegral> r0_;  // int_t^inf 1/v0, for t > Umax
  double tol_ = 1e-12;
  double log_step_ = 0.0;
};

/// The k = 0 profile (w = 1). Refuses nonlinearities failing the
/// Keller-Osserman test. Requires U0 > a, F(U0) > 0, M >= 64 and
/// Umax >= 100 U0 unless Umax was clamped to keep F finite.
VelocityProfile make_v0(const Nonlinearity& nl, double U0, const ExpansionOptions& opts = {});

/// Smallest U0 in {1, 2, 4, ..., 2^40} with int_U0^inf dt/v0 <= (1-rho)/2
/// and sup |w_1 - 1| <= rho/2 on a coarse grid.
double choose_U0(const Nonlinearity& nl, int N);

/// One application of the fixed-point map. Throws U0TooSmallError when the
/// radicand turns nonpositive or r drops below 1/2, BallViolationError when
/// the new ratio leaves the ball.
VelocityProfile iterate(const Nonlinearity& nl, int N, const VelocityProfile& prev);

struct IterationResult {
  std::vector<VelocityProfile> profiles;  // v_0, v_1, ...
  std::vector<double> deltas;             // deltas[k-1] = sup |w_k/w_{k-1} - 1|
  double U0 = 0.0;                        // after any automatic retry
  bool converged = false;
  bool geometric = false;                 // every delta ratio <= 0.9
  bool retried = false;
};

/// Iterates until delta_k < tol or k = kmax. A U0TooSmallError on the first
/// attempt is retried once with U0 doubled. Throws ContractionError when
/// delta fails to decrease three times in a row.
IterationResult iterate_to_convergence(const Nonlinearity& nl, int N, double U0, double tol,
                                       int kmax, const ExpansionOptions& opts = {});

/// u_k(d): the root of int_u^inf dt/v_k = d. Throws DomainError unless
/// 0 < d <= int_U0^inf dt/v_k.
double profile_from_velocity(const VelocityProfile& vp, double d);

/// d -> u_k(d) with a cache of solved pairs.
class BlowupProfile {
 public:
  explicit BlowupProfile(VelocityProfile vp);
  int k() const { return vp_->k; }
  const VelocityProfile& velocity() const { return *vp_; }
  double max_d() const { return vp_->tail(0); }
  double operator()(double d) const;
  /// Solved (d, u) pairs in increasing d.
  std::vector<std::pair<double, double>> cached() const;

 private:
  std::shared_ptr<const VelocityProfile> vp_;
  struct Cache {
    std::mutex mutex;
    std::map<double, double> table;
  };
  std::shared_ptr<Cache> cache_;
};

/// phi_c(d) solving int_phi^inf ds / sqrt(2 (F + c)) = d.
double one_dim_profile(const Nonlinearity& nl, double c, double d);

/// phi_0(d) - phi_c(d), evaluated from the difference of the two
/// integrands so that gaps far below the resolution of phi survive.
double one_dim_gap(const Nonlinearity& nl, double c, double d);

struct ProfileComparison {
  double d, u_a, u_b, gap, normalized_gap, tail;
};

/// Per d: u_a, u_b, u_b - u_a, int_min^max du/v0 and the k-th tail
/// int_{u_a}^inf du/v0 for scaling.
std::vector<ProfileComparison> compare_profiles(const BlowupProfile& pa,
                                                const BlowupProfile& pb,
                                                const std::vector<double>& d_grid);

}  // namespace blowup
