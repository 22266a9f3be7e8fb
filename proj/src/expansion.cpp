#include "blowup/expansion.hpp"

#include <cmath>
#include <sstream>

#include "blowup/energy.hpp"
#include "blowup/errors.hpp"
#include "blowup/numerics/quadrature.hpp"
#include "blowup/numerics/roots.hpp"

namespace blowup {

namespace {

constexpr double kFCeiling = 1e300;
constexpr double kDeltaFloor = 1e-14;

// Largest point of [lo, hi] (to bisection accuracy in log) with F below the
// overflow ceiling.
double clamp_below_overflow(const Nonlinearity& nl, double lo, double hi) {
  if (nl.F(hi) <= kFCeiling) return hi;
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
    const double m = 0.5 * (a + b);
    (nl.F(std::exp(m)) <= kFCeiling ? a : b) = m;
  }
  return std::exp(a);
}

std::string describe(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

double VelocityProfile::ratio(double t) const {
  const Eigen::Index M = u.size();
  if (t <= U0) return w(0);
  if (t >= Umax) return w(M - 1);
  const double x = std::log(t / U0) / log_step_;
  const Eigen::Index i = std::min<Eigen::Index>(M - 2, static_cast<Eigen::Index>(x));
  const double frac = x - static_cast<double>(i);
  return w(i) + (w(i + 1) - w(i)) * frac;
}

double VelocityProfile::velocity(double t) const { return nl_->v0(t) * ratio(t); }

double VelocityProfile::inv_velocity(double t) const {
  const double F = nl_->F(t);
  if (std::isinf(F)) return 0.0;
  return 1.0 / (std::sqrt(2.0 * F) * ratio(t));
}

double VelocityProfile::tail_integral(double t) const {
  const Eigen::Index M = u.size();
  if (t >= Umax) return (*r0_)(t) / w(M - 1);
  auto g = [this](double s) { return inv_velocity(s); };
  if (t <= U0) return tail(0) + definite_integral(g, t, U0, tol_, "profile tail");
  Eigen::Index i = std::min<Eigen::Index>(M - 2, static_cast<Eigen::Index>(
                                                     std::log(t / U0) / log_step_));
  while (i > 0 && t < u(i)) --i;
  while (i < M - 2 && t >= u(i + 1)) ++i;
  return tail(i + 1) + definite_integral(g, t, u(i + 1), tol_, "profile tail");
}

void VelocityProfile::fill_tail() {
  const Eigen::Index M = u.size();
  tail.resize(M);
  tail(M - 1) = (*r0_)(Umax) / w(M - 1);
  auto g = [this](double s) { return inv_velocity(s); };
  for (Eigen::Index i = M - 2; i >= 0; --i) {
    tail(i) = tail(i + 1) + definite_integral(g, u(i), u(i + 1), tol_, "profile tail");
  }
}

VelocityProfile make_v0(const Nonlinearity& nl, double U0, const ExpansionOptions& opts) {
  if (opts.grid < 64) throw DomainError("expansion grid needs at least 64 nodes");
  if (!(U0 > nl.threshold()) && nl.kind() != Nonlinearity::Kind::exponential) {
    throw DomainError("U0 = " + describe(U0) + " must exceed the threshold a = " +
                      describe(nl.threshold()));
  }
  if (!(nl.F(U0) > 0.0)) throw DomainError("F(U0) must be positive");
  require_keller_osserman(nl, U0);

  const double requested = opts.umax.value_or(1e6 * U0);
  const double Umax = clamp_below_overflow(nl, U0, requested);
  if (Umax == requested && Umax < 100.0 * U0) {
    throw DomainError("Umax must be at least 100 U0");
  }
  if (Umax < 4.0 * U0) {
    throw DomainError("F overflows within [U0, 4 U0]; choose a smaller U0");
  }

  VelocityProfile vp;
  vp.nl_ = std::make_shared<const Nonlinearity>(nl);
  vp.tol_ = opts.tol;
  vp.U0 = U0;
  vp.Umax = Umax;
  const Eigen::Index M = opts.grid;
  vp.log_step_ = std::log(Umax / U0) / static_cast<double>(M - 1);
  vp.u.resize(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    vp.u(i) = U0 * std::exp(static_cast<double>(i) * vp.log_step_);
  }
  vp.u(M - 1) = Umax;
  vp.w = Eigen::ArrayXd::Ones(M);
  const double base = nl.base_point();
  vp.r0_ = std::make_shared<const TailIntegral>(
      [nl](double t) {
        const double F = nl.F(t);
        return std::isinf(F) ? 0.0 : 1.0 / std::sqrt(2.0 * F);
      },
      tail_origin(nl, base), opts.tol, std::max(1.0, std::abs(base)));
  vp.fill_tail();
  if (vp.tail(0) > 0.5) {
    throw U0TooSmallError("r(U0) = " + describe(1.0 - vp.tail(0)) +
                          " < 1/2; enlarge U0");
  }
  return vp;
}

VelocityProfile iterate(const Nonlinearity& nl, int N, const VelocityProfile& prev) {
  if (N < 1) throw DomainError("dimension N must be at least 1");
  VelocityProfile next = prev;
  next.k = prev.k + 1;
  next.N = N;
  if (N == 1) return next;  // the (N-1) factor removes every correction

  const Eigen::Index M = prev.u.size();
  auto integrand = [&prev](double t) { return prev.velocity(t) / prev.radius(t); };
  double I = 0.0;
  next.w(0) = 1.0;
  for (Eigen::Index i = 1; i < M; ++i) {
    I += definite_integral(integrand, prev.u(i - 1), prev.u(i), prev.tol_, "iterate");
    const double radicand = 1.0 - (N - 1) * I / nl.F(prev.u(i));
    if (!(radicand > 0.0)) {
      throw U0TooSmallError("radicand " + describe(radicand) + " <= 0 at u = " +
                            describe(prev.u(i)) + "; enlarge U0");
    }
    next.w(i) = std::sqrt(radicand);
    if (std::abs(next.w(i) - 1.0) >= kBallRadius) {
      throw BallViolationError("iterate " + std::to_string(next.k) + " has v/v0 = " +
                               describe(next.w(i)) + " at u = " + describe(prev.u(i)) +
                               ", outside the ball of radius 1/4; enlarge U0");
    }
  }
  next.fill_tail();
  if (next.tail(0) > 0.5) {
    throw U0TooSmallError("r(U0) < 1/2 for iterate " + std::to_string(next.k));
  }
  return next;
}

double choose_U0(const Nonlinearity& nl, int N) {
  ExpansionOptions coarse;
  coarse.grid = 256;
  coarse.tol = 1e-10;
  for (int j = 0; j <= 40; ++j) {
    const double U0 = std::ldexp(1.0, j);
    try {
      if (!(U0 > nl.threshold()) || !(nl.F(U0) > 0.0)) continue;
      auto inv_v0 = [&nl](double t) {
        const double F = nl.F(t);
        return std::isinf(F) ? 0.0 : 1.0 / std::sqrt(2.0 * F);
      };
      if (tail_integral(inv_v0, U0, 1e-10) > 0.5 * (1.0 - kBallRadius)) continue;
      VelocityProfile v1 = iterate(nl, N, make_v0(nl, U0, coarse));
      if ((v1.w - 1.0).abs().maxCoeff() <= 0.5 * kBallRadius) return U0;
    } catch (const KellerOssermanError&) {
      throw;
    } catch (const Error&) {
      // Candidate unusable; try the next one.
    }
  }
  throw NumericsError("choose_U0: no admissible U0 up to 2^40");
}

IterationResult iterate_to_convergence(const Nonlinearity& nl, int N, double U0, double tol,
                                       int kmax, const ExpansionOptions& opts) {
  if (kmax < 1) throw DomainError("kmax must be at least 1");
  auto run = [&](double start) {
    IterationResult res;
    res.U0 = start;
    res.profiles.push_back(make_v0(nl, start, opts));
    int rising = 0;
    for (int k = 1; k <= kmax; ++k) {
      res.profiles.push_back(iterate(nl, N, res.profiles.back()));
      const auto& cur = res.profiles[res.profiles.size() - 1].w;
      const auto& old = res.profiles[res.profiles.size() - 2].w;
      const double delta = (cur / old - 1.0).abs().maxCoeff();
      if (!res.deltas.empty() && delta > kDeltaFloor && delta >= res.deltas.back()) {
        if (++rising >= 3) {
          throw ContractionError("iteration deltas stopped decreasing at k = " +
                                 std::to_string(k) + "; enlarge U0");
        }
      } else {
        rising = 0;
      }
      res.deltas.push_back(delta);
      if (delta < tol) {
        res.converged = true;
        break;
      }
    }
    res.geometric = true;
    for (std::size_t i = 1; i < res.deltas.size(); ++i) {
      if (res.deltas[i - 1] > kDeltaFloor && res.deltas[i] > 0.9 * res.deltas[i - 1]) {
        res.geometric = false;
      }
    }
    return res;
  };
  try {
    return run(U0);
  } catch (const U0TooSmallError&) {
    IterationResult res = run(2.0 * U0);
    res.retried = true;
    return res;
  }
}

double profile_from_velocity(const VelocityProfile& vp, double d) {
  const double dmax = vp.tail(0);
  if (!(d > 0.0) || d > dmax) {
    throw DomainError("d = " + describe(d) + " outside (0, " + describe(dmax) +
                      "] covered by the profile");
  }
  if (d == dmax) return vp.U0;
  double lo = std::log(vp.U0);
  double hi = lo + std::log(2.0);
  int expansions = 0;
  while (vp.tail_integral(std::exp(hi)) > d) {
    lo = hi;
    hi += std::log(2.0) * (1 << std::min(expansions, 6));
    if (++expansions > 4000) throw NumericsError("profile root could not be bracketed");
  }
  const double x = find_root_monotone(
      [&](double s) { return vp.tail_integral(std::exp(s)) - d; }, lo, hi, 1e-14);
  return std::exp(x);
}

BlowupProfile::BlowupProfile(VelocityProfile vp)
    : vp_(std::make_shared<const VelocityProfile>(std::move(vp))),
      cache_(std::make_shared<Cache>()) {}

double BlowupProfile::operator()(double d) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto it = cache_->table.find(d);
    if (it != cache_->table.end()) return it->second;
  }
  const double u = profile_from_velocity(*vp_, d);
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->table.emplace(d, u);
  return u;
}

std::vector<std::pair<double, double>> BlowupProfile::cached() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  return {cache_->table.begin(), cache_->table.end()};
}

namespace {

auto one_dim_integrand(const Nonlinearity& nl, double c) {
  return [&nl, c](double s) {
    const double F = nl.F(s);
    if (std::isinf(F)) return 0.0;
    const double E = F + c;
    if (!(E > 0.0)) throw DomainError("F + c <= 0 on the integration range");
    return 1.0 / std::sqrt(2.0 * E);
  };
}

double one_dim_start(const Nonlinearity& nl) {
  return std::max(nl.threshold(), 0.0) + 1.0;
}

}  // namespace

double one_dim_profile(const Nonlinearity& nl, double c, double d) {
  if (!(d > 0.0)) throw DomainError("d must be positive");
  require_keller_osserman(nl, one_dim_start(nl));
  auto g = one_dim_integrand(nl, c);
  auto tail = [&](double s) { return tail_integral(g, s, 1e-13, "one-dimensional profile"); };
  const double a = nl.threshold();
  double lo = one_dim_start(nl);
  for (int i = 0; tail(lo) < d; ++i) {
    if (i >= 60) throw DomainError("d = " + describe(d) + " too large for this profile");
    lo = a + 0.5 * (lo - a);
  }
  double hi = 2.0 * lo;
  while (tail(hi) > d) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericsError("one-dimensional profile not bracketed");
  }
  const double x = find_root_monotone([&](double s) { return tail(std::exp(s)) - d; },
                                      std::log(lo), std::log(hi), 1e-14);
  return std::exp(x);
}

double one_dim_gap(const Nonlinearity& nl, double c, double d) {
  if (c < 0.0) throw DomainError("one_dim_gap needs c >= 0");
  if (c == 0.0) return 0.0;
  const double phi0 = one_dim_profile(nl, 0.0, d);
  // int_phi0^inf [ (2F)^(-1/2) - (2(F+c))^(-1/2) ]
  auto diff = [&nl, c](double s) {
    const double F = nl.F(s);
    if (std::isinf(F)) return 0.0;
    return -std::expm1(-0.5 * std::log1p(c / F)) / std::sqrt(2.0 * F);
  };
  const double D = tail_integral(diff, phi0, 1e-12, "one-dimensional gap");
  auto g = one_dim_integrand(nl, c);
  // The c-profile must cover the extra D below phi0.
  const double guess = D / g(phi0);
  // The gap can sit below the spacing of doubles near phi0, so integrate
  // over the unit interval in the scaled variable phi0 - x tau.
  auto covered = [&](double x) {
    auto scaled = [&](double tau) { return g(phi0 - x * tau); };
    return x * definite_integral(scaled, 0.0, 1.0, 1e-13, "one-dimensional gap");
  };
  const double delta = find_root_monotone([&](double x) { return covered(x) - D; }, 0.0,
                                          guess, guess * 1e-13);
  return delta;
}

std::vector<ProfileComparison> compare_profiles(const BlowupProfile& pa,
                                                const BlowupProfile& pb,
                                                const std::vector<double>& d_grid) {
  const Nonlinearity& nl = pa.velocity().nonlinearity();
  auto inv_v0 = [&nl](double t) {
    const double F = nl.F(t);
    return std::isinf(F) ? 0.0 : 1.0 / std::sqrt(2.0 * F);
  };
  std::vector<ProfileComparison> rows;
  rows.reserve(d_grid.size());
  for (double d : d_grid) {
    ProfileComparison row{};
    row.d = d;
    row.u_a = pa(d);
    row.u_b = pb(d);
    row.gap = row.u_b - row.u_a;
    row.normalized_gap =
        std::abs(definite_integral(inv_v0, row.u_a, row.u_b, 1e-12, "profile gap"));
    row.tail = tail_integral(inv_v0, row.u_a, 1e-12, "profile tail");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace blowup
