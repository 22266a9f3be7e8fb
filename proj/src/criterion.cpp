#include "blowup/criterion.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "blowup/energy.hpp"
#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::universal: return "universal";
    case Classification::non_universal: return "non-universal";
    case Classification::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double lambda_at(const Nonlinearity& nl, double u, std::optional<double> base) {
  return EnergyIntegrals(nl, base).lambda(u);
}

CriterionReport classify(const Nonlinearity& nl, double u_lo, double u_hi, int M,
                         const CriterionThresholds& thresholds, std::optional<double> base) {
  if (!(u_lo > 0.0) || !(u_hi >= 100.0 * u_lo)) {
    throw DomainError("classify needs 0 < u_lo and u_hi >= 100 u_lo");
  }
  if (M < 16) throw DomainError("classify needs at least 16 samples");
  EnergyIntegrals E(nl, base);
  CriterionReport rep;
  rep.thresholds = thresholds;
  rep.base_point = E.base();
  for (int j = 0; j < M; ++j) {
    const double u = u_lo * std::pow(u_hi / u_lo, static_cast<double>(j) / (M - 1));
    double lam;
    try {
      lam = E.lambda(u);
    } catch (const Error& e) {
      rep.failed_at = u;
      rep.failure = e.what();
      return rep;
    }
    if (!(lam > 0.0) || !std::isfinite(lam)) {
      std::ostringstream os;
      os << "Lambda(" << u << ") = " << lam << " is not a positive finite number";
      rep.failed_at = u;
      rep.failure = os.str();
      return rep;
    }
    rep.u.push_back(u);
    rep.lambda.push_back(lam);
  }

  std::vector<Eigen::Index> top;
  for (int j = 0; j < M; ++j) {
    if (rep.u[j] >= u_hi / 10.0 * (1.0 - 1e-12)) top.push_back(j);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(top.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = std::log(rep.u[top[i]]);
    A(i, 1) = 1.0;
    y(i) = std::log(rep.lambda[top[i]]);
  }
  const Eigen::Vector2d fit = A.colPivHouseholderQr().solve(y);
  rep.slope = fit(0);
  rep.intercept = fit(1);

  const double first = rep.lambda.front();
  const double last = rep.lambda.back();
  if (rep.slope < -thresholds.slope_tol && last < thresholds.decay_factor * first) {
    rep.classification = Classification::universal;
  } else if (std::abs(rep.slope) <= thresholds.slope_tol && last >= thresholds.plateau_floor) {
    rep.classification = Classification::non_universal;
  }
  return rep;
}

std::vector<LambdaRow> lambda_along_profile(const Nonlinearity& nl, int N,
                                            const BlowupProfile& profile,
                                            const std::vector<double>& d_grid) {
  if (profile.k() != 0) throw DomainError("lambda_along_profile needs the k = 0 profile");
  EnergyIntegrals E(nl);
  std::vector<LambdaRow> rows;
  rows.reserve(d_grid.size());
  for (double d : d_grid) {
    const double u0 = profile(d);
    const double lam = E.lambda(u0);
    rows.push_back({d, u0, lam, (N - 1) * lam});
  }
  return rows;
}

}  // namespace blowup
