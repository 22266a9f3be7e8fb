#pragma once

// Universality test for the blow-up rate:
//   Lambda(u) = sqrt(2F(u)) int_u^inf (int_b^t sqrt(2F) ds) / (2F(t))^(3/2) dt
// tends to 0 for universal nonlinearities and stays bounded away from 0
// otherwise.

#include <optional>
#include <string>
#include <vector>

#include "blowup/expansion.hpp"
#include "blowup/nonlinearity.hpp"

namespace blowup {

enum class Classification { universal, non_universal, inconclusive };

const char* to_string(Classification c);

struct CriterionThresholds {
  double slope_tol = 0.05;      // |s| <= slope_tol counts as flat
  double plateau_floor = 1e-3;  // flat and at least this large: non-universal
  double decay_factor = 0.5;    // universal needs Lambda(max) < factor * Lambda(min)
};

struct CriterionReport {
  std::vector<double> u;
  std::vector<double> lambda;
  double slope = 0.0;      // least-squares d log Lambda / d log u over the top decade
  double intercept = 0.0;  // log Lambda at log u = 0 of the same fit
  Classification classification = Classification::inconclusive;
  CriterionThresholds thresholds;
  double base_point = 0.0;  // lower limit of the inner integral
  std::optional<double> failed_at;
  std::string failure;
};

/// Lambda(u) with the inner integral based at `base` (default: the
/// nonlinearity's F-base point).
double lambda_at(const Nonlinearity& nl, double u, std::optional<double> base = std::nullopt);

/// Samples Lambda at M geometric points of [u_lo, u_hi] and classifies.
/// Sample failures give an inconclusive report naming the failing u.
CriterionReport classify(const Nonlinearity& nl, double u_lo, double u_hi, int M,
                         const CriterionThresholds& thresholds = {},
                         std::optional<double> base = std::nullopt);

struct LambdaRow {
  double d, u0, lambda;
  double predicted_gap;  // (N-1) Lambda(u0), first-order u - u0
};

/// The weakened criterion along a k = 0 profile.
std::vector<LambdaRow> lambda_along_profile(const Nonlinearity& nl, int N,
                                            const BlowupProfile& profile,
                                            const std::vector<double>& d_grid);

}  // namespace blowup
