#pragma once

// Memoized running integrals. Both tables store the integral at geometric
// checkpoints and answer a query with one short adaptive quadrature from
// the nearest checkpoint, so repeated evaluations far out cost O(1).

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "blowup/numerics/quadrature.hpp"

namespace blowup {

using ScalarFn = std::function<double(double)>;

/// t -> integral of g over [base, t]. Checkpoints at
/// base + scale * (2^(j/8) - 1), j >= 0, filled lazily upward.
class Antiderivative {
 public:
  Antiderivative(ScalarFn g, double base, double tol, double scale = 1.0)
      : state_(std::make_shared<Table>()) {
    state_->g = std::move(g);
    state_->base = base;
    state_->tol = tol;
    state_->scale = scale;
    state_->cum.push_back(0.0);
  }

  double base() const { return state_->base; }

  double operator()(double t) const {
    const Table& s = *state_;
    if (t == s.base) return 0.0;
    if (t < s.base) return -definite_integral(s.g, t, s.base, s.tol, "antiderivative");
    const double span = (t - s.base) / s.scale + 1.0;
    const int j = static_cast<int>(std::floor(8.0 * std::log2(span)));
    if (!(j >= 0) || j > 40000) {
      return definite_integral(s.g, s.base, t, s.tol, "antiderivative");
    }
    double anchor;
    {
      std::lock_guard<std::mutex> lock(s.mutex);
      while (static_cast<int>(s.cum.size()) <= j) {
        const int k = static_cast<int>(s.cum.size()) - 1;
        s.cum.push_back(s.cum.back() +
                        definite_integral(s.g, node(k), node(k + 1), s.tol, "antiderivative"));
      }
      anchor = s.cum[static_cast<std::size_t>(j)];
    }
    return anchor + definite_integral(s.g, node(j), t, s.tol, "antiderivative");
  }

 private:
  struct Table {
    ScalarFn g;
    double base = 0.0, tol = 1e-12, scale = 1.0;
    mutable std::mutex mutex;
    mutable std::vector<double> cum;
  };
  double node(int j) const {
    return state_->base + state_->scale * (std::exp2(j / 8.0) - 1.0);
  }
  std::shared_ptr<Table> state_;
};

/// t -> integral of g over [t, +inf) for t > origin. Checkpoints at
/// origin + scale * 2^(j/8) for j <= 8 * top_doublings, anchored by an
/// improper quadrature at the top and filled lazily downward.
class TailIntegral {
 public:
  TailIntegral(ScalarFn g, double origin, double tol, double scale = 1.0,
               int top_doublings = 40)
      : state_(std::make_shared<Table>()) {
    state_->g = std::move(g);
    state_->origin = origin;
    state_->tol = tol;
    state_->scale = scale;
    state_->top = 8 * top_doublings;
  }

  double origin() const { return state_->origin; }

  double operator()(double t) const {
    const Table& s = *state_;
    if (!(t > s.origin)) {
      throw DomainError("tail integral queried at or below its origin");
    }
    const double rel = (t - s.origin) / s.scale;
    const int j = static_cast<int>(std::floor(8.0 * std::log2(rel)));
    if (j >= s.top) return tail_integral(s.g, t, s.tol);
    if (j < s.top - 60000) {
      // Far below the table: integrate up to the lowest useful checkpoint.
      return definite_integral(s.g, t, node(s.top - 60000), s.tol, "tail segment") +
             (*this)(node(s.top - 60000));
    }
    double anchor;
    {
      std::lock_guard<std::mutex> lock(s.mutex);
      if (s.tail.empty()) s.tail.push_back(tail_integral(s.g, node(s.top), s.tol));
      // tail[i] holds the value at node(top - i).
      while (static_cast<int>(s.tail.size()) <= s.top - (j + 1)) {
        const int k = s.top - static_cast<int>(s.tail.size());
        s.tail.push_back(s.tail.back() +
                         definite_integral(s.g, node(k), node(k + 1), s.tol, "tail segment"));
      }
      anchor = s.tail[static_cast<std::size_t>(s.top - (j + 1))];
    }
    return anchor + definite_integral(s.g, t, node(j + 1), s.tol, "tail segment");
  }

 private:
  struct Table {
    ScalarFn g;
    double origin = 0.0, tol = 1e-12, scale = 1.0;
    int top = 320;
    mutable std::mutex mutex;
    mutable std::vector<double> tail;
  };
  double node(int j) const {
    return state_->origin + state_->scale * std::exp2(j / 8.0);
  }
  std::shared_ptr<Table> state_;
};

}  // namespace blowup
