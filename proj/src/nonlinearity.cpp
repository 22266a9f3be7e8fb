#include "blowup/nonlinearity.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "blowup/errors.hpp"
#include "blowup/numerics/cumulative.hpp"

namespace blowup {

namespace {

constexpr int kScanLimit = 10000;
constexpr int kGridDoublings = 20;
constexpr double kFTol = 1e-12;

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

struct Nonlinearity::Impl {
  Kind kind = Kind::power;
  double a = 0.0;
  double p = 0.0;
  double c = 1.0;
  std::string spec;
  std::optional<Expression> expr;  // f for expression kind, F for direct-F
  std::optional<Antiderivative> F_table;
};

Nonlinearity::Nonlinearity(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Nonlinearity Nonlinearity::power(double p, double coefficient) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw DomainError("power nonlinearity needs p > 1, got " + format_double(p));
  }
  if (!(coefficient > 0.0)) throw DomainError("power coefficient must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::power;
  impl->p = p;
  impl->c = coefficient;
  impl->spec = "pow:" + format_double(p);
  return Nonlinearity(impl);
}

Nonlinearity Nonlinearity::exponential() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::exponential;
  impl->spec = "exp";
  return Nonlinearity(impl);
}

namespace {

// Points (a+1) 2^j, j = 0..20 (shifted to a + 2^j when a + 1 <= 0).
template <typename Fn>
bool for_each_grid_point(double a, Fn&& fn) {
  for (int j = 0; j <= kGridDoublings; ++j) {
    const double t = a + 1.0 > 0.0 ? std::ldexp(a + 1.0, j) : a + std::ldexp(1.0, j);
    if (!fn(t)) return false;
  }
  return true;
}

template <typename Fn>
bool admissible_threshold(double a, const Fn& f) {
  try {
    if (!(f(a) > 0.0)) return false;
    return for_each_grid_point(a, [&](double t) { return f(t) >= 0.0; });
  } catch (const EvaluationError&) {
    return false;
  }
}

template <typename Fn>
double scan_threshold(const Fn& f) {
  for (int t = 0; t <= kScanLimit; ++t) {
    if (admissible_threshold(static_cast<double>(t), f)) return t;
  }
  throw ThresholdError("no integer threshold a in [0, 10^4] with f(a) > 0 and f >= 0 beyond; "
                       "supply ';a=<real>'");
}

double central_difference(const Expression& F, double u) {
  const double h = 1e-5 * std::max(1.0, std::abs(u));
  return (F(u + h) - F(u - h)) / (2.0 * h);
}

}  // namespace

Nonlinearity Nonlinearity::from_F(const Expression& F, std::optional<double> a,
                                  std::string spec) {
  auto f = [&F](double u) { return central_difference(F, u); };
  double threshold;
  if (a) {
    threshold = *a;
    if (!admissible_threshold(threshold, f)) {
      throw DomainError("a = " + format_double(threshold) +
                        " does not satisfy F'(a) > 0 and F' >= 0 beyond");
    }
  } else {
    threshold = scan_threshold(f);
  }
  double prev = F(threshold);
  const bool monotone = for_each_grid_point(threshold, [&](double t) {
    const double v = F(t);
    const bool ok = v >= prev;
    prev = v;
    return ok;
  });
  if (!monotone) throw DomainError("F is not nondecreasing beyond a");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::direct_F;
  impl->a = threshold;
  impl->expr = F;
  impl->spec = spec.empty() ? "F:" + F.to_string() : std::move(spec);
  return Nonlinearity(impl);
}

Nonlinearity Nonlinearity::from_f(const Expression& f, std::optional<double> a,
                                  std::string spec) {
  double threshold;
  if (a) {
    threshold = *a;
    if (!admissible_threshold(threshold, f)) {
      throw DomainError("a = " + format_double(threshold) +
                        " does not satisfy f(a) > 0 and f >= 0 beyond");
    }
  } else {
    threshold = scan_threshold(f);
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::expression;
  impl->a = threshold;
  impl->expr = f;
  impl->F_table.emplace([f](double s) { return f(s); }, threshold, kFTol,
                        std::max(1.0, std::abs(threshold)));
  impl->spec = spec.empty() ? "expr:" + f.to_string() + ";a=" + format_double(threshold)
                            : std::move(spec);
  return Nonlinearity(impl);
}

Nonlinearity::Kind Nonlinearity::kind() const { return impl_->kind; }
double Nonlinearity::threshold() const { return impl_->a; }
double Nonlinearity::base_point() const {
  return impl_->kind == Kind::power || impl_->kind == Kind::exponential ? 0.0 : impl_->a;
}
double Nonlinearity::exponent() const { return impl_->p; }
double Nonlinearity::coefficient() const { return impl_->c; }
const std::string& Nonlinearity::spec() const { return impl_->spec; }

double Nonlinearity::f(double u) const {
  switch (impl_->kind) {
    case Kind::power: return u > 0.0 ? impl_->c * std::pow(u, impl_->p) : 0.0;
    case Kind::exponential: return std::exp(u);
    case Kind::direct_F: return central_difference(*impl_->expr, u);
    case Kind::expression: return (*impl_->expr)(u);
  }
  return 0.0;
}

double Nonlinearity::F(double t) const {
  switch (impl_->kind) {
    case Kind::power:
      return t > 0.0 ? impl_->c * std::pow(t, impl_->p + 1.0) / (impl_->p + 1.0) : 0.0;
    case Kind::exponential: return std::exp(t);
    case Kind::direct_F: return (*impl_->expr)(t);
    case Kind::expression:
      if (t < impl_->a) {
        throw DomainError("F evaluated below the threshold a = " + format_double(impl_->a));
      }
      return (*impl_->F_table)(t);
  }
  return 0.0;
}

double Nonlinearity::v0(double u) const { return std::sqrt(2.0 * F(u)); }

namespace {

double parse_real(std::string_view text, std::size_t offset, const char* what) {
  const std::string s(text);
  if (s.empty()) throw ParseError(std::string("expected ") + what, offset);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ParseError(std::string("expected ") + what, offset);
  if (*end != '\0') {
    throw ParseError(std::string("trailing characters after ") + what,
                     offset + static_cast<std::size_t>(end - s.c_str()));
  }
  if (!std::isfinite(v)) throw ParseError(std::string("non-finite ") + what, offset);
  return v;
}

Expression parse_body(std::string_view body, std::size_t offset, char variable) {
  try {
    return Expression::parse(body, variable);
  } catch (const ParseError& e) {
    // Re-anchor the position to the full spec string.
    std::string msg = e.what();
    const auto cut = msg.rfind(" (at position");
    if (cut != std::string::npos) msg.resize(cut);
    throw ParseError(msg, offset + e.position());
  }
}

}  // namespace

Nonlinearity parse_nonlinearity(std::string_view spec) {
  const std::string full(spec);
  if (spec == "exp") return Nonlinearity::exponential();
  if (spec.starts_with("pow:")) {
    const double p = parse_real(spec.substr(4), 4, "exponent p");
    if (!(p > 1.0)) {
      throw DomainError("pow:<p> needs p > 1 (Keller-Osserman fails otherwise), got " +
                        format_double(p));
    }
    auto nl = Nonlinearity::power(p);
    return nl;
  }
  const bool is_F = spec.starts_with("F:");
  const bool is_expr = spec.starts_with("expr:");
  if (!is_F && !is_expr) {
    throw ParseError("expected one of pow:<p>, exp, F:<expression>, expr:<expression>", 0);
  }
  const std::size_t head = is_F ? 2 : 5;
  std::string_view rest = spec.substr(head);
  std::optional<double> a;
  const auto semi = rest.find(';');
  if (semi != std::string_view::npos) {
    std::string_view opt = rest.substr(semi + 1);
    const std::size_t opt_at = head + semi + 1;
    if (!opt.starts_with("a=")) throw ParseError("expected 'a=<real>' after ';'", opt_at);
    a = parse_real(opt.substr(2), opt_at + 2, "threshold a");
    rest = rest.substr(0, semi);
  }
  if (is_F) return Nonlinearity::from_F(parse_body(rest, head, 't'), a, full);
  return Nonlinearity::from_f(parse_body(rest, head, 'u'), a, full);
}

double eval_F(const Nonlinearity& nl, double t) { return nl.F(t); }

KellerOssermanResult check_keller_osserman(const Nonlinearity& nl, double lo, double tol) {
  if (lo < nl.threshold() && nl.kind() != Nonlinearity::Kind::exponential) {
    throw DomainError("Keller-Osserman lower limit must not lie below a");
  }
  if (!(nl.F(lo) > 0.0)) throw DomainError("Keller-Osserman test needs F(lo) > 0");
  auto integrand = [&nl](double t) {
    const double F = nl.F(t);
    if (!(F > 0.0)) {
      std::ostringstream os;
      os << "F(" << t << ") = " << F << " <= 0 on the Keller-Osserman range";
      throw DomainError(os.str());
    }
    return 1.0 / std::sqrt(F);
  };
  QuadratureResult r = integrate_to_infinity(integrand, lo, tol);
  return {r.status, r.value, r.error_estimate, r.cutoff_used};
}

void require_keller_osserman(const Nonlinearity& nl, double lo) {
  KellerOssermanResult ko;
  try {
    ko = check_keller_osserman(nl, lo);
  } catch (const NumericsError& e) {
    throw KellerOssermanError(std::string("Keller-Osserman test failed: ") + e.what());
  }
  if (ko.status != TailStatus::converged) {
    throw KellerOssermanError(
        std::string("Keller-Osserman integral ") +
        (ko.status == TailStatus::diverges ? "diverges" : "is inconclusive") + " for " +
        nl.spec() + "; no large solutions, expansion refused");
  }
}

}  // namespace blowup
