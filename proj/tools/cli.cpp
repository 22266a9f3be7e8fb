#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "blowup/criterion.hpp"
#include "blowup/errors.hpp"
#include "blowup/expansion.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/powerlaw.hpp"
#include "blowup/report.hpp"
#include "blowup/shoot.hpp"
#include "blowup/threeterm.hpp"

namespace blowup::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string nl;
  int N = 3;
  std::optional<double> u0, umax, tol, alpha, lo, base, p;
  std::optional<int> grid, kmax, order;
  std::string d_grid = "1e-2,1e-3,1e-4";
  std::string r2 = "running";
  std::string format = "csv";
  std::string out;
};

/// Wraps errors raised while interpreting user input so they map to exit 4.
struct InputError : Error {
  using Error::Error;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size() || !std::isfinite(v)) {
      throw InputError("--d-grid: cannot read '" + item + "' as a real");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

Nonlinearity load_nl(const Options& o) {
  if (o.nl.empty()) throw InputError("--nl is required");
  try {
    return parse_nonlinearity(o.nl);
  } catch (const Error& e) {
    throw InputError(std::string("--nl ") + o.nl + ": " + e.what());
  }
}

void require_ko(const Nonlinearity& nl) {
  require_keller_osserman(nl, nl.threshold() + 1.0);
}

std::vector<ordered_json> reals(std::initializer_list<double> xs) {
  std::vector<ordered_json> out;
  for (double x : xs) out.push_back(real_cell(x));
  return out;
}

RunReport start(const std::string& command, const Options& o, bool with_nl = true) {
  RunReport r;
  r.command = command;
  if (with_nl) r.nl = o.nl;
  return r;
}

// ---- subcommands ---------------------------------------------------------

RunReport cmd_ko(const Options& o) {
  auto nl = load_nl(o);
  const double lo = o.lo.value_or(nl.threshold() + 1.0);
  const double tol = o.tol.value_or(1e-10);
  auto ko = check_keller_osserman(nl, lo, tol);
  RunReport r = start("ko", o);
  r.params["lo"] = lo;
  r.params["tol"] = tol;
  r.columns = {"status", "value", "error_estimate", "cutoff"};
  const char* status = ko.status == TailStatus::converged  ? "converges"
                       : ko.status == TailStatus::diverges ? "diverges"
                                                           : "inconclusive";
  std::vector<ordered_json> row{status};
  for (auto& c : reals({ko.value, ko.error_estimate, ko.cutoff})) row.push_back(c);
  r.rows.push_back(row);
  r.summary["status"] = status;
  return r;
}

ExpansionOptions expansion_options(const Options& o) {
  ExpansionOptions eo;
  if (o.grid) eo.grid = *o.grid;
  eo.umax = o.umax;
  return eo;
}

IterationResult run_expansion(const Nonlinearity& nl, const Options& o, int kmax, double tol) {
  require_ko(nl);
  const double U0 = o.u0 ? *o.u0 : choose_U0(nl, o.N);
  spdlog::info("iterating with U0 = {}, kmax = {}", U0, kmax);
  auto res = iterate_to_convergence(nl, o.N, U0, tol, kmax, expansion_options(o));
  for (std::size_t k = 0; k < res.deltas.size(); ++k) {
    spdlog::debug("delta_{} = {:.3e}", k + 1, res.deltas[k]);
  }
  return res;
}

void expansion_params(RunReport& r, const Options& o, const IterationResult& res) {
  const auto& v0 = res.profiles.front();
  r.params["N"] = o.N;
  r.params["U0"] = res.U0;
  r.params["Umax"] = v0.Umax;
  r.params["grid"] = static_cast<int>(v0.size());
}

RunReport cmd_expand(const Options& o) {
  auto nl = load_nl(o);
  const int kmax = o.kmax.value_or(5);
  const double tol = o.tol.value_or(1e-12);
  auto res = run_expansion(nl, o, kmax, tol);
  RunReport r = start("expand", o);
  expansion_params(r, o, res);
  r.params["kmax"] = kmax;
  r.params["tol"] = tol;
  r.columns = {"k", "delta", "max_dev", "tail_U0"};
  for (std::size_t k = 0; k < res.profiles.size(); ++k) {
    const auto& vp = res.profiles[k];
    const double dev = (vp.w - 1.0).abs().maxCoeff();
    const double delta = k == 0 ? std::numeric_limits<double>::quiet_NaN() : res.deltas[k - 1];
    std::vector<ordered_json> row{static_cast<int>(k)};
    for (auto& c : reals({delta, dev, vp.tail(0)})) row.push_back(c);
    r.rows.push_back(row);
  }
  r.summary["converged"] = res.converged;
  r.summary["geometric"] = res.geometric;
  r.summary["retried"] = res.retried;
  r.summary["iterations"] = static_cast<int>(res.deltas.size());
  return r;
}

RunReport cmd_profile(const Options& o) {
  auto nl = load_nl(o);
  const int order = o.order.value_or(0);
  if (order < 0) throw InputError("--order must be nonnegative");
  const auto d_grid = parse_list(o.d_grid);
  auto res = run_expansion(nl, o, std::max(order, 1), 0.0);
  RunReport r = start("profile", o);
  expansion_params(r, o, res);
  r.params["order"] = order;
  r.params["d_grid"] = o.d_grid;
  r.columns = {"d", "k", "u"};
  for (int k = 0; k <= order; ++k) {
    BlowupProfile bp(res.profiles[static_cast<std::size_t>(k)]);
    for (double d : d_grid) {
      r.rows.push_back({real_cell(d), k, real_cell(bp(d))});
    }
  }
  return r;
}

RunReport cmd_criterion(const Options& o) {
  auto nl = load_nl(o);
  require_ko(nl);
  const double u_lo = o.lo.value_or(10.0);
  const double u_hi = o.umax.value_or(1e4);
  const int M = o.grid.value_or(64);
  auto rep = classify(nl, u_lo, u_hi, M, {}, o.base);
  RunReport r = start("criterion", o);
  r.params["u_lo"] = u_lo;
  r.params["u_hi"] = u_hi;
  r.params["grid"] = M;
  r.params["base"] = rep.base_point;
  r.columns = {"u", "lambda"};
  for (std::size_t i = 0; i < rep.lambda.size(); ++i) {
    r.rows.push_back(reals({rep.u[i], rep.lambda[i]}));
  }
  r.summary["classification"] = to_string(rep.classification);
  r.summary["slope"] = real_cell(rep.slope);
  r.summary["intercept"] = real_cell(rep.intercept);
  r.summary["slope_tol"] = rep.thresholds.slope_tol;
  r.summary["plateau_floor"] = rep.thresholds.plateau_floor;
  r.summary["decay_factor"] = rep.thresholds.decay_factor;
  if (rep.failed_at) {
    r.summary["failed_at"] = *rep.failed_at;
    r.summary["failure"] = rep.failure;
  }
  return r;
}

RunReport cmd_three_term(const Options& o, bool d_grid_given) {
  auto nl = load_nl(o);
  require_ko(nl);
  R2Reading reading;
  if (o.r2 == "running") {
    reading = R2Reading::running;
  } else if (o.r2 == "outer") {
    reading = R2Reading::outer;
  } else {
    throw InputError("--r2 must be 'running' or 'outer'");
  }
  ThreeTerm tt(nl, o.N, o.base, reading);
  RunReport r = start("three-term", o);
  r.params["N"] = o.N;
  r.params["base"] = tt.base();
  r.params["r2"] = o.r2;
  if (d_grid_given) {
    const auto d_grid = parse_list(o.d_grid);
    const int terms = o.order.value_or(3);
    if (terms < 1 || terms > 3) throw InputError("--order must be 1, 2 or 3 for three-term");
    r.params["d_grid"] = o.d_grid;
    r.columns = {"d", "terms", "u"};
    for (double d : d_grid) {
      for (int t = 1; t <= terms; ++t) {
        r.rows.push_back({real_cell(d), t, real_cell(invert_three_term(tt, nl, d, t))});
      }
    }
    return r;
  }
  const double U_lo = o.u0.value_or(10.0);
  const double U_hi = o.umax.value_or(U_lo);
  const int M = U_hi > U_lo ? o.grid.value_or(16) : 1;
  if (M < 1) throw InputError("--grid must be positive");
  r.params["U_lo"] = U_lo;
  r.params["U_hi"] = U_hi;
  r.params["grid"] = M;
  r.columns = {"U", "R0", "R1", "R2"};
  for (int j = 0; j < M; ++j) {
    const double U = M == 1 ? U_lo : U_lo * std::pow(U_hi / U_lo, double(j) / (M - 1));
    auto t = tt.at(U);
    r.rows.push_back(reals({U, t.R0, t.R1, t.R2}));
  }
  return r;
}

RunReport cmd_power_coeffs(const Options& o) {
  if (!o.p) throw InputError("--p is required");
  const int order = o.order.value_or(1);
  const SeriesExpansion se = power_coefficients(*o.p, o.N, order);
  RunReport r = start("power-coeffs", o, false);
  r.params["p"] = *o.p;
  r.params["N"] = o.N;
  r.params["order"] = order;
  r.columns = {"k", "a", "b"};
  for (int k = 0; k <= order; ++k) {
    r.rows.push_back({k, real_cell(se.a[static_cast<std::size_t>(k)]),
                      real_cell(se.b[static_cast<std::size_t>(k)])});
  }
  r.summary["q"] = se.q;
  r.summary["upper_index"] = se.upper_index;
  r.summary["singular_count"] = se.singular_count;
  r.summary["beyond_singular"] = se.beyond_singular;
  return r;
}

ShootOptions shoot_options(const Options& o) {
  ShootOptions so;
  if (o.umax) so.u_cap = *o.umax;
  return so;
}

double centre_value(const Nonlinearity& nl, const Options& o, const ShootOptions& so) {
  if (o.alpha) return *o.alpha;
  const double tol = o.tol.value_or(1e-12);
  spdlog::info("calibrating alpha for R = 1 (tol {})", tol);
  const double alpha = calibrate_alpha(nl, o.N, 1.0, tol, so);
  spdlog::info("alpha* = {:.12g}", alpha);
  return alpha;
}

RunReport cmd_shoot(const Options& o) {
  auto nl = load_nl(o);
  const ShootOptions so = shoot_options(o);
  const double alpha = centre_value(nl, o, so);
  auto res = shoot(nl, o.N, alpha, so);
  RunReport r = start("shoot", o);
  r.params["N"] = o.N;
  r.params["alpha"] = alpha;
  r.params["u_cap"] = so.u_cap;
  r.params["tol"] = so.tol;
  r.params["calibrated"] = !o.alpha.has_value();
  r.columns = {"r", "u", "v", "g", "ratio", "g_over_F"};
  auto diag = diagnostics(res, nl, o.base);
  for (std::size_t i = 0; i < res.size(); ++i) {
    r.rows.push_back(reals({res.r[i], res.u[i], res.v[i], diag[i].g, diag[i].ratio,
                            diag[i].g_over_F}));
  }
  r.summary["status"] = to_string(res.status);
  r.summary["R_est"] = real_cell(res.R_est);
  r.summary["samples"] = static_cast<int>(res.size());
  return r;
}

RunReport cmd_compare(const Options& o) {
  auto nl = load_nl(o);
  const int kmax = o.kmax.value_or(1);
  if (kmax < 0) throw InputError("--kmax must be nonnegative");
  const auto d_grid = parse_list(o.d_grid);
  auto res = run_expansion(nl, o, std::max(kmax, 1), 0.0);
  std::vector<BlowupProfile> profiles;
  for (int k = 0; k <= kmax; ++k) profiles.emplace_back(res.profiles[static_cast<std::size_t>(k)]);
  const ShootOptions so = shoot_options(o);
  const double alpha = centre_value(nl, o, so);
  auto shot = shoot(nl, o.N, alpha, so);
  auto rows = compare_to_expansion(shot, profiles, d_grid, o.base);

  RunReport r = start("compare", o);
  expansion_params(r, o, res);
  r.params["kmax"] = kmax;
  r.params["d_grid"] = o.d_grid;
  r.params["alpha"] = alpha;
  r.params["R_est"] = real_cell(shot.R_est);
  r.columns = {"d", "k", "u_shoot", "u_k", "gap", "normalized", "predicted_gap", "flagged"};
  for (const auto& row : rows) {
    for (int k = 0; k <= kmax; ++k) {
      const auto i = static_cast<std::size_t>(k);
      std::vector<ordered_json> cells{real_cell(row.d), k};
      for (auto& c : reals({row.u_shoot, row.u_k[i], row.gap[i], row.normalized[i],
                            row.predicted_gap})) {
        cells.push_back(c);
      }
      cells.push_back(row.flagged);
      r.rows.push_back(cells);
    }
  }
  r.summary["shoot_status"] = to_string(shot.status);
  return r;
}

// ---- plumbing ------------------------------------------------------------

void configure_logging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("blowup", sink);
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("BLOWUP_LOG");
  const std::string level = env ? env : "off";
  if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else {
    if (level != "off") err << "warning: BLOWUP_LOG=" << level << " not in {off, info, debug}\n";
    logger->set_level(spdlog::level::off);
  }
  spdlog::set_default_logger(logger);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging(err);
  Options o;
  CLI::App app{"Boundary blow-up solutions of Delta u = f(u) on the unit ball", "blowup"};
  app.require_subcommand(1);

  auto add_nl = [&](CLI::App* s) {
    s->add_option("--nl", o.nl, "pow:<p> | exp | F:<expr in t> | expr:<expr in u>[;a=<real>]")
        ->required();
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--out", o.out, "write the report here instead of stdout");
  };
  auto add_N = [&](CLI::App* s) {
    s->add_option("--N", o.N, "space dimension")->check(CLI::PositiveNumber);
  };
  auto add_expansion = [&](CLI::App* s) {
    s->add_option("--u0", o.u0, "lower end U0 of the velocity grid (default: automatic)");
    s->add_option("--umax", o.umax, "upper end of the velocity grid");
    s->add_option("--grid", o.grid, "number of velocity grid nodes");
  };

  auto* ko = app.add_subcommand("ko", "Keller-Osserman integral int_lo^inf dt/sqrt(F)");
  add_nl(ko);
  ko->add_option("--lo", o.lo, "lower limit (default a + 1)");
  ko->add_option("--tol", o.tol, "relative tolerance");

  auto* expand = app.add_subcommand("expand", "fixed-point iterates of the velocity");
  add_nl(expand);
  add_N(expand);
  add_expansion(expand);
  expand->add_option("--kmax", o.kmax, "maximum number of iterations");
  expand->add_option("--tol", o.tol, "stop once sup |w_k/w_{k-1} - 1| < tol");

  auto* profile = app.add_subcommand("profile", "blow-up profiles u_k(d)");
  add_nl(profile);
  add_N(profile);
  add_expansion(profile);
  profile->add_option("--order", o.order, "highest k");
  profile->add_option("--d-grid", o.d_grid, "comma-separated distances to the boundary");

  auto* criterion = app.add_subcommand("criterion", "Lambda(u) and the universality class");
  add_nl(criterion);
  criterion->add_option("--lo", o.lo, "lowest sampled u");
  criterion->add_option("--umax", o.umax, "highest sampled u");
  criterion->add_option("--grid", o.grid, "number of samples");
  criterion->add_option("--base", o.base, "base point of the inner integral");

  auto* three = app.add_subcommand("three-term", "remainders R0, R1, R2 or their inversion");
  add_nl(three);
  add_N(three);
  three->add_option("--u0", o.u0, "U, or the low end of a geometric U sweep");
  three->add_option("--umax", o.umax, "high end of the U sweep");
  three->add_option("--grid", o.grid, "points in the U sweep");
  three->add_option("--base", o.base, "base point b");
  three->add_option("--order", o.order, "terms used in the inversion (1-3)");
  auto* three_d = three->add_option("--d-grid", o.d_grid, "invert R0 + R1 + R2 = d here");
  three->add_option("--r2", o.r2, "running or outer reading of R2's tail");

  auto* power = app.add_subcommand("power-coeffs", "series coefficients for F = u^(p+1)/2");
  power->add_option("--p", o.p, "exponent p > 1")->required();
  add_N(power);
  power->add_option("--order", o.order, "highest order n");

  auto* sh = app.add_subcommand("shoot", "radial shooting from the centre");
  add_nl(sh);
  add_N(sh);
  sh->add_option("--alpha", o.alpha, "centre value (default: calibrated to R = 1)");
  sh->add_option("--umax", o.umax, "cap on u");
  sh->add_option("--tol", o.tol, "calibration tolerance on R");
  sh->add_option("--base", o.base, "base point of G in the diagnostics");

  auto* cmp = app.add_subcommand("compare", "shot solution against the expansion profiles");
  add_nl(cmp);
  add_N(cmp);
  add_expansion(cmp);
  cmp->add_option("--kmax", o.kmax, "highest profile order");
  cmp->add_option("--d-grid", o.d_grid, "comma-separated distances to the boundary");
  cmp->add_option("--alpha", o.alpha, "centre value (default: calibrated)");
  cmp->add_option("--tol", o.tol, "calibration tolerance on R");
  cmp->add_option("--base", o.base, "base point of the predicted gap");

  for (auto* s : {ko, expand, profile, criterion, three, power, sh, cmp}) add_common(s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }

  const std::map<CLI::App*, std::function<RunReport()>> dispatch{
      {ko, [&] { return cmd_ko(o); }},
      {expand, [&] { return cmd_expand(o); }},
      {profile, [&] { return cmd_profile(o); }},
      {criterion, [&] { return cmd_criterion(o); }},
      {three, [&] { return cmd_three_term(o, three_d->count() > 0); }},
      {power, [&] { return cmd_power_coeffs(o); }},
      {sh, [&] { return cmd_shoot(o); }},
      {cmp, [&] { return cmd_compare(o); }},
  };
  CLI::App* chosen = app.get_subcommands().front();
  RunReport report;
  try {
    report = dispatch.at(chosen)();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const KellerOssermanError& e) {
    err << "error: " << e.what() << '\n';
    return kKellerOsserman;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kNumerics;
  }

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) {
      err << "error: cannot open " << o.out << " for writing\n";
      return kParse;
    }
  }
  std::ostream& sink = o.out.empty() ? out : file;
  if (o.format == "json") {
    write_json(sink, report);
  } else {
    write_csv(sink, report);
  }
  return kOk;
}

}  // namespace blowup::cli
