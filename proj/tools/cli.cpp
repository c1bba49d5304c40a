#include "cli.hpp"

#include "CLI11.hpp"
#include "unfold/bc_diagnostics.hpp"
#include "unfold/experiments.hpp"
#include "unfold/measures.hpp"
#include "unfold/parameter_space.hpp"
#include "unfold/report.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace unfold::cli {

namespace {

struct Output {
  std::string json;
  std::string csv;  ///< empty when the command has no tabular form
};

struct Globals {
  std::uint64_t seed = 1;
  std::string precision = "double";
  int jobs = 1;
  std::string out;
  std::string format = "json";
};

std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int n = lo; n <= hi; ++n) out.push_back(n);
      return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      out.push_back(std::stoi(text.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::Domain, "cannot read integer list '" + text + "' (use lo..hi or a,b,c)");
  }
  return out;
}

template <class Real>
void write_orbit(JsonWriter& j, const PeriodicOrbit<Real>& o) {
  j.begin_object();
  j.key("a").value(to_double(o.a)).key("a_text").value(to_text(o.a));
  j.key("period").value(o.period);
  j.key("points").begin_array();
  for (const auto& x : o.points) j.value(to_double(x));
  j.end_array();
  j.key("multiplier").value(to_double(o.multiplier)).key("stability").value(to_string(o.stability));
  j.end_object();
}

template <class Real>
Output solver_output(const SolverResult<Real>& r) {
  JsonWriter j;
  j.begin_object();
  j.key("kind").value(r.kind).key("a").value(to_double(r.a)).key("a_text").value(to_text(r.a));
  j.key("period").value(r.period).key("residual").value(to_double(r.residual));
  j.key("multiplier").value(to_double(r.multiplier));
  j.end_object();
  return {j.str(), "kind,a,period,residual,multiplier\n" + r.kind + ',' + to_text(r.a) + ',' +
                       std::to_string(r.period) + ',' + format_number(to_double(r.residual)) + ',' +
                       format_number(to_double(r.multiplier)) + '\n'};
}

template <class Real>
ContinuationPath<Real> path_over(const PeriodicOrbit<Real>& orbit, const Real& lo, const Real& hi, int steps) {
  ContinuationPath<Real> path{{orbit}};
  if (lo < orbit.a) path = continue_orbit(orbit, lo, steps);
  if (hi > orbit.a) path = join_paths(path, continue_orbit(orbit, hi, steps));
  return path;
}

struct Command {
  CLI::App* app;
  std::function<Output(const Globals&)> run;
};

// Calls body.template operator()<Real>() for the selected precision.
template <class Body>
Output with_precision(const Globals& g, Body&& body) {
  if (parse_precision(g.precision) == Precision::Extended) return body.template operator()<Extended>();
  return body.template operator()<double>();
}

void add_bc_options(CLI::App* sub, BCConfig& cfg, std::optional<double>& alpha) {
  sub->add_option("--delta", cfg.delta, "half-width of the critical neighbourhood")->capture_default_str();
  sub->add_option("--lambda", cfg.lambda, "exponential growth target")->capture_default_str();
  sub->add_option("--alpha", alpha, "recurrence exponent (default lambda/300)");
}

std::vector<std::string> without_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

std::string joined(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) s += a + '\n';
  return s;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerics for the quadratic family f_a(x) = 1 - a x^2", "unfold"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", UNFOLD_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "seed for every random draw")->capture_default_str();
  app.add_option("--precision", g.precision, "double or extended")
      ->check(CLI::IsMember({"double", "extended"}))
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads for table drivers")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--out", g.out, "write the result here (plus a manifest) instead of stdout");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::vector<Command> commands;

  // orbit
  {
    auto* sub = app.add_subcommand("orbit", "orbit of x0 with cumulative log-derivatives");
    auto a = std::make_shared<double>(2.0);
    auto x0 = std::make_shared<double>(0.0);
    auto n = std::make_shared<int>(10);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--x0", *x0)->capture_default_str();
    sub->add_option("--n", *n)->capture_default_str();
    commands.push_back({sub, [=](const Globals&) {
                          const auto t = iterate_orbit(MapParam(*a), *x0, *n);
                          JsonWriter j;
                          j.begin_object().key("a").value(*a);
                          j.key("points").begin_array();
                          for (double x : t.points) j.value(x);
                          j.end_array().key("log_deriv_partial").begin_array();
                          for (double v : t.log_deriv_partial) j.value(v);
                          j.end_array().key("first_zero");
                          if (t.first_zero) {
                            j.value(static_cast<long>(*t.first_zero));
                          } else {
                            j.null();
                          }
                          j.end_object();
                          std::string csv = "k,x,log_deriv_partial\n";
                          for (std::size_t k = 0; k < t.points.size(); ++k) {
                            csv += std::to_string(k) + ',' + format_number(t.points[k]) + ',' +
                                   format_number(t.log_deriv_partial[k]) + '\n';
                          }
                          return Output{j.str(), csv};
                        }});
  }

  // lyapunov
  {
    auto* sub = app.add_subcommand("lyapunov", "Lyapunov exponent along an orbit");
    auto a = std::make_shared<double>(2.0);
    auto x0 = std::make_shared<std::optional<double>>();
    auto n = std::make_shared<long>(1000000);
    auto burn = std::make_shared<long>(1000);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--x0", *x0, "start point (default: seeded random)");
    sub->add_option("--n", *n)->capture_default_str();
    sub->add_option("--burn", *burn)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          const double start = x0->value_or(seeded_phase_point(split_seed(gl.seed, 0)));
                          const double lyap = lyapunov_exponent(MapParam(*a), start, *n, *burn);
                          JsonWriter j;
                          j.begin_object().key("a").value(*a).key("x0").value(start).key("n").value(*n);
                          j.key("burn").value(*burn).key("exponent").value(lyap).end_object();
                          return Output{j.str(), "a,x0,n,burn,exponent\n" + format_number(*a) + ',' +
                                                     format_number(start) + ',' + std::to_string(*n) + ',' +
                                                     std::to_string(*burn) + ',' + format_number(lyap) + '\n'};
                        }});
  }

  // superstable
  {
    auto* sub = app.add_subcommand("superstable", "super-stable parameter of a given period in a window");
    auto window = std::make_shared<std::string>();
    auto period = std::make_shared<int>(2);
    auto samples = std::make_shared<int>(4096);
    sub->add_option("--window", *window, "lo:hi")->required();
    sub->add_option("--period", *period)->required();
    sub->add_option("--samples", *samples, "sign-scan points")->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            return solver_output(find_superstable(parse_window<Real>(*window), *period,
                                                                  std::optional<Real>{}, *samples));
                          });
                        }});
  }

  // misiurewicz
  {
    auto* sub = app.add_subcommand("misiurewicz", "parameter where xi_N meets a continued repeller");
    auto window = std::make_shared<std::string>();
    auto N = std::make_shared<int>(3);
    auto from = std::make_shared<std::string>("2");
    auto seed_x = std::make_shared<std::string>("0.4");
    auto period = std::make_shared<int>(1);
    auto steps = std::make_shared<int>(50);
    sub->add_option("--window", *window, "lo:hi")->required();
    sub->add_option("--N", *N)->required();
    sub->add_option("--from", *from, "parameter where the repeller is first solved")->capture_default_str();
    sub->add_option("--repeller-seed", *seed_x, "Newton seed for the repeller at --from")->capture_default_str();
    sub->add_option("--repeller-period", *period)->capture_default_str();
    sub->add_option("--steps", *steps, "continuation steps")->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            const auto w = parse_window<Real>(*window);
                            const auto orbit =
                                find_periodic_orbit(parse_real<Real>(*from), *period, parse_real<Real>(*seed_x));
                            const auto path = path_over(orbit, w.lo, w.hi, *steps);
                            return solver_output(find_misiurewicz(w, *N, path));
                          });
                        }});
  }

  // continue
  {
    auto* sub = app.add_subcommand("continue", "continue a repelling cycle to another parameter");
    auto a = std::make_shared<std::string>("2");
    auto period = std::make_shared<int>(1);
    auto seed_x = std::make_shared<std::string>("-0.9");
    auto target = std::make_shared<std::string>();
    auto steps = std::make_shared<int>(50);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--period", *period)->capture_default_str();
    sub->add_option("--x", *seed_x, "Newton seed for the cycle at --a")->capture_default_str();
    sub->add_option("--target", *target)->required();
    sub->add_option("--steps", *steps)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            const auto orbit = find_periodic_orbit(parse_real<Real>(*a), *period, parse_real<Real>(*seed_x));
                            const auto path = continue_orbit(orbit, parse_real<Real>(*target), *steps);
                            JsonWriter j;
                            j.begin_object().key("nodes").begin_array();
                            std::string csv = "a,x1,multiplier\n";
                            for (const auto& node : path.nodes) {
                              write_orbit(j, node);
                              csv += to_text(node.a) + ',' + to_text(node.points.front()) + ',' +
                                     format_number(to_double(node.multiplier)) + '\n';
                            }
                            j.end_array().end_object();
                            return Output{j.str(), csv};
                          });
                        }});
  }

  // attractor
  {
    auto* sub = app.add_subcommand("attractor", "attracting cycle reached by the critical orbit");
    auto a = std::make_shared<double>(1.0);
    auto n_max = std::make_shared<long>(100000);
    auto p_max = std::make_shared<int>(64);
    auto tol = std::make_shared<double>(1e-9);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--n-max", *n_max)->capture_default_str();
    sub->add_option("--p-max", *p_max)->capture_default_str();
    sub->add_option("--tol", *tol)->capture_default_str();
    commands.push_back({sub, [=](const Globals&) {
                          const auto orbit = find_attractor(MapParam(*a), *n_max, *p_max, *tol);
                          JsonWriter j;
                          j.begin_object().key("a").value(*a).key("found").value(orbit.has_value());
                          j.key("orbit");
                          std::string csv = "a,found,period,multiplier,stability\n" + format_number(*a) + ',';
                          if (orbit) {
                            write_orbit(j, *orbit);
                            csv += "true," + std::to_string(orbit->period) + ',' + format_number(orbit->multiplier) +
                                   ',' + std::string(to_string(orbit->stability)) + '\n';
                          } else {
                            j.null();
                            csv += "false,,,\n";
                          }
                          j.end_object();
                          return Output{j.str(), csv};
                        }});
  }

  // measure
  {
    auto* sub = app.add_subcommand("measure", "Birkhoff empirical measure (json atoms, csv histogram)");
    auto a = std::make_shared<double>(2.0);
    auto x0 = std::make_shared<std::optional<double>>();
    auto n = std::make_shared<long>(10000);
    auto burn = std::make_shared<long>(1000);
    auto bins = std::make_shared<int>(512);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--x0", *x0, "start point (default: seeded random)");
    sub->add_option("--n", *n)->capture_default_str();
    sub->add_option("--burn", *burn)->capture_default_str();
    sub->add_option("--bins", *bins)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          const double start = x0->value_or(seeded_phase_point(split_seed(gl.seed, 0)));
                          const auto mu = birkhoff_measure(MapParam(*a), start, *n, *burn);
                          return Output{measure_json(mu), histogram_csv(histogram(mu, *bins))};
                        }});
  }

  // wasserstein
  {
    auto* sub = app.add_subcommand("wasserstein", "W1 between Birkhoff measures, or against the arcsine law");
    auto a = std::make_shared<double>(2.0);
    auto b = std::make_shared<std::optional<double>>();
    auto n = std::make_shared<long>(1000000);
    auto burn = std::make_shared<long>(1000);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--b", *b, "second parameter (default: compare with the arcsine law)");
    sub->add_option("--n", *n)->capture_default_str();
    sub->add_option("--burn", *burn)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          const auto mu = birkhoff_measure(MapParam(*a), seeded_phase_point(split_seed(gl.seed, 0)),
                                                           *n, *burn);
                          double w1 = 0;
                          std::string against = "arcsine";
                          if (*b) {
                            const auto nu = birkhoff_measure(MapParam(**b), seeded_phase_point(split_seed(gl.seed, 1)),
                                                             *n, *burn);
                            w1 = wasserstein1(mu, nu);
                            against = format_number(**b);
                          } else {
                            w1 = wasserstein1(mu, arcsine_reference());
                          }
                          JsonWriter j;
                          j.begin_object().key("a").value(*a).key("against").value(against).key("n").value(*n);
                          j.key("w1").value(w1).end_object();
                          return Output{j.str(), "a,against,w1\n" + format_number(*a) + ',' + against + ',' +
                                                     format_number(w1) + '\n'};
                        }});
  }

  // bc-check
  {
    auto* sub = app.add_subcommand("bc-check", "exponential growth and slow recurrence of the critical orbit");
    auto a = std::make_shared<double>(2.0);
    auto depth = std::make_shared<int>(100);
    auto cfg = std::make_shared<BCConfig>();
    auto alpha = std::make_shared<std::optional<double>>();
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--depth", *depth)->capture_default_str();
    add_bc_options(sub, *cfg, *alpha);
    commands.push_back({sub, [=](const Globals&) {
                          BCConfig c = *cfg;
                          c.alpha = *alpha;
                          c.validate();
                          const auto rep = check_ce(MapParam(*a), *depth, c);
                          JsonWriter j;
                          write_ce(j, rep);
                          return Output{j.str(), ""};
                        }});
  }

  // bound-period
  {
    auto* sub = app.add_subcommand("bound-period", "bound period after a return at depth mu");
    auto a = std::make_shared<double>(2.0);
    auto window = std::make_shared<std::string>();
    auto mu = std::make_shared<int>(7);
    auto cfg = std::make_shared<BCConfig>();
    auto alpha = std::make_shared<std::optional<double>>();
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--window", *window, "lo:hi; hull over the window instead of a single a");
    sub->add_option("--mu", *mu)->capture_default_str();
    add_bc_options(sub, *cfg, *alpha);
    commands.push_back({sub, [=](const Globals&) {
                          BCConfig c = *cfg;
                          c.alpha = *alpha;
                          c.validate();
                          const int p = window->empty() ? bound_period(MapParam(*a), *mu, c)
                                                        : bound_period(parse_window<double>(*window), *mu, c);
                          const double a_eval = window->empty() ? *a : parse_window<double>(*window).lo;
                          const auto growth = check_bound_distortion(MapParam(a_eval), *mu, p, c);
                          JsonWriter j;
                          j.begin_object().key("mu").value(*mu).key("p").value(p);
                          j.key("upper_bound").value(3.0 * std::abs(*mu) / c.lambda);
                          j.key("p_over_mu").value(static_cast<double>(p) / std::abs(*mu));
                          j.key("distortion_min").value(growth.ratio_min).key("distortion_max").value(growth.ratio_max);
                          j.key("expansion").value(growth.expansion).end_object();
                          return Output{j.str(), "mu,p\n" + std::to_string(*mu) + ',' + std::to_string(p) + '\n'};
                        }});
  }

  // itinerary
  {
    auto* sub = app.add_subcommand("itinerary", "returns of a parameter window to the critical neighbourhood");
    auto window = std::make_shared<std::string>();
    auto n_max = std::make_shared<int>(30);
    auto samples = std::make_shared<int>(257);
    auto cfg = std::make_shared<BCConfig>();
    auto alpha = std::make_shared<std::optional<double>>();
    sub->add_option("--window", *window, "lo:hi")->required();
    sub->add_option("--n-max", *n_max)->capture_default_str();
    sub->add_option("--samples", *samples, "initial parameter samples per image")->capture_default_str();
    add_bc_options(sub, *cfg, *alpha);
    commands.push_back({sub, [=](const Globals&) {
                          BCConfig c = *cfg;
                          c.alpha = *alpha;
                          const auto it = itinerary(parse_window<double>(*window), *n_max, c, *samples);
                          const auto growth = check_return_growth(it, c);
                          JsonWriter j;
                          j.begin_object().key("itinerary");
                          write_itinerary(j, it);
                          j.key("return_ratios").begin_array();
                          for (const auto& r : growth.ratios) {
                            j.begin_object().key("from").value(r.from).key("to").value(r.to).key("ratio").value(r.ratio).end_object();
                          }
                          j.end_array().key("free_segments").begin_array();
                          for (const auto& s : growth.segments) {
                            j.begin_object().key("start").value(s.start).key("end").value(s.end);
                            j.key("lambda0").value(s.lambda0).key("growth").value(s.growth).end_object();
                          }
                          j.end_array().end_object();
                          std::string csv = "time,kind,mu,nu,hull_lo,hull_hi\n";
                          for (const auto& ev : it.events) {
                            csv += std::to_string(ev.time) + ',' + std::string(to_string(ev.kind)) + ',' +
                                   (ev.index ? std::to_string(ev.index->mu) + ',' + std::to_string(ev.index->nu) : ",") +
                                   ',' + format_number(ev.hull.hull_lo) + ',' + format_number(ev.hull.hull_hi) + '\n';
                          }
                          return Output{j.str(), csv};
                        }});
  }

  // deviation-sum
  {
    auto* sub = app.add_subcommand("deviation-sum", "sum of |xi_j(a) - xi_j(b)| over j < n");
    auto a = std::make_shared<std::string>("2");
    auto b = std::make_shared<std::string>();
    auto n = std::make_shared<int>(10);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--b", *b)->required();
    sub->add_option("--n", *n)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            const Real s = deviation_sum(parse_real<Real>(*a), parse_real<Real>(*b), *n);
                            JsonWriter j;
                            j.begin_object().key("n").value(*n).key("sum").value(to_double(s)).end_object();
                            return Output{j.str(), "n,sum\n" + std::to_string(*n) + ',' + to_text(s) + '\n'};
                          });
                        }});
  }

  // thm-a
  {
    auto* sub = app.add_subcommand("thm-a", "super-stable cycles whose measures approach the acip");
    auto a = std::make_shared<double>(2.0);
    auto periods = std::make_shared<std::string>("8..18");
    auto reference = std::make_shared<std::string>("birkhoff");
    auto opt = std::make_shared<AcipOptions>();
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--periods", *periods, "lo..hi or a,b,c")->capture_default_str();
    sub->add_option("--reference", *reference, "birkhoff or arcsine")
        ->check(CLI::IsMember({"birkhoff", "arcsine"}))
        ->capture_default_str();
    sub->add_option("--epsilon", opt->epsilon, "bracket half-width for the first period")->capture_default_str();
    sub->add_option("--iterates", opt->reference_iterates, "Birkhoff reference length")->capture_default_str();
    sub->add_option("--burn", opt->burn)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          AcipOptions o = *opt;
                          o.reference = *reference == "arcsine" ? Reference::Arcsine : Reference::Birkhoff;
                          o.jobs = gl.jobs;
                          const auto t = run_acip_sequence(MapParam(*a), parse_range(*periods), gl.seed, o);
                          return Output{table_json(t), table_csv(t)};
                        }});
  }

  // thm-b
  {
    auto* sub = app.add_subcommand("thm-b", "Misiurewicz parameters accumulating at a");
    auto a = std::make_shared<std::string>("2");
    auto seed_x = std::make_shared<std::string>("0.4");
    auto period = std::make_shared<int>(1);
    auto range = std::make_shared<std::string>("3..15");
    auto span = std::make_shared<double>(0.5);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--repeller-seed", *seed_x, "Newton seed for the repeller at a")->capture_default_str();
    sub->add_option("--repeller-period", *period)->capture_default_str();
    sub->add_option("--N-range", *range, "lo..hi or a,b,c")->capture_default_str();
    sub->add_option("--span", *span, "continuation reach on each side of a")->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            const Real av = parse_real<Real>(*a);
                            const auto repeller = find_periodic_orbit(av, *period, parse_real<Real>(*seed_x));
                            const auto path = repeller_path(repeller, *span);
                            const auto seq = run_misiurewicz_sequence(av, path, parse_range(*range), gl.jobs);
                            JsonWriter j;
                            j.begin_object().key("a").value(to_text(av));
                            j.key("repeller");
                            write_orbit(j, repeller);
                            j.key("rows").begin_array();
                            std::string csv = "N,a_hat,distance,residual\n";
                            for (std::size_t i = 0; i < seq.rows.size(); ++i) {
                              const auto& r = seq.rows[i];
                              j.begin_object().key("N").value(r.N).key("a_hat").value(to_double(r.a_hat));
                              j.key("a_text").value(to_text(r.a_hat)).key("distance").value(to_double(r.distance));
                              j.key("residual").value(to_double(r.residual));
                              if (i + 1 < seq.rows.size() && seq.rows[i + 1].distance != 0) {
                                j.key("ratio").value(to_double(r.distance / seq.rows[i + 1].distance));
                              }
                              j.end_object();
                              csv += std::to_string(r.N) + ',' + to_text(r.a_hat) + ',' + to_text(r.distance) + ',' +
                                     format_number(to_double(r.residual)) + '\n';
                            }
                            j.end_array().key("notes").begin_array();
                            for (const auto& n : seq.notes) j.value(n);
                            j.end_array().end_object();
                            return Output{j.str(), csv};
                          });
                        }});
  }

  // thm-c
  {
    auto* sub = app.add_subcommand("thm-c", "diagonal super-stable sequence collapsing onto a repeller");
    auto a = std::make_shared<std::string>("2");
    auto seed_x = std::make_shared<std::string>("-0.9");
    auto period = std::make_shared<int>(1);
    auto depth = std::make_shared<int>(8);
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--repeller-seed", *seed_x, "Newton seed for the repeller at a")->capture_default_str();
    sub->add_option("--repeller-period", *period)->capture_default_str();
    sub->add_option("--depth", *depth)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            const Real av = parse_real<Real>(*a);
                            const auto repeller = find_periodic_orbit(av, *period, parse_real<Real>(*seed_x));
                            const auto t = run_diagonal_sequence(av, repeller, *depth, gl.jobs);
                            return Output{table_json(t), table_csv(t)};
                          });
                        }});
  }

  // thm-d
  {
    auto* sub = app.add_subcommand("thm-d", "super-stable sequence shadowing the repeller hit by the critical orbit");
    auto a = std::make_shared<std::string>("2");
    auto gamma = std::make_shared<double>(0.05);
    auto range = std::make_shared<std::string>();
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--gamma", *gamma, "shadowing radius")->capture_default_str();
    sub->add_option("--n-range", *range, "lo..hi or a,b,c (default 8..18, 8..36 in extended precision)");
    commands.push_back({sub, [=](const Globals& gl) {
                          return with_precision(gl, [&]<class Real>() {
                            const std::string r = !range->empty() ? *range : (std::is_same_v<Real, double> ? "8..18" : "8..36");
                            SingularOptions o;
                            o.gamma = *gamma;
                            o.jobs = gl.jobs;
                            const auto t = run_singular_sequence(parse_real<Real>(*a), parse_range(r), o);
                            return Output{table_json(t), table_csv(t)};
                          });
                        }});
  }

  // discontinuity
  {
    auto* sub = app.add_subcommand("discontinuity", "two super-stable sequences with different limit measures");
    auto a = std::make_shared<double>(2.0);
    auto range = std::make_shared<std::string>("8..18");
    sub->add_option("--a", *a)->capture_default_str();
    sub->add_option("--n-range", *range, "lo..hi or a,b,c")->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          const auto res = run_discontinuity_demo(MapParam(*a), parse_range(*range), gl.seed, gl.jobs);
                          JsonWriter j;
                          j.begin_object().key("acip_side");
                          write_table(j, res.acip_side);
                          j.key("singular_side");
                          write_table(j, res.singular_side);
                          j.key("window_check").begin_object();
                          j.key("a_superstable").value(res.spot.a_superstable).key("period").value(res.spot.period);
                          j.key("a_perturbed").value(res.spot.a_perturbed).key("multiplier");
                          if (res.spot.multiplier) {
                            j.value(*res.spot.multiplier);
                          } else {
                            j.null();
                          }
                          j.key("w1").value(res.spot.w1).key("within").value(res.spot.within).end_object();
                          j.end_object();
                          std::string csv = "table,n,a_n,period,w1,residual\n";
                          for (const auto* t : {&res.acip_side, &res.singular_side}) {
                            for (const auto& r : t->rows) {
                              csv += t->name + ',' + std::to_string(r.n) + ',' + r.a_text + ',' + std::to_string(r.period) +
                                     ',' + format_number(r.w1) + ',' + format_number(r.residual) + '\n';
                            }
                          }
                          return Output{j.str(), csv};
                        }});
  }

  // scan
  {
    auto* sub = app.add_subcommand("scan", "attractor or Lyapunov estimate on a parameter grid");
    auto window = std::make_shared<std::string>();
    auto grid = std::make_shared<int>(21);
    auto n_max = std::make_shared<long>(100000);
    auto tol = std::make_shared<double>(1e-9);
    sub->add_option("--window", *window, "lo:hi")->required();
    sub->add_option("--grid", *grid)->capture_default_str();
    sub->add_option("--n-max", *n_max)->capture_default_str();
    sub->add_option("--tol", *tol)->capture_default_str();
    commands.push_back({sub, [=](const Globals& gl) {
                          const auto rows = window_scan(parse_window<double>(*window), *grid, *n_max, *tol, gl.seed, gl.jobs);
                          JsonWriter j;
                          j.begin_array();
                          std::string csv = "a,kind,period,multiplier,lyapunov\n";
                          for (const auto& r : rows) {
                            j.begin_object().key("a").value(r.a).key("kind").value(r.kind);
                            j.key("period").value(r.period).key("multiplier").value(r.multiplier).key("lyapunov");
                            if (r.lyapunov) {
                              j.value(*r.lyapunov);
                            } else {
                              j.null();
                            }
                            j.end_object();
                            csv += format_number(r.a) + ',' + r.kind + ',' + std::to_string(r.period) + ',' +
                                   format_number(r.multiplier) + ',' + (r.lyapunov ? format_number(*r.lyapunov) : "") + '\n';
                          }
                          j.end_array();
                          return Output{j.str(), csv};
                        }});
  }

  auto* replay = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  std::string manifest_file;
  replay->add_option("manifest", manifest_file, "manifest written next to an output")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    if (args.empty()) throw CLI::CallForHelp();
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    (args.empty() ? err : out) << app.help();
    return args.empty() ? kExitUsage : kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << UNFOLD_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (replay->parsed()) {
      const auto m = RunManifest::parse(read_file(manifest_file));
      auto argv = m.argv;
      if (!g.out.empty()) {
        argv = without_out(argv);
        argv.insert(argv.begin(), {"--out", g.out});
      }
      return dispatch(argv, out, err);
    }

    const auto precision = parse_precision(g.precision);
    out << "period cap: " << period_cap(precision) << " (" << g.precision << " precision)\n";
    const Format format = parse_format(g.format);
    for (const auto& cmd : commands) {
      if (!cmd.app->parsed()) continue;
      const Output result = cmd.run(g);
      const std::string& content = format == Format::Json ? result.json : result.csv;
      if (content.empty()) {
        err << "usage error: " << cmd.app->get_name() << " has no " << g.format << " output\n";
        return kExitUsage;
      }
      if (g.out.empty()) {
        out << content;
        return kExitOk;
      }
      const auto bytes = write_report(content, g.out);
      RunManifest m;
      m.command = cmd.app->get_name();
      m.argv = args;
      m.seed = g.seed;
      m.precision = g.precision;
      m.version = UNFOLD_VERSION;
      m.input_hash = git_blob_hash(joined(without_out(args)));
      m.outputs = {g.out};
      m.output_hashes = {git_blob_hash(content)};
      write_report(m.to_json(), manifest_path(g.out));
      out << "wrote " << bytes << " bytes to " << g.out << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace unfold::cli
