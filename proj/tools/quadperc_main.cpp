// Command-line front end: exact weight tables, truncated-chain stationary
// distributions, percolation-threshold brackets, and the Monte Carlo
// peeling simulator.  All output is machine readable (JSON or CSV) and
// carries a manifest sufficient to reproduce the run.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "quadperc/bounds.hpp"
#include "quadperc/chain.hpp"
#include "quadperc/manifest.hpp"
#include "quadperc/sim.hpp"

using nlohmann::json;
using namespace quadperc;

namespace {

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

std::string format_fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

int cmd_qtable(long max_k, long qprime_max, const std::string& out_path) {
  WeightTable table(std::max<long>(max_k, 2),
                    std::min<long>(std::max<long>(qprime_max, 2), max_k));
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  os << "# schema=" << kCsvSchema << " command=qtable max_k=" << max_k
     << " qprime_max=" << table.qprime_cutoff() << "\n";
  os << "k,q,qprime,cum_q_odd,cum_q_even,tail_odd,tail_qprime\n";
  for (long k = -1; k <= max_k; ++k) {
    os << k << "," << to_fraction_string(table.q(k)) << ",";
    if (k >= 2 && k % 2 == 0 && k <= table.qprime_cutoff())
      os << to_fraction_string(table.qprime(k));
    os << "," << to_fraction_string(table.cum_odd(k)) << ","
       << to_fraction_string(table.cum_even(k)) << ",";
    if (k >= 1) os << to_fraction_string(table.tail_odd(k));
    os << ",";
    if (k >= 2 && k % 2 == 0 && k <= table.qprime_cutoff() + 2)
      os << to_fraction_string(table.tail_qprime(k));
    os << "\n";
  }
  return 0;
}

json bounds_to_json(const BoundsResult& b) {
  json sc_lb = json::array(), sc_ub = json::array();
  for (auto& [a, c] : b.sign_changes_lb) sc_lb.push_back({a, c});
  for (auto& [a, c] : b.sign_changes_ub) sc_ub.push_back({a, c});
  return json{{"K", b.capacity},
              {"p_lower", b.p_lower},
              {"p_upper", b.p_upper},
              {"tolerance", b.tolerance},
              {"grid_step", b.grid_step},
              {"alpha_ub_at_lower", b.alpha_ub_at_lower},
              {"alpha_lb_at_upper", b.alpha_lb_at_upper},
              {"sign_changes_alpha_lb", sc_lb},
              {"sign_changes_alpha_ub", sc_ub}};
}

int cmd_bounds(long K, double tol, double grid, const std::string& out_path) {
  WeightTable table = chain_weight_table(K);
  BoundsResult b = pc_bracket(K, tol, grid, table);
  json doc;
  doc["manifest"] = run_manifest(
      "bounds", {{"K", K}, {"tol", tol}, {"grid", grid},
                 {"weight_table_cutoff", table.cutoff()}});
  doc["result"] = bounds_to_json(b);
  std::ofstream file;
  open_output(file, out_path) << doc.dump(2) << "\n";
  return 0;
}

int cmd_bracket_series(long max_k, double tol, double grid,
                       const std::string& out_path) {
  BracketSeries series = bracket_series(max_k, tol, grid);
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  os << "# schema=" << kCsvSchema << " command=bracket-series max_K=" << max_k
     << " tol=" << tol << " grid=" << grid
     << " lower_monotone=" << (series.lower_monotone ? 1 : 0)
     << " upper_monotone=" << (series.upper_monotone ? 1 : 0) << "\n";
  os << "K,lower,upper\n";
  for (const auto& row : series.rows)
    os << row.capacity << "," << format_fixed(row.p_lower, 4) << ","
       << format_fixed(row.p_upper, 4) << "\n";
  return 0;
}

int cmd_chain_stationary(long K, double p, bool rational_mode,
                         const std::string& p_rational,
                         const std::string& out_path) {
  WeightTable table = chain_weight_table(K);
  ChainContext ctx(K, table);
  json doc;
  json config{{"K", K}, {"weight_table_cutoff", table.cutoff()}};

  json states = json::array();
  json marg_m = json::object(), marg_u = json::object();
  double residual = 0;

  if (rational_mode) {
    Rational pr = p_rational.empty() ? Rational(1, 2)
                                     : fraction_from_string(p_rational);
    config["p"] = to_fraction_string(pr);
    auto pi = ctx.stationary_exact(pr);
    StationaryDist dist;
    for (const auto& v : pi) dist.pi.push_back(to_double(v));
    for (long i = 0; i < ctx.space().size(); ++i)
      states.push_back({{"word", ctx.space().word(i).to_string()},
                        {"pi", to_fraction_string(pi[i])},
                        {"pi_real", to_double(pi[i])}});
    MarginalReport mr = ctx.marginals(dist);
    for (long j = 2; j <= K; ++j) {
      marg_m[std::to_string(j)] = mr.m[j];
      marg_u[std::to_string(j)] = mr.u[j];
    }
  } else {
    config["p"] = p;
    StationaryDist dist = ctx.stationary(p);
    residual = dist.residual;
    for (long i = 0; i < ctx.space().size(); ++i)
      states.push_back({{"word", ctx.space().word(i).to_string()},
                        {"pi", dist.pi[i]}});
    MarginalReport mr = ctx.marginals(dist);
    for (long j = 2; j <= K; ++j) {
      marg_m[std::to_string(j)] = mr.m[j];
      marg_u[std::to_string(j)] = mr.u[j];
    }
  }

  doc["manifest"] = run_manifest("chain-stationary", config);
  doc["result"] = {{"K", K},
                   {"p", config["p"]},
                   {"states", states},
                   {"marginals", {{"m", marg_m}, {"u", marg_u}}},
                   {"residual", residual}};
  std::ofstream file;
  open_output(file, out_path) << doc.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const SimConfig& cfg, const std::string& csv_path,
                 long long stride, const std::string& out_path) {
  FloatWeightTable table(cfg.cutoff);
  SimConfig run_cfg = cfg;
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    if (!csv) throw std::runtime_error("cannot open csv file: " + csv_path);
    csv << "# schema=" << kCsvSchema << " command=simulate trajectory\n";
    csv << "n,S,S_hat\n";
    run_cfg.trajectory = [&csv](long long n, long long s, long long sh) {
      csv << n << "," << s << "," << sh << "\n";
    };
    run_cfg.trajectory_stride = stride;
  }
  SimStats stats = run(run_cfg, table);

  json config{
      {"p", cfg.p},
      {"steps", cfg.steps},
      {"replicas", cfg.replicas},
      {"seed", cfg.seed},
      {"policy", cfg.policy == ExtensionPolicy::all_black ? "black" : "iid"},
      {"cutoff", cfg.cutoff},
      {"mode", cfg.mode == SimMode::drift
                   ? "drift"
                   : (cfg.mode == SimMode::survival ? "survival"
                                                    : "marginals")},
      {"burnin", cfg.burnin},
      {"batches_per_replica", cfg.batches_per_replica}};

  json result{{"total_steps", stats.total_steps},
              {"total_batches", stats.total_batches},
              {"event_freq", stats.event_freq},
              {"proxy_divergence_count", stats.proxy_divergence_count},
              {"residual_lump_mass", stats.residual_lump_mass}};
  if (cfg.mode == SimMode::drift) {
    result["drift_mean"] = stats.drift_mean;
    result["drift_ci_halfwidth"] = stats.drift_ci_halfwidth;
    result["drift_ci_sensitivity"] = stats.drift_ci_sensitivity;
  } else if (cfg.mode == SimMode::survival) {
    result["survival_fraction"] = stats.survival_fraction;
    json hist = json::array();
    for (size_t b = 0; b < stats.death_time_histogram.size(); ++b)
      if (stats.death_time_histogram[b])
        hist.push_back({{"log2_bucket", b},
                        {"count", stats.death_time_histogram[b]}});
    result["death_time_histogram"] = hist;
  } else {
    json freqs = json::object(), ses = json::object();
    for (auto& [j, v] : stats.marginal_freq) freqs[std::to_string(j)] = v;
    for (auto& [j, v] : stats.marginal_se) ses[std::to_string(j)] = v;
    result["marginal_freq"] = freqs;
    result["marginal_se"] = ses;
  }

  json doc;
  doc["manifest"] = run_manifest("simulate", config);
  doc["result"] = result;
  std::ofstream file;
  open_output(file, out_path) << doc.dump(2) << "\n";
  return 0;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_verify() {
  std::vector<Check> checks;
  auto add = [&](const std::string& name, bool pass,
                 const std::string& detail = "") {
    checks.push_back({name, pass, detail});
  };

  // Exact weight identities.
  WeightTable table(400, 64);
  add("q(-1) = 3/8", table.q(-1) == Rational(3, 8));
  add("q(0) = q(1) = 1/9",
      table.q(0) == make_rational(1, 9) && table.q(1) == make_rational(1, 9));
  add("event masses sum to 1",
      Rational(3, 8) + table.selfparallel_mass() + 2 * make_rational(1, 8) +
              2 * make_rational(1, 18) + make_rational(1, 24) ==
          1);
  MomentReport mom = moment_checks(WeightTable(10000, 8));
  add("E(exposed edges) = 2 exactly", mom.exposed_ok);
  add("E(right swallow) partial < 1/2 within tail bound", mom.right_ok,
      "partial=" + std::to_string(to_double(mom.right_swallow_partial)));

  // K=2 oracle: six transition rows and the closed-form stationary law.
  {
    WeightTable t2 = chain_weight_table(2);
    ChainContext ctx(2, t2);
    Rational p(1, 3);
    auto m = ctx.rational_matrix(p);
    auto& sp = ctx.space();
    BoundaryWord wb = BoundaryWord::single_black();
    BoundaryWord wbb{0, 2}, wbo{2, 2};
    auto mass = [&](const BoundaryWord& a, const BoundaryWord& b) {
      for (auto& [j, v] : m.rows[sp.index(a)])
        if (j == sp.index(b)) return v;
      return Rational(0);
    };
    Rational half_1mp = (1 - p) / 2;
    Rational ninth_1pp = (1 + p) / 9;
    Rational tf = Rational(3, 8) * p * (1 - p);
    bool rows_ok = mass(wb, wbb) == half_1mp && mass(wb, wbo) == tf &&
                   mass(wbb, wb) == ninth_1pp && mass(wbb, wbo) == tf &&
                   mass(wbo, wb) == ninth_1pp && mass(wbo, wbb) == half_1mp;
    add("K=2 transition rows match closed forms at p=1/3", rows_ok);

    auto pi = ctx.stationary_exact(Rational(1, 2));
    Rational denom = make_rational(-27, 4) - make_rational(1, 2) + 44;
    bool pi_ok = pi[sp.index(wb)] == make_rational(8, 1) * make_rational(3, 2) / denom &&
                 pi[sp.index(wbo)] == make_rational(27, 4) / denom;
    add("K=2 stationary matches closed forms at p=1/2", pi_ok);
  }

  // K=2 bracket endpoints against the quartics.
  QuarticReport qr = verify_quartic();
  add("K=2 quartics vanish at bracket endpoints", qr.ok,
      "lower=" + std::to_string(qr.lower_value) +
          " upper=" + std::to_string(qr.upper_value));

  bool all = true;
  for (const auto& c : checks) {
    std::printf("%-55s %s%s%s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                c.detail.empty() ? "" : "  ", c.detail.c_str());
    all = all && c.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peeling-process percolation bounds for half-plane quadrangulations"};
  app.require_subcommand(1);

  std::string out_path;

  auto* qtable = app.add_subcommand("qtable", "emit exact weight table CSV");
  long max_k = 40, qprime_max = 40;
  qtable->add_option("--max-k", max_k, "largest index")->check(CLI::Range(2l, 100000l));
  qtable->add_option("--qprime-max", qprime_max, "largest q' index");
  qtable->add_option("-o,--output", out_path, "output file (default stdout)");

  auto* chain = app.add_subcommand("chain-stationary",
                                   "stationary law of the truncated chain");
  long K = 2;
  double p = 0.5;
  bool rational_mode = false;
  std::string p_rational;
  chain->add_option("--K", K, "word capacity")->required()->check(CLI::Range(1l, 25l));
  chain->add_option("--p", p, "white probability")->check(CLI::Range(0.0, 1.0));
  chain->add_flag("--rational", rational_mode, "exact rational solve");
  chain->add_option("--p-rational", p_rational, "p as num/den (rational mode)");
  chain->add_option("-o,--output", out_path, "output file");

  auto* bounds = app.add_subcommand("bounds", "threshold bracket at one K");
  double tol = kDefaultTolerance, grid = kDefaultGridStep;
  bounds->add_option("--K", K, "word capacity")->required()->check(CLI::Range(1l, 20l));
  bounds->add_option("--tol", tol, "bisection tolerance")->check(CLI::Range(1e-9, 1e-2));
  bounds->add_option("--grid", grid, "grid step")->check(CLI::Range(1e-6, 1e-3));
  bounds->add_option("-o,--output", out_path, "output file");

  auto* series = app.add_subcommand("bracket-series", "brackets for K=1..max");
  long series_max = 8;
  series->add_option("--max-K", series_max, "largest capacity")->required()
      ->check(CLI::Range(1l, 20l));
  series->add_option("--tol", tol, "bisection tolerance")->check(CLI::Range(1e-9, 1e-2));
  series->add_option("--grid", grid, "grid step")->check(CLI::Range(1e-6, 1e-3));
  series->add_option("-o,--output", out_path, "output file");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo peeling run");
  SimConfig cfg;
  std::string policy = "black", mode = "drift", csv_path;
  long long stride = 1000;
  sim->add_option("--p", cfg.p, "white probability")->required()->check(CLI::Range(0.0, 1.0));
  sim->add_option("--steps", cfg.steps, "steps per replica")->required();
  sim->add_option("--replicas", cfg.replicas, "independent replicas");
  sim->add_option("--seed", cfg.seed, "master seed");
  sim->add_option("--policy", policy, "black|iid")
      ->check(CLI::IsMember({"black", "iid"}));
  sim->add_option("--mode", mode, "drift|survival|marginals")
      ->check(CLI::IsMember({"drift", "survival", "marginals"}));
  sim->add_option("--cutoff", cfg.cutoff, "swallow-size cutoff");
  sim->add_option("--burnin", cfg.burnin, "burn-in steps (marginals)");
  sim->add_option("--positions", cfg.marginal_max_position,
                  "track marginals up to this position");
  sim->add_option("--batches", cfg.batches_per_replica, "batches per replica");
  sim->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  sim->add_option("--csv", csv_path, "trajectory CSV (replica 0)");
  sim->add_option("--stride", stride, "trajectory stride");
  sim->add_option("-o,--output", out_path, "output file");

  auto* verify = app.add_subcommand("verify", "run exact identity checks");
  (void)verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(qtable))
      return cmd_qtable(max_k, qprime_max, out_path);
    if (app.got_subcommand(chain))
      return cmd_chain_stationary(K, p, rational_mode, p_rational, out_path);
    if (app.got_subcommand(bounds)) return cmd_bounds(K, tol, grid, out_path);
    if (app.got_subcommand(series))
      return cmd_bracket_series(series_max, tol, grid, out_path);
    if (app.got_subcommand(sim)) {
      cfg.policy = policy == "black" ? ExtensionPolicy::all_black
                                     : ExtensionPolicy::iid;
      cfg.mode = mode == "drift"
                     ? SimMode::drift
                     : (mode == "survival" ? SimMode::survival
                                           : SimMode::marginals);
      return cmd_simulate(cfg, csv_path, stride, out_path);
    }
    if (app.got_subcommand(verify)) return cmd_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
