#include "pvchart/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pvchart/dgp.hpp"
#include "pvchart/report.hpp"
#include "pvchart/uniform_ewma.hpp"

namespace pvchart {

namespace {

struct SimulateConfig {
  std::string scenario = "iid-uniform";
  std::string chart = "raw";
  double alpha = 0.05;
  int k = 1;
  double lambda = 0.5;
  double r = 1.0;
  double beta = 0.5;  // e-chart calibrator exponent
  int n0 = 50;
  double delta = 0.0;
  double rho = 0.0;
  double ar_beta = 0.5;
  std::string ar_pvalue = "sup";
  std::string ooc = "none";
  double ooc_param = 0.0;
  std::string method = "bonferroni";
  bool fwe_one_step = false;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::int64_t max_horizon = 10000000;
  int threads = 1;
  std::string out;
  bool full_precision = false;
};

ChartKind make_chart(const SimulateConfig& cfg) {
  if (cfg.chart == "raw") return RawChart{};
  if (cfg.chart == "q") return QEwma{cfg.lambda, cfg.r};
  if (cfg.chart == "qtilde") return QTildeEwma{cfg.lambda, cfg.r};
  if (cfg.chart == "qbar") return QBarEwma{cfg.lambda, cfg.r};
  if (cfg.chart == "e") return EValueEwma{cfg.lambda, cfg.beta};
  throw std::invalid_argument("unknown chart: " + cfg.chart + " (raw|q|qtilde|qbar|e)");
}

bool chart_keeps_conditional(const std::string& chart) {
  return chart == "raw" || chart == "qbar";
}

KsOoc parse_ooc(const std::string& name, double param) {
  using F = KsOoc::Family;
  if (name == "none") return {F::none, 0.0};
  if (name == "shift") return {F::shift, param};
  if (name == "scale") return {F::scale, param};
  if (name == "cauchy") return {F::cauchy, 0.0};
  if (name == "dyn-mean") return {F::dyn_mean, param};
  if (name == "dyn-var") return {F::dyn_var, param};
  throw std::invalid_argument("unknown ooc family: " + name);
}

AggregateMethod parse_method(const std::string& name) {
  if (name == "bonferroni") return AggregateMethod::bonferroni;
  if (name == "arithmetic") return AggregateMethod::arithmetic;
  throw std::invalid_argument("unknown aggregate method: " + name);
}

void write_rows(const std::vector<TableRow>& rows, const std::string& out, bool full_precision) {
  CsvOptions options;
  options.full_precision = full_precision;
  if (out.empty())
    emit_csv(rows, std::cout, options);
  else
    emit_csv_file(rows, out, options);
}

struct ScalarScenario {
  StreamFactory factory;
  bool conditionally_valid;
};

ScalarScenario make_scalar_scenario(const SimulateConfig& cfg) {
  if (cfg.scenario == "iid-uniform") return {iid_uniform_source(cfg.seed), true};
  if (cfg.scenario == "one-phase-normal") return {one_phase_normal_source(cfg.seed), true};
  if (cfg.scenario == "two-phase-normal") return {two_phase_normal_source(cfg.seed), false};
  if (cfg.scenario == "ar1") {
    const bool sup = cfg.ar_pvalue == "sup";
    if (!sup && cfg.ar_pvalue != "marginal")
      throw std::invalid_argument("--ar-pvalue must be marginal or sup");
    return {ar1_source(cfg.ar_beta, cfg.delta, sup ? Ar1PValue::sup : Ar1PValue::marginal,
                       cfg.seed),
            sup};
  }
  if (cfg.scenario == "ks")
    return {ks_source(cfg.n0, parse_ooc(cfg.ooc, cfg.ooc_param), cfg.seed), false};
  throw std::invalid_argument("unknown scenario: " + cfg.scenario);
}

TableRow base_row(const SimulateConfig& cfg) {
  TableRow row;
  row.scenario = cfg.scenario;
  row.chart = cfg.chart;
  row.alpha = cfg.alpha;
  row.k = cfg.k;
  if (cfg.chart != "raw") row.lambda = cfg.lambda;
  if (cfg.chart == "q" || cfg.chart == "qtilde" || cfg.chart == "qbar") row.r = cfg.r;
  if (cfg.chart == "e") row.beta = cfg.beta;
  if (cfg.scenario == "ks" || cfg.scenario == "mv-cauchy") row.n0 = cfg.n0;
  if (cfg.scenario == "ar1") row.beta = cfg.ar_beta;
  if (cfg.scenario == "mv-normal" || cfg.scenario == "mv-cauchy") {
    row.delta = cfg.delta;
    row.rho = cfg.rho;
  }
  return row;
}

// Directional scenarios: run the aggregate chart to the k-th alarm and count
// correctly-signed detections there; in FWE mode run a single step per
// replication and count runs with at least one wrong rejection.
TableRow run_directional(const SimulateConfig& cfg) {
  DirectionalFactory factory =
      cfg.scenario == "mv-normal"
          ? mv_normal_source(cfg.delta, cfg.rho, cfg.seed)
          : mv_cauchy_source(cfg.delta, cfg.rho, cfg.n0, cfg.seed);
  const AggregateMethod method = parse_method(cfg.method);

  std::vector<std::int64_t> alarm_time(cfg.reps, -1);
  std::vector<double> ooc_count(cfg.reps, 0.0);
  std::vector<double> fwe(cfg.reps, 0.0);

  auto wrong_rejection = [&](const std::pair<std::size_t, Direction>& rej) {
    const double mu = rej.first == 0 ? cfg.delta : (rej.first == 2 ? -cfg.delta : 0.0);
    if (rej.second == Direction::above) return mu <= 0.0;
    return mu >= 0.0;
  };

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      DirectionalStream stream = factory(rep);
      int alarms = 0;
      const std::int64_t horizon = cfg.fwe_one_step ? 1 : cfg.max_horizon;
      for (std::int64_t step = 1; step <= horizon; ++step) {
        const LocalisationReport rep_t = localise(stream(), cfg.alpha, method);
        if (cfg.fwe_one_step) {
          for (const auto& rej : rep_t.directional_set)
            if (wrong_rejection(rej)) {
              fwe[rep] = 1.0;
              break;
            }
          break;
        }
        if (rep_t.alarm && ++alarms == cfg.k) {
          alarm_time[rep] = step;
          for (const auto& rej : rep_t.directional_set) {
            const bool correct = (rej.first == 0 && rej.second == Direction::above) ||
                                 (rej.first == 2 && rej.second == Direction::below);
            if (correct && cfg.delta > 0.0) ooc_count[rep] += 1.0;
          }
          break;
        }
      }
    }
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), cfg.reps));
  if (n_threads == 1) {
    worker(0, cfg.reps);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (cfg.reps + n_threads - 1) / n_threads;
    for (std::size_t i = 0; i < n_threads; ++i) {
      const std::size_t begin = i * chunk;
      const std::size_t end = std::min(cfg.reps, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  TableRow row = base_row(cfg);
  if (cfg.fwe_one_step) {
    double total = 0.0;
    for (double v : fwe) total += v;
    row.mean_fwes = total / static_cast<double>(cfg.reps);
    return row;
  }

  RunLengthSample sample;
  sample.max_horizon = cfg.max_horizon;
  sample.reps = cfg.reps;
  double ooc_total = 0.0;
  std::size_t alarmed = 0;
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    if (alarm_time[rep] < 0) {
      ++sample.censored_count;
    } else {
      sample.times_to_k.push_back(alarm_time[rep]);
      ooc_total += ooc_count[rep];
      ++alarmed;
    }
  }
  const RunLengthSummary summary = summarize_run_lengths(
      sample, applicable_bound(cfg.scenario == "mv-normal", cfg.alpha, cfg.k));
  row.mean = summary.mean;
  row.std_error = summary.std_error;
  row.bound = summary.bound;
  row.ratio = summary.ratio;
  row.censored = summary.censored_count;
  if (cfg.delta > 0.0 && alarmed > 0) row.mean_ooc = ooc_total / static_cast<double>(alarmed);
  return row;
}

TableRow run_scalar(const SimulateConfig& cfg) {
  const ScalarScenario scenario = make_scalar_scenario(cfg);
  const ChartKind kind = make_chart(cfg);
  const AlarmRule rule(cfg.alpha, cfg.k);
  const RunLengthSample sample = estimate_run_length(scenario.factory, kind, rule, cfg.reps,
                                                     cfg.max_horizon, cfg.threads);
  const bool conditional = scenario.conditionally_valid && chart_keeps_conditional(cfg.chart);
  const RunLengthSummary summary =
      summarize_run_lengths(sample, applicable_bound(conditional, cfg.alpha, cfg.k));

  TableRow row = base_row(cfg);
  row.mean = std::isnan(summary.mean) ? std::optional<double>() : summary.mean;
  row.std_error = std::isnan(summary.std_error) ? std::optional<double>() : summary.std_error;
  row.bound = summary.bound;
  row.ratio = summary.ratio;
  row.censored = summary.censored_count;
  return row;
}

int cmd_simulate(const SimulateConfig& cfg) {
  std::cerr << "# simulate scenario=" << cfg.scenario << " chart=" << cfg.chart
            << " alpha=" << cfg.alpha << " k=" << cfg.k << " lambda=" << cfg.lambda
            << " r=" << cfg.r << " beta=" << cfg.beta << " n0=" << cfg.n0
            << " delta=" << cfg.delta << " rho=" << cfg.rho << " ar_beta=" << cfg.ar_beta
            << " ar_pvalue=" << cfg.ar_pvalue << " ooc=" << cfg.ooc
            << " ooc_param=" << cfg.ooc_param << " method=" << cfg.method
            << " reps=" << cfg.reps << " seed=" << cfg.seed << " max_horizon=" << cfg.max_horizon
            << " threads=" << cfg.threads << '\n';

  std::vector<TableRow> rows;
  if (cfg.scenario == "mv-normal" || cfg.scenario == "mv-cauchy")
    rows.push_back(run_directional(cfg));
  else
    rows.push_back(run_scalar(cfg));
  write_rows(rows, cfg.out, cfg.full_precision);
  return 0;
}

struct DensityConfig {
  double lambda = 0.5;
  int t = 2;
  double u0 = 0.5;
  int grid = 201;
  std::string out;
};

int cmd_density(const DensityConfig& cfg) {
  std::cerr << "# density lambda=" << cfg.lambda << " t=" << cfg.t << " u0=" << cfg.u0
            << " grid=" << cfg.grid << '\n';
  if (cfg.grid < 2) throw std::invalid_argument("--grid must be >= 2");
  const UniformEwmaSpec spec(cfg.lambda, cfg.t, cfg.u0);
  std::ostringstream body;
  body << "u,pdf,cdf\n";
  const double lo = spec.support_lower();
  const double hi = spec.support_upper();
  for (int i = 0; i < cfg.grid; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cfg.grid - 1);
    body << format_number(u, 12) << ',' << format_number(uniform_ewma_pdf(spec, u), 12) << ','
         << format_number(uniform_ewma_cdf(spec, u), 12) << '\n';
  }
  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write output file: " + cfg.out);
    out << body.str();
  }
  return 0;
}

struct LocalizeConfig {
  std::string input;
  double alpha = 0.05;
  std::string method = "bonferroni";
  std::string out;
};

int cmd_localize(const LocalizeConfig& cfg) {
  std::cerr << "# localize input=" << cfg.input << " alpha=" << cfg.alpha
            << " method=" << cfg.method << '\n';
  std::ifstream in(cfg.input);
  if (!in) throw std::runtime_error("cannot read input file: " + cfg.input);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty input file");
  std::istringstream hs(header);
  std::vector<std::string> cols;
  for (std::string col; std::getline(hs, col, ',');) cols.push_back(col);
  const bool has_time = !cols.empty() && cols.front() == "time";
  const std::size_t first_p = has_time ? 1 : 0;
  if ((cols.size() - first_p) % 2 != 0 || cols.size() == first_p)
    throw std::runtime_error("expected paired p_le_j,p_ge_j columns");
  const std::size_t d = (cols.size() - first_p) / 2;

  const AggregateMethod method = parse_method(cfg.method);
  std::ostringstream body;
  body << "time,aggregate,alarm,n_rejected,rejections\n";
  std::string line;
  std::int64_t t = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++t;
    std::istringstream ls(line);
    std::vector<double> vals;
    for (std::string cell; std::getline(ls, cell, ',');) vals.push_back(std::stod(cell));
    if (vals.size() != cols.size())
      throw std::runtime_error("row has wrong number of fields: " + line);
    const std::int64_t time = has_time ? static_cast<std::int64_t>(vals[0]) : t;
    DirectionalPValues dp;
    for (std::size_t j = 0; j < d; ++j) {
      dp.p_le.push_back(vals[first_p + 2 * j]);
      dp.p_ge.push_back(vals[first_p + 2 * j + 1]);
    }
    const LocalisationReport report = localise(dp, cfg.alpha, method);
    body << time << ',' << format_number(report.aggregate.value(), 12) << ','
         << (report.alarm ? 1 : 0) << ',' << report.directional_set.size() << ',';
    bool first = true;
    for (const auto& rej : report.directional_set) {
      if (!first) body << ';';
      body << (rej.first + 1) << ':' << (rej.second == Direction::below ? "le" : "ge");
      first = false;
    }
    body << '\n';
  }

  if (cfg.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write output file: " + cfg.out);
    out << body.str();
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"p-value control charts: run-length bounds, smoothed charts, localisation"};
  app.require_subcommand(1);
  // config keys mirror the flags under a [subcommand] section; command-line
  // flags override file values
  app.set_config("--config", "", "key = value file with [subcommand] sections");

  // bounds
  double b_alpha = 0.05;
  int b_k = 1;
  bool b_conditional = false;
  auto* bounds = app.add_subcommand("bounds", "print the run-length lower bound");
  bounds->add_option("--alpha", b_alpha, "alarm level in (0,1]")->required();
  bounds->add_option("--k", b_k, "alarm count");
  bounds->add_flag("--conditional", b_conditional,
                   "use the conditional-validity bound k/alpha");

  SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run-length estimation");
  simulate->add_option("--scenario", sim.scenario,
                       "iid-uniform|one-phase-normal|two-phase-normal|ar1|ks|mv-normal|mv-cauchy");
  simulate->add_option("--chart", sim.chart, "raw|q|qtilde|qbar|e");
  simulate->add_option("--alpha", sim.alpha, "alarm level");
  simulate->add_option("--k", sim.k, "alarm count");
  simulate->add_option("--lambda", sim.lambda, "smoothing weight in (0,1)");
  simulate->add_option("--r", sim.r, "merge exponent (> -1, nonzero)");
  simulate->add_option("--beta", sim.beta, "e-chart calibrator exponent in (0,1)");
  simulate->add_option("--n0", sim.n0, "reference sample size");
  simulate->add_option("--delta", sim.delta, "shift parameter");
  simulate->add_option("--rho", sim.rho, "equicorrelation in [0,1)");
  simulate->add_option("--ar-beta", sim.ar_beta, "autoregression coefficient in (-1,1)");
  simulate->add_option("--ar-pvalue", sim.ar_pvalue, "marginal|sup");
  simulate->add_option("--ooc", sim.ooc, "none|shift|scale|cauchy|dyn-mean|dyn-var");
  simulate->add_option("--ooc-param", sim.ooc_param, "family parameter");
  simulate->add_option("--method", sim.method, "bonferroni|arithmetic aggregate");
  simulate->add_flag("--fwe-one-step", sim.fwe_one_step,
                     "single-step family-wise error experiment (mv scenarios)");
  simulate->add_option("--reps", sim.reps, "replications");
  simulate->add_option("--seed", sim.seed, "root seed; all randomness derives from it");
  simulate->add_option("--max-horizon", sim.max_horizon, "censoring horizon per replication");
  simulate->add_option("--threads", sim.threads, "worker threads");
  simulate->add_option("--out", sim.out, "output CSV path (default stdout)");
  simulate->add_flag("--precision", sim.full_precision, "full-precision CSV numbers");

  DensityConfig den;
  auto* density = app.add_subcommand("density", "smoothed-uniform pdf/cdf samples");
  density->add_option("--lambda", den.lambda, "smoothing weight in (0,1)")->required();
  density->add_option("--t", den.t, "time index")->required();
  density->add_option("--u0", den.u0, "start value in [0,1]");
  density->add_option("--grid", den.grid, "number of grid points");
  density->add_option("--out", den.out, "output CSV path (default stdout)");

  LocalizeConfig loc;
  auto* localize = app.add_subcommand("localize", "per-step directional localisation");
  localize->add_option("--input", loc.input, "CSV of one-sided p-value pairs")->required();
  localize->add_option("--alpha", loc.alpha, "alarm level in (0,1)");
  localize->add_option("--method", loc.method, "bonferroni|arithmetic aggregate");
  localize->add_option("--out", loc.out, "output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
    if (bounds->parsed()) {
      std::cerr << "# bounds alpha=" << b_alpha << " k=" << b_k
                << " conditional=" << (b_conditional ? 1 : 0) << '\n';
      const double value = b_conditional ? karl_bound_conditional(b_alpha, b_k)
                                         : karl_bound_superuniform(b_alpha, b_k);
      std::cout << format_number(value, 15) << '\n';
      return 0;
    }
    if (simulate->parsed()) return cmd_simulate(sim);
    if (density->parsed()) return cmd_density(den);
    if (localize->parsed()) return cmd_localize(loc);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pvchart
