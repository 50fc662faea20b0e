#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "guesswork/cli.hpp"
#include "guesswork/csv.hpp"
#include "guesswork/errors.hpp"
#include "guesswork/exact_oracle.hpp"

namespace guesswork::cli {

namespace {

std::ofstream open_output(const Options& options, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  const auto path = options.out_dir / name;
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  return out;
}

void write_json(const Options& options, const std::string& name, const Json& doc) {
  auto out = open_output(options, name);
  out << doc.dump(2) << '\n';
}

const std::vector<double>& default_betas() {
  static const std::vector<double> betas = {0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 2.0 / 3.0, 0.75, 0.8, 0.9,
                                            1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, kInfinity};
  return betas;
}

std::vector<double> default_alphas() {
  std::vector<double> alphas;
  for (int i = -8; i <= 16; ++i) {
    alphas.push_back(0.25 * i);
  }
  return alphas;
}

bool homogeneous(const MultiUserProblem& problem) {
  const auto first = source_to_json(problem.sources.front());
  for (const auto& s : problem.sources) {
    if (source_to_json(s) != first) {
      return false;
    }
  }
  return true;
}

std::string join_users(const std::vector<std::size_t>& users) {
  std::string s;
  for (std::size_t i = 0; i < users.size(); ++i) {
    s += (i ? ";" : "") + std::to_string(users[i]);
  }
  return s;
}

Json number_or_string(double x) {
  if (std::isfinite(x)) {
    return x;
  }
  return format_number(x);
}

} // namespace

int cmd_analyze(const ProblemConfig& config, const Options& options, std::ostream& log) {
  const auto& problem = config.problem;
  problem.validate();
  const double scale = options.scale();
  const std::size_t users = problem.users();
  LegendreOptions legendre;
  legendre.grid_points = options.grid.value_or(config.grid);

  std::vector<RenyiCurve> renyi;
  std::vector<RateCurve> rates;
  for (const auto& src : problem.sources) {
    renyi.push_back(renyi_curve(src));
    rates.push_back(rate_single(Scgf(renyi.back()), legendre));
  }
  const auto multi = rate_multi(rates, problem.targets);
  const auto report = convexity_report(multi);

  {
    auto out = open_output(options, "renyi.csv");
    out << "beta";
    for (std::size_t v = 0; v < users; ++v) {
      out << ",user" << v;
    }
    out << '\n';
    for (double beta : config.betas.empty() ? default_betas() : config.betas) {
      out << format_number(beta);
      for (const auto& r : renyi) {
        out << ',' << format_number(r(beta) / scale);
      }
      out << '\n';
    }
  }
  {
    auto out = open_output(options, "scgf.csv");
    out << "alpha";
    for (std::size_t v = 0; v < users; ++v) {
      out << ",user" << v;
    }
    out << ",multi\n";
    for (double alpha : config.alphas.empty() ? default_alphas() : config.alphas) {
      out << format_number(alpha);
      for (const auto& r : renyi) {
        out << ',' << format_number(scgf_single(r, alpha) / scale);
      }
      out << ',' << format_number(scgf_multi(multi, alpha) / scale) << '\n';
    }
  }
  {
    auto out = open_output(options, "rate.csv");
    out << "x";
    for (std::size_t v = 0; v < users; ++v) {
      out << ",user" << v;
    }
    out << ",multi,pivot,identified\n";
    for (std::size_t i = 0; i < multi.size(); ++i) {
      out << format_number(multi.x(i) / scale);
      for (const auto& r : rates) {
        out << ',' << format_number(r.value(i) / scale);
      }
      const auto& a = multi.assignments()[i];
      out << ',' << format_number(multi.value(i) / scale) << ',' << a.pivot << ',' << join_users(a.identified)
          << '\n';
    }
  }

  // Growth rate of E[G_opt]: closed form for identical users, otherwise the
  // multi-user sCGF at alpha = 1 from the rate grid.
  const bool same = homogeneous(problem);
  const double exponent =
      same ? avg_growth_exponent(renyi.front(), problem.targets, users) : scgf_multi(multi, 1.0);

  Json doc;
  doc["unit"] = options.unit();
  doc["U"] = problem.targets;
  doc["V"] = users;
  doc["grid_points"] = legendre.grid_points;
  doc["homogeneous"] = same;
  doc["users"] = Json::array();
  for (std::size_t v = 0; v < users; ++v) {
    doc["users"].push_back({{"source", source_to_json(problem.sources[v])},
                            {"shannon", renyi[v].shannon() / scale},
                            {"min_entropy", renyi[v].min_entropy() / scale},
                            {"zero_limit", renyi[v].zero_limit() / scale}});
  }
  doc["exponent"] = exponent / scale;
  doc["exponent_source"] = same ? "closed_form" : "rate_grid";
  if (config.key_length > 0) {
    doc["key_length"] = config.key_length;
    // log of the approximate average guesswork, in the output unit.
    doc["log_average_guesswork"] = static_cast<double>(config.key_length) * exponent / scale;
  }
  Json conv;
  conv["convex"] = report.convex;
  conv["worst_second_difference"] = report.worst_second_difference / scale;
  if (report.witness) {
    conv["witness_x"] = Json::array();
    for (auto i : *report.witness) {
      conv["witness_x"].push_back(multi.x(i) / scale);
    }
  }
  conv["switch_points"] = Json::array();
  for (auto i : report.switch_points) {
    const auto& before = multi.assignments()[i - 1];
    const auto& after = multi.assignments()[i];
    conv["switch_points"].push_back({{"x", multi.x(i) / scale},
                                     {"from", before.identified},
                                     {"to", after.identified}});
  }
  conv["finite_limit"] = number_or_string(multi.finite_limit() / scale);
  doc["convexity"] = conv;
  write_json(options, "report.json", doc);

  log << "exponent " << format_number(exponent / scale) << ' ' << options.unit() << " per character\n";
  if (config.key_length > 0) {
    log << "approximate average guesswork " << (options.bits ? "2^" : "e^")
        << format_number(static_cast<double>(config.key_length) * exponent / scale) << " at key length "
        << config.key_length << '\n';
  }
  log << "rate function " << (report.convex ? "convex" : "nonconvex");
  if (!report.switch_points.empty()) {
    log << ", " << report.switch_points.size() << " user switch(es), first at x="
        << format_number(multi.x(report.switch_points.front()) / scale);
  }
  log << '\n';
  return kExitOk;
}

int cmd_exact(const ProblemConfig& config, const Options& options, std::ostream& log) {
  const auto& problem = config.problem;
  problem.validate();
  std::vector<GuessworkPmf> per_user;
  std::vector<SingleUserStrategy> strategies;
  for (const auto& src : problem.sources) {
    const auto dist = enumerate_distribution(src, problem.length, options.enumeration_cap);
    per_user.push_back(single_guesswork_pmf(dist));
    strategies.push_back(optimal_single_strategy(dist));
  }
  const auto gopt = order_stat_pmf(per_user, problem.targets);
  {
    auto out = open_output(options, "gopt_pmf.csv");
    write_pmf_csv(out, gopt);
  }

  Json doc;
  doc["U"] = problem.targets;
  doc["V"] = problem.users();
  doc["k"] = problem.length;
  doc["unit"] = options.unit();
  auto add_moments = [&](const GuessworkPmf& pmf) {
    Json arr = Json::array();
    for (double alpha : config.alphas.empty() ? std::vector<double>{1.0} : config.alphas) {
      const double mom = moment(pmf, alpha);
      arr.push_back({{"alpha", alpha},
                     {"moment", mom},
                     {"scaled_log_moment", std::log(mom) / static_cast<double>(problem.length) / options.scale()}});
    }
    return arr;
  };
  doc["g_opt"] = {{"support", gopt.support_size()}, {"moments", add_moments(gopt)}};

  if (config.strategy == StrategySelector::round_robin) {
    const auto rr = round_robin_strategy(strategies);
    const auto pmf = strategy_pmf_exhaustive(rr, problem, options.exhaustive_cap, options.enumeration_cap);
    auto out = open_output(options, "round_robin_pmf.csv");
    write_pmf_csv(out, pmf);
    const auto verdict = stochastic_dominance(gopt, pmf);
    doc["round_robin"] = {{"support", pmf.support_size()},
                          {"moments", add_moments(pmf)},
                          {"g_opt_dominates", verdict.relation == Dominance::dominates ||
                                                  verdict.relation == Dominance::equal}};
  }
  write_json(options, "exact.json", doc);

  log << "P(G_opt = n):";
  for (std::size_t n = 1; n <= std::min<std::size_t>(gopt.support_size(), 8); ++n) {
    log << ' ' << format_number(gopt.mass(n));
  }
  if (gopt.support_size() > 8) {
    log << " ...";
  }
  log << "\nE[G_opt] = " << format_number(moment(gopt, 1.0)) << '\n';
  return kExitOk;
}

int cmd_simulate(const ProblemConfig& config, const Options& options, std::ostream& log) {
  SimulationConfig sim;
  sim.problem = config.problem;
  sim.strategy = config.strategy;
  sim.trials = config.trials;
  sim.seed = options.seed.value_or(config.seed);
  sim.threads = 0;
  if (!config.alphas.empty()) {
    sim.alphas = config.alphas;
  }
  sim.enumeration_cap = options.enumeration_cap;
  const auto summary = estimate_distribution(sim);
  const double scale = options.scale();
  {
    auto out = open_output(options, "histogram.csv");
    write_histogram_csv(out, summary, scale);
  }
  {
    auto out = open_output(options, "moments.csv");
    write_moments_csv(out, summary, scale);
  }
  if (summary.counts) {
    auto out = open_output(options, "empirical_pmf.csv");
    write_empirical_pmf_csv(out, summary);
  }
  auto doc = summary_to_json(summary, scale);
  doc["unit"] = options.unit();
  write_json(options, "summary.json", doc);

  log << "seed " << summary.seed << ", " << summary.trials << " trials\n";
  for (const auto& m : summary.moments) {
    log << "E[G^" << format_number(m.alpha) << "] = " << format_number(m.value) << " (log "
        << format_number(m.log_value / scale) << ' ' << options.unit() << ", relative std error "
        << format_number(m.relative_std_error) << ")\n";
  }
  return kExitOk;
}

} // namespace guesswork::cli
