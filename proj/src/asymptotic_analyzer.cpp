#include "guesswork/asymptotic_analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "guesswork/csv.hpp"
#include "guesswork/errors.hpp"

namespace guesswork {

namespace {

constexpr double kPowerIterationTolerance = 1e-12;
constexpr std::size_t kPowerIterationLimit = 200000;
constexpr double kGolden = 0.6180339887498949;

double log_sum_exp(std::span<const double> terms) {
  double hi = -kInfinity;
  for (double t : terms) {
    hi = std::max(hi, t);
  }
  if (hi == -kInfinity) {
    return -kInfinity;
  }
  double sum = 0.0;
  for (double t : terms) {
    sum += std::exp(t - hi);
  }
  return hi + std::log(sum);
}

// Log-weights w_ij = log T_ij (-inf for absent transitions) of an irreducible
// chain, rewritten so that tilted matrices can be formed without overflow.
//
// With lambda the maximum cycle mean of w and d a longest-path potential for
// w - lambda, the reduced weights r_ij = w_ij - lambda + d_i - d_j are <= 0
// and vanish on critical cycles. The matrix exp(beta r_ij) is diagonally
// similar to exp(beta w_ij) / exp(beta lambda), has entries in [0, 1] and a
// Perron root in [1, m].
struct TiltedChain {
  std::size_t m = 0;
  double max_cycle_mean = 0.0;
  std::vector<double> reduced;

  explicit TiltedChain(std::size_t states, std::vector<double> weights) : m(states) {
    max_cycle_mean = karp_max_cycle_mean(weights);
    std::vector<double> d(m, 0.0);
    for (std::size_t round = 0; round < m; ++round) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const double w = weights[i * m + j];
          if (w > -kInfinity) {
            d[j] = std::max(d[j], d[i] + w - max_cycle_mean);
          }
        }
      }
    }
    reduced.assign(m * m, -kInfinity);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double w = weights[i * m + j];
        if (w > -kInfinity) {
          reduced[i * m + j] = std::min(0.0, w - max_cycle_mean + d[i] - d[j]);
        }
      }
    }
  }

  // Karp's theorem with every vertex as a start: walks of exactly k edges.
  double karp_max_cycle_mean(const std::vector<double>& w) const {
    std::vector<std::vector<double>> best(m + 1, std::vector<double>(m, -kInfinity));
    std::fill(best[0].begin(), best[0].end(), 0.0);
    for (std::size_t k = 1; k <= m; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        if (best[k - 1][i] == -kInfinity) {
          continue;
        }
        for (std::size_t j = 0; j < m; ++j) {
          if (w[i * m + j] > -kInfinity) {
            best[k][j] = std::max(best[k][j], best[k - 1][i] + w[i * m + j]);
          }
        }
      }
    }
    double result = -kInfinity;
    for (std::size_t v = 0; v < m; ++v) {
      if (best[m][v] == -kInfinity) {
        continue;
      }
      double worst = kInfinity;
      for (std::size_t k = 0; k < m; ++k) {
        if (best[k][v] > -kInfinity) {
          worst = std::min(worst, (best[m][v] - best[k][v]) / static_cast<double>(m - k));
        }
      }
      result = std::max(result, worst);
    }
    return result;
  }

  // log of the spectral radius of exp(beta * w), by power iteration on the
  // shifted reduced matrix exp(beta r) + I, stopped when the Collatz-Wielandt
  // bounds agree to kPowerIterationTolerance.
  double log_spectral_radius(double beta) const {
    std::vector<double> b(m * m, 0.0);
    for (std::size_t i = 0; i < m * m; ++i) {
      if (reduced[i] > -kInfinity) {
        b[i] = std::exp(beta * reduced[i]);
      }
    }
    std::vector<double> x(m, 1.0);
    std::vector<double> y(m);
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t iter = 0; iter < kPowerIterationLimit; ++iter) {
      for (std::size_t i = 0; i < m; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < m; ++j) {
          s += b[i * m + j] * x[j];
        }
        y[i] = s;
      }
      lo = kInfinity;
      hi = 0.0;
      double norm = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double r = y[i] / x[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        norm = std::max(norm, y[i]);
      }
      if (hi - lo <= kPowerIterationTolerance * lo) {
        return beta * max_cycle_mean + std::log(0.5 * (lo + hi) - 1.0);
      }
      for (std::size_t i = 0; i < m; ++i) {
        // Keep entries strictly positive so the ratio bounds stay defined.
        x[i] = std::max(y[i] / norm, 1e-300);
      }
    }
    std::ostringstream os;
    os << "power iteration for the tilted transition matrix did not converge (beta=" << beta
       << ", bounds [" << lo << ", " << hi << "] after " << kPowerIterationLimit << " iterations)";
    throw NumericError(os.str());
  }
};

std::vector<double> transition_log_weights(const MarkovSource& source) {
  const std::size_t m = source.alphabet_size();
  std::vector<double> w(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double p = source.transition(i, j);
      w[i * m + j] = p > 0.0 ? std::log(p) : -kInfinity;
    }
  }
  return w;
}

std::vector<double> adjacency_weights(const MarkovSource& source) {
  const std::size_t m = source.alphabet_size();
  std::vector<double> w(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      w[i * m + j] = source.transition(i, j) > 0.0 ? 0.0 : -kInfinity;
    }
  }
  return w;
}

void require_irreducible(const MarkovSource& source) {
  if (!source.is_irreducible()) {
    throw DomainError("specific Renyi entropy needs an irreducible Markov chain");
  }
}

void check_beta(double beta) {
  if (std::isnan(beta) || beta <= 0.0) {
    throw DomainError("Renyi parameter beta must be positive");
  }
}

double iid_shannon(const IidSource& source) {
  double h = 0.0;
  for (double p : source.probs()) {
    if (p > 0.0) {
      h -= p * std::log(p);
    }
  }
  return h;
}

double iid_zero_limit(const IidSource& source) {
  const auto support = std::count_if(source.probs().begin(), source.probs().end(),
                                     [](double p) { return p > 0.0; });
  return std::log(static_cast<double>(support));
}

double markov_shannon(const MarkovSource& source) {
  const auto pi = source.stationary();
  const std::size_t m = source.alphabet_size();
  double h = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double p = source.transition(i, j);
      if (p > 0.0) {
        row -= p * std::log(p);
      }
    }
    h += pi[i] * row;
  }
  return h;
}

bool is_convex_on_finite_region(std::span<const double> values, double* worst = nullptr,
                                std::size_t* worst_at = nullptr) {
  double min_diff = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (!std::isfinite(values[i - 1]) || !std::isfinite(values[i]) || !std::isfinite(values[i + 1])) {
      continue;
    }
    const double d = values[i - 1] - 2.0 * values[i] + values[i + 1];
    if (d < min_diff) {
      min_diff = d;
      at = i;
    }
  }
  if (worst) {
    *worst = min_diff;
  }
  if (worst_at) {
    *worst_at = at;
  }
  return min_diff >= -kConvexityTolerance;
}

} // namespace

// ---------------------------------------------------------------------------
// Renyi entropy

RenyiCurve::RenyiCurve(std::function<double(double)> evaluator, double shannon, double min_entropy,
                       double zero_limit, std::size_t alphabet_size)
    : evaluator_(std::move(evaluator)),
      shannon_(shannon),
      min_entropy_(min_entropy),
      zero_limit_(zero_limit),
      m_(alphabet_size) {}

double RenyiCurve::operator()(double beta) const {
  check_beta(beta);
  if (std::isinf(beta)) {
    return min_entropy_;
  }
  if (std::abs(beta - 1.0) < kShannonGuardBand) {
    return shannon_;
  }
  return evaluator_(beta);
}

double RenyiCurve::log_alphabet() const { return std::log(static_cast<double>(m_)); }

double renyi_iid(const IidSource& source, double beta) {
  check_beta(beta);
  // Equiprobable support: every order is log of the support size exactly.
  std::size_t live_groups = 0;
  std::size_t support = 0;
  for (const auto& g : source.groups()) {
    if (g.probability > 0.0) {
      ++live_groups;
      support = g.size;
    }
  }
  if (live_groups == 1) {
    return std::log(static_cast<double>(support));
  }
  if (std::isinf(beta)) {
    return -std::log(source.max_probability());
  }
  if (std::abs(beta - 1.0) < kShannonGuardBand) {
    return iid_shannon(source);
  }
  std::vector<double> terms;
  for (double p : source.probs()) {
    if (p > 0.0) {
      terms.push_back(beta * std::log(p));
    }
  }
  return log_sum_exp(terms) / (1.0 - beta);
}

double renyi_markov(const MarkovSource& source, double beta) {
  check_beta(beta);
  require_irreducible(source);
  if (std::abs(beta - 1.0) < kShannonGuardBand && !std::isinf(beta)) {
    return markov_shannon(source);
  }
  const TiltedChain chain(source.alphabet_size(), transition_log_weights(source));
  if (std::isinf(beta)) {
    return -chain.max_cycle_mean;
  }
  return chain.log_spectral_radius(beta) / (1.0 - beta);
}

double renyi_markov_two_state(double a, double b, double beta) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    throw DomainError("two-state Markov parameters a, b must lie in (0, 1)");
  }
  check_beta(beta);
  if (std::isinf(beta) || beta == 1.0) {
    throw DomainError("two-state closed form needs finite beta != 1");
  }
  const double p = std::pow(1.0 - a, beta);
  const double q = std::pow(1.0 - b, beta);
  const double root = std::sqrt((p - q) * (p - q) + 4.0 * std::pow(a * b, beta));
  return std::log(0.5 * (p + q + root)) / (1.0 - beta);
}

RenyiCurve renyi_curve(const IidSource& source) {
  return RenyiCurve([source](double beta) { return renyi_iid(source, beta); }, renyi_iid(source, 1.0),
                    renyi_iid(source, kInfinity), iid_zero_limit(source), source.alphabet_size());
}

RenyiCurve renyi_curve(const MarkovSource& source) {
  require_irreducible(source);
  const std::size_t m = source.alphabet_size();
  auto chain = std::make_shared<const TiltedChain>(m, transition_log_weights(source));
  const TiltedChain adjacency(m, adjacency_weights(source));
  return RenyiCurve(
      [chain](double beta) { return chain->log_spectral_radius(beta) / (1.0 - beta); },
      markov_shannon(source), -chain->max_cycle_mean, adjacency.log_spectral_radius(1.0), m);
}

RenyiCurve renyi_curve(const CharacterSource& source) {
  return std::visit([](const auto& s) { return renyi_curve(s); }, source);
}

// ---------------------------------------------------------------------------
// sCGF and rate functions

double Scgf::operator()(double alpha) const { return scgf_single(renyi_, alpha); }

double scgf_single(const RenyiCurve& renyi, double alpha) {
  if (alpha <= -1.0) {
    return -renyi.min_entropy();
  }
  if (alpha == 0.0) {
    return 0.0;
  }
  return alpha * renyi(1.0 / (1.0 + alpha));
}

RateCurve::RateCurve(double x_max, std::vector<double> values, double zero_point, double finite_limit,
                     std::vector<UserAssignment> assignments)
    : x_max_(x_max),
      values_(std::move(values)),
      zero_point_(zero_point),
      finite_limit_(finite_limit),
      assignments_(std::move(assignments)) {
  if (values_.size() < 3) {
    throw ConfigError("rate curve grid needs at least 3 points");
  }
  if (!assignments_.empty() && assignments_.size() != values_.size()) {
    throw ConfigError("rate curve assignments must match the grid");
  }
  convex_ = is_convex_on_finite_region(values_);
}

double RateCurve::x(std::size_t i) const {
  if (i + 1 == values_.size()) {
    return x_max_;
  }
  return x_max_ * static_cast<double>(i) / static_cast<double>(values_.size() - 1);
}

double RateCurve::value_at(double x) const {
  const double slack = 1e-12 * std::max(1.0, x_max_);
  if (x > finite_limit_ + slack || x > x_max_ + slack) {
    return kInfinity;
  }
  x = std::clamp(x, 0.0, x_max_);
  const double pos = x / step();
  auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values_.size()) {
    return values_.back();
  }
  const double t = pos - static_cast<double>(i);
  const double left = values_[i];
  const double right = values_[i + 1];
  if (std::isfinite(left) && std::isfinite(right)) {
    return left + t * (right - left);
  }
  if (std::isfinite(left)) {
    if (t == 0.0) {
      return left;
    }
    // Between the last finite grid point and finite_limit().
    if (i > 0 && std::isfinite(values_[i - 1])) {
      return std::max(0.0, left + t * (left - values_[i - 1]));
    }
    return left;
  }
  return kInfinity;
}

bool RateCurve::same_grid(const RateCurve& other) const {
  return size() == other.size() && std::abs(x_max_ - other.x_max_) <= 1e-15 * std::max(1.0, x_max_);
}

RateCurve rate_single(const Scgf& scgf, const LegendreOptions& options) {
  const auto& renyi = scgf.renyi();
  const std::size_t n = options.grid_points;
  if (n < 3) {
    throw ConfigError("rate curve grid needs at least 3 points");
  }
  const double x_max = renyi.log_alphabet();
  const double finite_limit = renyi.zero_limit();
  const double lo_alpha = -1.0;
  const double hi_alpha = options.alpha_max;

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? x_max : x_max * static_cast<double>(i) / static_cast<double>(n - 1);
    if (x > finite_limit * (1.0 + 1e-12) + 1e-15) {
      values[i] = kInfinity;
      continue;
    }
    // The objective is linear with slope x >= 0 for alpha <= -1, so the
    // supremum over the reals equals the supremum over [-1, alpha_max].
    auto objective = [&](double alpha) { return x * alpha - scgf(alpha); };
    double a = lo_alpha;
    double b = hi_alpha;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    while (b - a > options.tolerance) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - kGolden * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + kGolden * (b - a);
        fd = objective(d);
      }
    }
    const double best = std::max({objective(0.5 * (a + b)), fc, fd, objective(lo_alpha),
                                  objective(hi_alpha), 0.0});
    if (!std::isfinite(best)) {
      std::ostringstream os;
      os << "Legendre transform failed at x=" << x << " (alpha bracket [" << a << ", " << b << "])";
      throw NumericError(os.str());
    }
    values[i] = best;
  }
  return RateCurve(x_max, std::move(values), renyi.shannon(), finite_limit);
}

std::pair<RateCurve, RateCurve> delta_gamma(const RateCurve& rate, double shannon) {
  std::vector<double> delta(rate.size());
  std::vector<double> gamma(rate.size());
  for (std::size_t i = 0; i < rate.size(); ++i) {
    const double x = rate.x(i);
    delta[i] = x <= shannon ? rate.value(i) : 0.0;
    gamma[i] = x >= shannon ? rate.value(i) : 0.0;
  }
  return {RateCurve(rate.x_max(), std::move(delta), shannon, rate.x_max()),
          RateCurve(rate.x_max(), std::move(gamma), shannon, rate.finite_limit())};
}

RateCurve rate_multi(std::span<const RateCurve> rates, std::size_t targets, AssignmentRule rule) {
  const std::size_t users = rates.size();
  if (users == 0 || targets < 1 || targets > users) {
    throw DomainError("multi-user rate function needs 1 <= U <= V");
  }
  for (const auto& r : rates) {
    if (!r.same_grid(rates.front())) {
      throw ConfigError("multi-user rate function needs all users on one grid");
    }
  }
  const auto& grid = rates.front();
  const std::size_t n = grid.size();

  std::vector<RateCurve> deltas;
  std::vector<RateCurve> gammas;
  for (const auto& r : rates) {
    auto [d, g] = delta_gamma(r, r.zero_point());
    deltas.push_back(std::move(d));
    gammas.push_back(std::move(g));
  }

  const bool minimize = rule == AssignmentRule::infimum;
  std::vector<double> values(n);
  std::vector<UserAssignment> assignments(n);
  std::vector<std::size_t> others;
  others.reserve(users);
  for (std::size_t i = 0; i < n; ++i) {
    double best = minimize ? kInfinity : -kInfinity;
    UserAssignment best_assignment;
    bool have = false;
    for (std::size_t pivot = 0; pivot < users; ++pivot) {
      others.clear();
      for (std::size_t v = 0; v < users; ++v) {
        if (v != pivot) {
          others.push_back(v);
        }
      }
      // Contributions are separable: move the U-1 users with the most
      // favorable delta - gamma into the identified group. delta is always
      // finite, so the key is finite or -inf and never NaN.
      auto key = [&](std::size_t v) { return deltas[v].value(i) - gammas[v].value(i); };
      std::stable_sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return minimize ? key(a) < key(b) : key(a) > key(b);
      });
      double total = rates[pivot].value(i);
      UserAssignment assignment{pivot, {pivot}};
      for (std::size_t j = 0; j < others.size(); ++j) {
        if (j + 1 < targets) {
          total += deltas[others[j]].value(i);
          assignment.identified.push_back(others[j]);
        } else {
          total += gammas[others[j]].value(i);
        }
      }
      std::sort(assignment.identified.begin(), assignment.identified.end());
      const bool better = minimize ? total < best : total > best;
      if (!have || better) {
        best = total;
        best_assignment = std::move(assignment);
        have = true;
      }
    }
    values[i] = best;
    assignments[i] = std::move(best_assignment);
  }

  // Finite iff some V-U+1 users (pivot plus unidentified) have finite rate at
  // x: the U-th smallest per-user finite limit.
  std::vector<double> limits;
  for (const auto& r : rates) {
    limits.push_back(r.finite_limit());
  }
  std::sort(limits.begin(), limits.end());
  const double finite_limit = limits[targets - 1];

  std::size_t argmin = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (values[i] < values[argmin]) {
      argmin = i;
    }
  }
  return RateCurve(grid.x_max(), std::move(values), grid.x(argmin), finite_limit,
                   std::move(assignments));
}

double scgf_multi(const RateCurve& rate, double alpha) {
  double best = -kInfinity;
  for (std::size_t i = 0; i < rate.size(); ++i) {
    if (std::isfinite(rate.value(i))) {
      best = std::max(best, alpha * rate.x(i) - rate.value(i));
    }
  }
  return best;
}

double avg_growth_exponent(const RenyiCurve& renyi, std::size_t targets, std::size_t users) {
  if (targets < 1 || targets > users) {
    throw DomainError("average growth exponent needs 1 <= U <= V");
  }
  const double excess = static_cast<double>(users - targets);
  return renyi((excess + 1.0) / (excess + 2.0));
}

ConvexityReport convexity_report(const RateCurve& rate) {
  ConvexityReport report;
  std::size_t at = 0;
  report.convex = is_convex_on_finite_region(rate.values(), &report.worst_second_difference, &at);
  if (!report.convex) {
    report.witness = std::array<std::size_t, 3>{at - 1, at, at + 1};
  }
  report.assignments = rate.assignments();
  for (std::size_t i = 1; i < report.assignments.size(); ++i) {
    if (!std::isfinite(rate.value(i))) {
      break;
    }
    if (report.assignments[i].identified != report.assignments[i - 1].identified) {
      report.switch_points.push_back(i);
    }
  }
  return report;
}

double log_pmf_approx(const RateCurve& rate, std::size_t k, double log_n) {
  if (k == 0 || log_n < 0.0) {
    throw DomainError("pmf approximation needs k >= 1 and n >= 1");
  }
  const double x = log_n / static_cast<double>(k);
  const double value = rate.value_at(x);
  if (!std::isfinite(value)) {
    return -kInfinity;
  }
  return -static_cast<double>(k) * value - log_n;
}

double pmf_approx(const RateCurve& rate, std::size_t k, std::uint64_t n) {
  if (n == 0) {
    throw DomainError("pmf approximation needs n >= 1");
  }
  return std::exp(log_pmf_approx(rate, k, std::log(static_cast<double>(n))));
}

void write_rate_csv(std::ostream& os, const RateCurve& rate, double scale) {
  os << "x,value\n";
  for (std::size_t i = 0; i < rate.size(); ++i) {
    os << format_number(rate.x(i) / scale) << ',' << format_number(rate.value(i) / scale) << '\n';
  }
}

} // namespace guesswork
