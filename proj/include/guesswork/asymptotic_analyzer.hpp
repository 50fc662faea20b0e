#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "guesswork/source_models.hpp"

namespace guesswork {

// All quantities in this header use natural logarithms. Conversion to bits
// happens at the presentation layer.

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// |beta - 1| below this is evaluated with the Shannon formula.
inline constexpr double kShannonGuardBand = 1e-6;

/// Specific Renyi entropy beta -> R(beta) of a character source, for beta in
/// (0, inf]. Pass kInfinity for the min-entropy.
class RenyiCurve {
public:
  RenyiCurve(std::function<double(double)> evaluator, double shannon, double min_entropy,
             double zero_limit, std::size_t alphabet_size);

  /// Throws DomainError for beta <= 0 or NaN.
  double operator()(double beta) const;

  double shannon() const { return shannon_; }
  double min_entropy() const { return min_entropy_; }
  /// R(0+): log of the effective alphabet (i.i.d.) or topological entropy (Markov).
  double zero_limit() const { return zero_limit_; }
  std::size_t alphabet_size() const { return m_; }
  double log_alphabet() const;

private:
  std::function<double(double)> evaluator_;
  double shannon_;
  double min_entropy_;
  double zero_limit_;
  std::size_t m_;
};

double renyi_iid(const IidSource& source, double beta);
/// Throws DomainError for a reducible chain.
double renyi_markov(const MarkovSource& source, double beta);
/// Closed form for the chain [[1-a, a], [b, 1-b]]; beta != 1, finite.
double renyi_markov_two_state(double a, double b, double beta);

RenyiCurve renyi_curve(const IidSource& source);
RenyiCurve renyi_curve(const MarkovSource& source);
RenyiCurve renyi_curve(const CharacterSource& source);

/// Single-user scaled cumulant generating function
/// alpha -> alpha R(1/(1+alpha)) for alpha > -1, -R(inf) otherwise.
class Scgf {
public:
  explicit Scgf(RenyiCurve renyi) : renyi_(std::move(renyi)) {}
  double operator()(double alpha) const;
  const RenyiCurve& renyi() const { return renyi_; }

private:
  RenyiCurve renyi_;
};

double scgf_single(const RenyiCurve& renyi, double alpha);

/// Users identified by scale x in the minimizing assignment: the pivot (last
/// identified) and the U-1 users identified before it.
struct UserAssignment {
  std::size_t pivot = 0;
  std::vector<std::size_t> identified; // sorted, includes pivot

  friend bool operator==(const UserAssignment&, const UserAssignment&) = default;
};

/// Rate function sampled on the uniform grid x_i = i * x_max / (n - 1),
/// x_max = log m. Values are >= 0 and may be +inf.
class RateCurve {
public:
  /// `finite_limit` is the right end of the effective domain: the curve is
  /// +inf for x beyond it.
  RateCurve(double x_max, std::vector<double> values, double zero_point, double finite_limit,
            std::vector<UserAssignment> assignments = {});

  std::size_t size() const { return values_.size(); }
  double x_max() const { return x_max_; }
  double step() const { return x_max_ / static_cast<double>(values_.size() - 1); }
  double x(std::size_t i) const;
  double value(std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  /// Where the curve attains zero (R(1) for a single user).
  double zero_point() const { return zero_point_; }
  double finite_limit() const { return finite_limit_; }
  bool is_convex() const { return convex_; }
  bool has_assignments() const { return !assignments_.empty(); }
  const std::vector<UserAssignment>& assignments() const { return assignments_; }

  /// Linear interpolation on the grid; +inf past finite_limit(). Between the
  /// last finite grid point and finite_limit() the last finite segment is
  /// extended.
  double value_at(double x) const;

  bool same_grid(const RateCurve& other) const;

private:
  double x_max_;
  std::vector<double> values_;
  double zero_point_;
  double finite_limit_;
  std::vector<UserAssignment> assignments_;
  bool convex_;
};

struct LegendreOptions {
  std::size_t grid_points = 2048;
  double alpha_max = 64.0;
  /// Golden-section tolerance on alpha.
  double tolerance = 1e-10;
};

/// Numeric Legendre-Fenchel transform of a single-user sCGF on [0, log m].
/// Throws NumericError if the inner maximization yields a non-finite value.
RateCurve rate_single(const Scgf& scgf, const LegendreOptions& options = {});

/// delta(x) = rate(x) for x <= R(1) else 0; gamma(x) = rate(x) for x >= R(1)
/// else 0.
std::pair<RateCurve, RateCurve> delta_gamma(const RateCurve& rate, double shannon);

/// How per-user contributions are combined across user assignments.
/// `infimum` is the contraction-principle form and the default; `literal_max`
/// takes the maximum over assignments instead and exists for comparison only.
enum class AssignmentRule { infimum, literal_max };

/// Multi-user rate function I(U, V, x) from V single-user rate curves sharing a
/// grid (each curve's zero_point() is taken as that user's Shannon entropy).
/// Throws ConfigError on a grid mismatch and DomainError unless 1 <= U <= V.
RateCurve rate_multi(std::span<const RateCurve> rates, std::size_t targets,
                     AssignmentRule rule = AssignmentRule::infimum);

/// sup over grid x of (alpha x - I(x)).
double scgf_multi(const RateCurve& rate, double alpha);

/// R((V-U+1)/(V-U+2)), the growth rate of E[G_opt] for homogeneous users.
double avg_growth_exponent(const RenyiCurve& renyi, std::size_t targets, std::size_t users);

struct ConvexityReport {
  bool convex = true;
  /// Most negative second difference on the finite region.
  double worst_second_difference = 0.0;
  /// Grid indices (i-1, i, i+1) of that second difference, when nonconvex.
  std::optional<std::array<std::size_t, 3>> witness;
  /// Per grid point, the minimizing assignment (multi-user curves only).
  std::vector<UserAssignment> assignments;
  /// Grid indices where the identified set differs from the previous point.
  std::vector<std::size_t> switch_points;
};

inline constexpr double kConvexityTolerance = 1e-8;

ConvexityReport convexity_report(const RateCurve& rate);

/// (1/n) exp(-k I((1/k) log n)); zero where the rate is +inf or n exceeds m^k.
double pmf_approx(const RateCurve& rate, std::size_t k, std::uint64_t n);
/// Natural log of pmf_approx for n = exp(log_n); -inf where it vanishes.
double log_pmf_approx(const RateCurve& rate, std::size_t k, double log_n);

/// CSV "x,value" with x and value divided by `scale` (log(2) for bits).
void write_rate_csv(std::ostream& os, const RateCurve& rate, double scale = 1.0);

} // namespace guesswork
