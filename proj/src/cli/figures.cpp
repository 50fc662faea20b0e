#include <cmath>
#include <fstream>
#include <ostream>

#include "guesswork/cli.hpp"
#include "guesswork/csv.hpp"
#include "guesswork/errors.hpp"

namespace guesswork::cli {

namespace {

constexpr std::size_t kMaxExcess = 8;

std::vector<ExponentRow> exponent_rows(const std::vector<double>& ps) {
  std::vector<ExponentRow> rows;
  for (double p : ps) {
    const auto renyi = renyi_curve(IidSource::bernoulli(p));
    for (std::size_t excess = 0; excess <= kMaxExcess; ++excess) {
      rows.push_back({p, excess, avg_growth_exponent(renyi, 1, excess + 1)});
    }
  }
  return rows;
}

std::ofstream open_figure(const Options& options, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  const auto path = options.out_dir / name;
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  return out;
}

} // namespace

std::vector<ExponentRow> fig1_left_rows() { return exponent_rows({0.1, 0.2, 0.3, 0.4, 0.5}); }

std::vector<ExponentRow> fig1_right_rows() { return exponent_rows({0.25}); }

std::vector<double> fig2_byte_probs() { return {0.55, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05}; }

Fig2Data fig2_data(std::size_t grid_points) {
  LegendreOptions opts;
  opts.grid_points = grid_points;
  const IidSource bits({0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const IidSource bytes(fig2_byte_probs());
  auto r1 = rate_single(Scgf(renyi_curve(bits)), opts);
  auto r2 = rate_single(Scgf(renyi_curve(bytes)), opts);
  std::vector<RateCurve> both = {r1, r2};
  auto multi = rate_multi(both, 1);
  return {std::move(r1), std::move(r2), std::move(multi)};
}

std::vector<Fig3Row> fig3_rows(std::size_t n) {
  std::vector<Fig3Row> rows;
  rows.reserve(n * n);
  const double denom = static_cast<double>(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const double a = static_cast<double>(i) / denom;
      const double b = static_cast<double>(j) / denom;
      const auto src = MarkovSource::two_state(a, b);
      rows.push_back({a, b, renyi_markov(src, 0.5) - renyi_markov(src, 1.0)});
    }
  }
  return rows;
}

void write_figure(const std::string& which, const Options& options, std::ostream& log) {
  const double scale = options.scale();
  if (which == "fig1-left") {
    auto out = open_figure(options, "fig1_left.csv");
    out << "p,excess,exponent\n";
    for (const auto& r : fig1_left_rows()) {
      out << format_number(r.p) << ',' << r.excess << ',' << format_number(r.exponent / scale) << '\n';
    }
  } else if (which == "fig1-right") {
    auto out = open_figure(options, "fig1_right.csv");
    out << "excess,log_average_guesswork,key_length\n";
    for (const auto& r : fig1_right_rows()) {
      out << r.excess << ','
          << format_number(static_cast<double>(kFig1RightKeyLength) * r.exponent / scale) << ','
          << kFig1RightKeyLength << '\n';
    }
  } else if (which == "fig2") {
    const auto data = fig2_data(options.grid.value_or(2048));
    auto out = open_figure(options, "fig2.csv");
    out << "x,rate_bits_user,rate_bytes_user,multi\n";
    for (std::size_t i = 0; i < data.multi.size(); ++i) {
      out << format_number(data.multi.x(i) / scale) << ',' << format_number(data.uniform_bits.value(i) / scale)
          << ',' << format_number(data.bytes.value(i) / scale) << ',' << format_number(data.multi.value(i) / scale)
          << '\n';
    }
  } else if (which == "fig3") {
    auto out = open_figure(options, "fig3.csv");
    out << "a,b,difference\n";
    for (const auto& r : fig3_rows()) {
      out << format_number(r.a) << ',' << format_number(r.b) << ',' << format_number(r.difference / scale) << '\n';
    }
  } else {
    throw ConfigError("unknown figure \"" + which + "\" (expected fig1-left, fig1-right, fig2, fig3 or all)");
  }
  log << "wrote " << which << " to " << options.out_dir.string() << '\n';
}

int cmd_figures(const std::string& which, const Options& options, std::ostream& log) {
  if (which == "all") {
    for (const char* w : {"fig1-left", "fig1-right", "fig2", "fig3"}) {
      write_figure(w, options, log);
    }
  } else {
    write_figure(which, options, log);
  }
  return kExitOk;
}

} // namespace guesswork::cli
