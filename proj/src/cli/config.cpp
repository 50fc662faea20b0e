#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "guesswork/cli.hpp"
#include "guesswork/errors.hpp"
#include "guesswork/exact_oracle.hpp"

namespace guesswork::cli {

namespace {

// Collects schema problems so that one error reports all of them.
class Diagnostics {
public:
  void add(const std::string& where, const std::string& what) { issues_.push_back(where + ": " + what); }
  bool empty() const { return issues_.empty(); }

  [[noreturn]] void raise() const {
    std::ostringstream os;
    os << "invalid config";
    for (const auto& i : issues_) {
      os << "\n  " << i;
    }
    throw ConfigError(os.str());
  }

private:
  std::vector<std::string> issues_;
};

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where,
                Diagnostics& diag) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      diag.add(where, "unknown key \"" + key + "\"");
    }
  }
}

std::optional<double> get_number(const Json& obj, const char* key, const std::string& where,
                                 Diagnostics& diag) {
  if (!obj.contains(key)) {
    diag.add(where, std::string("missing \"") + key + "\"");
    return std::nullopt;
  }
  if (!obj[key].is_number()) {
    diag.add(where, std::string("\"") + key + "\" must be a number");
    return std::nullopt;
  }
  return obj[key].get<double>();
}

std::optional<std::uint64_t> get_count(const Json& obj, const char* key, const std::string& where,
                                       Diagnostics& diag) {
  if (!obj.contains(key)) {
    return std::nullopt;
  }
  if (!obj[key].is_number_unsigned()) {
    diag.add(where, std::string("\"") + key + "\" must be a nonnegative integer");
    return std::nullopt;
  }
  return obj[key].get<std::uint64_t>();
}

std::optional<std::vector<double>> get_vector(const Json& v, const std::string& where, Diagnostics& diag) {
  if (!v.is_array()) {
    diag.add(where, "must be an array of numbers");
    return std::nullopt;
  }
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) {
      diag.add(where, "must be an array of numbers");
      return std::nullopt;
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::optional<CharacterSource> parse_source(const Json& doc, const std::string& where, Diagnostics& diag) {
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    diag.add(where, "source must be an object with a string \"type\"");
    return std::nullopt;
  }
  const auto type = doc["type"].get<std::string>();
  try {
    if (type == "uniform") {
      check_keys(doc, {"type", "m"}, where, diag);
      const auto m = get_count(doc, "m", where, diag);
      if (!m) {
        diag.add(where, "uniform source needs integer \"m\"");
        return std::nullopt;
      }
      return IidSource::uniform(*m);
    }
    if (type == "bernoulli") {
      check_keys(doc, {"type", "p"}, where, diag);
      const auto p = get_number(doc, "p", where, diag);
      if (!p) {
        return std::nullopt;
      }
      return IidSource::bernoulli(*p);
    }
    if (type == "iid") {
      check_keys(doc, {"type", "probs"}, where, diag);
      if (!doc.contains("probs")) {
        diag.add(where, "missing \"probs\"");
        return std::nullopt;
      }
      const auto probs = get_vector(doc["probs"], where + ".probs", diag);
      if (!probs) {
        return std::nullopt;
      }
      return IidSource(*probs);
    }
    if (type == "markov") {
      check_keys(doc, {"type", "a", "b", "transition", "initial"}, where, diag);
      std::optional<std::vector<double>> initial;
      if (doc.contains("initial")) {
        initial = get_vector(doc["initial"], where + ".initial", diag);
        if (!initial) {
          return std::nullopt;
        }
      }
      if (doc.contains("transition")) {
        const auto& t = doc["transition"];
        if (!t.is_array()) {
          diag.add(where + ".transition", "must be an array of rows");
          return std::nullopt;
        }
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < t.size(); ++i) {
          auto row = get_vector(t[i], where + ".transition[" + std::to_string(i) + "]", diag);
          if (!row) {
            return std::nullopt;
          }
          rows.push_back(std::move(*row));
        }
        return MarkovSource(std::move(rows), initial);
      }
      const auto a = get_number(doc, "a", where, diag);
      const auto b = get_number(doc, "b", where, diag);
      if (!a || !b) {
        return std::nullopt;
      }
      return MarkovSource::two_state(*a, *b, initial);
    }
    diag.add(where, "unknown source type \"" + type + "\"");
  } catch (const Error& e) {
    diag.add(where, e.what());
  }
  return std::nullopt;
}

} // namespace

CharacterSource source_from_json(const Json& doc) {
  Diagnostics diag;
  auto src = parse_source(doc, "source", diag);
  if (!src || !diag.empty()) {
    diag.raise();
  }
  return *src;
}

Json source_to_json(const CharacterSource& source) {
  if (const auto* iid = std::get_if<IidSource>(&source)) {
    return Json{{"type", "iid"}, {"probs", std::vector<double>(iid->probs().begin(), iid->probs().end())}};
  }
  const auto& mk = std::get<MarkovSource>(source);
  return Json{{"type", "markov"},
              {"transition", mk.transition_matrix()},
              {"initial", std::vector<double>(mk.initial().begin(), mk.initial().end())}};
}

ProblemConfig parse_config(const Json& doc) {
  Diagnostics diag;
  ProblemConfig cfg;
  if (!doc.is_object()) {
    diag.add("config", "must be a JSON object");
    diag.raise();
  }
  check_keys(doc,
             {"sources", "U", "V", "k", "key_length", "grid", "alphas", "betas", "trials", "seed", "strategy"},
             "config", diag);

  std::vector<CharacterSource> sources;
  if (!doc.contains("sources") || !doc["sources"].is_array() || doc["sources"].empty()) {
    diag.add("config", "\"sources\" must be a nonempty array");
  } else {
    for (std::size_t i = 0; i < doc["sources"].size(); ++i) {
      auto s = parse_source(doc["sources"][i], "sources[" + std::to_string(i) + "]", diag);
      if (s) {
        sources.push_back(std::move(*s));
      }
    }
  }

  const auto u = get_count(doc, "U", "config", diag);
  const auto v = get_count(doc, "V", "config", diag);
  const auto k = get_count(doc, "k", "config", diag);
  std::size_t users = sources.size();
  if (v) {
    if (sources.size() == 1 && *v >= 1) {
      sources.resize(*v, sources.front());
      users = *v;
    } else if (*v != sources.size()) {
      diag.add("config", "\"V\" must equal the number of sources (or list one source)");
    }
  }
  cfg.problem.sources = std::move(sources);
  cfg.problem.targets = u.value_or(1);
  cfg.problem.length = k.value_or(1);
  if (cfg.problem.targets < 1 || cfg.problem.targets > users) {
    diag.add("config", "need 1 <= U <= V");
  }
  if (cfg.problem.length < 1) {
    diag.add("config", "\"k\" must be at least 1");
  }
  if (!cfg.problem.sources.empty()) {
    const auto m = alphabet_size(cfg.problem.sources.front());
    for (const auto& s : cfg.problem.sources) {
      if (alphabet_size(s) != m) {
        diag.add("sources", "all sources must share one alphabet size");
        break;
      }
    }
  }

  cfg.key_length = get_count(doc, "key_length", "config", diag).value_or(0);
  cfg.grid = get_count(doc, "grid", "config", diag).value_or(cfg.grid);
  if (cfg.grid < 3) {
    diag.add("config", "\"grid\" must be at least 3");
  }
  cfg.trials = get_count(doc, "trials", "config", diag).value_or(cfg.trials);
  if (cfg.trials < 1) {
    diag.add("config", "\"trials\" must be at least 1");
  }
  cfg.seed = get_count(doc, "seed", "config", diag).value_or(0);
  if (doc.contains("alphas")) {
    cfg.alphas = get_vector(doc["alphas"], "config.alphas", diag).value_or(std::vector<double>{});
  }
  if (doc.contains("betas")) {
    cfg.betas = get_vector(doc["betas"], "config.betas", diag).value_or(std::vector<double>{});
    for (double b : cfg.betas) {
      if (!(b > 0.0)) {
        diag.add("config.betas", "entries must be positive");
        break;
      }
    }
  }
  if (doc.contains("strategy")) {
    const auto& s = doc["strategy"];
    if (s == "g_opt") {
      cfg.strategy = StrategySelector::g_opt;
    } else if (s == "round_robin") {
      cfg.strategy = StrategySelector::round_robin;
    } else {
      diag.add("config", "\"strategy\" must be \"g_opt\" or \"round_robin\"");
    }
  }
  if (!diag.empty()) {
    diag.raise();
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

Json count_to_json(const BigCount& n) {
  if (const auto u = to_u64(n)) {
    return *u;
  }
  return to_string(n);
}

Json trace_to_json(const GuessTrace& trace) {
  Json j;
  j["strings"] = trace.strings;
  j["query_indices"] = Json::array();
  for (const auto& s : trace.query_indices) {
    j["query_indices"].push_back(count_to_json(s));
  }
  j["queries_per_user"] = Json::array();
  for (const auto& q : trace.queries_per_user) {
    j["queries_per_user"].push_back(count_to_json(q));
  }
  j["stopping_index"] = count_to_json(trace.stopping_index);
  j["total"] = count_to_json(trace.total);
  return j;
}

namespace {

// JSON has no infinity; encode non-finite values as strings.
Json number_to_json(double x) {
  if (std::isfinite(x)) {
    return x;
  }
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

} // namespace

Json summary_to_json(const EmpiricalSummary& summary, double scale) {
  Json j;
  j["seed"] = summary.seed;
  j["trials"] = summary.trials;
  j["strategy"] = summary.strategy == StrategySelector::round_robin ? "round_robin" : "g_opt";
  j["alphabet_size"] = summary.alphabet_size;
  j["length"] = summary.length;
  j["users"] = summary.users;
  j["targets"] = summary.targets;
  j["bin_width"] = summary.bin_width() / scale;
  j["histogram"] = summary.histogram;
  j["moments"] = Json::array();
  for (const auto& m : summary.moments) {
    j["moments"].push_back({{"alpha", m.alpha},
                            {"log_value", number_to_json(m.log_value / scale)},
                            {"value", number_to_json(m.value)},
                            {"std_error", number_to_json(m.std_error)},
                            {"relative_std_error", number_to_json(m.relative_std_error)}});
  }
  if (summary.strategy == StrategySelector::round_robin) {
    j["sandwich_violations"] = summary.sandwich_violations;
  }
  return j;
}

double Options::scale() const { return bits ? std::log(2.0) : 1.0; }

void apply_environment(Options& options) {
  const char* cap = std::getenv("GUESSWORK_CAP");
  if (!cap || !*cap) {
    return;
  }
  char* end = nullptr;
  errno = 0;
  const unsigned long long value = std::strtoull(cap, &end, 10);
  if (errno != 0 || *end != '\0' || value == 0 || cap[0] == '-') {
    throw ConfigError(std::string("GUESSWORK_CAP must be a positive integer, got \"") + cap + "\"");
  }
  options.enumeration_cap = value;
  options.exhaustive_cap = value;
}

} // namespace guesswork::cli
