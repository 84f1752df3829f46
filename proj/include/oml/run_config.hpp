#pragma once

// Experiment configuration (flat key=value file) and sweep CSV output.

#include "oml/rational.hpp"
#include "oml/selector.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace oml {

struct RunConfig {
  std::string mode = "symmetric";
  std::string algo = "greedy";
  int k = 3;
  Rational eps = pow2(-20);
  Rational budget{1 << 20};
  int trials = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string instance;
  std::string suite = "all";
  int k_min = 0;  // sweep range; 0 means "use k"
  int k_max = 0;
  std::vector<std::string> algos;

  bool operator==(const RunConfig&) const = default;
};

inline const std::vector<std::string>& config_modes() {
  static const std::vector<std::string> modes{"symmetric", "adaptive", "randomized"};
  return modes;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::string join_list(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

/// Checks ranges and selector strings; throws UsageError.
inline void validate(const RunConfig& c) {
  if (std::find(config_modes().begin(), config_modes().end(), c.mode) == config_modes().end()) {
    throw UsageError("unknown mode '" + c.mode + "'");
  }
  parse_selector(c.algo);
  for (const auto& a : c.algos) parse_selector(a);
  if (c.k < 1) throw UsageError("k must be >= 1");
  if (c.eps <= 0) throw UsageError("eps must be positive");
  if (c.budget <= 0) throw UsageError("budget must be positive");
  if (c.trials < 1) throw UsageError("trials must be >= 1");
  if ((c.k_min == 0) != (c.k_max == 0) || c.k_min < 0 || c.k_max < c.k_min) {
    throw UsageError("k-range must satisfy 1 <= k_min <= k_max");
  }
}

inline std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "mode=" << c.mode << "\n";
  o << "algo=" << c.algo << "\n";
  o << "k=" << c.k << "\n";
  o << "eps=" << to_string(c.eps) << "\n";
  o << "budget=" << to_string(c.budget) << "\n";
  o << "trials=" << c.trials << "\n";
  o << "seed=" << c.seed << "\n";
  o << "out=" << c.out << "\n";
  o << "instance=" << c.instance << "\n";
  o << "suite=" << c.suite << "\n";
  o << "k_min=" << c.k_min << "\n";
  o << "k_max=" << c.k_max << "\n";
  o << "algos=" << join_list(c.algos) << "\n";
  return o.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<Int>(x);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

}  // namespace detail

/// Applies one key=value setting. Throws UsageError on unknown keys.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto rational = [&](const std::string& v) {
    try {
      return parse_rational(v);
    } catch (const ParseError& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  };
  if (key == "mode") c.mode = value;
  else if (key == "algo") c.algo = value;
  else if (key == "k") c.k = detail::parse_integer<int>(key, value);
  else if (key == "eps") c.eps = rational(value);
  else if (key == "budget") c.budget = rational(value);
  else if (key == "trials") c.trials = detail::parse_integer<int>(key, value);
  else if (key == "seed") c.seed = detail::parse_integer<std::uint64_t>(key, value);
  else if (key == "out") c.out = value;
  else if (key == "instance") c.instance = value;
  else if (key == "suite") c.suite = value;
  else if (key == "k_min") c.k_min = detail::parse_integer<int>(key, value);
  else if (key == "k_max") c.k_max = detail::parse_integer<int>(key, value);
  else if (key == "algos") c.algos = split_list(value);
  else throw UsageError("unknown config key '" + key + "'");
}

/// Parses key=value lines; blank lines and lines starting with '#' are skipped.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline RunConfig read_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// Results

struct ResultRow {
  std::string mode;
  std::string algorithm;
  int k = 0;
  Rational eps;
  std::optional<Rational> ratio;  // exact, deterministic runs
  std::optional<Rational> bound;
  int trials = 1;
  double mean = 0;
  double stderr_ = 0;
  std::string status = "ok";

  double plot_value() const { return ratio ? to_double(*ratio) : mean; }
};

inline const char* kCsvHeader = "mode,algorithm,k,eps,ratio_num,ratio_den,bound_num,bound_den,trials,mean,stderr,status";

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string fraction_fields(const std::optional<Rational>& q) {
  if (!q) return ",";
  return q->get_num().get_str() + "," + q->get_den().get_str();
}

}  // namespace detail

inline std::string csv_row(const ResultRow& r) {
  std::ostringstream o;
  o << detail::csv_field(r.mode) << ',' << detail::csv_field(r.algorithm) << ',' << r.k << ','
    << to_string(r.eps) << ',' << detail::fraction_fields(r.ratio) << ',' << detail::fraction_fields(r.bound) << ','
    << r.trials << ',' << to_decimal(r.mean) << ',' << to_decimal(r.stderr_) << ','
    << detail::csv_field(r.status);
  return o.str();
}

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.algorithm, a.k) < std::tie(b.algorithm, b.k);
  });
}

inline std::string csv_document(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

/// Two-column (k, ratio) data per algorithm, rows sorted by k. Failed cells are skipped.
inline std::map<std::string, std::string> plot_documents(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::map<std::string, std::string> out;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    out[r.algorithm] += std::to_string(r.k) + " " + to_decimal(r.plot_value()) + "\n";
  }
  return out;
}

/// File-name-safe form of a selector ("tnet:3" -> "tnet_3").
inline std::string file_stem(const std::string& selector) {
  std::string s = selector;
  for (char& ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  }
  return s;
}

}  // namespace oml
