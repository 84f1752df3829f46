#pragma once

// Closed forms, bounds and lemmas for the lower-bound constructions, and
// exact free-server distributions for randomized local rules.
//
// Ledgers are 1-indexed in the formulas below: x[0] holds x_1.

#include "oml/adversary.hpp"
#include "oml/algorithms.hpp"

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace oml {

namespace detail {

// (sum_i w_i * i) and (sum_i w_i) for w_i = x_i 2^-i over the first `upto` levels.
struct WeightedSums {
  Rational weighted{0};
  Rational mass{0};
};

inline WeightedSums dyadic_sums(std::span<const Rational> x, std::size_t upto) {
  WeightedSums s;
  for (std::size_t i = 1; i <= upto; ++i) {
    const Rational w = x[i - 1] * pow2(-static_cast<long>(i));
    s.weighted += w * static_cast<long>(i);
    s.mass += w;
  }
  return s;
}

inline void require_nonnegative(std::span<const Rational> x, const char* who) {
  for (const auto& v : x) {
    if (v < 0) throw std::invalid_argument(std::string(who) + ": negative ledger entry");
  }
}

}  // namespace detail

/// k - (sum x_i 2^-i i) / (sum x_i 2^-i), k = |x|.
inline Rational ratio_bound_deterministic(std::span<const Rational> x) {
  detail::require_nonnegative(x, "ratio_bound_deterministic");
  const auto s = detail::dyadic_sums(x, x.size());
  if (s.mass == 0) throw std::invalid_argument("ratio_bound_deterministic: all-zero ledger");
  return Rational(static_cast<long>(x.size())) - s.weighted / s.mass;
}

/// Exact ALG/OPT of the fixed symmetric instance with unit gaps:
/// sum 2^(k-i) (2^i - 1) / sum 2^(k-i) = (k 2^k - 2^k + 1) / (2^k - 1).
inline Rational theorem1_ratio(int k) {
  if (k < 1) throw std::invalid_argument("theorem1_ratio: k must be >= 1");
  const Rational p = pow2(k);
  return (Rational(k) * p - p + 1) / (p - 1);
}

/// The lower bound k - 2^-k stated for the symmetric construction.
inline Rational theorem1_claimed_bound(int k) { return Rational(k) - pow2(-k); }

struct AlgCostForms {
  Rational double_sum;         // sum_i 2^(k-i) sum_{j<=i} 2^(i-j) x_j
  Rational printed_closed;     // sum_i x_i (2^(k+1-i) - 1)(k+1-i)
  Rational regrouped_closed;   // sum_j x_j 2^(k-j) (k+1-j), equal to double_sum
};

inline AlgCostForms cost_formula_alg(std::span<const Rational> x) {
  const long k = static_cast<long>(x.size());
  AlgCostForms out;
  for (long i = 1; i <= k; ++i) {
    Rational inner(0);
    for (long j = 1; j <= i; ++j) inner += pow2(i - j) * x[static_cast<std::size_t>(j - 1)];
    out.double_sum += pow2(k - i) * inner;
    const Rational& xi = x[static_cast<std::size_t>(i - 1)];
    out.printed_closed += xi * (pow2(k + 1 - i) - 1) * (k + 1 - i);
    out.regrouped_closed += xi * pow2(k - i) * (k + 1 - i);
  }
  return out;
}

struct OptCostForm {
  Rational value;     // sum_i 2^(k-i) x_i
  Rational eps_term;  // sum_i 2^(k-i) eps
  Rational total() const { return value + eps_term; }
};

inline OptCostForm cost_formula_opt(std::span<const Rational> x, const Rational& eps = Rational(0)) {
  const long k = static_cast<long>(x.size());
  OptCostForm out{Rational(0), Rational(0)};
  for (long i = 1; i <= k; ++i) {
    out.value += pow2(k - i) * x[static_cast<std::size_t>(i - 1)];
    out.eps_term += pow2(k - i) * eps;
  }
  return out;
}

/// x_i <= 2 max_{j<i} x_j for every i >= 2.
inline bool check_prop1(std::span<const Rational> x) {
  if (x.empty() || x[0] <= 0) throw std::invalid_argument("check_prop1: needs x_1 > 0");
  Rational best = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > 2 * best) return false;
    if (x[i] > best) best = x[i];
  }
  return true;
}

/// (sum_{i<=m} 2^-i x_i) / (sum_{i<=k} 2^-i x_i) with k = |x|.
inline Rational prefix_mass_ratio(std::span<const Rational> x, std::size_t m) {
  if (m < 1 || m > x.size()) throw std::invalid_argument("prefix_mass_ratio: m out of range");
  const auto part = detail::dyadic_sums(x, m);
  const auto all = detail::dyadic_sums(x, x.size());
  if (all.mass == 0) throw std::invalid_argument("prefix_mass_ratio: zero denominator");
  return part.mass / all.mass;
}

/// sum y_i i / sum y_i.
inline Rational weighted_index_mean(std::span<const Rational> y) {
  if (y.empty()) throw std::invalid_argument("weighted_index_mean: empty sequence");
  Rational num(0), den(0);
  for (std::size_t i = 1; i <= y.size(); ++i) {
    num += y[i - 1] * static_cast<long>(i);
    den += y[i - 1];
  }
  if (den == 0) throw std::invalid_argument("weighted_index_mean: zero mass");
  return num / den;
}

/// sum c^i i / sum c^i over i = 1..k, by direct summation.
inline Rational geometric_index_mean(const Rational& c, int k) {
  if (k < 1) throw std::invalid_argument("geometric_index_mean: k must be >= 1");
  Rational num(0), den(0), ci(1);
  for (int i = 1; i <= k; ++i) {
    ci *= c;
    num += ci * i;
    den += ci;
  }
  return num / den;
}

/// The bound 2(k+1) - 2 (sum x_i 2^-i i)/(sum x_i 2^-i) for ledgers growing
/// by at least (2 + eps) per level.
inline Rational prop2_bound(std::span<const Rational> x, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("prop2_bound: eps must be positive");
  if (x.empty() || x[0] <= 0) throw std::invalid_argument("prop2_bound: needs x_1 > 0");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] < (2 + eps) * x[i - 1]) {
      throw std::invalid_argument("prop2_bound: growth condition violated at level " + std::to_string(i + 1));
    }
  }
  const auto s = detail::dyadic_sums(x, x.size());
  return 2 * Rational(static_cast<long>(x.size()) + 1) - 2 * (s.weighted / s.mass);
}

/// (1/8 sum_{i<k} x_i 2^-i (k-i)) / (sum_{i<k} x_i 2^-i); requires x_k = 0.
inline Rational ratio_bound_randomized(std::span<const Rational> x) {
  if (x.empty()) throw std::invalid_argument("ratio_bound_randomized: empty ledger");
  if (x.back() != 0) throw std::invalid_argument("ratio_bound_randomized: needs x_k = 0");
  detail::require_nonnegative(x, "ratio_bound_randomized");
  const long k = static_cast<long>(x.size());
  Rational num(0), den(0);
  for (long i = 1; i < k; ++i) {
    const Rational w = x[static_cast<std::size_t>(i - 1)] * pow2(-i);
    num += w * (k - i);
    den += w;
  }
  if (den == 0) throw std::invalid_argument("ratio_bound_randomized: zero mass below level k");
  return num / (8 * den);
}

/// Randomized ledger: the gaps of levels 1..k-1 with x_k replaced by 0.
inline std::vector<Rational> randomized_ledger(const GapLedger& ledger) {
  std::vector<Rational> x = ledger.x();
  if (!x.empty()) x.back() = 0;
  return x;
}

// ---------------------------------------------------------------------------
// Free-server distributions

struct FreeServerDistribution {
  std::map<Rational, Rational> mass;  // server position -> probability
  Rational center;

  Rational total() const {
    Rational t(0);
    for (const auto& [pos, p] : mass) t += p;
    return t;
  }
};

using SideProbability = std::function<Rational(const Rational& d_left, const Rational& d_right)>;

struct DistributionResult {
  FreeServerDistribution distribution;
  Rational expected_cost;  // exact expected online cost over the whole tree
};

inline constexpr int kExactDistributionBudget = 10;

/// Exact distribution of the free server of the randomized construction when
/// each request picks its left surrounding server with p_left(d_L, d_R).
/// Children are independent, so each level is an |L| x |R| merge.
inline DistributionResult free_server_distribution(const std::vector<std::pair<Rational, Rational>>& schedule,
                                                   const SideProbability& p_left,
                                                   const Rational& origin = Rational(2),
                                                   int budget = kExactDistributionBudget) {
  const int k = static_cast<int>(schedule.size());
  if (k < 1) throw std::invalid_argument("free_server_distribution: empty schedule");
  if (k > budget) {
    throw std::invalid_argument("free_server_distribution: k = " + std::to_string(k) + " exceeds exact budget " +
                                std::to_string(budget) + "; use Monte Carlo instead");
  }
  std::map<Rational, Rational> dist{{Rational(0), Rational(1)}};
  Rational width(0), cost(0), top(0);
  for (const auto& [a, b] : schedule) {
    const Rational r = width + a;
    const Rational shift = r + b;
    std::map<Rational, Rational> next;
    Rational level_cost(0);
    for (const auto& [x, px] : dist) {
      for (const auto& [y0, py] : dist) {
        const Rational y = y0 + shift;
        const Rational dl = r - x;
        const Rational dr = y - r;
        const Rational p = (dl == 0) ? Rational(1) : p_left(dl, dr);
        const Rational joint = px * py;
        if (p != 0) next[y] += joint * p;
        if (p != 1) next[x] += joint * (1 - p);
        level_cost += joint * (p * dl + (1 - p) * dr);
      }
    }
    cost = 2 * cost + level_cost;
    dist = std::move(next);
    width = width + shift;
    top = r;
  }
  DistributionResult out;
  for (auto& [pos, p] : dist) {
    if (p != 0) out.distribution.mass[pos + origin] = p;
  }
  out.distribution.center = top + origin;
  out.expected_cost = cost;
  return out;
}

inline DistributionResult harmonic_free_server_distribution(int k, int budget = kExactDistributionBudget) {
  return free_server_distribution(
      unit_schedule(k), [](const Rational& dl, const Rational& dr) { return harmonic_p_left(dl, dr); }, Rational(2),
      budget);
}

struct ExactlySymmetric {};
struct TVDistance {
  Rational value;
};
using SymmetryCheck = std::variant<ExactlySymmetric, TVDistance>;

/// Exact verdict for a rational distribution: symmetric under s -> 2c - s,
/// otherwise the total-variation distance to its mirror image.
inline SymmetryCheck check_symmetric_distribution(const FreeServerDistribution& p) {
  std::map<Rational, Rational> mirrored;
  for (const auto& [s, m] : p.mass) mirrored[2 * p.center - s] += m;
  std::map<Rational, Rational> diff = p.mass;
  for (const auto& [s, m] : mirrored) diff[s] -= m;
  Rational tv(0);
  for (const auto& [s, d] : diff) tv += d < 0 ? Rational(-d) : d;
  tv /= 2;
  if (tv == 0) return ExactlySymmetric{};
  return TVDistance{tv};
}

/// Total-variation distance between an empirical distribution and its mirror.
inline double empirical_symmetry_tv(const std::map<Rational, double>& freq, const Rational& center) {
  std::map<Rational, double> diff = freq;
  for (const auto& [s, m] : freq) diff[2 * center - s] -= m;
  double tv = 0;
  for (const auto& [s, d] : diff) tv += d < 0 ? -d : d;
  return tv / 2;
}

// ---------------------------------------------------------------------------
// Reports

struct BoundReport {
  int k = 0;
  std::vector<Rational> x;
  std::string formula;
  Rational value;
  std::map<std::string, Rational> aux;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["k"] = k;
    j["formula"] = formula;
    j["value"] = to_string(value);
    j["value_decimal"] = to_decimal(value);
    j["x"] = nlohmann::json::array();
    for (const auto& v : x) j["x"].push_back(to_string(v));
    j["aux"] = nlohmann::json::object();
    for (const auto& [name, v] : aux) j["aux"][name] = to_string(v);
    return j;
  }
};

/// Re-evaluates a report from its formula id and inputs.
inline Rational evaluate_formula(const std::string& formula, std::span<const Rational> x, int k) {
  if (formula == "deterministic") return ratio_bound_deterministic(x);
  if (formula == "randomized") return ratio_bound_randomized(x);
  if (formula == "theorem1") return theorem1_ratio(k);
  throw std::invalid_argument("unknown formula id '" + formula + "'");
}

inline BoundReport make_bound_report(const std::string& formula, std::vector<Rational> x, int k) {
  BoundReport r;
  r.k = k;
  r.formula = formula;
  r.value = evaluate_formula(formula, x, k);
  r.x = std::move(x);
  if (formula == "deterministic") {
    const auto alg = cost_formula_alg(r.x);
    r.aux["alg_double_sum"] = alg.double_sum;
    r.aux["alg_printed_closed_form"] = alg.printed_closed;
    r.aux["opt_upper"] = cost_formula_opt(r.x).value;
  }
  return r;
}

}  // namespace oml
