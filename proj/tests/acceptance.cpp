// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oml/experiment.hpp"
#include "oml/suites.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace oml;

namespace {

// Pinned tolerances.
const Rational kEpsSymmetric = pow2(-40);
const Rational kEpsAdaptive = pow2(-20);
const Rational kBudget = pow2(20);
constexpr double kLedgerSlack = 1e-6;
constexpr double kProp2Limit = 4.0;
constexpr double kProp2Drift = 0.1;
constexpr double kIndexMeanTol = 0.01;
constexpr double kStderrMultiple = 3.0;
constexpr double kMinGrowth4to8 = 0.3;
constexpr int kTrials = 10000;
constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational exact_ratio(const std::string& algo, const Instance& inst) {
  auto alg = make_algorithm(parse_selector(algo));
  return run_online(*alg, inst).total / optimal_dp(inst).cost;
}

std::string x_text(const std::vector<Rational>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + to_decimal(x[i]);
  return "(" + s + ")";
}

Outcome c1() {
  Outcome o;
  const auto t0 = Clock::now();
  const BuiltInstance built = build_symmetric(10, kEpsSymmetric);
  const Rational target = Rational(10) - pow2(-10);
  for (const std::string algo : {"wfa", "tnet:3"}) {
    const Rational r = exact_ratio(algo, built.instance);
    o.detail << " " << algo << "=" << to_decimal(r);
    o.require(r >= target, algo + " ratio >= 10 - 2^-10 = " + to_decimal(target));
  }
  Rational worst(0);
  for (int k = 1; k <= 10; ++k) {
    const BuiltInstance b = build_symmetric(k, kEpsSymmetric);
    for (const std::string algo : {"greedy", "wfa"}) {
      const Rational gap = abs_diff(exact_ratio(algo, b.instance), theorem1_ratio(k));
      if (gap / (pow2(k) * kEpsSymmetric) > worst) worst = gap / (pow2(k) * kEpsSymmetric);
      o.require(gap <= pow2(k) * kEpsSymmetric, "closed form at k=" + std::to_string(k) + " " + algo);
    }
  }
  const double secs = seconds_since(t0);
  o.detail << " closed-form gap/(2^k eps) max=" << to_decimal(worst) << " time=" << secs << "s";
  o.require(secs < 60, "runtime < 60 s");
  return o;
}

Outcome c2() {
  Outcome o;
  const auto t0 = Clock::now();
  for (const std::string algo : {"greedy", "biased:3/2"}) {
    const auto choice = local_choice(parse_selector(algo));
    AdaptiveResult r = build_adaptive(*choice, 10, kEpsAdaptive, kBudget);
    if (!std::holds_alternative<BuiltInstance>(r)) {
      o.require(false, algo + " returned a witness");
      continue;
    }
    const BuiltInstance& built = std::get<BuiltInstance>(r);
    const auto x = built.ledger.x();
    const Rational ratio = exact_ratio(algo, built.instance);
    const Rational bound = ratio_bound_deterministic(x);
    const bool prop1 = check_prop1(x);
    o.detail << " " << algo << ": ratio=" << to_decimal(ratio) << " bound=" << to_decimal(bound)
             << " prop1=" << (prop1 ? "yes" : "no") << " x=" << x_text(x);
    o.require(to_double(ratio) >= to_double(bound) - kLedgerSlack, algo + " ratio >= bound - 1e-6");
    o.require(prop1, algo + " check_prop1");
    o.require(ratio >= 2, algo + " ratio >= k/4 - 1/2");
  }
  const double secs = seconds_since(t0);
  o.detail << " time=" << secs << "s";
  o.require(secs < 60, "runtime < 60 s");
  return o;
}

Outcome c3() {
  Outcome o;
  std::mt19937_64 rng(kSeed);
  int cost_mismatch = 0, opt_over = 0, built_count = 0;
  Rational worst(0);
  while (built_count < 100) {
    const int k = 1 + static_cast<int>(rng() % 8);
    BiasParams p;
    p.beta = make_rational(4 + static_cast<long>(rng() % 5), 4);
    p.favour = rng() % 2 ? Side::Left : Side::Right;
    AdaptiveResult r =
        build_adaptive([p](const LocalInterval& I) { return biased_family_choice(p, I); }, k, kEpsAdaptive, kBudget);
    if (!std::holds_alternative<BuiltInstance>(r)) continue;
    ++built_count;
    const BuiltInstance& built = std::get<BuiltInstance>(r);
    const auto x = built.ledger.x();
    auto alg = make_biased(p);
    const RunTrace t = run_online(*alg, built.instance);
    // The two trailing cleanup requests are not part of either tree.
    Rational trees = t.total;
    for (std::size_t i = t.steps.size() - 2; i < t.steps.size(); ++i) trees -= t.steps[i].cost;
    const Rational gap = abs_diff(trees, cost_formula_alg(x).double_sum);
    const Rational scaled = gap / (pow2(k) * kEpsAdaptive);
    if (scaled > worst) worst = scaled;
    if (gap > pow2(k) * kEpsAdaptive) ++cost_mismatch;
    if (optimal_dp(built.instance).cost > cost_formula_opt(x, kEpsAdaptive).total()) ++opt_over;
  }
  o.detail << " ledgers=" << built_count << " alg-cost mismatches=" << cost_mismatch
           << " max gap/(2^k eps)=" << to_decimal(worst) << " opt over formula=" << opt_over;
  o.require(cost_mismatch == 0, "online tree cost = double sum within 2^k eps");
  o.require(opt_over == 0, "optimal_dp <= cost_formula_opt");
  int closed_ok = 0;
  for (int i = 0; i < 100; ++i) {
    const std::vector<Rational> x{make_rational(1 + static_cast<long>(rng() % 64), 8),
                                  make_rational(1 + static_cast<long>(rng() % 64), 8)};
    const AlgCostForms f = cost_formula_alg(x);
    if (f.double_sum == 4 * x[0] + x[1] && f.printed_closed == 6 * x[0] + x[1] && f.regrouped_closed == f.double_sum) {
      ++closed_ok;
    }
  }
  o.detail << " k=2 closed-form discrepancy confirmed " << closed_ok << "/100";
  o.require(closed_ok == 100, "k=2 printed closed form is 6x1+x2 against 4x1+x2");
  return o;
}

Outcome c4() {
  Outcome o;
  auto powers = [](int k) {
    std::vector<Rational> x;
    for (int i = 1; i <= k; ++i) x.push_back(pow_int(Rational(3), i));
    return x;
  };
  const double b40 = to_double(prop2_bound(powers(40), Rational(1)));
  const double b20 = to_double(prop2_bound(powers(20), Rational(1)));
  const double mean60 = to_double(geometric_index_mean(Rational(2), 60));
  o.detail << " prop2(k=40)=" << b40 << " prop2(k=20)=" << b20 << " geometric_index_mean(2,60)=" << mean60;
  o.require(b40 <= kProp2Limit, "prop2_bound(k=40) <= 4");
  o.require(std::abs(b40 - b20) < kProp2Drift, "|prop2(40) - prop2(20)| < 0.1");
  o.require(std::abs(mean60 - 59) < kIndexMeanTol, "|geometric_index_mean(2,60) - 59| < 0.01");
  return o;
}

void add_suite(Outcome& o, const SuiteReport& r) {
  o.detail << " " << r.name << " cases=" << r.cases << " failures=" << r.failures;
  o.require(r.passed(), r.name);
}

Outcome c5() {
  Outcome o;
  add_suite(o, suite_prefix_mass(10000, kSeed));
  add_suite(o, suite_sum_lemma(10000, kSeed));
  return o;
}

Outcome c6() {
  Outcome o;
  const auto t0 = Clock::now();
  add_suite(o, suite_harmonic_symmetry(8));
  const auto d1 = harmonic_free_server_distribution(1).distribution;
  std::vector<Rational> m1, m2;
  for (const auto& [pos, p] : d1.mass) m1.push_back(p);
  for (const auto& [pos, p] : harmonic_free_server_distribution(2).distribution.mass) {
    if (p != 0) m2.push_back(p);
  }
  const Rational h(1, 2);
  const std::vector<Rational> want2{make_rational(5, 16), make_rational(3, 16), make_rational(3, 16),
                                    make_rational(5, 16)};
  o.require(m1 == std::vector<Rational>{h, h}, "k=1 distribution {1/2, 1/2}");
  o.require(m2 == want2, "k=2 distribution {5/16, 3/16, 3/16, 5/16}");
  const double secs = seconds_since(t0);
  o.detail << " k=2 masses=" << x_text(m2) << " time=" << secs << "s";
  o.require(secs < 30, "runtime < 30 s");
  return o;
}

Outcome c7() {
  Outcome o;
  const AlgorithmFactory factory = make_factory(parse_selector("harmonic"));
  auto mean_at = [&](int k) {
    const BuiltInstance b = build_randomized(unit_schedule(k), k);
    return std::pair{monte_carlo_ratio(factory, b.instance, kTrials, kSeed), b.ledger};
  };
  const auto [mc8, ledger8] = mean_at(8);
  const auto [mc4, ledger4] = mean_at(4);
  const double bound = to_double(ratio_bound_randomized(randomized_ledger(ledger8)));
  o.detail << " mean(k=8)=" << mc8.mean << " stderr=" << mc8.stderr_ << " bound=" << bound
           << " mean(k=4)=" << mc4.mean;
  o.require(mc8.mean >= bound - kStderrMultiple * mc8.stderr_, "mean >= bound - 3 stderr");
  o.require(mc8.mean - mc4.mean >= kMinGrowth4to8, "mean(8) - mean(4) >= 0.3");
  return o;
}

Outcome c8() {
  Outcome o;
  add_suite(o, suite_offline_oracle(1000, kSeed));
  add_suite(o, suite_tnet_invariant(200, kSeed));
  return o;
}

Outcome c9() {
  Outcome o;
  const ProbeSuiteReport p = suite_probes(1000, kSeed);
  for (const auto& r : p.locality) add_suite(o, r);
  for (const auto& r : p.symmetry) add_suite(o, r);
  o.detail << " biased(2) probes=" << p.biased_probes << " witness=" << (p.biased_witness ? "found" : "none");
  o.require(p.biased_witness.has_value(), "biased(2) asymmetric witness");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"C1 symmetric construction vs WFA and t-net-cost", c1},
      {"C2 adaptive construction vs greedy and biased(3/2)", c2},
      {"C3 cost formula cross-checks", c3},
      {"C4 constant-ratio regime for geometric ledgers", c4},
      {"C5 prefix-mass and sum lemma suites", c5},
      {"C6 harmonic free-server distribution symmetry", c6},
      {"C7 harmonic on the randomized construction", c7},
      {"C8 offline oracle equivalence", c8},
      {"C9 locality and symmetry probes", c9},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.passed ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
    failed += o.passed ? 0 : 1;
  }
  std::cout << (9 - failed) << "/9 criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
