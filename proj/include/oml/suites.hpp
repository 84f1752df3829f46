#pragma once

// Property suites shared by the command-line verifier and the acceptance
// runner. Every suite is deterministic in its seed and reports the first
// counterexample it finds.

#include "oml/analysis.hpp"
#include "oml/instance_io.hpp"
#include "oml/offline_opt.hpp"
#include "oml/probes.hpp"
#include "oml/selector.hpp"
#include "oml/tnet.hpp"

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oml {

struct SuiteReport {
  std::string name;
  long cases = 0;
  long failures = 0;
  std::optional<nlohmann::json> counterexample;

  bool passed() const { return failures == 0 && cases > 0; }

  void fail(nlohmann::json example) {
    ++failures;
    if (!counterexample) counterexample = std::move(example);
  }
};

namespace detail {

inline nlohmann::json rationals_json(const std::vector<Rational>& xs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : xs) j.push_back(to_string(x));
  return j;
}

inline Rational random_fraction(std::mt19937_64& rng, long max_num, long den) {
  return make_rational(static_cast<long>(rng() % static_cast<std::uint64_t>(max_num + 1)), den);
}

inline Rational random_point(std::mt19937_64& rng, long span = 40, long den = 4) {
  return random_fraction(rng, span, den);
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t n_servers, std::size_t n_requests) {
  Instance inst;
  for (std::size_t i = 0; i < n_servers; ++i) inst.servers.push_back({static_cast<ServerId>(i), random_point(rng)});
  for (std::size_t i = 0; i < n_requests; ++i) inst.requests.push_back({static_cast<RequestId>(i), random_point(rng)});
  return inst;
}

// Interval [0, w] with a request strictly inside and matched history pairs
// placed strictly inside as well.
inline LocalInterval random_interval(std::mt19937_64& rng, std::size_t max_history = 3) {
  const long den = 8;
  const long w = 2 + static_cast<long>(rng() % 60);
  auto inside = [&] { return make_rational(1 + static_cast<long>(rng() % static_cast<std::uint64_t>(w * den - 1)), den); };
  LocalInterval I{Rational(0), inside(), Rational(w), {}};
  const std::size_t h = rng() % (max_history + 1);
  for (std::size_t i = 0; i < h; ++i) I.history.push_back({inside(), inside()});
  return I;
}

inline std::vector<Decoy> random_decoys(std::mt19937_64& rng, const LocalInterval& I) {
  std::vector<Decoy> out;
  const std::size_t n = rng() % 3;
  for (std::size_t i = 0; i < n; ++i) {
    const Rational gap = 1 + random_point(rng, 400, 4);
    if (rng() % 2) {
      out.push_back({I.right + gap, I.right + gap + random_point(rng, 8, 4)});
    } else {
      out.push_back({I.left - gap, I.left - gap - random_point(rng, 8, 4)});
    }
  }
  return out;
}

inline nlohmann::json interval_json(const LocalInterval& I) {
  nlohmann::json j{{"left", to_string(I.left)}, {"request", to_string(I.request)}, {"right", to_string(I.right)}};
  j["history"] = nlohmann::json::array();
  for (const auto& h : I.history) j["history"].push_back({to_string(h.server), to_string(h.request)});
  return j;
}

}  // namespace detail

/// Prefix-mass lemma: ledgers with x_i <= 2 max_{j<i} x_j satisfy
/// prefix_mass_ratio(x, m) >= m / k for every m.
inline SuiteReport suite_prefix_mass(long n, std::uint64_t seed) {
  SuiteReport rep{"prefix-mass"};
  std::mt19937_64 rng(seed);
  for (long t = 0; t < n; ++t) {
    const std::size_t k = 1 + rng() % 16;
    std::vector<Rational> x{1 + detail::random_fraction(rng, 32, 4)};
    Rational best = x[0];
    for (std::size_t i = 1; i < k; ++i) {
      // Push to the boundary often: the lemma is tight at maximal growth.
      const Rational f = rng() % 4 == 0 ? Rational(1) : detail::random_fraction(rng, 64, 64);
      x.push_back(2 * best * f);
      if (x.back() > best) best = x.back();
    }
    ++rep.cases;
    for (std::size_t m = 1; m <= k; ++m) {
      const Rational got = prefix_mass_ratio(x, m);
      const Rational want = make_rational(static_cast<long>(m), static_cast<long>(k));
      if (got < want) {
        rep.fail({{"x", detail::rationals_json(x)}, {"m", m}, {"ratio", to_string(got)}, {"bound", to_string(want)}});
        break;
      }
    }
  }
  return rep;
}

/// Sum lemma: y_i >= c y_{i-1} with c > 1 gives
/// weighted_index_mean(y) >= geometric_index_mean(c, k).
inline SuiteReport suite_sum_lemma(long n, std::uint64_t seed) {
  SuiteReport rep{"sum-lemma"};
  std::mt19937_64 rng(seed);
  for (long t = 0; t < n; ++t) {
    const int k = 1 + static_cast<int>(rng() % 16);
    const Rational c = 1 + make_rational(1 + static_cast<long>(rng() % 24), 8);
    std::vector<Rational> y{1 + detail::random_fraction(rng, 16, 4)};
    for (int i = 1; i < k; ++i) {
      const Rational slack = rng() % 3 == 0 ? Rational(0) : detail::random_fraction(rng, 8, 8);
      y.push_back(c * y.back() * (1 + slack));
    }
    ++rep.cases;
    const Rational lhs = weighted_index_mean(y);
    const Rational rhs = geometric_index_mean(c, k);
    if (lhs < rhs) {
      rep.fail({{"y", detail::rationals_json(y)}, {"c", to_string(c)}, {"lhs", to_string(lhs)}, {"rhs", to_string(rhs)}});
    }
  }
  return rep;
}

/// Exact free-server distribution of Harmonic on the unit schedule.
inline SuiteReport suite_harmonic_symmetry(int k_max) {
  SuiteReport rep{"harmonic-symmetry"};
  for (int k = 1; k <= k_max; ++k) {
    ++rep.cases;
    const auto d = harmonic_free_server_distribution(k).distribution;
    const auto verdict = check_symmetric_distribution(d);
    if (d.total() != 1 || !std::holds_alternative<ExactlySymmetric>(verdict)) {
      nlohmann::json j{{"k", k}, {"total", to_string(d.total())}};
      if (const auto* tv = std::get_if<TVDistance>(&verdict)) j["tv"] = to_string(tv->value);
      rep.fail(j);
    }
  }
  return rep;
}

/// optimal_dp against brute force (|R| <= 7) and against sorted pairing on
/// balanced inputs.
inline SuiteReport suite_offline_oracle(long n, std::uint64_t seed) {
  SuiteReport rep{"offline-oracle"};
  std::mt19937_64 rng(seed);
  for (long t = 0; t < n; ++t) {
    const std::size_t r = 1 + rng() % 7;
    const Instance inst = detail::random_instance(rng, r + rng() % 3, r);
    ++rep.cases;
    const Rational dp = optimal_dp(inst).cost;
    const Rational bf = optimal_bruteforce(inst.servers, inst.requests);
    if (dp != bf) rep.fail({{"check", "dp-vs-bruteforce"}, {"instance", to_json(inst)}, {"dp", to_string(dp)}, {"bruteforce", to_string(bf)}});
  }
  for (long t = 0; t < n; ++t) {
    const std::size_t m = 1 + rng() % 12;
    const Instance inst = detail::random_instance(rng, m, m);
    ++rep.cases;
    const Rational dp = optimal_dp(inst).cost;
    const Rational bal = optimal_balanced(inst.servers, inst.requests).cost;
    if (dp != bal) rep.fail({{"check", "dp-vs-balanced"}, {"instance", to_json(inst)}, {"dp", to_string(dp)}, {"balanced", to_string(bal)}});
  }
  return rep;
}

/// At t = 1 the internal matching of t-net-cost is an optimal matching of
/// the requests seen so far, after every step.
inline SuiteReport suite_tnet_invariant(long n, std::uint64_t seed) {
  SuiteReport rep{"tnet-invariant"};
  std::mt19937_64 rng(seed);
  for (long t = 0; t < n; ++t) {
    const std::size_t m = 1 + rng() % 6;
    const Instance inst = detail::random_instance(rng, m, 1 + rng() % m);
    ++rep.cases;
    TNetCostAlgorithm alg(Rational(1));
    MatchState st(inst);
    alg.reset(inst, 0);
    Instance seen = inst;
    seen.requests.clear();
    for (const auto& r : inst.requests) {
      st.commit(r, alg.serve(st, r));
      seen.requests.push_back(r);
      const Rational want = optimal_dp(seen).cost;
      if (alg.internal_cost() != want) {
        rep.fail({{"instance", to_json(inst)}, {"step", r.id}, {"internal", to_string(alg.internal_cost())}, {"opt", to_string(want)}});
        break;
      }
    }
  }
  return rep;
}

struct ProbeSuiteReport {
  std::vector<SuiteReport> locality;  // one per probed rule
  std::vector<SuiteReport> symmetry;
  std::optional<nlohmann::json> biased_witness;  // asymmetric interval for biased(2)
  long biased_probes = 0;

  bool passed() const {
    for (const auto& r : locality) {
      if (!r.passed()) return false;
    }
    for (const auto& r : symmetry) {
      if (!r.passed()) return false;
    }
    return biased_witness.has_value();
  }
};

/// Locality for greedy, the WFA and t-net-cost adapters and Harmonic over
/// random intervals with random interior history and far decoys; symmetry
/// for greedy and Harmonic on every probe whose request is off-center; an asymmetry
/// witness for biased(beta = 2).
inline ProbeSuiteReport suite_probes(long n, std::uint64_t seed, const Rational& tnet_t = Rational(3)) {
  ProbeSuiteReport out;
  std::mt19937_64 rng(seed);
  const ProbabilityFn harmonic = [](const LocalInterval& I) { return harmonic_p_left(I); };
  struct Rule {
    std::string name;
    std::optional<ChoiceFn> choice;
    std::optional<ProbabilityFn> prob;
  };
  std::vector<Rule> rules{{"greedy", ChoiceFn(greedy_choice), std::nullopt},
                          {"wfa", ChoiceFn(wfa_local_choice), std::nullopt},
                          {"tnet:" + to_string(tnet_t), tnet_local_choice(tnet_t), std::nullopt},
                          {"harmonic", std::nullopt, harmonic}};
  for (const auto& r : rules) out.locality.push_back({"locality/" + r.name});
  out.symmetry.push_back({"symmetry/greedy"});
  out.symmetry.push_back({"symmetry/harmonic"});
  const ChoiceFn biased = [](const LocalInterval& I) { return biased_family_choice({Rational(2), Side::Right}, I); };

  for (long t = 0; t < n; ++t) {
    const LocalInterval I = detail::random_interval(rng);
    const std::vector<Decoy> decoys = detail::random_decoys(rng, I);
    const Rational offset = detail::random_fraction(rng, 2000, 8) - 125;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      ++out.locality[i].cases;
      const LocalityVerdict v = rules[i].choice ? probe_locality(*rules[i].choice, I, offset, decoys)
                                                : probe_locality(*rules[i].prob, I, offset, decoys);
      if (v != LocalityVerdict::Local) {
        out.locality[i].fail({{"interval", detail::interval_json(I)}, {"offset", to_string(offset)}});
      }
    }
    // Centered requests are excluded: deterministic ties break one way.
    if (2 * I.request == I.left + I.right) continue;
    ++out.symmetry[0].cases;
    if (probe_symmetry(ChoiceFn(greedy_choice), I) != SymmetryVerdict::Symmetric) {
      out.symmetry[0].fail({{"interval", detail::interval_json(I)}});
    }
    ++out.symmetry[1].cases;
    if (probe_symmetry(harmonic, I) != SymmetryVerdict::Symmetric) {
      out.symmetry[1].fail({{"interval", detail::interval_json(I)}});
    }
    ++out.biased_probes;
    if (!out.biased_witness && probe_symmetry(biased, I) == SymmetryVerdict::Asymmetric) {
      out.biased_witness = nlohmann::json{{"interval", detail::interval_json(I)},
                                          {"choice", to_string(biased(I))},
                                          {"mirrored_choice", to_string(biased(mirror_interval(I)))}};
    }
  }
  return out;
}

}  // namespace oml
