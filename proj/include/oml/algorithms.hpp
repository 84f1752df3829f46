#pragma once

// Online algorithms for matching on the line and the local choice rules
// they are built from.
//
// A local deterministic algorithm is fully described by a choice function
// from local intervals to {Left, Right}; LocalRuleAlgorithm turns such a
// function into an online algorithm. Deterministic ties always go Left.

#include "oml/line_core.hpp"
#include "oml/offline_opt.hpp"
#include "oml/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oml {

using ChoiceFn = std::function<Side(const LocalInterval&)>;
using ProbabilityFn = std::function<Rational(const LocalInterval&)>;

// ---------------------------------------------------------------------------
// Choice rules

inline Side greedy_choice(const LocalInterval& I) {
  return I.d_left() <= I.d_right() ? Side::Left : Side::Right;
}

/// Probability of serving with s_L: inversely proportional to its distance.
inline Rational harmonic_p_left(const Rational& d_left, const Rational& d_right) {
  if (d_left == 0 && d_right == 0) throw std::invalid_argument("harmonic_p_left: both distances are zero");
  if (d_left == 0) return Rational(1);
  if (d_right == 0) return Rational(0);
  Rational p = d_right / (d_left + d_right);
  p.canonicalize();
  return p;
}

inline Rational harmonic_p_left(const LocalInterval& I) { return harmonic_p_left(I.d_left(), I.d_right()); }

/// Multiplicative threshold bias. With favour = Right the rule is
/// Left iff beta * d_L <= d_R; favour = Left is its mirror image.
struct BiasParams {
  Rational beta{1};
  Side favour = Side::Right;
};

inline Side biased_family_choice(const BiasParams& params, const LocalInterval& I) {
  if (params.beta <= 0) throw std::invalid_argument("bias factor must be positive");
  if (params.favour == Side::Right) {
    return params.beta * I.d_left() <= I.d_right() ? Side::Left : Side::Right;
  }
  return I.d_left() <= params.beta * I.d_right() ? Side::Left : Side::Right;
}

/// Work-function value of committing `extra` on top of `used`: the offline
/// optimum of the resulting balanced configuration.
inline Rational work_value(std::vector<Rational> used, const Rational& extra, std::vector<Rational> requests,
                           const Rational& pending) {
  used.insert(std::upper_bound(used.begin(), used.end(), extra), extra);
  requests.insert(std::upper_bound(requests.begin(), requests.end(), pending), pending);
  return sorted_pairing_cost(used, requests);
}

/// WFA restricted to the content of the local interval.
inline Side wfa_local_choice(const LocalInterval& I) {
  std::vector<Rational> used, reqs;
  used.reserve(I.history.size());
  reqs.reserve(I.history.size());
  for (const auto& h : I.history) {
    used.push_back(h.server);
    reqs.push_back(h.request);
  }
  std::sort(used.begin(), used.end());
  std::sort(reqs.begin(), reqs.end());
  const Rational left = work_value(used, I.left, reqs, I.request);
  const Rational right = work_value(std::move(used), I.right, std::move(reqs), I.request);
  return left <= right ? Side::Left : Side::Right;
}

// ---------------------------------------------------------------------------
// Online algorithm contract

class OnlineAlgorithm {
 public:
  virtual ~OnlineAlgorithm() = default;

  /// Called once before the first request of a run.
  virtual void reset(const Instance& /*instance*/, std::uint64_t /*seed*/) {}

  /// Returns the server for r. Must be free in `state`; the caller commits it.
  virtual ServerId serve(const MatchState& state, const Request& r) = 0;

  /// For randomized algorithms: probability that r goes to its left
  /// surrounding server. Deterministic algorithms return nullopt.
  virtual std::optional<Rational> left_probability(const MatchState& /*state*/, const Request& /*r*/) const {
    return std::nullopt;
  }

  virtual bool randomized() const { return false; }
  virtual std::string name() const = 0;
};

using AlgorithmFactory = std::function<std::unique_ptr<OnlineAlgorithm>()>;

/// Deterministic local algorithm driven by a choice function.
class LocalRuleAlgorithm : public OnlineAlgorithm {
 public:
  LocalRuleAlgorithm(std::string name, ChoiceFn choice, bool needs_history = true)
      : name_(std::move(name)), choice_(std::move(choice)), needs_history_(needs_history) {}

  ServerId serve(const MatchState& state, const Request& r) override {
    const auto around = surrounding_free_servers(state, r.pos);
    if (!around.left) return *around.right;
    if (!around.right) return *around.left;
    const LocalInterval I = extract_local_interval(state, r.pos, needs_history_);
    return choice_(I) == Side::Left ? *around.left : *around.right;
  }

  std::string name() const override { return name_; }

 private:
  std::string name_;
  ChoiceFn choice_;
  bool needs_history_;
};

inline std::unique_ptr<OnlineAlgorithm> make_greedy() {
  return std::make_unique<LocalRuleAlgorithm>("greedy", greedy_choice, false);
}

inline std::unique_ptr<OnlineAlgorithm> make_biased(BiasParams params) {
  return std::make_unique<LocalRuleAlgorithm>(
      "biased:" + to_string(params.beta),
      [params](const LocalInterval& I) { return biased_family_choice(params, I); }, false);
}

/// Work function algorithm: among the surrounding free servers, commit the
/// one whose resulting configuration has the smallest offline optimum.
class WfaAlgorithm : public OnlineAlgorithm {
 public:
  ServerId serve(const MatchState& state, const Request& r) override {
    const auto around = surrounding_free_servers(state, r.pos);
    if (!around.left) return *around.right;
    if (!around.right) return *around.left;
    std::vector<Rational> used, reqs;
    used.reserve(state.pairs().size());
    reqs.reserve(state.pairs().size());
    for (const auto& p : state.pairs()) {
      used.push_back(p.server_pos);
      reqs.push_back(p.request_pos);
    }
    std::sort(used.begin(), used.end());
    std::sort(reqs.begin(), reqs.end());
    const Rational left = work_value(used, state.server(*around.left).pos, reqs, r.pos);
    const Rational right = work_value(std::move(used), state.server(*around.right).pos, std::move(reqs), r.pos);
    return left <= right ? *around.left : *around.right;
  }

  std::string name() const override { return "wfa"; }
};

/// Harmonic: picks s_L with probability d_R / (d_L + d_R). One uniform 64-bit
/// draw per request, derived from (seed, request id).
class HarmonicAlgorithm : public OnlineAlgorithm {
 public:
  void reset(const Instance&, std::uint64_t seed) override { seed_ = seed; }

  ServerId serve(const MatchState& state, const Request& r) override {
    const auto around = surrounding_free_servers(state, r.pos);
    if (!around.left) return *around.right;
    if (!around.right) return *around.left;
    const Rational p = harmonic_p_left(r.pos - state.server(*around.left).pos,
                                       state.server(*around.right).pos - r.pos);
    if (p == 1) return *around.left;
    if (p == 0) return *around.right;
    const std::uint64_t u = splitmix64(derive_seed(seed_, static_cast<std::uint64_t>(static_cast<std::int64_t>(r.id))));
    // u / 2^64 < p  <=>  u * den < num * 2^64
    mpz_class lhs(0), rhs;
    mpz_import(lhs.get_mpz_t(), 1, 1, sizeof(u), 0, 0, &u);
    lhs *= p.get_den();
    rhs = p.get_num();
    rhs <<= 64;
    return lhs < rhs ? *around.left : *around.right;
  }

  std::optional<Rational> left_probability(const MatchState& state, const Request& r) const override {
    const auto around = surrounding_free_servers(state, r.pos);
    if (!around.left) return Rational(0);
    if (!around.right) return Rational(1);
    return harmonic_p_left(r.pos - state.server(*around.left).pos, state.server(*around.right).pos - r.pos);
  }

  bool randomized() const override { return true; }
  std::string name() const override { return "harmonic"; }

 private:
  std::uint64_t seed_ = 0;
};

/// Test stub that violates the contract by returning a matched server
/// whenever one exists.
class BrokenAlgorithm : public OnlineAlgorithm {
 public:
  ServerId serve(const MatchState& state, const Request& r) override {
    if (!state.pairs().empty()) return state.pairs().front().server;
    const auto around = surrounding_free_servers(state, r.pos);
    return around.left ? *around.left : *around.right;
  }
  std::string name() const override { return "broken"; }
};

// ---------------------------------------------------------------------------
// Execution

struct RunStep {
  RequestId request = 0;
  ServerId server = 0;
  Rational cost;
};

struct RunTrace {
  std::vector<RunStep> steps;
  Rational total{0};

  std::vector<std::pair<RequestId, ServerId>> matching() const {
    std::vector<std::pair<RequestId, ServerId>> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.emplace_back(s.request, s.server);
    return out;
  }
};

/// Called with the state just before r is committed to `chosen`.
using RunObserver = std::function<void(const MatchState&, const Request&, ServerId chosen)>;

inline RunTrace run_online(OnlineAlgorithm& algorithm, const Instance& instance, std::uint64_t seed = 0,
                           const RunObserver& observer = {}) {
  if (instance.requests.size() > instance.servers.size()) {
    throw std::invalid_argument("run_online: more requests than servers");
  }
  MatchState state(instance);
  algorithm.reset(instance, seed);
  RunTrace trace;
  trace.steps.reserve(instance.requests.size());
  for (const auto& r : instance.requests) {
    const ServerId s = algorithm.serve(state, r);
    if (!state.is_free(s)) {
      throw ContractViolation(algorithm.name() + " returned server " + std::to_string(s) +
                              " which is not free for request " + std::to_string(r.id));
    }
    if (observer) observer(state, r, s);
    Rational c = abs_diff(r.pos, state.server(s).pos);
    state.commit(r, s);
    trace.total += c;
    trace.steps.push_back({r.id, s, std::move(c)});
  }
  return trace;
}

}  // namespace oml
