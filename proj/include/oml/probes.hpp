#pragma once

// Empirical locality and symmetry probes.

#include "oml/algorithms.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace oml {

enum class SymmetryVerdict { Symmetric, Asymmetric };
enum class LocalityVerdict { Local, NonLocal };

class SelfSymmetricInterval : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline SymmetryVerdict probe_symmetry(const ChoiceFn& choice, const LocalInterval& I) {
  if (is_self_mirror(I)) throw SelfSymmetricInterval("interval is its own mirror image");
  return choice(mirror_interval(I)) == opposite(choice(I)) ? SymmetryVerdict::Symmetric
                                                           : SymmetryVerdict::Asymmetric;
}

inline SymmetryVerdict probe_symmetry(const ProbabilityFn& p_left, const LocalInterval& I) {
  if (is_self_mirror(I)) throw SelfSymmetricInterval("interval is its own mirror image");
  return p_left(mirror_interval(I)) == 1 - p_left(I) ? SymmetryVerdict::Symmetric : SymmetryVerdict::Asymmetric;
}

/// Matched pair placed outside the probed interval. For algorithm probes,
/// `slot` is the number of main requests that arrive before it.
struct Decoy {
  Rational server;
  Rational request;
  std::size_t slot = 0;
};

namespace detail {

// Embeds I into a full matching state alongside decoy history and reads the
// interval back out again.
inline LocalInterval reembed(const LocalInterval& I, const std::vector<Decoy>& decoys) {
  Instance inst;
  inst.servers.push_back({0, I.left});
  inst.servers.push_back({1, I.right});
  ServerId sid = 2;
  RequestId rid = 0;
  std::vector<std::pair<Request, ServerId>> commits;
  for (const auto& d : decoys) {
    inst.servers.push_back({sid, d.server});
    inst.requests.push_back({rid, d.request});
    commits.emplace_back(inst.requests.back(), sid);
    ++sid;
    ++rid;
  }
  for (const auto& h : I.history) {
    inst.servers.push_back({sid, h.server});
    inst.requests.push_back({rid, h.request});
    commits.emplace_back(inst.requests.back(), sid);
    ++sid;
    ++rid;
  }
  MatchState state(inst);
  for (const auto& [r, s] : commits) state.commit(r, s);
  return extract_local_interval(state, I.request);
}

}  // namespace detail

/// Local iff the choice is unchanged under translation by `offset` and under
/// embedding the interval next to matched decoy history outside it.
inline LocalityVerdict probe_locality(const ChoiceFn& choice, const LocalInterval& I, const Rational& offset,
                                      const std::vector<Decoy>& decoys) {
  for (const auto& d : decoys) {
    const bool outside = (d.server < I.left || d.server > I.right) && (d.request < I.left || d.request > I.right);
    if (!outside) throw std::invalid_argument("probe_locality: decoy inside the interval");
  }
  const Side base = choice(I);
  if (choice(translate_interval(I, offset)) != base) return LocalityVerdict::NonLocal;
  if (choice(detail::reembed(I, decoys)) != base) return LocalityVerdict::NonLocal;
  return LocalityVerdict::Local;
}

/// Same probe for a randomized rule, comparing exact left probabilities.
inline LocalityVerdict probe_locality(const ProbabilityFn& p_left, const LocalInterval& I, const Rational& offset,
                                      const std::vector<Decoy>& decoys) {
  for (const auto& d : decoys) {
    const bool outside = (d.server < I.left || d.server > I.right) && (d.request < I.left || d.request > I.right);
    if (!outside) throw std::invalid_argument("probe_locality: decoy inside the interval");
  }
  const Rational base = p_left(I);
  if (p_left(translate_interval(I, offset)) != base) return LocalityVerdict::NonLocal;
  if (p_left(detail::reembed(I, decoys)) != base) return LocalityVerdict::NonLocal;
  return LocalityVerdict::Local;
}

/// What an algorithm does with the final request of a run.
struct Decision {
  std::optional<Side> side;
  std::optional<Rational> p_left;
  bool operator==(const Decision&) const = default;
};

inline Decision final_decision(OnlineAlgorithm& alg, const Instance& inst, std::uint64_t seed) {
  if (inst.requests.empty()) throw std::invalid_argument("final_decision: no requests");
  const RequestId last = inst.requests.back().id;
  Decision out;
  run_online(alg, inst, seed, [&](const MatchState& state, const Request& r, ServerId chosen) {
    if (r.id != last) return;
    const auto around = surrounding_free_servers(state, r.pos);
    if (alg.randomized()) {
      out.p_left = alg.left_probability(state, r);
    } else {
      out.side = (around.left && chosen == *around.left) ? Side::Left : Side::Right;
    }
  });
  return out;
}

inline Instance translated(const Instance& inst, const Rational& offset) {
  Instance out = inst;
  for (auto& s : out.servers) s.pos += offset;
  for (auto& r : out.requests) r.pos += offset;
  return out;
}

/// Adds decoy pairs; decoy requests arrive at their slots, the last main
/// request stays last.
inline Instance with_decoys(const Instance& inst, const std::vector<Decoy>& decoys) {
  constexpr int kDecoyBase = 1'000'000;
  Instance out;
  out.servers = inst.servers;
  out.meta = inst.meta;
  const std::size_t m = inst.requests.size();
  for (std::size_t i = 0; i < decoys.size(); ++i) {
    out.servers.push_back({kDecoyBase + static_cast<int>(i), decoys[i].server});
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < decoys.size(); ++i) {
      const std::size_t slot = std::min(decoys[i].slot, m - 1);
      if (slot == k) out.requests.push_back({kDecoyBase + static_cast<int>(i), decoys[i].request});
    }
    out.requests.push_back(inst.requests[k]);
  }
  return out;
}

/// Runs the full algorithm on a scenario, on its translate, and with decoys
/// added, and compares the decision on the final request.
inline LocalityVerdict probe_algorithm_locality(const AlgorithmFactory& factory, const Instance& scenario,
                                                const Rational& offset, const std::vector<Decoy>& decoys,
                                                std::uint64_t seed = 0) {
  auto decide = [&](const Instance& inst) {
    auto alg = factory();
    return final_decision(*alg, inst, seed);
  };
  const Decision base = decide(scenario);
  if (decide(translated(scenario, offset)) != base) return LocalityVerdict::NonLocal;
  if (decide(with_decoys(scenario, decoys)) != base) return LocalityVerdict::NonLocal;
  return LocalityVerdict::Local;
}

}  // namespace oml
