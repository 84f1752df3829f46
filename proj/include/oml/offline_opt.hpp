#pragma once

// Offline optimal matching on the line.
//
// On the line some optimal matching is non-crossing: after sorting both sides,
// request i is matched to a server with larger sorted index than request i-1.
// That gives the sorted pairing for |S| = |R| and an O(|R| * (|S|-|R|+1))
// dynamic program for |S| >= |R|.

#include "oml/line_core.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oml {

struct OptResult {
  Rational cost;
  std::vector<std::pair<RequestId, ServerId>> matching;  // in sorted request order
};

namespace detail {

template <class T>
std::vector<std::size_t> sorted_order(std::span<const T> items) {
  std::vector<std::size_t> idx(items.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (items[a].pos != items[b].pos) return items[a].pos < items[b].pos;
    return items[a].id < items[b].id;
  });
  return idx;
}

}  // namespace detail

/// Cost of pairing two equally sized, already sorted position lists in order.
inline Rational sorted_pairing_cost(std::span<const Rational> servers, std::span<const Rational> requests) {
  if (servers.size() != requests.size()) throw std::invalid_argument("sorted pairing needs equal sizes");
  Rational total(0);
  for (std::size_t i = 0; i < servers.size(); ++i) total += abs_diff(servers[i], requests[i]);
  return total;
}

inline OptResult optimal_balanced(std::span<const Server> servers, std::span<const Request> requests) {
  if (servers.size() != requests.size()) {
    throw std::invalid_argument("optimal_balanced: " + std::to_string(servers.size()) + " servers vs " +
                                std::to_string(requests.size()) + " requests");
  }
  const auto so = detail::sorted_order(servers);
  const auto ro = detail::sorted_order(requests);
  OptResult out{Rational(0), {}};
  out.matching.reserve(servers.size());
  for (std::size_t i = 0; i < so.size(); ++i) {
    const auto& s = servers[so[i]];
    const auto& r = requests[ro[i]];
    out.cost += abs_diff(s.pos, r.pos);
    out.matching.emplace_back(r.id, s.id);
  }
  return out;
}

/// Minimum cost over all injections of requests into servers. Ties resolve to
/// the lexicographically smallest sequence of sorted server indices.
inline OptResult optimal_dp(std::span<const Server> servers, std::span<const Request> requests) {
  const std::size_t n = requests.size();
  const std::size_t m = servers.size();
  if (m < n) {
    throw std::invalid_argument("optimal_dp: " + std::to_string(m) + " servers cannot cover " +
                                std::to_string(n) + " requests");
  }
  const auto so = detail::sorted_order(servers);
  const auto ro = detail::sorted_order(requests);
  const std::size_t slack = m - n;
  const std::size_t width = slack + 1;
  // f[i][j]: cheapest way to match requests i.. to servers j.. with j - i in [0, slack].
  // Rolling over i from the back; choice bits say whether matching (i, j) is optimal.
  std::vector<Rational> next(width + 1), cur(width + 1);
  std::vector<bool> take(n * width, false);
  for (std::size_t i = n; i-- > 0;) {
    // offset d = j - i; j ranges over i..i+slack.
    for (std::size_t d = width; d-- > 0;) {
      const std::size_t j = i + d;
      // match: request i with server j, continue at (i+1, j+1) which has offset d.
      Rational match = abs_diff(requests[ro[i]].pos, servers[so[j]].pos);
      if (i + 1 < n) match += next[d];
      if (d + 1 < width) {
        // skip: (i, j+1) has offset d+1.
        const Rational& skip = cur[d + 1];
        if (match <= skip) {
          cur[d] = std::move(match);
          take[i * width + d] = true;
        } else {
          cur[d] = skip;
        }
      } else {
        cur[d] = std::move(match);
        take[i * width + d] = true;
      }
    }
    std::swap(cur, next);
  }
  OptResult out{n == 0 ? Rational(0) : next[0], {}};
  out.matching.reserve(n);
  std::size_t d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (!take[i * width + d]) ++d;
    out.matching.emplace_back(requests[ro[i]].id, servers[so[i + d]].id);
  }
  return out;
}

/// Cost-only DP over raw positions.
inline Rational optimal_dp_cost(std::vector<Rational> servers, std::vector<Rational> requests) {
  std::vector<Server> s;
  std::vector<Request> r;
  s.reserve(servers.size());
  r.reserve(requests.size());
  for (std::size_t i = 0; i < servers.size(); ++i) s.push_back({static_cast<ServerId>(i), std::move(servers[i])});
  for (std::size_t i = 0; i < requests.size(); ++i) r.push_back({static_cast<RequestId>(i), std::move(requests[i])});
  return optimal_dp(s, r).cost;
}

inline OptResult optimal_dp(const Instance& inst) { return optimal_dp(inst.servers, inst.requests); }

inline constexpr std::size_t kBruteForceLimit = 10;

/// Exhaustive minimum over injective assignments. Validation oracle only.
inline Rational optimal_bruteforce(std::span<const Server> servers, std::span<const Request> requests) {
  if (requests.size() > kBruteForceLimit) {
    throw std::invalid_argument("optimal_bruteforce: more than " + std::to_string(kBruteForceLimit) +
                                " requests");
  }
  if (servers.size() < requests.size()) throw std::invalid_argument("optimal_bruteforce: too few servers");
  std::vector<bool> used(servers.size(), false);
  std::optional<Rational> best;
  Rational partial(0);
  auto recurse = [&](auto&& self, std::size_t i) -> void {
    if (i == requests.size()) {
      if (!best || partial < *best) best = partial;
      return;
    }
    for (std::size_t j = 0; j < servers.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      const Rational d = abs_diff(requests[i].pos, servers[j].pos);
      partial += d;
      self(self, i + 1);
      partial -= d;
      used[j] = false;
    }
  };
  recurse(recurse, 0);
  return *best;
}

}  // namespace oml
