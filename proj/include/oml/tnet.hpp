#pragma once

// t-net-cost algorithm.
//
// Keeps an internal offline matching M over the requests seen so far. A new
// request r is routed along the alternating path (r -> s1 forward, s1 -> M(s1)
// backward, M(s1) -> s2 forward, ...) ending at a free server that minimizes
//   t * (forward length) - (backward length),
// is matched online to that free server, and M is augmented along the path.
//
// Forward edges on the line are modelled by a chain over all known
// coordinates (edge cost t * gap in both directions), so the graph has O(n)
// edges. Reduced costs under node potentials stay nonnegative for every
// t >= 1 across augmentations, which makes each search one Dijkstra run.

#include "oml/algorithms.hpp"

#include <limits>
#include <map>
#include <queue>
#include <tuple>

namespace oml {

class TNetCostAlgorithm : public OnlineAlgorithm {
 public:
  explicit TNetCostAlgorithm(Rational t) : t_(std::move(t)) {
    if (t_ < 1) throw std::invalid_argument("t-net-cost needs t >= 1");
  }

  const Rational& t() const { return t_; }

  void reset(const Instance& instance, std::uint64_t) override {
    servers_.clear();
    chain_.clear();
    chain_at_.clear();
    server_index_.clear();
    for (const auto& s : instance.servers) {
      ServerNode node;
      node.id = s.id;
      node.pos = s.pos;
      server_index_[s.id] = servers_.size();
      servers_.push_back(std::move(node));
    }
    for (std::size_t i = 0; i < servers_.size(); ++i) {
      const std::size_t c = chain_node(servers_[i].pos);
      servers_[i].chain = c;
      chain_[c].servers.push_back(i);
    }
    // Entry edges (cost 0) need pi(server) <= pi(chain).
    for (auto& s : servers_) s.potential = chain_[s.chain].potential;
  }

  std::string name() const override { return "tnet:" + to_string(t_); }

  ServerId serve(const MatchState& state, const Request& r) override {
    const std::size_t src = chain_node(r.pos);
    const std::size_t S = servers_.size();
    const std::size_t N = S + chain_.size();
    const auto node_potential = [&](std::size_t v) -> const Rational& {
      return v < S ? servers_[v].potential : chain_[v - S].potential;
    };

    std::vector<std::optional<Rational>> dist(N);
    std::vector<std::size_t> pred(N, kNone);
    using Item = std::pair<Rational, std::size_t>;
    auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
    dist[S + src] = Rational(0);
    pq.emplace(Rational(0), S + src);
    std::vector<bool> done(N, false);

    auto relax = [&](std::size_t u, std::size_t v, const Rational& cost) {
      Rational reduced = cost + node_potential(u) - node_potential(v);
      if (reduced < 0) throw std::logic_error("t-net-cost: negative reduced cost");
      reduced += *dist[u];
      if (!dist[v] || reduced < *dist[v]) {
        dist[v] = reduced;
        pred[v] = u;
        pq.emplace(std::move(reduced), v);
      }
    };

    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done[u] || d != *dist[u]) continue;
      done[u] = true;
      if (u >= S) {
        const ChainNode& c = chain_[u - S];
        if (c.prev != kNone) relax(u, S + c.prev, t_ * (c.pos - chain_[c.prev].pos));
        if (c.next != kNone) relax(u, S + c.next, t_ * (chain_[c.next].pos - c.pos));
        for (std::size_t s : c.servers) relax(u, s, Rational(0));
      } else {
        const ServerNode& s = servers_[u];
        if (s.partner) relax(u, S + s.partner->chain, -abs_diff(s.pos, s.partner->pos));
      }
    }

    // Cheapest free endpoint by actual net cost; ties to the smaller position.
    std::size_t best = kNone;
    Rational best_cost;
    for (std::size_t i = 0; i < S; ++i) {
      const ServerNode& s = servers_[i];
      if (s.partner || !dist[i]) continue;
      if (!state.is_free(s.id)) throw std::logic_error("t-net-cost: internal matching out of sync");
      Rational actual = *dist[i] - node_potential(S + src) + s.potential;
      if (best == kNone || actual < best_cost ||
          (actual == best_cost && std::tie(s.pos, s.id) < std::tie(servers_[best].pos, servers_[best].id))) {
        best = i;
        best_cost = std::move(actual);
      }
    }
    if (best == kNone) throw ExhaustedInstance("t-net-cost: no free server reachable");
    last_net_cost_ = best_cost;

    // Potentials become pi + dist. Every node is reachable through the chain.
    for (std::size_t v = 0; v < N; ++v) {
      if (!dist[v]) continue;
      if (v < S) {
        servers_[v].potential += *dist[v];
      } else {
        chain_[v - S].potential += *dist[v];
      }
    }

    // Augment: walk back from the endpoint, re-pairing each server with the
    // request at the start of its forward segment.
    std::size_t cur = best;
    while (true) {
      std::size_t c = pred[cur];
      while (pred[c] != kNone && pred[c] >= S) c = pred[c];
      if (pred[c] == kNone) {
        servers_[cur].partner = Partner{r.id, r.pos, src};
        break;
      }
      const std::size_t prev_server = pred[c];
      servers_[cur].partner = servers_[prev_server].partner;
      cur = prev_server;
    }
    return servers_[best].id;
  }

  /// Net cost of the augmenting path chosen by the last serve().
  const Rational& last_net_cost() const { return last_net_cost_; }

  Rational internal_cost() const {
    Rational total(0);
    for (const auto& s : servers_) {
      if (s.partner) total += abs_diff(s.pos, s.partner->pos);
    }
    return total;
  }

  std::vector<std::pair<RequestId, ServerId>> internal_matching() const {
    std::vector<std::pair<RequestId, ServerId>> out;
    for (const auto& s : servers_) {
      if (s.partner) out.emplace_back(s.partner->request, s.id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Installs an internal matching directly (request id, request position,
  /// server id) and recomputes feasible potentials with Bellman-Ford.
  /// Throws if the matching admits a negative alternating cycle.
  void install_matching(const std::vector<std::tuple<RequestId, Rational, ServerId>>& pairs) {
    for (auto& s : servers_) s.partner.reset();
    for (const auto& [rid, rpos, sid] : pairs) {
      auto it = server_index_.find(sid);
      if (it == server_index_.end()) throw std::invalid_argument("install_matching: unknown server");
      servers_[it->second].partner = Partner{rid, rpos, chain_node(rpos)};
    }
    recompute_potentials();
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  struct Partner {
    RequestId request = 0;
    Rational pos;
    std::size_t chain = 0;
  };

  struct ServerNode {
    ServerId id = 0;
    Rational pos;
    std::size_t chain = 0;
    Rational potential{0};
    std::optional<Partner> partner;
  };

  struct ChainNode {
    Rational pos;
    Rational potential{0};
    std::size_t prev = kNone;
    std::size_t next = kNone;
    std::vector<std::size_t> servers;
  };

  // Returns the chain node at pos, inserting one with a feasible potential.
  std::size_t chain_node(const Rational& pos) {
    auto it = chain_at_.find(pos);
    if (it != chain_at_.end()) return it->second;
    const std::size_t idx = chain_.size();
    ChainNode node;
    node.pos = pos;
    auto after = chain_at_.upper_bound(pos);
    std::optional<Rational> lower;
    if (after != chain_at_.end()) {
      node.next = after->second;
      const ChainNode& b = chain_[after->second];
      lower = b.potential - t_ * (b.pos - pos);
    }
    if (after != chain_at_.begin()) {
      node.prev = std::prev(after)->second;
      const ChainNode& a = chain_[node.prev];
      Rational la = a.potential - t_ * (pos - a.pos);
      if (!lower || la > *lower) lower = la;
    }
    node.potential = lower ? *lower : Rational(0);
    if (node.prev != kNone) chain_[node.prev].next = idx;
    if (node.next != kNone) chain_[node.next].prev = idx;
    chain_.push_back(std::move(node));
    chain_at_.emplace(pos, idx);
    return idx;
  }

  void recompute_potentials() {
    const std::size_t S = servers_.size();
    const std::size_t N = S + chain_.size();
    // Virtual root at distance 0 to all nodes.
    std::vector<Rational> d(N, Rational(0));
    bool changed = true;
    std::size_t rounds = 0;
    while (changed) {
      if (++rounds > N + 1) throw std::runtime_error("t-net-cost: negative alternating cycle in matching");
      changed = false;
      auto relax = [&](std::size_t u, std::size_t v, const Rational& cost) {
        Rational cand = d[u] + cost;
        if (cand < d[v]) {
          d[v] = std::move(cand);
          changed = true;
        }
      };
      for (std::size_t c = 0; c < chain_.size(); ++c) {
        const ChainNode& node = chain_[c];
        if (node.prev != kNone) relax(S + c, S + node.prev, t_ * (node.pos - chain_[node.prev].pos));
        if (node.next != kNone) relax(S + c, S + node.next, t_ * (chain_[node.next].pos - node.pos));
        for (std::size_t s : node.servers) relax(S + c, s, Rational(0));
      }
      for (std::size_t s = 0; s < S; ++s) {
        if (servers_[s].partner) {
          relax(s, S + servers_[s].partner->chain, -abs_diff(servers_[s].pos, servers_[s].partner->pos));
        }
      }
    }
    for (std::size_t s = 0; s < S; ++s) servers_[s].potential = d[s];
    for (std::size_t c = 0; c < chain_.size(); ++c) chain_[c].potential = d[S + c];
  }

  Rational t_;
  std::vector<ServerNode> servers_;
  std::vector<ChainNode> chain_;
  std::map<Rational, std::size_t> chain_at_;
  std::unordered_map<ServerId, std::size_t> server_index_;
  Rational last_net_cost_{0};
};

/// t-net-cost as a choice function of a local interval. The internal
/// matching is taken to be the optimal matching of the interior history,
/// which is exact for t = 1.
inline ChoiceFn tnet_local_choice(Rational t) {
  return [t = std::move(t)](const LocalInterval& I) {
    Instance sub;
    sub.servers.push_back({0, I.left});
    sub.servers.push_back({1, I.right});
    for (std::size_t i = 0; i < I.history.size(); ++i) {
      sub.servers.push_back({static_cast<ServerId>(i + 2), I.history[i].server});
      sub.requests.push_back({static_cast<RequestId>(i), I.history[i].request});
    }
    TNetCostAlgorithm alg(t);
    alg.reset(sub, 0);
    MatchState state(sub);
    std::vector<Server> used(sub.servers.begin() + 2, sub.servers.end());
    const OptResult opt = optimal_balanced(used, sub.requests);
    std::vector<std::tuple<RequestId, Rational, ServerId>> pairs;
    for (const auto& [rid, sid] : opt.matching) pairs.emplace_back(rid, sub.requests[static_cast<std::size_t>(rid)].pos, sid);
    alg.install_matching(pairs);
    for (std::size_t i = 0; i < I.history.size(); ++i) {
      state.commit(sub.requests[i], static_cast<ServerId>(i + 2));
    }
    const Request pending{static_cast<RequestId>(I.history.size()), I.request};
    return alg.serve(state, pending) == 0 ? Side::Left : Side::Right;
  };
}

}  // namespace oml
