#pragma once

// Recursive lower-bound instances.
//
// A tree of level i is two level-(i-1) trees with one request between them.
// Trees are stored flattened with the leftmost server at 0. Each request
// records the server a construction-following algorithm matches it to, so a
// replay can be checked decision by decision.

#include "oml/algorithms.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace oml {

enum class FreeSide { Leftmost, Rightmost };

struct TreeRequest {
  int level = 0;
  Rational pos;
  Rational matched_server;  // expected online partner
};

struct AdversaryTree {
  int level = 0;
  FreeSide free_side = FreeSide::Leftmost;
  std::vector<Rational> servers;       // sorted, servers.front() == 0
  std::vector<TreeRequest> requests;   // arrival order: by level, then position
  std::optional<Rational> request_pos; // top-level request, absent for leaves

  Rational width() const { return servers.back() - servers.front(); }
  Rational free_server() const { return free_side == FreeSide::Leftmost ? servers.front() : servers.back(); }

  static AdversaryTree leaf() {
    AdversaryTree t;
    t.servers = {Rational(0)};
    return t;
  }
};

inline bool same_geometry(const AdversaryTree& a, const AdversaryTree& b) {
  if (a.level != b.level || a.free_side != b.free_side || a.servers != b.servers) return false;
  if (a.requests.size() != b.requests.size()) return false;
  for (std::size_t i = 0; i < a.requests.size(); ++i) {
    if (a.requests[i].level != b.requests[i].level || a.requests[i].pos != b.requests[i].pos ||
        a.requests[i].matched_server != b.requests[i].matched_server) {
      return false;
    }
  }
  return true;
}

namespace detail {

inline void sort_requests(std::vector<TreeRequest>& reqs) {
  std::stable_sort(reqs.begin(), reqs.end(), [](const TreeRequest& x, const TreeRequest& y) {
    if (x.level != y.level) return x.level < y.level;
    return x.pos < y.pos;
  });
}

}  // namespace detail

/// [left] gap_left r gap_right [right]; the new request is matched to the
/// free server on `served` side, leaving the other one free.
inline AdversaryTree combine(const AdversaryTree& left, const Rational& gap_left, const Rational& gap_right,
                             const AdversaryTree& right, Side served) {
  AdversaryTree t;
  t.level = std::max(left.level, right.level) + 1;
  const Rational r = left.width() + gap_left;
  const Rational shift = r + gap_right;
  t.servers = left.servers;
  for (const auto& s : right.servers) t.servers.push_back(s + shift);
  t.requests = left.requests;
  for (const auto& q : right.requests) t.requests.push_back({q.level, q.pos + shift, q.matched_server + shift});
  const Rational s_left = left.free_server();
  const Rational s_right = right.free_server() + shift;
  t.requests.push_back({t.level, r, served == Side::Left ? s_left : s_right});
  detail::sort_requests(t.requests);
  t.request_pos = r;
  // The surviving free server is the one not served, when the children keep
  // their free servers at the outer ends.
  t.free_side = served == Side::Left ? FreeSide::Rightmost : FreeSide::Leftmost;
  return t;
}

inline AdversaryTree mirror_tree(const AdversaryTree& t) {
  AdversaryTree m;
  m.level = t.level;
  m.free_side = t.free_side == FreeSide::Leftmost ? FreeSide::Rightmost : FreeSide::Leftmost;
  const Rational w = t.width();
  m.servers.reserve(t.servers.size());
  for (auto it = t.servers.rbegin(); it != t.servers.rend(); ++it) m.servers.push_back(w - *it);
  for (const auto& q : t.requests) m.requests.push_back({q.level, w - q.pos, w - q.matched_server});
  detail::sort_requests(m.requests);
  if (t.request_pos) m.request_pos = w - *t.request_pos;
  return m;
}

/// Local interval seen by the new request of combine(left, a, b, right),
/// with the children's internal match history in arrival order.
inline LocalInterval probe_interval(const AdversaryTree& left, const Rational& gap_left, const Rational& gap_right,
                                    const AdversaryTree& right) {
  const Rational r = left.width() + gap_left;
  const Rational shift = r + gap_right;
  LocalInterval I;
  I.left = left.servers.front();
  I.right = right.servers.back() + shift;
  I.request = r;
  std::vector<TreeRequest> reqs = left.requests;
  for (const auto& q : right.requests) reqs.push_back({q.level, q.pos + shift, q.matched_server + shift});
  detail::sort_requests(reqs);
  for (const auto& q : reqs) I.history.push_back({q.matched_server, q.pos});
  return I;
}

struct GapLevel {
  Rational a;
  Rational b;
  Rational x;
};

struct GapLedger {
  std::vector<GapLevel> levels;
  Rational eps{0};

  std::vector<Rational> x() const {
    std::vector<Rational> out;
    for (const auto& l : levels) out.push_back(l.x);
    return out;
  }
};

struct BuiltInstance {
  Instance instance;
  GapLedger ledger;
  // Expected online partner of each request (request id -> server id), when
  // the construction prescribes one.
  std::vector<std::pair<RequestId, ServerId>> expected;
};

inline nlohmann::json ledger_json(const GapLedger& ledger, const std::string& mode) {
  nlohmann::json j;
  j["mode"] = mode;
  j["eps"] = to_string(ledger.eps);
  j["a"] = nlohmann::json::array();
  j["b"] = nlohmann::json::array();
  j["x"] = nlohmann::json::array();
  for (const auto& l : ledger.levels) {
    j["a"].push_back(to_string(l.a));
    j["b"].push_back(to_string(l.b));
    j["x"].push_back(to_string(l.x));
  }
  j["k"] = ledger.levels.size();
  return j;
}

inline GapLedger ledger_from_json(const nlohmann::json& j) {
  GapLedger g;
  g.eps = parse_rational(j.at("eps").get<std::string>());
  const auto& a = j.at("a");
  const auto& b = j.at("b");
  for (std::size_t i = 0; i < a.size(); ++i) {
    GapLevel l{parse_rational(a[i].get<std::string>()), parse_rational(b[i].get<std::string>()), Rational(0)};
    l.x = l.a + l.b;
    g.levels.push_back(l);
  }
  return g;
}

namespace detail {

struct Block {
  const AdversaryTree* tree;
  Rational offset;
};

// Lays blocks out left to right (already offset) and numbers servers and
// requests. Requests are ordered by level, then by position.
inline BuiltInstance flatten(const std::vector<Block>& blocks, const std::vector<Rational>& extra_requests) {
  BuiltInstance out;
  std::vector<Rational> servers;
  std::vector<TreeRequest> reqs;
  for (const auto& b : blocks) {
    for (const auto& s : b.tree->servers) servers.push_back(s + b.offset);
    for (const auto& q : b.tree->requests) reqs.push_back({q.level, q.pos + b.offset, q.matched_server + b.offset});
  }
  std::sort(servers.begin(), servers.end());
  sort_requests(reqs);
  for (std::size_t i = 0; i < servers.size(); ++i) out.instance.servers.push_back({static_cast<ServerId>(i), servers[i]});
  auto server_id_at = [&](const Rational& p) {
    auto it = std::lower_bound(servers.begin(), servers.end(), p);
    return static_cast<ServerId>(it - servers.begin());
  };
  RequestId rid = 0;
  for (const auto& q : reqs) {
    out.instance.requests.push_back({rid, q.pos});
    out.expected.emplace_back(rid, server_id_at(q.matched_server));
    ++rid;
  }
  for (const auto& p : extra_requests) {
    out.instance.requests.push_back({rid, p});
    out.expected.emplace_back(rid, server_id_at(p));
    ++rid;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fixed symmetric construction

struct SymmetricTrees {
  std::vector<AdversaryTree> left_free;   // T_i, leftmost server stays free
  std::vector<AdversaryTree> right_free;  // mirror images
};

/// Per level: the interval [T_{i-1}] 1 r (1+eps) [mirror T_{i-1}] is served
/// on the nearer (left) side, leaving its rightmost server free; T_i is its
/// mirror image. The emitted instance is the level-k interval itself.
inline SymmetricTrees symmetric_trees(int k, const Rational& eps) {
  SymmetricTrees out;
  out.left_free.push_back(AdversaryTree::leaf());
  out.right_free.push_back(AdversaryTree::leaf());
  out.right_free.back().free_side = FreeSide::Rightmost;
  for (int i = 1; i <= k; ++i) {
    AdversaryTree rf = combine(out.left_free.back(), Rational(1), Rational(1) + eps, out.right_free.back(), Side::Left);
    AdversaryTree lf = mirror_tree(rf);
    out.left_free.push_back(std::move(lf));
    out.right_free.push_back(std::move(rf));
  }
  return out;
}

inline BuiltInstance build_symmetric(int k, const Rational& eps) {
  if (k < 1) throw std::invalid_argument("build_symmetric: k must be >= 1");
  if (eps <= 0) throw std::invalid_argument("build_symmetric: eps must be positive");
  const SymmetricTrees trees = symmetric_trees(k, eps);
  BuiltInstance out = detail::flatten({{&trees.right_free.back(), Rational(0)}}, {});
  out.ledger.eps = eps;
  for (int i = 1; i <= k; ++i) out.ledger.levels.push_back({Rational(1), Rational(1) + eps, Rational(2) + eps});
  out.instance.meta["ledger"] = ledger_json(out.ledger, "symmetric");
  return out;
}

// ---------------------------------------------------------------------------
// Adaptive construction

struct UnboundedWitness {
  int level = 0;
  LocalInterval interval;
  Side side = Side::Right;
  Rational gap;
};

inline nlohmann::json witness_json(const UnboundedWitness& w) {
  nlohmann::json j;
  j["level"] = w.level;
  j["side"] = to_string(w.side);
  j["gap"] = to_string(w.gap);
  j["interval"] = {{"left", to_string(w.interval.left)},
                   {"request", to_string(w.interval.request)},
                   {"right", to_string(w.interval.right)}};
  j["history"] = nlohmann::json::array();
  for (const auto& h : w.interval.history) {
    j["history"].push_back({{"server", to_string(h.server)}, {"request", to_string(h.request)}});
  }
  return j;
}

struct FlipAt {
  Rational b;
};

using FlipResult = std::variant<FlipAt, UnboundedWitness>;

/// Searches b in (0, budget] with C(interval(a, b)) = Right and
/// C(interval(a, b + eps)) = Left. Doubling scan b = eps * 2^j up to the
/// budget (the budget itself is always probed), then bisection on multiples
/// of eps down to a bracket of width eps. No monotonicity is assumed; any
/// Right -> Left change between consecutive scan points is used.
inline FlipResult find_flip_gap(const ChoiceFn& choice, const AdversaryTree& left, const AdversaryTree& right,
                               const Rational& a, const Rational& eps, const Rational& budget, int level = 0) {
  if (a <= 0) throw std::invalid_argument("find_flip_gap: a must be positive");
  if (eps <= 0) throw std::invalid_argument("find_flip_gap: eps must be positive");
  auto probe = [&](const Rational& b) { return choice(probe_interval(left, a, b, right)); };

  std::vector<Rational> scan;
  for (Rational b = eps; b < budget; b *= 2) scan.push_back(b);
  scan.push_back(budget);
  std::vector<Side> sides;
  sides.reserve(scan.size());
  for (const auto& b : scan) sides.push_back(probe(b));

  for (std::size_t j = 0; j + 1 < scan.size(); ++j) {
    if (sides[j] != Side::Right || sides[j + 1] != Side::Left) continue;
    // Bracket in units of eps: lo * eps is Right, hi * eps is Left.
    Rational lo_q = scan[j] / eps;
    Rational hi_q = scan[j + 1] / eps;
    mpz_class lo = lo_q.get_num() / lo_q.get_den();
    mpz_class hi = hi_q.get_num() / hi_q.get_den();
    if (Rational(lo) != lo_q || Rational(hi) != hi_q) {
      // The budget is not a multiple of eps; fall back to the Right side of the bracket.
      mpz_class h = hi;
      if (Rational(h) * eps > scan[j + 1]) h -= 1;
      hi = h;
      if (probe(Rational(hi) * eps) != Side::Left) continue;
    }
    while (hi - lo > 1) {
      mpz_class mid = (lo + hi) / 2;
      if (probe(Rational(mid) * eps) == Side::Right) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return FlipAt{Rational(lo) * eps};
  }

  UnboundedWitness w;
  w.level = level;
  const bool all_left = std::all_of(sides.begin(), sides.end(), [](Side s) { return s == Side::Left; });
  w.gap = all_left ? scan.front() : budget;
  w.side = all_left ? Side::Left : sides.back();
  w.interval = probe_interval(left, a, w.gap, right);
  return w;
}

using AdaptiveResult = std::variant<BuiltInstance, UnboundedWitness>;

/// Per level: a_i = 1 and b_i from the flip search; T_i = [T_{i-1}] a r b
/// [Tbar_{i-1}] served Right, Tbar_i the same with b + eps served Left. The
/// instance is T_k followed by Tbar_k (no top request) and two requests
/// collocated with the two remaining free servers.
inline AdaptiveResult build_adaptive(const ChoiceFn& choice, int k, const Rational& eps, const Rational& budget) {
  if (k < 1) throw std::invalid_argument("build_adaptive: k must be >= 1");
  AdversaryTree lf = AdversaryTree::leaf();
  AdversaryTree rf = AdversaryTree::leaf();
  rf.free_side = FreeSide::Rightmost;
  GapLedger ledger;
  ledger.eps = eps;
  const Rational a(1);
  for (int i = 1; i <= k; ++i) {
    FlipResult flip = find_flip_gap(choice, lf, rf, a, eps, budget, i);
    if (auto* w = std::get_if<UnboundedWitness>(&flip)) return *w;
    const Rational b = std::get<FlipAt>(flip).b;
    AdversaryTree next_lf = combine(lf, a, b, rf, Side::Right);
    AdversaryTree next_rf = combine(lf, a, b + eps, rf, Side::Left);
    lf = std::move(next_lf);
    rf = std::move(next_rf);
    ledger.levels.push_back({a, b, a + b});
  }
  const Rational offset = lf.width() + a;
  const Rational left_free = lf.free_server();
  const Rational right_free = rf.free_server() + offset;
  BuiltInstance out = detail::flatten({{&lf, Rational(0)}, {&rf, offset}}, {left_free, right_free});
  out.ledger = ledger;
  out.instance.meta["ledger"] = ledger_json(ledger, "adaptive");
  return out;
}

// ---------------------------------------------------------------------------
// Randomized construction

/// Both children at every level are the same tree; no orientation. The
/// leftmost server is placed at `origin`.
inline BuiltInstance build_randomized(const std::vector<std::pair<Rational, Rational>>& schedule, int k,
                                      const Rational& origin = Rational(2)) {
  if (k < 1) throw std::invalid_argument("build_randomized: k must be >= 1");
  if (schedule.size() != static_cast<std::size_t>(k)) {
    throw std::invalid_argument("build_randomized: schedule length " + std::to_string(schedule.size()) +
                                " != k = " + std::to_string(k));
  }
  AdversaryTree t = AdversaryTree::leaf();
  GapLedger ledger;
  for (int i = 1; i <= k; ++i) {
    const auto& [a, b] = schedule[static_cast<std::size_t>(i - 1)];
    if (a < 0 || b < 0) throw std::invalid_argument("build_randomized: gaps must be nonnegative");
    t = combine(t, a, b, t, Side::Left);
    ledger.levels.push_back({a, b, a + b});
  }
  BuiltInstance out = detail::flatten({{&t, origin}}, {});
  out.expected.clear();  // randomized algorithms have no prescribed partners
  out.ledger = ledger;
  out.instance.meta["ledger"] = ledger_json(ledger, "randomized");
  return out;
}

inline std::vector<std::pair<Rational, Rational>> unit_schedule(int k) {
  return std::vector<std::pair<Rational, Rational>>(static_cast<std::size_t>(k), {Rational(1), Rational(1)});
}

/// Replays `trace` against the expected partners; returns the index of the
/// first mismatching request, or nullopt.
inline std::optional<std::size_t> first_deviation(const BuiltInstance& built, const RunTrace& trace) {
  for (std::size_t i = 0; i < built.expected.size() && i < trace.steps.size(); ++i) {
    if (built.expected[i] != std::pair{trace.steps[i].request, trace.steps[i].server}) return i;
  }
  return std::nullopt;
}

}  // namespace oml
