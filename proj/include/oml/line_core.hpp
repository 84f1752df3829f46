#pragma once

// Instances, matching state and local-interval geometry on the real line.

#include "oml/rational.hpp"

#include "json.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oml {

using ServerId = int;
using RequestId = int;

enum class Side { Left, Right };

constexpr Side opposite(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

class ExhaustedInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OneSidedInterval : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An online algorithm tried to commit a server that is not free.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Server {
  ServerId id = 0;
  Rational pos;
  bool operator==(const Server&) const = default;
};

struct Request {
  RequestId id = 0;
  Rational pos;
  bool operator==(const Request&) const = default;
};

struct Instance {
  std::vector<Server> servers;
  std::vector<Request> requests;  // arrival order
  nlohmann::json meta = nlohmann::json::object();

  void validate() const {
    std::set<ServerId> ids;
    for (const auto& s : servers) {
      if (!ids.insert(s.id).second) {
        throw std::invalid_argument("duplicate server id " + std::to_string(s.id));
      }
    }
    std::set<RequestId> rids;
    for (const auto& r : requests) {
      if (!rids.insert(r.id).second) {
        throw std::invalid_argument("duplicate request id " + std::to_string(r.id));
      }
    }
    if (requests.size() > servers.size()) {
      throw std::invalid_argument("more requests than servers");
    }
  }

  std::vector<Rational> server_positions() const {
    std::vector<Rational> out;
    out.reserve(servers.size());
    for (const auto& s : servers) out.push_back(s.pos);
    return out;
  }

  std::vector<Rational> request_positions() const {
    std::vector<Rational> out;
    out.reserve(requests.size());
    for (const auto& r : requests) out.push_back(r.pos);
    return out;
  }
};

struct MatchedPair {
  RequestId request = 0;
  ServerId server = 0;
  Rational request_pos;
  Rational server_pos;
};

/// Mutable matching under construction. Single writer; refers to an Instance
/// that must outlive it.
class MatchState {
 public:
  explicit MatchState(const Instance& instance) : instance_(&instance) {
    index_.reserve(instance.servers.size());
    for (std::size_t i = 0; i < instance.servers.size(); ++i) {
      const auto& s = instance.servers[i];
      if (!index_.emplace(s.id, i).second) {
        throw std::invalid_argument("duplicate server id " + std::to_string(s.id));
      }
      free_.emplace(s.pos, s.id);
    }
    matched_.assign(instance.servers.size(), false);
  }

  const Instance& instance() const { return *instance_; }

  bool has_server(ServerId id) const { return index_.contains(id); }

  const Server& server(ServerId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown server id " + std::to_string(id));
    return instance_->servers[it->second];
  }

  bool is_free(ServerId id) const {
    auto it = index_.find(id);
    return it != index_.end() && !matched_[it->second];
  }

  std::size_t free_count() const { return free_.size(); }

  /// Free servers ordered by (position, id).
  const std::set<std::pair<Rational, ServerId>>& free_servers() const { return free_; }

  std::span<const MatchedPair> pairs() const { return pairs_; }

  void commit(const Request& r, ServerId s) {
    auto it = index_.find(s);
    if (it == index_.end()) {
      throw ContractViolation("server " + std::to_string(s) + " does not exist");
    }
    if (matched_[it->second]) {
      throw ContractViolation("server " + std::to_string(s) + " is already matched");
    }
    const Server& srv = instance_->servers[it->second];
    matched_[it->second] = true;
    free_.erase({srv.pos, srv.id});
    pairs_.push_back({r.id, s, r.pos, srv.pos});
  }

 private:
  const Instance* instance_;
  std::unordered_map<ServerId, std::size_t> index_;
  std::vector<bool> matched_;
  std::set<std::pair<Rational, ServerId>> free_;
  std::vector<MatchedPair> pairs_;
};

inline Rational matching_cost(const MatchState& state) {
  Rational total(0);
  for (const auto& p : state.pairs()) total += abs_diff(p.request_pos, p.server_pos);
  return total;
}

/// Cost of (request id, server id) pairs of an instance.
inline Rational matching_cost(const Instance& inst, const std::vector<std::pair<RequestId, ServerId>>& pairs) {
  std::unordered_map<ServerId, const Rational*> spos;
  std::unordered_map<RequestId, const Rational*> rpos;
  for (const auto& s : inst.servers) spos[s.id] = &s.pos;
  for (const auto& r : inst.requests) rpos[r.id] = &r.pos;
  Rational total(0);
  for (const auto& [rid, sid] : pairs) {
    auto s = spos.find(sid);
    auto r = rpos.find(rid);
    if (s == spos.end() || r == rpos.end()) throw std::invalid_argument("matching_cost: unknown id");
    total += abs_diff(*r->second, *s->second);
  }
  return total;
}

struct SurroundingServers {
  std::optional<ServerId> left;
  std::optional<ServerId> right;
};

/// Nearest free server at position <= r and nearest other free server at
/// position >= r. A single server collocated with r is reported on the left.
inline SurroundingServers surrounding_free_servers(const MatchState& state, const Rational& r) {
  const auto& free = state.free_servers();
  if (free.empty()) throw ExhaustedInstance("no free servers left");
  SurroundingServers out;
  auto above = std::upper_bound(free.begin(), free.end(), r,
                                [](const Rational& x, const auto& e) { return x < e.first; });
  auto at_or_above = std::lower_bound(free.begin(), free.end(), r,
                                      [](const auto& e, const Rational& x) { return e.first < x; });
  auto left_it = free.end();
  if (above != free.begin()) {
    left_it = std::prev(above);
    out.left = left_it->second;
  }
  auto right_it = at_or_above == left_it ? above : at_or_above;
  if (right_it != free.end()) out.right = right_it->second;
  return out;
}

struct HistoryEntry {
  Rational server;
  Rational request;
  bool operator==(const HistoryEntry&) const = default;
};

/// Window between the two surrounding free servers of a pending request,
/// with the match history inside it in commit order.
struct LocalInterval {
  Rational left;
  Rational request;
  Rational right;
  std::vector<HistoryEntry> history;

  Rational d_left() const { return request - left; }
  Rational d_right() const { return right - request; }
  Rational midpoint() const { return (left + right) / 2; }

  bool operator==(const LocalInterval&) const = default;
};

inline void check_well_formed(const LocalInterval& I) {
  if (!(I.left <= I.request && I.request <= I.right) || I.left == I.right) {
    throw std::invalid_argument("malformed local interval");
  }
}

inline LocalInterval mirror_interval(const LocalInterval& I) {
  const Rational sum = I.left + I.right;
  LocalInterval out;
  out.left = I.left;
  out.right = I.right;
  out.request = sum - I.request;
  out.history.reserve(I.history.size());
  for (const auto& h : I.history) out.history.push_back({sum - h.server, sum - h.request});
  return out;
}

inline LocalInterval translate_interval(const LocalInterval& I, const Rational& offset) {
  LocalInterval out;
  out.left = I.left + offset;
  out.right = I.right + offset;
  out.request = I.request + offset;
  out.history.reserve(I.history.size());
  for (const auto& h : I.history) out.history.push_back({h.server + offset, h.request + offset});
  return out;
}

/// Interval equal to its own reflection (the footnote case).
inline bool is_self_mirror(const LocalInterval& I) {
  const LocalInterval m = mirror_interval(I);
  if (m.request != I.request) return false;
  auto key = [](const LocalInterval& x) {
    std::vector<std::pair<Rational, Rational>> v;
    for (const auto& h : x.history) v.emplace_back(h.server, h.request);
    std::sort(v.begin(), v.end());
    return v;
  };
  return key(m) == key(I);
}

/// Builds the local interval for a pending request at r. Pairs whose server
/// and request both lie in [s_L, s_R] form the history.
inline LocalInterval extract_local_interval(const MatchState& state, const Rational& r,
                                            bool with_history = true) {
  const auto around = surrounding_free_servers(state, r);
  if (!around.left || !around.right) {
    throw OneSidedInterval("request at " + to_string(r) + " has free servers on one side only");
  }
  LocalInterval I;
  I.left = state.server(*around.left).pos;
  I.right = state.server(*around.right).pos;
  I.request = r;
  if (with_history) {
    for (const auto& p : state.pairs()) {
      auto inside = [&](const Rational& x) { return I.left <= x && x <= I.right; };
      if (inside(p.server_pos) && inside(p.request_pos)) {
        I.history.push_back({p.server_pos, p.request_pos});
      }
    }
  }
  return I;
}

}  // namespace oml
