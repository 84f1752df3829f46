#pragma once

// Algorithm selector strings:
//   greedy | wfa | tnet:<t> | harmonic | biased:<beta>
// plus test stubs const:left | const:right | broken.

#include "oml/algorithms.hpp"
#include "oml/tnet.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace oml {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AlgorithmSelector {
  enum class Kind { Greedy, Wfa, TNet, Harmonic, Biased, ConstLeft, ConstRight, Broken };
  Kind kind = Kind::Greedy;
  Rational param{1};
  std::string text;
};

inline AlgorithmSelector parse_selector(const std::string& text) {
  using K = AlgorithmSelector::Kind;
  AlgorithmSelector sel;
  sel.text = text;
  auto with_param = [&](const std::string& prefix, K kind) {
    if (text.rfind(prefix, 0) != 0) return false;
    try {
      sel.param = parse_rational(text.substr(prefix.size()));
    } catch (const ParseError& e) {
      throw UsageError("bad parameter in algorithm selector '" + text + "': " + e.what());
    }
    sel.kind = kind;
    return true;
  };
  if (text == "greedy") {
    sel.kind = K::Greedy;
  } else if (text == "wfa") {
    sel.kind = K::Wfa;
  } else if (text == "harmonic") {
    sel.kind = K::Harmonic;
  } else if (text == "const:left") {
    sel.kind = K::ConstLeft;
  } else if (text == "const:right") {
    sel.kind = K::ConstRight;
  } else if (text == "broken") {
    sel.kind = K::Broken;
  } else if (with_param("tnet:", K::TNet)) {
    if (sel.param < 1) throw UsageError("tnet needs t >= 1");
  } else if (with_param("biased:", K::Biased)) {
    if (sel.param <= 0) throw UsageError("biased needs beta > 0");
  } else {
    throw UsageError("unknown algorithm selector '" + text + "'");
  }
  return sel;
}

inline std::unique_ptr<OnlineAlgorithm> make_algorithm(const AlgorithmSelector& sel) {
  using K = AlgorithmSelector::Kind;
  switch (sel.kind) {
    case K::Greedy: return make_greedy();
    case K::Wfa: return std::make_unique<WfaAlgorithm>();
    case K::TNet: return std::make_unique<TNetCostAlgorithm>(sel.param);
    case K::Harmonic: return std::make_unique<HarmonicAlgorithm>();
    case K::Biased: return make_biased({sel.param, Side::Right});
    case K::ConstLeft:
      return std::make_unique<LocalRuleAlgorithm>("const:left", [](const LocalInterval&) { return Side::Left; }, false);
    case K::ConstRight:
      return std::make_unique<LocalRuleAlgorithm>("const:right", [](const LocalInterval&) { return Side::Right; }, false);
    case K::Broken: return std::make_unique<BrokenAlgorithm>();
  }
  throw std::logic_error("unreachable");
}

inline AlgorithmFactory make_factory(const AlgorithmSelector& sel) {
  return [sel] { return make_algorithm(sel); };
}

/// Choice function for deterministic local algorithms; nullopt for
/// randomized or non-local selectors.
inline std::optional<ChoiceFn> local_choice(const AlgorithmSelector& sel) {
  using K = AlgorithmSelector::Kind;
  switch (sel.kind) {
    case K::Greedy: return ChoiceFn(greedy_choice);
    case K::Wfa: return ChoiceFn(wfa_local_choice);
    case K::TNet: return tnet_local_choice(sel.param);
    case K::Biased: {
      BiasParams p{sel.param, Side::Right};
      return ChoiceFn([p](const LocalInterval& I) { return biased_family_choice(p, I); });
    }
    case K::ConstLeft: return ChoiceFn([](const LocalInterval&) { return Side::Left; });
    case K::ConstRight: return ChoiceFn([](const LocalInterval&) { return Side::Right; });
    case K::Harmonic:
    case K::Broken: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace oml
