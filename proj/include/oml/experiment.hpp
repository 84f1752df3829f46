#pragma once

// Construct / run / sweep cells behind the command-line tool.

#include "oml/adversary.hpp"
#include "oml/analysis.hpp"
#include "oml/monte_carlo.hpp"
#include "oml/run_config.hpp"
#include "oml/selector.hpp"

#include <variant>

namespace oml {

/// Deterministic algorithms report exact ratios; randomized ones go through
/// Monte Carlo.
inline bool is_randomized(const AlgorithmSelector& sel) { return sel.kind == AlgorithmSelector::Kind::Harmonic; }

/// Builds the instance for config.mode. Adaptive mode needs a deterministic
/// local choice function for config.algo; a missing flip yields a witness.
inline AdaptiveResult construct_instance(const RunConfig& c) {
  const AlgorithmSelector sel = parse_selector(c.algo);
  BuiltInstance built;
  if (c.mode == "symmetric") {
    built = build_symmetric(c.k, c.eps);
  } else if (c.mode == "randomized") {
    built = build_randomized(unit_schedule(c.k), c.k);
  } else if (c.mode == "adaptive") {
    const auto choice = local_choice(sel);
    if (!choice) throw UsageError("adaptive mode needs a deterministic local algorithm, got '" + c.algo + "'");
    AdaptiveResult r = build_adaptive(*choice, c.k, c.eps, c.budget);
    if (std::holds_alternative<UnboundedWitness>(r)) return r;
    built = std::move(std::get<BuiltInstance>(r));
    built.instance.meta["adversary_for"] = c.algo;
  } else {
    throw UsageError("unknown mode '" + c.mode + "'");
  }
  built.instance.meta["mode"] = c.mode;
  built.instance.meta["k"] = c.k;
  return built;
}

/// Reference bound for a built instance, from its recorded ledger.
inline std::optional<Rational> instance_bound(const Instance& inst) {
  if (!inst.meta.contains("ledger")) return std::nullopt;
  const nlohmann::json& lj = inst.meta.at("ledger");
  const std::string mode = lj.value("mode", "");
  const GapLedger ledger = ledger_from_json(lj);
  if (ledger.levels.empty()) return std::nullopt;
  if (mode == "symmetric") return theorem1_ratio(static_cast<int>(ledger.levels.size()));
  if (mode == "adaptive") return ratio_bound_deterministic(ledger.x());
  if (mode == "randomized" && ledger.levels.size() >= 2) return ratio_bound_randomized(randomized_ledger(ledger));
  return std::nullopt;
}

struct RunOutcome {
  ResultRow row;
  std::optional<Rational> cost;  // exact online cost, deterministic runs
  Rational opt;
};

/// Runs sel on inst. Throws ContractViolation if the algorithm breaks the
/// matching contract.
inline RunOutcome evaluate_instance(const Instance& inst, const AlgorithmSelector& sel, const RunConfig& c) {
  RunOutcome out;
  ResultRow& row = out.row;
  row.mode = inst.meta.value("mode", c.mode);
  row.algorithm = sel.text;
  row.k = inst.meta.value("k", c.k);
  row.eps = inst.meta.contains("ledger") ? parse_rational(inst.meta["ledger"].value("eps", "0")) : c.eps;
  row.bound = instance_bound(inst);
  out.opt = optimal_dp(inst).cost;
  if (is_randomized(sel)) {
    const MonteCarloResult mc = monte_carlo_ratio(make_factory(sel), inst, c.trials, c.seed);
    row.trials = c.trials;
    row.mean = mc.mean;
    row.stderr_ = mc.stderr_;
  } else {
    auto alg = make_algorithm(sel);
    const RunTrace t = run_online(*alg, inst, c.seed);
    if (out.opt == 0) throw std::invalid_argument("instance has zero offline cost");
    out.cost = t.total;
    row.ratio = t.total / out.opt;
    row.trials = 1;
    row.mean = to_double(*row.ratio);
  }
  return out;
}

/// Records the replay ratio of the constructing algorithm in the instance.
inline void record_replay(BuiltInstance& built, const RunConfig& c) {
  const AlgorithmSelector sel = parse_selector(c.algo);
  if (is_randomized(sel)) return;
  const RunOutcome r = evaluate_instance(built.instance, sel, c);
  built.instance.meta["replay"] = {{"algorithm", c.algo},
                                   {"cost", to_string(*r.cost)},
                                   {"opt", to_string(r.opt)},
                                   {"ratio", to_string(*r.row.ratio)}};
}

/// One sweep cell: construct followed by run. Failures become annotated rows.
inline ResultRow sweep_cell(RunConfig c, const std::string& algo, int k) {
  c.algo = algo;
  c.k = k;
  ResultRow failed;
  failed.mode = c.mode;
  failed.algorithm = algo;
  failed.k = k;
  failed.eps = c.eps;
  failed.trials = 0;
  try {
    const AlgorithmSelector sel = parse_selector(algo);
    AdaptiveResult built = construct_instance(c);
    if (const auto* w = std::get_if<UnboundedWitness>(&built)) {
      failed.status = "unbounded-witness at level " + std::to_string(w->level);
      return failed;
    }
    return evaluate_instance(std::get<BuiltInstance>(built).instance, sel, c).row;
  } catch (const ContractViolation& e) {
    failed.status = std::string("contract-violation: ") + e.what();
  } catch (const std::exception& e) {
    failed.status = std::string("error: ") + e.what();
  }
  return failed;
}

inline std::vector<ResultRow> run_sweep(const RunConfig& c) {
  const int lo = c.k_min ? c.k_min : c.k;
  const int hi = c.k_max ? c.k_max : c.k;
  const std::vector<std::string> algos = c.algos.empty() ? std::vector<std::string>{c.algo} : c.algos;
  std::vector<ResultRow> rows;
  for (const auto& a : algos) {
    for (int k = lo; k <= hi; ++k) rows.push_back(sweep_cell(c, a, k));
  }
  sort_rows(rows);
  return rows;
}

}  // namespace oml
