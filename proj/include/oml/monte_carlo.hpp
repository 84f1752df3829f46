#pragma once

// Monte Carlo estimation of E[ALG] / OPT for randomized algorithms.
//
// Trial i always uses derive_seed(master, i), so results do not depend on
// how trials are spread over threads. Values are sorted before reduction to
// make the floating-point sums order-independent as well.

#include "oml/algorithms.hpp"
#include "oml/offline_opt.hpp"
#include "oml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

namespace oml {

struct MonteCarloResult {
  double mean = 0;    // of ALG / OPT
  double stderr_ = 0;
  double opt = 0;
  std::vector<double> values;  // per-trial ALG / OPT, in trial order
};

inline MonteCarloResult monte_carlo_ratio(const AlgorithmFactory& factory, const Instance& instance, int trials,
                                          std::uint64_t seed, unsigned threads = 1) {
  if (trials < 1) throw std::invalid_argument("monte_carlo_ratio: trials must be >= 1");
  const Rational opt = optimal_dp(instance).cost;
  if (opt == 0) throw std::invalid_argument("monte_carlo_ratio: OPT is zero");
  MonteCarloResult out;
  out.opt = to_double(opt);
  out.values.assign(static_cast<std::size_t>(trials), 0.0);

  auto work = [&](unsigned lane, unsigned lanes) {
    auto alg = factory();
    for (auto i = static_cast<std::size_t>(lane); i < out.values.size(); i += lanes) {
      const RunTrace trace = run_online(*alg, instance, derive_seed(seed, i));
      out.values[i] = to_double(trace.total / opt);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }

  std::vector<double> sorted = out.values;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    // Constant samples (deterministic algorithms): report the value itself.
    out.mean = sorted.front();
    return out;
  }
  double sum = 0;
  for (double v : sorted) sum += v;
  out.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double sq = 0;
    for (double v : sorted) sq += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(sq / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  return out;
}

}  // namespace oml
