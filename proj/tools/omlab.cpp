// omlab: build lower-bound instances for online matching on the line, run
// algorithms on them, verify the supporting lemmas and sweep parameter grids.
//
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 unbounded
// witness, 4 algorithm contract violation.

#include "oml/experiment.hpp"
#include "oml/instance_io.hpp"
#include "oml/suites.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

namespace {

using namespace oml;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitWitness = 3;
constexpr int kExitContract = 4;

// Flags mirror config keys; explicitly given flags override the config file.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : read_config(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) apply_setting(c, key, values.at(key));
    }
    validate(c);
    return c;
  }
};

void add_common(CLI::App* app, FlagSet& f) {
  app->add_option("--config", f.config_path, "flat key=value config file");
  f.add(app, "--mode", "mode", "symmetric | adaptive | randomized");
  f.add(app, "--algo", "algo", "greedy | wfa | tnet:<t> | harmonic | biased:<beta>");
  f.add(app, "--k", "k", "tree depth");
  f.add(app, "--eps", "eps", "gap perturbation as num/den");
  f.add(app, "--budget", "budget", "flip search budget as num/den");
  f.add(app, "--trials", "trials", "Monte Carlo trials for randomized algorithms");
  f.add(app, "--seed", "seed", "master seed");
  f.add(app, "--out", "out", "output path (stdout when empty)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string x_summary(const GapLedger& ledger) {
  std::string s = "(";
  const auto x = ledger.x();
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + to_decimal(x[i]);
  return s + ")";
}

int cmd_construct(const RunConfig& c) {
  AdaptiveResult r = construct_instance(c);
  if (const auto* w = std::get_if<UnboundedWitness>(&r)) {
    write_text(c.out, witness_json(*w).dump(2) + "\n");
    std::cerr << "no flip found at level " << w->level << " up to gap " << to_string(w->gap) << "; "
              << c.algo << " always chooses " << to_string(w->side) << "\n";
    return kExitWitness;
  }
  BuiltInstance& built = std::get<BuiltInstance>(r);
  record_replay(built, c);
  write_text(c.out, dump_instance(built.instance));
  if (!c.out.empty()) {
    std::cout << "wrote " << c.out << ": " << built.instance.servers.size() << " servers, "
              << built.instance.requests.size() << " requests, x = " << x_summary(built.ledger) << "\n";
  }
  return kExitOk;
}

void append_csv(const std::string& path, const ResultRow& row) {
  if (path.empty() || path == "-") {
    std::cout << kCsvHeader << "\n" << csv_row(row) << "\n";
    return;
  }
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) out << kCsvHeader << "\n";
  out << csv_row(row) << "\n";
}

int cmd_run(const RunConfig& c) {
  if (c.instance.empty()) throw UsageError("run needs --instance");
  const Instance inst = read_instance(c.instance);
  const RunOutcome r = evaluate_instance(inst, parse_selector(c.algo), c);
  if (r.row.ratio) {
    std::cout << "ratio " << to_string(*r.row.ratio) << " " << to_decimal(*r.row.ratio) << "\n";
  } else {
    std::cout << "mean " << to_decimal(r.row.mean) << " stderr " << to_decimal(r.row.stderr_) << " trials "
              << r.row.trials << "\n";
  }
  if (r.row.bound) std::cout << "bound " << to_string(*r.row.bound) << " " << to_decimal(*r.row.bound) << "\n";
  append_csv(c.out, r.row);
  return kExitOk;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"prefix-mass",   "sum-lemma",      "harmonic-symmetry",
                                              "offline-oracle", "tnet-invariant", "probes"};
  return names;
}

bool report(const SuiteReport& r) {
  std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " cases=" << r.cases << " failures=" << r.failures
            << "\n";
  if (r.counterexample) std::cout << "  counterexample: " << r.counterexample->dump() << "\n";
  return r.passed();
}

int cmd_verify(const RunConfig& c) {
  std::vector<std::string> chosen;
  if (c.suite == "all") {
    chosen = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), c.suite) != suite_names().end()) {
    chosen = {c.suite};
  } else {
    throw UsageError("unknown suite '" + c.suite + "'");
  }
  bool ok = true;
  for (const auto& s : chosen) {
    if (s == "prefix-mass") ok &= report(suite_prefix_mass(10000, c.seed));
    if (s == "sum-lemma") ok &= report(suite_sum_lemma(10000, c.seed));
    if (s == "harmonic-symmetry") ok &= report(suite_harmonic_symmetry(std::min(c.k, 8)));
    if (s == "offline-oracle") ok &= report(suite_offline_oracle(1000, c.seed));
    if (s == "tnet-invariant") ok &= report(suite_tnet_invariant(200, c.seed));
    if (s == "probes") {
      const ProbeSuiteReport p = suite_probes(1000, c.seed);
      for (const auto& r : p.locality) ok &= report(r);
      for (const auto& r : p.symmetry) ok &= report(r);
      std::cout << (p.biased_witness ? "PASS " : "FAIL ") << "asymmetry/biased:2 probes=" << p.biased_probes << "\n";
      if (p.biased_witness) std::cout << "  witness: " << p.biased_witness->dump() << "\n";
      ok &= p.biased_witness.has_value();
    }
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const RunConfig& c, const std::string& plot_prefix) {
  const std::vector<ResultRow> rows = run_sweep(c);
  write_text(c.out, csv_document(rows));
  std::string prefix = plot_prefix;
  if (prefix.empty() && !c.out.empty() && c.out != "-") {
    prefix = (std::filesystem::path(c.out).parent_path() / std::filesystem::path(c.out).stem()).string();
  }
  if (!prefix.empty()) {
    for (const auto& [algo, text] : plot_documents(rows)) write_text(prefix + "." + file_stem(algo) + ".dat", text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower-bound constructions for online matching on the line"};
  app.require_subcommand(1);

  FlagSet construct_flags, run_flags, verify_flags, sweep_flags;
  CLI::App* construct = app.add_subcommand("construct", "build an instance file");
  add_common(construct, construct_flags);

  CLI::App* run = app.add_subcommand("run", "run an algorithm on an instance file and append a CSV row");
  add_common(run, run_flags);
  run_flags.add(run, "--instance", "instance", "instance JSON file");

  CLI::App* verify = app.add_subcommand("verify", "run property suites");
  add_common(verify, verify_flags);
  verify_flags.add(verify, "--suite", "suite",
                   "prefix-mass | sum-lemma | harmonic-symmetry | offline-oracle | tnet-invariant | probes | all");

  CLI::App* sweep = app.add_subcommand("sweep", "grid of (algorithm x k) cells to CSV plus plot data");
  add_common(sweep, sweep_flags);
  sweep_flags.add(sweep, "--k-min", "k_min", "first depth");
  sweep_flags.add(sweep, "--k-max", "k_max", "last depth");
  sweep_flags.add(sweep, "--algos", "algos", "comma-separated algorithm selectors");
  std::string plot_prefix;
  sweep->add_option("--plot-prefix", plot_prefix, "plot files are <prefix>.<algo>.dat (default: --out without extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*construct) return cmd_construct(construct_flags.resolve());
    if (*run) return cmd_run(run_flags.resolve());
    if (*verify) {
      RunConfig c = verify_flags.resolve();
      if (verify_flags.options.at("k")->count() == 0) c.k = 8;
      return cmd_verify(c);
    }
    if (*sweep) return cmd_sweep(sweep_flags.resolve(), plot_prefix);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
