#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rested/env.hpp"
#include "rested/policies.hpp"
#include "rested/theory.hpp"

// Experiment harness: pseudo-regret evaluation recomputed from ground
// truth, a deterministic Monte Carlo runner with paired seeds across
// policies, aggregation, and CSV emission.
namespace rested {

struct ExperimentConfig {
  BanditInstance instance;
  std::vector<std::string> policies;
  int num_runs = 1;
  std::uint64_t base_seed = 0;
  double delta = 0.0;  // confidence parameter; parse defaults it to 1/T
  // True when the config named delta explicitly; sweeps over T re-default
  // an implicit delta to 1/T at each grid point.
  bool delta_explicit = false;
  // Threshold for the fraction-exceeding column; +inf reports 0.
  double regret_bound = 0.0;
  std::string output_dir = ".";

  void validate() const;  // throws std::invalid_argument
};

struct RunRecord {
  std::string policy;
  int run_id = 0;
  std::uint64_t seed = 0;
  int i_out = 0;
  long tau_out = 0;
  double regret = 0.0;
  std::optional<long> commit_round;
  CommitReason commit_reason = CommitReason::BudgetExhausted;
};

struct PolicyStats {
  std::string policy;
  int runs = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;  // sample standard deviation; 0 for a single run
  double q50 = 0.0;  // nearest-rank quantiles of regret
  double q90 = 0.0;
  double q99 = 0.0;
  double frac_exceed = 0.0;  // fraction of runs with regret > bound
  double bound = 0.0;        // the threshold those fractions were taken at
  double mean_tau_out = 0.0;
};

struct AggregateStats {
  std::vector<PolicyStats> per_policy;  // config policy order
};

struct MonteCarloResult {
  std::vector<RunRecord> records;  // run_id-major, policy config order within
  AggregateStats stats;
};

// Pseudo-regret of an outcome: mean loss of the output arm at its final
// pull count minus the best reachable mean loss at T. Recomputed from the
// instance; outcomes carry no self-reported score. tau_out = 0 is an
// evaluation error. Tiny negative floating residue (>= -1e-12) clamps to
// 0; anything lower throws, since true negativity is impossible.
double regret(const BanditInstance& inst, const PolicyOutcome& outcome);

// Same score computed from an unordered pull-count profile alone, which is
// all the regret can depend on: tests shuffle trajectories against this.
double permutation_regret_check(const BanditInstance& inst,
                                const std::vector<long>& pulls_per_arm,
                                int i_out);

// Per-run seed, independent of the policy, so every policy faces the same
// per-arm loss sequences at equal pull counts (paired comparison).
std::uint64_t derive_run_seed(std::uint64_t base_seed, int run_id);

// Runs every (run_id, policy) cell, recomputes regret, aggregates.
// Deterministic for a fixed config regardless of num_threads (0 = one per
// hardware thread): records land in preassigned slots.
MonteCarloResult monte_carlo(const ExperimentConfig& config,
                             int num_threads = 0);

AggregateStats aggregate(const std::vector<RunRecord>& records,
                         const std::vector<std::string>& policy_order,
                         double bound);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// CSV schemas (field order is part of the contract):
//   records: policy,run_id,seed,i_out,tau_out,regret,commit_round,commit_reason
//   stats:   policy,runs,mean_regret,std_regret,q50,q90,q99,frac_exceed,bound,mean_tau_out
//   bounds:  kind,T,K,rho,U,alpha,delta_gap,C,value,witness,regret_bound
std::string to_csv(const std::vector<RunRecord>& records);
std::string to_csv(const AggregateStats& stats);
std::string to_csv(const std::vector<BoundReport>& reports);
void emit_csv(const std::vector<RunRecord>& records, const std::string& path);
void emit_csv(const AggregateStats& stats, const std::string& path);
void emit_csv(const std::vector<BoundReport>& reports,
              const std::string& path);

// Inverse of to_csv(records); throws std::invalid_argument on malformed
// text. parse(emit(x)) == x exactly (doubles round-trip).
std::vector<RunRecord> parse_run_records(const std::string& text);

// {"instance": {...}, "policies": [...], "num_runs": n, "base_seed": s,
//  "delta": d?, "regret_bound": b?, "output_dir": p?}
// delta defaults to 1/T, regret_bound to +inf, output_dir to ".".
ExperimentConfig config_from_json_text(const std::string& text);

}  // namespace rested
