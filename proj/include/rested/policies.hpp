#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rested/env.hpp"
#include "rested/estimation.hpp"

// Learning policies. Every policy sees the environment only through pulls
// and observed losses; ground-truth arm parameters are unreachable from
// here by construction.
namespace rested {

enum class CommitReason {
  GapIdentified,            // a single arm beat all others by 2 widths
  ExplorationUnprofitable,  // further exploration provably cannot help
  BudgetExhausted,          // ran out of rounds; committed to the argmin
};

const char* to_string(CommitReason reason);
CommitReason commit_reason_from_string(const std::string& s);

struct PolicyOutcome {
  int i_out = 0;
  long tau_out = 0;  // equals pulls[i_out]
  std::vector<long> pulls;
  std::optional<long> commit_round;  // sweep counter at commit, if any
  CommitReason commit_reason = CommitReason::BudgetExhausted;
};

// Largest contiguous integer range within [m_lo, m_hi] on which arm i's
// projected loss exceeds arm j's by more than 2*cb. The projected
// difference clamp(a_i,0,U)/m^rho - clamp(a_j,0,U)/m^rho + (b_i - b_j) is
// monotone in m, so the qualifying set is one interval (possibly empty).
// The boundary is located analytically, then fixed up with the exact
// projected-loss predicate so the result matches a per-m scan bit for bit.
std::optional<std::pair<long, long>> dominance_interval(
    const ParamEstimate& est_i, const ParamEstimate& est_j, double rho,
    double cb, long m_lo, long m_hi);

// One elimination round: returns the arms of `active` that survive. Arm i
// is removed iff at every m in [n, tau_out] some other active arm j has
// projected loss more than 2*cb below arm i's — i.e. the union of the
// dominance intervals over j covers [n, tau_out] with no gap. All removals
// are judged against the same incoming snapshot. `estimates` is indexed by
// arm id.
std::vector<int> eliminate(const std::vector<int>& active,
                           std::span<const ParamEstimate> estimates,
                           double rho, double cb, long n, long tau_out);

// Explore-then-commit: round-robin sweeps; after sweep n the projection
// target is tau_out = T - n(K-1); commits to arm i as soon as its
// projected loss beats every other arm's by 2 widths, then spends the rest
// of the budget on it. No commit by sweep floor(T/K) -> argmin projection.
PolicyOutcome run_etc(Env& env, double delta);

// Active-set elimination with two stopping rules: commit when one arm wins
// at the reachable frontier (GapIdentified), or when even a perfectly
// informed choice after one more sweep cannot beat committing now
// (ExplorationUnprofitable). Eliminated arms are never pulled again.
PolicyOutcome run_rest_sure(Env& env, double delta);

// Round-robin for all T rounds; outputs the argmin projection at floor(T/K).
PolicyOutcome run_uniform(Env& env);

// One initialization pull per arm, then always pulls the arm whose own next
// pull has the lowest projected loss; outputs the most-pulled arm.
PolicyOutcome run_greedy(Env& env);

// Dispatch by name: "etc" | "rest_sure" | "uniform" | "greedy".
PolicyOutcome run_policy(const std::string& name, Env& env, double delta);
std::vector<std::string> policy_names();

}  // namespace rested
