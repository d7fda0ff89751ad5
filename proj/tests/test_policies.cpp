#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rested/env.hpp"
#include "rested/estimation.hpp"
#include "rested/policies.hpp"
#include "rested/rng.hpp"

using namespace rested;

// Policies must not be able to read ground truth from the environment
// handle: no accessor for the instance or the arm parameters exists.
template <typename E>
constexpr bool exposes_ground_truth =
    requires(E e) { e.instance(); } || requires(E e) { e.arms(); };
static_assert(!exposes_ground_truth<Env>);

namespace {

BanditInstance make_instance(std::vector<ArmSpec> arms, double rho, long T,
                             double U, NoiseModel noise) {
  BanditInstance inst;
  inst.arms = std::move(arms);
  inst.rho = rho;
  inst.horizon_T = T;
  inst.upper_alpha = U;
  inst.noise = noise;
  return inst;
}

ParamEstimate make_est(double alpha_hat, double beta_hat, double U) {
  ParamEstimate est;
  est.alpha_hat = alpha_hat;
  est.beta_hat = beta_hat;
  est.upper_alpha = U;
  return est;
}

void check_accounting(const PolicyOutcome& out, const BanditInstance& inst) {
  REQUIRE(out.pulls.size() == static_cast<std::size_t>(inst.num_arms()));
  CHECK(out.i_out >= 0);
  CHECK(out.i_out < inst.num_arms());
  CHECK(out.tau_out == out.pulls[static_cast<std::size_t>(out.i_out)]);
  CHECK(std::accumulate(out.pulls.begin(), out.pulls.end(), 0L) ==
        inst.horizon_T);
}

}  // namespace

// ---------------------------------------------------------------------------
// dominance_interval

TEST_CASE("dominance_interval: matches a per-point scan bit for bit") {
  rng::Stream s(881100);
  int nonempty = 0;
  int partial = 0;
  for (int it = 0; it < 300; ++it) {
    const double U = 0.5 + 1.5 * s.next_double();
    const auto ei =
        make_est(-0.5 + (U + 1.0) * s.next_double(), s.next_double(), U);
    const auto ej =
        make_est(-0.5 + (U + 1.0) * s.next_double(), s.next_double(), U);
    const double rho = 0.1 + 0.8 * s.next_double();
    const double cb = 0.3 * s.next_double();
    const long m_lo = 1 + static_cast<long>(50.0 * s.next_double());
    const long m_hi = m_lo + static_cast<long>(400.0 * s.next_double());
    const auto iv = dominance_interval(ei, ej, rho, cb, m_lo, m_hi);
    long first = 0;
    long last = -1;
    long count = 0;
    for (long m = m_lo; m <= m_hi; ++m) {
      const bool dom =
          predict_loss(ei, m, rho) - predict_loss(ej, m, rho) > 2.0 * cb;
      if (dom) {
        if (count == 0) first = m;
        last = m;
        ++count;
      }
    }
    CAPTURE(it);
    if (count == 0) {
      CHECK(!iv.has_value());
    } else {
      // The projected difference is monotone in m, so the qualifying set
      // must be contiguous; require that before comparing endpoints.
      REQUIRE(last - first + 1 == count);
      REQUIRE(iv.has_value());
      CHECK(iv->first == first);
      CHECK(iv->second == last);
      ++nonempty;
      if (first > m_lo || last < m_hi) ++partial;
    }
  }
  // The draw ranges are tuned so the scan exercises real boundaries, not
  // just all-or-nothing outcomes.
  CHECK(nonempty >= 30);
  CHECK(partial >= 10);
}

TEST_CASE("dominance_interval: constant difference is all or nothing") {
  const auto ei = make_est(0.4, 0.9, 1.0);
  const auto ej = make_est(0.4, 0.1, 1.0);  // same decay, lower offset
  const auto all = dominance_interval(ei, ej, 0.5, 0.3, 5, 500);
  REQUIRE(all.has_value());
  CHECK(all->first == 5);
  CHECK(all->second == 500);
  CHECK(!dominance_interval(ei, ej, 0.5, 0.45, 5, 500).has_value());
  // Direction matters: the better arm is never dominated.
  CHECK(!dominance_interval(ej, ei, 0.5, 0.3, 5, 500).has_value());
}

TEST_CASE("dominance_interval: decaying advantage gives a prefix") {
  // i starts far above j but the curves converge: dominance holds only for
  // small m.
  const auto ei = make_est(2.0, 0.1, 2.0);
  const auto ej = make_est(0.0, 0.1, 2.0);
  const auto iv = dominance_interval(ei, ej, 0.5, 0.05, 1, 1000);
  REQUIRE(iv.has_value());
  CHECK(iv->first == 1);
  CHECK(iv->second < 1000);
  // 2/sqrt(m) > 0.1 up to m = 399 (strict at 399, fails at 400).
  CHECK(iv->second == 399);
}

TEST_CASE("dominance_interval: growing disadvantage gives a suffix") {
  // j's curve starts high but decays below i's flat offset.
  const auto ei = make_est(0.0, 0.5, 2.0);
  const auto ej = make_est(2.0, 0.0, 2.0);
  const auto iv = dominance_interval(ei, ej, 0.5, 0.1, 1, 1000);
  REQUIRE(iv.has_value());
  CHECK(iv->second == 1000);
  CHECK(iv->first > 1);
  // 0.5 - 2/sqrt(m) > 0.2 from m = 45 on (2/sqrt(44) = 0.3015 > 0.3).
  CHECK(iv->first == 45);
}

TEST_CASE("dominance_interval: rejects a bad range") {
  const auto e = make_est(0.0, 0.5, 1.0);
  CHECK_THROWS_AS(dominance_interval(e, e, 0.5, 0.1, 0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(dominance_interval(e, e, 0.5, 0.1, 7, 6),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// eliminate

TEST_CASE("eliminate: equals the exhaustive per-point rule on snapshots") {
  rng::Stream s(332211);
  for (int it = 0; it < 200; ++it) {
    const double U = 0.5 + 1.5 * s.next_double();
    std::vector<ParamEstimate> ests;
    for (int k = 0; k < 5; ++k) {
      ests.push_back(
          make_est(-0.3 + (U + 0.6) * s.next_double(), s.next_double(), U));
    }
    const double rho = 0.1 + 0.8 * s.next_double();
    const double cb = 0.01 + 0.49 * s.next_double();
    const long n = 1 + static_cast<long>(20.0 * s.next_double());
    const long tau_out = n + static_cast<long>(1500.0 * s.next_double());
    const std::vector<int> active = {0, 1, 2, 3, 4};
    const auto survivors = eliminate(active, ests, rho, cb, n, tau_out);
    // Exhaustive rule: arm i is removed iff at every m some other arm's
    // projection is more than 2*cb below arm i's.
    std::vector<int> expected;
    for (int i : active) {
      bool removed = true;
      for (long m = n; m <= tau_out && removed; ++m) {
        bool covered = false;
        for (int j : active) {
          if (j == i) continue;
          if (predict_loss(ests[static_cast<std::size_t>(i)], m, rho) -
                  predict_loss(ests[static_cast<std::size_t>(j)], m, rho) >
              2.0 * cb) {
            covered = true;
            break;
          }
        }
        removed = covered;
      }
      if (!removed) expected.push_back(i);
    }
    CAPTURE(it);
    CAPTURE(cb);
    CAPTURE(n);
    CAPTURE(tau_out);
    CHECK(survivors == expected);
  }
}

TEST_CASE("eliminate: survivors keep the incoming order and never empty") {
  rng::Stream s(97531);
  for (int it = 0; it < 50; ++it) {
    std::vector<ParamEstimate> ests;
    for (int k = 0; k < 4; ++k) {
      ests.push_back(make_est(s.next_double(), s.next_double(), 1.0));
    }
    const auto survivors =
        eliminate({0, 1, 2, 3}, ests, 0.5, 0.05 + 0.2 * s.next_double(), 2,
                  800);
    REQUIRE(!survivors.empty());
    CHECK(std::is_sorted(survivors.begin(), survivors.end()));
  }
}

TEST_CASE("eliminate: rejects a bad pull range") {
  std::vector<ParamEstimate> ests(2, make_est(0.0, 0.5, 1.0));
  CHECK_THROWS_AS(eliminate({0, 1}, ests, 0.5, 0.1, 0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(eliminate({0, 1}, ests, 0.5, 0.1, 11, 10),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// explore-then-commit

TEST_CASE("run_etc: desk-scale horizons stay budget-bound even at a wide "
          "gap, and the width threshold confirms why") {
  // The joint confidence width exceeds any achievable offset gap for every
  // sweep count reachable at this horizon, so no commit can fire; the
  // policy must round-robin to the end and output the exact projection
  // argmin.
  const double rho = 0.5;
  const double U = 0.0;
  const long T = 10000;
  const double delta = 1.0 / static_cast<double>(T);
  for (long n = 1; n <= T / 2; ++n) {
    REQUIRE(cb_mu(n, rho, U, delta, 2, T) > 0.3);
  }
  const auto inst = make_instance({{0.0, 0.2}, {0.0, 0.8}}, rho, T, U,
                                  NoiseModel::deterministic());
  Env env(inst, 42);
  const auto out = run_etc(env, delta);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.commit_reason == CommitReason::BudgetExhausted);
  CHECK(!out.commit_round.has_value());
  CHECK(out.pulls == std::vector<long>{5000, 5000});
}

TEST_CASE("run_etc: argmin fallback still identifies a decaying winner "
          "noiselessly") {
  // Arm 0 decays to 0.1, well below arm 1's flat 0.9. The horizon is far
  // too short for a width-certified commit, but the noiseless projections
  // are exact, so the final-sweep argmin picks the right arm.
  const auto inst = make_instance({{1.0, 0.1}, {0.0, 0.9}}, 0.5, 20000, 1.0,
                                  NoiseModel::deterministic());
  Env env(inst, 7);
  const auto out = run_etc(env, 1e-4);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.commit_reason == CommitReason::BudgetExhausted);
  CHECK(!out.commit_round.has_value());
  CHECK(out.pulls == std::vector<long>{10000, 10000});
  CHECK(out.tau_out == 10000);
}

TEST_CASE("run_etc: near-ties exhaust the budget and fall back to argmin") {
  const auto inst =
      make_instance({{0.0, 0.5}, {0.0, 0.5001}}, 0.5, 100, 0.0,
                    NoiseModel::deterministic());
  Env env(inst, 1);
  const auto out = run_etc(env, 0.01);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.commit_reason == CommitReason::BudgetExhausted);
  CHECK(!out.commit_round.has_value());
  CHECK(out.pulls[0] == 50);
  CHECK(out.pulls[1] == 50);
}

// ---------------------------------------------------------------------------
// elimination policy

TEST_CASE("run_rest_sure: desk-scale horizons keep every arm active to the "
          "end") {
  // Same conservative-width story as for the committing sweep policy: no
  // elimination or winner certificate is reachable at this horizon, so the
  // run sweeps all three arms until one more sweep no longer fits, then
  // falls back to the exact projection argmin.
  const double rho = 0.5;
  const double U = 0.0;
  const long T = 30000;
  const double delta = 1.0 / static_cast<double>(T);
  for (long n = 2; n <= T / 3; ++n) {
    REQUIRE(cb_mu(n, rho, U, delta, 3, T) > 0.4);
  }
  const auto inst =
      make_instance({{0.0, 0.1}, {0.0, 0.5}, {0.0, 0.9}}, rho, T, U,
                    NoiseModel::deterministic());
  Env env(inst, 99);
  const auto out = run_rest_sure(env, delta);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.commit_reason == CommitReason::BudgetExhausted);
  REQUIRE(out.commit_round.has_value());
  CHECK(*out.commit_round == 10000);
  CHECK(out.pulls == std::vector<long>{10000, 10000, 10000});
  CHECK(out.tau_out == 10000);
}

TEST_CASE("run_rest_sure: a single arm commits immediately") {
  const auto inst = make_instance({{0.5, 0.2}}, 0.5, 1000, 1.0,
                                  NoiseModel::deterministic());
  Env env(inst, 3);
  const auto out = run_rest_sure(env, 0.01);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.tau_out == 1000);
  CHECK(out.commit_reason == CommitReason::GapIdentified);
  REQUIRE(out.commit_round.has_value());
  CHECK(*out.commit_round == 0);
}

TEST_CASE("run_rest_sure: near-ties exhaust the budget and fall back") {
  const auto inst =
      make_instance({{0.0, 0.5}, {0.0, 0.5001}}, 0.5, 101, 0.0,
                    NoiseModel::deterministic());
  Env env(inst, 5);
  const auto out = run_rest_sure(env, 0.01);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.commit_reason == CommitReason::BudgetExhausted);
  REQUIRE(out.commit_round.has_value());
  CHECK(*out.commit_round == 50);
  CHECK(out.pulls[0] == 51);
  CHECK(out.pulls[1] == 50);
  CHECK(out.tau_out == 51);
}

// ---------------------------------------------------------------------------
// baselines

TEST_CASE("run_uniform: round-robin counts and argmin output") {
  const auto inst =
      make_instance({{0.0, 0.3}, {0.0, 0.6}, {0.0, 0.9}}, 0.5, 10, 0.0,
                    NoiseModel::deterministic());
  Env env(inst, 11);
  const auto out = run_uniform(env);
  check_accounting(out, inst);
  CHECK(out.pulls == std::vector<long>{4, 3, 3});
  CHECK(out.i_out == 0);
  CHECK(out.tau_out == 4);
  CHECK(!out.commit_round.has_value());
  CHECK(out.commit_reason == CommitReason::BudgetExhausted);
}

TEST_CASE("run_greedy: monopolizes the myopically best arm") {
  const auto inst = make_instance({{0.0, 0.2}, {0.0, 0.8}}, 0.5, 1000, 0.0,
                                  NoiseModel::deterministic());
  Env env(inst, 13);
  const auto out = run_greedy(env);
  check_accounting(out, inst);
  CHECK(out.i_out == 0);
  CHECK(out.pulls[0] == 999);
  CHECK(out.pulls[1] == 1);
}

TEST_CASE("run_greedy: a decaying arm starves behind a mediocre flat one") {
  // Arm 0 would decay to 0 if pulled, but its first pull costs 1.0; the
  // flat arm at 0.05 looks better one step ahead forever. Myopia locks in
  // the wrong arm, which is exactly the failure the committing policies
  // are built to avoid.
  const auto inst = make_instance({{1.0, 0.0}, {0.0, 0.05}}, 0.5, 1000, 1.0,
                                  NoiseModel::deterministic());
  Env env(inst, 17);
  const auto out = run_greedy(env);
  check_accounting(out, inst);
  CHECK(out.i_out == 1);
  CHECK(out.pulls[0] == 1);
  CHECK(out.pulls[1] == 999);
}

// ---------------------------------------------------------------------------
// dispatch and serialization

TEST_CASE("run_policy dispatches by name and rejects unknown names") {
  const auto inst = make_instance({{0.0, 0.2}, {0.0, 0.8}}, 0.5, 60, 0.0,
                                  NoiseModel::deterministic());
  for (const auto& name : policy_names()) {
    Env env(inst, 23);
    const auto out = run_policy(name, env, 0.05);
    check_accounting(out, inst);
  }
  Env env(inst, 23);
  CHECK_THROWS_AS(run_policy("thompson", env, 0.05), std::invalid_argument);
}

TEST_CASE("commit reasons round-trip through their names") {
  for (const auto reason :
       {CommitReason::GapIdentified, CommitReason::ExplorationUnprofitable,
        CommitReason::BudgetExhausted}) {
    CHECK(commit_reason_from_string(to_string(reason)) == reason);
  }
  CHECK_THROWS_AS(commit_reason_from_string("coin_flip"),
                  std::invalid_argument);
}

TEST_CASE("policies stay within budget and report consistent outcomes "
          "under noise") {
  const auto inst =
      make_instance({{1.0, 0.2}, {0.5, 0.4}, {0.0, 0.6}}, 0.5, 2000, 1.0,
                    NoiseModel::scaled_bernoulli());
  for (const auto& name : policy_names()) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      Env env(inst, rng::combine(seed, 77));
      const auto out = run_policy(name, env, 0.05);
      CAPTURE(name);
      CAPTURE(seed);
      check_accounting(out, inst);
    }
  }
}
