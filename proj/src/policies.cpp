#include "rested/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rested {

const char* to_string(CommitReason reason) {
  switch (reason) {
    case CommitReason::GapIdentified:
      return "gap_identified";
    case CommitReason::ExplorationUnprofitable:
      return "exploration_unprofitable";
    case CommitReason::BudgetExhausted:
      return "budget_exhausted";
  }
  throw std::logic_error("unreachable commit reason");
}

CommitReason commit_reason_from_string(const std::string& s) {
  if (s == "gap_identified") return CommitReason::GapIdentified;
  if (s == "exploration_unprofitable") {
    return CommitReason::ExplorationUnprofitable;
  }
  if (s == "budget_exhausted") return CommitReason::BudgetExhausted;
  throw std::invalid_argument("unknown commit reason: " + s);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// The exact elimination predicate: is arm i's projection at m more than
// 2*cb above arm j's? The interval boundary walk below uses this same
// predicate, so the interval matches a per-m scan bit for bit.
bool dominated_at(const ParamEstimate& est_i, const ParamEstimate& est_j,
                  double rho, double cb, long m) {
  return predict_loss(est_i, m, rho) - predict_loss(est_j, m, rho) >
         2.0 * cb;
}

}  // namespace

std::optional<std::pair<long, long>> dominance_interval(
    const ParamEstimate& est_i, const ParamEstimate& est_j, double rho,
    double cb, long m_lo, long m_hi) {
  if (m_lo > m_hi || m_lo < 1) {
    throw std::invalid_argument("dominance_interval: bad m range");
  }
  const auto P = [&](long m) {
    return dominated_at(est_i, est_j, rho, cb, m);
  };
  const double da =
      std::clamp(est_i.alpha_hat, 0.0, est_i.upper_alpha) -
      std::clamp(est_j.alpha_hat, 0.0, est_j.upper_alpha);
  if (da == 0.0) {  // constant difference: all of the range or none of it
    if (P(m_lo)) return std::make_pair(m_lo, m_hi);
    return std::nullopt;
  }
  // c is the level da/m^rho must exceed for dominance.
  const double c = 2.0 * cb - (est_i.beta_hat - est_j.beta_hat);
  if (da > 0.0) {
    // Difference decreases in m: the qualifying set is a prefix.
    if (!P(m_lo)) return std::nullopt;
    if (P(m_hi)) return std::make_pair(m_lo, m_hi);
    // Mixed: locate the largest qualifying m. Analytic guess (c > 0 is
    // forced by P(m_hi) being false), then a local walk on the exact
    // predicate to absorb rounding.
    long g = m_hi - 1;
    if (c > 0.0) {
      const double boundary = std::pow(da / c, 1.0 / rho);
      if (boundary < static_cast<double>(m_hi)) {
        g = static_cast<long>(boundary);
      }
    }
    g = std::clamp(g, m_lo, m_hi - 1);
    while (g + 1 <= m_hi - 1 && P(g + 1)) ++g;
    while (g > m_lo && !P(g)) --g;
    return std::make_pair(m_lo, g);
  }
  // da < 0: difference increases in m: the qualifying set is a suffix.
  if (!P(m_hi)) return std::nullopt;
  if (P(m_lo)) return std::make_pair(m_lo, m_hi);
  long g = m_lo + 1;
  if (c < 0.0) {  // forced by P(m_hi) being true
    const double boundary = std::pow(da / c, 1.0 / rho);
    if (boundary < static_cast<double>(m_hi)) {
      g = static_cast<long>(boundary) + 1;
    } else {
      g = m_hi;
    }
  }
  g = std::clamp(g, m_lo + 1, m_hi);
  while (g - 1 >= m_lo + 1 && P(g - 1)) --g;
  while (g < m_hi && !P(g)) ++g;
  return std::make_pair(g, m_hi);
}

std::vector<int> eliminate(const std::vector<int>& active,
                           std::span<const ParamEstimate> estimates,
                           double rho, double cb, long n, long tau_out) {
  if (n > tau_out || n < 1) {
    throw std::invalid_argument("eliminate: need 1 <= n <= tau_out");
  }
  std::vector<int> survivors;
  survivors.reserve(active.size());
  std::vector<std::pair<long, long>> intervals;
  for (int i : active) {
    intervals.clear();
    for (int j : active) {
      if (j == i) continue;
      const auto iv =
          dominance_interval(estimates[static_cast<std::size_t>(i)],
                             estimates[static_cast<std::size_t>(j)], rho, cb,
                             n, tau_out);
      if (iv) intervals.push_back(*iv);
    }
    std::sort(intervals.begin(), intervals.end());
    long cover = n - 1;  // rightmost m proven dominated so far
    for (const auto& [lo, hi] : intervals) {
      if (lo > cover + 1) break;  // gap at cover+1: arm i survives there
      cover = std::max(cover, hi);
    }
    if (cover < tau_out) survivors.push_back(i);
  }
  // The projection-argmin arm is never dominated at its own minimizing m,
  // so the set cannot empty; guard against it anyway.
  if (survivors.empty()) {
    throw std::logic_error("eliminate: active set emptied");
  }
  return survivors;
}

namespace {

int argmin_active(const std::vector<int>& active,
                  const std::vector<double>& value_by_arm) {
  int best = active.front();
  for (int i : active) {
    if (value_by_arm[static_cast<std::size_t>(i)] <
        value_by_arm[static_cast<std::size_t>(best)]) {
      best = i;
    }
  }
  return best;
}

PolicyOutcome finish_run(Env& env, int i_out,
                         std::optional<long> commit_round,
                         CommitReason reason) {
  // Spend whatever budget remains on the committed arm. These pulls feed
  // no estimator, so the samples are drawn and dropped.
  while (env.round() < env.horizon()) env.pull(i_out);
  PolicyOutcome out;
  out.i_out = i_out;
  out.pulls = env.pull_counts();
  out.tau_out = out.pulls[static_cast<std::size_t>(i_out)];
  out.commit_round = commit_round;
  out.commit_reason = reason;
  const long total = std::accumulate(out.pulls.begin(), out.pulls.end(), 0L);
  if (total != env.horizon()) {
    throw std::logic_error("policy round accounting violated");
  }
  return out;
}

}  // namespace

PolicyOutcome run_etc(Env& env, double delta) {
  const int K = env.num_arms();
  const long T = env.horizon();
  const double rho = env.rho();
  const double U = env.upper_alpha();
  std::vector<SplitTracker> trackers(static_cast<std::size_t>(K),
                                     SplitTracker(rho, U));
  std::vector<double> preds(static_cast<std::size_t>(K), 0.0);
  const long max_sweeps = T / K;
  int i_out = -1;
  std::optional<long> commit_round;
  CommitReason reason = CommitReason::BudgetExhausted;
  for (long n = 1; n <= max_sweeps; ++n) {
    for (int i = 0; i < K; ++i) {
      trackers[static_cast<std::size_t>(i)].push(env.pull(i));
    }
    const long tau_out = T - n * (K - 1);
    for (int i = 0; i < K; ++i) {
      preds[static_cast<std::size_t>(i)] =
          trackers[static_cast<std::size_t>(i)].predict(tau_out);
    }
    const double cb = cb_mu(n, rho, U, delta, K, T);
    for (int i = 0; i < K && i_out < 0; ++i) {
      double min_other = kInf;
      for (int j = 0; j < K; ++j) {
        if (j != i) {
          min_other = std::min(min_other, preds[static_cast<std::size_t>(j)]);
        }
      }
      if (preds[static_cast<std::size_t>(i)] < min_other - 2.0 * cb) {
        i_out = i;
        commit_round = n;
        reason = CommitReason::GapIdentified;
      }
    }
    if (i_out >= 0) break;
  }
  if (i_out < 0) {
    // Never separated: take the projection argmin of the final sweep.
    i_out = static_cast<int>(
        std::min_element(preds.begin(), preds.end()) - preds.begin());
    reason = CommitReason::BudgetExhausted;
  }
  return finish_run(env, i_out, commit_round, reason);
}

PolicyOutcome run_rest_sure(Env& env, double delta) {
  const int K = env.num_arms();
  const long T = env.horizon();
  const double rho = env.rho();
  const double U = env.upper_alpha();
  std::vector<SplitTracker> trackers(static_cast<std::size_t>(K),
                                     SplitTracker(rho, U));
  std::vector<int> active(static_cast<std::size_t>(K));
  std::iota(active.begin(), active.end(), 0);
  std::vector<ParamEstimate> ests(static_cast<std::size_t>(K));
  std::vector<double> pred_now(static_cast<std::size_t>(K), kInf);
  long t = 0;  // rounds used
  long n = 0;  // completed sweeps (pulls of each active arm)
  int i_out = -1;
  std::optional<long> commit_round;
  CommitReason reason = CommitReason::BudgetExhausted;

  while (i_out < 0) {
    const long tau_out = T - t + n;  // pulls i_out ends with if we commit now
    if (active.size() == 1) {
      // Degenerate single survivor: the strict-winner condition holds
      // vacuously (the competing minimum is over an empty set).
      i_out = active.front();
      commit_round = n;
      reason = CommitReason::GapIdentified;
      break;
    }
    // The stop/elimination rules need real split estimates (two full
    // sweeps). Their widths at n=1 dwarf any loss range anyway, so gating
    // at n >= 2 changes no decision.
    if (n >= 2) {
      const double cb = cb_mu(n, rho, U, delta, K, T);
      for (int i : active) {
        ests[static_cast<std::size_t>(i)] =
            trackers[static_cast<std::size_t>(i)].estimate(delta);
        pred_now[static_cast<std::size_t>(i)] =
            predict_loss(ests[static_cast<std::size_t>(i)], tau_out, rho);
      }
      // Winner at the reachable frontier: one arm beats every other active
      // arm's projection by two widths.
      for (int i : active) {
        double min_other = kInf;
        for (int j : active) {
          if (j != i) {
            min_other =
                std::min(min_other, pred_now[static_cast<std::size_t>(j)]);
          }
        }
        if (pred_now[static_cast<std::size_t>(i)] < min_other - 2.0 * cb) {
          i_out = i;
          commit_round = n;
          reason = CommitReason::GapIdentified;
          break;
        }
      }
      if (i_out >= 0) break;
      // Exploration no longer profitable: even the best projection at the
      // frontier reachable after one more sweep, discounted by two widths,
      // cannot beat committing to the current argmin.
      const long m_next = tau_out - static_cast<long>(active.size()) + 1;
      if (m_next >= 1) {
        double min_now = kInf;
        double min_next = kInf;
        for (int i : active) {
          min_now =
              std::min(min_now, pred_now[static_cast<std::size_t>(i)]);
          min_next = std::min(
              min_next,
              predict_loss(ests[static_cast<std::size_t>(i)], m_next, rho));
        }
        if (min_next - 2.0 * cb > min_now) {
          i_out = argmin_active(active, pred_now);
          commit_round = n;
          reason = CommitReason::ExplorationUnprofitable;
          break;
        }
      }
      active = eliminate(active, ests, rho, cb, n, tau_out);
      if (active.size() == 1) {
        i_out = active.front();
        commit_round = n;
        reason = CommitReason::GapIdentified;
        break;
      }
    }
    // One more full sweep must fit in the budget; otherwise commit to the
    // current projection argmin.
    if (t + static_cast<long>(active.size()) > T) {
      for (int i : active) {
        pred_now[static_cast<std::size_t>(i)] =
            trackers[static_cast<std::size_t>(i)].predict(tau_out);
      }
      i_out = argmin_active(active, pred_now);
      commit_round = n;
      reason = CommitReason::BudgetExhausted;
      break;
    }
    for (int i : active) {
      trackers[static_cast<std::size_t>(i)].push(env.pull(i));
    }
    t += static_cast<long>(active.size());
    n += 1;
  }
  return finish_run(env, i_out, commit_round, reason);
}

PolicyOutcome run_uniform(Env& env) {
  const int K = env.num_arms();
  const long T = env.horizon();
  std::vector<SplitTracker> trackers(
      static_cast<std::size_t>(K), SplitTracker(env.rho(), env.upper_alpha()));
  for (long r = 0; r < T; ++r) {
    const int i = static_cast<int>(r % K);
    trackers[static_cast<std::size_t>(i)].push(env.pull(i));
  }
  const long tau_ref = T / K;
  int i_out = 0;
  double best = kInf;
  for (int i = 0; i < K; ++i) {
    const double p = trackers[static_cast<std::size_t>(i)].predict(tau_ref);
    if (p < best) {
      best = p;
      i_out = i;
    }
  }
  PolicyOutcome out;
  out.i_out = i_out;
  out.pulls = env.pull_counts();
  out.tau_out = out.pulls[static_cast<std::size_t>(i_out)];
  out.commit_round = std::nullopt;
  out.commit_reason = CommitReason::BudgetExhausted;
  return out;
}

PolicyOutcome run_greedy(Env& env) {
  const int K = env.num_arms();
  const long T = env.horizon();
  std::vector<SplitTracker> trackers(
      static_cast<std::size_t>(K), SplitTracker(env.rho(), env.upper_alpha()));
  for (int i = 0; i < K; ++i) {
    trackers[static_cast<std::size_t>(i)].push(env.pull(i));
  }
  while (env.round() < T) {
    int best = 0;
    double best_pred = kInf;
    for (int i = 0; i < K; ++i) {
      const double p = trackers[static_cast<std::size_t>(i)].predict(
          env.pull_count(i) + 1);
      if (p < best_pred) {
        best_pred = p;
        best = i;
      }
    }
    trackers[static_cast<std::size_t>(best)].push(env.pull(best));
  }
  int i_out = 0;
  for (int i = 1; i < K; ++i) {
    if (env.pull_count(i) > env.pull_count(i_out)) i_out = i;
  }
  PolicyOutcome out;
  out.i_out = i_out;
  out.pulls = env.pull_counts();
  out.tau_out = out.pulls[static_cast<std::size_t>(i_out)];
  out.commit_round = std::nullopt;
  out.commit_reason = CommitReason::BudgetExhausted;
  return out;
}

PolicyOutcome run_policy(const std::string& name, Env& env, double delta) {
  if (name == "etc") return run_etc(env, delta);
  if (name == "rest_sure") return run_rest_sure(env, delta);
  if (name == "uniform") return run_uniform(env);
  if (name == "greedy") return run_greedy(env);
  throw std::invalid_argument("unknown policy: " + name);
}

std::vector<std::string> policy_names() {
  return {"etc", "rest_sure", "uniform", "greedy"};
}

}  // namespace rested
