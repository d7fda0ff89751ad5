#include "rested/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rested {

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::TauSub:
      return "tau_sub";
    case BoundKind::TauSubExact:
      return "tau_sub_exact";
    case BoundKind::Cor1TauSub:
      return "cor1_tau_sub";
    case BoundKind::EtcN0:
      return "etc_n0";
    case BoundKind::Cor2N0:
      return "cor2_n0";
    case BoundKind::RestSureNbar:
      return "rest_sure_nbar";
  }
  throw std::logic_error("unreachable bound kind");
}

const char* to_string(Witness w) {
  switch (w) {
    case Witness::TCap:
      return "t_cap";
    case Witness::DeltaTerm:
      return "delta_term";
    case Witness::AlphaTerm:
      return "alpha_term";
    case Witness::Budget:
      return "budget";
    case Witness::Elimination:
      return "elimination";
    case Witness::StopExploration:
      return "stop_exploration";
    case Witness::Commit:
      return "commit";
    case Witness::Cap:
      return "cap";
  }
  throw std::logic_error("unreachable witness");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest x in [lo, hi] with pred(x) true; hi+1 when none.
template <typename Pred>
long first_true_scan(long lo, long hi, Pred pred) {
  for (long x = lo; x <= hi; ++x) {
    if (pred(x)) return x;
  }
  return hi + 1;
}

// Same contract; requires pred to flip false->true exactly once on the
// range (each caller's crossing-uniqueness argument lives at its site).
template <typename Pred>
long first_true_bisect(long lo, long hi, Pred pred) {
  long a = lo;
  long b = hi + 1;
  while (a < b) {
    const long mid = a + (b - a) / 2;
    if (pred(mid)) {
      b = mid;
    } else {
      a = mid + 1;
    }
  }
  return a;
}

template <typename Pred>
long first_true(long lo, long hi, Pred pred, SolveMode mode) {
  return mode == SolveMode::Scan ? first_true_scan(lo, hi, pred)
                                 : first_true_bisect(lo, hi, pred);
}

double pow4(double x) { return (x * x) * (x * x); }

// Shared three-term machinery behind tau_sub and its rho = 1/2 corollary
// (which ceils the middle term and fixes the power exponent at 3).
BoundReport tau_sub_impl(BoundKind kind, double alpha, double delta_gap,
                         double rho, double C, long T, SolveMode mode,
                         bool ceil_middle) {
  if (!(delta_gap > 0.0) || !(C > 0.0) || !(alpha >= 0.0) ||
      !(rho > 0.0 && rho < 1.0) || T < 1) {
    throw std::invalid_argument("tau_sub: bad parameters");
  }
  const double logT = std::log(static_cast<double>(T));
  const double t_cap = static_cast<double>(T) / 2.0;
  double delta_term = logT / (C * delta_gap * delta_gap);
  if (ceil_middle) delta_term = std::ceil(delta_term);
  const double exponent = 2.0 * rho + 2.0;
  const auto alpha_term = [&](long tau) -> double {
    if (alpha == 0.0) return kInf;
    const double base = static_cast<double>(T - tau - 1);
    if (base <= 0.0) return 0.0;  // the power term has fully decayed
    return logT / (C * alpha * alpha) * std::pow(base, exponent);
  };
  // tau grows while every min term is constant or shrinking, so the strict
  // inequality, once true, stays true: the crossing is unique and the
  // bisection sees a monotone predicate.
  const auto pred = [&](long tau) {
    const double m = std::min({t_cap, delta_term, alpha_term(tau)});
    return static_cast<double>(tau) > m;
  };
  long value = first_true(1, T, pred, mode);
  if (value > T) value = T;  // unreachable: T > T/2 for every T >= 1

  BoundReport rep;
  rep.kind = kind;
  rep.alpha = alpha;
  rep.delta_gap = delta_gap;
  rep.rho = rho;
  rep.C = C;
  rep.T = T;
  rep.K = 2;
  rep.value = value;
  rep.delta_term_value = delta_term;
  rep.alpha_term_value = alpha_term(value);
  const double attained =
      std::min({t_cap, delta_term, rep.alpha_term_value});
  if (attained == t_cap) {
    rep.witness = Witness::TCap;
  } else if (attained == delta_term) {
    rep.witness = Witness::DeltaTerm;
  } else {
    rep.witness = Witness::AlphaTerm;
  }
  rep.regret_bound =
      value < T ? lower_bound_regret(alpha, rho, T, value) : kInf;
  return rep;
}

}  // namespace

BoundReport tau_sub(double alpha, double delta_gap, double rho, double C,
                    long T, SolveMode mode) {
  return tau_sub_impl(BoundKind::TauSub, alpha, delta_gap, rho, C, T, mode,
                      /*ceil_middle=*/false);
}

BoundReport cor1_tau_sub(double alpha, double delta_gap, double C, long T,
                         SolveMode mode) {
  return tau_sub_impl(BoundKind::Cor1TauSub, alpha, delta_gap, 0.5, C, T,
                      mode, /*ceil_middle=*/true);
}

BoundReport tau_sub_exact(double alpha, double delta_gap, double rho,
                          double C, long T) {
  if (!(delta_gap > 0.0) || !(C > 0.0) || !(alpha >= 0.0) ||
      !(rho > 0.0 && rho < 1.0) || T < 2) {
    throw std::invalid_argument("tau_sub_exact: bad parameters");
  }
  const long cap = T / 2;
  // One log-form term per gap scale. A term participates only once its log
  // factor is positive (argument > 1); before that point the term is treated
  // as not yet binding. Without this rule the raw expression is degenerate:
  // log(C g^2 tau / 4) / (8 C g^2) is at most 1/(32e) whenever it is
  // positive, so "tau >= min{...}" would hold at tau = 1 for every input.
  const auto log_term = [&](double g, long tau) -> double {
    if (!(g > 0.0)) return kInf;
    const double arg = C * g * g * static_cast<double>(tau) / 4.0;
    if (arg <= 1.0) return kInf;
    return std::log(arg) / (8.0 * C * g * g);
  };
  // Per-pull decay gap at the frontier: how much the curve still drops
  // between the last two reachable pull counts.
  const auto tilde_gap = [&](long tau) -> double {
    if (alpha == 0.0) return 0.0;
    const double b1 = static_cast<double>(T - tau - 1);
    const double b2 = static_cast<double>(T - tau);
    if (b1 < 1.0) return kInf;  // frontier collapsed; treated as unbounded
    return alpha * (std::pow(b1, -rho) - std::pow(b2, -rho));
  };
  double tilde_at = kInf;
  double delta_at = kInf;
  const auto pred = [&](long tau) {
    const double tg = tilde_gap(tau);
    tilde_at = std::isfinite(tg) ? log_term(tg, tau) : kInf;
    delta_at = log_term(delta_gap, tau);
    return static_cast<double>(tau) >= std::min(tilde_at, delta_at);
  };
  const long found = first_true_scan(1, cap, pred);

  BoundReport rep;
  rep.kind = BoundKind::TauSubExact;
  rep.alpha = alpha;
  rep.delta_gap = delta_gap;
  rep.rho = rho;
  rep.C = C;
  rep.T = T;
  rep.K = 2;
  if (found > cap) {
    rep.value = cap;
    rep.witness = Witness::Cap;
    pred(cap);  // refresh the diagnostic term values at the cap
  } else {
    rep.value = found;
    rep.witness =
        delta_at <= tilde_at ? Witness::DeltaTerm : Witness::AlphaTerm;
  }
  rep.delta_term_value = delta_at;
  rep.alpha_term_value = tilde_at;
  rep.regret_bound =
      rep.value < T ? lower_bound_regret(alpha, rho, T, rep.value) : kInf;
  return rep;
}

double lower_bound_regret(double alpha, double rho, long T, long tau_sub) {
  if (tau_sub >= T) {
    throw std::invalid_argument("lower_bound_regret: tau_sub must be < T");
  }
  if (tau_sub < 0 || !(alpha >= 0.0)) {
    throw std::invalid_argument("lower_bound_regret: bad parameters");
  }
  if (alpha == 0.0 || tau_sub == 0) return 0.0;
  return alpha * (std::pow(static_cast<double>(T - tau_sub), -rho) -
                  std::pow(static_cast<double>(T), -rho));
}

BoundReport etc_n0(double alpha, double Delta, double rho, double U, long T,
                   double kappa, SolveMode mode) {
  if (!(Delta > 0.0) || !(U >= 0.0) || !(rho > 0.0 && rho < 1.0) || T < 1 ||
      !(alpha >= 0.0) || !(kappa >= 0.0)) {
    throw std::invalid_argument("etc_n0: bad parameters");
  }
  const double c_pref = 1600.0 * pow4(std::sqrt(U) + 1.0) /
                        (rho * rho * (1.0 - rho) * (1.0 - rho));
  const double a = c_pref / (Delta * Delta);
  const long cap = (T + 1) / 2;  // ceil(T/2)
  const double t2 = static_cast<double>(T) * static_cast<double>(T);
  // Left side grows linearly, right side logarithmically; after the first
  // crossing the left side only pulls further ahead, so the crossing is
  // unique and bisection is sound.
  const auto pred = [&](long n) {
    return static_cast<double>(n) >=
           a * std::log(4.0 * static_cast<double>(n) * t2);
  };
  const long found = first_true(1, cap, pred, mode);

  BoundReport rep;
  rep.kind = BoundKind::EtcN0;
  rep.alpha = alpha;
  rep.delta_gap = Delta;
  rep.rho = rho;
  rep.U = U;
  rep.T = T;
  rep.K = 2;
  if (found > cap) {
    rep.value = cap;
    rep.witness = Witness::TCap;
  } else {
    rep.value = found;
    rep.witness = Witness::DeltaTerm;
  }
  rep.delta_term_value =
      a * std::log(4.0 * static_cast<double>(rep.value) * t2);
  rep.residual = kappa / std::sqrt(static_cast<double>(T));
  const double main =
      T - rep.value >= 1
          ? alpha * (std::pow(static_cast<double>(T - rep.value), -rho) -
                     std::pow(static_cast<double>(T), -rho))
          : kInf;
  rep.regret_bound = main + rep.residual;
  return rep;
}

BoundReport cor2_n0(double alpha, double Delta, double U, long T,
                    SolveMode mode) {
  if (!(alpha >= 0.0) || !(Delta >= 0.0) || !(U >= 0.0) || T < 1) {
    throw std::invalid_argument("cor2_n0: bad parameters");
  }
  BoundReport rep;
  rep.kind = BoundKind::Cor2N0;
  rep.alpha = alpha;
  rep.delta_gap = Delta;
  rep.rho = 0.5;
  rep.U = U;
  rep.T = T;
  rep.K = 2;
  if (alpha == 0.0 && Delta == 0.0) {
    // Neither branch is finite: no crossing exists.
    rep.value = (T + 1) / 2;
    rep.witness = Witness::Cap;
    rep.regret_bound = 0.0;
    return rep;
  }
  const double pref = 25600.0 * pow4(std::sqrt(U) + 1.0);
  const double t2 = static_cast<double>(T) * static_cast<double>(T);
  double b1_at = kInf;
  double b2_at = kInf;
  // n - min(b1, b2) = max(n - b1, n - b2): the cubic side is strictly
  // increasing in n and the gap side only keeps growing once positive, so
  // the strict crossing is unique and bisection is sound.
  const auto pred = [&](long n) {
    const double lg = std::log(4.0 * static_cast<double>(n) * t2);
    b1_at = Delta > 0.0 ? pref * lg / (Delta * Delta) : kInf;
    const double rem = static_cast<double>(T - n);
    b2_at = alpha > 0.0 ? pref * lg * rem * rem * rem / (alpha * alpha)
                        : kInf;
    return static_cast<double>(n) > std::min(b1_at, b2_at);
  };
  const long found = first_true(1, T, pred, mode);
  if (found > T) {
    rep.value = T;  // only reachable with alpha = 0 and a huge gap bound
    rep.witness = Witness::Cap;
    pred(T);
  } else {
    rep.value = found;
    pred(found);  // refresh the branch values at the solution (bisection
                  // leaves them at whatever midpoint it probed last)
    rep.witness = b1_at <= b2_at ? Witness::DeltaTerm : Witness::AlphaTerm;
  }
  rep.delta_term_value = b1_at;
  rep.alpha_term_value = b2_at;
  if (rep.value < T) {
    rep.regret_bound =
        alpha * (1.0 / std::sqrt(static_cast<double>(T - rep.value)) -
                 1.0 / std::sqrt(static_cast<double>(T)));
  } else {
    rep.regret_bound = alpha > 0.0 ? kInf : 0.0;
  }
  return rep;
}

namespace {

// min over integer m in [lo, hi] of (da/m^rho + db)^2, given the endpoint
// powers p_lo = lo^-rho and p_hi = hi^-rho (hoisted by the caller, which
// shares them across arm pairs). The gap is monotone in m, so the minimizer
// is an endpoint, or sits next to the sign change.
double min_gap_sq_over_range(double da, double db, double rho, long lo,
                             long hi, double p_lo, double p_hi) {
  const double g_lo = da * p_lo + db;
  const double g_hi = da * p_hi + db;
  double best = std::min(g_lo * g_lo, g_hi * g_hi);
  if ((g_lo < 0.0) == (g_hi < 0.0)) return best;
  // Sign change: check the integers bracketing the analytic root of
  // da/m^rho + db = 0.
  if (da == 0.0 || db == 0.0) return best;
  const double root = std::pow(-da / db, 1.0 / rho);
  if (!(root > 0.0) || root >= static_cast<double>(hi)) return best;
  const long around = static_cast<long>(root);
  for (long m = std::max(lo, around - 1); m <= std::min(hi, around + 2);
       ++m) {
    const double g = da * std::pow(static_cast<double>(m), -rho) + db;
    best = std::min(best, g * g);
  }
  return best;
}

}  // namespace

BoundReport rest_sure_nbar(const BanditInstance& inst,
                           CRhoExponent exponent) {
  inst.validate();
  const int K = inst.num_arms();
  const long T = inst.horizon_T;
  const double rho = inst.rho;
  const double U = inst.upper_alpha;

  BoundReport rep;
  rep.kind = BoundKind::RestSureNbar;
  rep.rho = rho;
  rep.U = U;
  rep.T = T;
  rep.K = K;
  if (K == 1) {  // nothing to eliminate
    rep.value = 0;
    rep.witness = Witness::Cap;
    rep.regret_bound = 0.0;
    return rep;
  }

  const double up = std::sqrt(U) + 1.0;
  const double up_pow =
      exponent == CRhoExponent::FourthPower ? pow4(up) : up * up;
  const double c_pref =
      1600.0 * up_pow / (rho * rho * (1.0 - rho) * (1.0 - rho));
  const double kt2 = static_cast<double>(K) * static_cast<double>(K) *
                     static_cast<double>(T) * static_cast<double>(T);

  std::vector<int> remaining(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) remaining[static_cast<std::size_t>(i)] = i;
  long sigma_sum = 0;

  for (int s = 1; s <= K - 1; ++s) {
    const long rem_count = K - s + 1;
    const double budget =
        static_cast<double>(T - sigma_sum) / static_cast<double>(rem_count);
    StageDetail best;
    best.pulls = -1;
    for (int a : remaining) {
      // Curve-difference parameters against every other remaining arm, so
      // the inner loop only needs one power evaluation per pull count.
      std::vector<double> pair_da;
      std::vector<double> pair_db;
      for (int j : remaining) {
        if (j == a) continue;
        pair_da.push_back(inst.arms[static_cast<std::size_t>(a)].alpha -
                          inst.arms[static_cast<std::size_t>(j)].alpha);
        pair_db.push_back(inst.arms[static_cast<std::size_t>(a)].beta -
                          inst.arms[static_cast<std::size_t>(j)].beta);
      }
      const auto mu_star_at = [&](double p) {
        double lo = kInf;
        for (const ArmSpec& arm : inst.arms) {
          lo = std::min(lo, arm.alpha * p + arm.beta);
        }
        return lo;
      };
      // A candidate at or past the current stage best can never replace it
      // (ties keep the earlier, lower-indexed arm), so stop the scan there.
      const long n_stop = best.pulls > 0 ? best.pulls - 1 : T + 1;
      // Candidate bound for eliminating arm a at this stage: smallest n
      // strictly above the four-term minimum, terms evaluated lazily at
      // each n (the frontier and the gap ranges move with n).
      for (long n = 1; n <= n_stop; ++n) {
        const double lg = std::log(static_cast<double>(n) * kt2);
        const double c = c_pref * lg;
        const long tau_out =
            T - sigma_sum - static_cast<long>(K - s) * n;
        double elim = kInf;
        double stop = kInf;
        double commit = kInf;
        double min_gap_sq = kInf;
        if (tau_out >= 1 && n <= tau_out) {
          const double p_lo = std::pow(static_cast<double>(n), -rho);
          const double p_hi = std::pow(static_cast<double>(tau_out), -rho);
          double commit_gap_sq = kInf;
          for (std::size_t pi = 0; pi < pair_da.size(); ++pi) {
            min_gap_sq = std::min(
                min_gap_sq,
                min_gap_sq_over_range(pair_da[pi], pair_db[pi], rho, n,
                                      tau_out, p_lo, p_hi));
            const double g = pair_da[pi] * p_hi + pair_db[pi];
            commit_gap_sq = std::min(commit_gap_sq, g * g);
          }
          if (min_gap_sq > 0.0) elim = c / min_gap_sq;
          if (commit_gap_sq > 0.0) commit = c / commit_gap_sq;
          const long displaced = tau_out - (K - s);
          if (displaced >= 1) {
            const double p_d =
                std::pow(static_cast<double>(displaced), -rho);
            const double d = mu_star_at(p_d) - mu_star_at(p_hi);
            if (d > 0.0) stop = c / (d * d);
          }
        }
        const double m = std::min({budget, elim, stop, commit});
        if (static_cast<double>(n) > m) {
          if (best.pulls < 0 || n < best.pulls) {
            best.stage = s;
            best.arm = a;
            best.pulls = n;
            best.tau_out = tau_out;
            best.min_gap_sq = min_gap_sq;
            if (m == budget) {
              best.witness = Witness::Budget;
            } else if (m == elim) {
              best.witness = Witness::Elimination;
            } else if (m == stop) {
              best.witness = Witness::StopExploration;
            } else {
              best.witness = Witness::Commit;
            }
          }
          break;
        }
      }
    }
    if (best.pulls < 0) {
      throw std::logic_error("stage scan found no crossing");  // unreachable
    }
    sigma_sum += best.pulls;
    remaining.erase(
        std::find(remaining.begin(), remaining.end(), best.arm));
    rep.stages.push_back(best);
  }

  rep.value = sigma_sum;
  rep.witness = rep.stages.back().witness;
  rep.regret_bound = T - sigma_sum >= 1
                         ? mu_star(inst, T - sigma_sum) - mu_star(inst, T)
                         : kInf;
  return rep;
}

}  // namespace rested
