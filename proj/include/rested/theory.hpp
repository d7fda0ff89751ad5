#pragma once

#include <string>
#include <vector>

#include "rested/env.hpp"

// Closed-form and fixed-point computations of the bound quantities:
// minimum suboptimal-pull counts any strategy must pay (tau_sub and
// variants), the exploration lengths after which the two policies provably
// commit (etc n0, the 2-arm elimination n0), and the per-stage elimination
// schedule bound for the active-set policy (nbar). Self-referential minima
// are resolved by ascending integer scan; bisection is kept as an
// independent cross-check where the crossing is provably unique.
namespace rested {

enum class BoundKind {
  TauSub,        // three-term minimum with self-referential power term
  TauSubExact,   // sharper two-term log form from the same argument
  Cor1TauSub,    // rho = 1/2 specialization (cubic power term)
  EtcN0,         // explore-then-commit exploration length
  Cor2N0,        // 2-arm elimination exploration length, rho = 1/2
  RestSureNbar,  // per-stage elimination schedule, K arms
};

enum class Witness {
  TCap,       // the T/2 feasibility cap attained the minimum
  DeltaTerm,  // the gap-driven term attained it
  AlphaTerm,  // the decay-driven (power-of-(T-n)) term attained it
  Budget,     // stage bound: remaining budget split across survivors
  Elimination,        // stage bound: elimination condition
  StopExploration,    // stage bound: exploration-unprofitable condition
  Commit,             // stage bound: commitment condition
  Cap,        // scan hit its range end without a crossing
};

const char* to_string(BoundKind kind);
const char* to_string(Witness w);

enum class SolveMode { Scan, Bisect };

// Which power of (sqrt(U)+1) enters the stage constant. The statements are
// internally inconsistent (one display uses the square, the sibling
// results and the proofs use the fourth power); the fourth power is the
// default, the square kept selectable for sensitivity checks.
enum class CRhoExponent { FourthPower, SquaredOnly };

struct StageDetail {
  int stage = 0;          // 1-based elimination stage
  int arm = 0;            // arm removed at this stage
  long pulls = 0;         // its sweep count bound n_sigma(s)
  Witness witness = Witness::Budget;
  long tau_out = 0;       // projection frontier at the found n
  double min_gap_sq = 0;  // elimination-term minimum squared gap
};

struct BoundReport {
  BoundKind kind = BoundKind::TauSub;
  long value = 0;
  Witness witness = Witness::Cap;
  double regret_bound = 0.0;
  double residual = 0.0;  // additive O(1/sqrt(T)) part, reported separately
  // Echoed inputs (unused ones stay at their defaults).
  double alpha = 0.0;
  double delta_gap = 0.0;
  double rho = 0.0;
  double C = 0.0;
  double U = 0.0;
  long T = 0;
  int K = 0;
  // Diagnostic values of the competing terms at the solution.
  double delta_term_value = 0.0;
  double alpha_term_value = 0.0;
  std::vector<StageDetail> stages;  // RestSureNbar only
};

// Smallest tau in [T] strictly larger than
//   min{ T/2, log(T)/(C*Delta^2), (log(T)/(C*alpha^2))*(T-tau-1)^(2rho+2) }.
// The third term decreases in tau while the left side increases, so the
// crossing is unique; alpha = 0 removes the third term from the min.
BoundReport tau_sub(double alpha, double delta_gap, double rho, double C,
                    long T, SolveMode mode = SolveMode::Scan);

// Sharper form: smallest tau in [T/2] with
//   tau >= min{ log(C*dg^2*tau/4)/(8*C*dg^2),  same with dg = Delta },
// where dg for the first term is the per-pull decay gap
// Delta~_tau = alpha*((T-tau-1)^-rho - (T-tau)^-rho). A term participates
// only once its log factor is positive (argument > 1); until then it is
// treated as not yet binding. (Read without that rule the expression is
// degenerate: the positive part of log(x*tau/4)/(8x) never exceeds 1/(32e),
// so tau = 1 would always qualify.) If nothing binds by T/2 the result is
// the T/2 cap. Scan only: the predicate is not provably monotone.
BoundReport tau_sub_exact(double alpha, double delta_gap, double rho,
                          double C, long T);

// rho = 1/2 specialization: middle term carries a ceiling, power term is
// cubic. Must match tau_sub(alpha, delta, 0.5, C, T) up to that ceiling.
BoundReport cor1_tau_sub(double alpha, double delta_gap, double C, long T,
                         SolveMode mode = SolveMode::Scan);

// alpha * (1/(T-tau_sub)^rho - 1/T^rho); the floor any strategy's regret
// obeys after tau_sub forced suboptimal pulls. Throws if tau_sub >= T.
double lower_bound_regret(double alpha, double rho, long T, long tau_sub);

// Explore-then-commit exploration length: smallest n with
//   n >= (1600*(sqrt(U)+1)^4/(rho^2*(1-rho)^2)) * log(4*n*T^2) / Delta^2,
// capped at ceil(T/2). regret_bound = alpha*(1/(T-n0)^rho - 1/T^rho)
// + residual, residual = kappa/sqrt(T) with the calibration constant kappa
// supplied by the caller (default 0 reports the bare main term).
BoundReport etc_n0(double alpha, double Delta, double rho, double U, long T,
                   double kappa = 0.0, SolveMode mode = SolveMode::Scan);

// 2-arm elimination exploration length at rho = 1/2: smallest n in [T]
// strictly greater than min{ c/Delta^2, c*(T-n)^3/alpha^2 } with
// c = 25600*(sqrt(U)+1)^4*log(4*n*T^2). Degenerate alpha = Delta = 0
// reports the ceil(T/2) cap.
BoundReport cor2_n0(double alpha, double Delta, double U, long T,
                    SolveMode mode = SolveMode::Scan);

// Stage-by-stage elimination schedule for the active-set policy on a full
// ground-truth instance: for s = 1..K-1 the next-eliminated arm is the one
// with the smallest candidate sweep bound (smallest n strictly above the
// four-term minimum: budget, elimination, stop-exploration, commit), ties
// to the lowest index. value = nbar = sum of the stage bounds;
// regret_bound = mu*(T - nbar) - mu*(T) on ground truth.
BoundReport rest_sure_nbar(const BanditInstance& inst,
                           CRhoExponent exponent = CRhoExponent::FourthPower);

}  // namespace rested
