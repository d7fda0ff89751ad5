#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

// Split-sample estimators for the decay/offset parameters of a
// pull-count-decreasing loss curve mu(tau) = alpha/tau^rho + beta, plus the
// Bernstein-style confidence half-widths used by the policies.
namespace rested {

// S(tau, rho) = sum_{s=1}^{tau} s^(-rho), summed in ascending order so every
// caller sees the identical floating-point value.
double harmonic_sum(long tau, double rho);

// Memoized prefix sums S(1..max_tau, rho); prefix(0) = 0. Bit-identical to
// harmonic_sum at every tau.
class HarmonicTable {
 public:
  HarmonicTable(double rho, long max_tau);
  double rho() const { return rho_; }
  long max_tau() const { return static_cast<long>(prefix_.size()) - 1; }
  double prefix(long tau) const;
 private:
  double rho_;
  std::vector<double> prefix_;
};

// Loss sequence of one arm, index = that arm's own pull count (1-based).
struct ArmSamples {
  std::vector<double> losses;
  void push(double x) { losses.push_back(x); }
  long size() const { return static_cast<long>(losses.size()); }
};

// Means of the first and second halves of a 2*tau-sample prefix. The first
// half sits at systematically higher loss (the curve decays), so
// dx = x_hat - x_tilde isolates the decaying component.
struct SplitEstimate {
  long tau = 0;
  double x_hat = 0.0;
  double x_tilde = 0.0;
  double dx() const { return x_hat - x_tilde; }
};

struct ParamEstimate {
  double alpha_hat = 0.0;  // unclipped (may be negative under noise)
  double beta_hat = 0.0;
  double cb_alpha = 0.0;
  double cb_beta = 0.0;
  long tau = 0;
  double delta = 0.0;
  double upper_alpha = 0.0;  // U: the known prior bound used for clipping
};

// tau = floor(n/2); with odd n the newest sample is ignored.
// Throws std::invalid_argument with fewer than 2 samples.
SplitEstimate split_means(const ArmSamples& samples);

// tau * dx / (S(tau) - (S(2*tau) - S(tau))); denominator provably positive.
double alpha_hat(const SplitEstimate& split, double rho);
double alpha_hat(const SplitEstimate& split, const HarmonicTable& table);

// x_hat - (alpha_hat / tau) * S(tau)
double beta_hat(const SplitEstimate& split, double alpha, double rho);
double beta_hat(const SplitEstimate& split, double alpha,
                const HarmonicTable& table);

// Confidence half-widths (losses supported on [0, U+1]).
double alpha_cb(long tau, double rho, double U, double delta);
double beta_cb(long tau, double rho, double U, double delta);
// Width valid jointly over arms, split sizes, and projection targets.
double cb_mu(long tau, double rho, double U, double delta, int K, long T);
// Half-width for a raw half-sample mean (diagnostics).
double raw_mean_cb(long tau, double U, double delta);

// Sharper Bernstein forms that keep the variance sums explicit instead of
// bounding them; available for sensitivity studies, not used by policies.
// second_half selects the variance sum over pulls tau+1..2*tau.
double raw_mean_cb_tight(long tau, double rho, double U, double delta,
                         bool second_half = false);
double alpha_cb_tight(long tau, double rho, double U, double delta);
double beta_cb_tight(long tau, double rho, double U, double delta);

ParamEstimate make_estimate(const SplitEstimate& split, double rho, double U,
                            double delta);
ParamEstimate make_estimate(const SplitEstimate& split,
                            const HarmonicTable& table, double U,
                            double delta);

// Projected loss at pull count tau_out: clamp(alpha_hat, 0, U)/tau_out^rho
// + beta_hat. The stored alpha_hat stays unclipped; only the projection
// applies the known prior range.
double predict_loss(const ParamEstimate& est, long tau_out, double rho);
// Same arithmetic from bare parameters (single definition point).
double predict_loss_params(double alpha, double beta, double U, long tau_out,
                           double rho);

// Streaming split estimator: O(1) amortized per sample, O(n/2) memory (only
// the still-unassigned tail of the sequence is retained), harmonic prefix
// sums maintained incrementally. Matches split_means/alpha_hat/beta_hat on
// the same prefix: exactly for x_hat, to ~1ulp accumulation for x_tilde.
class SplitTracker {
 public:
  SplitTracker(double rho, double U);

  void push(double loss);
  long count() const { return n_; }          // samples seen
  long tau() const { return tau_; }          // current split size
  bool has_estimate() const { return tau_ >= 1; }
  double raw_mean() const;                   // mean of all samples

  SplitEstimate split() const;               // throws if !has_estimate()
  ParamEstimate estimate(double delta) const;
  double alpha_hat() const;
  double beta_hat() const;
  // Projected loss at pull count m; with fewer than 2 samples falls back to
  // the flat raw-mean predictor.
  double predict(long m) const;

 private:
  double rho_;
  double upper_alpha_;
  long n_ = 0;
  long tau_ = 0;
  double s1_ = 0.0;     // sum of samples 1..tau
  double s2_ = 0.0;     // sum of samples tau+1..2*tau
  double total_ = 0.0;  // sum of all samples
  double hs_tau_ = 0.0;   // S(tau, rho)
  double hs_2tau_ = 0.0;  // S(2*tau, rho)
  std::deque<double> window_;  // samples at positions (tau, n]
};

}  // namespace rested
