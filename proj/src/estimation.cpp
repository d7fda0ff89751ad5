#include "rested/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace rested {

double harmonic_sum(long tau, double rho) {
  if (tau < 0) throw std::invalid_argument("harmonic_sum: tau must be >= 0");
  double sum = 0.0;
  for (long s = 1; s <= tau; ++s) {
    sum += std::pow(static_cast<double>(s), -rho);
  }
  return sum;
}

HarmonicTable::HarmonicTable(double rho, long max_tau) : rho_(rho) {
  if (max_tau < 0) {
    throw std::invalid_argument("HarmonicTable: max_tau must be >= 0");
  }
  prefix_.resize(static_cast<std::size_t>(max_tau) + 1);
  prefix_[0] = 0.0;
  double sum = 0.0;
  for (long s = 1; s <= max_tau; ++s) {
    sum += std::pow(static_cast<double>(s), -rho);
    prefix_[static_cast<std::size_t>(s)] = sum;
  }
}

double HarmonicTable::prefix(long tau) const {
  if (tau < 0 || tau > max_tau()) {
    throw std::out_of_range("HarmonicTable: tau outside table range");
  }
  return prefix_[static_cast<std::size_t>(tau)];
}

SplitEstimate split_means(const ArmSamples& samples) {
  const long n = samples.size();
  if (n < 2) {
    throw std::invalid_argument("split_means: need at least 2 samples");
  }
  const long tau = n / 2;
  double sum1 = 0.0;
  for (long s = 0; s < tau; ++s) {
    sum1 += samples.losses[static_cast<std::size_t>(s)];
  }
  double sum2 = 0.0;
  for (long s = tau; s < 2 * tau; ++s) {
    sum2 += samples.losses[static_cast<std::size_t>(s)];
  }
  const double t = static_cast<double>(tau);
  return {tau, sum1 / t, sum2 / t};
}

namespace {

// Single definition of the estimator arithmetic, shared by the direct and
// table/streaming paths so they agree bit-for-bit given equal inputs.
double alpha_from(const SplitEstimate& split, double s_tau, double s_2tau) {
  const double denom = s_tau - (s_2tau - s_tau);
  return static_cast<double>(split.tau) * split.dx() / denom;
}

double beta_from(const SplitEstimate& split, double alpha, double s_tau) {
  return split.x_hat - alpha / static_cast<double>(split.tau) * s_tau;
}

// log(1/delta)/tau + sqrt(log(1/delta)/tau): the bracket every simplified
// half-width shares.
double cb_bracket(double log_term, long tau) {
  const double r = log_term / static_cast<double>(tau);
  return r + std::sqrt(r);
}

double sqrt_u_plus_1_sq(double U) {
  const double s = std::sqrt(U) + 1.0;
  return s * s;
}

}  // namespace

double alpha_hat(const SplitEstimate& split, double rho) {
  return alpha_from(split, harmonic_sum(split.tau, rho),
                    harmonic_sum(2 * split.tau, rho));
}

double alpha_hat(const SplitEstimate& split, const HarmonicTable& table) {
  return alpha_from(split, table.prefix(split.tau),
                    table.prefix(2 * split.tau));
}

double beta_hat(const SplitEstimate& split, double alpha, double rho) {
  return beta_from(split, alpha, harmonic_sum(split.tau, rho));
}

double beta_hat(const SplitEstimate& split, double alpha,
                const HarmonicTable& table) {
  return beta_from(split, alpha, table.prefix(split.tau));
}

double alpha_cb(long tau, double rho, double U, double delta) {
  const double lg = std::log(1.0 / delta);
  return 5.0 * std::pow(static_cast<double>(tau), rho) * sqrt_u_plus_1_sq(U) /
         rho * cb_bracket(lg, tau);
}

double beta_cb(long tau, double rho, double U, double delta) {
  const double lg = std::log(1.0 / delta);
  return 5.0 * sqrt_u_plus_1_sq(U) / ((1.0 - rho) * rho) * cb_bracket(lg, tau);
}

double cb_mu(long tau, double rho, double U, double delta, int K, long T) {
  const double lg = std::log(static_cast<double>(tau) *
                             static_cast<double>(K) * static_cast<double>(T) /
                             delta);
  return 10.0 * sqrt_u_plus_1_sq(U) / ((1.0 - rho) * rho) *
         cb_bracket(lg, tau);
}

double raw_mean_cb(long tau, double U, double delta) {
  const double lg = std::log(1.0 / delta);
  const double t = static_cast<double>(tau);
  return sqrt_u_plus_1_sq(U) * std::sqrt(2.0 * lg / t) + (U + 1.0) * lg / t;
}

double raw_mean_cb_tight(long tau, double rho, double U, double delta,
                         bool second_half) {
  const double lg = std::log(1.0 / delta);
  const double t = static_cast<double>(tau);
  const double var_sum =
      second_half
          ? U * (harmonic_sum(2 * tau, rho) - harmonic_sum(tau, rho))
          : U * harmonic_sum(tau, rho);
  return (std::sqrt(var_sum) / t + std::sqrt(1.0 / t)) *
             std::sqrt(2.0 * (U + 1.0) * lg) +
         2.0 * (U + 1.0) * lg / (3.0 * t);
}

double alpha_cb_tight(long tau, double rho, double U, double delta) {
  const double lg = std::log(1.0 / delta);
  const double t = static_cast<double>(tau);
  const double var_sum = U * harmonic_sum(tau, rho);
  const double bracket = (std::sqrt(var_sum) / t + std::sqrt(1.0 / t)) * 2.0 *
                             std::sqrt(2.0 * (U + 1.0) * lg) +
                         4.0 * (U + 1.0) * lg / (3.0 * t);
  return std::pow(2.0 * t, rho) / (std::pow(2.0, rho) - 1.0) * bracket;
}

double beta_cb_tight(long tau, double rho, double U, double delta) {
  const double lg = std::log(1.0 / delta);
  const double t = static_cast<double>(tau);
  const double bracket = sqrt_u_plus_1_sq(U) * std::sqrt(2.0 * lg / t) +
                         2.0 * (U + 1.0) * lg / (3.0 * t);
  return 5.0 / (rho * (1.0 - rho)) * bracket;
}

namespace {

ParamEstimate estimate_from(const SplitEstimate& split, double s_tau,
                            double s_2tau, double rho, double U,
                            double delta) {
  ParamEstimate est;
  est.tau = split.tau;
  est.delta = delta;
  est.upper_alpha = U;
  est.alpha_hat = alpha_from(split, s_tau, s_2tau);
  est.beta_hat = beta_from(split, est.alpha_hat, s_tau);
  est.cb_alpha = alpha_cb(split.tau, rho, U, delta);
  est.cb_beta = beta_cb(split.tau, rho, U, delta);
  return est;
}

}  // namespace

ParamEstimate make_estimate(const SplitEstimate& split, double rho, double U,
                            double delta) {
  return estimate_from(split, harmonic_sum(split.tau, rho),
                       harmonic_sum(2 * split.tau, rho), rho, U, delta);
}

ParamEstimate make_estimate(const SplitEstimate& split,
                            const HarmonicTable& table, double U,
                            double delta) {
  return estimate_from(split, table.prefix(split.tau),
                       table.prefix(2 * split.tau), table.rho(), U, delta);
}

double predict_loss_params(double alpha, double beta, double U, long tau_out,
                           double rho) {
  if (tau_out < 1) {
    throw std::invalid_argument("predict_loss: tau_out must be >= 1");
  }
  const double a = std::clamp(alpha, 0.0, U);
  if (a == 0.0) return beta;
  return a * std::pow(static_cast<double>(tau_out), -rho) + beta;
}

double predict_loss(const ParamEstimate& est, long tau_out, double rho) {
  return predict_loss_params(est.alpha_hat, est.beta_hat, est.upper_alpha,
                             tau_out, rho);
}

SplitTracker::SplitTracker(double rho, double U)
    : rho_(rho), upper_alpha_(U) {}

void SplitTracker::push(double loss) {
  window_.push_back(loss);
  ++n_;
  total_ += loss;
  if (n_ % 2 == 0) {
    // Sample positions: window_ holds (tau, n]. The new split boundary is
    // tau+1 = n/2; its sample is window_.front(). The second half gains the
    // two newest samples and sheds the one crossing into the first half.
    s1_ += window_.front();
    s2_ += window_[window_.size() - 2] + window_[window_.size() - 1] -
          window_.front();
    window_.pop_front();
    ++tau_;
    hs_tau_ += std::pow(static_cast<double>(tau_), -rho_);
    hs_2tau_ += std::pow(static_cast<double>(2 * tau_ - 1), -rho_) +
                std::pow(static_cast<double>(2 * tau_), -rho_);
  }
}

double SplitTracker::raw_mean() const {
  if (n_ == 0) throw std::logic_error("SplitTracker: no samples yet");
  return total_ / static_cast<double>(n_);
}

SplitEstimate SplitTracker::split() const {
  if (!has_estimate()) {
    throw std::logic_error("SplitTracker: need at least 2 samples");
  }
  const double t = static_cast<double>(tau_);
  return {tau_, s1_ / t, s2_ / t};
}

ParamEstimate SplitTracker::estimate(double delta) const {
  const SplitEstimate sp = split();
  ParamEstimate est;
  est.tau = sp.tau;
  est.delta = delta;
  est.upper_alpha = upper_alpha_;
  est.alpha_hat = alpha_from(sp, hs_tau_, hs_2tau_);
  est.beta_hat = beta_from(sp, est.alpha_hat, hs_tau_);
  est.cb_alpha = alpha_cb(sp.tau, rho_, upper_alpha_, delta);
  est.cb_beta = beta_cb(sp.tau, rho_, upper_alpha_, delta);
  return est;
}

double SplitTracker::alpha_hat() const {
  return alpha_from(split(), hs_tau_, hs_2tau_);
}

double SplitTracker::beta_hat() const {
  const SplitEstimate sp = split();
  return beta_from(sp, alpha_from(sp, hs_tau_, hs_2tau_), hs_tau_);
}

double SplitTracker::predict(long m) const {
  if (!has_estimate()) {
    return predict_loss_params(0.0, raw_mean(), upper_alpha_, m, rho_);
  }
  const SplitEstimate sp = split();
  const double a = alpha_from(sp, hs_tau_, hs_2tau_);
  const double b = beta_from(sp, a, hs_tau_);
  return predict_loss_params(a, b, upper_alpha_, m, rho_);
}

}  // namespace rested
