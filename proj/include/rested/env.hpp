#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rested/rng.hpp"

// Rested-bandit environment: K arms whose expected loss decays with the
// arm's own pull count tau as mu_i(tau) = alpha_i / tau^rho + beta_i.
namespace rested {

struct ArmSpec {
  double alpha = 0.0;
  double beta = 0.0;
};

struct NoiseModel {
  enum class Kind { Deterministic, ScaledBernoulli, TruncGaussian };
  Kind kind = Kind::ScaledBernoulli;
  double sigma = 0.0;  // TruncGaussian only

  static NoiseModel deterministic() { return {Kind::Deterministic, 0.0}; }
  static NoiseModel scaled_bernoulli() { return {Kind::ScaledBernoulli, 0.0}; }
  static NoiseModel trunc_gaussian(double sigma) {
    return {Kind::TruncGaussian, sigma};
  }
};

struct BanditInstance {
  std::vector<ArmSpec> arms;
  double rho = 0.5;
  long horizon_T = 0;
  double upper_alpha = 1.0;  // U: losses live in [0, U+1]
  NoiseModel noise;

  int num_arms() const { return static_cast<int>(arms.size()); }
  void validate() const;  // throws std::invalid_argument
};

// Thrown when a policy asks for a pull past the horizon.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- ground truth (evaluator surface; policies never see these) ---

// Mean loss of the tau-th pull, tau >= 1.
double expected_loss(const BanditInstance& inst, int arm, long tau);
// gap(i, j, tau) = mu_i(tau) - mu_j(tau)
double gap(const BanditInstance& inst, int i, int j, long tau);
// min_i mu_i(tau)
double mu_star(const BanditInstance& inst, long tau);
// argmin_i mu_i(T) with its value; ties break toward the lowest index.
std::pair<int, double> optimal_arm(const BanditInstance& inst);

// One loss draw for the tau-th pull of an arm. Pure in (arm_key, tau): the
// sample does not depend on how pulls of other arms are interleaved.
double sample_loss(const ArmSpec& arm, const NoiseModel& noise, double rho,
                   double U, long tau, std::uint64_t arm_key);

// Pull-capable handle given to policies. Exposes the known parameters
// (K, T, rho, U) and pull counts, but not the arm means: policies cannot
// read ground truth by construction.
class Env {
 public:
  Env(BanditInstance inst, std::uint64_t seed);

  int num_arms() const { return static_cast<int>(arm_keys_.size()); }
  long horizon() const { return inst_.horizon_T; }
  double rho() const { return inst_.rho; }
  double upper_alpha() const { return inst_.upper_alpha; }
  long round() const { return round_; }
  long remaining() const { return inst_.horizon_T - round_; }
  long pull_count(int arm) const;
  const std::vector<long>& pull_counts() const { return pull_counts_; }

  // Draws the loss of the next pull of `arm`; throws BudgetError at round T.
  double pull(int arm);

 private:
  BanditInstance inst_;
  std::vector<std::uint64_t> arm_keys_;
  std::vector<long> pull_counts_;
  long round_ = 0;
};

// --- serialization ---
// {"rho": r, "T": n, "U": u, "noise": {"kind": ...}, "arms": [{"alpha","beta"}]}
BanditInstance instance_from_json_text(const std::string& text);
std::string instance_to_json_text(const BanditInstance& inst);

}  // namespace rested
