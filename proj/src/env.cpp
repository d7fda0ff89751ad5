#include "rested/env.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace rested {

void BanditInstance::validate() const {
  if (arms.empty()) {
    throw std::invalid_argument("instance must have at least one arm");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("rho must lie in the open interval (0, 1)");
  }
  if (horizon_T < static_cast<long>(arms.size())) {
    throw std::invalid_argument("horizon T must be at least the number of arms");
  }
  if (!(upper_alpha >= 0.0) || !std::isfinite(upper_alpha)) {
    throw std::invalid_argument("U must be finite and nonnegative");
  }
  for (const ArmSpec& a : arms) {
    if (!(a.alpha >= 0.0 && a.alpha <= upper_alpha)) {
      throw std::invalid_argument("each alpha must lie in [0, U]");
    }
    if (!(a.beta >= 0.0 && a.beta <= 1.0)) {
      throw std::invalid_argument("each beta must lie in [0, 1]");
    }
  }
  if (noise.kind == NoiseModel::Kind::TruncGaussian && !(noise.sigma > 0.0)) {
    throw std::invalid_argument("truncated-Gaussian noise needs sigma > 0");
  }
}

double expected_loss(const BanditInstance& inst, int arm, long tau) {
  const ArmSpec& a = inst.arms.at(static_cast<std::size_t>(arm));
  if (tau < 1) throw std::invalid_argument("pull index tau must be >= 1");
  if (a.alpha == 0.0) return a.beta;  // skip the pow on flat arms
  return a.alpha * std::pow(static_cast<double>(tau), -inst.rho) + a.beta;
}

double gap(const BanditInstance& inst, int i, int j, long tau) {
  return expected_loss(inst, i, tau) - expected_loss(inst, j, tau);
}

double mu_star(const BanditInstance& inst, long tau) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.num_arms(); ++i) {
    best = std::min(best, expected_loss(inst, i, tau));
  }
  return best;
}

std::pair<int, double> optimal_arm(const BanditInstance& inst) {
  int best_arm = 0;
  double best = expected_loss(inst, 0, inst.horizon_T);
  for (int i = 1; i < inst.num_arms(); ++i) {
    const double v = expected_loss(inst, i, inst.horizon_T);
    if (v < best) {
      best = v;
      best_arm = i;
    }
  }
  return {best_arm, best};
}

double sample_loss(const ArmSpec& arm, const NoiseModel& noise, double rho,
                   double U, long tau, std::uint64_t arm_key) {
  const double mu =
      arm.alpha == 0.0
          ? arm.beta
          : arm.alpha * std::pow(static_cast<double>(tau), -rho) + arm.beta;
  switch (noise.kind) {
    case NoiseModel::Kind::Deterministic:
      return mu;
    case NoiseModel::Kind::ScaledBernoulli: {
      // (U+1) * Bernoulli(mu / (U+1)): mean mu, support {0, U+1}.
      rng::Stream s(rng::combine(arm_key, static_cast<std::uint64_t>(tau)));
      const double u = s.next_double();
      return u < mu / (U + 1.0) ? U + 1.0 : 0.0;
    }
    case NoiseModel::Kind::TruncGaussian: {
      // Gaussian around mu, redrawn until it lands in [0, U+1].
      rng::Stream s(rng::combine(arm_key, static_cast<std::uint64_t>(tau)));
      for (;;) {
        const double u1 = s.next_open0();  // (0,1]: safe for log
        const double u2 = s.next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double z = r * std::cos(2.0 * 3.14159265358979323846 * u2);
        const double x = mu + noise.sigma * z;
        if (x >= 0.0 && x <= U + 1.0) return x;
        const double x2 = mu + noise.sigma * r *
                                   std::sin(2.0 * 3.14159265358979323846 * u2);
        if (x2 >= 0.0 && x2 <= U + 1.0) return x2;
      }
    }
  }
  throw std::logic_error("unreachable noise kind");
}

Env::Env(BanditInstance inst, std::uint64_t seed) : inst_(std::move(inst)) {
  inst_.validate();
  arm_keys_.reserve(inst_.arms.size());
  for (std::size_t i = 0; i < inst_.arms.size(); ++i) {
    // arm index salted by +1 so arm 0 does not collide with the bare seed
    arm_keys_.push_back(rng::combine(seed, static_cast<std::uint64_t>(i) + 1));
  }
  pull_counts_.assign(inst_.arms.size(), 0);
}

long Env::pull_count(int arm) const {
  return pull_counts_.at(static_cast<std::size_t>(arm));
}

double Env::pull(int arm) {
  if (arm < 0 || arm >= num_arms()) {
    throw std::invalid_argument("arm index out of range");
  }
  if (round_ >= inst_.horizon_T) {
    throw BudgetError("pull budget exhausted: all T rounds used");
  }
  ++round_;
  const long tau = ++pull_counts_[static_cast<std::size_t>(arm)];
  return sample_loss(inst_.arms[static_cast<std::size_t>(arm)], inst_.noise,
                     inst_.rho, inst_.upper_alpha, tau,
                     arm_keys_[static_cast<std::size_t>(arm)]);
}

namespace {

NoiseModel noise_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "scaled_bernoulli");
  if (kind == "deterministic") return NoiseModel::deterministic();
  if (kind == "scaled_bernoulli") return NoiseModel::scaled_bernoulli();
  if (kind == "trunc_gaussian") {
    if (!j.contains("sigma")) {
      throw std::invalid_argument("trunc_gaussian noise requires \"sigma\"");
    }
    return NoiseModel::trunc_gaussian(j.at("sigma").get<double>());
  }
  throw std::invalid_argument("unknown noise kind: " + kind);
}

nlohmann::json noise_to_json(const NoiseModel& n) {
  nlohmann::json j;
  switch (n.kind) {
    case NoiseModel::Kind::Deterministic:
      j["kind"] = "deterministic";
      break;
    case NoiseModel::Kind::ScaledBernoulli:
      j["kind"] = "scaled_bernoulli";
      break;
    case NoiseModel::Kind::TruncGaussian:
      j["kind"] = "trunc_gaussian";
      j["sigma"] = n.sigma;
      break;
  }
  return j;
}

}  // namespace

BanditInstance instance_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad instance JSON: ") + e.what());
  }
  BanditInstance inst;
  try {
    inst.rho = j.at("rho").get<double>();
    inst.horizon_T = j.at("T").get<long>();
    inst.upper_alpha = j.at("U").get<double>();
    if (j.contains("noise")) inst.noise = noise_from_json(j.at("noise"));
    for (const auto& arm : j.at("arms")) {
      inst.arms.push_back(
          {arm.at("alpha").get<double>(), arm.at("beta").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad instance JSON: ") + e.what());
  }
  inst.validate();
  return inst;
}

std::string instance_to_json_text(const BanditInstance& inst) {
  nlohmann::json j;
  j["rho"] = inst.rho;
  j["T"] = inst.horizon_T;
  j["U"] = inst.upper_alpha;
  j["noise"] = noise_to_json(inst.noise);
  j["arms"] = nlohmann::json::array();
  for (const ArmSpec& a : inst.arms) {
    j["arms"].push_back({{"alpha", a.alpha}, {"beta", a.beta}});
  }
  return j.dump(2);
}

}  // namespace rested
