#include "rested/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

namespace rested {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double regret_core(const BanditInstance& inst, int i_out, long tau_out) {
  if (i_out < 0 || i_out >= inst.num_arms()) {
    throw std::invalid_argument("regret: output arm out of range");
  }
  if (tau_out < 1) {
    throw std::invalid_argument("regret: output arm was never pulled");
  }
  if (tau_out > inst.horizon_T) {
    throw std::invalid_argument("regret: tau_out exceeds the horizon");
  }
  const double r =
      expected_loss(inst, i_out, tau_out) - mu_star(inst, inst.horizon_T);
  // tau_out <= T and every mean decays in its own pull count, so the true
  // value is nonnegative; only rounding may dip below zero.
  if (r < -1e-12) {
    throw std::logic_error("regret: negative beyond floating tolerance");
  }
  return r < 0.0 ? 0.0 : r;
}

}  // namespace

void ExperimentConfig::validate() const {
  instance.validate();
  if (num_runs < 1) {
    throw std::invalid_argument("config: num_runs must be >= 1");
  }
  if (policies.empty()) {
    throw std::invalid_argument("config: at least one policy required");
  }
  const auto names = policy_names();
  for (const auto& p : policies) {
    if (std::find(names.begin(), names.end(), p) == names.end()) {
      throw std::invalid_argument("config: unknown policy: " + p);
    }
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("config: delta must be in (0, 1)");
  }
  if (!(regret_bound >= 0.0)) {
    throw std::invalid_argument("config: regret_bound must be >= 0");
  }
}

double regret(const BanditInstance& inst, const PolicyOutcome& outcome) {
  return regret_core(inst, outcome.i_out, outcome.tau_out);
}

double permutation_regret_check(const BanditInstance& inst,
                                const std::vector<long>& pulls_per_arm,
                                int i_out) {
  if (static_cast<int>(pulls_per_arm.size()) != inst.num_arms()) {
    throw std::invalid_argument("profile size does not match arm count");
  }
  long total = 0;
  for (long c : pulls_per_arm) {
    if (c < 0) throw std::invalid_argument("negative pull count in profile");
    total += c;
  }
  if (total > inst.horizon_T) {
    throw std::invalid_argument("profile exceeds the horizon");
  }
  if (i_out < 0 || i_out >= inst.num_arms()) {
    throw std::invalid_argument("i_out out of range");
  }
  return regret_core(inst, i_out, pulls_per_arm[static_cast<std::size_t>(i_out)]);
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, int run_id) {
  return rng::combine(base_seed, static_cast<std::uint64_t>(run_id));
}

AggregateStats aggregate(const std::vector<RunRecord>& records,
                         const std::vector<std::string>& policy_order,
                         double bound) {
  AggregateStats out;
  for (const auto& name : policy_order) {
    std::vector<double> regrets;
    double tau_sum = 0.0;
    long exceed = 0;
    for (const auto& r : records) {
      if (r.policy != name) continue;
      regrets.push_back(r.regret);
      tau_sum += static_cast<double>(r.tau_out);
      if (r.regret > bound) ++exceed;
    }
    if (regrets.empty()) continue;
    const int n = static_cast<int>(regrets.size());
    const double mean =
        std::accumulate(regrets.begin(), regrets.end(), 0.0) / n;
    double var = 0.0;
    if (n > 1) {
      for (double x : regrets) var += (x - mean) * (x - mean);
      var /= (n - 1);
    }
    std::sort(regrets.begin(), regrets.end());
    // Nearest-rank quantile: ceil(q*n)-th smallest. The epsilon keeps an
    // exactly-integer q*n from rounding up a rank.
    const auto quantile = [&](double q) {
      long rank = static_cast<long>(std::ceil(q * n - 1e-6));
      rank = std::clamp(rank, 1L, static_cast<long>(n));
      return regrets[static_cast<std::size_t>(rank - 1)];
    };
    PolicyStats st;
    st.policy = name;
    st.runs = n;
    st.mean_regret = mean;
    st.std_regret = std::sqrt(var);
    st.q50 = quantile(0.5);
    st.q90 = quantile(0.9);
    st.q99 = quantile(0.99);
    st.frac_exceed = static_cast<double>(exceed) / n;
    st.bound = bound;
    st.mean_tau_out = tau_sum / n;
    out.per_policy.push_back(std::move(st));
  }
  return out;
}

MonteCarloResult monte_carlo(const ExperimentConfig& config,
                             int num_threads) {
  config.validate();
  const int num_policies = static_cast<int>(config.policies.size());
  const long total = static_cast<long>(num_policies) * config.num_runs;
  std::vector<RunRecord> records(static_cast<std::size_t>(total));

  int threads = num_threads > 0
                    ? num_threads
                    : static_cast<int>(
                          std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<long>(threads, total));

  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::exception_ptr first_err;

  // Cell idx -> (run_id, policy): run_id-major so paired rows of one run
  // sit together in the output, whatever order threads finish in.
  const auto worker = [&]() {
    for (;;) {
      const long idx = next.fetch_add(1, std::memory_order_relaxed);
      if (idx >= total || failed.load(std::memory_order_relaxed)) return;
      try {
        const int run_id = static_cast<int>(idx / num_policies);
        const auto& pname =
            config.policies[static_cast<std::size_t>(idx % num_policies)];
        const std::uint64_t seed = derive_run_seed(config.base_seed, run_id);
        Env env(config.instance, seed);
        const PolicyOutcome out = run_policy(pname, env, config.delta);
        RunRecord rec;
        rec.policy = pname;
        rec.run_id = run_id;
        rec.seed = seed;
        rec.i_out = out.i_out;
        rec.tau_out = out.tau_out;
        rec.regret = regret(config.instance, out);
        rec.commit_round = out.commit_round;
        rec.commit_reason = out.commit_reason;
        records[static_cast<std::size_t>(idx)] = std::move(rec);
      } catch (...) {
        {
          const std::lock_guard<std::mutex> lock(err_mu);
          if (!first_err) first_err = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_err) std::rethrow_exception(first_err);

  MonteCarloResult result;
  result.records = std::move(records);
  result.stats =
      aggregate(result.records, config.policies, config.regret_bound);
  return result;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr std::string_view kRecordHeader =
    "policy,run_id,seed,i_out,tau_out,regret,commit_round,commit_reason";
constexpr std::string_view kStatsHeader =
    "policy,runs,mean_regret,std_regret,q50,q90,q99,frac_exceed,bound,"
    "mean_tau_out";
constexpr std::string_view kBoundHeader =
    "kind,T,K,rho,U,alpha,delta_gap,C,value,witness,regret_bound";

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string to_csv(const std::vector<RunRecord>& records) {
  std::string out{kRecordHeader};
  out += '\n';
  for (const auto& r : records) {
    out += r.policy;
    out += ',';
    out += std::to_string(r.run_id);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.i_out);
    out += ',';
    out += std::to_string(r.tau_out);
    out += ',';
    out += format_double(r.regret);
    out += ',';
    if (r.commit_round) out += std::to_string(*r.commit_round);
    out += ',';
    out += to_string(r.commit_reason);
    out += '\n';
  }
  return out;
}

std::string to_csv(const AggregateStats& stats) {
  std::string out{kStatsHeader};
  out += '\n';
  for (const auto& s : stats.per_policy) {
    out += s.policy;
    out += ',';
    out += std::to_string(s.runs);
    out += ',';
    out += format_double(s.mean_regret);
    out += ',';
    out += format_double(s.std_regret);
    out += ',';
    out += format_double(s.q50);
    out += ',';
    out += format_double(s.q90);
    out += ',';
    out += format_double(s.q99);
    out += ',';
    out += format_double(s.frac_exceed);
    out += ',';
    out += format_double(s.bound);
    out += ',';
    out += format_double(s.mean_tau_out);
    out += '\n';
  }
  return out;
}

std::string to_csv(const std::vector<BoundReport>& reports) {
  std::string out{kBoundHeader};
  out += '\n';
  for (const auto& b : reports) {
    out += to_string(b.kind);
    out += ',';
    out += std::to_string(b.T);
    out += ',';
    out += std::to_string(b.K);
    out += ',';
    out += format_double(b.rho);
    out += ',';
    out += format_double(b.U);
    out += ',';
    out += format_double(b.alpha);
    out += ',';
    out += format_double(b.delta_gap);
    out += ',';
    out += format_double(b.C);
    out += ',';
    out += std::to_string(b.value);
    out += ',';
    out += to_string(b.witness);
    out += ',';
    out += format_double(b.regret_bound);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<RunRecord>& records,
              const std::string& path) {
  write_file(path, to_csv(records));
}

void emit_csv(const AggregateStats& stats, const std::string& path) {
  write_file(path, to_csv(stats));
}

void emit_csv(const std::vector<BoundReport>& reports,
              const std::string& path) {
  write_file(path, to_csv(reports));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view s, const char* what) {
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument(std::string("csv: bad ") + what + ": " +
                                std::string(s));
  }
  return value;
}

}  // namespace

std::vector<RunRecord> parse_run_records(const std::string& text) {
  std::vector<RunRecord> out;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (!saw_header) {
      if (line != kRecordHeader) {
        throw std::invalid_argument("csv: unexpected header");
      }
      saw_header = true;
      continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 8) {
      throw std::invalid_argument("csv: expected 8 fields per record");
    }
    RunRecord r;
    r.policy = std::string(f[0]);
    r.run_id = parse_number<int>(f[1], "run_id");
    r.seed = parse_number<std::uint64_t>(f[2], "seed");
    r.i_out = parse_number<int>(f[3], "i_out");
    r.tau_out = parse_number<long>(f[4], "tau_out");
    r.regret = parse_number<double>(f[5], "regret");
    if (!f[6].empty()) {
      r.commit_round = parse_number<long>(f[6], "commit_round");
    }
    r.commit_reason = commit_reason_from_string(std::string(f[7]));
    out.push_back(std::move(r));
  }
  if (!saw_header) throw std::invalid_argument("csv: empty input");
  return out;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) {
      throw std::invalid_argument("config: top level must be an object");
    }
    cfg.instance = instance_from_json_text(j.at("instance").dump());
    for (const auto& p : j.at("policies")) {
      cfg.policies.push_back(p.get<std::string>());
    }
    cfg.num_runs = j.at("num_runs").get<int>();
    cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
    cfg.delta_explicit = j.contains("delta");
    cfg.delta = cfg.delta_explicit
                    ? j.at("delta").get<double>()
                    : 1.0 / static_cast<double>(cfg.instance.horizon_T);
    cfg.regret_bound =
        j.contains("regret_bound") ? j.at("regret_bound").get<double>() : kInf;
    cfg.output_dir = j.contains("output_dir")
                         ? j.at("output_dir").get<std::string>()
                         : std::string(".");
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace rested
