#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "precodelab/agents.hpp"
#include "precodelab/baselines.hpp"
#include "precodelab/channel.hpp"
#include "precodelab/codebook.hpp"
#include "precodelab/errors.hpp"
#include "precodelab/link.hpp"

namespace precodelab {

enum class Environment { EnvI, EnvII };
enum class AgentKind { Dqn, Ddpg, BaselineCodebook, BaselineSvdEvd };

struct ExperimentConfig {
  Environment environment = Environment::EnvI;
  AgentKind agent = AgentKind::Dqn;
  ChannelSpec channel;
  SubbandSpec subband;
  LinkConfig link;
  std::string codebook_path;
  std::vector<std::size_t> hidden_dims;
  std::size_t episodes = 100;
  std::size_t steps_per_episode = 1000;
  std::size_t eval_states = 10000;
  std::uint64_t seed = 1;
  double gamma = 0.0;
  double eta = 1e-3;
  double eta_actor = 1e-4;
  double eta_critic = 1e-3;
  double sigma_p = 0.1;
  std::string output_dir = "runs/out";
  std::size_t log_interval = 1000;

  std::size_t total_steps() const { return episodes * steps_per_episode; }
  std::size_t observation_dim() const;
  void validate() const;
};

/// Parse a config JSON file, fill per-environment defaults for absent fields,
/// and apply key=value overrides (dotted paths, values parsed as JSON).
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides = {});

struct TrainResult {
  std::string checkpoint_path;
  std::string log_path;
  double final_epsilon_or_sigma = 0.0;
  double mean_reward_last_episode = 0.0;
};

/// Algorithms 1 / 2: online per-step updates, no replay. Writes
/// checkpoint.json, train_log.csv and run_meta.json under output_dir.
/// Deterministic given (config, seed).
TrainResult train(const ExperimentConfig& cfg);

struct EvalRecord {
  std::size_t state_index = 0;
  double agent_reward = 0.0;
  double agent_ber = 0.0;
  double baseline_reward = 0.0;
  double baseline_ber = 0.0;
  double effective_gain_agent = 0.0;
  double effective_gain_bound = 0.0;
};

struct EvalSummary {
  std::size_t states = 0;
  double mean_reward_agent = 0.0;
  double mean_ber_agent = 0.0;
  double mean_reward_baseline = 0.0;
  double mean_ber_baseline = 0.0;
  double mean_gain_ratio = 0.0;
  double reward_p5 = 0.0, reward_p50 = 0.0, reward_p95 = 0.0;
  std::vector<double> reward_cdf;  // 101 evenly spaced quantiles of agent reward
};

struct EvalResult {
  std::vector<EvalRecord> records;
  EvalSummary summary;
};

/// Greedy evaluation over fresh states; no parameter updates. The paired
/// analytic baseline is evaluated on the same states: the covariance
/// codebook search for discrete policies and the covariance EVD (SVD in
/// Environment I) for continuous ones.
EvalResult evaluate(const ExperimentConfig& cfg, const AgentCheckpoint* checkpoint);

void write_eval_outputs(const EvalResult& result, const ExperimentConfig& cfg,
                        const std::string& out_dir);

struct SweepRow {
  double snr_db = 0.0;
  std::string policy;
  double mean_ber = 0.0;
  double ci95_halfwidth = 0.0;
};

/// BER vs SNR for the configured policy and its paired baseline; channel
/// states are shared across SNR points.
std::vector<SweepRow> sweep_snr(const ExperimentConfig& cfg, const AgentCheckpoint* checkpoint,
                                const std::vector<double>& snr_list);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Entry point behind the precodelab binary. Subcommands: gen-codebook,
/// train, eval, sweep, baseline. Returns 0 on success, 1 on configuration
/// errors, 2 on I/O errors.
int run_cli(int argc, const char* const* argv);

}  // namespace precodelab
