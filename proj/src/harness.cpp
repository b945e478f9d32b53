#include "precodelab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace precodelab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fixed stream ids; evaluation fans out one stream triple per state so the
// results do not depend on visit order.
constexpr std::uint64_t kStreamAgentInit = 0;
constexpr std::uint64_t kStreamCriticInit = 1;
constexpr std::uint64_t kStreamTrainChannel = 10;
constexpr std::uint64_t kStreamTrainNoise = 11;
constexpr std::uint64_t kStreamExplore = 12;
constexpr std::uint64_t kEvalChannelBase = 1ULL << 32;
constexpr std::uint64_t kEvalAgentNoiseBase = 2ULL << 32;
constexpr std::uint64_t kEvalBaselineNoiseBase = 3ULL << 32;
constexpr std::uint64_t kSweepNoiseBase = 10ULL;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_run_meta(const std::string& dir, const std::string& command,
                    const ExperimentConfig& cfg) {
  json meta;
  meta["created_utc"] = utc_now();
  meta["command"] = command;
  meta["seed"] = cfg.seed;
  meta["environment"] = cfg.environment == Environment::EnvI ? "EnvI" : "EnvII";
  std::ofstream out(fs::path(dir) / "run_meta.json");
  if (out) out << meta.dump(2) << "\n";
}

ChannelState sample_state(const ExperimentConfig& cfg, Rng& rng) {
  if (cfg.channel.model == ChannelModel::Flat) return sample_flat(cfg.channel, rng);
  return sample_tdl2(cfg.channel, cfg.subband, rng);
}

std::string agent_policy_name(const ExperimentConfig& cfg) {
  switch (cfg.agent) {
    case AgentKind::Dqn:
      return "dqn";
    case AgentKind::Ddpg:
      return "ddpg";
    case AgentKind::BaselineCodebook:
      return "baseline_codebook";
    case AgentKind::BaselineSvdEvd:
      return cfg.environment == Environment::EnvI ? "baseline_svd" : "baseline_evd";
  }
  return "unknown";
}

std::string paired_baseline_name(const ExperimentConfig& cfg) {
  if (cfg.agent == AgentKind::Dqn || cfg.agent == AgentKind::BaselineCodebook)
    return "baseline_codebook";
  return cfg.environment == Environment::EnvI ? "baseline_svd" : "baseline_evd";
}

double quadratic_form(const CMat& a, const CVec& w) {
  return std::abs(inner(w, mat_vec(a, w)));
}

Environment parse_environment(const std::string& s) {
  if (s == "EnvI") return Environment::EnvI;
  if (s == "EnvII") return Environment::EnvII;
  throw ConfigError("unknown environment: " + s);
}

AgentKind parse_agent(const std::string& s) {
  if (s == "Dqn") return AgentKind::Dqn;
  if (s == "Ddpg") return AgentKind::Ddpg;
  if (s == "BaselineCodebook") return AgentKind::BaselineCodebook;
  if (s == "BaselineSvdEvd") return AgentKind::BaselineSvdEvd;
  throw ConfigError("unknown agent: " + s);
}

void apply_environment_defaults(json& j) {
  const std::string env = j.value("environment", "EnvI");
  json channel, subband, link;
  if (env == "EnvII") {
    channel = {{"n_tx", 4},
               {"n_rx", 2},
               {"model", "Tdl2"},
               {"subcarrier_spacing", 30e3},
               {"tap_delays", {0.0, 400e-9}},
               {"tap_powers_db", {0.0, 0.0}}};
    subband = {{"n_prb", 8},
               {"subcarriers_per_prb", 12},
               {"symbols_per_tti", 14},
               {"pilot_symbol_count", 1},
               {"pilot_subcarrier_indices", {0, 47, 95}},
               {"data_re_budget", 2048}};
    link = {{"snr_db", 10.0}, {"modulation", 4}, {"llr_mode", "ExactLogSum"}, {"noiseless", false}};
    if (!j.contains("hidden_dims")) j["hidden_dims"] = {3840, 512, 128};
  } else {
    channel = {{"n_tx", 4},
               {"n_rx", 2},
               {"model", "Flat"},
               {"subcarrier_spacing", 30e3},
               {"tap_delays", {0.0, 400e-9}},
               {"tap_powers_db", {0.0, 0.0}}};
    subband = {{"n_prb", 80},
               {"subcarriers_per_prb", 12},
               {"symbols_per_tti", 14},
               {"pilot_symbol_count", 1},
               {"pilot_subcarrier_indices", {0}},
               {"data_re_budget", 2048}};
    link = {{"snr_db", 10.0}, {"modulation", 16}, {"llr_mode", "ExactLogSum"}, {"noiseless", false}};
    if (!j.contains("hidden_dims")) j["hidden_dims"] = {512, 128};
  }
  for (auto& [key, value] : channel.items())
    if (!j.contains("channel") || !j["channel"].contains(key)) j["channel"][key] = value;
  for (auto& [key, value] : subband.items())
    if (!j.contains("subband") || !j["subband"].contains(key)) j["subband"][key] = value;
  for (auto& [key, value] : link.items())
    if (!j.contains("link") || !j["link"].contains(key)) j["link"][key] = value;
}

void apply_override(json& j, const std::string& kv) {
  const std::size_t eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be key=value: " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError("bad override key: " + kv);
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig config_from_json(json j, const fs::path& base_dir) {
  apply_environment_defaults(j);
  ExperimentConfig cfg;
  try {
    cfg.environment = parse_environment(j.value("environment", "EnvI"));
    cfg.agent = parse_agent(j.value("agent", "Dqn"));
    const json& ch = j.at("channel");
    cfg.channel.n_tx = ch.at("n_tx").get<std::size_t>();
    cfg.channel.n_rx = ch.at("n_rx").get<std::size_t>();
    const std::string model = ch.at("model").get<std::string>();
    if (model == "Flat")
      cfg.channel.model = ChannelModel::Flat;
    else if (model == "Tdl2")
      cfg.channel.model = ChannelModel::Tdl2;
    else
      throw ConfigError("unknown channel model: " + model);
    cfg.channel.subcarrier_spacing = ch.at("subcarrier_spacing").get<double>();
    cfg.channel.tap_delays = ch.at("tap_delays").get<std::vector<double>>();
    cfg.channel.tap_powers_db = ch.at("tap_powers_db").get<std::vector<double>>();

    const json& sb = j.at("subband");
    cfg.subband.n_prb = sb.at("n_prb").get<std::size_t>();
    cfg.subband.subcarriers_per_prb = sb.at("subcarriers_per_prb").get<std::size_t>();
    cfg.subband.symbols_per_tti = sb.at("symbols_per_tti").get<std::size_t>();
    cfg.subband.pilot_symbol_count = sb.at("pilot_symbol_count").get<std::size_t>();
    cfg.subband.pilot_subcarrier_indices =
        sb.at("pilot_subcarrier_indices").get<std::vector<std::size_t>>();
    cfg.subband.data_re_budget = sb.at("data_re_budget").get<std::size_t>();

    const json& lk = j.at("link");
    cfg.link.snr_db = lk.at("snr_db").get<double>();
    cfg.link.modulation = ModulationScheme::qam(lk.at("modulation").get<std::size_t>());
    const std::string mode = lk.at("llr_mode").get<std::string>();
    if (mode == "ExactLogSum")
      cfg.link.llr_mode = LlrMode::ExactLogSum;
    else if (mode == "MaxLog")
      cfg.link.llr_mode = LlrMode::MaxLog;
    else
      throw ConfigError("unknown llr_mode: " + mode);
    cfg.link.noiseless = lk.at("noiseless").get<bool>();

    cfg.codebook_path = j.value("codebook_path", "");
    cfg.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
    cfg.episodes = j.value("episodes", cfg.episodes);
    cfg.steps_per_episode = j.value("steps_per_episode", cfg.steps_per_episode);
    cfg.eval_states = j.value("eval_states", cfg.eval_states);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.eta = j.value("eta", cfg.eta);
    cfg.eta_actor = j.value("eta_actor", cfg.eta_actor);
    cfg.eta_critic = j.value("eta_critic", cfg.eta_critic);
    cfg.sigma_p = j.value("sigma_p", cfg.sigma_p);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.log_interval = j.value("log_interval", cfg.log_interval);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  if (!cfg.codebook_path.empty() && !base_dir.empty()) {
    fs::path p(cfg.codebook_path);
    if (p.is_relative()) cfg.codebook_path = (base_dir / p).string();
  }
  cfg.validate();
  return cfg;
}

struct Policy {
  // Greedy precoder choice plus, for discrete policies, the codebook.
  std::optional<DqnAgent> dqn;
  std::optional<DdpgAgent> ddpg;
  std::optional<Codebook> cb;
  AgentKind kind = AgentKind::BaselineSvdEvd;
};

Policy make_eval_policy(const ExperimentConfig& cfg, const AgentCheckpoint* checkpoint) {
  Policy p;
  p.kind = cfg.agent;
  switch (cfg.agent) {
    case AgentKind::Dqn: {
      if (checkpoint == nullptr) throw ConfigError("evaluating a DQN requires a checkpoint");
      const auto* agent = std::get_if<DqnAgent>(&checkpoint->agent);
      if (agent == nullptr) throw ConfigError("checkpoint does not contain a DQN agent");
      p.dqn = *agent;
      const std::string cb_path =
          checkpoint->codebook_path.empty() ? cfg.codebook_path : checkpoint->codebook_path;
      p.cb = load_codebook(cb_path);
      if (p.cb->size() != p.dqn->n_actions())
        throw ConfigError("codebook size does not match the DQN output width");
      break;
    }
    case AgentKind::Ddpg: {
      if (checkpoint == nullptr) throw ConfigError("evaluating a DDPG requires a checkpoint");
      const auto* agent = std::get_if<DdpgAgent>(&checkpoint->agent);
      if (agent == nullptr) throw ConfigError("checkpoint does not contain a DDPG agent");
      p.ddpg = *agent;
      break;
    }
    case AgentKind::BaselineCodebook:
      if (cfg.codebook_path.empty())
        throw ConfigError("baseline codebook evaluation requires codebook_path");
      p.cb = load_codebook(cfg.codebook_path);
      break;
    case AgentKind::BaselineSvdEvd:
      break;
  }
  // Discrete baselines are paired against DQN runs too.
  if (cfg.agent == AgentKind::Dqn && !p.cb) p.cb = load_codebook(cfg.codebook_path);
  return p;
}

struct StateDecision {
  Precoder agent_w;
  Precoder baseline_w;
  double gain_agent = 0.0;
  double gain_bound = 0.0;
  bool baseline_same_as_agent = false;
};

StateDecision decide(const Policy& policy, const ExperimentConfig& cfg,
                     const ChannelState& state, const Observation& obs) {
  StateDecision d;
  const CovarianceMatrix cov = covariance(state.pilot_channels);
  switch (policy.kind) {
    case AgentKind::Dqn: {
      d.agent_w = greedy_policy(*policy.dqn, obs, *policy.cb);
      auto [index, opt] = exhaustive_search(cov.r, *policy.cb);
      d.baseline_w = opt;
      d.gain_bound = quadratic_form(cov.r, opt.w);
      break;
    }
    case AgentKind::Ddpg: {
      d.agent_w = greedy_policy(*policy.ddpg, obs);
      d.baseline_w = evd_precoder(cov);
      d.gain_bound = hermitian_evd(cov.r).eigenvalues.front();
      break;
    }
    case AgentKind::BaselineCodebook: {
      auto [index, opt] = exhaustive_search(cov.r, *policy.cb);
      d.agent_w = opt;
      d.baseline_w = opt;
      d.gain_bound = quadratic_form(cov.r, opt.w);
      d.baseline_same_as_agent = true;
      break;
    }
    case AgentKind::BaselineSvdEvd: {
      d.agent_w = evd_precoder(cov);
      d.baseline_w = d.agent_w;
      d.gain_bound = hermitian_evd(cov.r).eigenvalues.front();
      d.baseline_same_as_agent = true;
      break;
    }
  }
  d.gain_agent = quadratic_form(cov.r, d.agent_w.w);
  return d;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

std::size_t ExperimentConfig::observation_dim() const {
  return subband.pilot_subcarrier_indices.size() * 2 * channel.n_tx * channel.n_rx;
}

void ExperimentConfig::validate() const {
  channel.validate();
  subband.validate();
  if (environment == Environment::EnvI) {
    if (channel.model != ChannelModel::Flat)
      throw ConfigError("Environment I uses the flat channel model");
    if (subband.pilot_subcarrier_indices.size() != 1)
      throw ConfigError("Environment I uses a single pilot RE");
  } else if (channel.model != ChannelModel::Tdl2) {
    throw ConfigError("Environment II uses the Tdl2 channel model");
  }
  if (episodes == 0 || steps_per_episode == 0) throw ConfigError("episode counts must be >= 1");
  if (eval_states == 0) throw ConfigError("eval_states must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
  if (eta <= 0.0 || eta_actor <= 0.0 || eta_critic <= 0.0)
    throw ConfigError("learning rates must be positive");
  if (sigma_p < 0.0) throw ConfigError("sigma_p must be nonnegative");
  if (hidden_dims.empty()) throw ConfigError("hidden_dims must not be empty");
  if (log_interval == 0) throw ConfigError("log_interval must be >= 1");
  if ((agent == AgentKind::Dqn || agent == AgentKind::BaselineCodebook) && codebook_path.empty())
    throw ConfigError("codebook_path is required for codebook-based policies");
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config JSON " + path + ": " + e.what());
  }
  for (const std::string& kv : overrides) apply_override(j, kv);
  return config_from_json(std::move(j), fs::path(path).parent_path());
}

ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  for (const std::string& kv : overrides) apply_override(j, kv);
  return config_from_json(std::move(j), fs::path());
}

TrainResult train(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.agent != AgentKind::Dqn && cfg.agent != AgentKind::Ddpg)
    throw ConfigError("train: baseline policies are not trainable");

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output dir " + cfg.output_dir);

  const std::size_t obs_dim = cfg.observation_dim();
  std::optional<Codebook> cb;
  std::optional<DqnAgent> dqn;
  std::optional<DdpgAgent> ddpg;
  if (cfg.agent == AgentKind::Dqn) {
    cb = load_codebook(cfg.codebook_path);
    Rng init_rng(cfg.seed, kStreamAgentInit);
    dqn = make_dqn_agent(obs_dim, cfg.hidden_dims, cb->size(), DqnVariant::Single, init_rng);
    dqn->gamma = cfg.gamma;
    dqn->eta = cfg.eta;
  } else {
    Rng actor_rng(cfg.seed, kStreamAgentInit);
    Rng critic_rng(cfg.seed, kStreamCriticInit);
    ddpg = make_ddpg_agent(obs_dim, cfg.hidden_dims, cfg.channel.n_tx, actor_rng, critic_rng);
    ddpg->gamma = cfg.gamma;
    ddpg->eta_actor = cfg.eta_actor;
    ddpg->eta_critic = cfg.eta_critic;
  }

  Rng rng_channel(cfg.seed, kStreamTrainChannel);
  Rng rng_noise(cfg.seed, kStreamTrainNoise);
  Rng rng_explore(cfg.seed, kStreamExplore);

  const fs::path log_path = fs::path(cfg.output_dir) / "train_log.csv";
  std::ofstream log(log_path);
  if (!log) throw IoError("cannot open " + log_path.string());
  log << "step,epsilon_or_sigma_p,reward,loss\n";

  const std::size_t total = cfg.total_steps();
  double exploration = 0.0;
  double reward_sum_last_episode = 0.0;
  for (std::size_t ep = 1; ep <= cfg.episodes; ++ep) {
    if (dqn) dqn->epsilon = epsilon_schedule(ep);
    if (ep == cfg.episodes) reward_sum_last_episode = 0.0;
    ChannelState state = sample_state(cfg, rng_channel);
    Observation obs = observe(state);
    for (std::size_t t = 0; t < cfg.steps_per_episode; ++t) {
      const std::size_t gstep = (ep - 1) * cfg.steps_per_episode + t;
      Experience e;
      e.s = obs;
      Precoder w;
      if (dqn) {
        exploration = dqn->epsilon;
        const std::size_t a = dqn_act(*dqn, obs, rng_explore);
        w = cb->word(a);
        e.a = a;
      } else {
        ddpg->sigma_p = sigma_p_schedule(cfg.sigma_p, gstep, total);
        exploration = ddpg->sigma_p;
        w = ddpg_act(*ddpg, obs, rng_explore, true);
        e.a = w;
      }
      const Reward reward = measure_ber(state, w, cfg.link, cfg.subband, rng_noise);
      e.r = reward.value;
      ChannelState next_state = sample_state(cfg, rng_channel);
      Observation next_obs = observe(next_state);
      e.s_next = next_obs;

      double loss = 0.0;
      if (dqn) {
        loss = dqn_update(*dqn, e);
      } else {
        loss = ddpg_critic_update(*ddpg, e);
        ddpg_actor_update(*ddpg, e.s);
      }
      if (ep == cfg.episodes) reward_sum_last_episode += reward.value;
      if ((gstep + 1) % cfg.log_interval == 0)
        log << (gstep + 1) << ',' << fmt_double(exploration) << ',' << fmt_double(reward.value)
            << ',' << fmt_double(loss) << '\n';
      state = std::move(next_state);
      obs = std::move(next_obs);
    }
  }
  log.close();

  const fs::path ckpt_path = fs::path(cfg.output_dir) / "checkpoint.json";
  if (dqn)
    save_agent(*dqn, cfg.codebook_path, ckpt_path.string());
  else
    save_agent(*ddpg, ckpt_path.string());
  write_run_meta(cfg.output_dir, "train", cfg);

  TrainResult result;
  result.checkpoint_path = ckpt_path.string();
  result.log_path = log_path.string();
  result.final_epsilon_or_sigma = exploration;
  result.mean_reward_last_episode =
      reward_sum_last_episode / static_cast<double>(cfg.steps_per_episode);
  return result;
}

EvalResult evaluate(const ExperimentConfig& cfg, const AgentCheckpoint* checkpoint) {
  cfg.validate();
  const Policy policy = make_eval_policy(cfg, checkpoint);

  EvalResult result;
  result.records.reserve(cfg.eval_states);
  double sum_ra = 0.0, sum_ba = 0.0, sum_rb = 0.0, sum_bb = 0.0, sum_ratio = 0.0;
  for (std::size_t i = 0; i < cfg.eval_states; ++i) {
    Rng rng_channel(cfg.seed, kEvalChannelBase + i);
    const ChannelState state = sample_state(cfg, rng_channel);
    const Observation obs = observe(state);
    const StateDecision d = decide(policy, cfg, state, obs);

    Rng rng_agent_noise(cfg.seed, kEvalAgentNoiseBase + i);
    const Reward agent_reward = measure_ber(state, d.agent_w, cfg.link, cfg.subband, rng_agent_noise);
    Reward baseline_reward = agent_reward;
    if (!d.baseline_same_as_agent) {
      Rng rng_base_noise(cfg.seed, kEvalBaselineNoiseBase + i);
      baseline_reward = measure_ber(state, d.baseline_w, cfg.link, cfg.subband, rng_base_noise);
    }

    EvalRecord rec;
    rec.state_index = i;
    rec.agent_reward = agent_reward.value;
    rec.agent_ber = agent_reward.ber;
    rec.baseline_reward = baseline_reward.value;
    rec.baseline_ber = baseline_reward.ber;
    rec.effective_gain_agent = d.gain_agent;
    rec.effective_gain_bound = d.gain_bound;
    result.records.push_back(rec);

    sum_ra += rec.agent_reward;
    sum_ba += rec.agent_ber;
    sum_rb += rec.baseline_reward;
    sum_bb += rec.baseline_ber;
    sum_ratio += d.gain_bound > 0.0 ? d.gain_agent / d.gain_bound : 1.0;
  }

  const double n = static_cast<double>(cfg.eval_states);
  result.summary.states = cfg.eval_states;
  result.summary.mean_reward_agent = sum_ra / n;
  result.summary.mean_ber_agent = sum_ba / n;
  result.summary.mean_reward_baseline = sum_rb / n;
  result.summary.mean_ber_baseline = sum_bb / n;
  result.summary.mean_gain_ratio = sum_ratio / n;

  std::vector<double> rewards;
  rewards.reserve(result.records.size());
  for (const EvalRecord& rec : result.records) rewards.push_back(rec.agent_reward);
  std::sort(rewards.begin(), rewards.end());
  result.summary.reward_p5 = quantile(rewards, 0.05);
  result.summary.reward_p50 = quantile(rewards, 0.50);
  result.summary.reward_p95 = quantile(rewards, 0.95);
  result.summary.reward_cdf.resize(101);
  for (std::size_t k = 0; k <= 100; ++k)
    result.summary.reward_cdf[k] = quantile(rewards, static_cast<double>(k) / 100.0);
  return result;
}

void write_eval_outputs(const EvalResult& result, const ExperimentConfig& cfg,
                        const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output dir " + out_dir);
  const fs::path csv_path = fs::path(out_dir) / "eval.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot open " + csv_path.string());
  csv << "state_index,agent_reward,agent_ber,baseline_reward,baseline_ber,"
         "effective_gain_agent,effective_gain_bound\n";
  for (const EvalRecord& rec : result.records)
    csv << rec.state_index << ',' << fmt_double(rec.agent_reward) << ','
        << fmt_double(rec.agent_ber) << ',' << fmt_double(rec.baseline_reward) << ','
        << fmt_double(rec.baseline_ber) << ',' << fmt_double(rec.effective_gain_agent) << ','
        << fmt_double(rec.effective_gain_bound) << '\n';
  csv.close();

  json summary;
  summary["states"] = result.summary.states;
  summary["policy"] = agent_policy_name(cfg);
  summary["baseline"] = paired_baseline_name(cfg);
  summary["mean_reward_agent"] = result.summary.mean_reward_agent;
  summary["mean_ber_agent"] = result.summary.mean_ber_agent;
  summary["mean_reward_baseline"] = result.summary.mean_reward_baseline;
  summary["mean_ber_baseline"] = result.summary.mean_ber_baseline;
  summary["mean_gain_ratio"] = result.summary.mean_gain_ratio;
  summary["reward_p5"] = result.summary.reward_p5;
  summary["reward_p50"] = result.summary.reward_p50;
  summary["reward_p95"] = result.summary.reward_p95;
  summary["reward_cdf"] = result.summary.reward_cdf;
  const fs::path summary_path = fs::path(out_dir) / "summary.json";
  std::ofstream js(summary_path);
  if (!js) throw IoError("cannot open " + summary_path.string());
  js << summary.dump(2) << "\n";
  write_run_meta(out_dir, "eval", cfg);
}

std::vector<SweepRow> sweep_snr(const ExperimentConfig& cfg, const AgentCheckpoint* checkpoint,
                                const std::vector<double>& snr_list) {
  cfg.validate();
  if (snr_list.empty()) throw ConfigError("sweep: empty SNR list");
  const Policy policy = make_eval_policy(cfg, checkpoint);
  const bool paired = cfg.agent == AgentKind::Dqn || cfg.agent == AgentKind::Ddpg;

  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
  };
  std::vector<Acc> agent_acc(snr_list.size()), base_acc(snr_list.size());

  for (std::size_t i = 0; i < cfg.eval_states; ++i) {
    Rng rng_channel(cfg.seed, kEvalChannelBase + i);
    const ChannelState state = sample_state(cfg, rng_channel);
    const Observation obs = observe(state);
    const StateDecision d = decide(policy, cfg, state, obs);
    for (std::size_t si = 0; si < snr_list.size(); ++si) {
      LinkConfig link = cfg.link;
      link.snr_db = snr_list[si];
      Rng rng_a(cfg.seed, ((kSweepNoiseBase + 2 * si) << 32) + i);
      const Reward ra = measure_ber(state, d.agent_w, link, cfg.subband, rng_a);
      agent_acc[si].sum += ra.ber;
      agent_acc[si].sum_sq += ra.ber * ra.ber;
      if (paired) {
        Rng rng_b(cfg.seed, ((kSweepNoiseBase + 2 * si + 1) << 32) + i);
        const Reward rb = measure_ber(state, d.baseline_w, link, cfg.subband, rng_b);
        base_acc[si].sum += rb.ber;
        base_acc[si].sum_sq += rb.ber * rb.ber;
      }
    }
  }

  const double n = static_cast<double>(cfg.eval_states);
  auto to_row = [&](double snr, const std::string& name, const Acc& acc) {
    SweepRow row;
    row.snr_db = snr;
    row.policy = name;
    row.mean_ber = acc.sum / n;
    const double var = std::max(0.0, acc.sum_sq / n - row.mean_ber * row.mean_ber);
    row.ci95_halfwidth = n > 1 ? 1.96 * std::sqrt(var / (n - 1)) : 0.0;
    return row;
  };

  std::vector<SweepRow> rows;
  for (std::size_t si = 0; si < snr_list.size(); ++si) {
    rows.push_back(to_row(snr_list[si], agent_policy_name(cfg), agent_acc[si]));
    if (paired) rows.push_back(to_row(snr_list[si], paired_baseline_name(cfg), base_acc[si]));
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "snr_db,policy,mean_ber,ci95_halfwidth\n";
  for (const SweepRow& row : rows)
    out << fmt_double(row.snr_db) << ',' << row.policy << ',' << fmt_double(row.mean_ber) << ','
        << fmt_double(row.ci95_halfwidth) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace precodelab
