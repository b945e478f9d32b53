#include "precodelab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mlp_json.hpp"
#include "precodelab/errors.hpp"

namespace precodelab {

namespace {

std::size_t argmax_index(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

std::vector<double> concat(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

DqnAgent make_dqn_agent(std::size_t obs_dim, const std::vector<std::size_t>& hidden_dims,
                        std::size_t n_actions, DqnVariant variant, Rng& rng) {
  std::vector<std::size_t> dims;
  dims.push_back(obs_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(n_actions);
  DqnAgent agent;
  agent.q_net = nn::init_xavier(dims, nn::OutputActivation::Linear, rng);
  agent.variant = variant;
  if (variant == DqnVariant::Double) agent.target_net = agent.q_net;
  return agent;
}

DdpgAgent make_ddpg_agent(std::size_t obs_dim, const std::vector<std::size_t>& hidden_dims,
                          std::size_t n_tx, Rng& actor_rng, Rng& critic_rng) {
  std::vector<std::size_t> actor_dims{obs_dim};
  actor_dims.insert(actor_dims.end(), hidden_dims.begin(), hidden_dims.end());
  actor_dims.push_back(2 * n_tx);
  std::vector<std::size_t> critic_dims{obs_dim + 2 * n_tx};
  critic_dims.insert(critic_dims.end(), hidden_dims.begin(), hidden_dims.end());
  critic_dims.push_back(1);
  DdpgAgent agent;
  agent.actor = nn::init_xavier(actor_dims, nn::OutputActivation::UnitNormalize, actor_rng);
  agent.critic = nn::init_xavier(critic_dims, nn::OutputActivation::Linear, critic_rng);
  return agent;
}

double epsilon_schedule(std::size_t episode) {
  if (episode == 0) throw std::invalid_argument("epsilon_schedule: episode is 1-based");
  if (episode == 1) return 1.0;
  return 1.0 / (5.0 * static_cast<double>(episode - 1));
}

double sigma_p_schedule(double sigma_start, std::size_t step, std::size_t total_steps) {
  const double sigma_end = std::min(0.01, sigma_start);
  if (total_steps <= 1) return sigma_start;
  const double frac = static_cast<double>(std::min(step, total_steps - 1)) /
                      static_cast<double>(total_steps - 1);
  return sigma_start + (sigma_end - sigma_start) * frac;
}

std::size_t dqn_act(const DqnAgent& agent, const Observation& s, Rng& rng) {
  const double u = rng.uniform();
  if (u < agent.epsilon) return rng.uniform_int(agent.n_actions());
  return argmax_index(nn::forward(agent.q_net, s.values));
}

double dqn_target(const DqnAgent& agent, double r, const Observation& s_next) {
  if (agent.gamma == 0.0) return r;
  const std::vector<double> q_next = nn::forward(agent.q_net, s_next.values);
  if (agent.variant == DqnVariant::Single)
    return r + agent.gamma * q_next[argmax_index(q_next)];
  const std::vector<double> q_eval = nn::forward(*agent.target_net, s_next.values);
  return r + agent.gamma * q_eval[argmax_index(q_next)];
}

double dqn_update(DqnAgent& agent, const Experience& e) {
  const std::size_t action = std::get<std::size_t>(e.a);
  const double y = dqn_target(agent, e.r, e.s_next);
  nn::ForwardCache cache;
  const std::vector<double>& q = nn::forward(agent.q_net, e.s.values, cache);
  const double residual = y - q[action];
  const double loss = 0.5 * residual * residual;
  std::vector<double> upstream(q.size(), 0.0);
  upstream[action] = -residual;  // dL/dQ(s,a)
  nn::train_step(agent.q_net, cache, upstream, agent.eta, nn::StepDirection::Descent);
  ++agent.update_count;
  if (agent.variant == DqnVariant::Double &&
      agent.update_count % agent.target_sync_interval == 0)
    agent.target_net = agent.q_net;
  return loss;
}

CVec unpack_action(const std::vector<double>& reals) {
  const std::size_t n_tx = reals.size() / 2;
  CVec w(n_tx);
  for (std::size_t k = 0; k < n_tx; ++k) w[k] = cplx(reals[k], reals[n_tx + k]);
  return w;
}

std::vector<double> pack_action(const CVec& w) {
  std::vector<double> out(2 * w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    out[k] = w[k].real();
    out[w.size() + k] = w[k].imag();
  }
  return out;
}

Precoder ddpg_act(const DdpgAgent& agent, const Observation& s, Rng& rng, bool explore) {
  const std::vector<double> raw = nn::forward(agent.actor, s.values);
  if (!explore || agent.sigma_p == 0.0) return Precoder::continuous(unpack_action(raw));
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<double> noisy(raw.size());
    for (std::size_t j = 0; j < raw.size(); ++j)
      noisy[j] = raw[j] + agent.sigma_p * rng.gaussian();
    double norm2 = 0.0;
    for (double v : noisy) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    if (norm > 1e-12) {
      for (double& v : noisy) v /= norm;
      return Precoder::continuous(unpack_action(noisy));
    }
  }
  return Precoder::continuous(unpack_action(raw));
}

double ddpg_critic_update(DdpgAgent& agent, const Experience& e) {
  const Precoder& action = std::get<Precoder>(e.a);
  double y = e.r;
  if (agent.gamma != 0.0) {
    const std::vector<double> a_next = nn::forward(agent.actor, e.s_next.values);
    const std::vector<double> q_next =
        nn::forward(agent.critic, concat(e.s_next.values, a_next));
    y += agent.gamma * q_next[0];
  }
  nn::ForwardCache cache;
  const std::vector<double>& q =
      nn::forward(agent.critic, concat(e.s.values, pack_action(action.w)), cache);
  const double residual = y - q[0];
  const double loss = 0.5 * residual * residual;
  nn::train_step(agent.critic, cache, {-residual}, agent.eta_critic,
                 nn::StepDirection::Descent);
  return loss;
}

void ddpg_actor_update(DdpgAgent& agent, const Observation& s) {
  nn::ForwardCache actor_cache;
  const std::vector<double>& a = nn::forward(agent.actor, s.values, actor_cache);
  nn::ForwardCache critic_cache;
  nn::forward(agent.critic, concat(s.values, a), critic_cache);
  const std::vector<double> dq_dinput =
      nn::input_gradient(agent.critic, critic_cache, {1.0});
  const std::vector<double> dq_da(dq_dinput.begin() + static_cast<std::ptrdiff_t>(s.values.size()),
                                  dq_dinput.end());
  nn::train_step(agent.actor, actor_cache, dq_da, agent.eta_actor, nn::StepDirection::Ascent);
}

Precoder greedy_policy(const DqnAgent& agent, const Observation& s, const Codebook& cb) {
  const std::size_t index = argmax_index(nn::forward(agent.q_net, s.values));
  return cb.word(index);
}

Precoder greedy_policy(const DdpgAgent& agent, const Observation& s) {
  return Precoder::continuous(unpack_action(nn::forward(agent.actor, s.values)));
}

void save_agent(const DqnAgent& agent, const std::string& codebook_path,
                const std::string& path) {
  nlohmann::json j;
  j["kind"] = "dqn";
  j["gamma"] = agent.gamma;
  j["epsilon"] = agent.epsilon;
  j["eta"] = agent.eta;
  j["codebook_path"] = codebook_path;
  j["variant"] = agent.variant == DqnVariant::Single ? "single" : "double";
  j["q_net"] = nn::mlp_to_json(agent.q_net);
  if (agent.target_net) j["target_net"] = nn::mlp_to_json(*agent.target_net);
  std::ofstream out(path);
  if (!out) throw IoError("save_agent: cannot open " + path);
  out << j.dump() << "\n";
  if (!out) throw IoError("save_agent: write failed for " + path);
}

void save_agent(const DdpgAgent& agent, const std::string& path) {
  nlohmann::json j;
  j["kind"] = "ddpg";
  j["gamma"] = agent.gamma;
  j["sigma_p"] = agent.sigma_p;
  j["eta_actor"] = agent.eta_actor;
  j["eta_critic"] = agent.eta_critic;
  j["n_tx"] = agent.n_tx();
  j["actor"] = nn::mlp_to_json(agent.actor);
  j["critic"] = nn::mlp_to_json(agent.critic);
  std::ofstream out(path);
  if (!out) throw IoError("save_agent: cannot open " + path);
  out << j.dump() << "\n";
  if (!out) throw IoError("save_agent: write failed for " + path);
}

AgentCheckpoint load_agent(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_agent: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_agent: malformed JSON in " + path + ": " + e.what());
  }
  AgentCheckpoint out;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dqn") {
      DqnAgent agent;
      agent.gamma = j.at("gamma").get<double>();
      agent.epsilon = j.at("epsilon").get<double>();
      agent.eta = j.at("eta").get<double>();
      agent.variant =
          j.at("variant").get<std::string>() == "double" ? DqnVariant::Double : DqnVariant::Single;
      agent.q_net = nn::mlp_from_json(j.at("q_net"));
      if (j.contains("target_net")) agent.target_net = nn::mlp_from_json(j.at("target_net"));
      out.codebook_path = j.at("codebook_path").get<std::string>();
      out.agent = std::move(agent);
    } else if (kind == "ddpg") {
      DdpgAgent agent;
      agent.gamma = j.at("gamma").get<double>();
      agent.sigma_p = j.at("sigma_p").get<double>();
      agent.eta_actor = j.at("eta_actor").get<double>();
      agent.eta_critic = j.at("eta_critic").get<double>();
      agent.actor = nn::mlp_from_json(j.at("actor"));
      agent.critic = nn::mlp_from_json(j.at("critic"));
      out.agent = std::move(agent);
    } else {
      throw IoError("load_agent: unknown agent kind " + kind);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_agent: malformed checkpoint " + path + ": " + e.what());
  }
  return out;
}

}  // namespace precodelab
