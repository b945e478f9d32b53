#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "precodelab/codebook.hpp"
#include "precodelab/link.hpp"
#include "precodelab/neuralnet.hpp"

namespace precodelab {

/// One learning transition [s, a, r, s_next]. The action is a codebook index
/// for DQN and a precoder for DDPG.
struct Experience {
  Observation s;
  std::variant<std::size_t, Precoder> a;
  double r = 0.0;
  Observation s_next;
};

enum class DqnVariant { Single, Double };

struct DqnAgent {
  nn::MlpParams q_net;                       // input d_s, one output per codeword
  double epsilon = 1.0;
  double gamma = 0.0;
  double eta = 1e-3;
  DqnVariant variant = DqnVariant::Single;
  std::optional<nn::MlpParams> target_net;   // Double variant only
  std::size_t target_sync_interval = 1000;
  std::size_t update_count = 0;

  std::size_t n_actions() const { return q_net.output_dim(); }
};

struct DdpgAgent {
  nn::MlpParams actor;   // input d_s, output 2 n_tx, UnitNormalize
  nn::MlpParams critic;  // input d_s + 2 n_tx, output 1, Linear
  double sigma_p = 0.1;
  double gamma = 0.0;
  double eta_actor = 1e-4;
  double eta_critic = 1e-3;

  std::size_t n_tx() const { return actor.output_dim() / 2; }
};

DqnAgent make_dqn_agent(std::size_t obs_dim, const std::vector<std::size_t>& hidden_dims,
                        std::size_t n_actions, DqnVariant variant, Rng& rng);
DdpgAgent make_ddpg_agent(std::size_t obs_dim, const std::vector<std::size_t>& hidden_dims,
                          std::size_t n_tx, Rng& actor_rng, Rng& critic_rng);

/// Exploration rate in effect during the given 1-based episode: 1 for the
/// first episode, then 1/(5 * completed_episodes) afterwards.
double epsilon_schedule(std::size_t episode);

/// Exploration noise std at a 0-based step of a run: linear decay from
/// sigma_start down to min(0.01, sigma_start) over total_steps.
double sigma_p_schedule(double sigma_start, std::size_t step, std::size_t total_steps);

/// Epsilon-greedy over the q_net outputs; greedy ties go to the lowest index.
std::size_t dqn_act(const DqnAgent& agent, const Observation& s, Rng& rng);

/// Target value Y. Single: r + gamma max_a Q(s_next, a). Double:
/// r + gamma Q_target(s_next, argmax_a Q(s_next, a)).
double dqn_target(const DqnAgent& agent, double r, const Observation& s_next);

/// One TD regression step on L = 0.5 (Y - Q(s, a))^2; Y is held constant.
/// Returns the pre-update loss.
double dqn_update(DqnAgent& agent, const Experience& e);

/// Actor output, optionally perturbed by component-wise N(0, sigma_p^2) noise
/// and renormalized; packed as a complex precoder (first n_tx reals are real
/// parts, last n_tx are imaginary parts).
Precoder ddpg_act(const DdpgAgent& agent, const Observation& s, Rng& rng, bool explore);

/// Critic regression on Y = r + gamma Q(s_next, mu(s_next)); returns the
/// pre-update loss. Actor parameters are not touched.
double ddpg_critic_update(DdpgAgent& agent, const Experience& e);

/// Deterministic policy-gradient ascent: backpropagates grad_a Q(s, a) at
/// a = mu(s) through the actor. Critic parameters are not touched.
void ddpg_actor_update(DdpgAgent& agent, const Observation& s);

Precoder greedy_policy(const DqnAgent& agent, const Observation& s, const Codebook& cb);
Precoder greedy_policy(const DdpgAgent& agent, const Observation& s);

/// Packing between the actor's real output and the complex action.
CVec unpack_action(const std::vector<double>& reals);
std::vector<double> pack_action(const CVec& w);

struct AgentCheckpoint {
  std::variant<DqnAgent, DdpgAgent> agent;
  std::string codebook_path;  // DQN only
};

void save_agent(const DqnAgent& agent, const std::string& codebook_path, const std::string& path);
void save_agent(const DdpgAgent& agent, const std::string& path);
AgentCheckpoint load_agent(const std::string& path);

}  // namespace precodelab
