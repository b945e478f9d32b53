#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "precodelab/agents.hpp"

using namespace precodelab;

namespace {

Observation random_obs(std::size_t n, Rng& rng) {
  Observation obs;
  obs.values.resize(n);
  for (double& v : obs.values) v = rng.gaussian();
  return obs;
}

// Single affine layer whose output k is bias[k]; weights zero.
DqnAgent bias_only_dqn(const std::vector<double>& outputs, std::size_t obs_dim) {
  DqnAgent agent;
  agent.q_net.layer_dims = {obs_dim, outputs.size()};
  agent.q_net.weights = {std::vector<double>(outputs.size() * obs_dim, 0.0)};
  agent.q_net.biases = {outputs};
  return agent;
}

}  // namespace

TEST_CASE("epsilon schedule follows the decaying recipe") {
  CHECK(epsilon_schedule(1) == 1.0);
  CHECK(epsilon_schedule(2) == doctest::Approx(0.2).epsilon(1e-12));   // after episode 1
  CHECK(epsilon_schedule(11) == doctest::Approx(0.02).epsilon(1e-12)); // after episode 10
  CHECK_THROWS_AS(epsilon_schedule(0), std::invalid_argument);
}

TEST_CASE("sigma schedule decays linearly to 0.01") {
  CHECK(sigma_p_schedule(0.1, 0, 1000) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(sigma_p_schedule(0.1, 999, 1000) == doctest::Approx(0.01).epsilon(1e-12));
  const double mid = sigma_p_schedule(0.1, 500, 1001);
  CHECK(mid == doctest::Approx(0.055).epsilon(1e-9));
  CHECK(sigma_p_schedule(0.0, 500, 1000) == 0.0);
}

TEST_CASE("dqn_act greedy picks the constructed argmax") {
  std::vector<double> outputs(8);
  for (std::size_t k = 0; k < 8; ++k) outputs[k] = static_cast<double>(k);
  DqnAgent agent = bias_only_dqn(outputs, 4);
  agent.epsilon = 0.0;
  Rng rng(1);
  const Observation obs = random_obs(4, rng);
  CHECK(dqn_act(agent, obs, rng) == 7);
}

TEST_CASE("dqn_act equal maxima tie-break to the lower index") {
  DqnAgent agent = bias_only_dqn({1.0, 3.0, 3.0, 0.0}, 4);
  agent.epsilon = 0.0;
  Rng rng(2);
  CHECK(dqn_act(agent, random_obs(4, rng), rng) == 1);
}

TEST_CASE("dqn_act with epsilon 1 is uniform") {
  DqnAgent agent = bias_only_dqn(std::vector<double>(64, 0.0), 4);
  agent.epsilon = 1.0;
  Rng rng(3);
  const Observation obs = random_obs(4, rng);
  const std::size_t n = 100000;
  std::vector<std::size_t> count(64, 0);
  for (std::size_t i = 0; i < n; ++i) ++count[dqn_act(agent, obs, rng)];
  const double p = 1.0 / 64.0;
  const double band = 3.0 * std::sqrt(p * (1 - p) / n);
  for (std::size_t k = 0; k < 64; ++k)
    CHECK(std::abs(static_cast<double>(count[k]) / n - p) < band);
}

TEST_CASE("epsilon-greedy mixture rate") {
  std::vector<double> outputs(64, 0.0);
  outputs[13] = 5.0;
  DqnAgent agent = bias_only_dqn(outputs, 4);
  Rng rng(4);
  const Observation obs = random_obs(4, rng);
  for (double eps : {0.2, 0.5}) {
    agent.epsilon = eps;
    const std::size_t n = 100000;
    std::size_t greedy = 0;
    for (std::size_t i = 0; i < n; ++i) greedy += (dqn_act(agent, obs, rng) == 13);
    const double expect = (1.0 - eps) + eps / 64.0;
    const double band = 3.0 * std::sqrt(expect * (1.0 - expect) / n);
    CHECK(std::abs(static_cast<double>(greedy) / n - expect) < band);
  }
}

TEST_CASE("dqn argmax is invariant to a constant added to all outputs") {
  Rng init(5);
  DqnAgent agent = make_dqn_agent(8, {16, 8}, 16, DqnVariant::Single, init);
  agent.epsilon = 0.0;
  Rng rng(6);
  const Observation obs = random_obs(8, rng);
  const std::size_t before = dqn_act(agent, obs, rng);
  for (double& b : agent.q_net.biases.back()) b += 3.75;
  CHECK(dqn_act(agent, obs, rng) == before);
}

TEST_CASE("dqn_target: bandit reduction, arithmetic, and degenerate double") {
  DqnAgent agent = bias_only_dqn({1.0, 3.0, 2.0}, 4);
  Rng rng(7);
  const Observation s_next = random_obs(4, rng);

  agent.gamma = 0.0;
  CHECK(dqn_target(agent, 0.5, s_next) == 0.5);

  agent.gamma = 0.9;
  CHECK(dqn_target(agent, 0.5, s_next) == doctest::Approx(3.2).epsilon(1e-12));

  agent.variant = DqnVariant::Double;
  agent.target_net = agent.q_net;
  CHECK(dqn_target(agent, 0.5, s_next) == doctest::Approx(3.2).epsilon(1e-12));
}

TEST_CASE("dqn_update with zero residual leaves parameters unchanged") {
  DqnAgent agent = bias_only_dqn({1.0, 3.0, 2.0}, 4);
  agent.gamma = 0.0;
  agent.eta = 1e-3;
  Rng rng(8);
  Experience e;
  e.s = random_obs(4, rng);
  e.a = std::size_t{1};
  e.r = 3.0;  // equals Q(s, 1) for the bias-only net
  e.s_next = random_obs(4, rng);
  const nn::MlpParams before = agent.q_net;
  const double loss = dqn_update(agent, e);
  CHECK(loss == 0.0);
  CHECK(agent.q_net.weights == before.weights);
  CHECK(agent.q_net.biases == before.biases);
}

TEST_CASE("dqn_update contracts toward the reward on a repeated experience") {
  Rng init(9);
  DqnAgent agent = make_dqn_agent(6, {12, 8}, 5, DqnVariant::Single, init);
  agent.gamma = 0.0;
  agent.eta = 1e-3;
  Rng rng(10);
  Experience e;
  e.s = random_obs(6, rng);
  e.a = std::size_t{2};
  e.r = 0.4;
  e.s_next = random_obs(6, rng);
  double prev_gap = 1e300;
  for (int i = 0; i < 100; ++i) {
    dqn_update(agent, e);
    const double q = nn::forward(agent.q_net, e.s.values)[2];
    const double gap = std::abs(q - e.r);
    CHECK(gap <= prev_gap + 1e-15);
    prev_gap = gap;
  }
}

TEST_CASE("dqn_update touches only the chosen action's output for a single layer") {
  DqnAgent agent = bias_only_dqn({0.1, 0.2, 0.3, 0.4}, 4);
  agent.gamma = 0.0;
  agent.eta = 1e-2;
  Rng rng(11);
  Experience e;
  e.s = random_obs(4, rng);
  e.a = std::size_t{2};
  e.r = 1.0;
  e.s_next = random_obs(4, rng);
  const std::vector<double> before = nn::forward(agent.q_net, e.s.values);
  dqn_update(agent, e);
  const std::vector<double> after = nn::forward(agent.q_net, e.s.values);
  for (std::size_t k = 0; k < 4; ++k) {
    if (k == 2)
      CHECK(after[k] != before[k]);
    else
      CHECK(after[k] == before[k]);
  }
}

TEST_CASE("ddpg_act without noise returns the unit-norm actor output") {
  Rng a(12), c(13);
  DdpgAgent agent = make_ddpg_agent(16, {32, 16}, 4, a, c);
  Rng rng(14);
  const Observation obs = random_obs(16, rng);
  const Precoder w = ddpg_act(agent, obs, rng, false);
  CHECK(w.w.size() == 4);
  CHECK(w.w.norm() == doctest::Approx(1.0).epsilon(1e-9));
  agent.sigma_p = 0.0;
  const Precoder w2 = ddpg_act(agent, obs, rng, true);
  CHECK(w2.w == w.w);
}

TEST_CASE("ddpg_act exploration stays unit norm with sane perturbation size") {
  Rng a(15), c(16);
  DdpgAgent agent = make_ddpg_agent(16, {32, 16}, 4, a, c);
  agent.sigma_p = 0.1;
  Rng rng(17);
  const Observation obs = random_obs(16, rng);
  const Precoder clean = ddpg_act(agent, obs, rng, false);
  double sum_dist = 0.0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    const Precoder noisy = ddpg_act(agent, obs, rng, true);
    CHECK(noisy.w.norm() == doctest::Approx(1.0).epsilon(1e-9));
    sum_dist += chordal_distance(clean.w, noisy.w);
  }
  const double mean_dist = sum_dist / n;
  CHECK(mean_dist > 0.0);
  CHECK(mean_dist < 0.5);
}

TEST_CASE("ddpg critic update: bandit target and convergence to the reward") {
  Rng a(18), c(19);
  DdpgAgent agent = make_ddpg_agent(8, {16, 8}, 4, a, c);
  agent.gamma = 0.0;
  agent.eta_critic = 1e-3;
  Rng rng(20);
  Experience e;
  e.s = random_obs(8, rng);
  e.a = ddpg_act(agent, e.s, rng, false);
  e.r = 0.5;
  e.s_next = random_obs(8, rng);

  const double first_loss = ddpg_critic_update(agent, e);
  CHECK(first_loss > 0.0);
  double q = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ddpg_critic_update(agent, e);
    q = nn::forward(agent.critic,
                    [&] {
                      std::vector<double> x = e.s.values;
                      const std::vector<double> av = pack_action(std::get<Precoder>(e.a).w);
                      x.insert(x.end(), av.begin(), av.end());
                      return x;
                    }())[0];
    if (std::abs(q - e.r) < 1e-3) break;
  }
  CHECK(std::abs(q - e.r) < 1e-3);
}

TEST_CASE("first critic update on a zero-initialized critic decreases the loss") {
  Rng a(21), c(22);
  DdpgAgent agent = make_ddpg_agent(8, {16, 8}, 4, a, c);
  for (auto& w : agent.critic.weights) std::fill(w.begin(), w.end(), 0.0);
  agent.gamma = 0.0;
  agent.eta_critic = 1e-2;
  Rng rng(23);
  Experience e;
  e.s = random_obs(8, rng);
  e.a = ddpg_act(agent, e.s, rng, false);
  e.r = 0.5;
  e.s_next = random_obs(8, rng);
  const double before = ddpg_critic_update(agent, e);  // pre-update loss
  const double after = ddpg_critic_update(agent, e);
  CHECK(after < before);
}

TEST_CASE("ddpg actor update: zero action gradient leaves the actor unchanged") {
  Rng a(24), c(25);
  DdpgAgent agent = make_ddpg_agent(8, {16, 8}, 4, a, c);
  // Critic constant in the action: zero the first-layer columns of the action slice.
  const std::size_t in_dim = agent.critic.layer_dims[0];
  for (std::size_t row = 0; row < agent.critic.layer_dims[1]; ++row)
    for (std::size_t col = 8; col < in_dim; ++col)
      agent.critic.weights[0][row * in_dim + col] = 0.0;
  Rng rng(26);
  const Observation obs = random_obs(8, rng);
  const nn::MlpParams before = agent.actor;
  ddpg_actor_update(agent, obs);
  CHECK(agent.actor.weights == before.weights);
  CHECK(agent.actor.biases == before.biases);
}

TEST_CASE("ddpg actor update ascends the frozen critic's value") {
  int improved = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng a(seed, 1), c(seed, 2);
    DdpgAgent agent = make_ddpg_agent(8, {16, 8}, 4, a, c);
    agent.eta_actor = 1e-4;
    Rng rng(seed, 3);
    const Observation obs = random_obs(8, rng);
    auto value = [&] {
      const std::vector<double> act = nn::forward(agent.actor, obs.values);
      std::vector<double> x = obs.values;
      x.insert(x.end(), act.begin(), act.end());
      return nn::forward(agent.critic, x)[0];
    };
    const double before = value();
    ddpg_actor_update(agent, obs);
    if (value() >= before) ++improved;
  }
  CHECK(improved >= 99);
}

TEST_CASE("critic input gradient matches finite differences on the action slice") {
  Rng a(27), c(28);
  DdpgAgent agent = make_ddpg_agent(8, {16, 8}, 4, a, c);
  Rng rng(29);
  const Observation obs = random_obs(8, rng);
  std::vector<double> act = nn::forward(agent.actor, obs.values);
  std::vector<double> x = obs.values;
  x.insert(x.end(), act.begin(), act.end());
  nn::ForwardCache cache;
  nn::forward(agent.critic, x, cache);
  const std::vector<double> gi = nn::input_gradient(agent.critic, cache, {1.0});
  const double h = 1e-5;
  for (std::size_t k = 8; k < x.size(); ++k) {
    std::vector<double> xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const double fd = (nn::forward(agent.critic, xp)[0] - nn::forward(agent.critic, xm)[0]) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(gi[k]), 1e-6});
    CHECK(std::abs(fd - gi[k]) / denom < 1e-5);
  }
}

TEST_CASE("update isolation between actor and critic") {
  Rng a(30), c(31);
  DdpgAgent agent = make_ddpg_agent(8, {16, 8}, 4, a, c);
  Rng rng(32);
  Experience e;
  e.s = random_obs(8, rng);
  e.a = ddpg_act(agent, e.s, rng, true);
  e.r = 0.25;
  e.s_next = random_obs(8, rng);

  const nn::MlpParams actor_before = agent.actor;
  ddpg_critic_update(agent, e);
  CHECK(agent.actor.weights == actor_before.weights);

  const nn::MlpParams critic_before = agent.critic;
  ddpg_actor_update(agent, e.s);
  CHECK(agent.critic.weights == critic_before.weights);
}

TEST_CASE("greedy_policy matches the definition for both agents") {
  const Codebook cb = generate_grassmannian(4, 8, 51, 500);
  std::vector<double> outputs(8, 0.0);
  outputs[7] = 2.0;
  DqnAgent dqn = bias_only_dqn(outputs, 4);
  dqn.epsilon = 0.3;  // stored epsilon must be ignored
  Rng rng(33);
  const Observation obs = random_obs(4, rng);
  const Precoder w = greedy_policy(dqn, obs, cb);
  CHECK(w.codebook_index == 7);
  DqnAgent eps0 = dqn;
  eps0.epsilon = 0.0;
  CHECK(dqn_act(eps0, obs, rng) == 7);

  Rng a(34), c(35);
  const DdpgAgent ddpg = make_ddpg_agent(8, {16, 8}, 4, a, c);
  const Observation obs2 = random_obs(8, rng);
  const Precoder w1 = greedy_policy(ddpg, obs2);
  const Precoder w2 = greedy_policy(ddpg, obs2);
  CHECK(w1.w == w2.w);
  CHECK(w1.w.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("action packing round trip") {
  Rng rng(36);
  CVec w(4);
  for (std::size_t k = 0; k < 4; ++k) w[k] = rng.complex_gaussian(1.0);
  const std::vector<double> packed = pack_action(w);
  CHECK(packed[0] == w[0].real());
  CHECK(packed[4] == w[0].imag());
  CHECK(unpack_action(packed) == w);
}

TEST_CASE("agent checkpoints round trip") {
  const auto dir = std::filesystem::temp_directory_path();
  {
    Rng init(37);
    DqnAgent agent = make_dqn_agent(8, {12, 6}, 16, DqnVariant::Single, init);
    agent.gamma = 0.0;
    agent.epsilon = 0.004;
    const auto path = dir / "precodelab_dqn_ckpt.json";
    save_agent(agent, "cb.json", path.string());
    const AgentCheckpoint loaded = load_agent(path.string());
    const auto& back = std::get<DqnAgent>(loaded.agent);
    CHECK(back.q_net.weights == agent.q_net.weights);
    CHECK(back.epsilon == agent.epsilon);
    CHECK(loaded.codebook_path == "cb.json");
    std::filesystem::remove(path);
  }
  {
    Rng a(38), c(39);
    DdpgAgent agent = make_ddpg_agent(8, {12, 6}, 4, a, c);
    agent.sigma_p = 0.02;
    const auto path = dir / "precodelab_ddpg_ckpt.json";
    save_agent(agent, path.string());
    const AgentCheckpoint loaded = load_agent(path.string());
    const auto& back = std::get<DdpgAgent>(loaded.agent);
    CHECK(back.actor.weights == agent.actor.weights);
    CHECK(back.critic.weights == agent.critic.weights);
    CHECK(back.sigma_p == agent.sigma_p);
    std::filesystem::remove(path);
  }
}
