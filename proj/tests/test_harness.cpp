#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "precodelab/harness.hpp"

using namespace precodelab;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string small_codebook(const fs::path& dir) {
  const fs::path path = dir / "cb8.json";
  save_codebook(generate_grassmannian(4, 8, 7, 500), path.string());
  return path.string();
}

std::string tiny_dqn_config(const std::string& cb_path, const std::string& out_dir,
                            std::uint64_t seed = 3) {
  std::ostringstream ss;
  ss << R"({"environment":"EnvI","agent":"Dqn","codebook_path":")" << cb_path
     << R"(","hidden_dims":[16,8],"episodes":1,"steps_per_episode":10,"eval_states":16,)"
     << R"("subband":{"data_re_budget":64},"seed":)" << seed << R"(,"output_dir":")" << out_dir
     << R"("})";
  return ss.str();
}

}  // namespace

TEST_CASE("environment defaults are filled for absent fields") {
  const ExperimentConfig env1 =
      config_from_json_text(R"({"environment":"EnvI","codebook_path":"cb.json"})");
  CHECK(env1.channel.n_tx == 4);
  CHECK(env1.channel.n_rx == 2);
  CHECK(env1.channel.model == ChannelModel::Flat);
  CHECK(env1.subband.n_prb == 80);
  CHECK(env1.subband.n_subcarriers() == 960);
  CHECK(env1.channel.subcarrier_spacing == 30e3);
  CHECK(env1.link.modulation.m_ary == 16);
  CHECK(env1.hidden_dims == std::vector<std::size_t>{512, 128});
  CHECK(env1.subband.pilot_subcarrier_indices.size() == 1);
  CHECK(env1.eval_states == 10000);
  CHECK(env1.observation_dim() == 16);

  const ExperimentConfig env2 =
      config_from_json_text(R"({"environment":"EnvII","agent":"Ddpg"})");
  CHECK(env2.channel.model == ChannelModel::Tdl2);
  CHECK(env2.subband.n_prb == 8);
  CHECK(env2.subband.pilot_subcarrier_indices == std::vector<std::size_t>{0, 47, 95});
  CHECK(env2.link.modulation.m_ary == 4);
  CHECK(env2.hidden_dims == std::vector<std::size_t>{3840, 512, 128});
  CHECK(env2.channel.tap_delays == std::vector<double>{0.0, 400e-9});
  CHECK(env2.channel.tap_powers_db == std::vector<double>{0.0, 0.0});
  CHECK(env2.observation_dim() == 48);
}

TEST_CASE("config overrides and validation errors") {
  const ExperimentConfig cfg = config_from_json_text(
      R"({"environment":"EnvI","agent":"BaselineSvdEvd"})", {"link.snr_db=4", "episodes=7"});
  CHECK(cfg.link.snr_db == 4.0);
  CHECK(cfg.episodes == 7);

  CHECK_THROWS_AS(config_from_json_text(R"({"environment":"EnvX"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"environment":"EnvI","agent":"Dqn"})"), ConfigError);
  CHECK_THROWS_AS(
      config_from_json_text(R"({"environment":"EnvI","agent":"BaselineSvdEvd","gamma":2.0})"),
      ConfigError);
  CHECK_THROWS_AS(config_from_json_text(R"({"environment":"EnvI","agent":"BaselineSvdEvd"})",
                                        {"channel.model=Tdl2"}),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json_text("not json"), ConfigError);
}

TEST_CASE("shipped presets match the published step counts") {
  const std::string dir = PRECODELAB_PRESET_DIR;
  const ExperimentConfig desk_dqn = load_config(dir + "/envI_dqn.json");
  CHECK(desk_dqn.total_steps() == 100000);
  const ExperimentConfig desk_ddpg = load_config(dir + "/envI_ddpg.json");
  CHECK(desk_ddpg.total_steps() == 300000);
  const ExperimentConfig paper_dqn = load_config(dir + "/envI_dqn_paper.json");
  CHECK(paper_dqn.total_steps() == 300000);
  const ExperimentConfig desk2_dqn = load_config(dir + "/envII_dqn.json");
  CHECK(desk2_dqn.total_steps() == 300000);
  const ExperimentConfig paper2_ddpg = load_config(dir + "/envII_ddpg_paper.json");
  CHECK(paper2_ddpg.total_steps() == 3000000);
  // presets resolve their codebook next to the preset file
  CHECK(fs::exists(desk_dqn.codebook_path));
}

TEST_CASE("training is deterministic and writes the expected artifacts") {
  const fs::path dir = tmp_dir("precodelab_train_det");
  const std::string cb = small_codebook(dir);
  const ExperimentConfig cfg_a =
      config_from_json_text(tiny_dqn_config(cb, (dir / "run_a").string()));
  const ExperimentConfig cfg_b =
      config_from_json_text(tiny_dqn_config(cb, (dir / "run_b").string()));
  const TrainResult ra = train(cfg_a);
  const TrainResult rb = train(cfg_b);
  CHECK(read_file(ra.checkpoint_path) == read_file(rb.checkpoint_path));
  CHECK(read_file(ra.log_path) == read_file(rb.log_path));
  CHECK(fs::exists(fs::path(cfg_a.output_dir) / "run_meta.json"));
  fs::remove_all(dir);
}

TEST_CASE("ddpg training runs and its checkpoint reloads") {
  const fs::path dir = tmp_dir("precodelab_train_ddpg");
  const std::string cfg_text =
      R"({"environment":"EnvI","agent":"Ddpg","hidden_dims":[16,8],"episodes":1,)"
      R"("steps_per_episode":8,"subband":{"data_re_budget":64},"seed":5,"output_dir":")" +
      (dir / "run").string() + R"("})";
  const TrainResult result = train(config_from_json_text(cfg_text));
  const AgentCheckpoint ckpt = load_agent(result.checkpoint_path);
  CHECK(std::holds_alternative<DdpgAgent>(ckpt.agent));
  fs::remove_all(dir);
}

TEST_CASE("train rejects baseline agents") {
  CHECK_THROWS_AS(train(config_from_json_text(R"({"environment":"EnvI","agent":"BaselineSvdEvd"})")),
                  ConfigError);
}

TEST_CASE("svd baseline evaluates itself with gain ratio one") {
  ExperimentConfig cfg = config_from_json_text(
      R"({"environment":"EnvI","agent":"BaselineSvdEvd","eval_states":64,)"
      R"("subband":{"data_re_budget":64},"seed":9})");
  const EvalResult result = evaluate(cfg, nullptr);
  REQUIRE(result.records.size() == 64);
  for (const EvalRecord& rec : result.records) {
    const double ratio = rec.effective_gain_agent / rec.effective_gain_bound;
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rec.agent_reward == rec.baseline_reward);
  }
  CHECK(result.summary.mean_gain_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("noiseless evaluation gives zero BER and reward 0.5 everywhere") {
  ExperimentConfig cfg = config_from_json_text(
      R"({"environment":"EnvI","agent":"BaselineSvdEvd","eval_states":32,)"
      R"("subband":{"data_re_budget":64},"link":{"noiseless":true},"seed":11})");
  const EvalResult result = evaluate(cfg, nullptr);
  for (const EvalRecord& rec : result.records) {
    CHECK(rec.agent_ber == 0.0);
    CHECK(rec.agent_reward == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("untrained dqn evaluation: gain ratio in (0, 1] and outputs consistent") {
  const fs::path dir = tmp_dir("precodelab_eval_dqn");
  const std::string cb_path = small_codebook(dir);
  ExperimentConfig cfg = config_from_json_text(tiny_dqn_config(cb_path, (dir / "run").string()));
  cfg.eval_states = 32;
  Rng init(1);
  DqnAgent agent = make_dqn_agent(16, {16, 8}, 8, DqnVariant::Single, init);
  AgentCheckpoint ckpt;
  ckpt.agent = agent;
  ckpt.codebook_path = cb_path;
  const EvalResult result = evaluate(cfg, &ckpt);
  for (const EvalRecord& rec : result.records) {
    const double ratio = rec.effective_gain_agent / rec.effective_gain_bound;
    CHECK(ratio > 0.0);
    CHECK(ratio <= 1.0 + 1e-9);
  }
  // CSV reward column equals the reward formula applied to the BER column
  write_eval_outputs(result, cfg, (dir / "eval_out").string());
  std::ifstream csv(dir / "eval_out" / "eval.csv");
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string field;
    std::vector<double> fields;
    while (std::getline(ss, field, ',')) fields.push_back(std::stod(field));
    REQUIRE(fields.size() == 7);
    CHECK(fields[1] == doctest::Approx(reward_from_ber(fields[2])).epsilon(1e-9));
    CHECK(fields[3] == doctest::Approx(reward_from_ber(fields[4])).epsilon(1e-9));
  }
  CHECK(fs::exists(dir / "eval_out" / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("evaluation does not mutate the checkpoint file") {
  const fs::path dir = tmp_dir("precodelab_eval_nomutate");
  const std::string cb_path = small_codebook(dir);
  ExperimentConfig cfg = config_from_json_text(tiny_dqn_config(cb_path, (dir / "run").string()));
  const TrainResult tr = train(cfg);
  const std::string before = read_file(tr.checkpoint_path);
  const AgentCheckpoint ckpt = load_agent(tr.checkpoint_path);
  cfg.eval_states = 8;
  evaluate(cfg, &ckpt);
  CHECK(read_file(tr.checkpoint_path) == before);
  fs::remove_all(dir);
}

TEST_CASE("sweep produces one row per policy per SNR, deterministically") {
  ExperimentConfig cfg = config_from_json_text(
      R"({"environment":"EnvI","agent":"BaselineSvdEvd","eval_states":24,)"
      R"("subband":{"data_re_budget":64},"seed":13})");
  const std::vector<SweepRow> rows = sweep_snr(cfg, nullptr, {10.0});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].policy == "baseline_svd");

  const std::vector<SweepRow> a = sweep_snr(cfg, nullptr, {0.0, 8.0});
  const std::vector<SweepRow> b = sweep_snr(cfg, nullptr, {0.0, 8.0});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean_ber == b[i].mean_ber);
    CHECK(a[i].ci95_halfwidth == b[i].ci95_halfwidth);
  }
  CHECK_THROWS_AS(sweep_snr(cfg, nullptr, {}), ConfigError);
}

TEST_CASE("cli: gen-codebook, train determinism, and error codes") {
  const fs::path dir = tmp_dir("precodelab_cli");
  const std::string cb_path = (dir / "cb.json").string();

  {
    const char* argv[] = {"precodelab", "gen-codebook", "--ntx", "4",    "--size",
                          "8",          "--seed",       "7",     "--out", cb_path.c_str(),
                          "--iters",    "500"};
    CHECK(run_cli(12, argv) == 0);
    const Codebook cb = load_codebook(cb_path);
    CHECK(cb.size() == 8);
  }
  {
    const fs::path cfg_path = dir / "cfg.json";
    std::ofstream out(cfg_path);
    out << tiny_dqn_config("cb.json", (dir / "run1").string());
    out.close();
    const std::string cfg_str = cfg_path.string();
    const char* argv[] = {"precodelab", "train", "--config", cfg_str.c_str()};
    CHECK(run_cli(4, argv) == 0);
    // second run into a different directory, then byte-compare checkpoints
    const std::string override_out = "output_dir=" + (dir / "run2").string();
    const char* argv3[] = {"precodelab", "train", "--config", cfg_str.c_str(), "--override",
                           override_out.c_str()};
    CHECK(run_cli(6, argv3) == 0);
    CHECK(read_file(dir / "run1" / "checkpoint.json") ==
          read_file(dir / "run2" / "checkpoint.json"));
  }
  {
    const char* argv[] = {"precodelab", "train", "--config", "/nonexistent/cfg.json"};
    CHECK(run_cli(4, argv) == 1);
  }
  {
    const char* argv[] = {"precodelab", "train"};
    CHECK(run_cli(2, argv) == 1);  // missing required --config
  }
  {
    const char* argv[] = {"precodelab", "frobnicate"};
    CHECK(run_cli(2, argv) == 1);  // unknown subcommand
  }
  {
    const char* argv[] = {"precodelab", "gen-codebook", "--bogus", "1"};
    CHECK(run_cli(4, argv) == 1);  // unknown flag
  }
  {
    // unwritable output: I/O error
    const char* argv[] = {"precodelab", "gen-codebook", "--ntx", "4",     "--size", "4",
                          "--seed",     "1",            "--out", "/nonexistent/cb.json",
                          "--iters",    "100"};
    CHECK(run_cli(12, argv) == 2);
  }
  fs::remove_all(dir);
}

TEST_CASE("cli baseline subcommand writes evaluation outputs") {
  const fs::path dir = tmp_dir("precodelab_cli_baseline");
  const fs::path cfg_path = dir / "cfg.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"environment":"EnvI","agent":"BaselineSvdEvd","eval_states":8,)"
        << R"("subband":{"data_re_budget":64},"seed":21})";
  }
  const std::string cfg_str = cfg_path.string();
  const std::string out_dir = (dir / "out").string();
  const char* argv[] = {"precodelab", "baseline", "--which", "svd",
                        "--config",   cfg_str.c_str(), "--out", out_dir.c_str()};
  CHECK(run_cli(8, argv) == 0);
  CHECK(fs::exists(fs::path(out_dir) / "eval.csv"));
  CHECK(fs::exists(fs::path(out_dir) / "summary.json"));
  fs::remove_all(dir);
}
