#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "precodelab/harness.hpp"

namespace precodelab {

namespace {

std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string tok = text.substr(start, comma - start);
    if (!tok.empty()) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("bad SNR value: " + tok);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty SNR list");
  return out;
}

AgentKind kind_of(const AgentCheckpoint& ckpt) {
  return std::holds_alternative<DqnAgent>(ckpt.agent) ? AgentKind::Dqn : AgentKind::Ddpg;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"MIMO-OFDM precoder selection lab"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-codebook", "Generate a Grassmannian codebook");
  std::size_t ntx = 4, size = 64, iters = 20000;
  std::uint64_t cb_seed = 1;
  std::string cb_out;
  gen->add_option("--ntx", ntx, "Transmit antennas")->required();
  gen->add_option("--size", size, "Codebook size N")->required();
  gen->add_option("--seed", cb_seed, "Generation seed")->required();
  gen->add_option("--out", cb_out, "Output JSON path")->required();
  gen->add_option("--iters", iters, "Optimization iterations");

  auto* tr = app.add_subcommand("train", "Train an agent from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  tr->add_option("--config", config_path, "Config JSON path")->required();
  tr->add_option("--override", overrides, "key=value config override (repeatable)");

  auto* ev = app.add_subcommand("eval", "Evaluate a trained checkpoint");
  std::string eval_config, eval_ckpt, eval_out;
  std::vector<std::string> eval_overrides;
  ev->add_option("--checkpoint", eval_ckpt, "Agent checkpoint JSON")->required();
  ev->add_option("--config", eval_config, "Config JSON path")->required();
  ev->add_option("--out", eval_out, "Output directory")->required();
  ev->add_option("--override", eval_overrides, "key=value config override (repeatable)");

  auto* sw = app.add_subcommand("sweep", "BER vs SNR sweep");
  std::string sweep_config, sweep_ckpt, sweep_out, sweep_snrs;
  std::vector<std::string> sweep_overrides;
  sw->add_option("--checkpoint", sweep_ckpt, "Agent checkpoint JSON (omit for baselines)");
  sw->add_option("--config", sweep_config, "Config JSON path")->required();
  sw->add_option("--snrs", sweep_snrs, "Comma-separated SNR list in dB")->required();
  sw->add_option("--out", sweep_out, "Output directory")->required();
  sw->add_option("--override", sweep_overrides, "key=value config override (repeatable)");

  auto* bl = app.add_subcommand("baseline", "Evaluate an analytic baseline");
  std::string bl_config, bl_out, bl_which;
  std::vector<std::string> bl_overrides;
  bl->add_option("--which", bl_which, "codebook, svd or evd")
      ->required()
      ->check(CLI::IsMember({"codebook", "svd", "evd"}));
  bl->add_option("--config", bl_config, "Config JSON path")->required();
  bl->add_option("--out", bl_out, "Output directory")->required();
  bl->add_option("--override", bl_overrides, "key=value config override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) {
      const Codebook cb = generate_grassmannian(ntx, size, cb_seed, iters);
      save_codebook(cb, cb_out);
      std::cout << "codebook n_tx=" << cb.n_tx << " N=" << cb.size()
                << " min_chordal_distance=" << cb.min_chordal_distance << " -> " << cb_out << "\n";
    } else if (tr->parsed()) {
      const ExperimentConfig cfg = load_config(config_path, overrides);
      const TrainResult result = train(cfg);
      std::cout << "checkpoint: " << result.checkpoint_path
                << "\nlog: " << result.log_path << "\nmean reward (last episode): "
                << result.mean_reward_last_episode << "\n";
    } else if (ev->parsed()) {
      ExperimentConfig cfg = load_config(eval_config, eval_overrides);
      const AgentCheckpoint ckpt = load_agent(eval_ckpt);
      cfg.agent = kind_of(ckpt);
      const EvalResult result = evaluate(cfg, &ckpt);
      write_eval_outputs(result, cfg, eval_out);
      std::cout << "states: " << result.summary.states
                << "\nmean reward: " << result.summary.mean_reward_agent
                << "\nmean BER: " << result.summary.mean_ber_agent
                << "\nmean gain ratio: " << result.summary.mean_gain_ratio << "\n";
    } else if (sw->parsed()) {
      ExperimentConfig cfg = load_config(sweep_config, sweep_overrides);
      std::optional<AgentCheckpoint> ckpt;
      if (!sweep_ckpt.empty()) {
        ckpt = load_agent(sweep_ckpt);
        cfg.agent = kind_of(*ckpt);
      } else if (cfg.agent == AgentKind::Dqn || cfg.agent == AgentKind::Ddpg) {
        throw ConfigError("sweep without --checkpoint requires a baseline agent in the config");
      }
      const std::vector<SweepRow> rows = sweep_snr(cfg, ckpt ? &*ckpt : nullptr,
                                                   parse_snr_list(sweep_snrs));
      std::error_code ec;
      std::filesystem::create_directories(sweep_out, ec);
      if (ec) throw IoError("cannot create output dir " + sweep_out);
      write_sweep_csv(rows, (std::filesystem::path(sweep_out) / "sweep.csv").string());
      std::cout << "rows: " << rows.size() << "\n";
    } else if (bl->parsed()) {
      ExperimentConfig cfg = load_config(bl_config, bl_overrides);
      if (bl_which == "codebook") {
        cfg.agent = AgentKind::BaselineCodebook;
      } else {
        if (bl_which == "svd" && cfg.environment != Environment::EnvI)
          throw ConfigError("the svd baseline applies to Environment I; use evd");
        cfg.agent = AgentKind::BaselineSvdEvd;
      }
      const EvalResult result = evaluate(cfg, nullptr);
      write_eval_outputs(result, cfg, bl_out);
      std::cout << "states: " << result.summary.states
                << "\nmean reward: " << result.summary.mean_reward_agent
                << "\nmean BER: " << result.summary.mean_ber_agent << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace precodelab
