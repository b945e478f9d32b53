#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <vector>

#include "precodelab/harness.hpp"

namespace py = pybind11;
using namespace precodelab;

namespace {

CMat mat_from_rows(const std::vector<std::vector<cplx>>& rows) {
  if (rows.empty()) throw std::invalid_argument("matrix must have at least one row");
  CMat m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (rows[r].size() != m.cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::vector<cplx>> mat_to_rows(const CMat& m) {
  std::vector<std::vector<cplx>> rows(m.rows, std::vector<cplx>(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) rows[r][c] = m(r, c);
  return rows;
}

CVec vec_from_list(const std::vector<cplx>& entries) {
  CVec v(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) v[i] = entries[i];
  return v;
}

Precoder precoder_from_list(const std::vector<cplx>& entries) {
  return Precoder::continuous(vec_from_list(entries));
}

LinkConfig link_config(double snr_db, std::size_t modulation, const std::string& llr_mode,
                       bool noiseless) {
  LinkConfig cfg;
  cfg.snr_db = snr_db;
  cfg.modulation = ModulationScheme::qam(modulation);
  if (llr_mode == "exact")
    cfg.llr_mode = LlrMode::ExactLogSum;
  else if (llr_mode == "maxlog")
    cfg.llr_mode = LlrMode::MaxLog;
  else
    throw std::invalid_argument("llr_mode must be 'exact' or 'maxlog'");
  cfg.noiseless = noiseless;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MIMO-OFDM precoder selection lab: channel models, link chain, "
            "Grassmannian codebooks, DQN/DDPG agents and analytic baselines";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<IoError>(m, "IoError");

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream") = 0)
      .def("uniform", &Rng::uniform)
      .def("gaussian", &Rng::gaussian)
      .def("uniform_int", &Rng::uniform_int)
      .def("complex_gaussian", &Rng::complex_gaussian);

  m.def(
      "complex_gaussian",
      [](std::size_t rows, std::size_t cols, double variance, Rng& rng) {
        return mat_to_rows(complex_gaussian(rows, cols, variance, rng));
      },
      py::arg("rows"), py::arg("cols"), py::arg("variance"), py::arg("rng"));

  m.def(
      "hermitian_evd",
      [](const std::vector<std::vector<cplx>>& rows) {
        const Evd evd = hermitian_evd(mat_from_rows(rows));
        return py::make_tuple(evd.eigenvalues, mat_to_rows(evd.eigenvectors));
      },
      "Eigenvalues (descending) and orthonormal eigenvector columns of a "
      "Hermitian matrix",
      py::arg("matrix"));

  m.def(
      "chordal_distance",
      [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        return chordal_distance(vec_from_list(a), vec_from_list(b));
      },
      py::arg("w1"), py::arg("w2"));

  py::class_<ChannelState>(m, "ChannelState")
      .def_property_readonly("pilot_channels",
                             [](const ChannelState& s) {
                               std::vector<std::vector<std::vector<cplx>>> out;
                               for (const CMat& h : s.pilot_channels) out.push_back(mat_to_rows(h));
                               return out;
                             })
      .def_property_readonly("data_channels", [](const ChannelState& s) {
        std::vector<std::vector<std::vector<cplx>>> out;
        for (const CMat& h : s.data_channels) out.push_back(mat_to_rows(h));
        return out;
      });

  m.def(
      "sample_flat",
      [](std::size_t n_tx, std::size_t n_rx, Rng& rng) {
        ChannelSpec spec;
        spec.n_tx = n_tx;
        spec.n_rx = n_rx;
        spec.model = ChannelModel::Flat;
        return sample_flat(spec, rng);
      },
      py::arg("n_tx"), py::arg("n_rx"), py::arg("rng"));

  m.def(
      "sample_tdl2",
      [](std::size_t n_tx, std::size_t n_rx, std::size_t n_prb,
         const std::vector<std::size_t>& pilot_indices, Rng& rng) {
        ChannelSpec spec;
        spec.n_tx = n_tx;
        spec.n_rx = n_rx;
        spec.model = ChannelModel::Tdl2;
        SubbandSpec sb;
        sb.n_prb = n_prb;
        sb.pilot_subcarrier_indices = pilot_indices;
        return sample_tdl2(spec, sb, rng);
      },
      py::arg("n_tx"), py::arg("n_rx"), py::arg("n_prb"), py::arg("pilot_indices"),
      py::arg("rng"));

  m.def("observe", [](const ChannelState& state) { return observe(state).values; });

  m.def(
      "effective_gain",
      [](const std::vector<std::vector<cplx>>& h, const std::vector<cplx>& w) {
        return effective_gain(mat_from_rows(h), precoder_from_list(w));
      },
      py::arg("h"), py::arg("w"));

  m.def(
      "mrc",
      [](const std::vector<std::vector<cplx>>& h, const std::vector<cplx>& w) {
        return mrc(mat_from_rows(h), precoder_from_list(w)).e;
      },
      py::arg("h"), py::arg("w"));

  m.def(
      "llr",
      [](cplx z, cplx h_eff, double noise_variance, std::size_t modulation, std::size_t m_bit,
         const std::string& mode) {
        return llr(z, h_eff, noise_variance, ModulationScheme::qam(modulation), m_bit,
                   mode == "maxlog" ? LlrMode::MaxLog : LlrMode::ExactLogSum);
      },
      py::arg("z"), py::arg("h_eff"), py::arg("noise_variance"), py::arg("modulation"),
      py::arg("m"), py::arg("mode") = "exact");

  m.def("reward_from_ber", &reward_from_ber, py::arg("ber"));

  m.def(
      "measure_ber",
      [](const ChannelState& state, const std::vector<cplx>& w, double snr_db,
         std::size_t modulation, std::size_t data_re_budget, Rng& rng, bool noiseless,
         const std::string& llr_mode) {
        SubbandSpec sb;
        sb.n_prb = std::max<std::size_t>(1, state.data_channels.size() / 12);
        sb.pilot_subcarrier_indices = {0};
        sb.data_re_budget = data_re_budget;
        const Reward r = measure_ber(state, precoder_from_list(w),
                                     link_config(snr_db, modulation, llr_mode, noiseless), sb, rng);
        return py::make_tuple(r.value, r.ber);
      },
      "Returns (reward, ber)", py::arg("state"), py::arg("w"), py::arg("snr_db"),
      py::arg("modulation"), py::arg("data_re_budget"), py::arg("rng"),
      py::arg("noiseless") = false, py::arg("llr_mode") = "exact");

  py::class_<Codebook>(m, "Codebook")
      .def_property_readonly("n_tx", [](const Codebook& cb) { return cb.n_tx; })
      .def_property_readonly("min_chordal_distance",
                             [](const Codebook& cb) { return cb.min_chordal_distance; })
      .def("__len__", &Codebook::size)
      .def("word", [](const Codebook& cb, std::size_t i) { return cb.words.at(i).e; });

  m.def("generate_grassmannian", &generate_grassmannian, py::arg("n_tx"), py::arg("n_words"),
        py::arg("seed"), py::arg("iterations") = 20000);
  m.def("save_codebook", &save_codebook, py::arg("codebook"), py::arg("path"));
  m.def("load_codebook", &load_codebook, py::arg("path"));
  m.def(
      "exhaustive_search",
      [](const std::vector<std::vector<cplx>>& a, const Codebook& cb) {
        const auto [index, w] = exhaustive_search(mat_from_rows(a), cb);
        return py::make_tuple(index, w.w.e);
      },
      py::arg("a"), py::arg("codebook"));

  m.def(
      "covariance",
      [](const std::vector<std::vector<std::vector<cplx>>>& pilots) {
        std::vector<CMat> mats;
        for (const auto& rows : pilots) mats.push_back(mat_from_rows(rows));
        return mat_to_rows(covariance(mats).r);
      },
      py::arg("pilot_channels"));
  m.def(
      "svd_precoder",
      [](const std::vector<std::vector<cplx>>& h) { return svd_precoder(mat_from_rows(h)).w.e; },
      py::arg("h"));
  m.def(
      "evd_precoder",
      [](const std::vector<std::vector<cplx>>& r) {
        return evd_precoder({mat_from_rows(r), 1}).w.e;
      },
      py::arg("r"));

  m.def("epsilon_schedule", &epsilon_schedule, py::arg("episode"));

  m.def(
      "train_from_config",
      [](const std::string& config_path, const std::vector<std::string>& overrides) {
        const TrainResult result = train(load_config(config_path, overrides));
        return py::make_tuple(result.checkpoint_path, result.mean_reward_last_episode);
      },
      "Run a training preset; returns (checkpoint_path, mean_reward_last_episode)",
      py::arg("config_path"), py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "evaluate_checkpoint",
      [](const std::string& checkpoint_path, const std::string& config_path,
         const std::vector<std::string>& overrides) {
        ExperimentConfig cfg = load_config(config_path, overrides);
        const AgentCheckpoint ckpt = load_agent(checkpoint_path);
        cfg.agent = std::holds_alternative<DqnAgent>(ckpt.agent) ? AgentKind::Dqn : AgentKind::Ddpg;
        const EvalResult result = evaluate(cfg, &ckpt);
        py::dict out;
        out["states"] = result.summary.states;
        out["mean_reward_agent"] = result.summary.mean_reward_agent;
        out["mean_ber_agent"] = result.summary.mean_ber_agent;
        out["mean_reward_baseline"] = result.summary.mean_reward_baseline;
        out["mean_ber_baseline"] = result.summary.mean_ber_baseline;
        out["mean_gain_ratio"] = result.summary.mean_gain_ratio;
        out["reward_cdf"] = result.summary.reward_cdf;
        return out;
      },
      py::arg("checkpoint_path"), py::arg("config_path"),
      py::arg("overrides") = std::vector<std::string>{});

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv;
        argv.push_back("precodelab");
        for (const std::string& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      "Invoke the command-line interface with the given argument list",
      py::arg("args"));
}
