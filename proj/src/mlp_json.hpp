#pragma once

#include <stdexcept>

#include "json.hpp"
#include "precodelab/errors.hpp"
#include "precodelab/neuralnet.hpp"

namespace precodelab {
namespace nn {

inline nlohmann::json mlp_to_json(const MlpParams& params) {
  nlohmann::json j;
  j["layer_dims"] = params.layer_dims;
  j["hidden_activation"] = "ReLU";
  j["output_activation"] =
      params.output_activation == OutputActivation::Linear ? "Linear" : "UnitNormalize";
  j["weights"] = params.weights;
  j["biases"] = params.biases;
  return j;
}

inline MlpParams mlp_from_json(const nlohmann::json& j) {
  MlpParams p;
  try {
    p.layer_dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    const std::string act = j.at("output_activation").get<std::string>();
    if (act == "Linear")
      p.output_activation = OutputActivation::Linear;
    else if (act == "UnitNormalize")
      p.output_activation = OutputActivation::UnitNormalize;
    else
      throw IoError("mlp_from_json: unknown output activation " + act);
    p.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    p.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("mlp_from_json: malformed checkpoint: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace nn
}  // namespace precodelab
