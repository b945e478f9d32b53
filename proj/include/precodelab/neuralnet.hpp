#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "precodelab/numerics.hpp"

namespace precodelab {
namespace nn {

enum class OutputActivation { Linear, UnitNormalize };

/// Dense feed-forward network, double precision. Hidden layers are ReLU;
/// the output layer is affine, optionally followed by Euclidean
/// normalization (for actors constrained to the unit sphere).
struct MlpParams {
  std::vector<std::size_t> layer_dims;            // [d_in, h_1, ..., d_out]
  std::vector<std::vector<double>> weights;       // weights[l]: dims[l+1] x dims[l], row-major
  std::vector<std::vector<double>> biases;        // biases[l]: dims[l+1]
  OutputActivation output_activation = OutputActivation::Linear;

  std::size_t n_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_dims.front(); }
  std::size_t output_dim() const { return layer_dims.back(); }
  void validate() const;
};

/// Intermediate values of one forward pass, needed for backpropagation.
struct ForwardCache {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;   // affine outputs per layer
  std::vector<std::vector<double>> post;  // after activation per layer
  double pre_output_norm = 0.0;           // set when output is UnitNormalize
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input_gradient;
};

enum class StepDirection { Descent, Ascent };

/// Xavier-normal weights N(0, 2/(fan_in+fan_out)), zero biases.
MlpParams init_xavier(const std::vector<std::size_t>& layer_dims,
                      OutputActivation output_activation, Rng& rng);

const std::vector<double>& forward(const MlpParams& params, const std::vector<double>& x,
                                   ForwardCache& cache);
std::vector<double> forward(const MlpParams& params, const std::vector<double>& x);

/// Exact reverse-mode gradients of sum(upstream .* output) w.r.t. every
/// weight, bias, and the input. The ReLU subgradient at 0 is 0; the
/// UnitNormalize backward uses the exact Jacobian of v -> v/||v||.
Gradients backward(const MlpParams& params, const ForwardCache& cache,
                   const std::vector<double>& upstream);
void backward_into(const MlpParams& params, const ForwardCache& cache,
                   const std::vector<double>& upstream, Gradients& out);

/// Input gradient only (skips the weight/bias gradients).
std::vector<double> input_gradient(const MlpParams& params, const ForwardCache& cache,
                                   const std::vector<double>& upstream);

/// params -/+ eta * grads elementwise.
void sgd_step(MlpParams& params, const Gradients& grads, double eta, StepDirection direction);

/// Backpropagate and apply the SGD step in one pass over the weights.
/// Arithmetically equal to backward + sgd_step up to rounding association.
void train_step(MlpParams& params, const ForwardCache& cache,
                const std::vector<double>& upstream, double eta, StepDirection direction);

void save_checkpoint(const MlpParams& params, const std::string& path);
MlpParams load_checkpoint(const std::string& path);

}  // namespace nn
}  // namespace precodelab
