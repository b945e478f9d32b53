#include "precodelab/neuralnet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mlp_json.hpp"
#include "precodelab/errors.hpp"

namespace precodelab {
namespace nn {

namespace {

constexpr double kNormFloor = 1e-12;

void affine(const std::vector<double>& w, const std::vector<double>& b,
            const std::vector<double>& x, std::vector<double>& y) {
  const std::size_t out_dim = b.size();
  const std::size_t in_dim = x.size();
  y.resize(out_dim);
  const double* wp = w.data();
  for (std::size_t i = 0; i < out_dim; ++i, wp += in_dim) {
    double s = b[i];
    for (std::size_t j = 0; j < in_dim; ++j) s += wp[j] * x[j];
    y[i] = s;
  }
}

/// delta_prev = W^T delta, as row-wise AXPY to stay contiguous.
void backprop_delta(const std::vector<double>& w, const std::vector<double>& delta,
                    std::size_t in_dim, std::vector<double>& delta_prev) {
  delta_prev.assign(in_dim, 0.0);
  const double* wp = w.data();
  for (std::size_t i = 0; i < delta.size(); ++i, wp += in_dim) {
    const double d = delta[i];
    if (d == 0.0) continue;
    for (std::size_t j = 0; j < in_dim; ++j) delta_prev[j] += wp[j] * d;
  }
}

void relu_mask(const std::vector<double>& pre, std::vector<double>& delta) {
  for (std::size_t j = 0; j < delta.size(); ++j)
    if (pre[j] <= 0.0) delta[j] = 0.0;
}

std::vector<double> output_delta(const MlpParams& params, const ForwardCache& cache,
                                 const std::vector<double>& upstream) {
  if (upstream.size() != params.output_dim())
    throw std::invalid_argument("backward: upstream dimension mismatch");
  if (params.output_activation == OutputActivation::Linear) return upstream;
  // y = v/||v||: grad_v = (g - (y.g) y) / ||v||, linear below the norm floor.
  const std::vector<double>& y = cache.post.back();
  const double n = cache.pre_output_norm;
  std::vector<double> delta(upstream.size());
  if (n > kNormFloor) {
    double dot = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) dot += y[j] * upstream[j];
    for (std::size_t j = 0; j < y.size(); ++j) delta[j] = (upstream[j] - dot * y[j]) / n;
  } else {
    for (std::size_t j = 0; j < y.size(); ++j) delta[j] = upstream[j] / kNormFloor;
  }
  return delta;
}

}  // namespace

void MlpParams::validate() const {
  if (layer_dims.size() < 2) throw std::invalid_argument("MlpParams: need at least two dims");
  for (std::size_t d : layer_dims)
    if (d == 0) throw std::invalid_argument("MlpParams: zero layer width");
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size())
    throw std::invalid_argument("MlpParams: layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].size() != layer_dims[l + 1] * layer_dims[l])
      throw std::invalid_argument("MlpParams: weight shape mismatch");
    if (biases[l].size() != layer_dims[l + 1])
      throw std::invalid_argument("MlpParams: bias shape mismatch");
  }
}

MlpParams init_xavier(const std::vector<std::size_t>& layer_dims,
                      OutputActivation output_activation, Rng& rng) {
  if (layer_dims.size() < 2) throw std::invalid_argument("init_xavier: need at least two dims");
  for (std::size_t d : layer_dims)
    if (d == 0) throw std::invalid_argument("init_xavier: zero layer width");
  MlpParams p;
  p.layer_dims = layer_dims;
  p.output_activation = output_activation;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const std::size_t fan_in = layer_dims[l];
    const std::size_t fan_out = layer_dims[l + 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in + fan_out));
    std::vector<double> w(fan_out * fan_in);
    for (double& v : w) v = stddev * rng.gaussian();
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(fan_out, 0.0);
  }
  return p;
}

const std::vector<double>& forward(const MlpParams& params, const std::vector<double>& x,
                                   ForwardCache& cache) {
  if (x.size() != params.input_dim()) throw std::invalid_argument("forward: input dimension mismatch");
  const std::size_t n_layers = params.n_layers();
  cache.input = x;
  cache.pre.resize(n_layers);
  cache.post.resize(n_layers);
  cache.pre_output_norm = 0.0;
  const std::vector<double>* prev = &cache.input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    affine(params.weights[l], params.biases[l], *prev, cache.pre[l]);
    if (l + 1 < n_layers) {
      cache.post[l] = cache.pre[l];
      for (double& v : cache.post[l]) v = v > 0.0 ? v : 0.0;
    } else if (params.output_activation == OutputActivation::UnitNormalize) {
      double s = 0.0;
      for (double v : cache.pre[l]) s += v * v;
      const double n = std::sqrt(s);
      cache.pre_output_norm = n;
      const double div = std::max(n, kNormFloor);
      cache.post[l].resize(cache.pre[l].size());
      for (std::size_t j = 0; j < cache.pre[l].size(); ++j) cache.post[l][j] = cache.pre[l][j] / div;
    } else {
      cache.post[l] = cache.pre[l];
    }
    prev = &cache.post[l];
  }
  return cache.post.back();
}

std::vector<double> forward(const MlpParams& params, const std::vector<double>& x) {
  ForwardCache cache;
  return forward(params, x, cache);
}

void backward_into(const MlpParams& params, const ForwardCache& cache,
                   const std::vector<double>& upstream, Gradients& out) {
  const std::size_t n_layers = params.n_layers();
  out.weights.resize(n_layers);
  out.biases.resize(n_layers);
  std::vector<double> delta = output_delta(params, cache, upstream);
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::vector<double>& below = (l == 0) ? cache.input : cache.post[l - 1];
    const std::size_t in_dim = below.size();
    out.weights[l].resize(delta.size() * in_dim);
    out.biases[l] = delta;
    double* gw = out.weights[l].data();
    for (std::size_t i = 0; i < delta.size(); ++i, gw += in_dim) {
      const double d = delta[i];
      for (std::size_t j = 0; j < in_dim; ++j) gw[j] = d * below[j];
    }
    std::vector<double> delta_prev;
    backprop_delta(params.weights[l], delta, in_dim, delta_prev);
    if (l > 0) relu_mask(cache.pre[l - 1], delta_prev);
    delta = std::move(delta_prev);
  }
  out.input_gradient = std::move(delta);
}

Gradients backward(const MlpParams& params, const ForwardCache& cache,
                   const std::vector<double>& upstream) {
  Gradients out;
  backward_into(params, cache, upstream, out);
  return out;
}

std::vector<double> input_gradient(const MlpParams& params, const ForwardCache& cache,
                                   const std::vector<double>& upstream) {
  const std::size_t n_layers = params.n_layers();
  std::vector<double> delta = output_delta(params, cache, upstream);
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in_dim = (l == 0) ? cache.input.size() : cache.post[l - 1].size();
    std::vector<double> delta_prev;
    backprop_delta(params.weights[l], delta, in_dim, delta_prev);
    if (l > 0) relu_mask(cache.pre[l - 1], delta_prev);
    delta = std::move(delta_prev);
  }
  return delta;
}

void sgd_step(MlpParams& params, const Gradients& grads, double eta, StepDirection direction) {
  if (eta <= 0.0) throw std::invalid_argument("sgd_step: eta must be positive");
  if (grads.weights.size() != params.n_layers())
    throw std::invalid_argument("sgd_step: gradient shape mismatch");
  const double sign = direction == StepDirection::Descent ? -1.0 : 1.0;
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    if (grads.weights[l].size() != params.weights[l].size() ||
        grads.biases[l].size() != params.biases[l].size())
      throw std::invalid_argument("sgd_step: gradient shape mismatch");
    double* w = params.weights[l].data();
    const double* g = grads.weights[l].data();
    for (std::size_t k = 0; k < params.weights[l].size(); ++k) w[k] += sign * eta * g[k];
    for (std::size_t k = 0; k < params.biases[l].size(); ++k)
      params.biases[l][k] += sign * eta * grads.biases[l][k];
  }
}

void train_step(MlpParams& params, const ForwardCache& cache,
                const std::vector<double>& upstream, double eta, StepDirection direction) {
  if (eta <= 0.0) throw std::invalid_argument("train_step: eta must be positive");
  const double sign = direction == StepDirection::Descent ? -1.0 : 1.0;
  const std::size_t n_layers = params.n_layers();
  std::vector<double> delta = output_delta(params, cache, upstream);
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::vector<double>& below = (l == 0) ? cache.input : cache.post[l - 1];
    const std::size_t in_dim = below.size();
    std::vector<double> delta_prev;
    if (l > 0) {
      backprop_delta(params.weights[l], delta, in_dim, delta_prev);
      relu_mask(cache.pre[l - 1], delta_prev);
    }
    double* w = params.weights[l].data();
    for (std::size_t i = 0; i < delta.size(); ++i, w += in_dim) {
      const double scaled = sign * eta * delta[i];
      if (scaled != 0.0)
        for (std::size_t j = 0; j < in_dim; ++j) w[j] += scaled * below[j];
      params.biases[l][i] += scaled;
    }
    delta = std::move(delta_prev);
  }
}

void save_checkpoint(const MlpParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_checkpoint: cannot open " + path);
  out << mlp_to_json(params).dump() << "\n";
  if (!out) throw IoError("save_checkpoint: write failed for " + path);
}

MlpParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_checkpoint: malformed JSON in " + path + ": " + e.what());
  }
  return mlp_from_json(j);
}

}  // namespace nn
}  // namespace precodelab
