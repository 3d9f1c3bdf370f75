#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mgrid/common.hpp"

namespace mgrid::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { Relu, Tanh, Linear, SoftmaxAtoms };

/// Learnable standard deviations of a noisy layer.
struct NoiseScales {
  Matrix weights;
  Vector biases;
};

struct LayerParams {
  Matrix weights;  // out x in
  Vector biases;   // out
  std::optional<NoiseScales> noise;
  Activation activation = Activation::Linear;
  std::size_t atoms = 0;  // softmax group size for SoftmaxAtoms

  std::size_t input_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights.rows()); }
};

struct NetworkParams {
  std::vector<LayerParams> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().input_dim(); }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().output_dim(); }
  std::size_t parameter_count() const;
  bool noisy() const;
  /// Throws std::invalid_argument when shapes do not chain or values are not finite.
  void validate() const;
};

struct LayerSpec {
  std::size_t units = 0;
  Activation activation = Activation::Relu;
};

struct Architecture {
  std::size_t input_dim = 0;
  std::vector<LayerSpec> layers;
  bool noisy = false;
  std::size_t atoms = 0;  // for SoftmaxAtoms output layers

  /// Hidden relu layers followed by one output layer.
  static Architecture mlp(std::size_t input_dim, std::vector<std::size_t> hidden,
                          std::size_t output_dim, Activation output, bool noisy,
                          std::size_t atoms = 0);
};

/// Uniform fan-in initialisation; noise scales start at 0.5 / sqrt(fan_in).
NetworkParams init_network(const Architecture& arch, Rng& rng);

/// Factorised Gaussian noise, already passed through f(x) = sign(x) sqrt(|x|).
/// Empty vectors for layers without noise scales.
struct NoiseSample {
  std::vector<Vector> input_noise;
  std::vector<Vector> output_noise;

  bool empty() const { return input_noise.empty(); }
};

NoiseSample sample_noise(const NetworkParams& params, Rng& rng);

/// Zero mode evaluates the mean network; Frozen applies the stored sample.
enum class NoiseMode { Frozen, Zero };

struct ForwardCache {
  std::vector<Matrix> inputs;   // input of each layer
  std::vector<Matrix> outputs;  // post-activation output of each layer
  bool noise_applied = false;
};

struct LayerGradient {
  Matrix weights;
  Vector biases;
  Matrix noise_weights;  // empty for noiseless layers
  Vector noise_biases;
};

struct Gradients {
  std::vector<LayerGradient> layers;

  static Gradients zeros_like(const NetworkParams& params);
  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
  bool all_finite() const;
  double squared_norm() const;
};

struct BackwardResult {
  Gradients gradients;
  Matrix input_gradient;  // dL/d input, same shape as the forward input
};

/// Batched forward pass; columns are samples.
Matrix forward(const NetworkParams& params, const Matrix& input, const NoiseSample* noise,
               ForwardCache* cache = nullptr);

/// Backpropagates dL/d output (same shape as the forward output) through the
/// cached pass. Gradients are summed over the batch.
BackwardResult backward(const NetworkParams& params, const NoiseSample* noise,
                        const ForwardCache& cache, const Matrix& upstream);

/// Row-wise softmax of an [actions x atoms] logit matrix, max-subtracted.
Matrix softmax_over_atoms(const Matrix& logits);

/// A parameter set with its current noise sample.
class Network {
 public:
  Network() = default;
  Network(const Architecture& arch, Rng& rng) : params_(init_network(arch, rng)) {}
  explicit Network(NetworkParams params) : params_(std::move(params)) {}

  const NetworkParams& params() const { return params_; }
  NetworkParams& params() { return params_; }
  const NoiseSample& noise() const { return noise_; }

  void resample_noise(Rng& rng) { noise_ = sample_noise(params_, rng); }
  void set_noise(NoiseSample noise) { noise_ = std::move(noise); }

  Matrix forward(const Matrix& input, NoiseMode mode, ForwardCache* cache = nullptr) const;
  Vector forward(const Vector& input, NoiseMode mode) const;
  BackwardResult backward(const ForwardCache& cache, const Matrix& upstream) const;

 private:
  const NoiseSample* active_noise(NoiseMode mode) const;

  NetworkParams params_;
  NoiseSample noise_;
};

/// target <- tau * online + (1 - tau) * target, over every parameter.
void soft_update(NetworkParams& target, const NetworkParams& online, double tau);

void save_network(std::ostream& os, const NetworkParams& params);
NetworkParams load_network(std::istream& is);

}  // namespace mgrid::nn
