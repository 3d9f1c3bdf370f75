#include "mgrid/nn/network.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mgrid::nn {

namespace {

double noise_transform(double x) { return x < 0.0 ? -std::sqrt(-x) : std::sqrt(x); }

void group_softmax(Matrix& z, std::size_t atoms) {
  const Eigen::Index group = static_cast<Eigen::Index>(atoms);
  for (Eigen::Index col = 0; col < z.cols(); ++col) {
    for (Eigen::Index start = 0; start < z.rows(); start += group) {
      auto seg = z.col(col).segment(start, group);
      const double mx = seg.maxCoeff();
      seg = (seg.array() - mx).exp().matrix();
      seg /= seg.sum();
    }
  }
}

Matrix effective_weights(const LayerParams& layer, const NoiseSample* noise, std::size_t index) {
  if (!noise || !layer.noise || noise->empty()) return layer.weights;
  return layer.weights +
         layer.noise->weights.cwiseProduct(noise->output_noise[index] * noise->input_noise[index].transpose());
}

Vector effective_biases(const LayerParams& layer, const NoiseSample* noise, std::size_t index) {
  if (!noise || !layer.noise || noise->empty()) return layer.biases;
  return layer.biases + layer.noise->biases.cwiseProduct(noise->output_noise[index]);
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Linear: return "linear";
    case Activation::SoftmaxAtoms: return "softmax";
  }
  return "?";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "linear") return Activation::Linear;
  if (s == "softmax") return Activation::SoftmaxAtoms;
  throw std::runtime_error("checkpoint: unknown activation '" + s + "'");
}

}  // namespace

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) {
    n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
    if (l.noise) n += static_cast<std::size_t>(l.noise->weights.size() + l.noise->biases.size());
  }
  return n;
}

bool NetworkParams::noisy() const {
  for (const auto& l : layers)
    if (l.noise) return true;
  return false;
}

void NetworkParams::validate() const {
  if (layers.empty()) throw std::invalid_argument("network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.biases.size() != l.weights.rows())
      throw std::invalid_argument("layer " + std::to_string(i) + ": bias size mismatch");
    if (i > 0 && l.input_dim() != layers[i - 1].output_dim())
      throw std::invalid_argument("layer " + std::to_string(i) + ": input does not chain");
    if (l.noise && (l.noise->weights.rows() != l.weights.rows() ||
                    l.noise->weights.cols() != l.weights.cols() ||
                    l.noise->biases.size() != l.biases.size()))
      throw std::invalid_argument("layer " + std::to_string(i) + ": noise shape mismatch");
    if (l.activation == Activation::SoftmaxAtoms &&
        (l.atoms < 2 || l.output_dim() % l.atoms != 0))
      throw std::invalid_argument("layer " + std::to_string(i) + ": bad atom grouping");
    if (!l.weights.allFinite() || !l.biases.allFinite())
      throw std::invalid_argument("layer " + std::to_string(i) + ": non-finite parameters");
  }
}

Architecture Architecture::mlp(std::size_t input_dim, std::vector<std::size_t> hidden,
                               std::size_t output_dim, Activation output, bool noisy,
                               std::size_t atoms) {
  Architecture arch;
  arch.input_dim = input_dim;
  for (std::size_t h : hidden) arch.layers.push_back({h, Activation::Relu});
  arch.layers.push_back({output_dim, output});
  arch.noisy = noisy;
  arch.atoms = atoms;
  return arch;
}

NetworkParams init_network(const Architecture& arch, Rng& rng) {
  NetworkParams params;
  std::size_t fan_in = arch.input_dim;
  for (const auto& spec : arch.layers) {
    LayerParams layer;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> uni(-bound, bound);
    layer.weights.resize(static_cast<Eigen::Index>(spec.units), static_cast<Eigen::Index>(fan_in));
    layer.biases.resize(static_cast<Eigen::Index>(spec.units));
    for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) layer.weights(r, c) = uni(rng);
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r) layer.biases(r) = uni(rng);
    if (arch.noisy) {
      const double sigma = 0.5 / std::sqrt(static_cast<double>(fan_in));
      layer.noise = NoiseScales{Matrix::Constant(layer.weights.rows(), layer.weights.cols(), sigma),
                                Vector::Constant(layer.biases.size(), sigma)};
    }
    layer.activation = spec.activation;
    if (spec.activation == Activation::SoftmaxAtoms) layer.atoms = arch.atoms;
    params.layers.push_back(std::move(layer));
    fan_in = spec.units;
  }
  params.validate();
  return params;
}

NoiseSample sample_noise(const NetworkParams& params, Rng& rng) {
  NoiseSample s;
  if (!params.noisy()) return s;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& l : params.layers) {
    Vector in, out;
    if (l.noise) {
      in.resize(l.weights.cols());
      out.resize(l.weights.rows());
      for (Eigen::Index i = 0; i < in.size(); ++i) in(i) = noise_transform(normal(rng));
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = noise_transform(normal(rng));
    }
    s.input_noise.push_back(std::move(in));
    s.output_noise.push_back(std::move(out));
  }
  return s;
}

Matrix forward(const NetworkParams& params, const Matrix& input, const NoiseSample* noise,
               ForwardCache* cache) {
  if (static_cast<std::size_t>(input.rows()) != params.input_dim())
    throw std::invalid_argument("forward: input has " + std::to_string(input.rows()) +
                                " rows, network expects " + std::to_string(params.input_dim()));
  if (noise && !noise->empty() && noise->input_noise.size() != params.layers.size())
    throw std::invalid_argument("forward: noise sample does not match the network");
  if (cache) {
    cache->inputs.clear();
    cache->outputs.clear();
    cache->noise_applied = noise && !noise->empty();
  }
  Matrix x = input;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& layer = params.layers[i];
    Matrix z;
    if (noise && layer.noise && !noise->empty()) {
      z = effective_weights(layer, noise, i) * x;
      z.colwise() += effective_biases(layer, noise, i);
    } else {
      z = layer.weights * x;
      z.colwise() += layer.biases;
    }
    switch (layer.activation) {
      case Activation::Relu: z = z.cwiseMax(0.0); break;
      case Activation::Tanh: z = z.array().tanh().matrix(); break;
      case Activation::Linear: break;
      case Activation::SoftmaxAtoms: group_softmax(z, layer.atoms); break;
    }
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->outputs.push_back(z);
    }
    x = std::move(z);
  }
  return x;
}

BackwardResult backward(const NetworkParams& params, const NoiseSample* noise,
                        const ForwardCache& cache, const Matrix& upstream) {
  if (cache.outputs.size() != params.layers.size())
    throw std::invalid_argument("backward: cache does not match the network");
  const Matrix& last = cache.outputs.back();
  if (upstream.rows() != last.rows() || upstream.cols() != last.cols())
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  const bool noisy = cache.noise_applied && noise && !noise->empty();

  BackwardResult result;
  result.gradients = Gradients::zeros_like(params);
  Matrix grad = upstream;
  for (std::size_t idx = params.layers.size(); idx-- > 0;) {
    const auto& layer = params.layers[idx];
    const Matrix& y = cache.outputs[idx];
    switch (layer.activation) {
      case Activation::Relu: grad = grad.cwiseProduct((y.array() > 0.0).cast<double>().matrix()); break;
      case Activation::Tanh: grad = grad.cwiseProduct((1.0 - y.array().square()).matrix()); break;
      case Activation::Linear: break;
      case Activation::SoftmaxAtoms: {
        const Eigen::Index group = static_cast<Eigen::Index>(layer.atoms);
        for (Eigen::Index col = 0; col < grad.cols(); ++col) {
          for (Eigen::Index start = 0; start < grad.rows(); start += group) {
            auto g = grad.col(col).segment(start, group);
            auto q = y.col(col).segment(start, group);
            const double dot = q.dot(g);
            g = q.cwiseProduct((g.array() - dot).matrix());
          }
        }
        break;
      }
    }
    auto& lg = result.gradients.layers[idx];
    const Matrix& x = cache.inputs[idx];
    lg.weights.noalias() = grad * x.transpose();
    lg.biases = grad.rowwise().sum();
    if (layer.noise && noisy) {
      lg.noise_weights =
          lg.weights.cwiseProduct(noise->output_noise[idx] * noise->input_noise[idx].transpose());
      lg.noise_biases = lg.biases.cwiseProduct(noise->output_noise[idx]);
    }
    if (noisy && layer.noise)
      grad = effective_weights(layer, noise, idx).transpose() * grad;
    else
      grad = layer.weights.transpose() * grad;
  }
  result.input_gradient = std::move(grad);
  return result;
}

Matrix softmax_over_atoms(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double mx = row.maxCoeff();
    row = (row.array() - mx).exp().matrix();
    row /= row.sum();
  }
  return out;
}

Gradients Gradients::zeros_like(const NetworkParams& params) {
  Gradients g;
  for (const auto& l : params.layers) {
    LayerGradient lg;
    lg.weights = Matrix::Zero(l.weights.rows(), l.weights.cols());
    lg.biases = Vector::Zero(l.biases.size());
    if (l.noise) {
      lg.noise_weights = Matrix::Zero(l.weights.rows(), l.weights.cols());
      lg.noise_biases = Vector::Zero(l.biases.size());
    }
    g.layers.push_back(std::move(lg));
  }
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (other.layers.size() != layers.size()) throw std::invalid_argument("gradient shape mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights += other.layers[i].weights;
    layers[i].biases += other.layers[i].biases;
    if (layers[i].noise_weights.size() > 0) {
      layers[i].noise_weights += other.layers[i].noise_weights;
      layers[i].noise_biases += other.layers[i].noise_biases;
    }
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for (auto& l : layers) {
    l.weights *= s;
    l.biases *= s;
    l.noise_weights *= s;
    l.noise_biases *= s;
  }
  return *this;
}

bool Gradients::all_finite() const {
  for (const auto& l : layers)
    if (!l.weights.allFinite() || !l.biases.allFinite() || !l.noise_weights.allFinite() ||
        !l.noise_biases.allFinite())
      return false;
  return true;
}

double Gradients::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers)
    s += l.weights.squaredNorm() + l.biases.squaredNorm() + l.noise_weights.squaredNorm() +
         l.noise_biases.squaredNorm();
  return s;
}

const NoiseSample* Network::active_noise(NoiseMode mode) const {
  return mode == NoiseMode::Frozen && !noise_.empty() ? &noise_ : nullptr;
}

Matrix Network::forward(const Matrix& input, NoiseMode mode, ForwardCache* cache) const {
  return nn::forward(params_, input, active_noise(mode), cache);
}

Vector Network::forward(const Vector& input, NoiseMode mode) const {
  Matrix in = input;
  return nn::forward(params_, in, active_noise(mode)).col(0);
}

BackwardResult Network::backward(const ForwardCache& cache, const Matrix& upstream) const {
  return nn::backward(params_, cache.noise_applied ? &noise_ : nullptr, cache, upstream);
}

void soft_update(NetworkParams& target, const NetworkParams& online, double tau) {
  if (target.layers.size() != online.layers.size())
    throw std::invalid_argument("soft_update: network shapes differ");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    auto& t = target.layers[i];
    const auto& o = online.layers[i];
    t.weights = tau * o.weights + (1.0 - tau) * t.weights;
    t.biases = tau * o.biases + (1.0 - tau) * t.biases;
    if (t.noise && o.noise) {
      t.noise->weights = tau * o.noise->weights + (1.0 - tau) * t.noise->weights;
      t.noise->biases = tau * o.noise->biases + (1.0 - tau) * t.noise->biases;
    }
  }
}

void save_network(std::ostream& os, const NetworkParams& params) {
  os.precision(17);
  os << "mgrid-network 1\n";
  os << "layers " << params.layers.size() << " input " << params.input_dim() << "\n";
  auto write_matrix = [&os](const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) os << (r || c ? " " : "") << m(r, c);
    os << "\n";
  };
  auto write_vector = [&os](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v(i);
    os << "\n";
  };
  for (const auto& l : params.layers) {
    os << "layer " << l.input_dim() << " " << l.output_dim() << " " << activation_name(l.activation)
       << " " << l.atoms << " " << (l.noise ? 1 : 0) << "\n";
    write_matrix(l.weights);
    write_vector(l.biases);
    if (l.noise) {
      write_matrix(l.noise->weights);
      write_vector(l.noise->biases);
    }
  }
}

NetworkParams load_network(std::istream& is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "mgrid-network" || version != 1)
    throw std::runtime_error("checkpoint: bad header");
  std::string word;
  std::size_t n = 0, input = 0;
  if (!(is >> word >> n) || word != "layers") throw std::runtime_error("checkpoint: bad layer count");
  if (!(is >> word >> input) || word != "input") throw std::runtime_error("checkpoint: bad input size");
  NetworkParams params;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t in = 0, out = 0, atoms = 0;
    int noisy = 0;
    std::string act;
    if (!(is >> word >> in >> out >> act >> atoms >> noisy) || word != "layer")
      throw std::runtime_error("checkpoint: bad layer header");
    LayerParams l;
    l.activation = parse_activation(act);
    l.atoms = atoms;
    auto read_matrix = [&is](Matrix& m, std::size_t rows, std::size_t cols) {
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          if (!(is >> m(r, c))) throw std::runtime_error("checkpoint: truncated weights");
    };
    auto read_vector = [&is](Vector& v, std::size_t size) {
      v.resize(static_cast<Eigen::Index>(size));
      for (Eigen::Index k = 0; k < v.size(); ++k)
        if (!(is >> v(k))) throw std::runtime_error("checkpoint: truncated biases");
    };
    read_matrix(l.weights, out, in);
    read_vector(l.biases, out);
    if (noisy) {
      NoiseScales ns;
      read_matrix(ns.weights, out, in);
      read_vector(ns.biases, out);
      l.noise = std::move(ns);
    }
    params.layers.push_back(std::move(l));
  }
  if (params.input_dim() != input) throw std::runtime_error("checkpoint: input size mismatch");
  params.validate();
  return params;
}

}  // namespace mgrid::nn
