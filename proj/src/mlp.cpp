#include "pbnrl/mlp.hpp"

#include <cmath>

namespace pbnrl {

std::vector<std::size_t> MlpSpec::widths() const {
  std::vector<std::size_t> w{input_size};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(output_size);
  return w;
}

void MlpSpec::validate() const {
  for (auto w : widths()) {
    if (w < 1) {
      throw std::invalid_argument("MlpSpec: every layer width must be at least 1");
    }
  }
}

template <class S>
std::size_t MlpParams<S>::parameter_count() const {
  std::size_t count = 0;
  for (const auto& l : layers) {
    count += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  }
  return count;
}

template <class S>
bool MlpParams<S>::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) {
      return false;
    }
  }
  return true;
}

template <class S>
void MlpParams<S>::set_zero() {
  for (auto& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

template <class S>
MlpParams<S> MlpParams<S>::zeros_like() const {
  MlpParams out = *this;
  out.set_zero();
  return out;
}

template <class S>
MlpParams<S> init_params(const MlpSpec& spec, Rng& rng) {
  spec.validate();
  MlpParams<S> params;
  params.spec = spec;
  const auto widths = spec.widths();
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto fan_in = static_cast<Eigen::Index>(widths[l]);
    const auto fan_out = static_cast<Eigen::Index>(widths[l + 1]);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer<S> layer{Matrix<S>(fan_out, fan_in), Vector<S>::Zero(fan_out)};
    // Column-major fill order is part of the reproducibility contract.
    for (Eigen::Index c = 0; c < fan_in; ++c) {
      for (Eigen::Index r = 0; r < fan_out; ++r) {
        layer.weight(r, c) = static_cast<S>((2.0 * rng.uniform() - 1.0) * bound);
      }
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

template <class S>
Vector<S> forward(const MlpParams<S>& params, const Vector<S>& input) {
  if (input.size() != static_cast<Eigen::Index>(params.spec.input_size)) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.size()) +
                                " entries, network expects " + std::to_string(params.spec.input_size));
  }
  Vector<S> a = input;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Vector<S> z = params.layers[l].weight * a + params.layers[l].bias;
    if (l + 1 < params.layers.size()) {
      z = z.cwiseMax(S(0));
    }
    a.swap(z);
  }
  return a;
}

template <class S>
const Matrix<S>& forward_batch(const MlpParams<S>& params, const Matrix<S>& inputs,
                               ForwardCache<S>& cache) {
  if (inputs.rows() != static_cast<Eigen::Index>(params.spec.input_size)) {
    throw std::invalid_argument("forward_batch: inputs have " + std::to_string(inputs.rows()) +
                                " rows, network expects " + std::to_string(params.spec.input_size));
  }
  const std::size_t depth = params.layers.size();
  cache.activations.resize(depth + 1);
  cache.activations[0] = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = params.layers[l];
    Matrix<S>& out = cache.activations[l + 1];
    out.resize(layer.weight.rows(), inputs.cols());
    out.noalias() = layer.weight * cache.activations[l];
    out.colwise() += layer.bias;
    if (l + 1 < depth) {
      out = out.cwiseMax(S(0));
    }
  }
  return cache.activations.back();
}

template <class S>
void backward(const MlpParams<S>& params, ForwardCache<S>& cache, const Matrix<S>& output_grad,
              MlpParams<S>& grads) {
  const std::size_t depth = params.layers.size();
  if (cache.activations.size() != depth + 1) {
    throw std::invalid_argument("backward: forward cache does not match the network");
  }
  if (output_grad.rows() != cache.activations.back().rows() ||
      output_grad.cols() != cache.activations.back().cols()) {
    throw std::invalid_argument("backward: output gradient shape mismatch");
  }
  if (grads.layers.size() != depth) {
    grads = params.zeros_like();
  }
  cache.deltas.resize(depth);
  cache.deltas[depth - 1] = output_grad;
  for (std::size_t l = depth; l-- > 0;) {
    const Matrix<S>& delta = cache.deltas[l];
    const Matrix<S>& a_in = cache.activations[l];
    grads.layers[l].weight.noalias() = delta * a_in.transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Matrix<S>& prev = cache.deltas[l - 1];
      prev.resize(a_in.rows(), a_in.cols());
      prev.noalias() = params.layers[l].weight.transpose() * delta;
      // Rectifier gate: a_in > 0 exactly where its pre-activation was positive.
      prev = (a_in.array() > S(0)).select(prev, S(0));
    }
  }
}

HuberLoss huber_loss(double pred, double target, double delta) {
  const double e = pred - target;
  if (std::abs(e) <= delta) {
    return {0.5 * e * e, e};
  }
  return {delta * (std::abs(e) - 0.5 * delta), e > 0 ? delta : -delta};
}

template <class S>
AdamState<S> make_adam(const MlpParams<S>& params, double learning_rate) {
  AdamState<S> adam;
  adam.learning_rate = learning_rate;
  adam.first_moment = params.zeros_like();
  adam.second_moment = params.zeros_like();
  return adam;
}

template <class S>
void adam_step(MlpParams<S>& params, const MlpParams<S>& grads, AdamState<S>& adam) {
  if (grads.layers.size() != params.layers.size()) {
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  }
  if (!grads.all_finite()) {
    throw Diverged("adam_step: diverged (non-finite gradient)");
  }
  if (adam.first_moment.layers.size() != params.layers.size()) {
    adam.first_moment = params.zeros_like();
    adam.second_moment = params.zeros_like();
  }
  ++adam.step;
  const double t = static_cast<double>(adam.step);
  const S b1 = static_cast<S>(adam.beta1);
  const S b2 = static_cast<S>(adam.beta2);
  const S step_size = static_cast<S>(adam.learning_rate / (1.0 - std::pow(adam.beta1, t)));
  const S v_correction = static_cast<S>(1.0 / (1.0 - std::pow(adam.beta2, t)));
  const S eps = static_cast<S>(adam.epsilon);

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m.array() = b1 * m.array() + (S(1) - b1) * g.array();
    v.array() = b2 * v.array() + (S(1) - b2) * g.array().square();
    theta.array() -= step_size * m.array() / ((v.array() * v_correction).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    update(params.layers[l].weight, grads.layers[l].weight, adam.first_moment.layers[l].weight,
           adam.second_moment.layers[l].weight);
    update(params.layers[l].bias, grads.layers[l].bias, adam.first_moment.layers[l].bias,
           adam.second_moment.layers[l].bias);
  }
}

template struct MlpParams<float>;
template struct MlpParams<double>;
template MlpParams<float> init_params<float>(const MlpSpec&, Rng&);
template MlpParams<double> init_params<double>(const MlpSpec&, Rng&);
template Vector<float> forward<float>(const MlpParams<float>&, const Vector<float>&);
template Vector<double> forward<double>(const MlpParams<double>&, const Vector<double>&);
template const Matrix<float>& forward_batch<float>(const MlpParams<float>&, const Matrix<float>&,
                                                   ForwardCache<float>&);
template const Matrix<double>& forward_batch<double>(const MlpParams<double>&, const Matrix<double>&,
                                                     ForwardCache<double>&);
template void backward<float>(const MlpParams<float>&, ForwardCache<float>&, const Matrix<float>&,
                              MlpParams<float>&);
template void backward<double>(const MlpParams<double>&, ForwardCache<double>&,
                               const Matrix<double>&, MlpParams<double>&);
template AdamState<float> make_adam<float>(const MlpParams<float>&, double);
template AdamState<double> make_adam<double>(const MlpParams<double>&, double);
template void adam_step<float>(MlpParams<float>&, const MlpParams<float>&, AdamState<float>&);
template void adam_step<double>(MlpParams<double>&, const MlpParams<double>&, AdamState<double>&);

}  // namespace pbnrl
