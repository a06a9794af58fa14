#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbnrl/rng.hpp"

namespace pbnrl {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Layer widths of a rectifier MLP with a linear output layer.
struct MlpSpec {
  std::size_t input_size = 0;
  std::vector<std::size_t> hidden{64, 64};
  std::size_t output_size = 0;

  std::vector<std::size_t> widths() const;
  void validate() const;  // throws std::invalid_argument

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

template <class S>
struct DenseLayer {
  Matrix<S> weight;  // out x in
  Vector<S> bias;    // out
};

/// Parameters theta. Plain value type: copying gives an independent duplicate.
template <class S>
struct MlpParams {
  MlpSpec spec;
  std::vector<DenseLayer<S>> layers;

  std::size_t parameter_count() const;
  bool all_finite() const;
  void set_zero();
  /// Same shapes, all zeros.
  MlpParams zeros_like() const;

  template <class T>
  MlpParams<T> cast() const {
    MlpParams<T> out;
    out.spec = spec;
    for (const auto& l : layers) {
      out.layers.push_back({l.weight.template cast<T>(), l.bias.template cast<T>()});
    }
    return out;
  }

  friend bool operator==(const MlpParams& a, const MlpParams& b) {
    if (!(a.spec == b.spec) || a.layers.size() != b.layers.size()) {
      return false;
    }
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
      if (a.layers[i].weight != b.layers[i].weight || a.layers[i].bias != b.layers[i].bias) {
        return false;
      }
    }
    return true;
  }
};

/// Fan-in scaled symmetric uniform weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// zero biases.
template <class S>
MlpParams<S> init_params(const MlpSpec& spec, Rng& rng);

template <class S>
MlpParams<S> copy_params(const MlpParams<S>& src) {
  return src;
}

/// Activations of every layer for a batch (column per sample).
/// activations[0] is the input, activations.back() the output.
template <class S>
struct ForwardCache {
  std::vector<Matrix<S>> activations;
  std::vector<Matrix<S>> deltas;  // backward scratch
};

template <class S>
Vector<S> forward(const MlpParams<S>& params, const Vector<S>& input);

/// Batch forward; inputs are input_size x B. Output ends up in
/// cache.activations.back().
template <class S>
const Matrix<S>& forward_batch(const MlpParams<S>& params, const Matrix<S>& inputs,
                               ForwardCache<S>& cache);

/// Reverse-mode gradient of sum_b <output_grad[:, b], output[:, b]> with
/// respect to every parameter, written into `grads` (resized as needed).
template <class S>
void backward(const MlpParams<S>& params, ForwardCache<S>& cache, const Matrix<S>& output_grad,
              MlpParams<S>& grads);

struct HuberLoss {
  double loss = 0.0;
  double grad = 0.0;  // d loss / d pred
};

/// Quadratic for |pred - target| <= delta, linear beyond.
HuberLoss huber_loss(double pred, double target, double delta = 1.0);

template <class S>
struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step = 0;
  MlpParams<S> first_moment;
  MlpParams<S> second_moment;
};

template <class S>
AdamState<S> make_adam(const MlpParams<S>& params, double learning_rate);

class Diverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bias-corrected Adam update. Throws Diverged on non-finite gradients.
template <class S>
void adam_step(MlpParams<S>& params, const MlpParams<S>& grads, AdamState<S>& adam);

extern template struct MlpParams<float>;
extern template struct MlpParams<double>;
extern template MlpParams<float> init_params<float>(const MlpSpec&, Rng&);
extern template MlpParams<double> init_params<double>(const MlpSpec&, Rng&);
extern template Vector<float> forward<float>(const MlpParams<float>&, const Vector<float>&);
extern template Vector<double> forward<double>(const MlpParams<double>&, const Vector<double>&);
extern template const Matrix<float>& forward_batch<float>(const MlpParams<float>&, const Matrix<float>&,
                                                          ForwardCache<float>&);
extern template const Matrix<double>& forward_batch<double>(const MlpParams<double>&,
                                                            const Matrix<double>&,
                                                            ForwardCache<double>&);
extern template void backward<float>(const MlpParams<float>&, ForwardCache<float>&,
                                     const Matrix<float>&, MlpParams<float>&);
extern template void backward<double>(const MlpParams<double>&, ForwardCache<double>&,
                                      const Matrix<double>&, MlpParams<double>&);
extern template AdamState<float> make_adam<float>(const MlpParams<float>&, double);
extern template AdamState<double> make_adam<double>(const MlpParams<double>&, double);
extern template void adam_step<float>(MlpParams<float>&, const MlpParams<float>&, AdamState<float>&);
extern template void adam_step<double>(MlpParams<double>&, const MlpParams<double>&,
                                       AdamState<double>&);

}  // namespace pbnrl
