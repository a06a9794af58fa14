#include "pbnrl/replay.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pbnrl {

SumTree::SumTree(std::size_t capacity)
    : capacity_(capacity), base_(std::bit_ceil(std::max<std::size_t>(capacity, 1))) {
  if (capacity == 0) {
    throw std::invalid_argument("SumTree: capacity must be positive");
  }
  sum_.assign(2 * base_, 0.0);
  max_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t leaf, double value) {
  std::size_t i = base_ + leaf;
  sum_[i] = value;
  max_[i] = value;
  for (i >>= 1; i >= 1; i >>= 1) {
    sum_[i] = sum_[2 * i] + sum_[2 * i + 1];
    max_[i] = std::max(max_[2 * i], max_[2 * i + 1]);
  }
}

std::size_t SumTree::find(double mass) const {
  std::size_t i = 1;
  while (i < base_) {
    const std::size_t left = 2 * i;
    if ((mass < sum_[left] && sum_[left] > 0.0) || sum_[left + 1] <= 0.0) {
      i = left;
    } else {
      mass -= sum_[left];
      i = left + 1;
    }
  }
  return i - base_;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double omega)
    : capacity_(capacity), omega_(omega), priorities_(capacity, 0.0), tree_(capacity), raw_(capacity) {
  if (!(omega >= 0.0)) {
    throw std::invalid_argument("ReplayBuffer: omega must be non-negative");
  }
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::set_priority(std::size_t index, double p) {
  priorities_[index] = p;
  tree_.set(index, std::pow(p, omega_));
  raw_.set(index, p);
}

void ReplayBuffer::add(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
  } else {
    items_[next_] = std::move(e);
  }
  set_priority(next_, max_p_);
  next_ = (next_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

double ReplayBuffer::probability(std::size_t index) const {
  return tree_.get(index) / tree_.total();
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t batch_size, double beta, Rng& rng) const {
  if (batch_size == 0 || size_ < batch_size) {
    throw std::logic_error("ReplayBuffer::sample: need " + std::to_string(batch_size) +
                           " stored experiences, have " + std::to_string(size_));
  }
  Batch batch;
  batch.indices.resize(batch_size);
  batch.probabilities.resize(batch_size);
  batch.raw_weights.resize(batch_size);
  batch.weights.resize(batch_size);
  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch_size);
  const double n = static_cast<double>(size_);
  double max_w = 0.0;
  for (std::size_t k = 0; k < batch_size; ++k) {
    const double mass = std::min((static_cast<double>(k) + rng.uniform()) * segment, std::nextafter(total, 0.0));
    const std::size_t index = std::min(tree_.find(mass), size_ - 1);
    const double p = tree_.get(index) / total;
    const double w = std::pow(n * p, -beta);
    batch.indices[k] = index;
    batch.probabilities[k] = p;
    batch.raw_weights[k] = w;
    max_w = std::max(max_w, w);
  }
  for (std::size_t k = 0; k < batch_size; ++k) {
    batch.weights[k] = batch.raw_weights[k] / max_w;
  }
  return batch;
}

void ReplayBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                     const std::vector<double>& td_errors, double c) {
  if (indices.size() != td_errors.size()) {
    throw std::invalid_argument("update_priorities: index and error counts differ");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size_) {
      throw std::out_of_range("update_priorities: index " + std::to_string(indices[k]) + " not stored");
    }
    set_priority(indices[k], std::abs(td_errors[k]) + c);
  }
  max_p_ = raw_.max();
}

}  // namespace pbnrl
