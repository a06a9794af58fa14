#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pbnrl/rng.hpp"
#include "pbnrl/state.hpp"

namespace pbnrl {

struct Experience {
  NetworkState state;
  std::uint32_t action = 0;
  double reward = 0.0;
  NetworkState next_state;
  bool terminal = false;
};

/// Binary tree over `capacity` leaves whose internal nodes hold the sum
/// (and, separately, the max) of their children.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  void set(std::size_t leaf, double value);
  double get(std::size_t leaf) const { return sum_[base_ + leaf]; }
  double total() const { return sum_[1]; }
  double max() const { return max_[1]; }
  std::size_t capacity() const noexcept { return capacity_; }

  /// Leaf i with prefix(i) <= mass < prefix(i) + value(i); never returns a
  /// zero-valued leaf while the total is positive.
  std::size_t find(double mass) const;

 private:
  std::size_t capacity_;
  std::size_t base_;
  std::vector<double> sum_;
  std::vector<double> max_;
};

/// Proportional prioritized replay: P(i) = p_i^omega / sum_z p_z^omega.
///
/// The exponent omega is fixed for the buffer's lifetime because the tree
/// stores p_i^omega. Single-writer.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, double omega);

  /// Stores `e` with priority max_p, evicting the oldest entry when full.
  void add(Experience e);

  struct Batch {
    std::vector<std::size_t> indices;
    std::vector<double> probabilities;  // P(i)
    std::vector<double> raw_weights;    // (|B| P(i))^-beta
    std::vector<double> weights;        // raw / max raw in batch
  };

  /// Stratified proportional draw: [0, total) split into `batch_size`
  /// strata, one draw each. Throws std::logic_error when size() < batch_size.
  Batch sample(std::size_t batch_size, double beta, Rng& rng) const;

  /// p_i <- |delta_i| + c; max_p then becomes the maximum stored priority.
  void update_priorities(const std::vector<std::size_t>& indices, const std::vector<double>& td_errors,
                         double c);

  const Experience& at(std::size_t index) const { return items_[index]; }
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  double omega() const noexcept { return omega_; }
  double max_priority() const noexcept { return max_p_; }
  double priority(std::size_t index) const { return priorities_[index]; }
  double probability(std::size_t index) const;
  /// Sum of p_i^omega over stored entries.
  double total() const { return tree_.total(); }

 private:
  void set_priority(std::size_t index, double p);

  std::size_t capacity_;
  double omega_;
  std::vector<Experience> items_;
  std::vector<double> priorities_;
  SumTree tree_;
  SumTree raw_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  double max_p_ = 1.0;
};

}  // namespace pbnrl
