#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pbnrl/rng.hpp"

namespace pbnrl {

/// Joint Boolean state of an N-node network.
///
/// Nodes are addressed 0-based through get/set/flip. The integer encoding and
/// the string form both put node 1 first (most significant), so the state
/// "1001001" has index 73 and node 1 set.
class NetworkState {
 public:
  NetworkState() = default;
  explicit NetworkState(std::size_t n_nodes);

  static NetworkState from_index(std::uint64_t index, std::size_t n_nodes);
  static NetworkState from_string(std::string_view bits);
  static NetworkState random(std::size_t n_nodes, Rng& rng);

  std::size_t size() const noexcept { return n_; }

  bool get(std::size_t node) const noexcept {
    return (words_[node >> 6] >> (node & 63)) & 1U;
  }
  void set(std::size_t node, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (node & 63);
    if (value) {
      words_[node >> 6] |= mask;
    } else {
      words_[node >> 6] &= ~mask;
    }
  }
  void flip(std::size_t node) noexcept { words_[node >> 6] ^= std::uint64_t{1} << (node & 63); }

  /// Integer encoding, node 1 most significant. Throws for N > 64.
  std::uint64_t to_index() const;
  std::string to_string() const;
  std::size_t count_ones() const noexcept;

  const std::vector<std::uint64_t>& words() const noexcept { return words_; }

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
  /// Orders like the integer encoding (lexicographic with node 1 first).
  friend std::strong_ordering operator<=>(const NetworkState& a, const NetworkState& b);

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct NetworkStateHash {
  std::size_t operator()(const NetworkState& s) const noexcept;
};

/// Flips node `node` (1-based); node 0 leaves the state unchanged.
/// Throws std::out_of_range when node > N.
NetworkState apply_intervention(const NetworkState& state, std::size_t node);

}  // namespace pbnrl

template <>
struct std::hash<pbnrl::NetworkState> : pbnrl::NetworkStateHash {};
