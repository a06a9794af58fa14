#include "pbnrl/state.hpp"

#include <bit>
#include <stdexcept>

namespace pbnrl {

NetworkState::NetworkState(std::size_t n_nodes) : n_(n_nodes), words_((n_nodes + 63) / 64, 0) {}

NetworkState NetworkState::from_index(std::uint64_t index, std::size_t n_nodes) {
  if (n_nodes > 64) {
    throw std::invalid_argument("NetworkState::from_index: integer encoding needs N <= 64");
  }
  if (n_nodes < 64 && (index >> n_nodes) != 0) {
    throw std::out_of_range("NetworkState::from_index: index " + std::to_string(index) +
                            " does not fit in " + std::to_string(n_nodes) + " nodes");
  }
  NetworkState s(n_nodes);
  for (std::size_t node = 0; node < n_nodes; ++node) {
    s.set(node, (index >> (n_nodes - 1 - node)) & 1U);
  }
  return s;
}

NetworkState NetworkState::from_string(std::string_view bits) {
  NetworkState s(bits.size());
  for (std::size_t node = 0; node < bits.size(); ++node) {
    if (bits[node] == '1') {
      s.set(node, true);
    } else if (bits[node] != '0') {
      throw std::invalid_argument("NetworkState::from_string: expected only '0'/'1' in \"" +
                                  std::string(bits) + "\"");
    }
  }
  return s;
}

NetworkState NetworkState::random(std::size_t n_nodes, Rng& rng) {
  NetworkState s(n_nodes);
  for (auto& w : s.words_) {
    w = rng.next();
  }
  if (const std::size_t tail = n_nodes & 63; tail != 0) {
    s.words_.back() &= (std::uint64_t{1} << tail) - 1;
  }
  return s;
}

std::uint64_t NetworkState::to_index() const {
  if (n_ > 64) {
    throw std::logic_error("NetworkState::to_index: integer encoding needs N <= 64");
  }
  std::uint64_t index = 0;
  for (std::size_t node = 0; node < n_; ++node) {
    index = (index << 1) | (get(node) ? 1U : 0U);
  }
  return index;
}

std::string NetworkState::to_string() const {
  std::string out(n_, '0');
  for (std::size_t node = 0; node < n_; ++node) {
    if (get(node)) {
      out[node] = '1';
    }
  }
  return out;
}

std::size_t NetworkState::count_ones() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) {
    total += static_cast<std::size_t>(std::popcount(w));
  }
  return total;
}

std::strong_ordering operator<=>(const NetworkState& a, const NetworkState& b) {
  if (a.n_ != b.n_) {
    return a.n_ <=> b.n_;
  }
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff != 0) {
      // Lowest differing bit is the earliest (most significant) node.
      const std::uint64_t first = diff & (~diff + 1);
      return (a.words_[w] & first) != 0 ? std::strong_ordering::greater : std::strong_ordering::less;
    }
  }
  return std::strong_ordering::equal;
}

std::size_t NetworkStateHash::operator()(const NetworkState& s) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ s.size();
  for (auto w : s.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

NetworkState apply_intervention(const NetworkState& state, std::size_t node) {
  if (node > state.size()) {
    throw std::out_of_range("apply_intervention: node " + std::to_string(node) + " exceeds N = " +
                            std::to_string(state.size()));
  }
  NetworkState out = state;
  if (node != 0) {
    out.flip(node - 1);
  }
  return out;
}

}  // namespace pbnrl
