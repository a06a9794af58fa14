#pragma once

#include <Eigen/SparseCore>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pbnrl/pbn.hpp"
#include "pbnrl/state.hpp"

namespace pbnrl {

inline constexpr std::size_t kDefaultExactNodeCap = 16;

/// Row-stochastic 2^N x 2^N matrix, rows and columns indexed by the integer
/// state encoding. Only positive entries are stored.
struct TransitionMatrix {
  std::size_t n_nodes = 0;
  Eigen::SparseMatrix<double, Eigen::RowMajor, std::int64_t> entries;

  std::size_t n_states() const noexcept { return std::size_t{1} << n_nodes; }
  double operator()(std::uint64_t from, std::uint64_t to) const {
    return entries.coeff(static_cast<std::int64_t>(from), static_cast<std::int64_t>(to));
  }
  double row_sum(std::uint64_t from) const;
};

TransitionMatrix build_transition_matrix(const Pbn& pbn, std::size_t max_nodes = kDefaultExactNodeCap);

/// Bottom strongly connected component of the positive-probability
/// transition graph; states are sorted integer encodings.
struct Attractor {
  std::vector<std::uint64_t> states;

  bool is_fixed_point() const noexcept { return states.size() == 1; }
  bool contains(std::uint64_t index) const;
};

struct AttractorSet {
  std::size_t n_nodes = 0;
  std::vector<Attractor> attractors;  // ordered by smallest member
  std::vector<double> occupancy;      // optional, one entry per attractor

  /// Index of the attractor holding `index`, if any.
  std::optional<std::size_t> find(std::uint64_t index) const;
};

AttractorSet find_attractors(const Pbn& pbn, std::size_t max_nodes = kDefaultExactNodeCap);

struct OccupancyEstimate {
  std::size_t runs = 0;
  std::size_t max_steps = 0;
  std::vector<double> fraction;        // per attractor
  std::vector<double> standard_error;  // binomial, per attractor
  double unabsorbed = 0.0;
};

/// Fraction of uniform-random starts absorbed into each attractor within
/// max_steps natural steps.
OccupancyEstimate estimate_attractor_occupancy(const Pbn& pbn, const AttractorSet& attractors,
                                               std::size_t runs, std::size_t max_steps,
                                               std::uint64_t seed, std::size_t threads = 1);

/// Power iteration from the uniform distribution until the L1 change between
/// successive iterates drops below `tol`. Throws NotConverged.
std::vector<double> exact_ssd(const TransitionMatrix& matrix, double tol = 1e-12,
                              std::size_t max_iters = 100000);

/// Chooses a node to flip (1-based, 0 = none) before each natural step.
using Controller = std::function<std::size_t(const NetworkState&)>;
using StatePredicate = std::function<bool(const NetworkState&)>;

struct MonteCarloOptions {
  std::size_t runs = 300;
  std::size_t steps_per_run = 4000;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct StateHistogram {
  std::size_t n_nodes = 0;
  std::size_t samples = 0;
  std::vector<std::pair<NetworkState, double>> distribution;  // sorted by state
  double predicate_mass = 0.0;
  double predicate_mass_se = 0.0;  // across-run standard error
  std::vector<double> run_predicate_mass;

  /// Dense 2^N vector (N <= 24) for comparison with exact_ssd.
  std::vector<double> dense() const;
};

/// Pools visited states over `runs` independent trajectories from uniform
/// random starts. With a controller, each step is intervention then natural
/// evolution; the post-evolution state is counted.
StateHistogram monte_carlo_ssd(const Pbn& pbn, const MonteCarloOptions& options,
                               const Controller& controller = {},
                               const StatePredicate& predicate = {});

double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace pbnrl
