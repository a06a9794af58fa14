#include "pbnrl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "pbnrl/detail/parallel.hpp"

namespace pbnrl {

namespace {

// Hard ceiling for the dense per-state bookkeeping arrays.
constexpr std::size_t kAbsoluteNodeCap = 30;

void require_exact(const Pbn& pbn, std::size_t max_nodes) {
  const std::size_t cap = std::min(max_nodes, kAbsoluteNodeCap);
  if (pbn.size() > cap) {
    throw StateSpaceTooLarge(pbn.size(), cap);
  }
}

// Enumerates subsets of `mask` in increasing order.
inline std::uint64_t next_submask(std::uint64_t sub, std::uint64_t mask) {
  return ((sub | ~mask) + 1) & mask;
}

}  // namespace

double TransitionMatrix::row_sum(std::uint64_t from) const {
  double sum = 0.0;
  for (decltype(entries)::InnerIterator it(entries, static_cast<std::int64_t>(from)); it; ++it) {
    sum += it.value();
  }
  return sum;
}

TransitionMatrix build_transition_matrix(const Pbn& pbn, std::size_t max_nodes) {
  require_exact(pbn, max_nodes);
  const std::size_t n = pbn.size();
  const auto count = static_cast<std::int64_t>(std::uint64_t{1} << n);

  TransitionMatrix out;
  out.n_nodes = n;
  out.entries.resize(count, count);

  std::vector<double> one(n);
  std::vector<std::size_t> free_nodes;
  for (std::int64_t row = 0; row < count; ++row) {
    const auto index = static_cast<std::uint64_t>(row);
    std::uint64_t fixed = 0;
    std::uint64_t free_mask = 0;
    pbn.successor_support(index, fixed, free_mask);
    free_nodes.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if ((free_mask >> (n - 1 - i)) & 1U) {
        free_nodes.push_back(i);
        one[i] = pbn.next_bit_probability(index, i);
      }
    }
    out.entries.startVec(row);
    std::uint64_t sub = 0;
    while (true) {
      double p = 1.0;
      for (std::size_t i : free_nodes) {
        p *= ((sub >> (n - 1 - i)) & 1U) ? one[i] : 1.0 - one[i];
      }
      out.entries.insertBack(row, static_cast<std::int64_t>(fixed | sub)) = p;
      if (sub == free_mask) {
        break;
      }
      sub = next_submask(sub, free_mask);
    }
  }
  out.entries.finalize();
  return out;
}

bool Attractor::contains(std::uint64_t index) const {
  return std::binary_search(states.begin(), states.end(), index);
}

std::optional<std::size_t> AttractorSet::find(std::uint64_t index) const {
  for (std::size_t a = 0; a < attractors.size(); ++a) {
    if (attractors[a].contains(index)) {
      return a;
    }
  }
  return std::nullopt;
}

AttractorSet find_attractors(const Pbn& pbn, std::size_t max_nodes) {
  require_exact(pbn, max_nodes);
  const std::size_t n = pbn.size();
  const std::uint64_t count = std::uint64_t{1} << n;

  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  enum : std::uint8_t { kOnStack = 1, kHasExit = 2 };

  std::vector<std::uint32_t> order(count, kUnvisited);
  std::vector<std::uint32_t> low(count, 0);
  std::vector<std::uint8_t> flags(count, 0);
  std::vector<std::uint64_t> scc_stack;

  struct Frame {
    std::uint64_t v;
    std::uint64_t fixed;
    std::uint64_t free_mask;
    std::uint64_t sub;
    bool exhausted;
  };
  std::vector<Frame> frames;
  std::uint32_t next_order = 0;

  auto visit = [&](std::uint64_t v) {
    order[v] = low[v] = next_order++;
    flags[v] |= kOnStack;
    scc_stack.push_back(v);
    Frame f{v, 0, 0, 0, false};
    pbn.successor_support(v, f.fixed, f.free_mask);
    frames.push_back(f);
  };

  AttractorSet result;
  result.n_nodes = n;

  // Iterative Tarjan over the implicit support graph: successors of v are
  // fixed | s for every subset s of the free bits.
  for (std::uint64_t root = 0; root < count; ++root) {
    if (order[root] != kUnvisited) {
      continue;
    }
    visit(root);
    while (!frames.empty()) {
      const std::size_t top = frames.size() - 1;
      if (!frames[top].exhausted) {
        Frame& f = frames[top];
        const std::uint64_t w = f.fixed | f.sub;
        if (f.sub == f.free_mask) {
          f.exhausted = true;
        } else {
          f.sub = next_submask(f.sub, f.free_mask);
        }
        const std::uint64_t v = f.v;
        if (order[w] == kUnvisited) {
          visit(w);
        } else if (flags[w] & kOnStack) {
          low[v] = std::min(low[v], order[w]);
        } else {
          flags[v] |= kHasExit;
        }
        continue;
      }

      const std::uint64_t v = frames[top].v;
      frames.pop_back();
      if (low[v] == order[v]) {
        std::vector<std::uint64_t> members;
        bool bottom = true;
        std::uint64_t w = 0;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          flags[w] &= static_cast<std::uint8_t>(~kOnStack);
          bottom = bottom && !(flags[w] & kHasExit);
          members.push_back(w);
        } while (w != v);
        if (bottom) {
          std::sort(members.begin(), members.end());
          result.attractors.push_back({std::move(members)});
        }
      }
      if (!frames.empty()) {
        const std::uint64_t parent = frames.back().v;
        low[parent] = std::min(low[parent], low[v]);
        if (!(flags[v] & kOnStack)) {
          flags[parent] |= kHasExit;  // child closed its own component
        }
      }
    }
  }

  std::sort(result.attractors.begin(), result.attractors.end(),
            [](const Attractor& a, const Attractor& b) { return a.states.front() < b.states.front(); });
  return result;
}

OccupancyEstimate estimate_attractor_occupancy(const Pbn& pbn, const AttractorSet& attractors,
                                               std::size_t runs, std::size_t max_steps,
                                               std::uint64_t seed, std::size_t threads) {
  const std::size_t n = pbn.size();
  if (attractors.n_nodes != n) {
    throw std::invalid_argument("estimate_attractor_occupancy: attractor set is for a different network");
  }
  std::unordered_map<std::uint64_t, std::int32_t> owner;
  for (std::size_t a = 0; a < attractors.attractors.size(); ++a) {
    for (auto s : attractors.attractors[a].states) {
      owner.emplace(s, static_cast<std::int32_t>(a));
    }
  }

  std::vector<std::int32_t> absorbed_into(runs, -1);
  detail::parallel_for(runs, threads, [&](std::size_t run) {
    Rng rng(seed, run);
    NetworkState state = NetworkState::random(n, rng);
    NetworkState next(n);
    for (std::size_t t = 0;; ++t) {
      if (auto it = owner.find(state.to_index()); it != owner.end()) {
        absorbed_into[run] = it->second;
        return;
      }
      if (t == max_steps) {
        return;
      }
      pbn.step_into(state, next, rng);
      std::swap(state, next);
    }
  });

  OccupancyEstimate out;
  out.runs = runs;
  out.max_steps = max_steps;
  std::vector<std::size_t> counts(attractors.attractors.size(), 0);
  std::size_t missed = 0;
  for (auto a : absorbed_into) {
    if (a < 0) {
      ++missed;
    } else {
      ++counts[static_cast<std::size_t>(a)];
    }
  }
  const double total = runs == 0 ? 1.0 : static_cast<double>(runs);
  for (auto c : counts) {
    const double p = static_cast<double>(c) / total;
    out.fraction.push_back(p);
    out.standard_error.push_back(std::sqrt(p * (1.0 - p) / total));
  }
  out.unabsorbed = static_cast<double>(missed) / total;
  return out;
}

std::vector<double> exact_ssd(const TransitionMatrix& matrix, double tol, std::size_t max_iters) {
  const auto count = static_cast<Eigen::Index>(matrix.n_states());
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(count, 1.0 / static_cast<double>(count));
  Eigen::VectorXd next(count);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    next.noalias() = matrix.entries.transpose() * pi;
    residual = (next - pi).lpNorm<1>();
    pi.swap(next);
    if (residual < tol) {
      pi /= pi.sum();
      return {pi.data(), pi.data() + pi.size()};
    }
  }
  throw NotConverged(max_iters, residual);
}

std::vector<double> StateHistogram::dense() const {
  if (n_nodes > 24) {
    throw std::length_error("StateHistogram::dense: more than 24 nodes");
  }
  std::vector<double> out(std::size_t{1} << n_nodes, 0.0);
  for (const auto& [state, p] : distribution) {
    out[state.to_index()] += p;
  }
  return out;
}

StateHistogram monte_carlo_ssd(const Pbn& pbn, const MonteCarloOptions& options,
                               const Controller& controller, const StatePredicate& predicate) {
  if (options.steps_per_run <= options.burn_in) {
    throw std::invalid_argument("monte_carlo_ssd: steps_per_run must exceed burn_in");
  }
  const std::size_t n = pbn.size();

  struct RunResult {
    std::unordered_map<NetworkState, std::uint64_t, NetworkStateHash> visits;
    std::uint64_t hits = 0;
  };
  std::vector<RunResult> per_run(options.runs);

  detail::parallel_for(options.runs, options.threads, [&](std::size_t run) {
    Rng rng(options.seed, run);
    NetworkState state = NetworkState::random(n, rng);
    NetworkState next(n);
    RunResult& out = per_run[run];
    for (std::size_t t = 0; t < options.steps_per_run; ++t) {
      if (controller) {
        if (const std::size_t node = controller(state); node != 0) {
          if (node > n) {
            throw std::out_of_range("monte_carlo_ssd: controller chose node " + std::to_string(node));
          }
          state.flip(node - 1);
        }
      }
      pbn.step_into(state, next, rng);
      std::swap(state, next);
      if (t >= options.burn_in) {
        ++out.visits[state];
        if (predicate && predicate(state)) {
          ++out.hits;
        }
      }
    }
  });

  StateHistogram hist;
  hist.n_nodes = n;
  const std::size_t per_run_samples = options.steps_per_run - options.burn_in;
  hist.samples = per_run_samples * options.runs;

  std::unordered_map<NetworkState, std::uint64_t, NetworkStateHash> pooled;
  std::uint64_t hits = 0;
  for (auto& r : per_run) {
    for (auto& [state, c] : r.visits) {
      pooled[state] += c;
    }
    hits += r.hits;
    hist.run_predicate_mass.push_back(static_cast<double>(r.hits) / static_cast<double>(per_run_samples));
    r.visits.clear();
  }
  const double total = static_cast<double>(std::max<std::size_t>(hist.samples, 1));
  hist.distribution.reserve(pooled.size());
  for (auto& [state, c] : pooled) {
    hist.distribution.emplace_back(state, static_cast<double>(c) / total);
  }
  std::sort(hist.distribution.begin(), hist.distribution.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  hist.predicate_mass = static_cast<double>(hits) / total;
  if (options.runs > 1) {
    double var = 0.0;
    for (double m : hist.run_predicate_mass) {
      var += (m - hist.predicate_mass) * (m - hist.predicate_mass);
    }
    var /= static_cast<double>(options.runs - 1);
    hist.predicate_mass_se = std::sqrt(var / static_cast<double>(options.runs));
  }
  return hist;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("l1_distance: size mismatch");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += std::abs(a[i] - b[i]);
  }
  return d;
}

}  // namespace pbnrl
