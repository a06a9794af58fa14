#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pbnrl/analysis.hpp"
#include "pbnrl/errors.hpp"
#include "pbnrl/fixtures.hpp"
#include "pbnrl/pbn.hpp"
#include "pbnrl/state.hpp"
#include "support.hpp"

using namespace pbnrl;

TEST_CASE("state encoding puts node 1 in the most significant bit") {
  const auto s = NetworkState::from_string("1001001");
  CHECK(s.to_index() == 73);
  CHECK(s.get(0));
  CHECK_FALSE(s.get(1));
  CHECK(NetworkState::from_index(73, 7) == s);
  CHECK(NetworkState::from_index(512, 10).to_string() == "1000000000");
  CHECK(apply_intervention(s, 2).to_string() == "1101001");
  CHECK(apply_intervention(s, 0) == s);
  CHECK(NetworkState::from_string("0110") < NetworkState::from_string("1000"));
}

TEST_CASE("wide states round-trip through strings") {
  Rng rng(3);
  const auto s = NetworkState::random(200, rng);
  CHECK(s.size() == 200);
  CHECK(NetworkState::from_string(s.to_string()) == s);
  CHECK_THROWS(s.to_index());
}

TEST_CASE("gate tables follow the first-input-MSB convention") {
  CHECK(truth_table(2, [](const std::vector<bool>& x) { return x[0] || x[1]; }) == kOr);
  CHECK(truth_table(2, [](const std::vector<bool>& x) { return x[0] && x[1]; }) == kAnd);
  CHECK(truth_table(2, [](const std::vector<bool>& x) { return x[0] != x[1]; }) == kXor);
  CHECK(truth_table(2, [](const std::vector<bool>& x) { return x[0]; }) == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("validate_model reports broken invariants") {
  PbnModel m = fixture_n10();
  CHECK(validate_model(m).empty());
  CHECK(realization_count(m) == "1296");

  PbnModel bad = m;
  bad.nodes[3].functions[0].probability += 0.2;
  auto v = validate_model(bad);
  REQUIRE(v.size() == 1);
  CHECK(v[0].node == 4);
  CHECK_THROWS_AS(Pbn{bad}, InvalidModel);

  bad = m;
  bad.nodes[0].inputs.push_back(42);
  CHECK_FALSE(validate_model(bad).empty());

  bad = m;
  bad.nodes[1].functions[0].table.pop_back();
  CHECK_FALSE(validate_model(bad).empty());

  bad = m;
  bad.nodes[2].functions[0].table[0] = 2;
  CHECK_FALSE(validate_model(bad).empty());
}

TEST_CASE("transition probabilities match realization enumeration") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const PbnModel m = test::random_model(n, rng);
    const Pbn pbn(m);
    const std::uint64_t states = std::uint64_t{1} << n;
    for (std::uint64_t a = 0; a < states; ++a) {
      double row = 0.0;
      for (std::uint64_t b = 0; b < states; ++b) {
        const double p = pbn.transition_probability(NetworkState::from_index(a, n), NetworkState::from_index(b, n));
        CHECK(std::abs(p - test::brute_force_probability(m, a, b)) <= 1e-12);
        row += p;
      }
      CHECK(std::abs(row - 1.0) <= 1e-9);
    }
    const TransitionMatrix tm = build_transition_matrix(pbn);
    for (std::uint64_t a = 0; a < states; ++a) {
      CHECK(std::abs(tm.row_sum(a) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("successor support covers exactly the reachable states") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(5);
    const Pbn pbn(test::random_model(n, rng));
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
      std::uint64_t fixed = 0;
      std::uint64_t free_mask = 0;
      pbn.successor_support(a, fixed, free_mask);
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
        const bool in_support = (b & ~free_mask) == fixed;
        const double p = pbn.transition_probability(NetworkState::from_index(a, n), NetworkState::from_index(b, n));
        CHECK(in_support == (p > 0.0));
      }
    }
  }
}

TEST_CASE("simulation is deterministic for a seed and matches the transition law") {
  const Pbn pbn(fixture_n10());
  const auto start = NetworkState::from_string("1011001110");
  Rng a(5);
  Rng b(5);
  NetworkState x = start;
  NetworkState y = start;
  for (int t = 0; t < 200; ++t) {
    x = pbn.step(x, a);
    y = pbn.step(y, b);
    REQUIRE(x == y);
  }

  Rng rng(11);
  std::map<std::uint64_t, int> counts;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++counts[pbn.step(start, rng).to_index()];
  double chi2 = 0.0;
  std::size_t cells = 0;
  for (std::uint64_t b = 0; b < 1024; ++b) {
    const double p = pbn.transition_probability(start, NetworkState::from_index(b, 10));
    if (p == 0.0) {
      CHECK(counts.count(b) == 0);
      continue;
    }
    const double expected = p * draws;
    const double observed = counts.count(b) ? counts[b] : 0;
    chi2 += (observed - expected) * (observed - expected) / expected;
    ++cells;
  }
  // 99.9% quantile of chi-square is below dof + 4.5 sqrt(dof) for these sizes
  CHECK(chi2 < static_cast<double>(cells - 1) + 4.5 * std::sqrt(2.0 * static_cast<double>(cells - 1)) + 10);
}

TEST_CASE("next-bit probabilities agree with the transition law") {
  Rng rng(9);
  const PbnModel m = test::random_model(5, rng);
  const Pbn pbn(m);
  for (std::uint64_t a = 0; a < 32; ++a) {
    const auto s = NetworkState::from_index(a, 5);
    const auto probs = pbn.next_bit_probabilities(s);
    for (std::size_t i = 0; i < 5; ++i) {
      double marginal = 0.0;
      for (std::uint64_t b = 0; b < 32; ++b) {
        if ((b >> (4 - i)) & 1U) marginal += pbn.transition_probability(s, NetworkState::from_index(b, 5));
      }
      CHECK(probs[i] == doctest::Approx(marginal).epsilon(1e-12));
      CHECK(pbn.next_bit_probability(a, i) == doctest::Approx(marginal).epsilon(1e-12));
    }
  }
}

namespace {

bool closed(const Pbn& pbn, const std::set<std::uint64_t>& set) {
  const std::size_t n = pbn.size();
  for (std::uint64_t a : set) {
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
      if (pbn.transition_probability(NetworkState::from_index(a, n), NetworkState::from_index(b, n)) > 0.0 &&
          !set.count(b)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("attractors are closed and minimal") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    const Pbn pbn(test::random_model(n, rng));
    const AttractorSet set = find_attractors(pbn);
    REQUIRE_FALSE(set.attractors.empty());
    for (const auto& a : set.attractors) {
      std::set<std::uint64_t> members(a.states.begin(), a.states.end());
      CHECK(closed(pbn, members));
      if (members.size() <= 10) {
        // every proper nonempty subset must leak
        const std::vector<std::uint64_t> v(members.begin(), members.end());
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << v.size()); ++mask) {
          std::set<std::uint64_t> sub;
          for (std::size_t j = 0; j < v.size(); ++j) {
            if ((mask >> j) & 1U) sub.insert(v[j]);
          }
          CHECK_FALSE(closed(pbn, sub));
        }
      }
    }
  }
}

TEST_CASE("identity node has both fixed points") {
  PbnModel m{"identity", 1, {NodeSpec{{0}, {BooleanFunction{{0, 1}, 1.0}}, {}}}};
  const AttractorSet set = find_attractors(Pbn(m));
  REQUIRE(set.attractors.size() == 2);
  CHECK(set.attractors[0].states == std::vector<std::uint64_t>{0});
  CHECK(set.attractors[1].states == std::vector<std::uint64_t>{1});
}

TEST_CASE("ten-node fixture attractors") {
  const Pbn pbn(fixture_n10());
  const AttractorSet set = find_attractors(pbn);
  REQUIRE(set.attractors.size() == 3);
  CHECK(set.attractors[0].states == std::vector<std::uint64_t>{0});
  CHECK(set.attractors[1].states == std::vector<std::uint64_t>{512});
  CHECK(set.attractors[2].states.size() == 256);
  CHECK(set.find(0) == 0);
  CHECK(set.find(512) == 1);
}

TEST_CASE("twenty-node fixture contains the all-zeros attractor") {
  const Pbn pbn(fixture_n20());
  const AttractorSet set = find_attractors(pbn, 20);
  REQUIRE_FALSE(set.attractors.empty());
  CHECK(set.attractors[0].states == std::vector<std::uint64_t>{0});
  CHECK_THROWS_AS(build_transition_matrix(pbn), StateSpaceTooLarge);
}

TEST_CASE("occupancy estimates sum to one and are thread independent") {
  const Pbn pbn(fixture_n10());
  const AttractorSet set = find_attractors(pbn);
  const auto one = estimate_attractor_occupancy(pbn, set, 4000, 10000, 8, 1);
  const auto four = estimate_attractor_occupancy(pbn, set, 4000, 10000, 8, 4);
  CHECK(one.fraction == four.fraction);
  double total = one.unabsorbed;
  for (double f : one.fraction) total += f;
  CHECK(total == doctest::Approx(1.0));
  // exact absorption probabilities from an independent linear solve: 0.0087, 0.0087, 0.9826
  CHECK(std::abs(one.fraction[0] - 0.0087) < 4 * one.standard_error[0] + 1e-3);
  CHECK(std::abs(one.fraction[2] - 0.9826) < 4 * one.standard_error[2] + 1e-3);
}

TEST_CASE("exact steady state is stationary and matches Monte-Carlo") {
  Rng rng(123);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 3 + rng.below(4);
    PbnModel m = test::random_model(n, rng);
    // perturbation-free random nets may be reducible; mix in a noisy node table
    for (auto& node : m.nodes) {
      if (node.functions.empty()) continue;
      node = to_stochastic_table(node);
      for (double& p : node.stochastic_table) p = 0.05 + 0.9 * p;
    }
    const Pbn pbn(m);
    const TransitionMatrix tm = build_transition_matrix(pbn);
    const std::vector<double> pi = exact_ssd(tm);
    double sum = 0.0;
    for (double p : pi) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (std::uint64_t b = 0; b < tm.n_states(); ++b) {
      double flow = 0.0;
      for (std::uint64_t a = 0; a < tm.n_states(); ++a) flow += pi[a] * tm(a, b);
      CHECK(flow == doctest::Approx(pi[b]).epsilon(1e-9));
    }
    MonteCarloOptions mc;
    mc.runs = 250;
    mc.steps_per_run = 4000;
    mc.seed = 1;
    mc.threads = 4;
    const StateHistogram hist = monte_carlo_ssd(pbn, mc);
    CHECK(hist.samples == 1000000);
    CHECK(l1_distance(hist.dense(), pi) <= 0.02);
  }
}

TEST_CASE("Monte-Carlo histogram is independent of the thread count") {
  const Pbn pbn(fixture_n10());
  MonteCarloOptions mc;
  mc.runs = 16;
  mc.steps_per_run = 500;
  mc.seed = 4;
  mc.threads = 1;
  const auto a = monte_carlo_ssd(pbn, mc);
  mc.threads = 3;
  const auto b = monte_carlo_ssd(pbn, mc);
  CHECK(a.distribution == b.distribution);
  CHECK(a.samples == 16 * 500);
}
