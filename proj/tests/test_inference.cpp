#include <doctest.h>

#include <cmath>
#include <set>

#include "pbnrl/fixtures.hpp"
#include "pbnrl/inference.hpp"
#include "pbnrl/pbn.hpp"

using namespace pbnrl;

namespace {

BitMatrix random_bits(Eigen::Index genes, Eigen::Index samples, Rng& rng) {
  BitMatrix bits(genes, samples);
  for (Eigen::Index s = 0; s < samples; ++s) {
    for (Eigen::Index g = 0; g < genes; ++g) bits(g, s) = static_cast<std::uint8_t>(rng.below(2));
  }
  return bits;
}

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("g" + std::to_string(i + 1));
  return out;
}

struct Transitions {
  BinaryMatrix before;
  BinaryMatrix after;
};

Transitions sample_transitions(const Pbn& pbn, std::size_t count, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(pbn.size());
  BitMatrix before(n, static_cast<Eigen::Index>(count));
  BitMatrix after(n, static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    const NetworkState s = NetworkState::random(pbn.size(), rng);
    const NetworkState t = pbn.step(s, rng);
    for (Eigen::Index g = 0; g < n; ++g) {
      before(g, static_cast<Eigen::Index>(k)) = s.get(static_cast<std::size_t>(g));
      after(g, static_cast<Eigen::Index>(k)) = t.get(static_cast<std::size_t>(g));
    }
  }
  return {binary_matrix(names(pbn.size()), before), binary_matrix(names(pbn.size()), after)};
}

double total_variation(const Pbn& a, const Pbn& b, const NetworkState& s) {
  const std::size_t n = a.size();
  double tv = 0.0;
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << n); ++t) {
    const auto next = NetworkState::from_index(t, n);
    tv += std::abs(a.transition_probability(s, next) - b.transition_probability(s, next));
  }
  return tv / 2;
}

}  // namespace

TEST_CASE("binarize splits two clusters at the centroid midpoint") {
  ExpressionMatrix data{{"a", "c"}, Eigen::MatrixXd(2, 4)};
  data.values << 1, 1, 9, 9, 3, 3, 3, 3;
  const BinaryMatrix bin = binarize(data);
  CHECK(bin.thresholds[0] == 5.0);
  CHECK(bin.bits.row(0).cast<int>() == Eigen::RowVector4i(0, 0, 1, 1));
  CHECK_FALSE(bin.constant[0]);
  CHECK(bin.constant[1]);
  CHECK(bin.bits.row(1).cast<int>().sum() == 0);
}

TEST_CASE("binarize recovers well-separated labels") {
  Rng rng(1);
  const Eigen::Index samples = 2000;
  ExpressionMatrix data{{"x"}, Eigen::MatrixXd(1, samples)};
  std::vector<int> labels;
  for (Eigen::Index s = 0; s < samples; ++s) {
    const int label = static_cast<int>(rng.below(2));
    labels.push_back(label);
    data.values(0, s) = (label ? 6.0 : 2.0) + 0.6 * rng.normal();
  }
  const BinaryMatrix bin = binarize(data);
  int agree = 0;
  for (Eigen::Index s = 0; s < samples; ++s) agree += bin.bits(0, s) == labels[static_cast<std::size_t>(s)] ? 1 : 0;
  CHECK(agree >= 0.95 * samples);
}

TEST_CASE("COD of a perfect single predictor is one") {
  Rng rng(2);
  BitMatrix bits = random_bits(3, 200, rng);
  bits.row(0) = bits.row(2);
  for (CodError e : {CodError::squared, CodError::misclassification}) {
    const CodReport r = cod_score(binary_matrix(names(3), bits), 0, {}, 2, e);
    CHECK(r.baseline_error > 0.0);
    CHECK(std::abs(r.augmented_error) <= 1e-12);
    CHECK(r.cod == doctest::Approx(1.0).epsilon(1e-9));
  }
  const CodReport m = cod_score(binary_matrix(names(3), bits), 0, {}, 2, CodError::misclassification);
  const double ones = bits.row(0).cast<double>().mean();
  CHECK(m.baseline_error == doctest::Approx(std::min(ones, 1 - ones)));
}

TEST_CASE("COD of an independent gene is near zero") {
  Rng rng(3);
  const BitMatrix bits = random_bits(2, 5000, rng);
  const CodReport r = cod_score(binary_matrix(names(2), bits), 0, {}, 1);
  CHECK(std::abs(r.cod) <= 0.1);
}

TEST_CASE("a single XOR input carries no linear information under either error") {
  BitMatrix bits(3, 400);
  for (Eigen::Index s = 0; s < 400; ++s) {
    const int x1 = static_cast<int>(s % 2);
    const int x2 = static_cast<int>((s / 2) % 2);
    bits(0, s) = static_cast<std::uint8_t>(x1 ^ x2);
    bits(1, s) = static_cast<std::uint8_t>(x1);
    bits(2, s) = static_cast<std::uint8_t>(x2);
  }
  CHECK(std::abs(cod_score(binary_matrix(names(3), bits), 0, {}, 1).cod) <= 1e-12);
  CHECK(std::abs(cod_score(binary_matrix(names(3), bits), 0, {}, 1, CodError::misclassification).cod) <= 1e-12);
}

TEST_CASE("a perfect baseline is flagged") {
  Rng rng(4);
  BitMatrix bits = random_bits(3, 100, rng);
  bits.row(0) = bits.row(1);
  const CodReport r = cod_score(binary_matrix(names(3), bits), 0, {1}, 2);
  CHECK(r.baseline_perfect);
  CHECK(r.cod == 0.0);
}

TEST_CASE("COD bounds on training data") {
  Rng rng(5);
  int negative = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const BitMatrix bits = random_bits(4, 60, rng);
    const std::size_t candidate = 2 + rng.below(2);
    const CodReport sq = cod_score(binary_matrix(names(4), bits), 0, {1}, candidate);
    CHECK(sq.cod <= 1.0);
    CHECK(sq.cod >= -1e-9);
    const CodReport mis = cod_score(binary_matrix(names(4), bits), 0, {1}, candidate, CodError::misclassification);
    CHECK(mis.cod <= 1.0);
    negative += mis.cod < 0.0 ? 1 : 0;
  }
  MESSAGE("negative misclassification COD in " << negative << " of 200 random cases");
}

TEST_CASE("greedy selection finds the inputs of a noisy OR") {
  Rng rng(6);
  BitMatrix bits = random_bits(20, 200, rng);
  for (Eigen::Index s = 0; s < 200; ++s) {
    bool y = bits(3, s) || bits(7, s);
    if (rng.uniform() < 0.05) y = !y;
    bits(0, s) = y;
  }
  for (CodError e : {CodError::squared, CodError::misclassification}) {
    const auto inputs = select_inputs(binary_matrix(names(20), bits), 0, 3, 0.05, e);
    CHECK(std::set<std::size_t>(inputs.begin(), inputs.end()) == std::set<std::size_t>{3, 7});
  }
  CHECK_THROWS_AS(select_inputs(binary_matrix(names(20), bits), 0, 0, 0.05), std::invalid_argument);
}

TEST_CASE("selection stops when no candidate helps") {
  Rng rng(7);
  const BitMatrix bits = random_bits(6, 3000, rng);
  CHECK(select_inputs(binary_matrix(names(6), bits), 0, 3, 0.05).empty());
  CHECK(select_inputs(binary_matrix(names(6), bits), 0, 3, 0.05, CodError::misclassification).empty());
}

TEST_CASE("lookup table estimates are count ratios") {
  BitMatrix bits(2, 14);
  // input 0 for ten samples (seven with y = 1), input 1 for four samples (all y = 0)
  for (Eigen::Index s = 0; s < 14; ++s) {
    bits(1, s) = s >= 10;
    bits(0, s) = s < 7;
  }
  const BinaryMatrix bin = binary_matrix(names(2), bits);
  const LutEstimate lut = estimate_lut(bin, 0, {1});
  CHECK(lut.probabilities[0] == doctest::Approx(0.7));
  CHECK(lut.probabilities[1] == 0.0);
  CHECK(lut.counts == std::vector<std::size_t>{10, 4});
  const LutEstimate smooth = estimate_lut(bin, 0, {1}, 1.0);
  CHECK(smooth.probabilities[0] == doctest::Approx(8.0 / 12.0));

  BitMatrix sparse(3, 4);
  sparse << 1, 0, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0;
  const LutEstimate partial = estimate_lut(binary_matrix(names(3), sparse), 0, {1, 2});
  CHECK(partial.unobserved == std::vector<bool>{false, true, false, true});
  CHECK(partial.probabilities[1] == 0.5);
}

TEST_CASE("lookup tables recover a known stochastic node") {
  Rng rng(8);
  const std::vector<double> truth{0.1, 0.8, 0.35, 0.95};
  BitMatrix bits(3, 10000);
  for (Eigen::Index s = 0; s < 10000; ++s) {
    bits(1, s) = static_cast<std::uint8_t>(rng.below(2));
    bits(2, s) = static_cast<std::uint8_t>(rng.below(2));
    bits(0, s) = rng.bernoulli(truth[2 * bits(1, s) + bits(2, s)]);
  }
  const LutEstimate lut = estimate_lut(binary_matrix(names(3), bits), 0, {1, 2});
  for (std::size_t x = 0; x < 4; ++x) CHECK(std::abs(lut.probabilities[x] - truth[x]) <= 0.05);
}

TEST_CASE("inference round trip on the ten-node network") {
  const Pbn truth(fixture_n10());
  Rng rng(10);
  const Transitions data = sample_transitions(truth, 10000, rng);
  InferenceOptions options;
  options.max_inputs = 2;
  const InferenceResult result = infer_pbn_from_transitions(data.before, data.after, options);
  CHECK(validate_model(result.model).empty());
  int recovered = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto& want = truth.model().nodes[i].inputs;
    std::set<std::size_t> expected(want.begin(), want.end());
    const auto& got = result.nodes[i].inputs;
    recovered += std::set<std::size_t>(got.begin(), got.end()) == expected ? 1 : 0;
  }
  CHECK(recovered >= 8);
  const Pbn inferred(result.model);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 1024; ++s) {
    worst = std::max(worst, total_variation(truth, inferred, NetworkState::from_index(s, 10)));
  }
  MESSAGE("worst one-step total variation " << worst);
  CHECK(worst <= 0.05);
}

TEST_CASE("infer_pbn on expression data") {
  Rng rng(11);
  const Eigen::Index samples = 400;
  ExpressionMatrix data{{"a", "b", "c", "flat"}, Eigen::MatrixXd(4, samples)};
  for (Eigen::Index s = 0; s < samples; ++s) {
    const bool b = rng.below(2) != 0;
    const bool c = rng.below(2) != 0;
    data.values(1, s) = (b ? 5.0 : 1.0) + 0.3 * rng.normal();
    data.values(2, s) = (c ? 5.0 : 1.0) + 0.3 * rng.normal();
    data.values(0, s) = ((b && c) ? 5.0 : 1.0) + 0.3 * rng.normal();
    data.values(3, s) = 2.0;
  }
  const InferenceResult result = infer_pbn(data, {"a", "b", "c", "flat"});
  CHECK(validate_model(result.model).empty());
  CHECK(std::set<std::size_t>(result.nodes[0].inputs.begin(), result.nodes[0].inputs.end()) ==
        std::set<std::size_t>{1, 2});
  CHECK(result.nodes[3].constant_gene);
  CHECK_THROWS_WITH_AS(infer_pbn(data, {}), "no genes selected", std::invalid_argument);
  CHECK_THROWS_AS(infer_pbn(data, {"zzz"}), std::invalid_argument);
  const InferenceResult single = infer_pbn(data, {"b"});
  CHECK(single.model.n_nodes == 1);
  CHECK(validate_model(single.model).empty());
}

TEST_CASE("expression CSV and gene list parsing") {
  const ExpressionMatrix m = parse_expression_csv("gene,s1,s2\nA,1.5,2\nB,0,-1\n");
  CHECK(m.genes == std::vector<std::string>{"A", "B"});
  CHECK(m.values(0, 0) == 1.5);
  CHECK(m.values(1, 1) == -1.0);
  CHECK(parse_gene_list("A\n\n# note\n B \n") == std::vector<std::string>{"A", "B"});
  CHECK_THROWS_AS(parse_expression_csv("A,1,2\nB,1\n"), std::invalid_argument);
}
