#include "pbnrl/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace pbnrl {
namespace {

struct ComboCounts {
  std::vector<std::size_t> ones;
  std::vector<std::size_t> total;
};

ComboCounts count_combinations(const BitMatrix& predictors, const BitMatrix& responses, std::size_t target,
                               const std::vector<std::size_t>& inputs) {
  const std::size_t k = inputs.size();
  ComboCounts c{std::vector<std::size_t>(std::size_t{1} << k, 0), std::vector<std::size_t>(std::size_t{1} << k, 0)};
  const auto t = static_cast<Eigen::Index>(target);
  for (Eigen::Index s = 0; s < predictors.cols(); ++s) {
    std::size_t x = 0;
    for (auto g : inputs) {
      x = (x << 1) | predictors(static_cast<Eigen::Index>(g), s);
    }
    ++c.total[x];
    c.ones[x] += responses(t, s);
  }
  return c;
}

void check_shapes(const BinaryMatrix& before, const BinaryMatrix& after) {
  if (before.bits.rows() != after.bits.rows() || before.bits.cols() != after.bits.cols()) {
    throw std::invalid_argument("transition matrices must have the same shape");
  }
  if (before.bits.cols() < 1) {
    throw std::invalid_argument("no samples");
  }
}

CodReport cod_impl(const BitMatrix& predictors, const BitMatrix& responses, std::size_t target,
                   const std::vector<std::size_t>& base, std::size_t candidate, CodError error) {
  CodReport r;
  r.target = target;
  r.candidate = candidate;
  r.baseline_error = linear_predictor_error(predictors, responses, target, base, error);
  auto augmented = base;
  augmented.push_back(candidate);
  r.augmented_error = linear_predictor_error(predictors, responses, target, augmented, error);
  if (r.baseline_error <= 1e-12) {
    r.baseline_perfect = true;
    r.cod = 0.0;
  } else {
    r.cod = (r.baseline_error - r.augmented_error) / r.baseline_error;
  }
  return r;
}

std::vector<std::size_t> select_impl(const BitMatrix& predictors, const BitMatrix& responses, std::size_t target,
                                     std::size_t max_inputs, double min_gain, bool allow_self, CodError error,
                                     std::vector<double>* gains) {
  if (max_inputs < 1) {
    throw std::invalid_argument("select_inputs: max_inputs must be at least 1");
  }
  const auto genes = static_cast<std::size_t>(predictors.rows());
  std::vector<std::size_t> chosen;
  auto usable = [&](std::size_t g) {
    return (allow_self || g != target) && std::find(chosen.begin(), chosen.end(), g) == chosen.end();
  };
  while (chosen.size() < max_inputs) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_gene = genes;
    bool perfect = false;
    for (std::size_t g = 0; g < genes; ++g) {
      if (!usable(g)) continue;
      const CodReport r = cod_impl(predictors, responses, target, chosen, g, error);
      perfect = perfect || r.baseline_perfect;
      if (r.cod > best) {
        best = r.cod;
        best_gene = g;
      }
    }
    if (perfect || best_gene == genes) {
      break;
    }
    if (best >= min_gain) {
      chosen.push_back(best_gene);
      if (gains) gains->push_back(best);
      continue;
    }
    if (chosen.size() + 2 > max_inputs) {
      break;
    }
    const double base_error = linear_predictor_error(predictors, responses, target, chosen, error);
    double best_pair = -std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> pair{genes, genes};
    for (std::size_t a = 0; a < genes; ++a) {
      if (!usable(a)) continue;
      for (std::size_t b = a + 1; b < genes; ++b) {
        if (!usable(b)) continue;
        auto trial = chosen;
        trial.push_back(a);
        trial.push_back(b);
        const double e = linear_predictor_error(predictors, responses, target, trial, error);
        const double cod = (base_error - e) / base_error;
        if (cod > best_pair) {
          best_pair = cod;
          pair = {a, b};
        }
      }
    }
    if (pair.first == genes || best_pair < min_gain) {
      break;
    }
    chosen.push_back(pair.first);
    chosen.push_back(pair.second);
    if (gains) {
      gains->push_back(best_pair);
      gains->push_back(best_pair);
    }
  }
  return chosen;
}

LutEstimate lut_impl(const BitMatrix& predictors, const BitMatrix& responses, std::size_t target,
                     const std::vector<std::size_t>& inputs, double alpha) {
  if (alpha < 0.0) {
    throw std::invalid_argument("estimate_lut: laplace_alpha must be non-negative");
  }
  if (inputs.size() > 20) {
    throw std::invalid_argument("estimate_lut: too many inputs");
  }
  const ComboCounts c = count_combinations(predictors, responses, target, inputs);
  LutEstimate out;
  out.counts = c.total;
  out.probabilities.resize(c.total.size());
  out.unobserved.resize(c.total.size());
  for (std::size_t x = 0; x < c.total.size(); ++x) {
    if (c.total[x] == 0) {
      out.probabilities[x] = 0.5;
      out.unobserved[x] = true;
    } else {
      out.probabilities[x] = (static_cast<double>(c.ones[x]) + alpha) / (static_cast<double>(c.total[x]) + 2.0 * alpha);
    }
  }
  return out;
}

InferenceResult assemble(const BitMatrix& predictors, const BitMatrix& responses, const std::vector<std::string>& genes,
                         const std::vector<double>& thresholds, const std::vector<bool>& constant,
                         const InferenceOptions& options, bool allow_self) {
  InferenceResult result;
  result.model.name = "inferred";
  result.model.n_nodes = genes.size();
  for (std::size_t g = 0; g < genes.size(); ++g) {
    NodeInference info;
    info.gene = genes[g];
    info.constant_gene = constant[g];
    info.threshold = thresholds[g];
    info.inputs = select_impl(predictors, responses, g, options.max_inputs, options.min_cod_gain, allow_self,
                              options.cod_error, &info.cods);
    const LutEstimate lut = lut_impl(predictors, responses, g, info.inputs, options.laplace_alpha);
    info.unobserved = static_cast<std::size_t>(std::count(lut.unobserved.begin(), lut.unobserved.end(), true));
    NodeSpec node;
    for (auto i : info.inputs) {
      node.inputs.push_back(static_cast<int>(i));
    }
    node.stochastic_table = lut.probabilities;
    result.model.nodes.push_back(std::move(node));
    result.nodes.push_back(std::move(info));
  }
  return result;
}

}  // namespace

BinaryMatrix binarize(const ExpressionMatrix& data) {
  const auto G = data.values.rows();
  const auto S = data.values.cols();
  if (static_cast<std::size_t>(G) != data.genes.size()) {
    throw std::invalid_argument("binarize: gene names do not match the matrix rows");
  }
  BinaryMatrix out;
  out.genes = data.genes;
  out.bits = BitMatrix::Zero(G, S);
  out.thresholds.resize(static_cast<std::size_t>(G));
  out.constant.resize(static_cast<std::size_t>(G));
  std::vector<double> v(static_cast<std::size_t>(S));
  for (Eigen::Index g = 0; g < G; ++g) {
    for (Eigen::Index s = 0; s < S; ++s) {
      v[static_cast<std::size_t>(s)] = data.values(g, s);
    }
    std::sort(v.begin(), v.end());
    const auto gi = static_cast<std::size_t>(g);
    if (v.empty() || v.front() == v.back()) {
      out.constant[gi] = true;
      out.thresholds[gi] = v.empty() ? 0.0 : v.front();
      continue;
    }
    // Optimal 1-D 2-means splits the sorted values into a prefix and a suffix.
    std::vector<double> prefix(v.size() + 1, 0.0);
    std::vector<double> prefix_sq(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      prefix[i + 1] = prefix[i] + v[i];
      prefix_sq[i + 1] = prefix_sq[i] + v[i] * v[i];
    }
    const double n = static_cast<double>(v.size());
    double best = std::numeric_limits<double>::infinity();
    double threshold = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (v[k] == v[k - 1]) continue;
      const double n1 = static_cast<double>(k);
      const double n2 = n - n1;
      const double s1 = prefix[k];
      const double s2 = prefix[v.size()] - s1;
      const double sse = (prefix_sq[k] - s1 * s1 / n1) + (prefix_sq[v.size()] - prefix_sq[k] - s2 * s2 / n2);
      if (std::isinf(best) || sse < best - 1e-12 * std::max(1.0, best)) {
        best = sse;
        threshold = 0.5 * (s1 / n1 + s2 / n2);
      }
    }
    out.thresholds[gi] = threshold;
    for (Eigen::Index s = 0; s < S; ++s) {
      out.bits(g, s) = data.values(g, s) >= threshold ? 1 : 0;
    }
  }
  return out;
}

BinaryMatrix binary_matrix(std::vector<std::string> genes, BitMatrix bits) {
  if (static_cast<std::size_t>(bits.rows()) != genes.size()) {
    throw std::invalid_argument("binary_matrix: gene names do not match the matrix rows");
  }
  BinaryMatrix out;
  out.genes = std::move(genes);
  out.thresholds.assign(out.genes.size(), 0.5);
  out.constant.assign(out.genes.size(), false);
  for (Eigen::Index g = 0; g < bits.rows(); ++g) {
    const bool any = (bits.row(g).array() != 0).any();
    const bool all = (bits.row(g).array() != 0).all();
    out.constant[static_cast<std::size_t>(g)] = !any || all;
  }
  out.bits = std::move(bits);
  return out;
}

double linear_predictor_error(const BitMatrix& predictors, const BitMatrix& responses, std::size_t target,
                              const std::vector<std::size_t>& inputs, CodError error) {
  const std::size_t k = inputs.size();
  if (k > 16) {
    throw std::invalid_argument("linear_predictor_error: too many inputs");
  }
  const ComboCounts c = count_combinations(predictors, responses, target, inputs);
  // Least squares on per-combination means weighted by counts is the same
  // fit as least squares on the raw samples.
  std::vector<std::size_t> observed;
  for (std::size_t x = 0; x < c.total.size(); ++x) {
    if (c.total[x] > 0) observed.push_back(x);
  }
  const auto rows = static_cast<Eigen::Index>(observed.size());
  Eigen::MatrixXd A(rows, static_cast<Eigen::Index>(k + 1));
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t x = observed[static_cast<std::size_t>(r)];
    const double w = std::sqrt(static_cast<double>(c.total[x]));
    for (std::size_t j = 0; j < k; ++j) {
      A(r, static_cast<Eigen::Index>(j)) = w * static_cast<double>((x >> (k - 1 - j)) & 1U);
    }
    A(r, static_cast<Eigen::Index>(k)) = w;
    y(r) = static_cast<double>(c.ones[x]) / w;
  }
  const Eigen::VectorXd coef = A.completeOrthogonalDecomposition().solve(y);
  double loss = 0.0;
  std::size_t total = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t x = observed[static_cast<std::size_t>(r)];
    const double w = std::sqrt(static_cast<double>(c.total[x]));
    const double pred = A.row(r).dot(coef) / w;
    const auto ones = static_cast<double>(c.ones[x]);
    const auto zeros = static_cast<double>(c.total[x] - c.ones[x]);
    if (error == CodError::squared) {
      loss += ones * (1.0 - pred) * (1.0 - pred) + zeros * pred * pred;
    } else {
      loss += pred >= 0.5 - 1e-9 ? zeros : ones;
    }
    total += c.total[x];
  }
  return total == 0 ? 0.0 : loss / static_cast<double>(total);
}

CodReport cod_score(const BinaryMatrix& bin, std::size_t target, const std::vector<std::size_t>& base,
                    std::size_t candidate, CodError error) {
  const auto G = static_cast<std::size_t>(bin.bits.rows());
  if (target >= G || candidate >= G) {
    throw std::out_of_range("cod_score: gene index out of range");
  }
  if (candidate == target || std::find(base.begin(), base.end(), candidate) != base.end()) {
    throw std::invalid_argument("cod_score: candidate must not be the target or already in the base set");
  }
  return cod_impl(bin.bits, bin.bits, target, base, candidate, error);
}

CodReport cod_score(const BinaryMatrix& before, const BinaryMatrix& after, std::size_t target,
                    const std::vector<std::size_t>& base, std::size_t candidate, CodError error) {
  check_shapes(before, after);
  const auto G = static_cast<std::size_t>(before.bits.rows());
  if (target >= G || candidate >= G) {
    throw std::out_of_range("cod_score: gene index out of range");
  }
  if (std::find(base.begin(), base.end(), candidate) != base.end()) {
    throw std::invalid_argument("cod_score: candidate already in the base set");
  }
  return cod_impl(before.bits, after.bits, target, base, candidate, error);
}

std::vector<std::size_t> select_inputs(const BinaryMatrix& bin, std::size_t target, std::size_t max_inputs,
                                       double min_cod_gain, CodError error) {
  return select_impl(bin.bits, bin.bits, target, max_inputs, min_cod_gain, false, error, nullptr);
}

std::vector<std::size_t> select_inputs(const BinaryMatrix& before, const BinaryMatrix& after, std::size_t target,
                                       std::size_t max_inputs, double min_cod_gain, CodError error) {
  check_shapes(before, after);
  return select_impl(before.bits, after.bits, target, max_inputs, min_cod_gain, true, error, nullptr);
}

LutEstimate estimate_lut(const BinaryMatrix& bin, std::size_t target, const std::vector<std::size_t>& inputs,
                         double laplace_alpha) {
  return lut_impl(bin.bits, bin.bits, target, inputs, laplace_alpha);
}

LutEstimate estimate_lut(const BinaryMatrix& before, const BinaryMatrix& after, std::size_t target,
                         const std::vector<std::size_t>& inputs, double laplace_alpha) {
  check_shapes(before, after);
  return lut_impl(before.bits, after.bits, target, inputs, laplace_alpha);
}

InferenceResult infer_pbn(const ExpressionMatrix& data, const std::vector<std::string>& gene_subset,
                          const InferenceOptions& options) {
  if (gene_subset.empty()) {
    throw std::invalid_argument("no genes selected");
  }
  if (data.values.cols() < 2) {
    throw std::invalid_argument("infer_pbn: need at least two samples");
  }
  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t g = 0; g < data.genes.size(); ++g) {
    row_of.emplace(data.genes[g], static_cast<Eigen::Index>(g));
  }
  ExpressionMatrix subset;
  subset.values.resize(static_cast<Eigen::Index>(gene_subset.size()), data.values.cols());
  for (std::size_t i = 0; i < gene_subset.size(); ++i) {
    const auto it = row_of.find(gene_subset[i]);
    if (it == row_of.end()) {
      throw std::invalid_argument("gene '" + gene_subset[i] + "' is not in the expression matrix");
    }
    if (std::find(subset.genes.begin(), subset.genes.end(), gene_subset[i]) != subset.genes.end()) {
      throw std::invalid_argument("gene '" + gene_subset[i] + "' listed twice");
    }
    subset.genes.push_back(gene_subset[i]);
    subset.values.row(static_cast<Eigen::Index>(i)) = data.values.row(it->second);
  }
  const BinaryMatrix bin = binarize(subset);
  return assemble(bin.bits, bin.bits, bin.genes, bin.thresholds, bin.constant, options, false);
}

InferenceResult infer_pbn_from_transitions(const BinaryMatrix& before, const BinaryMatrix& after,
                                           const InferenceOptions& options) {
  check_shapes(before, after);
  if (before.genes.empty()) {
    throw std::invalid_argument("no genes selected");
  }
  return assemble(before.bits, after.bits, before.genes, before.thresholds, after.constant, options, true);
}

const char* to_string(CodError error) {
  return error == CodError::squared ? "squared" : "misclassification";
}

CodError cod_error_from_string(const std::string& text) {
  if (text == "squared") return CodError::squared;
  if (text == "misclassification") return CodError::misclassification;
  throw std::invalid_argument("unknown COD error '" + text + "' (expected squared or misclassification)");
}

ExpressionMatrix parse_expression_csv(const std::string& text) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() < 2) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected a gene name and values");
    }
    std::vector<double> values;
    bool numeric = true;
    for (std::size_t i = 1; i < cells.size() && numeric; ++i) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cells[i], &used));
        numeric = cells[i].find_first_not_of(" \t", used) == std::string::npos;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty() && names.empty()) continue;  // header
      throw std::invalid_argument("line " + std::to_string(line_no) + ": non-numeric expression value");
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": values must be finite");
      }
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": inconsistent sample count");
    }
    names.push_back(cells[0]);
    rows.push_back(std::move(values));
  }
  ExpressionMatrix m;
  m.genes = std::move(names);
  const auto S = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  m.values.resize(static_cast<Eigen::Index>(rows.size()), S);
  for (std::size_t g = 0; g < rows.size(); ++g) {
    for (Eigen::Index s = 0; s < S; ++s) {
      m.values(static_cast<Eigen::Index>(g), s) = rows[g][static_cast<std::size_t>(s)];
    }
  }
  return m;
}

std::vector<std::string> parse_gene_list(const std::string& text) {
  std::vector<std::string> genes;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    genes.push_back(line.substr(b, e - b + 1));
  }
  return genes;
}

}  // namespace pbnrl
