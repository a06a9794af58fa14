#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pbnrl/model.hpp"

namespace pbnrl {

/// G x S expression levels, one row per gene.
struct ExpressionMatrix {
  std::vector<std::string> genes;
  Eigen::MatrixXd values;
};

using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// G x S bits; bit (g, s) = 1 iff values(g, s) >= thresholds[g].
struct BinaryMatrix {
  std::vector<std::string> genes;
  BitMatrix bits;
  std::vector<double> thresholds;
  std::vector<bool> constant;  // constant genes are all-zero
};

/// Exact 1-D 2-means per gene; the threshold is the midpoint of the two
/// centroids.
BinaryMatrix binarize(const ExpressionMatrix& data);

/// Bits given directly (one row per gene); thresholds are 0.5.
BinaryMatrix binary_matrix(std::vector<std::string> genes, BitMatrix bits);

struct CodReport {
  std::size_t target = 0;
  std::size_t candidate = 0;
  double baseline_error = 0.0;   // e_X
  double augmented_error = 0.0;  // e_{X u x}
  double cod = 0.0;              // (e_X - e_{X u x}) / e_X
  bool baseline_perfect = false;
};

/// Error measure of the linear predictor: mean squared residual of the
/// least-squares fit, or misclassification rate after thresholding at 0.5.
enum class CodError { squared, misclassification };

/// Error of the least-squares linear predictor of responses(target, :) from
/// predictors(inputs, :). An empty input set gives the constant predictor
/// (the majority class when thresholded).
double linear_predictor_error(const BitMatrix& predictors, const BitMatrix& responses, std::size_t target,
                              const std::vector<std::size_t>& inputs, CodError error = CodError::squared);

/// Coefficient of determination of adding `candidate` to `base` when
/// predicting `target`. Static data: predictors and responses are the same
/// samples and the candidate must differ from the target.
CodReport cod_score(const BinaryMatrix& bin, std::size_t target, const std::vector<std::size_t>& base,
                    std::size_t candidate, CodError error = CodError::squared);

/// Transition data: predictors are the states before a step and responses
/// the states after it; a gene may predict its own next value.
CodReport cod_score(const BinaryMatrix& before, const BinaryMatrix& after, std::size_t target,
                    const std::vector<std::size_t>& base, std::size_t candidate,
                    CodError error = CodError::squared);

/// Greedy forward selection by COD. When no single gene reaches
/// `min_cod_gain` but two more inputs fit, the best jointly added pair is
/// tried before stopping (a thresholded linear predictor sees no gain from
/// either input of an OR or AND on its own).
std::vector<std::size_t> select_inputs(const BinaryMatrix& bin, std::size_t target, std::size_t max_inputs,
                                       double min_cod_gain, CodError error = CodError::squared);
std::vector<std::size_t> select_inputs(const BinaryMatrix& before, const BinaryMatrix& after, std::size_t target,
                                       std::size_t max_inputs, double min_cod_gain,
                                       CodError error = CodError::squared);

struct LutEstimate {
  std::vector<double> probabilities;  // per combination, first input most significant
  std::vector<std::size_t> counts;
  std::vector<bool> unobserved;       // p = 0.5 by default
};

LutEstimate estimate_lut(const BinaryMatrix& bin, std::size_t target, const std::vector<std::size_t>& inputs,
                         double laplace_alpha = 0.0);
LutEstimate estimate_lut(const BinaryMatrix& before, const BinaryMatrix& after, std::size_t target,
                         const std::vector<std::size_t>& inputs, double laplace_alpha = 0.0);

struct InferenceOptions {
  std::size_t max_inputs = 3;
  double min_cod_gain = 0.05;
  double laplace_alpha = 0.0;
  CodError cod_error = CodError::squared;
};

struct NodeInference {
  std::string gene;
  std::vector<std::size_t> inputs;  // zero-based positions in the subset
  std::vector<double> cods;         // COD of each input when it was added
  std::size_t unobserved = 0;
  bool constant_gene = false;
  double threshold = 0.5;
};

struct InferenceResult {
  PbnModel model;
  std::vector<NodeInference> nodes;
};

/// Binarize, then per gene select inputs among the subset and estimate its
/// lookup table. Throws std::invalid_argument for an empty or unknown gene.
InferenceResult infer_pbn(const ExpressionMatrix& data, const std::vector<std::string>& gene_subset,
                          const InferenceOptions& options = {});

/// Same pipeline on observed one-step transitions (before/after bits).
InferenceResult infer_pbn_from_transitions(const BinaryMatrix& before, const BinaryMatrix& after,
                                           const InferenceOptions& options = {});

/// Genes as rows, first column the gene name, optional header row.
const char* to_string(CodError error);
CodError cod_error_from_string(const std::string& text);

ExpressionMatrix parse_expression_csv(const std::string& text);
/// One gene name per line; blank lines and '#' comments are skipped.
std::vector<std::string> parse_gene_list(const std::string& text);

}  // namespace pbnrl
