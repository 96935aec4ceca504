#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mmdk {

// Soft-margin binary C-SVM over a precomputed kernel, solved by SMO with
// maximal-violating-pair working-set selection. Deterministic: no shuffling,
// ties break on the lowest index.
struct SvmModel {
  std::vector<std::size_t> support_indices;  // training indices with alpha > 0
  std::vector<double> alphas;                // per support index, in (0, C]
  std::vector<int> labels;                   // +-1 per support index
  double bias = 0.0;
  double cost = 0.0;                         // C
};

struct SvmFitOptions {
  double cost = 10000.0;       // paper protocol default
  double tol = 1e-3;           // KKT violation tolerance
  std::size_t max_iter = 1000000;
};

// K is the n x n training kernel block (row-major), y holds +-1 labels.
// Throws ValidationError on single-class input, NumericError on
// non-convergence (message carries the final KKT violation).
SvmModel fit_smo(std::span<const double> kernel, std::size_t n, std::span<const int> y,
                 const SvmFitOptions& options = {});

// score_t = sum_i alpha_i y_i K(t, i) + bias over the test x train kernel
// block (row-major, columns aligned with the training indices used in fit).
std::vector<double> decision_function(const SvmModel& model,
                                      std::span<const double> kernel_cross,
                                      std::size_t n_test, std::size_t n_train);

nlohmann::json svm_model_to_json(const SvmModel& model);
SvmModel svm_model_from_json(const nlohmann::json& j);

}  // namespace mmdk
