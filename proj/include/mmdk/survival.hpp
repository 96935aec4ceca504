#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mmdk {

// Ordered pairs (i, j) with T_i < T_j and the earlier patient's event
// observed. Tied times produce no pair.
struct ComparablePairs {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// Truncates times at the censoring horizon (later times become censored at
// the horizon), then emits the comparable pairs of the truncated data.
ComparablePairs comparable_pairs(std::span<const double> times, std::span<const int> events,
                                 double censor_horizon);

// Pair rule only, no truncation.
ComparablePairs comparable_pairs(std::span<const double> times, std::span<const int> events);

// Kernel survival SVM with a squared-hinge ranking loss:
//   J(beta) = 1/2 beta'K beta + alpha/2 sum_pairs max(0, 1 - (f_i - f_j))^2,
// f = K beta. Pairs are oriented so the earlier-event patient should score
// higher, i.e. f is a risk score. Newton steps solve the active-pair system
// (K + alpha K A K) delta = -grad by conjugate gradient, falling back to
// steepest descent with backtracking when CG fails to produce a descent
// direction. beta starts at zero, so fits are deterministic.
struct SurvModel {
  std::vector<double> betas;  // one per training index
  double alpha = 0.125;       // paper protocol default
};

struct SurvFitOptions {
  double alpha = 0.125;
  std::size_t max_newton = 500;
  // Converged when max|grad| <= grad_tol * (1 + |J|).
  double grad_tol = 1e-6;
};

SurvModel fit_survival(std::span<const double> kernel, std::size_t n,
                       const ComparablePairs& pairs, const SurvFitOptions& options = {});

// Ranking objective and gradient at beta (exposed for verification).
double survival_objective(std::span<const double> kernel, std::size_t n,
                          const ComparablePairs& pairs, double alpha,
                          std::span<const double> beta);
std::vector<double> survival_gradient(std::span<const double> kernel, std::size_t n,
                                      const ComparablePairs& pairs, double alpha,
                                      std::span<const double> beta);

// f(t) = sum_i beta_i K(t, i) over the test x train block (row-major).
std::vector<double> risk_scores(const SurvModel& model, std::span<const double> kernel_cross,
                                std::size_t n_test, std::size_t n_train);

nlohmann::json surv_model_to_json(const SurvModel& model);
SurvModel surv_model_from_json(const nlohmann::json& j);

}  // namespace mmdk
