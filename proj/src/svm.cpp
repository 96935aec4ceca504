#include "mmdk/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "mmdk/errors.hpp"

namespace mmdk {

namespace {

constexpr double kTauQuad = 1e-12;  // floor for the pair curvature

}  // namespace

SvmModel fit_smo(std::span<const double> kernel, std::size_t n, std::span<const int> y,
                 const SvmFitOptions& options) {
  if (n == 0 || kernel.size() != n * n)
    throw ValidationError("svm: kernel block size does not match n");
  if (y.size() != n) throw ValidationError("svm: label count does not match n");
  if (!(options.cost > 0) || !std::isfinite(options.cost))
    throw ValidationError("svm: C must be positive and finite");
  if (!(options.tol > 0)) throw ValidationError("svm: tol must be positive");
  bool has_pos = false, has_neg = false;
  for (const int label : y) {
    if (label == 1) has_pos = true;
    else if (label == -1) has_neg = true;
    else throw ValidationError("svm: labels must be +-1");
  }
  if (!has_pos || !has_neg) throw ValidationError("svm: both classes must be present");

  const double C = options.cost;
  auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };

  // Dual: min 1/2 a'Qa - sum(a), Q_ij = y_i y_j K_ij, 0 <= a <= C, y'a = 0.
  // grad_i = y_i * (K v)_i - 1 with v_j = a_j y_j, maintained incrementally.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  auto in_up = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C);
  };

  double violation = std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  for (; iter < options.max_iter; ++iter) {
    // Maximal violating pair: i maximizes -y g over I_up, j minimizes over I_low.
    std::ptrdiff_t i = -1, j = -1;
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(y[t]) * grad[t];
      if (in_up(t) && v > up_max) {
        up_max = v;
        i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low(t) && v < low_min) {
        low_min = v;
        j = static_cast<std::ptrdiff_t>(t);
      }
    }
    violation = up_max - low_min;
    if (i < 0 || j < 0 || violation <= options.tol) break;

    const std::size_t ii = static_cast<std::size_t>(i);
    const std::size_t jj = static_cast<std::size_t>(j);
    const double quad = std::max(K(ii, ii) + K(jj, jj) - 2.0 * K(ii, jj), kTauQuad);
    const double step = violation / quad;

    const double old_i = alpha[ii];
    const double old_j = alpha[jj];
    const double conserved = y[ii] * old_i + y[jj] * old_j;
    alpha[ii] = std::clamp(old_i + y[ii] * step, 0.0, C);
    alpha[jj] = y[jj] * (conserved - y[ii] * alpha[ii]);
    alpha[jj] = std::clamp(alpha[jj], 0.0, C);
    alpha[ii] = y[ii] * (conserved - y[jj] * alpha[jj]);

    const double di = (alpha[ii] - old_i) * y[ii];
    const double dj = (alpha[jj] - old_j) * y[jj];
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += static_cast<double>(y[t]) * (K(t, ii) * di + K(t, jj) * dj);
  }
  if (iter == options.max_iter) {
    throw NumericError("svm: SMO did not converge after " + std::to_string(iter) +
                       " iterations; final KKT violation " + std::to_string(violation));
  }

  // Bias from free support vectors when available: b = y_i - (K v)_i.
  // Otherwise the midpoint of the KKT interval.
  double bias_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < C) {
      bias_sum += -static_cast<double>(y[t]) * grad[t];
      ++n_free;
    }
  }
  double bias;
  if (n_free > 0) {
    bias = bias_sum / static_cast<double>(n_free);
  } else {
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(y[t]) * grad[t];
      if (in_up(t)) up_max = std::max(up_max, v);
      if (in_low(t)) low_min = std::min(low_min, v);
    }
    bias = 0.5 * (up_max + low_min);
  }

  SvmModel model;
  model.bias = bias;
  model.cost = C;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_indices.push_back(t);
      model.alphas.push_back(alpha[t]);
      model.labels.push_back(y[t]);
    }
  }
  return model;
}

std::vector<double> decision_function(const SvmModel& model,
                                      std::span<const double> kernel_cross,
                                      std::size_t n_test, std::size_t n_train) {
  if (kernel_cross.size() != n_test * n_train)
    throw ValidationError("svm: cross kernel block size does not match test x train");
  for (const std::size_t s : model.support_indices) {
    if (s >= n_train)
      throw ValidationError("svm: support index " + std::to_string(s) +
                            " outside the training block");
  }
  std::vector<double> scores(n_test);
  for (std::size_t t = 0; t < n_test; ++t) {
    double s = model.bias;
    for (std::size_t k = 0; k < model.support_indices.size(); ++k) {
      s += model.alphas[k] * static_cast<double>(model.labels[k]) *
           kernel_cross[t * n_train + model.support_indices[k]];
    }
    scores[t] = s;
  }
  return scores;
}

nlohmann::json svm_model_to_json(const SvmModel& model) {
  nlohmann::json j;
  j["support_indices"] = model.support_indices;
  j["alphas"] = model.alphas;
  j["labels"] = model.labels;
  j["bias"] = model.bias;
  j["C"] = model.cost;
  return j;
}

SvmModel svm_model_from_json(const nlohmann::json& j) {
  SvmModel m;
  try {
    m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.bias = j.at("bias").get<double>();
    m.cost = j.at("C").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("svm model json: ") + e.what());
  }
  if (m.alphas.size() != m.support_indices.size() || m.labels.size() != m.alphas.size())
    throw ValidationError("svm model json: mismatched array lengths");
  return m;
}

}  // namespace mmdk
