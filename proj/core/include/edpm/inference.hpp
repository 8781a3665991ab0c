#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "edpm/chain.hpp"
#include "edpm/model.hpp"

namespace edpm {

// Posterior-predictive functionals of a single draw at covariate vector x
// (length p, no intercept).
//
// Blocked draws: f(y | x) = sum_k w_k(x) N(y; x* beta_k, tau_yk) with
//   w_k(x) proportional to p_k sum_j p_{j|k} prod_l N(x_l; mu_{j|k,l}, tau_{j|k,l}).
// Urn draws use the occupied clusters with urn weights n_k / (alpha + n),
// a new psi-cluster option alpha_k / (alpha_k + n_k) inside each cluster
// and one new theta-cluster term alpha / (alpha + n). Terms for new clusters
// integrate the atoms out under the base measure.
class Predictor {
 public:
  explicit Predictor(const Hyperparameters& hp);

  // Normalised theta-level weights. For urn draws the last entry is the new
  // cluster term.
  std::vector<double> theta_weights(const ChainDraw& draw, const Eigen::VectorXd& x) const;

  double conditional_mean(const ChainDraw& draw, const Eigen::VectorXd& x) const;

  // conditional_mean for every row of X, sharing per-draw setup.
  std::vector<double> conditional_means(const ChainDraw& draw, const Eigen::MatrixXd& X) const;

  std::vector<double> conditional_density(const ChainDraw& draw, const Eigen::VectorXd& x,
                                          std::span<const double> y_grid) const;

 private:
  BaseMeasure base_;
};

std::vector<double> theta_mixture_weights(const GibbsState& state, const Eigen::VectorXd& x);
double conditional_mean(const GibbsState& state, const Eigen::VectorXd& x);
std::vector<double> conditional_means(const GibbsState& state, const Eigen::MatrixXd& X);
std::vector<double> conditional_density(const GibbsState& state, const Eigen::VectorXd& x,
                                        std::span<const double> y_grid);

inline constexpr std::array<double, 4> kSummaryLevels{0.025, 0.25, 0.75, 0.975};

struct PredictiveSummary {
  double mean = 0.0;
  std::array<double, 4> quantiles{};  // at kSummaryLevels, type-7 interpolation

  double q025() const { return quantiles[0]; }
  double q25() const { return quantiles[1]; }
  double q75() const { return quantiles[2]; }
  double q975() const { return quantiles[3]; }
};

// Mean and quantiles of per-draw values. DomainError when empty.
PredictiveSummary predictive_summary(std::span<const double> values);
PredictiveSummary predictive_summary(const Chain& chain, const Eigen::VectorXd& x,
                                     const Hyperparameters& hp);

struct PredictionErrors {
  double l1 = 0.0;  // mean absolute error
  double l2 = 0.0;  // mean squared error
};

PredictionErrors prediction_errors(std::span<const double> estimates, std::span<const double> truths);

}  // namespace edpm
