#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "edpm/model.hpp"
#include "edpm/rng.hpp"

namespace edpm {

// Sufficient statistics of the observations in one theta-cluster.
struct RegressionStats {
  Eigen::MatrixXd xtx;  // sum x* x*^T
  Eigen::VectorXd xty;  // sum x* y
  double yty = 0.0;
  std::size_t count = 0;

  explicit RegressionStats(std::size_t p = 0);
  void add(const Eigen::VectorXd& design, double y);
};

// Per-covariate sums for the observations in one (theta, psi) cell.
struct CovariateStats {
  Eigen::VectorXd sum;
  Eigen::VectorXd sum_sq;
  std::size_t count = 0;

  explicit CovariateStats(std::size_t p = 0);
  void add(const Eigen::Ref<const Eigen::VectorXd>& x);
};

// beta | tau, data ~ N((X'X + C)^{-1}(X'y + C beta0), tau (X'X + C)^{-1}),
// then 1/tau | beta, data ~ Gamma(a_y + (n + p + 1)/2,
//   b_y + [RSS(beta) + (beta - beta0)' C (beta - beta0)] / 2).
// With no observations the atom is a fresh base-measure draw.
ThetaAtom draw_theta_posterior(const RegressionStats& stats, const BaseMeasure& base,
                               double tau_current, Rng& rng);

// mu_l | tau_l, data ~ N((sum x + c m)/(n + c), tau_l/(n + c)), then
// 1/tau_l | mu_l, data ~ Gamma(a_x + (n + 1)/2,
//   b_x + [sum (x - mu)^2 + c (mu - m)^2] / 2).
// With no observations the atom is a fresh base-measure draw.
PsiAtom draw_psi_posterior(const CovariateStats& stats, const BaseMeasure& base,
                           const PsiAtom& current, Rng& rng);

// log f(x | psi) for independent normal covariates.
double log_covariate_density(const Eigen::Ref<const Eigen::VectorXd>& x, const PsiAtom& psi);

// log f(y | x*, theta).
double log_response_density(double y, const Eigen::VectorXd& design, const ThetaAtom& theta);

// Prior predictive of a covariate vector with (mu, tau) integrated out:
// a product of Student t with 2 a_x dof, location m_l, squared scale
// b_x (1 + 1/c_l) / a_x.
double log_prior_predictive_x(const Eigen::Ref<const Eigen::VectorXd>& x, const Hyperparameters& hp);

// Prior predictive of y given a design row: Student t with 2 a_y dof,
// location x*'beta0 and squared scale b_y (1 + x*' C_y^{-1} x*) / a_y.
struct StudentT {
  double dof;
  double location;
  double scale2;
};
StudentT prior_predictive_y(const Eigen::VectorXd& design, const BaseMeasure& base);

}  // namespace edpm
