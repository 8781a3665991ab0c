#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edpm/model.hpp"
#include "edpm/polya_urn.hpp"

namespace edpm::testing {

// Standard error of the mean from `batches` non-overlapping batch means.
double batch_means_se(std::span<const double> x, std::size_t batches = 50);
double mean(std::span<const double> x);

struct MomentCheck {
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;

  double z() const { return (estimate - target) / se; }
  bool within(double k) const { return std::abs(estimate - target) <= k * se; }
};

// Normal-inverse-gamma regression posterior: beta | tau ~ N(beta0, tau C^{-1}),
// tau ~ IG(a, b). Marginal moments of beta (multivariate t) and tau.
struct RegressionPosterior {
  Eigen::VectorXd beta_mean;
  Eigen::MatrixXd beta_cov;
  double tau_mean = 0.0;
  double tau_var = 0.0;
};
RegressionPosterior regression_posterior(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                                         const Hyperparameters& hp);

// mu | tau ~ N(m, tau / c), tau ~ IG(a, b) for one covariate.
struct CovariatePosterior {
  double mu_mean = 0.0;
  double mu_var = 0.0;
  double tau_mean = 0.0;
  double tau_var = 0.0;
};
CovariatePosterior covariate_posterior(std::span<const double> x, double m, double c, double a,
                                       double b);

// Closed-form log marginal likelihoods with the atom integrated out.
double log_marginal_y(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Hyperparameters& hp);
double log_marginal_x(const Eigen::MatrixXd& X, const Hyperparameters& hp);

// log of the Chinese restaurant partition probability for block sizes.
double log_crp(std::span<const std::size_t> sizes, double alpha);

// theta-blocks of psi-blocks of item indices, in canonical order.
using NestedPartition = std::vector<std::vector<std::vector<int>>>;
std::vector<NestedPartition> nested_partitions(int n);
std::string partition_key(const NestedPartition& p);
std::string partition_key(std::span<const int> K, std::span<const int> J);

// Exact posterior probability of each nested partition of `data` under the
// integrated urn model with fixed concentrations.
std::vector<double> nested_partition_posterior(const std::vector<NestedPartition>& parts,
                                               const Dataset& data, const Hyperparameters& hp,
                                               double alpha_theta, double alpha_psi);

// Successive-conditional (joint distribution) simulation: alternate a full
// sampler sweep with a redraw of the data given the parameters, starting
// from an exact prior draw. Returns the alpha_theta trace.
struct GewekeSetup {
  std::size_t n = 6;
  std::size_t p = 1;
  Truncation trunc{4, 4};
  std::size_t iterations = 20000;
  std::uint64_t seed = 1;
};
Hyperparameters geweke_hyperparameters(std::size_t p);
std::vector<double> geweke_blocked(const GewekeSetup& setup);
std::vector<double> geweke_urn(const GewekeSetup& setup);

// Mean and variance checks of a trace against Gamma(1, 1).
MomentCheck gamma11_mean_check(std::span<const double> trace);
MomentCheck gamma11_var_check(std::span<const double> trace);

}  // namespace edpm::testing
