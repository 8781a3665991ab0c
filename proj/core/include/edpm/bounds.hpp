#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "edpm/chain.hpp"
#include "edpm/rng.hpp"

namespace edpm {

struct BoundQuery {
  double n = 0;  // sample size (real so that linearity in n is exact)
  int N = 2;
  int M = 2;
  double alpha_theta = 1.0;
  double alpha_psi = 1.0;  // alpha^{psi|theta}_max for the varying-alpha bound

  void validate() const;
};

// bound = 4 n (theta_term + psi_term (1 - theta_term)) with
// theta_term = exp(-(N-1)/alpha_theta), psi_term = exp(-(M-1)/alpha_psi).
struct BoundResult {
  double bound = 0.0;
  double theta_term = 0.0;
  double psi_term = 0.0;
};

// First-order L1 bound between the truncated and untruncated marginal
// densities of (y, x).
BoundResult l1_bound(const BoundQuery& q);

// The same bound with alpha_psi replaced by the largest per-cluster
// concentration in `alpha_psi`. DomainError on an empty list.
BoundResult l1_bound_varying(double n, int N, int M, double alpha_theta,
                             std::span<const double> alpha_psi);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Monte-Carlo estimate of 4 [1 - E{(sum_{k<N} p_k sum_{j<M} p_{j|k})^n}]
// from simulated stick-breaking weights. Draws are split into fixed shards
// with independent substreams, so the result depends only on (seed, draws).
McEstimate exact_bound_mc(const BoundQuery& q, std::size_t draws, std::uint64_t seed,
                          unsigned workers = 1);

struct TruncationPair {
  int N = 2;
  int M = 2;
};

// Smallest N >= 2 with 4n exp(-(N-1)/alpha_theta) <= eps/2 and smallest
// M >= 2 with 4n exp(-(M-1)/alpha_psi) <= eps/2. The pair satisfies
// l1_bound <= eps.
TruncationPair min_truncation(double n, double alpha_theta, double alpha_psi, double epsilon);

struct ConcentrationEstimate {
  double alpha_theta = 0.0;
  double alpha_psi_max = 0.0;
};

// Posterior means of alpha_theta and max_k alpha_psi_k over the draws.
ConcentrationEstimate estimate_concentrations(const Chain& chain);
ConcentrationEstimate estimate_concentrations(std::span<const double> alpha_theta,
                                              std::span<const double> alpha_psi_max);

}  // namespace edpm
