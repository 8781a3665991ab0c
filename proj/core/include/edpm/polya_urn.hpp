#pragma once

#include <cstddef>
#include <cstdint>

#include "edpm/blocked_gibbs.hpp"
#include "edpm/chain.hpp"
#include "edpm/model.hpp"
#include "edpm/rng.hpp"
#include "edpm/urn_state.hpp"

namespace edpm {

struct UrnConfig {
  std::size_t iterations = 50000;
  std::size_t burn_in = 10000;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  int m_aux = 3;
  InitPolicy init = InitPolicy::prior_draw;
  // When false, alpha_theta and every alpha_psi stay at their initial values
  // and new theta-clusters take alpha_psi_common.
  bool update_concentrations = true;

  void validate() const;
};

// One pass over the observations (Neal's Algorithm 8 lifted to the nested
// urn). Each observation is removed from its clusters and reseated by a
// single categorical draw over existing (theta, psi) pairs, m_aux auxiliary
// psi atoms per existing theta-cluster and m_aux auxiliary theta-clusters.
// An observation that was alone keeps its old atom as auxiliary slot 0.
void pu_update_assignments(UrnState& state, const Dataset& data, const BaseMeasure& base, Rng& rng,
                           bool fixed_concentrations = false);

// Conjugate atom draws for every occupied cluster.
void pu_update_cluster_params(UrnState& state, const Dataset& data, const BaseMeasure& base,
                              Rng& rng);

// Auxiliary-variable concentration updates: for a DP with k clusters over n
// items, w ~ Beta(alpha + 1, n), s ~ Bernoulli(n / (n + alpha)), then
// alpha ~ Gamma(a + k - s, b - log w). Shared alpha_psi pools the groups.
void pu_update_concentrations(UrnState& state, const Hyperparameters& hp, Rng& rng);

// One draw of alpha from its multi-group auxiliary-variable conditional.
// `items[g]` and `clusters[g]` are the item and cluster counts of group g.
double draw_dp_concentration(double alpha, std::span<const std::size_t> items,
                             std::span<const std::size_t> clusters, double shape, double rate,
                             Rng& rng);

UrnState initial_urn_state(const Dataset& data, const BaseMeasure& base, const UrnConfig& cfg,
                           Rng& rng);

// assignments -> cluster parameters -> concentrations.
void pu_sweep(UrnState& state, const Dataset& data, const BaseMeasure& base, Rng& rng,
              bool update_concentrations = true);

std::size_t run_pu_chain(const Dataset& data, const Hyperparameters& hp, const UrnConfig& cfg,
                         const DrawObserver& observer);
Chain run_pu_chain(const Dataset& data, const Hyperparameters& hp, const UrnConfig& cfg);

}  // namespace edpm
