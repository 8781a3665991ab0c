#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "edpm/bounds.hpp"
#include "edpm/chain.hpp"
#include "edpm/model.hpp"
#include "edpm/rng.hpp"

namespace edpm {

// Choose (N, M) from a pilot run: estimate alpha_theta and alpha_psi_max,
// then take min_truncation(n, ., ., epsilon).
struct AutoTruncation {
  double epsilon = 0.01;
  std::size_t pilot_iterations = 10000;
  std::size_t pilot_burn_in = 2000;
  Truncation pilot{10, 50};
};

enum class InitPolicy {
  prior_draw,      // weights, atoms and concentrations from the prior, then one assignment pass
  single_cluster,  // prior weights and atoms, every observation in (0, 0)
};

struct ChainConfig {
  std::size_t iterations = 100000;
  std::size_t burn_in = 20000;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  std::variant<Truncation, AutoTruncation> trunc = Truncation{10, 50};
  InitPolicy init = InitPolicy::prior_draw;
  bool update_concentrations = true;

  void validate() const;  // DomainError unless burn_in < iterations and thin >= 1
};

struct ShapeRate {
  double shape;
  double rate;
};

struct BetaParams {
  double a;
  double b;
};

// Posterior parameters of the stick fractions V_1..V_{L-1} given counts:
// Beta(n_k + 1, alpha + sum_{h>k} n_h).
std::vector<BetaParams> stick_posterior(std::span<const int> counts, double alpha);

// Gamma(L + eta1 - 1, eta2 - sum_{k<L} log(1 - V_k)). log(1 - V_k) comes from
// StickWeights::log1m_V; 1 - V is clamped at 1e-15 only where V_k is exactly 1.
ShapeRate concentration_posterior(const StickWeights& sticks, double eta1, double eta2);

// Pooled variant over all theta-clusters: Gamma(N(M-1) + eta1 - 1, eta2 - sum log(1 - V)).
ShapeRate shared_concentration_posterior(std::span<const StickWeights> sticks, double eta1,
                                         double eta2);

// The conditional updates of one blocked Gibbs sweep.
void update_regression_atoms(GibbsState& state, const Dataset& data, const BaseMeasure& base,
                             Rng& rng);
void update_covariate_atoms(GibbsState& state, const Dataset& data, const BaseMeasure& base,
                            Rng& rng);
void update_assignments(GibbsState& state, const Dataset& data, Rng& rng);
void update_theta_weights(GibbsState& state, Rng& rng);
void update_psi_weights(GibbsState& state, Rng& rng);
void update_concentration_theta(GibbsState& state, const Hyperparameters& hp, Rng& rng);
void update_concentration_psi(GibbsState& state, const Hyperparameters& hp, Rng& rng);

// Log of the unnormalised assignment mass of observation i for every (k, j),
// laid out row-major as k * M + j.
std::vector<double> assignment_log_mass(const GibbsState& state, const Dataset& data, std::size_t i);

GibbsState initial_state(const Dataset& data, const BaseMeasure& base, const Truncation& trunc,
                         InitPolicy policy, Rng& rng);

// atoms -> assignments -> weights -> concentrations.
void sweep(GibbsState& state, const Dataset& data, const BaseMeasure& base, Rng& rng,
           bool update_concentrations = true);

struct RunInfo {
  Truncation trunc;
  std::optional<ConcentrationEstimate> pilot;  // set when the truncation was chosen automatically
  std::size_t draws = 0;
};

// Resolves an AutoTruncation by running the pilot chain (stream index 1).
RunInfo resolve_truncation(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg);

// Runs the blocked Gibbs chain (stream index 0) and reports every retained
// draw (iteration > burn_in, every `thin`-th) to `observer`.
RunInfo run_chain(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg,
                  const DrawObserver& observer);
Chain run_chain(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg);

}  // namespace edpm
