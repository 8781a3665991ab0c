#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Core>

namespace edpm {

// One stream per chain. Every stochastic operation takes the stream
// explicitly, so a run is reproducible from (seed, config).
using Rng = std::mt19937_64;

// Seeds an independent stream for (seed, index) through a splitmix64 mix,
// used for per-chain and per-shard substreams.
Rng make_stream(std::uint64_t seed, std::uint64_t index = 0);

namespace random {

double uniform(Rng& rng);
double normal(Rng& rng, double mean = 0.0, double sd = 1.0);

// Gamma with shape/rate parameterisation (mean shape/rate).
double gamma(Rng& rng, double shape, double rate);

// log of a Gamma(shape, 1) draw; stays finite for very small shapes.
double log_gamma_variate(Rng& rng, double shape);

double beta(Rng& rng, double a, double b);

// A Beta(a, b) draw together with log(1 - value), computed from the gamma
// variates so it stays exact when the value rounds to 1.
struct BetaDraw {
  double value;
  double log1m;
};
BetaDraw beta_with_complement(Rng& rng, double a, double b);

// tau ~ IG(shape, rate), i.e. 1/tau ~ Gamma(shape, rate).
double inverse_gamma(Rng& rng, double shape, double rate);

// Index drawn with probability proportional to exp(log_mass[i]). Uses
// max-subtraction before exponentiation. Throws NumericalError when every
// entry is -inf or any entry is NaN.
std::size_t categorical_log(Rng& rng, std::span<const double> log_mass);

// Same draw with already non-negative masses. Renormalises internally.
std::size_t categorical(Rng& rng, std::span<const double> mass);

// mean + L^{-T} z * scale, where L is the lower Cholesky factor of a
// precision matrix; the result has covariance scale^2 * precision^{-1}.
Eigen::VectorXd normal_from_precision_cholesky(Rng& rng, const Eigen::VectorXd& mean,
                                               const Eigen::MatrixXd& precision_lower,
                                               double scale);

}  // namespace random
}  // namespace edpm
