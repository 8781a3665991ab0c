#include "edpm/rng.hpp"

#include <cmath>
#include <limits>

#include "edpm/errors.hpp"
#include "edpm/numeric.hpp"

namespace edpm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = splitmix64(seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

namespace random {

double uniform(Rng& rng) {
  // (0, 1): never returns an exact zero, so log(u) is finite.
  constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(rng() >> 11) + 0.5) * scale;
}

double normal(Rng& rng, double mean, double sd) {
  std::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

double log_gamma_variate(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
  if (shape >= 1.0) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return std::log(dist(rng));
  }
  // Gamma(a) = Gamma(a + 1) * U^{1/a}
  std::gamma_distribution<double> dist(shape + 1.0, 1.0);
  const double g = dist(rng);
  return std::log(g) + std::log(uniform(rng)) / shape;
}

double gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("gamma shape and rate must be positive");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

double beta(Rng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta parameters must be positive");
  if (a >= 1.0 && b >= 1.0) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
  }
  const double lx = log_gamma_variate(rng, a);
  const double ly = log_gamma_variate(rng, b);
  const double hi = std::max(lx, ly);
  return std::exp(lx - hi) / (std::exp(lx - hi) + std::exp(ly - hi));
}

BetaDraw beta_with_complement(Rng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta parameters must be positive");
  const double lx = log_gamma_variate(rng, a);
  const double ly = log_gamma_variate(rng, b);
  const double hi = std::max(lx, ly);
  const double log_total = hi + std::log(std::exp(lx - hi) + std::exp(ly - hi));
  return BetaDraw{std::exp(lx - log_total), ly - log_total};
}

double inverse_gamma(Rng& rng, double shape, double rate) {
  return 1.0 / gamma(rng, shape, rate);
}

std::size_t categorical_log(Rng& rng, std::span<const double> log_mass) {
  double hi = numeric::kNegInf;
  for (double v : log_mass) {
    if (std::isnan(v)) throw NumericalError("categorical log-mass is NaN");
    hi = std::max(hi, v);
  }
  if (hi == numeric::kNegInf) throw NumericalError("all categorical masses underflow");
  double total = 0.0;
  for (double v : log_mass) total += std::exp(v - hi);
  double u = uniform(rng) * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < log_mass.size(); ++i) {
    const double m = std::exp(log_mass[i] - hi);
    if (m > 0.0) last_positive = i;
    if (u < m) return i;
    u -= m;
  }
  return last_positive;
}

std::size_t categorical(Rng& rng, std::span<const double> mass) {
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0)) throw NumericalError("categorical mass must be non-negative");
    total += m;
  }
  if (!(total > 0.0)) throw NumericalError("categorical masses sum to zero");
  double u = uniform(rng) * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] > 0.0) last_positive = i;
    if (u < mass[i]) return i;
    u -= mass[i];
  }
  return last_positive;
}

Eigen::VectorXd normal_from_precision_cholesky(Rng& rng, const Eigen::VectorXd& mean,
                                               const Eigen::MatrixXd& precision_lower,
                                               double scale) {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  // Solve L^T u = z: Cov(u) = (L L^T)^{-1}.
  Eigen::VectorXd u = precision_lower.transpose().triangularView<Eigen::Upper>().solve(z);
  return mean + scale * u;
}

}  // namespace random
}  // namespace edpm
