#include "edpm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <vector>

#include "edpm/errors.hpp"

namespace edpm {

void BoundQuery::validate() const {
  if (!(n >= 0.0)) throw DomainError("sample size must be non-negative");
  if (N < 2 || M < 2) throw DomainError("truncation levels must be >= 2");
  if (!(alpha_theta > 0.0) || !(alpha_psi > 0.0)) {
    throw DomainError("concentration parameters must be positive");
  }
}

BoundResult l1_bound(const BoundQuery& q) {
  q.validate();
  BoundResult r;
  r.theta_term = std::exp(-(q.N - 1) / q.alpha_theta);
  r.psi_term = std::exp(-(q.M - 1) / q.alpha_psi);
  r.bound = 4.0 * q.n * (r.theta_term + r.psi_term * (1.0 - r.theta_term));
  return r;
}

BoundResult l1_bound_varying(double n, int N, int M, double alpha_theta,
                             std::span<const double> alpha_psi) {
  if (alpha_psi.empty()) throw DomainError("per-cluster concentration list is empty");
  const double alpha_max = *std::max_element(alpha_psi.begin(), alpha_psi.end());
  return l1_bound(BoundQuery{n, N, M, alpha_theta, alpha_max});
}

namespace {

constexpr std::size_t kShards = 64;

struct ShardSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

// One draw of 1 - (sum_{k<N} p_k sum_{j<M} p_{j|k}) = p_N + sum_{k<N} p_k p_{M|k}.
// Beta(1, a) fractions are drawn as 1 - U^{1/a}; the psi tail product
// prod_{j<M}(1 - V_{j|k}) is exp(-G/a) with G ~ Gamma(M-1, 1), which is the
// same law as the product of M-1 independent U^{1/a}.
double missing_mass(const BoundQuery& q, Rng& rng) {
  std::gamma_distribution<double> tail(static_cast<double>(q.M - 1), 1.0);
  double remaining = 1.0;  // prod_{h<k}(1 - V_h)
  double missing = 0.0;
  for (int k = 0; k < q.N - 1; ++k) {
    const double one_minus_v = std::pow(random::uniform(rng), 1.0 / q.alpha_theta);
    const double p_k = remaining * (1.0 - one_minus_v);
    remaining *= one_minus_v;
    const double p_M_given_k = std::exp(-tail(rng) / q.alpha_psi);
    missing += p_k * p_M_given_k;
  }
  return missing + remaining;  // remaining == p_N
}

}  // namespace

McEstimate exact_bound_mc(const BoundQuery& q, std::size_t draws, std::uint64_t seed,
                          unsigned workers) {
  q.validate();
  if (draws < 2) throw DomainError("exact_bound_mc needs at least two draws");
  std::vector<ShardSums> shards(kShards);
  auto run_shard = [&](std::size_t s) {
    Rng rng = make_stream(seed, s);
    const std::size_t begin = draws * s / kShards;
    const std::size_t end = draws * (s + 1) / kShards;
    ShardSums acc;
    for (std::size_t d = begin; d < end; ++d) {
      const double missing = std::min(missing_mass(q, rng), 1.0);
      const double value = -4.0 * std::expm1(q.n * std::log1p(-missing));
      acc.sum += value;
      acc.sum_sq += value * value;
    }
    shards[s] = acc;
  };
  workers = std::max(1u, std::min<unsigned>(workers, kShards));
  if (workers == 1) {
    for (std::size_t s = 0; s < kShards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < kShards; s += workers) run_shard(s);
      });
    }
    for (auto& t : pool) t.join();
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& s : shards) {
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const double count = static_cast<double>(draws);
  const double mean = sum / count;
  const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
  return McEstimate{mean, std::sqrt(var / count)};
}

namespace {

int smallest_level(double n, double alpha, double half_eps) {
  // 4n exp(-(L-1)/alpha) <= half_eps  <=>  L - 1 >= alpha log(4n / half_eps)
  if (n <= 0.0) return 2;
  const double need = alpha * std::log(4.0 * n / half_eps);
  int level = std::max(2, static_cast<int>(std::ceil(need)) + 1);
  // Guard the ceil against rounding on either side.
  while (level > 2 && 4.0 * n * std::exp(-(level - 2) / alpha) <= half_eps) --level;
  while (4.0 * n * std::exp(-(level - 1) / alpha) > half_eps) ++level;
  return level;
}

}  // namespace

TruncationPair min_truncation(double n, double alpha_theta, double alpha_psi, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(n >= 0.0)) throw DomainError("sample size must be non-negative");
  if (!(alpha_theta > 0.0) || !(alpha_psi > 0.0)) {
    throw DomainError("concentration parameters must be positive");
  }
  TruncationPair pair{smallest_level(n, alpha_theta, epsilon / 2.0),
                      smallest_level(n, alpha_psi, epsilon / 2.0)};
  const auto full = l1_bound(BoundQuery{n, pair.N, pair.M, alpha_theta, alpha_psi});
  if (full.bound > epsilon) throw NumericalError("minimal truncation failed the feasibility check");
  return pair;
}

ConcentrationEstimate estimate_concentrations(std::span<const double> alpha_theta,
                                              std::span<const double> alpha_psi_max) {
  if (alpha_theta.empty() || alpha_theta.size() != alpha_psi_max.size()) {
    throw DomainError("concentration trace is empty or ragged");
  }
  const double count = static_cast<double>(alpha_theta.size());
  return ConcentrationEstimate{
      std::accumulate(alpha_theta.begin(), alpha_theta.end(), 0.0) / count,
      std::accumulate(alpha_psi_max.begin(), alpha_psi_max.end(), 0.0) / count};
}

ConcentrationEstimate estimate_concentrations(const Chain& chain) {
  if (chain.empty()) throw DomainError("cannot estimate concentrations from an empty chain");
  std::vector<double> a_theta;
  std::vector<double> a_psi;
  a_theta.reserve(chain.size());
  a_psi.reserve(chain.size());
  for (const auto& d : chain.draws) {
    a_theta.push_back(d.alpha_theta());
    a_psi.push_back(d.alpha_psi_max());
  }
  return estimate_concentrations(a_theta, a_psi);
}

}  // namespace edpm
