#include "edpm/blocked_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edpm/conjugate.hpp"
#include "edpm/errors.hpp"
#include "edpm/numeric.hpp"

namespace edpm {

namespace {

constexpr double kMinOneMinusV = 1e-15;

// log(1 - V_k), using the exact complement when available; the clamp only
// applies where V_k is exactly 1.
double log_complement(const StickWeights& sw, std::size_t k) {
  double v = k < sw.log1m_V.size() ? sw.log1m_V[k] : std::log1p(-sw.V[k]);
  if (!std::isfinite(v)) v = std::log(kMinOneMinusV);
  return v;
}

std::size_t as_size(int v) { return static_cast<std::size_t>(v); }

StickWeights draw_sticks(std::span<const BetaParams> params, Rng& rng) {
  std::vector<double> V(params.size() + 1, 1.0);
  std::vector<double> log1m(params.size() + 1, 0.0);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto d = random::beta_with_complement(rng, params[k].a, params[k].b);
    V[k] = d.value;
    log1m[k] = d.log1m;
  }
  return make_stick_weights(std::move(V), std::move(log1m));
}

StickWeights prior_sticks(int L, double alpha, Rng& rng) {
  std::vector<BetaParams> params(as_size(L - 1), BetaParams{1.0, alpha});
  return draw_sticks(params, rng);
}

}  // namespace

void ChainConfig::validate() const {
  if (iterations == 0) throw DomainError("iterations must be positive");
  if (burn_in >= iterations) throw DomainError("burn_in must be smaller than iterations");
  if (thin == 0) throw DomainError("thin must be positive");
  if (const auto* a = std::get_if<AutoTruncation>(&trunc)) {
    if (!(a->epsilon > 0.0 && a->epsilon < 1.0)) throw DomainError("auto truncation epsilon must lie in (0, 1)");
    if (a->pilot_burn_in >= a->pilot_iterations) throw DomainError("pilot burn-in must be smaller than pilot iterations");
  }
}

std::vector<BetaParams> stick_posterior(std::span<const int> counts, double alpha) {
  if (counts.size() < 2) throw DomainError("stick posterior needs at least two clusters");
  std::vector<BetaParams> params(counts.size() - 1);
  double tail = 0.0;
  for (std::size_t k = counts.size(); k-- > 1;) {
    tail += counts[k];
    params[k - 1] = BetaParams{counts[k - 1] + 1.0, alpha + tail};
  }
  return params;
}

ShapeRate concentration_posterior(const StickWeights& sticks, double eta1, double eta2) {
  double log_sum = 0.0;
  for (std::size_t k = 0; k + 1 < sticks.V.size(); ++k) {
    log_sum += log_complement(sticks, k);
  }
  return ShapeRate{static_cast<double>(sticks.V.size()) + eta1 - 1.0, eta2 - log_sum};
}

ShapeRate shared_concentration_posterior(std::span<const StickWeights> sticks, double eta1,
                                         double eta2) {
  double log_sum = 0.0;
  double free_sticks = 0.0;
  for (const auto& sw : sticks) {
    for (std::size_t j = 0; j + 1 < sw.V.size(); ++j) {
      log_sum += log_complement(sw, j);
      free_sticks += 1.0;
    }
  }
  return ShapeRate{free_sticks + eta1 - 1.0, eta2 - log_sum};
}

void update_regression_atoms(GibbsState& state, const Dataset& data, const BaseMeasure& base,
                             Rng& rng) {
  const auto N = as_size(state.trunc.N);
  std::vector<RegressionStats> stats(N, RegressionStats(data.p()));
  for (std::size_t i = 0; i < data.n(); ++i) {
    stats[as_size(state.K[i])].add(data.design_row(i), data.y[static_cast<Eigen::Index>(i)]);
  }
  for (std::size_t k = 0; k < N; ++k) {
    state.theta_atoms[k] = draw_theta_posterior(stats[k], base, state.theta_atoms[k].tau_y, rng);
  }
}

void update_covariate_atoms(GibbsState& state, const Dataset& data, const BaseMeasure& base,
                            Rng& rng) {
  const auto N = as_size(state.trunc.N);
  const auto M = as_size(state.trunc.M);
  std::vector<CovariateStats> stats(N * M, CovariateStats(data.p()));
  for (std::size_t i = 0; i < data.n(); ++i) {
    stats[as_size(state.K[i]) * M + as_size(state.J[i])].add(
        data.X.row(static_cast<Eigen::Index>(i)).transpose());
  }
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t j = 0; j < M; ++j) {
      state.psi_atoms[k][j] = draw_psi_posterior(stats[k * M + j], base, state.psi_atoms[k][j], rng);
    }
  }
}

namespace {

// Flattened per-sweep view of the atoms for the N x M assignment kernel.
struct AssignmentTables {
  std::size_t N, M, p;
  std::vector<double> theta_const;  // log p_k - log(tau_y)/2
  std::vector<double> theta_prec;   // 1 / tau_y
  std::vector<double> psi_const;    // log p_{j|k} - sum_l log(tau)/2
  std::vector<double> psi_mu;
  std::vector<double> psi_prec;

  explicit AssignmentTables(const GibbsState& s)
      : N(as_size(s.trunc.N)), M(as_size(s.trunc.M)), p(0) {
    p = static_cast<std::size_t>(s.psi_atoms[0][0].mu.size());
    theta_const.resize(N);
    theta_prec.resize(N);
    psi_const.resize(N * M);
    psi_mu.resize(N * M * p);
    psi_prec.resize(N * M * p);
    for (std::size_t k = 0; k < N; ++k) {
      const double w = s.theta_weights.w[k];
      theta_const[k] = (w > 0.0 ? std::log(w) : numeric::kNegInf) - 0.5 * std::log(s.theta_atoms[k].tau_y);
      theta_prec[k] = 1.0 / s.theta_atoms[k].tau_y;
      for (std::size_t j = 0; j < M; ++j) {
        const std::size_t c = k * M + j;
        const double wj = s.psi_weights[k].w[j];
        const PsiAtom& a = s.psi_atoms[k][j];
        double log_tau = 0.0;
        for (std::size_t l = 0; l < p; ++l) {
          const auto li = static_cast<Eigen::Index>(l);
          psi_mu[c * p + l] = a.mu[li];
          psi_prec[c * p + l] = 1.0 / a.tau_x[li];
          log_tau += std::log(a.tau_x[li]);
        }
        psi_const[c] = (wj > 0.0 ? std::log(wj) : numeric::kNegInf) - 0.5 * log_tau;
      }
    }
  }

  void log_mass(const GibbsState& s, const Dataset& data, std::size_t i, std::vector<double>& out) const {
    out.assign(N * M, numeric::kNegInf);
    const auto ii = static_cast<Eigen::Index>(i);
    const double y = data.y[ii];
    const double* x = nullptr;
    Eigen::VectorXd row = data.X.row(ii).transpose();
    x = row.data();
    for (std::size_t k = 0; k < N; ++k) {
      if (theta_const[k] == numeric::kNegInf) continue;
      const ThetaAtom& t = s.theta_atoms[k];
      double fit = t.beta[0];
      for (std::size_t l = 0; l < p; ++l) fit += t.beta[static_cast<Eigen::Index>(l + 1)] * x[l];
      const double r = y - fit;
      const double ly = theta_const[k] - 0.5 * r * r * theta_prec[k];
      for (std::size_t j = 0; j < M; ++j) {
        const std::size_t c = k * M + j;
        if (psi_const[c] == numeric::kNegInf) continue;
        const double* mu = &psi_mu[c * p];
        const double* prec = &psi_prec[c * p];
        double q = 0.0;
        for (std::size_t l = 0; l < p; ++l) {
          const double d = x[l] - mu[l];
          q += d * d * prec[l];
        }
        out[c] = ly + psi_const[c] - 0.5 * q;
      }
    }
  }
};

}  // namespace

std::vector<double> assignment_log_mass(const GibbsState& state, const Dataset& data, std::size_t i) {
  AssignmentTables tables(state);
  std::vector<double> out;
  tables.log_mass(state, data, i, out);
  return out;
}

void update_assignments(GibbsState& state, const Dataset& data, Rng& rng) {
  const AssignmentTables tables(state);
  std::vector<double> mass;
  state.K.resize(data.n());
  state.J.resize(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    tables.log_mass(state, data, i, mass);
    const std::size_t c = random::categorical_log(rng, mass);
    state.K[i] = static_cast<int>(c / tables.M);
    state.J[i] = static_cast<int>(c % tables.M);
  }
}

void update_theta_weights(GibbsState& state, Rng& rng) {
  const auto counts = occupancy_counts(state.K, state.J, state.trunc);
  state.theta_weights = draw_sticks(stick_posterior(counts.n_k, state.alpha_theta), rng);
}

void update_psi_weights(GibbsState& state, Rng& rng) {
  const auto counts = occupancy_counts(state.K, state.J, state.trunc);
  for (std::size_t k = 0; k < as_size(state.trunc.N); ++k) {
    state.psi_weights[k] =
        draw_sticks(stick_posterior(counts.n_kj[k], state.alpha_psi[k]), rng);
  }
}

void update_concentration_theta(GibbsState& state, const Hyperparameters& hp, Rng& rng) {
  const auto post = concentration_posterior(state.theta_weights, hp.eta_y1, hp.eta_y2);
  state.alpha_theta = random::gamma(rng, post.shape, post.rate);
}

void update_concentration_psi(GibbsState& state, const Hyperparameters& hp, Rng& rng) {
  if (hp.alpha_psi_shared) {
    const auto post = shared_concentration_posterior(state.psi_weights, hp.eta_x1, hp.eta_x2);
    const double alpha = random::gamma(rng, post.shape, post.rate);
    std::fill(state.alpha_psi.begin(), state.alpha_psi.end(), alpha);
    return;
  }
  for (std::size_t k = 0; k < state.alpha_psi.size(); ++k) {
    const auto post = concentration_posterior(state.psi_weights[k], hp.eta_x1, hp.eta_x2);
    state.alpha_psi[k] = random::gamma(rng, post.shape, post.rate);
  }
}

GibbsState initial_state(const Dataset& data, const BaseMeasure& base, const Truncation& trunc,
                         InitPolicy policy, Rng& rng) {
  const Hyperparameters& hp = base.hyper();
  if (hp.p() != data.p()) throw DomainError("hyperparameters do not match the dataset's covariate count");
  const auto N = as_size(trunc.N);
  const auto M = as_size(trunc.M);
  GibbsState s;
  s.trunc = trunc;
  s.alpha_theta = random::gamma(rng, hp.eta_y1, hp.eta_y2);
  s.alpha_psi.assign(N, 0.0);
  if (hp.alpha_psi_shared) {
    std::fill(s.alpha_psi.begin(), s.alpha_psi.end(), random::gamma(rng, hp.eta_x1, hp.eta_x2));
  } else {
    for (auto& a : s.alpha_psi) a = random::gamma(rng, hp.eta_x1, hp.eta_x2);
  }
  s.theta_weights = prior_sticks(trunc.N, s.alpha_theta, rng);
  s.psi_weights.reserve(N);
  for (std::size_t k = 0; k < N; ++k) {
    s.psi_weights.push_back(prior_sticks(trunc.M, s.alpha_psi[k], rng));
  }
  s.theta_atoms.reserve(N);
  s.psi_atoms.assign(N, {});
  for (std::size_t k = 0; k < N; ++k) {
    s.theta_atoms.push_back(base.draw_theta(rng));
    s.psi_atoms[k].reserve(M);
    for (std::size_t j = 0; j < M; ++j) s.psi_atoms[k].push_back(base.draw_psi(rng));
  }
  if (policy == InitPolicy::single_cluster) {
    s.K.assign(data.n(), 0);
    s.J.assign(data.n(), 0);
  } else {
    update_assignments(s, data, rng);
  }
  return s;
}

void sweep(GibbsState& state, const Dataset& data, const BaseMeasure& base, Rng& rng,
           bool update_concentrations) {
  update_regression_atoms(state, data, base, rng);
  update_covariate_atoms(state, data, base, rng);
  update_assignments(state, data, rng);
  update_theta_weights(state, rng);
  update_psi_weights(state, rng);
  if (update_concentrations) {
    update_concentration_theta(state, base.hyper(), rng);
    update_concentration_psi(state, base.hyper(), rng);
  }
}

namespace {

void run_fixed(const Dataset& data, const BaseMeasure& base, const Truncation& trunc,
               const ChainConfig& cfg, Rng& rng, std::size_t iterations, std::size_t burn_in,
               std::size_t thin, const DrawObserver& observer) {
  GibbsState state = initial_state(data, base, trunc, cfg.init, rng);
  for (std::size_t it = 1; it <= iterations; ++it) {
    sweep(state, data, base, rng, cfg.update_concentrations);
    try {
      state.check_invariants();
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "blocked Gibbs state invalid after iteration " << it << ": " << e.what();
      throw NumericalError(msg.str());
    }
    if (it > burn_in && (it - burn_in) % thin == 0) observer(ChainDraw{it, state});
  }
}

}  // namespace

RunInfo resolve_truncation(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg) {
  cfg.validate();
  if (const auto* fixed = std::get_if<Truncation>(&cfg.trunc)) return RunInfo{*fixed, std::nullopt, 0};
  const auto& autotrunc = std::get<AutoTruncation>(cfg.trunc);
  const BaseMeasure base(hp);
  Rng rng = make_stream(cfg.seed, 1);
  std::vector<double> a_theta;
  std::vector<double> a_psi;
  run_fixed(data, base, autotrunc.pilot, cfg, rng, autotrunc.pilot_iterations,
            autotrunc.pilot_burn_in, 1, [&](const ChainDraw& d) {
              a_theta.push_back(d.alpha_theta());
              a_psi.push_back(d.alpha_psi_max());
            });
  const auto est = estimate_concentrations(a_theta, a_psi);
  const auto pair = min_truncation(static_cast<double>(data.n()), est.alpha_theta, est.alpha_psi_max,
                                   autotrunc.epsilon);
  return RunInfo{Truncation{pair.N, pair.M}, est, 0};
}

RunInfo run_chain(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg,
                  const DrawObserver& observer) {
  data.validate();
  RunInfo info = resolve_truncation(data, hp, cfg);
  const BaseMeasure base(hp);
  Rng rng = make_stream(cfg.seed, 0);
  run_fixed(data, base, info.trunc, cfg, rng, cfg.iterations, cfg.burn_in, cfg.thin,
            [&](const ChainDraw& d) {
              ++info.draws;
              observer(d);
            });
  return info;
}

Chain run_chain(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg) {
  Chain chain;
  run_chain(data, hp, cfg, [&](const ChainDraw& d) { chain.draws.push_back(d); });
  return chain;
}

}  // namespace edpm
