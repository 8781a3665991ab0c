#include "edpm/polya_urn.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "edpm/conjugate.hpp"
#include "edpm/errors.hpp"
#include "edpm/numeric.hpp"

namespace edpm {

void UrnState::check_invariants() const {
  if (K.size() != J.size()) throw DomainError("urn label vectors differ in length");
  if (!(alpha_theta > 0.0) || !std::isfinite(alpha_theta)) throw NumericalError("alpha_theta must be positive");
  if (m_aux < 1) throw DomainError("m_aux must be at least 1");
  std::vector<std::vector<std::size_t>> counts(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) counts[k].assign(clusters[k].psi.size(), 0);
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (K[i] < 0 || static_cast<std::size_t>(K[i]) >= clusters.size()) {
      throw DomainError("urn theta label out of range");
    }
    const auto k = static_cast<std::size_t>(K[i]);
    if (J[i] < 0 || static_cast<std::size_t>(J[i]) >= clusters[k].psi.size()) {
      throw DomainError("urn psi label out of range");
    }
    ++counts[k][static_cast<std::size_t>(J[i])];
  }
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    const auto& c = clusters[k];
    if (c.size == 0 || c.psi.empty()) throw DomainError("empty theta-cluster retained");
    if (!(c.alpha_psi > 0.0) || !std::isfinite(c.alpha_psi)) throw NumericalError("alpha_psi must be positive");
    if (!c.atom.beta.allFinite() || !(c.atom.tau_y > 0.0) || !std::isfinite(c.atom.tau_y)) {
      throw NumericalError("theta atom is not finite/positive");
    }
    std::size_t total = 0;
    for (std::size_t j = 0; j < c.psi.size(); ++j) {
      const auto& q = c.psi[j];
      if (q.size == 0) throw DomainError("empty psi-cluster retained");
      if (q.size != counts[k][j]) throw DomainError("psi-cluster size disagrees with labels");
      if (!q.atom.mu.allFinite() || !q.atom.tau_x.allFinite() || !(q.atom.tau_x.array() > 0.0).all()) {
        throw NumericalError("psi atom is not finite/positive");
      }
      total += q.size;
    }
    if (total != c.size) throw DomainError("theta-cluster size disagrees with its psi-clusters");
  }
}

void UrnConfig::validate() const {
  if (iterations == 0) throw DomainError("iterations must be positive");
  if (burn_in >= iterations) throw DomainError("burn_in must be smaller than iterations");
  if (thin == 0) throw DomainError("thin must be positive");
  if (m_aux < 1) throw DomainError("m_aux must be at least 1");
}

namespace {

struct Vacated {
  bool theta = false;  // the observation was alone in its theta-cluster
  bool psi = false;    // alone in its psi-cluster only
  int k = -1;          // theta-cluster that lost the psi-cluster
  ThetaAtom theta_atom;
  PsiAtom psi_atom;
  double alpha_psi = 1.0;
};

void erase_psi(UrnState& s, int k, int j) {
  auto& psi = s.clusters[static_cast<std::size_t>(k)].psi;
  const int last = static_cast<int>(psi.size()) - 1;
  if (j != last) {
    psi[static_cast<std::size_t>(j)] = std::move(psi.back());
    for (std::size_t i = 0; i < s.K.size(); ++i) {
      if (s.K[i] == k && s.J[i] == last) s.J[i] = j;
    }
  }
  psi.pop_back();
}

void erase_theta(UrnState& s, int k) {
  const int last = static_cast<int>(s.clusters.size()) - 1;
  if (k != last) {
    s.clusters[static_cast<std::size_t>(k)] = std::move(s.clusters.back());
    for (auto& label : s.K) {
      if (label == last) label = k;
    }
  }
  s.clusters.pop_back();
}

Vacated remove_observation(UrnState& s, std::size_t i) {
  Vacated v;
  const int k = s.K[i];
  const int j = s.J[i];
  s.K[i] = -1;
  s.J[i] = -1;
  auto& c = s.clusters[static_cast<std::size_t>(k)];
  auto& q = c.psi[static_cast<std::size_t>(j)];
  --c.size;
  --q.size;
  if (c.size == 0) {
    v.theta = true;
    v.theta_atom = std::move(c.atom);
    v.psi_atom = std::move(q.atom);
    v.alpha_psi = c.alpha_psi;
    erase_theta(s, k);
  } else if (q.size == 0) {
    v.psi = true;
    v.k = k;
    v.psi_atom = std::move(q.atom);
    erase_psi(s, k, j);
  }
  return v;
}

double new_cluster_alpha_psi(const UrnState& s, const Hyperparameters& hp, bool fixed, Rng& rng) {
  if (fixed || hp.alpha_psi_shared) return s.alpha_psi_common;
  return random::gamma(rng, hp.eta_x1, hp.eta_x2);
}

struct Option {
  int k;  // existing theta-cluster, or -1 for an auxiliary theta-cluster
  int j;  // existing psi-cluster, or -1 for an auxiliary psi atom
  int aux;
};

void seat_observation(UrnState& s, std::size_t i, const Dataset& data, const BaseMeasure& base,
                      Rng& rng, bool fixed, Vacated vacated) {
  const Hyperparameters& hp = base.hyper();
  const auto ii = static_cast<Eigen::Index>(i);
  const double y = data.y[ii];
  const Eigen::VectorXd x = data.X.row(ii).transpose();
  const Eigen::VectorXd design = edpm::design_row(x);
  const int m = s.m_aux;
  const double log_m = std::log(static_cast<double>(m));

  std::vector<double> log_mass;
  std::vector<Option> options;
  std::vector<PsiAtom> aux_psi;

  for (std::size_t k = 0; k < s.clusters.size(); ++k) {
    const auto& c = s.clusters[k];
    const double nk = static_cast<double>(c.size);
    const double head = std::log(nk) - std::log(c.alpha_psi + nk) +
                        log_response_density(y, design, c.atom);
    for (std::size_t j = 0; j < c.psi.size(); ++j) {
      log_mass.push_back(head + std::log(static_cast<double>(c.psi[j].size)) +
                         log_covariate_density(x, c.psi[j].atom));
      options.push_back({static_cast<int>(k), static_cast<int>(j), -1});
    }
    const double aux_head = head + std::log(c.alpha_psi) - log_m;
    for (int a = 0; a < m; ++a) {
      if (a == 0 && vacated.psi && vacated.k == static_cast<int>(k)) {
        aux_psi.push_back(vacated.psi_atom);
      } else {
        aux_psi.push_back(base.draw_psi(rng));
      }
      log_mass.push_back(aux_head + log_covariate_density(x, aux_psi.back()));
      options.push_back({static_cast<int>(k), -1, static_cast<int>(aux_psi.size() - 1)});
    }
  }

  std::vector<UrnThetaCluster> aux_theta;
  aux_theta.reserve(static_cast<std::size_t>(m));
  const double new_head = std::log(s.alpha_theta) - log_m;
  for (int a = 0; a < m; ++a) {
    UrnThetaCluster c;
    if (a == 0 && vacated.theta) {
      c.atom = vacated.theta_atom;
      c.alpha_psi = vacated.alpha_psi;
      c.psi.push_back({vacated.psi_atom, 0});
    } else {
      c.atom = base.draw_theta(rng);
      c.psi.push_back({base.draw_psi(rng), 0});
      c.alpha_psi = new_cluster_alpha_psi(s, hp, fixed, rng);
    }
    log_mass.push_back(new_head + log_response_density(y, design, c.atom) +
                       log_covariate_density(x, c.psi[0].atom));
    options.push_back({-1, -1, a});
    aux_theta.push_back(std::move(c));
  }

  const Option pick = options[random::categorical_log(rng, log_mass)];
  int k = pick.k;
  int j = pick.j;
  if (k < 0) {
    s.clusters.push_back(std::move(aux_theta[static_cast<std::size_t>(pick.aux)]));
    k = static_cast<int>(s.clusters.size()) - 1;
    j = 0;
  } else if (j < 0) {
    auto& psi = s.clusters[static_cast<std::size_t>(k)].psi;
    psi.push_back({std::move(aux_psi[static_cast<std::size_t>(pick.aux)]), 0});
    j = static_cast<int>(psi.size()) - 1;
  }
  auto& c = s.clusters[static_cast<std::size_t>(k)];
  ++c.size;
  ++c.psi[static_cast<std::size_t>(j)].size;
  s.K[i] = k;
  s.J[i] = j;
}

}  // namespace

void pu_update_assignments(UrnState& state, const Dataset& data, const BaseMeasure& base, Rng& rng,
                           bool fixed_concentrations) {
  for (std::size_t i = 0; i < data.n(); ++i) {
    Vacated v = remove_observation(state, i);
    seat_observation(state, i, data, base, rng, fixed_concentrations, std::move(v));
  }
}

void pu_update_cluster_params(UrnState& state, const Dataset& data, const BaseMeasure& base,
                              Rng& rng) {
  const std::size_t p = data.p();
  std::vector<RegressionStats> reg(state.clusters.size(), RegressionStats(p));
  std::vector<std::vector<CovariateStats>> cov(state.clusters.size());
  for (std::size_t k = 0; k < state.clusters.size(); ++k) {
    cov[k].assign(state.clusters[k].psi.size(), CovariateStats(p));
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto k = static_cast<std::size_t>(state.K[i]);
    const auto j = static_cast<std::size_t>(state.J[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    reg[k].add(data.design_row(i), data.y[ii]);
    cov[k][j].add(data.X.row(ii).transpose());
  }
  for (std::size_t k = 0; k < state.clusters.size(); ++k) {
    auto& c = state.clusters[k];
    c.atom = draw_theta_posterior(reg[k], base, c.atom.tau_y, rng);
    for (std::size_t j = 0; j < c.psi.size(); ++j) {
      c.psi[j].atom = draw_psi_posterior(cov[k][j], base, c.psi[j].atom, rng);
    }
  }
}

double draw_dp_concentration(double alpha, std::span<const std::size_t> items,
                             std::span<const std::size_t> clusters, double shape, double rate,
                             Rng& rng) {
  if (items.size() != clusters.size()) throw DomainError("group counts differ in length");
  double log_w = 0.0;
  double k_minus_s = 0.0;
  for (std::size_t g = 0; g < items.size(); ++g) {
    const double n = static_cast<double>(items[g]);
    if (n <= 0.0) throw DomainError("concentration group has no items");
    log_w += std::log(random::beta(rng, alpha + 1.0, n));
    const bool s = random::uniform(rng) < n / (n + alpha);
    k_minus_s += static_cast<double>(clusters[g]) - (s ? 1.0 : 0.0);
  }
  return random::gamma(rng, shape + k_minus_s, rate - log_w);
}

void pu_update_concentrations(UrnState& state, const Hyperparameters& hp, Rng& rng) {
  {
    const std::size_t n = state.n();
    const std::size_t k = state.clusters.size();
    state.alpha_theta = draw_dp_concentration(state.alpha_theta, std::span(&n, 1), std::span(&k, 1),
                                              hp.eta_y1, hp.eta_y2, rng);
  }
  if (hp.alpha_psi_shared) {
    std::vector<std::size_t> items;
    std::vector<std::size_t> counts;
    for (const auto& c : state.clusters) {
      items.push_back(c.size);
      counts.push_back(c.psi.size());
    }
    if (!items.empty()) {
      state.alpha_psi_common = draw_dp_concentration(state.alpha_psi_common, items, counts,
                                                     hp.eta_x1, hp.eta_x2, rng);
    } else {
      state.alpha_psi_common = random::gamma(rng, hp.eta_x1, hp.eta_x2);
    }
    for (auto& c : state.clusters) c.alpha_psi = state.alpha_psi_common;
    return;
  }
  for (auto& c : state.clusters) {
    const std::size_t n = c.size;
    const std::size_t k = c.psi.size();
    c.alpha_psi = draw_dp_concentration(c.alpha_psi, std::span(&n, 1), std::span(&k, 1), hp.eta_x1,
                                        hp.eta_x2, rng);
  }
}

UrnState initial_urn_state(const Dataset& data, const BaseMeasure& base, const UrnConfig& cfg,
                           Rng& rng) {
  const Hyperparameters& hp = base.hyper();
  if (hp.p() != data.p()) throw DomainError("hyperparameters do not match the dataset's covariate count");
  UrnState s;
  s.m_aux = cfg.m_aux;
  s.alpha_theta = random::gamma(rng, hp.eta_y1, hp.eta_y2);
  s.alpha_psi_common = random::gamma(rng, hp.eta_x1, hp.eta_x2);
  s.K.assign(data.n(), -1);
  s.J.assign(data.n(), -1);
  if (data.n() == 0) return s;
  if (cfg.init == InitPolicy::single_cluster) {
    UrnThetaCluster c;
    c.atom = base.draw_theta(rng);
    c.alpha_psi = new_cluster_alpha_psi(s, hp, !cfg.update_concentrations, rng);
    c.size = data.n();
    c.psi.push_back({base.draw_psi(rng), data.n()});
    s.clusters.push_back(std::move(c));
    std::fill(s.K.begin(), s.K.end(), 0);
    std::fill(s.J.begin(), s.J.end(), 0);
    pu_update_cluster_params(s, data, base, rng);
    return s;
  }
  for (std::size_t i = 0; i < data.n(); ++i) {
    seat_observation(s, i, data, base, rng, !cfg.update_concentrations, Vacated{});
  }
  return s;
}

void pu_sweep(UrnState& state, const Dataset& data, const BaseMeasure& base, Rng& rng,
              bool update_concentrations) {
  pu_update_assignments(state, data, base, rng, !update_concentrations);
  pu_update_cluster_params(state, data, base, rng);
  if (update_concentrations) pu_update_concentrations(state, base.hyper(), rng);
}

std::size_t run_pu_chain(const Dataset& data, const Hyperparameters& hp, const UrnConfig& cfg,
                         const DrawObserver& observer) {
  cfg.validate();
  data.validate();
  const BaseMeasure base(hp);
  Rng rng = make_stream(cfg.seed, 0);
  UrnState state = initial_urn_state(data, base, cfg, rng);
  std::size_t draws = 0;
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    pu_sweep(state, data, base, rng, cfg.update_concentrations);
    try {
      state.check_invariants();
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "urn state invalid after iteration " << it << ": " << e.what();
      throw NumericalError(msg.str());
    }
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      ++draws;
      observer(ChainDraw{it, state});
    }
  }
  return draws;
}

Chain run_pu_chain(const Dataset& data, const Hyperparameters& hp, const UrnConfig& cfg) {
  Chain chain;
  run_pu_chain(data, hp, cfg, [&](const ChainDraw& d) { chain.draws.push_back(d); });
  return chain;
}

}  // namespace edpm
