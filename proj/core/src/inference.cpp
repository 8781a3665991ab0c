#include "edpm/inference.hpp"

#include <algorithm>
#include <cmath>

#include "edpm/conjugate.hpp"
#include "edpm/errors.hpp"
#include "edpm/numeric.hpp"

namespace edpm {

namespace {

void check_dims(std::size_t p_state, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != p_state) {
    throw DomainError("covariate vector length does not match the draw");
  }
}

std::vector<double> normalise(std::vector<double> log_w) {
  const double lse = numeric::log_sum_exp(log_w);
  if (!std::isfinite(lse)) throw NumericalError("all mixture weights underflow at this covariate vector");
  for (auto& v : log_w) v = std::exp(v - lse);
  return log_w;
}

std::vector<double> blocked_log_weights(const GibbsState& s, const Eigen::VectorXd& x) {
  check_dims(static_cast<std::size_t>(s.psi_atoms.at(0).at(0).mu.size()), x);
  const auto N = static_cast<std::size_t>(s.trunc.N);
  std::vector<double> out(N, numeric::kNegInf);
  std::vector<double> inner;
  for (std::size_t k = 0; k < N; ++k) {
    const double wk = s.theta_weights.w[k];
    if (wk <= 0.0) continue;
    inner.clear();
    for (std::size_t j = 0; j < s.psi_atoms[k].size(); ++j) {
      const double wj = s.psi_weights[k].w[j];
      if (wj <= 0.0) continue;
      inner.push_back(std::log(wj) + log_covariate_density(x, s.psi_atoms[k][j]));
    }
    if (!inner.empty()) out[k] = std::log(wk) + numeric::log_sum_exp(inner);
  }
  return out;
}

std::vector<double> urn_log_weights(const UrnState& s, const Eigen::VectorXd& x,
                                    const Hyperparameters& hp) {
  check_dims(hp.p(), x);
  const double n = static_cast<double>(s.n());
  const double denom = std::log(s.alpha_theta + n);
  const double prior_x = log_prior_predictive_x(x, hp);
  std::vector<double> out;
  out.reserve(s.clusters.size() + 1);
  std::vector<double> inner;
  for (const auto& c : s.clusters) {
    const double nk = static_cast<double>(c.size);
    const double inner_denom = std::log(c.alpha_psi + nk);
    inner.clear();
    for (const auto& q : c.psi) {
      inner.push_back(std::log(static_cast<double>(q.size)) - inner_denom +
                      log_covariate_density(x, q.atom));
    }
    inner.push_back(std::log(c.alpha_psi) - inner_denom + prior_x);
    out.push_back(std::log(nk) - denom + numeric::log_sum_exp(inner));
  }
  out.push_back(std::log(s.alpha_theta) - denom + prior_x);
  return out;
}

}  // namespace

std::vector<double> theta_mixture_weights(const GibbsState& state, const Eigen::VectorXd& x) {
  return normalise(blocked_log_weights(state, x));
}

double conditional_mean(const GibbsState& state, const Eigen::VectorXd& x) {
  const auto w = theta_mixture_weights(state, x);
  const Eigen::VectorXd design = design_row(x);
  double mean = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] > 0.0) mean += w[k] * design.dot(state.theta_atoms[k].beta);
  }
  return mean;
}

std::vector<double> conditional_means(const GibbsState& state, const Eigen::MatrixXd& X) {
  const auto N = static_cast<std::size_t>(state.trunc.N);
  const auto M = static_cast<std::size_t>(state.trunc.M);
  const auto p = static_cast<std::size_t>(X.cols());
  if (static_cast<std::size_t>(state.psi_atoms.at(0).at(0).mu.size()) != p) {
    throw DomainError("covariate matrix width does not match the draw");
  }
  std::vector<double> log_wk(N);
  std::vector<double> cell_const(N * M);
  std::vector<double> mu(N * M * p);
  std::vector<double> prec(N * M * p);
  for (std::size_t k = 0; k < N; ++k) {
    const double wk = state.theta_weights.w[k];
    log_wk[k] = wk > 0.0 ? std::log(wk) : numeric::kNegInf;
    for (std::size_t j = 0; j < M; ++j) {
      const std::size_t c = k * M + j;
      const auto& a = state.psi_atoms[k][j];
      const double wj = state.psi_weights[k].w[j];
      double log_tau = 0.0;
      for (std::size_t l = 0; l < p; ++l) {
        const auto li = static_cast<Eigen::Index>(l);
        mu[c * p + l] = a.mu[li];
        prec[c * p + l] = 1.0 / a.tau_x[li];
        log_tau += std::log(a.tau_x[li]);
      }
      cell_const[c] = wj > 0.0 ? std::log(wj) - 0.5 * log_tau : numeric::kNegInf;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  std::vector<double> lw(N);
  std::vector<double> inner(M);
  Eigen::VectorXd x(static_cast<Eigen::Index>(p));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    x = X.row(r).transpose();
    for (std::size_t k = 0; k < N; ++k) {
      if (log_wk[k] == numeric::kNegInf) {
        lw[k] = numeric::kNegInf;
        continue;
      }
      for (std::size_t j = 0; j < M; ++j) {
        const std::size_t c = k * M + j;
        double q = 0.0;
        for (std::size_t l = 0; l < p; ++l) {
          const double d = x[static_cast<Eigen::Index>(l)] - mu[c * p + l];
          q += d * d * prec[c * p + l];
        }
        inner[j] = cell_const[c] - 0.5 * q;
      }
      lw[k] = log_wk[k] + numeric::log_sum_exp(inner);
    }
    const auto w = normalise(lw);
    const Eigen::VectorXd design = design_row(x);
    double mean = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      if (w[k] > 0.0) mean += w[k] * design.dot(state.theta_atoms[k].beta);
    }
    out[static_cast<std::size_t>(r)] = mean;
  }
  return out;
}

std::vector<double> conditional_density(const GibbsState& state, const Eigen::VectorXd& x,
                                        std::span<const double> y_grid) {
  const auto w = theta_mixture_weights(state, x);
  const Eigen::VectorXd design = design_row(x);
  std::vector<double> out(y_grid.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] <= 0.0) continue;
    const double loc = design.dot(state.theta_atoms[k].beta);
    for (std::size_t g = 0; g < y_grid.size(); ++g) {
      out[g] += w[k] * std::exp(numeric::log_normal_pdf(y_grid[g], loc, state.theta_atoms[k].tau_y));
    }
  }
  return out;
}

Predictor::Predictor(const Hyperparameters& hp) : base_(hp) {}

std::vector<double> Predictor::theta_weights(const ChainDraw& draw, const Eigen::VectorXd& x) const {
  if (const auto* g = std::get_if<GibbsState>(&draw.state)) return theta_mixture_weights(*g, x);
  return normalise(urn_log_weights(std::get<UrnState>(draw.state), x, base_.hyper()));
}

double Predictor::conditional_mean(const ChainDraw& draw, const Eigen::VectorXd& x) const {
  if (const auto* g = std::get_if<GibbsState>(&draw.state)) return edpm::conditional_mean(*g, x);
  const auto& s = std::get<UrnState>(draw.state);
  const auto w = theta_weights(draw, x);
  const Eigen::VectorXd design = design_row(x);
  double mean = w.back() * design.dot(base_.hyper().beta0);
  for (std::size_t k = 0; k < s.clusters.size(); ++k) mean += w[k] * design.dot(s.clusters[k].atom.beta);
  return mean;
}

std::vector<double> Predictor::conditional_means(const ChainDraw& draw,
                                                 const Eigen::MatrixXd& X) const {
  if (const auto* g = std::get_if<GibbsState>(&draw.state)) return edpm::conditional_means(*g, X);
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    out[static_cast<std::size_t>(r)] = conditional_mean(draw, X.row(r).transpose());
  }
  return out;
}

std::vector<double> Predictor::conditional_density(const ChainDraw& draw, const Eigen::VectorXd& x,
                                                   std::span<const double> y_grid) const {
  if (const auto* g = std::get_if<GibbsState>(&draw.state)) {
    return edpm::conditional_density(*g, x, y_grid);
  }
  const auto& s = std::get<UrnState>(draw.state);
  const auto w = theta_weights(draw, x);
  const Eigen::VectorXd design = design_row(x);
  const StudentT t = prior_predictive_y(design, base_);
  std::vector<double> out(y_grid.size(), 0.0);
  for (std::size_t g = 0; g < y_grid.size(); ++g) {
    double f = w.back() * std::exp(numeric::log_student_t_pdf(y_grid[g], t.dof, t.location, t.scale2));
    for (std::size_t k = 0; k < s.clusters.size(); ++k) {
      const auto& a = s.clusters[k].atom;
      f += w[k] * std::exp(numeric::log_normal_pdf(y_grid[g], design.dot(a.beta), a.tau_y));
    }
    out[g] = f;
  }
  return out;
}

PredictiveSummary predictive_summary(std::span<const double> values) {
  if (values.empty()) throw DomainError("predictive summary needs at least one draw");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  PredictiveSummary out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  for (std::size_t q = 0; q < kSummaryLevels.size(); ++q) {
    out.quantiles[q] = numeric::quantile_type7(sorted, kSummaryLevels[q]);
  }
  return out;
}

PredictiveSummary predictive_summary(const Chain& chain, const Eigen::VectorXd& x,
                                     const Hyperparameters& hp) {
  if (chain.empty()) throw DomainError("predictive summary needs a non-empty chain");
  const Predictor predictor(hp);
  std::vector<double> values;
  values.reserve(chain.size());
  for (const auto& d : chain.draws) values.push_back(predictor.conditional_mean(d, x));
  return predictive_summary(values);
}

PredictionErrors prediction_errors(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) throw DomainError("estimates and truths differ in length");
  if (estimates.empty()) throw DomainError("prediction errors need at least one value");
  PredictionErrors e;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    e.l1 += std::abs(d);
    e.l2 += d * d;
  }
  const double m = static_cast<double>(estimates.size());
  e.l1 /= m;
  e.l2 /= m;
  return e;
}

}  // namespace edpm
