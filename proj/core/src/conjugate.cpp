#include "edpm/conjugate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "edpm/errors.hpp"
#include "edpm/numeric.hpp"

namespace edpm {

RegressionStats::RegressionStats(std::size_t p)
    : xtx(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p + 1), static_cast<Eigen::Index>(p + 1))),
      xty(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1))) {}

void RegressionStats::add(const Eigen::VectorXd& design, double y) {
  xtx.selfadjointView<Eigen::Lower>().rankUpdate(design);
  xty += y * design;
  yty += y * y;
  ++count;
}

CovariateStats::CovariateStats(std::size_t p)
    : sum(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p))),
      sum_sq(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p))) {}

void CovariateStats::add(const Eigen::Ref<const Eigen::VectorXd>& x) {
  sum += x;
  sum_sq += x.cwiseProduct(x);
  ++count;
}

ThetaAtom draw_theta_posterior(const RegressionStats& stats, const BaseMeasure& base,
                               double tau_current, Rng& rng) {
  if (stats.count == 0) return base.draw_theta(rng);
  const Hyperparameters& hp = base.hyper();
  // rankUpdate filled the lower triangle only.
  const Eigen::MatrixXd xtx = stats.xtx.selfadjointView<Eigen::Lower>();
  const Eigen::MatrixXd precision = xtx + hp.C_y;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw MatrixError("regression posterior precision is not positive definite");
  const Eigen::VectorXd mean = llt.solve(stats.xty + hp.C_y * hp.beta0);
  const Eigen::MatrixXd lower = llt.matrixL();

  ThetaAtom atom;
  atom.beta = random::normal_from_precision_cholesky(rng, mean, lower, std::sqrt(tau_current));
  const double rss = std::max(
      0.0, stats.yty - 2.0 * atom.beta.dot(stats.xty) + atom.beta.dot(xtx * atom.beta));
  const Eigen::VectorXd dev = atom.beta - hp.beta0;
  const double prior_quad = dev.dot(hp.C_y * dev);
  const double shape = hp.a_y + 0.5 * static_cast<double>(stats.count + static_cast<std::size_t>(atom.beta.size()));
  const double rate = hp.b_y + 0.5 * (rss + prior_quad);
  atom.tau_y = random::inverse_gamma(rng, shape, rate);
  return atom;
}

PsiAtom draw_psi_posterior(const CovariateStats& stats, const BaseMeasure& base,
                           const PsiAtom& current, Rng& rng) {
  if (stats.count == 0) return base.draw_psi(rng);
  const Hyperparameters& hp = base.hyper();
  const double n = static_cast<double>(stats.count);
  const auto p = hp.m.size();
  PsiAtom atom;
  atom.mu.resize(p);
  atom.tau_x.resize(p);
  for (Eigen::Index l = 0; l < p; ++l) {
    const double c = hp.c_x[l];
    const double post_mean = (stats.sum[l] + c * hp.m[l]) / (n + c);
    const double mu = random::normal(rng, post_mean, std::sqrt(current.tau_x[l] / (n + c)));
    const double ss = std::max(0.0, stats.sum_sq[l] - 2.0 * mu * stats.sum[l] + n * mu * mu);
    const double d = mu - hp.m[l];
    atom.mu[l] = mu;
    atom.tau_x[l] = random::inverse_gamma(rng, hp.a_x + 0.5 * (n + 1.0), hp.b_x + 0.5 * (ss + c * d * d));
  }
  return atom;
}

double log_covariate_density(const Eigen::Ref<const Eigen::VectorXd>& x, const PsiAtom& psi) {
  double s = 0.0;
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    s += numeric::log_normal_pdf(x[l], psi.mu[l], psi.tau_x[l]);
  }
  return s;
}

double log_response_density(double y, const Eigen::VectorXd& design, const ThetaAtom& theta) {
  return numeric::log_normal_pdf(y, design.dot(theta.beta), theta.tau_y);
}

double log_prior_predictive_x(const Eigen::Ref<const Eigen::VectorXd>& x, const Hyperparameters& hp) {
  double s = 0.0;
  const double dof = 2.0 * hp.a_x;
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    const double scale2 = hp.b_x * (1.0 + 1.0 / hp.c_x[l]) / hp.a_x;
    s += numeric::log_student_t_pdf(x[l], dof, hp.m[l], scale2);
  }
  return s;
}

StudentT prior_predictive_y(const Eigen::VectorXd& design, const BaseMeasure& base) {
  const Hyperparameters& hp = base.hyper();
  const double quad = design.dot(base.C_y_llt().solve(design));
  return StudentT{2.0 * hp.a_y, design.dot(hp.beta0), hp.b_y * (1.0 + quad) / hp.a_y};
}

}  // namespace edpm
