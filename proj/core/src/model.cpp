#include "edpm/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "edpm/errors.hpp"

namespace edpm {

Dataset::Dataset(Eigen::VectorXd y_, Eigen::MatrixXd X_) : y(std::move(y_)), X(std::move(X_)) {
  validate();
}

Eigen::VectorXd Dataset::design_row(std::size_t i) const {
  Eigen::VectorXd row(X.cols() + 1);
  row[0] = 1.0;
  row.tail(X.cols()) = X.row(static_cast<Eigen::Index>(i)).transpose();
  return row;
}

void Dataset::validate() const {
  if (X.rows() != y.size()) {
    std::ostringstream msg;
    msg << "dataset has " << y.size() << " responses but " << X.rows() << " covariate rows";
    throw DomainError(msg.str());
  }
  if (X.cols() < 1) throw DomainError("dataset needs at least one covariate");
  if (!y.allFinite() || !X.allFinite()) throw DomainError("dataset contains non-finite values");
}

Eigen::VectorXd design_row(const Eigen::VectorXd& x) {
  Eigen::VectorXd row(x.size() + 1);
  row[0] = 1.0;
  row.tail(x.size()) = x;
  return row;
}

Truncation::Truncation(int N_, int M_) : N(N_), M(M_) {
  if (N < 2 || M < 2) throw DomainError("truncation levels N and M must both be >= 2");
}

void Hyperparameters::validate() const {
  const auto p = m.size();
  if (p < 1) throw DomainError("hyperparameters need at least one covariate");
  if (beta0.size() != p + 1) throw DomainError("beta0 must have length p + 1");
  if (C_y.rows() != p + 1 || C_y.cols() != p + 1) throw DomainError("C_y must be (p+1)x(p+1)");
  if (c_x.size() != p) throw DomainError("c_x must have length p");
  if ((c_x.array() <= 0.0).any()) throw DomainError("c_x entries must be positive");
  for (double v : {a_y, b_y, a_x, b_x, eta_y1, eta_y2, eta_x1, eta_x2}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("shape and rate hyperparameters must be positive");
  }
  if (!beta0.allFinite() || !m.allFinite() || !C_y.allFinite()) {
    throw DomainError("hyperparameters contain non-finite values");
  }
  if ((C_y - C_y.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + C_y.cwiseAbs().maxCoeff())) {
    throw MatrixError("C_y is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(C_y);
  if (llt.info() != Eigen::Success) throw MatrixError("C_y is not positive definite");
}

Hyperparameters Hyperparameters::standard(std::size_t p) {
  Hyperparameters hp;
  const auto d = static_cast<Eigen::Index>(p);
  hp.beta0 = Eigen::VectorXd::Zero(d + 1);
  hp.C_y = Eigen::MatrixXd::Identity(d + 1, d + 1);
  hp.m = Eigen::VectorXd::Zero(d);
  hp.c_x = Eigen::VectorXd::Ones(d);
  return hp;
}

std::vector<double> stick_break(std::span<const double> V) {
  if (V.size() < 2) throw DomainError("stick-breaking needs at least two fractions");
  for (double v : V) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("stick-breaking fraction outside [0, 1]");
  }
  if (V.back() != 1.0) throw InvalidStickError("terminal stick-breaking fraction must equal 1");
  std::vector<double> w(V.size());
  double remaining = 1.0;
  for (std::size_t k = 0; k < V.size(); ++k) {
    w[k] = V[k] * remaining;
    remaining *= (1.0 - V[k]);
  }
  return w;
}

StickWeights make_stick_weights(std::vector<double> V) {
  StickWeights sw;
  sw.w = stick_break(V);
  sw.log1m_V.resize(V.size());
  for (std::size_t k = 0; k < V.size(); ++k) sw.log1m_V[k] = std::log1p(-V[k]);
  sw.V = std::move(V);
  return sw;
}

StickWeights make_stick_weights(std::vector<double> V, std::vector<double> log1m_V) {
  stick_break(V);
  if (log1m_V.size() != V.size()) throw DomainError("stick complements must match the fractions");
  StickWeights sw;
  sw.w.resize(V.size());
  double log_rest = 0.0;
  for (std::size_t k = 0; k < V.size(); ++k) {
    sw.w[k] = V[k] * std::exp(log_rest);
    log_rest += log1m_V[k];
  }
  log1m_V.back() = -std::numeric_limits<double>::infinity();
  sw.V = std::move(V);
  sw.log1m_V = std::move(log1m_V);
  return sw;
}

namespace {

void check_weights(const StickWeights& sw, std::size_t expected, const char* what) {
  if (sw.w.size() != expected || sw.V.size() != expected) {
    throw DomainError(std::string(what) + " has the wrong length");
  }
  double total = 0.0;
  for (double w : sw.w) {
    if (!(w >= 0.0)) throw NumericalError(std::string(what) + " has a negative or NaN weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw NumericalError(std::string(what) + " does not sum to 1");
}

}  // namespace

void GibbsState::check_invariants() const {
  const auto N = static_cast<std::size_t>(trunc.N);
  const auto M = static_cast<std::size_t>(trunc.M);
  check_weights(theta_weights, N, "theta weights");
  if (psi_weights.size() != N || theta_atoms.size() != N || psi_atoms.size() != N ||
      alpha_psi.size() != N) {
    throw DomainError("per-cluster containers must have N entries");
  }
  for (std::size_t k = 0; k < N; ++k) {
    check_weights(psi_weights[k], M, "psi weights");
    if (!(theta_atoms[k].tau_y > 0.0) || !theta_atoms[k].beta.allFinite()) {
      throw NumericalError("theta atom is not finite/positive");
    }
    if (psi_atoms[k].size() != M) throw DomainError("psi atom row must have M entries");
    for (const auto& a : psi_atoms[k]) {
      if (!a.mu.allFinite() || !(a.tau_x.array() > 0.0).all() || !a.tau_x.allFinite()) {
        throw NumericalError("psi atom is not finite/positive");
      }
    }
    if (!(alpha_psi[k] > 0.0) || !std::isfinite(alpha_psi[k])) {
      throw NumericalError("alpha_psi must be positive");
    }
  }
  if (!(alpha_theta > 0.0) || !std::isfinite(alpha_theta)) {
    throw NumericalError("alpha_theta must be positive");
  }
  if (K.size() != J.size()) throw DomainError("label vectors differ in length");
  const auto counts = occupancy_counts(K, J, trunc);
  std::size_t total = 0;
  for (std::size_t k = 0; k < N; ++k) {
    int row = 0;
    for (int c : counts.n_kj[k]) row += c;
    if (row != counts.n_k[k]) throw DomainError("nested counts inconsistent");
    total += static_cast<std::size_t>(counts.n_k[k]);
  }
  if (total != K.size()) throw DomainError("cluster counts do not sum to n");
}

OccupancyCounts occupancy_counts(std::span<const int> K, std::span<const int> J,
                                 const Truncation& trunc) {
  if (K.size() != J.size()) throw DomainError("label vectors differ in length");
  OccupancyCounts c;
  c.n_k.assign(static_cast<std::size_t>(trunc.N), 0);
  c.n_kj.assign(static_cast<std::size_t>(trunc.N), std::vector<int>(static_cast<std::size_t>(trunc.M), 0));
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (K[i] < 0 || K[i] >= trunc.N || J[i] < 0 || J[i] >= trunc.M) {
      throw DomainError("cluster label out of range");
    }
    ++c.n_k[static_cast<std::size_t>(K[i])];
    ++c.n_kj[static_cast<std::size_t>(K[i])][static_cast<std::size_t>(J[i])];
  }
  return c;
}

BaseMeasure::BaseMeasure(const Hyperparameters& hp) : hp_(hp), C_y_llt_(hp.C_y) {
  hp_.validate();
  C_y_lower_ = C_y_llt_.matrixL();
}

ThetaAtom BaseMeasure::draw_theta(Rng& rng) const {
  ThetaAtom atom;
  atom.tau_y = random::inverse_gamma(rng, hp_.a_y, hp_.b_y);
  atom.beta = random::normal_from_precision_cholesky(rng, hp_.beta0, C_y_lower_,
                                                     std::sqrt(atom.tau_y));
  return atom;
}

PsiAtom BaseMeasure::draw_psi(Rng& rng) const {
  const auto p = hp_.m.size();
  PsiAtom atom;
  atom.mu.resize(p);
  atom.tau_x.resize(p);
  for (Eigen::Index l = 0; l < p; ++l) {
    const double tau = random::inverse_gamma(rng, hp_.a_x, hp_.b_x);
    atom.tau_x[l] = tau;
    atom.mu[l] = random::normal(rng, hp_.m[l], std::sqrt(tau / hp_.c_x[l]));
  }
  return atom;
}

std::pair<ThetaAtom, PsiAtom> draw_from_base_measure(const Hyperparameters& hp, std::size_t p,
                                                     Rng& rng) {
  if (hp.p() != p) throw DomainError("hyperparameters do not match covariate count");
  const BaseMeasure base(hp);
  ThetaAtom theta = base.draw_theta(rng);
  PsiAtom psi = base.draw_psi(rng);
  return {std::move(theta), std::move(psi)};
}

}  // namespace edpm
