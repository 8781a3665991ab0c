#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "edpm/rng.hpp"

namespace edpm {

// Response vector y (length n) and covariate matrix X (n x p, no intercept
// column). The design row x*_i = (1, x_i) is built on demand; the intercept
// is coefficient 0.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;

  Dataset() = default;
  Dataset(Eigen::VectorXd y_, Eigen::MatrixXd X_);

  std::size_t n() const { return static_cast<std::size_t>(y.size()); }
  std::size_t p() const { return static_cast<std::size_t>(X.cols()); }

  Eigen::VectorXd design_row(std::size_t i) const;

  // Throws DomainError on shape mismatch or non-finite entries.
  void validate() const;
};

Eigen::VectorXd design_row(const Eigen::VectorXd& x);

// Truncation levels: N theta-clusters, M psi-clusters per theta-cluster.
struct Truncation {
  int N = 10;
  int M = 50;

  Truncation() = default;
  Truncation(int N_, int M_);  // throws DomainError unless N, M >= 2
};

// Base measure and hyperprior constants.
//
//   beta | tau_y ~ N(beta0, tau_y C_y^{-1}),  tau_y ~ IG(a_y, b_y)
//   mu_l | tau_l ~ N(m_l, tau_l / c_x[l]),   tau_l ~ IG(a_x, b_x)
//   alpha_theta ~ Gamma(eta_y1, eta_y2),      alpha_psi ~ Gamma(eta_x1, eta_x2)
//
// IG(a, b) means 1/tau ~ Gamma(shape a, rate b).
struct Hyperparameters {
  Eigen::VectorXd beta0;
  Eigen::MatrixXd C_y;
  double a_y = 2.0;
  double b_y = 2.0;
  Eigen::VectorXd m;
  Eigen::VectorXd c_x;
  double a_x = 2.0;
  double b_x = 2.0;
  double eta_y1 = 1.0;
  double eta_y2 = 1.0;
  double eta_x1 = 1.0;
  double eta_x2 = 1.0;
  bool alpha_psi_shared = false;

  std::size_t p() const { return static_cast<std::size_t>(m.size()); }

  // Shape and positivity checks; MatrixError when C_y is not positive definite.
  void validate() const;

  // Unit-information style defaults for p covariates centred at zero.
  static Hyperparameters standard(std::size_t p);
};

struct StickWeights {
  std::vector<double> V;
  std::vector<double> w;
  std::vector<double> log1m_V;  // log(1 - V_k); exact even where V_k rounds to 1

  std::size_t size() const { return w.size(); }
};

// w_1 = V_1, w_k = V_k prod_{h<k}(1 - V_h). Requires size >= 2, entries in
// [0,1] (DomainError) and V.back() == 1 (InvalidStickError).
std::vector<double> stick_break(std::span<const double> V);
StickWeights make_stick_weights(std::vector<double> V);
// Weights from the fractions and their exact log complements (the last
// complement is ignored).
StickWeights make_stick_weights(std::vector<double> V, std::vector<double> log1m_V);

struct ThetaAtom {
  Eigen::VectorXd beta;  // length p + 1, intercept first
  double tau_y = 1.0;
};

struct PsiAtom {
  Eigen::VectorXd mu;     // length p
  Eigen::VectorXd tau_x;  // length p, per-covariate variances
};

struct GibbsState {
  Truncation trunc;
  StickWeights theta_weights;              // length N
  std::vector<StickWeights> psi_weights;   // N entries, each length M
  std::vector<ThetaAtom> theta_atoms;      // N
  std::vector<std::vector<PsiAtom>> psi_atoms;  // N x M
  std::vector<int> K;                      // theta label per observation, 0-based
  std::vector<int> J;                      // psi label within K, 0-based
  double alpha_theta = 1.0;
  std::vector<double> alpha_psi;           // N entries (all equal when shared)

  // Weight normalisation, label ranges, positivity. Throws NumericalError or
  // DomainError describing the first violation.
  void check_invariants() const;
};

struct OccupancyCounts {
  std::vector<int> n_k;               // N
  std::vector<std::vector<int>> n_kj;  // N x M
};

OccupancyCounts occupancy_counts(std::span<const int> K, std::span<const int> J,
                                 const Truncation& trunc);

// Precomputed factors for repeated base-measure draws.
class BaseMeasure {
 public:
  explicit BaseMeasure(const Hyperparameters& hp);

  const Hyperparameters& hyper() const { return hp_; }
  const Eigen::LLT<Eigen::MatrixXd>& C_y_llt() const { return C_y_llt_; }

  ThetaAtom draw_theta(Rng& rng) const;
  PsiAtom draw_psi(Rng& rng) const;

 private:
  Hyperparameters hp_;
  Eigen::LLT<Eigen::MatrixXd> C_y_llt_;
  Eigen::MatrixXd C_y_lower_;
};

// tau_y ~ IG(a_y, b_y), beta | tau_y ~ N(beta0, tau_y C_y^{-1}); per covariate
// tau_l ~ IG(a_x, b_x), mu_l | tau_l ~ N(m_l, tau_l / c_l).
std::pair<ThetaAtom, PsiAtom> draw_from_base_measure(const Hyperparameters& hp, std::size_t p,
                                                     Rng& rng);

// Strict CSV: header `y,x1,...,xp`, numeric cells only (NA and blanks rejected).
Dataset read_dataset_csv(const std::string& path);
Dataset parse_dataset_csv(const std::string& text);
void write_dataset_csv(const Dataset& data, const std::string& path);
std::string format_dataset_csv(const Dataset& data);

}  // namespace edpm
