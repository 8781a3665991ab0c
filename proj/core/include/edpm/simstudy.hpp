#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "edpm/blocked_gibbs.hpp"
#include "edpm/bounds.hpp"
#include "edpm/chain.hpp"
#include "edpm/inference.hpp"
#include "edpm/model.hpp"
#include "edpm/rng.hpp"

namespace edpm {

// Two-component regression toy model. Covariates are N(mean, Sigma) with
// Sigma_hh = var, Sigma_hl = cov inside block A = {1, 2, 4, 6, ...} and
// inside block B = {3, 5, 7, ...} (1-based), zero across blocks.
// y | x follows branch 1 with probability mixing_weight(x_1).
struct DgpConfig {
  std::size_t p = 5;
  std::size_t n = 200;
  Eigen::Vector2d beta1{0.0, 1.0};
  double sigma1_sq = 1.0 / 16.0;
  Eigen::Vector2d beta2{4.5, 0.1};
  double sigma2_sq = 1.0 / 8.0;
  double mu1 = 4.0;
  double mu2 = 6.0;
  double omega1 = 2.0;
  double omega2 = 2.0;
  double x_mean = 4.0;
  double x_var = 4.0;
  double x_cov = 3.5;

  // DomainError on non-positive sizes or variances; MatrixError when the
  // covariance is not positive definite.
  void validate() const;
};

double mixing_weight(double x1, const DgpConfig& cfg);
double true_conditional_mean(double x1, const DgpConfig& cfg);

// 1-based covariate index h belongs to block A.
bool in_block_a(std::size_t h);
Eigen::MatrixXd covariance_matrix(const DgpConfig& cfg);

Eigen::MatrixXd generate_covariates(const DgpConfig& cfg, Rng& rng);
Eigen::MatrixXd generate_covariates(const DgpConfig& cfg, std::size_t rows, Rng& rng);
Eigen::VectorXd generate_response(const Eigen::MatrixXd& X, const DgpConfig& cfg, Rng& rng);
Dataset simulate_dataset(const DgpConfig& cfg, Rng& rng);

// `points` covariate rows with x_1 evenly spaced on [lo, hi] and the other
// covariates at their conditional mean given x_1.
Eigen::MatrixXd figure_grid(const DgpConfig& cfg, std::size_t points = 20, double lo = -0.5,
                            double hi = 8.0);

// beta0 = least-squares fit, C_y = X*'X*/n, a_y = b_y = a_x = b_x = 2,
// m = sample means, c_x = 0.5, eta = (1, 1) at both levels.
Hyperparameters default_hyperparameters(const Dataset& data);

enum class MixingStatistic { mean, q025, q25, q75, q975 };
inline constexpr std::array<MixingStatistic, 5> kMixingStatistics{
    MixingStatistic::mean, MixingStatistic::q025, MixingStatistic::q25, MixingStatistic::q75,
    MixingStatistic::q975};
const char* to_string(MixingStatistic s);

struct MixingCell {
  double mean = 0.0;
  double sd = 0.0;
};

// Rows follow kMixingStatistics.
struct MixingTable {
  std::array<MixingCell, 5> rows{};
};

// Batch summaries of per-draw E[Y | x_i]: for each subject and each batch
// of `batch_size` consecutive draws, the mean and quantiles of the batch;
// then mean and sample SD over batches; then the average over subjects.
// Incomplete trailing batches are dropped.
class BatchMixingAccumulator {
 public:
  BatchMixingAccumulator(std::size_t subjects, std::size_t batch_size = 100);

  void add(std::span<const double> values);  // one draw, one value per subject
  std::size_t batches() const { return batches_; }

  // DomainError with fewer than two complete batches.
  MixingTable table() const;

 private:
  std::size_t subjects_;
  std::size_t batch_size_;
  std::size_t fill_ = 0;
  std::size_t batches_ = 0;
  std::vector<double> buffer_;  // subjects x batch_size
  std::vector<double> sum_;     // subjects x 5
  std::vector<double> sum_sq_;  // subjects x 5
  std::vector<double> scratch_;
};

// values: draws x subjects.
MixingTable batch_mixing_stats(const Eigen::MatrixXd& values, std::size_t batch_size = 100);
MixingTable batch_mixing_stats(const Chain& chain, const Dataset& data, const Hyperparameters& hp,
                               std::size_t batch_size = 100);

enum class SamplerKind { blocked_fixed, blocked_auto, polya_urn };
const char* to_string(SamplerKind s);
SamplerKind sampler_from_string(const std::string& s);

struct StudyConfig {
  std::vector<std::size_t> p_values{5};
  std::size_t n = 200;
  std::size_t n_test = 200;
  std::size_t datasets = 2;
  std::vector<SamplerKind> samplers{SamplerKind::blocked_fixed, SamplerKind::blocked_auto};
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  Truncation fixed{10, 50};
  AutoTruncation autotrunc{};
  int m_aux = 3;
  bool mixing = false;  // batch statistics of E[Y | x_i] over the training subjects
  std::size_t batch_size = 100;
  std::size_t predict_thin = 1;  // test-set predictions use every k-th retained draw
  std::size_t grid_points = 20;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string output_dir;  // empty: no files

  void validate() const;
};

struct CellResult {
  std::size_t p = 0;
  std::size_t dataset = 0;
  SamplerKind sampler = SamplerKind::blocked_fixed;
  std::optional<Truncation> trunc;
  std::optional<ConcentrationEstimate> pilot;
  std::size_t draws = 0;
  PredictionErrors errors;
  std::optional<MixingTable> mixing;
  std::vector<double> grid_x1;
  std::vector<double> grid_truth;
  std::vector<PredictiveSummary> grid;
};

struct SamplerSummary {
  std::size_t p = 0;
  SamplerKind sampler = SamplerKind::blocked_fixed;
  std::size_t datasets = 0;
  double l1_mean = 0.0;
  double l1_sd = 0.0;
  double l2_mean = 0.0;
  double l2_sd = 0.0;
  std::optional<MixingTable> mixing;  // averaged over datasets
};

struct StudyReport {
  StudyConfig config;
  std::vector<CellResult> cells;
  std::vector<SamplerSummary> summary;
  std::vector<std::string> files;

  std::string to_json() const;
};

// Datasets and cells are seeded from (seed, p, dataset, sampler), so the
// report does not depend on `workers`.
StudyReport run_study(const StudyConfig& cfg);

}  // namespace edpm
