#include "edpm/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <json.hpp>

#include "edpm/errors.hpp"
#include "edpm/numeric.hpp"
#include "edpm/polya_urn.hpp"

namespace edpm {

using nlohmann::json;

void DgpConfig::validate() const {
  if (p == 0) throw DomainError("p must be positive");
  if (n == 0) throw DomainError("n must be positive");
  if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0)) throw DomainError("branch variances must be positive");
  if (!(omega1 > 0.0) || !(omega2 > 0.0)) throw DomainError("omega must be positive");
  if (!(x_var > 0.0)) throw DomainError("covariate variance must be positive");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_matrix(*this));
  if (llt.info() != Eigen::Success) throw MatrixError("covariate covariance is not positive definite");
}

double mixing_weight(double x1, const DgpConfig& cfg) {
  const double l1 = std::log(cfg.omega1) - 0.5 * cfg.omega1 * (x1 - cfg.mu1) * (x1 - cfg.mu1);
  const double l2 = std::log(cfg.omega2) - 0.5 * cfg.omega2 * (x1 - cfg.mu2) * (x1 - cfg.mu2);
  // Logistic form stays finite far in either tail.
  return 1.0 / (1.0 + std::exp(l2 - l1));
}

double true_conditional_mean(double x1, const DgpConfig& cfg) {
  const double w = mixing_weight(x1, cfg);
  return w * (cfg.beta1[0] + cfg.beta1[1] * x1) + (1.0 - w) * (cfg.beta2[0] + cfg.beta2[1] * x1);
}

bool in_block_a(std::size_t h) { return h == 1 || h % 2 == 0; }

Eigen::MatrixXd covariance_matrix(const DgpConfig& cfg) {
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index h = 0; h < p; ++h) {
    for (Eigen::Index l = 0; l < p; ++l) {
      if (h == l) {
        S(h, l) = cfg.x_var;
      } else if (in_block_a(static_cast<std::size_t>(h + 1)) == in_block_a(static_cast<std::size_t>(l + 1))) {
        S(h, l) = cfg.x_cov;
      }
    }
  }
  return S;
}

Eigen::MatrixXd generate_covariates(const DgpConfig& cfg, std::size_t rows, Rng& rng) {
  const Eigen::MatrixXd S = covariance_matrix(cfg);
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw MatrixError("covariate covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), p);
  Eigen::VectorXd z(p);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index l = 0; l < p; ++l) z[l] = random::normal(rng);
    X.row(i) = (L * z).array() + cfg.x_mean;
  }
  return X;
}

Eigen::MatrixXd generate_covariates(const DgpConfig& cfg, Rng& rng) {
  return generate_covariates(cfg, cfg.n, rng);
}

Eigen::VectorXd generate_response(const Eigen::MatrixXd& X, const DgpConfig& cfg, Rng& rng) {
  Eigen::VectorXd y(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double x1 = X(i, 0);
    if (random::uniform(rng) < mixing_weight(x1, cfg)) {
      y[i] = random::normal(rng, cfg.beta1[0] + cfg.beta1[1] * x1, std::sqrt(cfg.sigma1_sq));
    } else {
      y[i] = random::normal(rng, cfg.beta2[0] + cfg.beta2[1] * x1, std::sqrt(cfg.sigma2_sq));
    }
  }
  return y;
}

Dataset simulate_dataset(const DgpConfig& cfg, Rng& rng) {
  cfg.validate();
  Eigen::MatrixXd X = generate_covariates(cfg, rng);
  Eigen::VectorXd y = generate_response(X, cfg, rng);
  return Dataset(std::move(y), std::move(X));
}

Eigen::MatrixXd figure_grid(const DgpConfig& cfg, std::size_t points, double lo, double hi) {
  if (points < 2) throw DomainError("figure grid needs at least two points");
  const auto p = static_cast<Eigen::Index>(cfg.p);
  Eigen::MatrixXd G(static_cast<Eigen::Index>(points), p);
  const double slope = cfg.x_cov / cfg.x_var;
  for (Eigen::Index r = 0; r < G.rows(); ++r) {
    const double x1 = lo + (hi - lo) * static_cast<double>(r) / static_cast<double>(points - 1);
    G(r, 0) = x1;
    for (Eigen::Index l = 1; l < p; ++l) {
      G(r, l) = in_block_a(static_cast<std::size_t>(l + 1)) ? cfg.x_mean + slope * (x1 - cfg.x_mean)
                                                             : cfg.x_mean;
    }
  }
  return G;
}

Hyperparameters default_hyperparameters(const Dataset& data) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto p = static_cast<Eigen::Index>(data.p());
  if (n < p + 1) throw DomainError("default hyperparameters need at least p + 1 observations");
  Eigen::MatrixXd D(n, p + 1);
  D.col(0).setOnes();
  D.rightCols(p) = data.X;
  Hyperparameters hp;
  hp.beta0 = D.colPivHouseholderQr().solve(data.y);
  hp.C_y = (D.transpose() * D) / static_cast<double>(n);
  hp.a_y = hp.b_y = hp.a_x = hp.b_x = 2.0;
  hp.m = data.X.colwise().mean().transpose();
  hp.c_x = Eigen::VectorXd::Constant(p, 0.5);
  hp.eta_y1 = hp.eta_y2 = hp.eta_x1 = hp.eta_x2 = 1.0;
  hp.validate();
  return hp;
}

const char* to_string(MixingStatistic s) {
  switch (s) {
    case MixingStatistic::mean: return "mean";
    case MixingStatistic::q025: return "q025";
    case MixingStatistic::q25: return "q25";
    case MixingStatistic::q75: return "q75";
    case MixingStatistic::q975: return "q975";
  }
  return "?";
}

BatchMixingAccumulator::BatchMixingAccumulator(std::size_t subjects, std::size_t batch_size)
    : subjects_(subjects),
      batch_size_(batch_size),
      buffer_(subjects * batch_size),
      sum_(subjects * 5, 0.0),
      sum_sq_(subjects * 5, 0.0),
      scratch_(batch_size) {
  if (subjects == 0) throw DomainError("mixing statistics need at least one subject");
  if (batch_size < 2) throw DomainError("batch size must be at least 2");
}

void BatchMixingAccumulator::add(std::span<const double> values) {
  if (values.size() != subjects_) throw DomainError("one value per subject expected");
  for (std::size_t s = 0; s < subjects_; ++s) buffer_[s * batch_size_ + fill_] = values[s];
  if (++fill_ < batch_size_) return;
  fill_ = 0;
  ++batches_;
  for (std::size_t s = 0; s < subjects_; ++s) {
    std::copy_n(buffer_.begin() + static_cast<std::ptrdiff_t>(s * batch_size_), batch_size_, scratch_.begin());
    std::sort(scratch_.begin(), scratch_.end());
    double mean = 0.0;
    for (double v : scratch_) mean += v;
    mean /= static_cast<double>(batch_size_);
    const std::array<double, 5> stat{mean, numeric::quantile_type7(scratch_, 0.025),
                                     numeric::quantile_type7(scratch_, 0.25),
                                     numeric::quantile_type7(scratch_, 0.75),
                                     numeric::quantile_type7(scratch_, 0.975)};
    for (std::size_t q = 0; q < 5; ++q) {
      sum_[s * 5 + q] += stat[q];
      sum_sq_[s * 5 + q] += stat[q] * stat[q];
    }
  }
}

MixingTable BatchMixingAccumulator::table() const {
  if (batches_ < 2) throw DomainError("batch standard deviations need at least two complete batches");
  const double b = static_cast<double>(batches_);
  MixingTable t;
  for (std::size_t q = 0; q < 5; ++q) {
    double mean_acc = 0.0;
    double sd_acc = 0.0;
    for (std::size_t s = 0; s < subjects_; ++s) {
      const double m = sum_[s * 5 + q] / b;
      const double var = std::max(0.0, (sum_sq_[s * 5 + q] - b * m * m) / (b - 1.0));
      mean_acc += m;
      sd_acc += std::sqrt(var);
    }
    t.rows[q] = MixingCell{mean_acc / static_cast<double>(subjects_), sd_acc / static_cast<double>(subjects_)};
  }
  return t;
}

MixingTable batch_mixing_stats(const Eigen::MatrixXd& values, std::size_t batch_size) {
  BatchMixingAccumulator acc(static_cast<std::size_t>(values.cols()), batch_size);
  std::vector<double> row(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index d = 0; d < values.rows(); ++d) {
    for (Eigen::Index s = 0; s < values.cols(); ++s) row[static_cast<std::size_t>(s)] = values(d, s);
    acc.add(row);
  }
  return acc.table();
}

MixingTable batch_mixing_stats(const Chain& chain, const Dataset& data, const Hyperparameters& hp,
                               std::size_t batch_size) {
  const Predictor predictor(hp);
  BatchMixingAccumulator acc(data.n(), batch_size);
  for (const auto& d : chain.draws) acc.add(predictor.conditional_means(d, data.X));
  return acc.table();
}

const char* to_string(SamplerKind s) {
  switch (s) {
    case SamplerKind::blocked_fixed: return "blocked-fixed";
    case SamplerKind::blocked_auto: return "blocked-auto";
    case SamplerKind::polya_urn: return "polya-urn";
  }
  return "?";
}

SamplerKind sampler_from_string(const std::string& s) {
  if (s == "blocked-fixed") return SamplerKind::blocked_fixed;
  if (s == "blocked-auto") return SamplerKind::blocked_auto;
  if (s == "polya-urn") return SamplerKind::polya_urn;
  throw ConfigError("unknown sampler '" + s + "' (expected blocked-fixed, blocked-auto or polya-urn)");
}

void StudyConfig::validate() const {
  if (p_values.empty()) throw DomainError("study needs at least one p");
  for (auto p : p_values) {
    if (p == 0) throw DomainError("p must be positive");
  }
  if (samplers.empty()) throw DomainError("study needs at least one sampler");
  if (datasets == 0 || n == 0 || n_test == 0) throw DomainError("datasets, n and n_test must be positive");
  if (burn_in >= iterations) throw DomainError("burn_in must be smaller than iterations");
  if (predict_thin == 0) throw DomainError("predict_thin must be positive");
  if (grid_points < 2) throw DomainError("grid_points must be at least 2");
  if (m_aux < 1) throw DomainError("m_aux must be at least 1");
  if (mixing && (iterations - burn_in) < 2 * batch_size) {
    throw DomainError("mixing statistics need at least two batches of retained draws");
  }
}

namespace {

std::uint64_t cell_index(std::size_t p, std::size_t d, std::size_t slot) {
  return (static_cast<std::uint64_t>(p) << 40) | (static_cast<std::uint64_t>(d) << 8) | slot;
}

struct DatasetBundle {
  Dataset train;
  Eigen::MatrixXd X_test;
  std::vector<double> truth_test;
  Eigen::MatrixXd grid;
};

DatasetBundle make_bundle(const StudyConfig& cfg, std::size_t p, std::size_t d) {
  DgpConfig dgp;
  dgp.p = p;
  dgp.n = cfg.n;
  Rng data_rng = make_stream(cfg.seed, cell_index(p, d, 0));
  Rng test_rng = make_stream(cfg.seed, cell_index(p, d, 1));
  DatasetBundle b;
  b.train = simulate_dataset(dgp, data_rng);
  b.X_test = generate_covariates(dgp, cfg.n_test, test_rng);
  for (Eigen::Index i = 0; i < b.X_test.rows(); ++i) b.truth_test.push_back(true_conditional_mean(b.X_test(i, 0), dgp));
  b.grid = figure_grid(dgp, cfg.grid_points);
  return b;
}

CellResult run_cell(const StudyConfig& cfg, std::size_t p, std::size_t d, SamplerKind sampler,
                    const DatasetBundle& b) {
  DgpConfig dgp;
  dgp.p = p;
  CellResult r;
  r.p = p;
  r.dataset = d;
  r.sampler = sampler;
  const Hyperparameters hp = default_hyperparameters(b.train);
  const Predictor predictor(hp);
  const std::uint64_t chain_seed =
      make_stream(cfg.seed, cell_index(p, d, 2 + static_cast<std::size_t>(sampler)))();

  std::vector<double> test_sum(b.truth_test.size(), 0.0);
  std::size_t used = 0;
  std::vector<std::vector<double>> grid_values(static_cast<std::size_t>(b.grid.rows()));
  std::optional<BatchMixingAccumulator> acc;
  if (cfg.mixing) acc.emplace(b.train.n(), cfg.batch_size);
  std::size_t retained = 0;

  const DrawObserver observer = [&](const ChainDraw& draw) {
    if (retained++ % cfg.predict_thin == 0) {
      const auto t = predictor.conditional_means(draw, b.X_test);
      for (std::size_t i = 0; i < t.size(); ++i) test_sum[i] += t[i];
      const auto g = predictor.conditional_means(draw, b.grid);
      for (std::size_t i = 0; i < g.size(); ++i) grid_values[i].push_back(g[i]);
      ++used;
    }
    if (acc) acc->add(predictor.conditional_means(draw, b.train.X));
  };

  if (sampler == SamplerKind::polya_urn) {
    UrnConfig uc;
    uc.iterations = cfg.iterations;
    uc.burn_in = cfg.burn_in;
    uc.seed = chain_seed;
    uc.m_aux = cfg.m_aux;
    r.draws = run_pu_chain(b.train, hp, uc, observer);
  } else {
    ChainConfig cc;
    cc.iterations = cfg.iterations;
    cc.burn_in = cfg.burn_in;
    cc.seed = chain_seed;
    if (sampler == SamplerKind::blocked_fixed) {
      cc.trunc = cfg.fixed;
    } else {
      cc.trunc = cfg.autotrunc;
    }
    const RunInfo info = run_chain(b.train, hp, cc, observer);
    r.trunc = info.trunc;
    r.pilot = info.pilot;
    r.draws = info.draws;
  }

  std::vector<double> estimates(test_sum.size());
  for (std::size_t i = 0; i < test_sum.size(); ++i) estimates[i] = test_sum[i] / static_cast<double>(used);
  r.errors = prediction_errors(estimates, b.truth_test);
  if (acc) r.mixing = acc->table();
  for (Eigen::Index g = 0; g < b.grid.rows(); ++g) {
    r.grid_x1.push_back(b.grid(g, 0));
    r.grid_truth.push_back(true_conditional_mean(b.grid(g, 0), dgp));
    r.grid.push_back(predictive_summary(grid_values[static_cast<std::size_t>(g)]));
  }
  return r;
}

std::vector<SamplerSummary> summarise(const StudyConfig& cfg, const std::vector<CellResult>& cells) {
  std::vector<SamplerSummary> out;
  for (auto p : cfg.p_values) {
    for (auto s : cfg.samplers) {
      SamplerSummary sum;
      sum.p = p;
      sum.sampler = s;
      std::vector<double> l1;
      std::vector<double> l2;
      MixingTable mix;
      std::size_t mixed = 0;
      for (const auto& c : cells) {
        if (c.p != p || c.sampler != s) continue;
        l1.push_back(c.errors.l1);
        l2.push_back(c.errors.l2);
        if (c.mixing) {
          for (std::size_t q = 0; q < 5; ++q) {
            mix.rows[q].mean += c.mixing->rows[q].mean;
            mix.rows[q].sd += c.mixing->rows[q].sd;
          }
          ++mixed;
        }
      }
      const auto mean_sd = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return std::pair{m, sd};
      };
      sum.datasets = l1.size();
      std::tie(sum.l1_mean, sum.l1_sd) = mean_sd(l1);
      std::tie(sum.l2_mean, sum.l2_sd) = mean_sd(l2);
      if (mixed > 0) {
        for (auto& row : mix.rows) {
          row.mean /= static_cast<double>(mixed);
          row.sd /= static_cast<double>(mixed);
        }
        sum.mixing = mix;
      }
      out.push_back(sum);
    }
  }
  return out;
}

json mixing_json(const MixingTable& t) {
  json j = json::object();
  for (std::size_t q = 0; q < 5; ++q) {
    j[to_string(kMixingStatistics[q])] = {{"mean", t.rows[q].mean}, {"sd", t.rows[q].sd}};
  }
  return j;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_outputs(StudyReport& report) {
  namespace fs = std::filesystem;
  const fs::path dir(report.config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  std::ostringstream t2;
  t2 << "p,dataset,sampler,N,M,draws,l1,l2\n";
  for (const auto& c : report.cells) {
    t2 << c.p << ',' << c.dataset << ',' << to_string(c.sampler) << ','
       << (c.trunc ? std::to_string(c.trunc->N) : "") << ',' << (c.trunc ? std::to_string(c.trunc->M) : "")
       << ',' << c.draws << ',' << fmt(c.errors.l1) << ',' << fmt(c.errors.l2) << '\n';
  }
  write_text(dir / "table2.csv", t2.str());
  report.files.push_back((dir / "table2.csv").string());

  if (report.config.mixing) {
    std::ostringstream t3;
    t3 << "p,dataset,sampler,statistic,mean,sd\n";
    for (const auto& c : report.cells) {
      for (std::size_t q = 0; q < 5; ++q) {
        t3 << c.p << ',' << c.dataset << ',' << to_string(c.sampler) << ','
           << to_string(kMixingStatistics[q]) << ',' << fmt(c.mixing->rows[q].mean) << ','
           << fmt(c.mixing->rows[q].sd) << '\n';
      }
    }
    write_text(dir / "table3.csv", t3.str());
    report.files.push_back((dir / "table3.csv").string());
  }

  std::ostringstream fig;
  fig << "p,dataset,sampler,x1,truth,mean,q025,q25,q75,q975\n";
  for (const auto& c : report.cells) {
    for (std::size_t g = 0; g < c.grid.size(); ++g) {
      const auto& s = c.grid[g];
      fig << c.p << ',' << c.dataset << ',' << to_string(c.sampler) << ',' << fmt(c.grid_x1[g]) << ','
          << fmt(c.grid_truth[g]) << ',' << fmt(s.mean) << ',' << fmt(s.q025()) << ',' << fmt(s.q25())
          << ',' << fmt(s.q75()) << ',' << fmt(s.q975()) << '\n';
    }
  }
  write_text(dir / "figure.csv", fig.str());
  report.files.push_back((dir / "figure.csv").string());

  report.files.push_back((dir / "report.json").string());
  write_text(dir / "report.json", report.to_json() + "\n");
}

}  // namespace

std::string StudyReport::to_json() const {
  json j;
  json c;
  c["p_values"] = config.p_values;
  c["n"] = config.n;
  c["n_test"] = config.n_test;
  c["datasets"] = config.datasets;
  json samplers = json::array();
  for (auto s : config.samplers) samplers.push_back(to_string(s));
  c["samplers"] = samplers;
  c["iterations"] = config.iterations;
  c["burn_in"] = config.burn_in;
  c["fixed"] = {{"N", config.fixed.N}, {"M", config.fixed.M}};
  c["auto"] = {{"epsilon", config.autotrunc.epsilon},
               {"pilot_iterations", config.autotrunc.pilot_iterations},
               {"pilot_burn_in", config.autotrunc.pilot_burn_in},
               {"pilot_N", config.autotrunc.pilot.N},
               {"pilot_M", config.autotrunc.pilot.M}};
  c["m_aux"] = config.m_aux;
  c["mixing"] = config.mixing;
  c["batch_size"] = config.batch_size;
  c["predict_thin"] = config.predict_thin;
  c["grid_points"] = config.grid_points;
  c["seed"] = config.seed;
  j["config"] = c;
  j["hyperparameters"] =
      "beta0 = least squares, C_y = X*'X*/n, a_y = b_y = a_x = b_x = 2, m = sample means, "
      "c_x = 0.5, eta = (1, 1) at both levels";

  json cells_j = json::array();
  for (const auto& cell : cells) {
    json cj;
    cj["p"] = cell.p;
    cj["dataset"] = cell.dataset;
    cj["sampler"] = to_string(cell.sampler);
    if (cell.trunc) cj["truncation"] = {{"N", cell.trunc->N}, {"M", cell.trunc->M}};
    if (cell.pilot) {
      cj["pilot"] = {{"alpha_theta", cell.pilot->alpha_theta}, {"alpha_psi_max", cell.pilot->alpha_psi_max}};
    }
    cj["draws"] = cell.draws;
    cj["l1"] = cell.errors.l1;
    cj["l2"] = cell.errors.l2;
    if (cell.mixing) cj["mixing"] = mixing_json(*cell.mixing);
    cells_j.push_back(cj);
  }
  j["cells"] = cells_j;

  json sum_j = json::array();
  for (const auto& s : summary) {
    json sj{{"p", s.p},          {"sampler", to_string(s.sampler)}, {"datasets", s.datasets},
            {"l1_mean", s.l1_mean}, {"l1_sd", s.l1_sd},             {"l2_mean", s.l2_mean},
            {"l2_sd", s.l2_sd}};
    if (s.mixing) sj["mixing"] = mixing_json(*s.mixing);
    sum_j.push_back(sj);
  }
  j["summary"] = sum_j;
  return j.dump(2);
}

StudyReport run_study(const StudyConfig& cfg) {
  cfg.validate();
  StudyReport report;
  report.config = cfg;

  std::vector<std::pair<std::size_t, std::size_t>> pd;
  for (auto p : cfg.p_values) {
    for (std::size_t d = 0; d < cfg.datasets; ++d) pd.emplace_back(p, d);
  }
  std::vector<DatasetBundle> bundles;
  bundles.reserve(pd.size());
  for (const auto& [p, d] : pd) bundles.push_back(make_bundle(cfg, p, d));

  struct Task {
    std::size_t bundle;
    SamplerKind sampler;
  };
  std::vector<Task> tasks;
  for (std::size_t b = 0; b < pd.size(); ++b) {
    for (auto s : cfg.samplers) tasks.push_back({b, s});
  }
  std::vector<std::optional<CellResult>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      try {
        const auto& task = tasks[t];
        const auto [p, d] = pd[task.bundle];
        results[t] = run_cell(cfg, p, d, task.sampler, bundles[task.bundle]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  for (auto& r : results) report.cells.push_back(std::move(*r));
  report.summary = summarise(cfg, report.cells);
  if (!cfg.output_dir.empty()) write_outputs(report);
  return report;
}

}  // namespace edpm
