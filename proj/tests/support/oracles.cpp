#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "edpm/blocked_gibbs.hpp"
#include "edpm/numeric.hpp"

namespace edpm::testing {

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double batch_means_se(std::span<const double> x, std::size_t batches) {
  const std::size_t len = x.size() / batches;
  std::vector<double> bm(batches);
  for (std::size_t b = 0; b < batches; ++b) bm[b] = mean(x.subspan(b * len, len));
  const double m = mean(bm);
  double ss = 0.0;
  for (double v : bm) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

RegressionPosterior regression_posterior(const Eigen::MatrixXd& D, const Eigen::VectorXd& y,
                                         const Hyperparameters& hp) {
  const Eigen::MatrixXd L = D.transpose() * D + hp.C_y;
  const Eigen::MatrixXd Linv = L.inverse();
  const Eigen::VectorXd mn = Linv * (D.transpose() * y + hp.C_y * hp.beta0);
  const double an = hp.a_y + 0.5 * static_cast<double>(y.size());
  const double bn = hp.b_y + 0.5 * (y.dot(y) + hp.beta0.dot(hp.C_y * hp.beta0) - mn.dot(L * mn));
  RegressionPosterior r;
  r.beta_mean = mn;
  r.beta_cov = (bn / (an - 1.0)) * Linv;
  r.tau_mean = bn / (an - 1.0);
  r.tau_var = bn * bn / ((an - 1.0) * (an - 1.0) * (an - 2.0));
  return r;
}

CovariatePosterior covariate_posterior(std::span<const double> x, double m, double c, double a,
                                       double b) {
  const double n = static_cast<double>(x.size());
  const double xbar = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - xbar) * (v - xbar);
  const double an = a + 0.5 * n;
  const double bn = b + 0.5 * (ss + n * c / (n + c) * (xbar - m) * (xbar - m));
  CovariatePosterior r;
  r.mu_mean = (n * xbar + c * m) / (n + c);
  r.mu_var = bn / ((an - 1.0) * (n + c));
  r.tau_mean = bn / (an - 1.0);
  r.tau_var = bn * bn / ((an - 1.0) * (an - 1.0) * (an - 2.0));
  return r;
}

double log_marginal_y(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, const Hyperparameters& hp) {
  const double n = static_cast<double>(y.size());
  const Eigen::MatrixXd L = D.transpose() * D + hp.C_y;
  const Eigen::VectorXd mn = L.ldlt().solve(D.transpose() * y + hp.C_y * hp.beta0);
  const double an = hp.a_y + 0.5 * n;
  const double bn = hp.b_y + 0.5 * (y.dot(y) + hp.beta0.dot(hp.C_y * hp.beta0) - mn.dot(L * mn));
  const double logdet_c = std::log(hp.C_y.determinant());
  const double logdet_l = std::log(L.determinant());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * (logdet_c - logdet_l) +
         hp.a_y * std::log(hp.b_y) - an * std::log(bn) + std::lgamma(an) - std::lgamma(hp.a_y);
}

double log_marginal_x(const Eigen::MatrixXd& X, const Hyperparameters& hp) {
  const double n = static_cast<double>(X.rows());
  double total = 0.0;
  for (Eigen::Index l = 0; l < X.cols(); ++l) {
    const double c = hp.c_x[l];
    const double xbar = X.col(l).mean();
    const double ss = (X.col(l).array() - xbar).square().sum();
    const double an = hp.a_x + 0.5 * n;
    const double bn = hp.b_x + 0.5 * (ss + n * c / (n + c) * (xbar - hp.m[l]) * (xbar - hp.m[l]));
    total += -0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * std::log(c / (c + n)) +
             hp.a_x * std::log(hp.b_x) - an * std::log(bn) + std::lgamma(an) - std::lgamma(hp.a_x);
  }
  return total;
}

double log_crp(std::span<const std::size_t> sizes, double alpha) {
  double n = 0.0;
  double s = 0.0;
  for (auto k : sizes) {
    n += static_cast<double>(k);
    s += std::log(alpha) + std::lgamma(static_cast<double>(k));
  }
  return s + std::lgamma(alpha) - std::lgamma(alpha + n);
}

namespace {

std::vector<std::vector<std::vector<int>>> set_partitions(const std::vector<int>& items) {
  std::vector<std::vector<std::vector<int>>> out;
  if (items.empty()) {
    out.push_back({});
    return out;
  }
  const int first = items.front();
  const std::vector<int> rest(items.begin() + 1, items.end());
  for (auto part : set_partitions(rest)) {
    for (std::size_t b = 0; b < part.size(); ++b) {
      auto copy = part;
      copy[b].insert(copy[b].begin(), first);
      out.push_back(copy);
    }
    part.insert(part.begin(), std::vector<int>{first});
    out.push_back(part);
  }
  return out;
}

void canonicalise(NestedPartition& p) {
  for (auto& theta : p) {
    for (auto& psi : theta) std::sort(psi.begin(), psi.end());
    std::sort(theta.begin(), theta.end());
  }
  std::sort(p.begin(), p.end());
}

}  // namespace

std::vector<NestedPartition> nested_partitions(int n) {
  std::vector<int> items(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) items[static_cast<std::size_t>(i)] = i;
  std::vector<NestedPartition> out;
  for (const auto& outer : set_partitions(items)) {
    std::vector<NestedPartition> acc{{}};
    for (const auto& block : outer) {
      std::vector<NestedPartition> next;
      for (const auto& prefix : acc) {
        for (const auto& inner : set_partitions(block)) {
          auto p = prefix;
          p.push_back(inner);
          next.push_back(std::move(p));
        }
      }
      acc = std::move(next);
    }
    for (auto& p : acc) {
      canonicalise(p);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string partition_key(const NestedPartition& p) {
  std::ostringstream out;
  for (const auto& theta : p) {
    out << '[';
    for (const auto& psi : theta) {
      out << '(';
      for (std::size_t i = 0; i < psi.size(); ++i) out << (i ? "," : "") << psi[i];
      out << ')';
    }
    out << ']';
  }
  return out.str();
}

std::string partition_key(std::span<const int> K, std::span<const int> J) {
  int kmax = 0;
  for (int k : K) kmax = std::max(kmax, k);
  NestedPartition p(static_cast<std::size_t>(kmax + 1));
  for (std::size_t i = 0; i < K.size(); ++i) {
    auto& theta = p[static_cast<std::size_t>(K[i])];
    const auto j = static_cast<std::size_t>(J[i]);
    if (theta.size() <= j) theta.resize(j + 1);
    theta[j].push_back(static_cast<int>(i));
  }
  for (auto& theta : p) {
    theta.erase(std::remove_if(theta.begin(), theta.end(), [](const auto& b) { return b.empty(); }),
                theta.end());
  }
  p.erase(std::remove_if(p.begin(), p.end(), [](const auto& t) { return t.empty(); }), p.end());
  canonicalise(p);
  return partition_key(p);
}

std::vector<double> nested_partition_posterior(const std::vector<NestedPartition>& parts,
                                               const Dataset& data, const Hyperparameters& hp,
                                               double alpha_theta, double alpha_psi) {
  std::vector<double> logp;
  for (const auto& part : parts) {
    std::vector<std::size_t> theta_sizes;
    double lp = 0.0;
    for (const auto& theta : part) {
      std::vector<int> members;
      std::vector<std::size_t> psi_sizes;
      for (const auto& psi : theta) {
        members.insert(members.end(), psi.begin(), psi.end());
        psi_sizes.push_back(psi.size());
        Eigen::MatrixXd Xc(static_cast<Eigen::Index>(psi.size()), data.X.cols());
        for (std::size_t r = 0; r < psi.size(); ++r) Xc.row(static_cast<Eigen::Index>(r)) = data.X.row(psi[r]);
        lp += log_marginal_x(Xc, hp);
      }
      theta_sizes.push_back(members.size());
      lp += log_crp(psi_sizes, alpha_psi);
      Eigen::MatrixXd D(static_cast<Eigen::Index>(members.size()), data.X.cols() + 1);
      Eigen::VectorXd y(static_cast<Eigen::Index>(members.size()));
      for (std::size_t r = 0; r < members.size(); ++r) {
        D.row(static_cast<Eigen::Index>(r)) = data.design_row(static_cast<std::size_t>(members[r])).transpose();
        y[static_cast<Eigen::Index>(r)] = data.y[members[r]];
      }
      lp += log_marginal_y(D, y, hp);
    }
    lp += log_crp(theta_sizes, alpha_theta);
    logp.push_back(lp);
  }
  return numeric::softmax(logp);
}

Hyperparameters geweke_hyperparameters(std::size_t p) {
  Hyperparameters hp = Hyperparameters::standard(p);
  hp.a_y = hp.b_y = 3.0;
  hp.a_x = hp.b_x = 3.0;
  return hp;
}

namespace {

void redraw_data(Dataset& data, const std::vector<int>& K, const std::vector<int>& J,
                 const auto& theta_of, const auto& psi_of, Rng& rng) {
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const PsiAtom& psi = psi_of(K[i], J[i]);
    for (Eigen::Index l = 0; l < data.X.cols(); ++l) {
      data.X(ii, l) = random::normal(rng, psi.mu[l], std::sqrt(psi.tau_x[l]));
    }
    const ThetaAtom& theta = theta_of(K[i]);
    data.y[ii] = random::normal(rng, data.design_row(i).dot(theta.beta), std::sqrt(theta.tau_y));
  }
}

}  // namespace

std::vector<double> geweke_blocked(const GewekeSetup& setup) {
  const Hyperparameters hp = geweke_hyperparameters(setup.p);
  const BaseMeasure base(hp);
  Rng rng = make_stream(setup.seed, 0);
  Dataset data(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(setup.n)),
               Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(setup.n), static_cast<Eigen::Index>(setup.p)));
  GibbsState s = initial_state(data, base, setup.trunc, InitPolicy::single_cluster, rng);
  for (std::size_t i = 0; i < setup.n; ++i) {
    s.K[i] = static_cast<int>(random::categorical(rng, s.theta_weights.w));
    s.J[i] = static_cast<int>(random::categorical(rng, s.psi_weights[static_cast<std::size_t>(s.K[i])].w));
  }
  const auto theta_of = [&](int k) -> const ThetaAtom& { return s.theta_atoms[static_cast<std::size_t>(k)]; };
  const auto psi_of = [&](int k, int j) -> const PsiAtom& {
    return s.psi_atoms[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  };
  redraw_data(data, s.K, s.J, theta_of, psi_of, rng);
  std::vector<double> trace;
  trace.reserve(setup.iterations);
  for (std::size_t it = 0; it < setup.iterations; ++it) {
    sweep(s, data, base, rng, true);
    redraw_data(data, s.K, s.J, theta_of, psi_of, rng);
    trace.push_back(s.alpha_theta);
  }
  return trace;
}

std::vector<double> geweke_urn(const GewekeSetup& setup) {
  const Hyperparameters hp = geweke_hyperparameters(setup.p);
  const BaseMeasure base(hp);
  Rng rng = make_stream(setup.seed, 0);
  UrnState s;
  s.alpha_theta = random::gamma(rng, hp.eta_y1, hp.eta_y2);
  s.alpha_psi_common = random::gamma(rng, hp.eta_x1, hp.eta_x2);
  s.K.assign(setup.n, 0);
  s.J.assign(setup.n, 0);
  // Nested Chinese restaurant draw of the partition.
  for (std::size_t i = 0; i < setup.n; ++i) {
    std::vector<double> w;
    for (const auto& c : s.clusters) w.push_back(static_cast<double>(c.size));
    w.push_back(s.alpha_theta);
    const auto k = random::categorical(rng, w);
    if (k == s.clusters.size()) {
      UrnThetaCluster c;
      c.atom = base.draw_theta(rng);
      c.alpha_psi = random::gamma(rng, hp.eta_x1, hp.eta_x2);
      s.clusters.push_back(std::move(c));
    }
    auto& c = s.clusters[k];
    std::vector<double> v;
    for (const auto& q : c.psi) v.push_back(static_cast<double>(q.size));
    v.push_back(c.alpha_psi);
    const auto j = random::categorical(rng, v);
    if (j == c.psi.size()) c.psi.push_back({base.draw_psi(rng), 0});
    ++c.size;
    ++c.psi[j].size;
    s.K[i] = static_cast<int>(k);
    s.J[i] = static_cast<int>(j);
  }
  Dataset data(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(setup.n)),
               Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(setup.n), static_cast<Eigen::Index>(setup.p)));
  const auto theta_of = [&](int k) -> const ThetaAtom& { return s.clusters[static_cast<std::size_t>(k)].atom; };
  const auto psi_of = [&](int k, int j) -> const PsiAtom& {
    return s.clusters[static_cast<std::size_t>(k)].psi[static_cast<std::size_t>(j)].atom;
  };
  redraw_data(data, s.K, s.J, theta_of, psi_of, rng);
  std::vector<double> trace;
  trace.reserve(setup.iterations);
  for (std::size_t it = 0; it < setup.iterations; ++it) {
    pu_sweep(s, data, base, rng, true);
    redraw_data(data, s.K, s.J, theta_of, psi_of, rng);
    trace.push_back(s.alpha_theta);
  }
  return trace;
}

MomentCheck gamma11_mean_check(std::span<const double> trace) {
  return MomentCheck{mean(trace), batch_means_se(trace), 1.0};
}

MomentCheck gamma11_var_check(std::span<const double> trace) {
  std::vector<double> sq(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) sq[i] = (trace[i] - 1.0) * (trace[i] - 1.0);
  return MomentCheck{mean(sq), batch_means_se(sq), 1.0};
}

}  // namespace edpm::testing
