#include "cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "edpm/blocked_gibbs.hpp"
#include "edpm/bounds.hpp"
#include "edpm/chain_io.hpp"
#include "edpm/errors.hpp"
#include "edpm/inference.hpp"
#include "edpm/polya_urn.hpp"
#include "edpm/simstudy.hpp"

namespace edpm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const std::vector<std::vector<double>>& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c) {
      throw ConfigError("matrix rows differ in length");
    }
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

struct Invocation {
  std::string subcommand;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool json_output = false;
};

Config resolve_config(const Invocation& inv) {
  Config c = inv.config_path.empty() ? Config() : parse_config(inv.config_path);
  for (const auto& [key, value] : inv.overrides) c.set(key, value);
  return c;
}

// Writes config.resolved.json and manifest.json; `artifacts` are file names
// inside the output directory.
void write_manifest(const fs::path& dir, const Invocation& inv, Config c,
                    std::vector<std::string> artifacts) {
  c.set("output_dir", dir.string());
  write_text(dir / "config.resolved.json", c.resolved().dump(2) + "\n");
  artifacts.push_back("config.resolved.json");
  artifacts.push_back("manifest.json");
  json m;
  m["subcommand"] = inv.subcommand;
  m["config_path"] = inv.config_path;
  m["seed"] = c.unsigned_integer("seed");
  m["artifacts"] = artifacts;
  m["code_version"] = kVersion;
  m["resolved"] = c.resolved();
  m["reproduce"] = "edpm " + inv.subcommand + " --config " + (dir / "config.resolved.json").string();
  m["timestamp"] = timestamp_utc();
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

InitPolicy init_policy(const Config& c) {
  const auto s = c.string("chain.init");
  if (s == "prior-draw") return InitPolicy::prior_draw;
  if (s == "single-cluster") return InitPolicy::single_cluster;
  throw ConfigError("config key 'chain.init' must be prior-draw or single-cluster, got '" + s + "'");
}

int as_int(const Config& c, const std::string& key) {
  const auto v = c.integer(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("config key '" + key + "' is out of range");
  }
  return static_cast<int>(v);
}

ChainConfig chain_config(const Config& c) {
  ChainConfig cc;
  cc.iterations = c.size("chain.iterations");
  cc.burn_in = c.size("chain.burn_in");
  cc.thin = c.size("chain.thin");
  cc.seed = c.unsigned_integer("seed");
  cc.init = init_policy(c);
  cc.update_concentrations = c.boolean("chain.update_concentrations");
  const auto mode = c.string("truncation.mode");
  if (mode == "fixed") {
    cc.trunc = Truncation(as_int(c, "truncation.N"), as_int(c, "truncation.M"));
  } else if (mode == "auto") {
    AutoTruncation a;
    a.epsilon = c.real("truncation.epsilon");
    a.pilot_iterations = c.size("truncation.pilot_iterations");
    a.pilot_burn_in = c.size("truncation.pilot_burn_in");
    a.pilot = Truncation(as_int(c, "truncation.pilot_N"), as_int(c, "truncation.pilot_M"));
    cc.trunc = a;
  } else {
    throw ConfigError("config key 'truncation.mode' must be fixed or auto, got '" + mode + "'");
  }
  cc.validate();
  return cc;
}

UrnConfig urn_config(const Config& c) {
  UrnConfig uc;
  uc.iterations = c.size("chain.iterations");
  uc.burn_in = c.size("chain.burn_in");
  uc.thin = c.size("chain.thin");
  uc.seed = c.unsigned_integer("seed");
  uc.init = init_policy(c);
  uc.update_concentrations = c.boolean("chain.update_concentrations");
  uc.m_aux = as_int(c, "urn.m_aux");
  uc.validate();
  return uc;
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream out;
  out.precision(precision);
  out << v;
  return out.str();
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---- subcommands ----

int cmd_simulate(const Invocation& inv, const Config& c, std::ostream& out) {
  DgpConfig dgp;
  dgp.p = c.size("simulate.p");
  dgp.n = c.size("simulate.n");
  dgp.validate();
  const fs::path dir = prepare_dir(resolve_output_dir(c));
  Rng rng = make_stream(c.unsigned_integer("seed"), 0);
  const Dataset data = simulate_dataset(dgp, rng);
  write_dataset_csv(data, (dir / "data.csv").string());
  std::ostringstream truth;
  truth << "truth\n";
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    truth << fmt(true_conditional_mean(data.X(i, 0), dgp), 17) << '\n';
  }
  write_text(dir / "truth.csv", truth.str());
  write_manifest(dir, inv, c, {"data.csv", "truth.csv"});
  out << "wrote " << data.n() << " rows with p=" << data.p() << " to " << (dir / "data.csv").string() << '\n';
  return ok;
}

int cmd_fit(const Invocation& inv, const Config& c, std::ostream& out, bool urn) {
  const Dataset data = read_dataset_csv(c.string("data"));
  data.validate();
  const Hyperparameters hp = resolve_hyperparameters(c, data);
  std::optional<ChainConfig> cc;
  std::optional<UrnConfig> uc;
  if (urn) {
    uc = urn_config(c);
  } else {
    cc = chain_config(c);
  }
  const fs::path dir = prepare_dir(resolve_output_dir(c));
  write_text(dir / "hyperparameters.json", hyperparameters_to_json(hp).dump(2) + "\n");
  ChainWriter writer((dir / "chain.jsonl").string(), (dir / "trace.csv").string());
  const DrawObserver observer = [&](const ChainDraw& d) { writer.write(d); };
  json run;
  run["sampler"] = urn ? "polya-urn" : "blocked";
  if (urn) {
    run["draws"] = run_pu_chain(data, hp, *uc, observer);
    run["m_aux"] = uc->m_aux;
  } else {
    const RunInfo info = run_chain(data, hp, *cc, observer);
    run["draws"] = info.draws;
    run["truncation"] = {{"N", info.trunc.N}, {"M", info.trunc.M}};
    if (info.pilot) {
      run["pilot"] = {{"alpha_theta", info.pilot->alpha_theta},
                      {"alpha_psi_max", info.pilot->alpha_psi_max}};
    }
    out << "truncation N=" << info.trunc.N << " M=" << info.trunc.M << '\n';
  }
  write_text(dir / "run.json", run.dump(2) + "\n");
  write_manifest(dir, inv, c, {"hyperparameters.json", "chain.jsonl", "trace.csv", "run.json"});
  out << "wrote " << writer.written() << " draws to " << (dir / "chain.jsonl").string() << '\n';
  return ok;
}

int cmd_predict(const Invocation& inv, const Config& c, std::ostream& out) {
  const std::string chain_path = c.string("predict.chain");
  const Hyperparameters hp = read_hyperparameters(c.string("predict.hyperparameters"));
  const Eigen::MatrixXd X = read_covariates_csv(c.string("predict.x"));
  if (static_cast<std::size_t>(X.cols()) != hp.p()) {
    throw DomainError("covariate file has " + std::to_string(X.cols()) + " columns, the fit has p=" +
                      std::to_string(hp.p()));
  }
  if (!fs::exists(chain_path)) throw IoError("cannot open chain '" + chain_path + "'");
  const fs::path dir = prepare_dir(resolve_output_dir(c));
  const Predictor predictor(hp);
  std::vector<std::vector<double>> values(static_cast<std::size_t>(X.rows()));
  const std::size_t draws = for_each_draw(chain_path, [&](const ChainDraw& d) {
    const auto m = predictor.conditional_means(d, X);
    for (std::size_t r = 0; r < m.size(); ++r) values[r].push_back(m[r]);
  });
  if (draws == 0) throw DomainError("chain '" + chain_path + "' has no draws");
  std::ostringstream csv;
  csv << "id,mean,q025,q25,q75,q975\n";
  for (std::size_t r = 0; r < values.size(); ++r) {
    const auto s = predictive_summary(values[r]);
    csv << r + 1 << ',' << fmt(s.mean) << ',' << fmt(s.q025()) << ',' << fmt(s.q25()) << ','
        << fmt(s.q75()) << ',' << fmt(s.q975()) << '\n';
  }
  write_text(dir / "predictions.csv", csv.str());
  write_manifest(dir, inv, c, {"predictions.csv"});
  out << "predicted " << values.size() << " rows from " << draws << " draws\n";
  return ok;
}

int cmd_diagnose(const Invocation& inv, const Config& c, std::ostream& out) {
  const std::string chain_path = c.string("diagnose.chain");
  const double eps = c.real("diagnose.epsilon");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("config key 'diagnose.epsilon' must lie in (0, 1)");
  const bool mixing = c.has("diagnose.data") || c.has("diagnose.hyperparameters");
  std::optional<Dataset> data;
  std::optional<Hyperparameters> hp;
  if (mixing) {
    data = read_dataset_csv(c.string("diagnose.data"));
    hp = read_hyperparameters(c.string("diagnose.hyperparameters"));
  }
  if (!fs::exists(chain_path)) throw IoError("cannot open chain '" + chain_path + "'");
  const fs::path dir = prepare_dir(resolve_output_dir(c));

  std::vector<double> a_theta;
  std::vector<double> a_psi;
  double occupied = 0.0;
  std::size_t n = 0;
  std::optional<Predictor> predictor;
  std::optional<BatchMixingAccumulator> acc;
  if (mixing) {
    predictor.emplace(*hp);
    acc.emplace(data->n(), c.size("diagnose.batch_size"));
  }
  const std::size_t draws = for_each_draw(chain_path, [&](const ChainDraw& d) {
    a_theta.push_back(d.alpha_theta());
    a_psi.push_back(d.alpha_psi_max());
    std::visit(
        [&](const auto& s) {
          n = s.K.size();
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GibbsState>) {
            std::vector<int> seen(static_cast<std::size_t>(s.trunc.N), 0);
            for (int k : s.K) seen[static_cast<std::size_t>(k)] = 1;
            for (int v : seen) occupied += v;
          } else {
            occupied += static_cast<double>(s.clusters.size());
          }
        },
        d.state);
    if (acc) acc->add(predictor->conditional_means(d, data->X));
  });
  if (draws == 0) throw DomainError("chain '" + chain_path + "' has no draws");
  const auto est = estimate_concentrations(a_theta, a_psi);
  const auto pair = min_truncation(static_cast<double>(n), est.alpha_theta, est.alpha_psi_max, eps);
  json report;
  report["draws"] = draws;
  report["n"] = n;
  report["alpha_theta_mean"] = est.alpha_theta;
  report["alpha_psi_max_mean"] = est.alpha_psi_max;
  report["occupied_theta_clusters_mean"] = occupied / static_cast<double>(draws);
  report["recommended_truncation"] = {{"N", pair.N}, {"M", pair.M}, {"epsilon", eps}};
  if (acc) {
    const auto t = acc->table();
    json mj = json::object();
    for (std::size_t q = 0; q < 5; ++q) {
      mj[to_string(kMixingStatistics[q])] = {{"mean", t.rows[q].mean}, {"sd", t.rows[q].sd}};
    }
    report["batch_mixing"] = mj;
  }
  write_text(dir / "diagnose.json", report.dump(2) + "\n");
  write_manifest(dir, inv, c, {"diagnose.json"});
  out << report.dump(2) << '\n';
  return ok;
}

int cmd_study(const Invocation& inv, const Config& c, std::ostream& out) {
  StudyConfig sc;
  sc.p_values.clear();
  for (auto p : c.int_list("study.p_values")) {
    if (p <= 0) throw ConfigError("config key 'study.p_values' must hold positive integers");
    sc.p_values.push_back(static_cast<std::size_t>(p));
  }
  sc.n = c.size("study.n");
  sc.n_test = c.size("study.n_test");
  sc.datasets = c.size("study.datasets");
  sc.samplers.clear();
  for (const auto& s : c.string_list("study.samplers")) sc.samplers.push_back(sampler_from_string(s));
  sc.iterations = c.size("chain.iterations");
  sc.burn_in = c.size("chain.burn_in");
  sc.fixed = Truncation(as_int(c, "truncation.N"), as_int(c, "truncation.M"));
  sc.autotrunc.epsilon = c.real("truncation.epsilon");
  sc.autotrunc.pilot_iterations = c.size("truncation.pilot_iterations");
  sc.autotrunc.pilot_burn_in = c.size("truncation.pilot_burn_in");
  sc.autotrunc.pilot = Truncation(as_int(c, "truncation.pilot_N"), as_int(c, "truncation.pilot_M"));
  sc.m_aux = as_int(c, "urn.m_aux");
  sc.mixing = c.boolean("study.mixing");
  sc.batch_size = c.size("study.batch_size");
  sc.predict_thin = c.size("study.predict_thin");
  sc.grid_points = c.size("study.grid_points");
  sc.workers = c.size("study.workers");
  sc.seed = c.unsigned_integer("seed");
  sc.output_dir = resolve_output_dir(c);
  sc.validate();
  prepare_dir(sc.output_dir);
  const StudyReport report = run_study(sc);
  write_manifest(fs::path(sc.output_dir), inv, c,
                 sc.mixing ? std::vector<std::string>{"table2.csv", "table3.csv", "figure.csv", "report.json"}
                           : std::vector<std::string>{"table2.csv", "figure.csv", "report.json"});
  out << "p,sampler,datasets,l1_mean,l1_sd,l2_mean,l2_sd\n";
  for (const auto& s : report.summary) {
    out << s.p << ',' << to_string(s.sampler) << ',' << s.datasets << ',' << fmt(s.l1_mean, 6) << ','
        << fmt(s.l1_sd, 6) << ',' << fmt(s.l2_mean, 6) << ',' << fmt(s.l2_sd, 6) << '\n';
  }
  return ok;
}

bool explicit_output_dir(const Config& c) {
  return c.has("output_dir") || std::getenv("EDPM_OUTPUT_DIR") != nullptr;
}

int cmd_bounds(const Invocation& inv, const Config& c, std::ostream& out) {
  const auto alpha_psi = c.real_list("bounds.alpha_psi");
  const double n = static_cast<double>(c.size("bounds.n"));
  const int N = as_int(c, "bounds.N");
  const int M = as_int(c, "bounds.M");
  const double a_theta = c.real("bounds.alpha_theta");
  const double eps = c.real("bounds.epsilon");
  const BoundResult r = l1_bound_varying(n, N, M, a_theta, alpha_psi);
  const double a_psi_max = *std::max_element(alpha_psi.begin(), alpha_psi.end());
  const TruncationPair pair = min_truncation(n, a_theta, a_psi_max, eps);
  const std::size_t mc_draws = c.size("bounds.mc_draws");
  std::optional<McEstimate> mc;
  if (mc_draws > 0) {
    mc = exact_bound_mc(BoundQuery{n, N, M, a_theta, a_psi_max}, mc_draws, c.unsigned_integer("seed"));
  }
  json j;
  j["bound"] = r.bound;
  j["theta_term"] = r.theta_term;
  j["psi_term"] = r.psi_term;
  j["minimal"] = {{"N", pair.N}, {"M", pair.M}, {"epsilon", eps}};
  if (mc) j["exact_mc"] = {{"estimate", mc->estimate}, {"std_error", mc->std_error}, {"draws", mc_draws}};
  if (inv.json_output) {
    out << j.dump(2) << '\n';
  } else {
    out << "L1 bound: " << sci(r.bound) << " (N=" << N << " M=" << M << ")\n";
    out << "minimal truncation for bound <= " << fmt(eps) << ": N=" << pair.N << " M=" << pair.M << '\n';
    if (mc) out << "exact (Monte Carlo): " << sci(mc->estimate) << " +/- " << sci(mc->std_error) << '\n';
  }
  if (explicit_output_dir(c)) {
    const fs::path dir = prepare_dir(resolve_output_dir(c));
    write_text(dir / "bounds.json", j.dump(2) + "\n");
    write_manifest(dir, inv, c, {"bounds.json"});
  }
  return ok;
}

int cmd_min_trunc(const Invocation& inv, const Config& c, std::ostream& out) {
  const auto alpha_psi = c.real_list("bounds.alpha_psi");
  if (alpha_psi.empty()) throw DomainError("config key 'bounds.alpha_psi' needs at least one value");
  const double a_psi_max = *std::max_element(alpha_psi.begin(), alpha_psi.end());
  const double n = static_cast<double>(c.size("bounds.n"));
  const double eps = c.real("bounds.epsilon");
  const TruncationPair pair = min_truncation(n, c.real("bounds.alpha_theta"), a_psi_max, eps);
  const BoundResult r = l1_bound(BoundQuery{n, pair.N, pair.M, c.real("bounds.alpha_theta"), a_psi_max});
  json j{{"N", pair.N}, {"M", pair.M}, {"epsilon", eps}, {"bound", r.bound}};
  if (inv.json_output) {
    out << j.dump(2) << '\n';
  } else {
    out << "N=" << pair.N << " M=" << pair.M << '\n';
  }
  if (explicit_output_dir(c)) {
    const fs::path dir = prepare_dir(resolve_output_dir(c));
    write_text(dir / "min_trunc.json", j.dump(2) + "\n");
    write_manifest(dir, inv, c, {"min_trunc.json"});
  }
  return ok;
}

int run(const Invocation& inv, std::ostream& out) {
  const Config c = resolve_config(inv);
  if (inv.subcommand == "simulate") return cmd_simulate(inv, c, out);
  if (inv.subcommand == "fit-blocked") return cmd_fit(inv, c, out, false);
  if (inv.subcommand == "fit-polya") return cmd_fit(inv, c, out, true);
  if (inv.subcommand == "predict") return cmd_predict(inv, c, out);
  if (inv.subcommand == "diagnose") return cmd_diagnose(inv, c, out);
  if (inv.subcommand == "study") return cmd_study(inv, c, out);
  if (inv.subcommand == "bounds") return cmd_bounds(inv, c, out);
  if (inv.subcommand == "min-trunc") return cmd_min_trunc(inv, c, out);
  throw ConfigError("unknown subcommand '" + inv.subcommand + "'");
}

struct FlagSpec {
  const char* flag;
  const char* key;
};

void add_flags(CLI::App* sub, Invocation& inv, std::initializer_list<FlagSpec> flags) {
  sub->add_option("--config", inv.config_path, "JSON config with flat dotted keys");
  sub->add_option_function<std::vector<std::string>>(
         "--set",
         [&inv](const std::vector<std::string>& items) {
           for (const auto& item : items) {
             const auto eq = item.find('=');
             if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got '" + item + "'");
             inv.overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
           }
         },
         "override any config key (key=value, repeatable)")
      ->take_all()
      ->allow_extra_args(false);
  sub->add_option_function<std::string>(
      "--output-dir", [&inv](const std::string& v) { inv.overrides.emplace_back("output_dir", v); },
      "output directory");
  sub->add_option_function<std::string>(
      "--seed", [&inv](const std::string& v) { inv.overrides.emplace_back("seed", v); }, "RNG seed");
  for (const auto& f : flags) {
    const std::string key = f.key;
    sub->add_option_function<std::string>(
        f.flag, [&inv, key](const std::string& v) { inv.overrides.emplace_back(key, v); },
        "sets " + key);
  }
}

}  // namespace

std::string resolve_output_dir(const Config& c) {
  if (c.has("output_dir")) return c.string("output_dir");
  if (const char* env = std::getenv("EDPM_OUTPUT_DIR"); env && *env) return env;
  return "edpm-out";
}

Hyperparameters resolve_hyperparameters(const Config& c, const Dataset& data) {
  const std::size_t p = data.p();
  Hyperparameters hp = data.n() >= p + 1 ? default_hyperparameters(data) : Hyperparameters::standard(p);
  if (data.n() < p + 1) hp.c_x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(p), 0.5);
  if (c.has("prior.beta0")) hp.beta0 = vec_from(c.real_list("prior.beta0"));
  if (c.has("prior.C_y")) hp.C_y = matrix_from(c.matrix("prior.C_y"));
  if (c.has("prior.m")) hp.m = vec_from(c.real_list("prior.m"));
  if (c.has("prior.c_x")) {
    const auto v = c.real_list("prior.c_x");
    hp.c_x = v.size() == 1 ? Eigen::VectorXd::Constant(static_cast<Eigen::Index>(p), v[0]) : vec_from(v);
  }
  hp.a_y = c.real("prior.a_y");
  hp.b_y = c.real("prior.b_y");
  hp.a_x = c.real("prior.a_x");
  hp.b_x = c.real("prior.b_x");
  hp.eta_y1 = c.real("prior.eta_y1");
  hp.eta_y2 = c.real("prior.eta_y2");
  hp.eta_x1 = c.real("prior.eta_x1");
  hp.eta_x2 = c.real("prior.eta_x2");
  hp.alpha_psi_shared = c.boolean("prior.alpha_psi_shared");
  if (hp.p() != p) throw DomainError("prior.m length does not match the dataset's covariate count");
  hp.validate();
  return hp;
}

json hyperparameters_to_json(const Hyperparameters& hp) {
  json j;
  j["beta0"] = vec_json(hp.beta0);
  json rows = json::array();
  for (Eigen::Index i = 0; i < hp.C_y.rows(); ++i) rows.push_back(vec_json(hp.C_y.row(i).transpose()));
  j["C_y"] = rows;
  j["a_y"] = hp.a_y;
  j["b_y"] = hp.b_y;
  j["m"] = vec_json(hp.m);
  j["c_x"] = vec_json(hp.c_x);
  j["a_x"] = hp.a_x;
  j["b_x"] = hp.b_x;
  j["eta_y1"] = hp.eta_y1;
  j["eta_y2"] = hp.eta_y2;
  j["eta_x1"] = hp.eta_x1;
  j["eta_x2"] = hp.eta_x2;
  j["alpha_psi_shared"] = hp.alpha_psi_shared;
  return j;
}

Hyperparameters hyperparameters_from_json(const json& j) {
  try {
    Hyperparameters hp;
    hp.beta0 = vec_from(j.at("beta0").get<std::vector<double>>());
    hp.C_y = matrix_from(j.at("C_y").get<std::vector<std::vector<double>>>());
    hp.a_y = j.at("a_y").get<double>();
    hp.b_y = j.at("b_y").get<double>();
    hp.m = vec_from(j.at("m").get<std::vector<double>>());
    hp.c_x = vec_from(j.at("c_x").get<std::vector<double>>());
    hp.a_x = j.at("a_x").get<double>();
    hp.b_x = j.at("b_x").get<double>();
    hp.eta_y1 = j.at("eta_y1").get<double>();
    hp.eta_y2 = j.at("eta_y2").get<double>();
    hp.eta_x1 = j.at("eta_x1").get<double>();
    hp.eta_x2 = j.at("eta_x2").get<double>();
    hp.alpha_psi_shared = j.at("alpha_psi_shared").get<bool>();
    hp.validate();
    return hp;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed hyperparameters: ") + e.what());
  }
}

Hyperparameters read_hyperparameters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open hyperparameters '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("hyperparameters '" + path + "' are not valid JSON: " + e.what());
  }
  return hyperparameters_from_json(j);
}

Eigen::MatrixXd read_covariates_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open covariates '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.rfind("y,", 0) == 0) return parse_dataset_csv(text).X;
  std::istringstream lines(text);
  std::ostringstream with_y;
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    with_y << (header ? "y," : "0,") << line << '\n';
    header = false;
  }
  return parse_dataset_csv(with_y.str()).X;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enriched Dirichlet process mixture regression: samplers, bounds and studies", "edpm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Invocation inv;

  auto* simulate = app.add_subcommand("simulate", "draw a dataset from the two-component toy model");
  add_flags(simulate, inv, {{"--p", "simulate.p"}, {"--n", "simulate.n"}});

  const std::initializer_list<FlagSpec> fit_flags{{"--data", "data"},
                                                   {"--iterations", "chain.iterations"},
                                                   {"--burn-in", "chain.burn_in"},
                                                   {"--thin", "chain.thin"},
                                                   {"--truncation", "truncation.mode"},
                                                   {"--N", "truncation.N"},
                                                   {"--M", "truncation.M"},
                                                   {"--eps", "truncation.epsilon"}};
  auto* fit_blocked = app.add_subcommand("fit-blocked", "run the truncated blocked Gibbs sampler");
  add_flags(fit_blocked, inv, fit_flags);
  auto* fit_polya = app.add_subcommand("fit-polya", "run the marginal Polya urn sampler");
  add_flags(fit_polya, inv,
            {{"--data", "data"},
             {"--iterations", "chain.iterations"},
             {"--burn-in", "chain.burn_in"},
             {"--thin", "chain.thin"},
             {"--m-aux", "urn.m_aux"}});

  const std::initializer_list<FlagSpec> bound_flags{{"--n", "bounds.n"},
                                                     {"--N", "bounds.N"},
                                                     {"--M", "bounds.M"},
                                                     {"--alpha-theta", "bounds.alpha_theta"},
                                                     {"--alpha-psi", "bounds.alpha_psi"},
                                                     {"--eps", "bounds.epsilon"},
                                                     {"--mc-draws", "bounds.mc_draws"}};
  auto* bounds = app.add_subcommand("bounds", "L1 truncation error bound at (N, M)");
  add_flags(bounds, inv, bound_flags);
  bounds->add_flag("--json", inv.json_output, "print JSON");
  auto* min_trunc = app.add_subcommand(
      "min-trunc",
      "smallest (N, M) with bound <= eps: each of the theta and psi terms is held to eps/2");
  add_flags(min_trunc, inv,
            {{"--n", "bounds.n"},
             {"--alpha-theta", "bounds.alpha_theta"},
             {"--alpha-psi", "bounds.alpha_psi"},
             {"--eps", "bounds.epsilon"}});
  min_trunc->add_flag("--json", inv.json_output, "print JSON");

  auto* predict = app.add_subcommand("predict", "posterior E[Y|x] mean and quantiles per covariate row");
  add_flags(predict, inv,
            {{"--chain", "predict.chain"},
             {"--hyperparameters", "predict.hyperparameters"},
             {"--x", "predict.x"}});
  auto* diagnose = app.add_subcommand("diagnose", "concentration estimates, truncation advice, batch mixing");
  add_flags(diagnose, inv,
            {{"--chain", "diagnose.chain"},
             {"--eps", "diagnose.epsilon"},
             {"--data", "diagnose.data"},
             {"--hyperparameters", "diagnose.hyperparameters"},
             {"--batch-size", "diagnose.batch_size"}});
  auto* study = app.add_subcommand("study", "simulation study: prediction error and batch mixing tables");
  add_flags(study, inv,
            {{"--p", "study.p_values"},
             {"--datasets", "study.datasets"},
             {"--samplers", "study.samplers"},
             {"--iterations", "chain.iterations"},
             {"--burn-in", "chain.burn_in"},
             {"--mixing", "study.mixing"},
             {"--workers", "study.workers"}});

  if (argc < 2) {
    err << app.help();
    return config_error;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return config_error;
  }
  inv.subcommand = app.get_subcommands().front()->get_name();

  try {
    return run(inv, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return config_error;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return io_error;
  } catch (const MatrixError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return numeric_error;
  } catch (const NumericalError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return numeric_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace edpm::cli
