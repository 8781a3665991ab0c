#include "cli/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "edpm/errors.hpp"

namespace edpm::cli {

using nlohmann::json;

namespace {

std::vector<KeySpec> build_schema() {
  using VT = ValueType;
  const json null;
  return {
      {"seed", VT::integer, 0, "RNG seed for every stochastic step"},
      {"data", VT::string, null, "dataset CSV (header y,x1,...,xp)"},
      {"output_dir", VT::string, null, "output directory (default $EDPM_OUTPUT_DIR or ./edpm-out)"},

      {"chain.iterations", VT::integer, 100000, "Gibbs sweeps including burn-in"},
      {"chain.burn_in", VT::integer, 20000, "sweeps discarded before retaining draws"},
      {"chain.thin", VT::integer, 20, "keep every k-th post burn-in draw"},
      {"chain.init", VT::string, "prior-draw", "prior-draw or single-cluster"},
      {"chain.update_concentrations", VT::boolean, true, "resample the concentration parameters"},

      {"truncation.mode", VT::string, "fixed", "fixed or auto"},
      {"truncation.N", VT::integer, 10, "theta-level truncation"},
      {"truncation.M", VT::integer, 50, "psi-level truncation"},
      {"truncation.epsilon", VT::real, 0.01, "auto mode: target L1 error bound"},
      {"truncation.pilot_iterations", VT::integer, 10000, "auto mode: pilot sweeps"},
      {"truncation.pilot_burn_in", VT::integer, 2000, "auto mode: pilot burn-in"},
      {"truncation.pilot_N", VT::integer, 10, "auto mode: pilot N"},
      {"truncation.pilot_M", VT::integer, 50, "auto mode: pilot M"},

      {"urn.m_aux", VT::integer, 3, "auxiliary components per urn update"},

      {"prior.beta0", VT::real_list, null, "regression prior mean (default least squares)"},
      {"prior.C_y", VT::matrix, null, "regression prior precision scale (default X*'X*/n)"},
      {"prior.a_y", VT::real, 2.0, "response inverse-gamma shape"},
      {"prior.b_y", VT::real, 2.0, "response inverse-gamma rate"},
      {"prior.m", VT::real_list, null, "covariate prior means (default sample means)"},
      {"prior.c_x", VT::real_list, null, "covariate prior precision scales (default 0.5)"},
      {"prior.a_x", VT::real, 2.0, "covariate inverse-gamma shape"},
      {"prior.b_x", VT::real, 2.0, "covariate inverse-gamma rate"},
      {"prior.eta_y1", VT::real, 1.0, "Gamma shape for alpha_theta"},
      {"prior.eta_y2", VT::real, 1.0, "Gamma rate for alpha_theta"},
      {"prior.eta_x1", VT::real, 1.0, "Gamma shape for alpha_psi"},
      {"prior.eta_x2", VT::real, 1.0, "Gamma rate for alpha_psi"},
      {"prior.alpha_psi_shared", VT::boolean, false, "one alpha_psi shared by all theta-clusters"},

      {"simulate.p", VT::integer, 5, "number of covariates"},
      {"simulate.n", VT::integer, 200, "number of observations"},

      {"bounds.n", VT::integer, 200, "sample size"},
      {"bounds.N", VT::integer, 10, "theta-level truncation"},
      {"bounds.M", VT::integer, 10, "psi-level truncation"},
      {"bounds.alpha_theta", VT::real, 0.5, "theta concentration"},
      {"bounds.alpha_psi", VT::real_list, std::vector<double>{0.5},
       "psi concentration; several values use the largest"},
      {"bounds.epsilon", VT::real, 0.01, "target bound for the minimal truncation"},
      {"bounds.mc_draws", VT::integer, 0, "Monte-Carlo draws for the exact expectation (0 skips)"},

      {"predict.chain", VT::string, null, "chain JSONL written by fit-blocked or fit-polya"},
      {"predict.hyperparameters", VT::string, null, "hyperparameters.json of the fit"},
      {"predict.x", VT::string, null, "CSV of covariate rows (x1,...,xp; a leading y column is ignored)"},

      {"diagnose.chain", VT::string, null, "chain JSONL"},
      {"diagnose.epsilon", VT::real, 0.01, "target bound for the recommended truncation"},
      {"diagnose.data", VT::string, null, "dataset CSV for batch mixing statistics"},
      {"diagnose.hyperparameters", VT::string, null, "hyperparameters.json for batch mixing statistics"},
      {"diagnose.batch_size", VT::integer, 100, "draws per batch"},

      {"study.p_values", VT::int_list, std::vector<std::int64_t>{5}, "covariate counts"},
      {"study.n", VT::integer, 200, "training sample size"},
      {"study.n_test", VT::integer, 200, "test subjects"},
      {"study.datasets", VT::integer, 2, "datasets per p"},
      {"study.samplers", VT::string_list, std::vector<std::string>{"blocked-fixed", "blocked-auto"},
       "blocked-fixed, blocked-auto, polya-urn"},
      {"study.mixing", VT::boolean, false, "batch mixing statistics over training subjects"},
      {"study.batch_size", VT::integer, 100, "draws per batch"},
      {"study.predict_thin", VT::integer, 1, "test predictions use every k-th draw"},
      {"study.grid_points", VT::integer, 20, "figure grid size"},
      {"study.workers", VT::integer, 1, "concurrent cells"},
  };
}

bool matches(const json& v, ValueType t) {
  const auto all = [&](auto pred) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!pred(e)) return false;
    }
    return true;
  };
  switch (t) {
    case ValueType::integer: return v.is_number_integer();
    case ValueType::real: return v.is_number();
    case ValueType::boolean: return v.is_boolean();
    case ValueType::string: return v.is_string();
    case ValueType::real_list: return all([](const json& e) { return e.is_number(); });
    case ValueType::string_list: return all([](const json& e) { return e.is_string(); });
    case ValueType::int_list: return all([](const json& e) { return e.is_number_integer(); });
    case ValueType::matrix:
      return all([](const json& row) {
        if (!row.is_array()) return false;
        for (const auto& e : row) {
          if (!e.is_number()) return false;
        }
        return true;
      });
  }
  return false;
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::integer: return "integer";
    case ValueType::real: return "number";
    case ValueType::boolean: return "boolean";
    case ValueType::string: return "string";
    case ValueType::real_list: return "list of numbers";
    case ValueType::string_list: return "list of strings";
    case ValueType::int_list: return "list of integers";
    case ValueType::matrix: return "list of number lists";
  }
  return "?";
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      flatten(it.value(), key, out);
    } else {
      out.emplace_back(key, it.value());
    }
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as a number");
  }
  return value;
}

}  // namespace

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> s = build_schema();
  return s;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : schema()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

Config::Config() : values_(json::object()) {
  for (const auto& k : schema()) values_[k.key] = k.default_value;
}

void Config::merge(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::pair<std::string, json>> flat;
  flatten(j, "", flat);
  for (auto& [key, value] : flat) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown config key '" + key + "'");
    if (!value.is_null() && !matches(value, spec->type)) {
      throw ConfigError("config key '" + key + "' must be a " + type_name(spec->type));
    }
    if (spec->type == ValueType::real && value.is_number()) value = value.get<double>();
    if (spec->type == ValueType::real_list && value.is_array()) value = value.get<std::vector<double>>();
    if (spec->type == ValueType::matrix && value.is_array()) {
      value = value.get<std::vector<std::vector<double>>>();
    }
    values_[key] = std::move(value);
  }
}

void Config::set(const std::string& key, const std::string& text) {
  const KeySpec* spec = find_key(key);
  if (!spec) throw ConfigError("unknown config key '" + key + "'");
  json v;
  switch (spec->type) {
    case ValueType::integer: v = parse_number<std::int64_t>(key, text); break;
    case ValueType::real: v = parse_number<double>(key, text); break;
    case ValueType::boolean:
      if (text == "true" || text == "1") {
        v = true;
      } else if (text == "false" || text == "0") {
        v = false;
      } else {
        throw ConfigError("config key '" + key + "': expected true or false, got '" + text + "'");
      }
      break;
    case ValueType::string: v = text; break;
    case ValueType::real_list: {
      std::vector<double> xs;
      for (const auto& part : split(text, ',')) xs.push_back(parse_number<double>(key, part));
      v = xs;
      break;
    }
    case ValueType::int_list: {
      std::vector<std::int64_t> xs;
      for (const auto& part : split(text, ',')) xs.push_back(parse_number<std::int64_t>(key, part));
      v = xs;
      break;
    }
    case ValueType::string_list: {
      std::vector<std::string> xs;
      for (const auto& part : split(text, ',')) xs.push_back(trim(part));
      v = xs;
      break;
    }
    case ValueType::matrix: {
      std::vector<std::vector<double>> rows;
      for (const auto& row : split(text, ';')) {
        std::vector<double> xs;
        for (const auto& part : split(row, ',')) xs.push_back(parse_number<double>(key, part));
        rows.push_back(std::move(xs));
      }
      v = rows;
      break;
    }
  }
  values_[key] = std::move(v);
}

const json& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  if (it->is_null()) throw ConfigError("config key '" + key + "' is required");
  return *it;
}

bool Config::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->is_null();
}

std::int64_t Config::integer(const std::string& key) const { return get(key).get<std::int64_t>(); }

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  const json& v = get(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto i = v.get<std::int64_t>();
  if (i < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::size_t Config::size(const std::string& key) const {
  return static_cast<std::size_t>(unsigned_integer(key));
}

double Config::real(const std::string& key) const { return get(key).get<double>(); }
bool Config::boolean(const std::string& key) const { return get(key).get<bool>(); }
std::string Config::string(const std::string& key) const { return get(key).get<std::string>(); }

std::vector<double> Config::real_list(const std::string& key) const {
  return get(key).get<std::vector<double>>();
}

std::vector<std::string> Config::string_list(const std::string& key) const {
  return get(key).get<std::vector<std::string>>();
}

std::vector<std::int64_t> Config::int_list(const std::string& key) const {
  return get(key).get<std::vector<std::int64_t>>();
}

std::vector<std::vector<double>> Config::matrix(const std::string& key) const {
  return get(key).get<std::vector<std::vector<double>>>();
}

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Config c;
  c.merge(j);
  return c;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace edpm::cli
