#include "edpm/chain_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "edpm/errors.hpp"

namespace edpm {

using nlohmann::json;

double ChainDraw::alpha_theta() const {
  return std::visit([](const auto& s) { return s.alpha_theta; }, state);
}

double ChainDraw::alpha_psi_max() const {
  if (const auto* g = std::get_if<GibbsState>(&state)) {
    if (g->alpha_psi.empty()) throw DomainError("draw has no alpha_psi values");
    return *std::max_element(g->alpha_psi.begin(), g->alpha_psi.end());
  }
  const auto& u = std::get<UrnState>(state);
  if (u.clusters.empty()) return u.alpha_psi_common;
  double best = u.clusters.front().alpha_psi;
  for (const auto& c : u.clusters) best = std::max(best, c.alpha_psi);
  return best;
}

namespace {

json vec(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd to_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json one_based(const std::vector<int>& labels) {
  json out = json::array();
  for (int v : labels) out.push_back(v + 1);
  return out;
}

std::vector<int> zero_based(const json& j) {
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(v.get<int>() - 1);
  return out;
}

json psi_json(const PsiAtom& a) { return json{{"mu", vec(a.mu)}, {"tau_x", vec(a.tau_x)}}; }
PsiAtom psi_from(const json& j) { return PsiAtom{to_vec(j.at("mu")), to_vec(j.at("tau_x"))}; }

json free_complements(const StickWeights& sw) {
  if (sw.log1m_V.empty()) return json::array();
  return std::vector<double>(sw.log1m_V.begin(), sw.log1m_V.end() - 1);
}

StickWeights sticks_from(const json& V, const json& w, const json* log1m) {
  StickWeights sw{V.get<std::vector<double>>(), w.get<std::vector<double>>(), {}};
  if (sw.V.size() != sw.w.size()) throw IoError("stick fractions and weights differ in length");
  if (log1m != nullptr && log1m->size() + 1 == sw.V.size()) {
    sw.log1m_V = log1m->get<std::vector<double>>();
    sw.log1m_V.push_back(-std::numeric_limits<double>::infinity());
  } else {
    for (double v : sw.V) sw.log1m_V.push_back(std::log1p(-v));
  }
  return sw;
}

json blocked_json(const GibbsState& s) {
  json j;
  j["N"] = s.trunc.N;
  j["M"] = s.trunc.M;
  j["alpha_theta"] = s.alpha_theta;
  j["alpha_psi"] = s.alpha_psi;
  j["theta_V"] = s.theta_weights.V;
  j["theta_w"] = s.theta_weights.w;
  j["theta_log1mV"] = free_complements(s.theta_weights);
  json pv = json::array();
  json pw = json::array();
  json pl = json::array();
  for (const auto& w : s.psi_weights) {
    pv.push_back(w.V);
    pw.push_back(w.w);
    pl.push_back(free_complements(w));
  }
  j["psi_V"] = std::move(pv);
  j["psi_w"] = std::move(pw);
  j["psi_log1mV"] = std::move(pl);
  json ta = json::array();
  for (const auto& a : s.theta_atoms) ta.push_back({{"beta", vec(a.beta)}, {"tau_y", a.tau_y}});
  j["theta_atoms"] = std::move(ta);
  json pa = json::array();
  for (const auto& row : s.psi_atoms) {
    json r = json::array();
    for (const auto& a : row) r.push_back(psi_json(a));
    pa.push_back(std::move(r));
  }
  j["psi_atoms"] = std::move(pa);
  j["K"] = one_based(s.K);
  j["J"] = one_based(s.J);
  return j;
}

GibbsState blocked_from(const json& j) {
  GibbsState s;
  s.trunc = Truncation(j.at("N").get<int>(), j.at("M").get<int>());
  s.alpha_theta = j.at("alpha_theta").get<double>();
  s.alpha_psi = j.at("alpha_psi").get<std::vector<double>>();
  const auto* tl = j.contains("theta_log1mV") ? &j.at("theta_log1mV") : nullptr;
  s.theta_weights = sticks_from(j.at("theta_V"), j.at("theta_w"), tl);
  const auto& pv = j.at("psi_V");
  const auto& pw = j.at("psi_w");
  const auto* pl = j.contains("psi_log1mV") ? &j.at("psi_log1mV") : nullptr;
  if (pv.size() != pw.size()) throw IoError("psi_V and psi_w differ in length");
  if (pl != nullptr && pl->size() != pv.size()) throw IoError("psi_log1mV and psi_V differ in length");
  for (std::size_t k = 0; k < pv.size(); ++k) {
    s.psi_weights.push_back(sticks_from(pv[k], pw[k], pl != nullptr ? &(*pl)[k] : nullptr));
  }
  for (const auto& a : j.at("theta_atoms")) {
    s.theta_atoms.push_back(ThetaAtom{to_vec(a.at("beta")), a.at("tau_y").get<double>()});
  }
  for (const auto& row : j.at("psi_atoms")) {
    std::vector<PsiAtom> r;
    for (const auto& a : row) r.push_back(psi_from(a));
    s.psi_atoms.push_back(std::move(r));
  }
  s.K = zero_based(j.at("K"));
  s.J = zero_based(j.at("J"));
  return s;
}

json urn_json(const UrnState& s) {
  json j;
  j["alpha_theta"] = s.alpha_theta;
  j["alpha_psi_common"] = s.alpha_psi_common;
  j["m_aux"] = s.m_aux;
  json cs = json::array();
  for (const auto& c : s.clusters) {
    json cj{{"beta", vec(c.atom.beta)}, {"tau_y", c.atom.tau_y}, {"alpha_psi", c.alpha_psi},
            {"size", c.size}};
    json ps = json::array();
    for (const auto& q : c.psi) {
      json qj = psi_json(q.atom);
      qj["size"] = q.size;
      ps.push_back(std::move(qj));
    }
    cj["psi"] = std::move(ps);
    cs.push_back(std::move(cj));
  }
  j["clusters"] = std::move(cs);
  j["K"] = one_based(s.K);
  j["J"] = one_based(s.J);
  return j;
}

UrnState urn_from(const json& j) {
  UrnState s;
  s.alpha_theta = j.at("alpha_theta").get<double>();
  s.alpha_psi_common = j.at("alpha_psi_common").get<double>();
  s.m_aux = j.at("m_aux").get<int>();
  for (const auto& cj : j.at("clusters")) {
    UrnThetaCluster c;
    c.atom = ThetaAtom{to_vec(cj.at("beta")), cj.at("tau_y").get<double>()};
    c.alpha_psi = cj.at("alpha_psi").get<double>();
    c.size = cj.at("size").get<std::size_t>();
    for (const auto& qj : cj.at("psi")) c.psi.push_back({psi_from(qj), qj.at("size").get<std::size_t>()});
    s.clusters.push_back(std::move(c));
  }
  s.K = zero_based(j.at("K"));
  s.J = zero_based(j.at("J"));
  return s;
}

}  // namespace

std::string draw_to_json(const ChainDraw& draw) {
  json j = std::visit(
      [](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, GibbsState>) {
          return blocked_json(s);
        } else {
          return urn_json(s);
        }
      },
      draw.state);
  j["iter"] = draw.iter;
  j["representation"] = draw.representation() == Representation::blocked ? "blocked" : "urn";
  return j.dump();
}

ChainDraw draw_from_json(const std::string& line) {
  try {
    const json j = json::parse(line);
    ChainDraw d;
    d.iter = j.at("iter").get<std::size_t>();
    const auto rep = j.at("representation").get<std::string>();
    if (rep == "blocked") {
      d.state = blocked_from(j);
    } else if (rep == "urn") {
      d.state = urn_from(j);
    } else {
      throw IoError("unknown draw representation '" + rep + "'");
    }
    return d;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed chain draw: ") + e.what());
  }
}

std::string trace_header() { return "iter,alpha_theta,alpha_psi_max,clusters,occupancy"; }

std::string trace_row(const ChainDraw& draw) {
  std::vector<std::size_t> sizes;
  if (const auto* g = std::get_if<GibbsState>(&draw.state)) {
    sizes.assign(static_cast<std::size_t>(g->trunc.N), 0);
    for (int k : g->K) ++sizes[static_cast<std::size_t>(k)];
  } else {
    for (const auto& c : std::get<UrnState>(draw.state).clusters) sizes.push_back(c.size);
  }
  const auto occupied = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
  std::ostringstream out;
  out.precision(17);
  out << draw.iter << ',' << draw.alpha_theta() << ',' << draw.alpha_psi_max() << ',' << occupied << ',';
  for (std::size_t k = 0; k < sizes.size(); ++k) out << (k ? ";" : "") << sizes[k];
  return out.str();
}

ChainWriter::ChainWriter(const std::string& jsonl_path, const std::string& trace_path)
    : jsonl_(jsonl_path, std::ios::binary | std::ios::trunc) {
  if (!jsonl_) throw IoError("cannot open '" + jsonl_path + "' for writing");
  if (!trace_path.empty()) {
    trace_.open(trace_path, std::ios::binary | std::ios::trunc);
    if (!trace_) throw IoError("cannot open '" + trace_path + "' for writing");
    has_trace_ = true;
    trace_ << trace_header() << '\n';
  }
}

void ChainWriter::write(const ChainDraw& draw) {
  jsonl_ << draw_to_json(draw) << '\n';
  jsonl_.flush();
  if (has_trace_) {
    trace_ << trace_row(draw) << '\n';
    trace_.flush();
  }
  if (!jsonl_ || (has_trace_ && !trace_)) throw IoError("write to chain output failed");
  ++written_;
}

std::size_t for_each_draw(const std::string& path, const DrawObserver& observer) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open chain '" + path + "'");
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    observer(draw_from_json(line));
    ++count;
  }
  return count;
}

Chain read_chain_jsonl(const std::string& path) {
  Chain chain;
  for_each_draw(path, [&](const ChainDraw& d) { chain.draws.push_back(d); });
  return chain;
}

}  // namespace edpm
