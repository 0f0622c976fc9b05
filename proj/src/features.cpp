#include "phishtgl/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace phishtgl {

const char* const kFeatureNames[kNodeFeatureDim] = {
    "aid", "aod", "atd", "ivf", "ovf", "tve", "dtd", "cir", "pntd", "ncd",
    "ic",  "oc",  "dc",  "andc", "pr", "scc", "mnr", "utp", "kind_code"};

std::vector<double> feature_row(const NodeFeatureVector& f) {
  return {f.aid, f.aod, f.atd, f.ivf, f.ovf, f.tve, f.dtd, f.cir, f.pntd, f.ncd,
          f.ic,  f.oc,  f.dc,  f.andc, f.pr, f.scc, f.mnr, f.utp, f.kind_code};
}

DegreeValueFeatures degree_value_features(const Htamg& g) {
  std::size_t n = g.num_nodes();
  DegreeValueFeatures out;
  out.aid.assign(n, 0);
  out.aod.assign(n, 0);
  out.atd.assign(n, 0);
  out.ivf.assign(n, 0);
  out.ovf.assign(n, 0);
  out.tve.assign(n, 0);
  for (const auto& e : g.edges()) {
    out.aod[e.src] += 1;
    out.aid[e.dst] += 1;
    out.ovf[e.src] += e.value_raw;
    out.ivf[e.dst] += e.value_raw;
  }
  for (std::size_t v = 0; v < n; ++v) {
    out.atd[v] = out.aid[v] + out.aod[v];
    out.tve[v] = out.ivf[v] + out.ovf[v];
  }
  return out;
}

std::vector<double> dtd(const Htamg& g, const FeatureConfig& cfg) {
  std::size_t n = g.num_nodes();
  std::vector<double> first(n, 0), last(n, 0), degree(n, 0);
  std::vector<bool> seen(n, false);
  auto touch = [&](std::int64_t v, double t) {
    if (!seen[v]) {
      seen[v] = true;
      first[v] = last[v] = t;
    } else {
      first[v] = std::min(first[v], t);
      last[v] = std::max(last[v], t);
    }
    degree[v] += 1;
  };
  for (const auto& e : g.edges()) {
    touch(e.src, e.t);
    touch(e.dst, e.t);
  }
  std::vector<double> out(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (degree[v] == 0) continue;
    double span = std::max(last[v] - first[v], cfg.dtd_min_span);
    out[v] = degree[v] / span;
  }
  return out;
}

namespace {

bool contract_involving(const Htamg& g, const TemporalEdge& e, std::int64_t v) {
  if (e.tx_type_id == static_cast<int>(TxCategory::kContractInteraction) ||
      e.tx_type_id == static_cast<int>(TxCategory::kInternalTx))
    return true;
  std::int64_t other = e.src == v ? e.dst : e.src;
  return g.kind(other) == AccountKind::kCa;
}

}  // namespace

std::vector<std::vector<std::int64_t>> simple_projection(const Htamg& g) {
  std::size_t n = g.num_nodes();
  std::vector<std::vector<std::int64_t>> nbrs(n);
  for (const auto& e : g.edges()) {
    if (e.src == e.dst) continue;
    nbrs[e.src].push_back(e.dst);
    nbrs[e.dst].push_back(e.src);
  }
  for (auto& v : nbrs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return nbrs;
}

CirPntd cir_pntd(const Htamg& g) {
  std::size_t n = g.num_nodes();
  CirPntd out;
  out.cir.assign(n, 0);
  out.pntd.assign(n, 0);

  std::vector<double> atd(n, 0), contract(n, 0);
  for (const auto& e : g.edges()) {
    atd[e.src] += 1;
    atd[e.dst] += 1;
    if (contract_involving(g, e, e.src)) contract[e.src] += 1;
    if (contract_involving(g, e, e.dst)) contract[e.dst] += 1;
  }
  auto nbrs = simple_projection(g);
  for (std::size_t v = 0; v < n; ++v) {
    if (atd[v] > 0) out.cir[v] = contract[v] / atd[v];
    double peak = 0;
    for (std::int64_t u : nbrs[v]) peak = std::max(peak, atd[u]);
    out.pntd[v] = peak;
  }
  return out;
}

CentralityFeatures centrality_features(const Htamg& g) {
  std::int64_t n = g.num_nodes();
  if (n < 2) throw TooFewNodes("centrality needs at least 2 nodes");
  auto deg = degree_value_features(g);
  auto nbrs = simple_projection(g);
  CentralityFeatures out;
  out.ncd.assign(n, 0);
  out.ic.assign(n, 0);
  out.oc.assign(n, 0);
  out.dc.assign(n, 0);
  out.andc.assign(n, 0);
  double denom = static_cast<double>(n - 1);
  for (std::int64_t v = 0; v < n; ++v) {
    out.ncd[v] = static_cast<double>(nbrs[v].size());
    out.ic[v] = deg.aid[v] / denom;
    out.oc[v] = deg.aod[v] / denom;
    out.dc[v] = out.ic[v] + out.oc[v];
  }
  for (std::int64_t v = 0; v < n; ++v) {
    if (nbrs[v].empty()) continue;
    double sum = 0;
    for (std::int64_t u : nbrs[v]) sum += out.dc[u];
    out.andc[v] = sum / static_cast<double>(nbrs[v].size());
  }
  return out;
}

PagerankResult pagerank(const Htamg& g, const FeatureConfig& cfg) {
  std::int64_t n = g.num_nodes();
  PagerankResult res;
  if (n == 0) return res;
  double d = cfg.pagerank_damping;
  if (d <= 0 || d >= 1) throw ConfigError("pagerank damping must be in (0,1)");

  std::vector<double> aod(n, 0);
  for (const auto& e : g.edges()) aod[e.src] += 1;

  std::vector<double> pr(n, 1.0 / n), next(n, 0.0);
  double inv_n = 1.0 / static_cast<double>(n);
  res.converged = false;
  for (std::size_t it = 0; it < cfg.pagerank_max_iter; ++it) {
    double dangling = 0.0;
    for (std::int64_t v = 0; v < n; ++v)
      if (aod[v] == 0) dangling += pr[v];
    std::fill(next.begin(), next.end(), (1.0 - d) * inv_n + d * dangling * inv_n);
    // Each transaction carries pr[src]/aod[src]; multi-edges count multiply.
    for (const auto& e : g.edges()) next[e.dst] += d * pr[e.src] / aod[e.src];
    double diff = 0.0;
    for (std::int64_t v = 0; v < n; ++v) diff += std::abs(next[v] - pr[v]);
    pr.swap(next);
    res.iterations = it + 1;
    if (diff < cfg.pagerank_tol) {
      res.converged = true;
      break;
    }
  }
  double sum = 0.0;
  for (double v : pr) sum += v;
  if (sum > 0)
    for (double& v : pr) v /= sum;
  res.pr = std::move(pr);
  return res;
}

std::vector<double> scc(const Htamg& g) {
  std::size_t n = g.num_nodes();
  auto nbrs = simple_projection(g);
  std::vector<double> out(n, 0);
  auto common_excluding = [&](std::int64_t a, std::int64_t b, std::int64_t skip) {
    const auto& A = nbrs[a];
    const auto& B = nbrs[b];
    std::size_t i = 0, j = 0, count = 0;
    while (i < A.size() && j < B.size()) {
      if (A[i] < B[j])
        ++i;
      else if (A[i] > B[j])
        ++j;
      else {
        if (A[i] != skip) ++count;
        ++i;
        ++j;
      }
    }
    return count;
  };
  auto adjacent = [&](std::int64_t a, std::int64_t b) {
    return std::binary_search(nbrs[a].begin(), nbrs[a].end(), b);
  };
  for (std::size_t v = 0; v < n; ++v) {
    const auto& N = nbrs[v];
    if (N.size() < 2) continue;
    double squares = 0, potential = 0;
    for (std::size_t i = 0; i < N.size(); ++i)
      for (std::size_t j = i + 1; j < N.size(); ++j) {
        std::int64_t u = N[i], w = N[j];
        double q = static_cast<double>(common_excluding(u, w, static_cast<std::int64_t>(v)));
        squares += q;
        double degm = q + 1 + (adjacent(u, w) ? 1 : 0);
        potential += (nbrs[u].size() - degm) + (nbrs[w].size() - degm) + q;
      }
    if (potential > 0) out[v] = squares / potential;
  }
  return out;
}

std::vector<double> mnr(const Htamg& g) {
  std::size_t n = g.num_nodes();
  auto nbrs = simple_projection(g);
  std::vector<double> out(n, 0);
  std::vector<std::int64_t> dist(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (nbrs[v].empty()) continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::deque<std::int64_t> queue{static_cast<std::int64_t>(v)};
    dist[v] = 0;
    std::int64_t ecc = 0;
    while (!queue.empty()) {
      std::int64_t x = queue.front();
      queue.pop_front();
      ecc = std::max(ecc, dist[x]);
      for (std::int64_t u : nbrs[x])
        if (dist[u] < 0) {
          dist[u] = dist[x] + 1;
          queue.push_back(u);
        }
    }
    out[v] = static_cast<double>(ecc);
  }
  return out;
}

namespace {

void count_paths(const std::vector<std::vector<std::int64_t>>& nbrs,
                 const std::vector<std::int64_t>& first_order, std::int64_t cur,
                 std::size_t depth, std::size_t cap, std::vector<bool>& on_path,
                 double& count) {
  for (std::int64_t next : nbrs[cur]) {
    if (on_path[next]) continue;
    if (depth + 1 >= 2 &&
        !std::binary_search(first_order.begin(), first_order.end(), next))
      count += 1;
    if (depth + 1 < cap) {
      on_path[next] = true;
      count_paths(nbrs, first_order, next, depth + 1, cap, on_path, count);
      on_path[next] = false;
    }
  }
}

}  // namespace

std::vector<double> utp(const Htamg& g, const FeatureConfig& cfg) {
  if (cfg.utp_depth_cap < 2) throw ConfigError("utp depth cap must be >= 2");
  std::size_t n = g.num_nodes();
  auto nbrs = simple_projection(g);
  std::vector<double> out(n, 0);
  std::vector<bool> on_path(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (nbrs[v].empty()) continue;
    on_path[v] = true;
    count_paths(nbrs, nbrs[v], static_cast<std::int64_t>(v), 0, cfg.utp_depth_cap, on_path,
                out[v]);
    on_path[v] = false;
  }
  return out;
}

FeatureExtraction compute_all_features(const Htamg& g, const FeatureConfig& cfg) {
  std::size_t n = g.num_nodes();
  FeatureExtraction out;
  out.nodes.resize(n);
  auto deg = degree_value_features(g);
  auto density = dtd(g, cfg);
  auto cp = cir_pntd(g);
  auto pg = pagerank(g, cfg);
  out.pagerank_converged = pg.converged;
  auto square = scc(g);
  auto reach = mnr(g);
  auto paths = utp(g, cfg);

  CentralityFeatures cent;
  if (n >= 2) {
    cent = centrality_features(g);
  } else {
    cent.ncd.assign(n, 0);
    cent.ic.assign(n, 0);
    cent.oc.assign(n, 0);
    cent.dc.assign(n, 0);
    cent.andc.assign(n, 0);
  }
  for (std::size_t v = 0; v < n; ++v) {
    NodeFeatureVector& f = out.nodes[v];
    f.aid = deg.aid[v];
    f.aod = deg.aod[v];
    f.atd = deg.atd[v];
    f.ivf = deg.ivf[v];
    f.ovf = deg.ovf[v];
    f.tve = deg.tve[v];
    f.dtd = density[v];
    f.cir = cp.cir[v];
    f.pntd = cp.pntd[v];
    f.ncd = cent.ncd[v];
    f.ic = cent.ic[v];
    f.oc = cent.oc[v];
    f.dc = cent.dc[v];
    f.andc = cent.andc[v];
    f.pr = pg.pr.empty() ? 0.0 : pg.pr[v];
    f.scc = square[v];
    f.mnr = reach[v];
    f.utp = paths[v];
    f.kind_code = static_cast<double>(g.kind(v));
  }
  return out;
}

void ColumnStats::save_json(const std::string& path) const {
  nlohmann::json j;
  for (std::size_t c = 0; c < kNodeFeatureDim; ++c) {
    j[kFeatureNames[c]]["mu"] = mu[c];
    j[kFeatureNames[c]]["sigma"] = sigma[c];
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

ColumnStats ColumnStats::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  ColumnStats s;
  s.mu.resize(kNodeFeatureDim);
  s.sigma.resize(kNodeFeatureDim);
  for (std::size_t c = 0; c < kNodeFeatureDim; ++c) {
    s.mu[c] = j.at(kFeatureNames[c]).at("mu").get<double>();
    s.sigma[c] = j.at(kFeatureNames[c]).at("sigma").get<double>();
  }
  return s;
}

ColumnStats assemble(Htamg& g, const std::vector<NodeFeatureVector>& feats,
                     const std::optional<ColumnStats>& frozen) {
  std::size_t n = g.num_nodes();
  if (feats.size() != n) throw ShapeMismatch("feature rows do not match node count");

  std::vector<double> table(n * kNodeFeatureDim);
  for (std::size_t v = 0; v < n; ++v) {
    auto row = feature_row(feats[v]);
    std::copy(row.begin(), row.end(), table.begin() + v * kNodeFeatureDim);
  }

  constexpr std::size_t kKindCol = kNodeFeatureDim - 1;
  ColumnStats stats;
  if (frozen) {
    if (frozen->mu.size() != kNodeFeatureDim || frozen->sigma.size() != kNodeFeatureDim)
      throw ShapeMismatch("frozen stats have wrong width");
    stats = *frozen;
  } else {
    stats.mu.assign(kNodeFeatureDim, 0.0);
    stats.sigma.assign(kNodeFeatureDim, 1.0);
    for (std::size_t c = 0; c < kNodeFeatureDim; ++c) {
      if (c == kKindCol) continue;  // categorical passthrough
      double mu = 0;
      for (std::size_t v = 0; v < n; ++v) mu += table[v * kNodeFeatureDim + c];
      mu /= n;
      double var = 0;
      for (std::size_t v = 0; v < n; ++v) {
        double diff = table[v * kNodeFeatureDim + c] - mu;
        var += diff * diff;
      }
      var /= n;
      stats.mu[c] = mu;
      stats.sigma[c] = std::max(std::sqrt(var), 1e-12);
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t c = 0; c < kNodeFeatureDim; ++c) {
      if (c == kKindCol) continue;
      double& x = table[v * kNodeFeatureDim + c];
      x = (x - stats.mu[c]) / stats.sigma[c];
    }

  g.attach_node_features(std::move(table), kNodeFeatureDim);
  return stats;
}

void save_features_csv(const std::string& path, const std::vector<NodeFeatureVector>& feats) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "node_id";
  for (const char* name : kFeatureNames) out << ',' << name;
  out << "\n";
  out.precision(17);
  for (std::size_t v = 0; v < feats.size(); ++v) {
    out << v;
    for (double x : feature_row(feats[v])) out << ',' << x;
    out << "\n";
  }
}

std::vector<NodeFeatureVector> load_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty feature csv");
  std::vector<NodeFeatureVector> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        first = false;
        continue;
      }
      vals.push_back(std::stod(cell));
    }
    if (vals.size() != kNodeFeatureDim) throw SchemaError("bad feature row width");
    NodeFeatureVector f;
    f.aid = vals[0]; f.aod = vals[1]; f.atd = vals[2]; f.ivf = vals[3]; f.ovf = vals[4];
    f.tve = vals[5]; f.dtd = vals[6]; f.cir = vals[7]; f.pntd = vals[8]; f.ncd = vals[9];
    f.ic = vals[10]; f.oc = vals[11]; f.dc = vals[12]; f.andc = vals[13]; f.pr = vals[14];
    f.scc = vals[15]; f.mnr = vals[16]; f.utp = vals[17]; f.kind_code = vals[18];
    out.push_back(f);
  }
  return out;
}

}  // namespace phishtgl
