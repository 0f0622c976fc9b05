#include "phishtgl/htamg.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace phishtgl {

std::vector<double> encode_edge_attr(const Transaction& tx) {
  std::vector<double> attr(kEdgeAttrDim, 0.0);
  attr[0] = tx.value_z;
  attr[1] = tx.gas_z;
  attr[2 + tx.tx_type_id] = 1.0;
  attr[2 + kNumTxCategories + tx.token_type_id] = 1.0;
  return attr;
}

void Htamg::append_edges(const std::vector<Transaction>& txs) {
  double last_t = max_time();
  bool empty = edges_.empty();
  for (const auto& tx : txs) {
    if (!empty && tx.t < last_t)
      throw UnsortedInput("edge at t=" + std::to_string(tx.t) +
                          " precedes stored t=" + std::to_string(last_t));
    last_t = tx.t;
    empty = false;
    std::int64_t id = num_edges();
    TemporalEdge e;
    e.src = tx.src;
    e.dst = tx.dst;
    e.t = tx.t;
    e.tx_type_id = tx.tx_type_id;
    e.token_type_id = tx.token_type_id;
    e.value_raw = tx.value_raw;
    if (e.src < 0 || e.dst < 0) throw NodeOutOfRange("negative node id");
    std::int64_t needed = std::max(e.src, e.dst) + 1;
    if (needed > num_nodes()) {
      kinds_.resize(needed, AccountKind::kUnknown);
      in_index_.resize(needed);
      out_index_.resize(needed);
    }
    edges_.push_back(e);
    auto attr = encode_edge_attr(tx);
    edge_attrs_.insert(edge_attrs_.end(), attr.begin(), attr.end());
    out_index_[e.src].push_back(id);
    in_index_[e.dst].push_back(id);
  }
}

Htamg build(const std::vector<Transaction>& txs, const std::vector<AccountKind>& kinds) {
  for (std::size_t i = 1; i < txs.size(); ++i)
    if (txs[i].t < txs[i - 1].t) throw UnsortedInput("transactions not sorted by time");
  Htamg g;
  g.kinds_ = kinds;
  g.in_index_.resize(kinds.size());
  g.out_index_.resize(kinds.size());
  g.append_edges(txs);
  return g;
}

void extend(Htamg& g, const std::vector<Transaction>& txs,
            const std::vector<AccountKind>& kinds) {
  for (std::size_t i = 1; i < txs.size(); ++i)
    if (txs[i].t < txs[i - 1].t) throw UnsortedInput("transactions not sorted by time");
  if (!txs.empty() && g.num_edges() > 0 && txs.front().t < g.max_time())
    throw TimeRegression("new batch starts at t=" + std::to_string(txs.front().t) +
                         " before stored max t=" + std::to_string(g.max_time()));
  if (static_cast<std::int64_t>(kinds.size()) > g.num_nodes()) {
    g.kinds_ = kinds;
    g.in_index_.resize(kinds.size());
    g.out_index_.resize(kinds.size());
  }
  g.append_edges(txs);
}

void Htamg::attach_node_features(std::vector<double> table, std::size_t dim) {
  if (table.size() != static_cast<std::size_t>(num_nodes()) * dim)
    throw ShapeMismatch("node feature table size does not match num_nodes x dim");
  node_features_ = std::move(table);
  node_feature_dim_ = dim;
}

NeighborSample Htamg::recent_neighbors(std::int64_t v, double t, std::size_t n,
                                       Direction dir) const {
  if (v < 0 || v >= num_nodes())
    throw NodeOutOfRange("node " + std::to_string(v) + " of " + std::to_string(num_nodes()));
  if (n == 0) return {};

  // Edges within one index are time-sorted by construction; find the first
  // edge at time >= t and walk backwards.
  auto tail_before = [&](const std::vector<std::int64_t>& idx) {
    auto cmp = [this](std::int64_t id, double time) { return edges_[id].t < time; };
    return std::lower_bound(idx.begin(), idx.end(), t, cmp);
  };

  std::vector<std::int64_t> picked;
  if (dir == Direction::kBoth) {
    const auto& in = in_index_[v];
    const auto& out = out_index_[v];
    auto in_end = tail_before(in), out_end = tail_before(out);
    auto in_it = in.begin(), out_it = out.begin();
    std::size_t in_count = static_cast<std::size_t>(in_end - in_it);
    std::size_t out_count = static_cast<std::size_t>(out_end - out_it);
    // Merge the two tails from the most recent end; ties break to the larger
    // edge id (later insertion) as "more recent".
    std::vector<std::int64_t> rev;
    std::size_t i = in_count, o = out_count;
    while (rev.size() < n && (i > 0 || o > 0)) {
      if (i == 0)
        rev.push_back(out[--o]);
      else if (o == 0)
        rev.push_back(in[--i]);
      else {
        std::int64_t ie = in[i - 1], oe = out[o - 1];
        if (ie == oe) {  // self-loop: one event, listed in both indexes
          rev.push_back(in[--i]);
          --o;
          continue;
        }
        bool take_in = edges_[ie].t > edges_[oe].t ||
                       (edges_[ie].t == edges_[oe].t && ie > oe);
        if (take_in)
          rev.push_back(in[--i]);
        else
          rev.push_back(out[--o]);
      }
    }
    picked.assign(rev.rbegin(), rev.rend());
  } else {
    const auto& idx = dir == Direction::kIn ? in_index_[v] : out_index_[v];
    auto end = tail_before(idx);
    auto begin = idx.begin();
    std::size_t count = static_cast<std::size_t>(end - begin);
    std::size_t take = std::min(n, count);
    picked.assign(end - static_cast<std::ptrdiff_t>(take), end);
  }

  NeighborSample sample;
  sample.nodes.reserve(picked.size());
  sample.edge_ids.reserve(picked.size());
  sample.times.reserve(picked.size());
  for (std::int64_t id : picked) {
    const TemporalEdge& e = edges_[id];
    sample.nodes.push_back(e.src == v ? e.dst : e.src);
    sample.edge_ids.push_back(id);
    sample.times.push_back(e.t);
  }
  return sample;
}

namespace {

constexpr char kMagic[4] = {'H', 'T', 'M', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void Htamg::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(num_nodes()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(num_edges()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(kEdgeAttrDim));
  for (AccountKind k : kinds_) put<std::uint8_t>(out, static_cast<std::uint8_t>(k));
  for (std::int64_t i = 0; i < num_edges(); ++i) {
    const TemporalEdge& e = edges_[i];
    put<std::int64_t>(out, e.src);
    put<std::int64_t>(out, e.dst);
    put<double>(out, e.t);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.tx_type_id));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(e.token_type_id));
    put<double>(out, e.value_raw);
    out.write(reinterpret_cast<const char*>(edge_attr(i)), kEdgeAttrDim * sizeof(double));
  }
  if (!out) throw IoError("write failed for " + path);

  nlohmann::json meta;
  meta["format"] = "htamg-snapshot";
  meta["version"] = kVersion;
  meta["num_nodes"] = num_nodes();
  meta["num_edges"] = num_edges();
  meta["edge_attr_dim"] = kEdgeAttrDim;
  meta["endianness"] = "little";
  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot write " + path + ".json");
  side << meta.dump(2) << "\n";
}

Htamg Htamg::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw SchemaError("bad snapshot magic");
  if (get<std::uint32_t>(in) != kVersion) throw SchemaError("unsupported snapshot version");
  std::uint64_t nodes = get<std::uint64_t>(in);
  std::uint64_t edges = get<std::uint64_t>(in);
  std::uint32_t attr_dim = get<std::uint32_t>(in);
  if (attr_dim != kEdgeAttrDim) throw SchemaError("edge attr dim mismatch");
  Htamg g;
  g.kinds_.resize(nodes);
  for (auto& k : g.kinds_) k = static_cast<AccountKind>(get<std::uint8_t>(in));
  g.in_index_.resize(nodes);
  g.out_index_.resize(nodes);
  g.edges_.reserve(edges);
  g.edge_attrs_.resize(edges * kEdgeAttrDim);
  for (std::uint64_t i = 0; i < edges; ++i) {
    TemporalEdge e;
    e.src = get<std::int64_t>(in);
    e.dst = get<std::int64_t>(in);
    e.t = get<double>(in);
    e.tx_type_id = get<std::uint8_t>(in);
    e.token_type_id = get<std::uint8_t>(in);
    e.value_raw = get<double>(in);
    in.read(reinterpret_cast<char*>(&g.edge_attrs_[i * kEdgeAttrDim]),
            kEdgeAttrDim * sizeof(double));
    g.edges_.push_back(e);
    g.out_index_[e.src].push_back(static_cast<std::int64_t>(i));
    g.in_index_[e.dst].push_back(static_cast<std::int64_t>(i));
  }
  if (!in) throw IoError("truncated snapshot " + path);
  return g;
}

}  // namespace phishtgl
