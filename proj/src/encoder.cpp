#include "phishtgl/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "phishtgl/base64.hpp"

namespace phishtgl {

using nlohmann::json;

void ModelConfig::validate() const {
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (memory_dim < 2 || memory_dim % 2 != 0) throw ConfigError("memory_dim must be even");
  if (heads < 1 || memory_dim % heads != 0)
    throw ConfigError("heads must divide memory_dim");
  if (neighbor_count < 1) throw ConfigError("neighbor_count must be >= 1");
}

NodeFeatureView NodeFeatureView::of(const Htamg& g) {
  NodeFeatureView view;
  view.table = &g.node_features();
  view.dim = g.node_feature_dim();
  if (view.dim == 0) throw ShapeMismatch("graph has no attached node features");
  return view;
}

Value NodeFeatureView::row(std::int64_t v) const {
  Tensor t(1, dim);
  if (masked.empty() || !masked[v]) {
    const double* src = table->data() + static_cast<std::size_t>(v) * dim;
    std::copy(src, src + dim, t.data.begin());
  }
  return Value::constant(std::move(t));
}

NodeMemory::NodeMemory(std::size_t num_nodes, std::size_t dim)
    : dim_(dim), states_(num_nodes), last_update_(num_nodes, 0.0), pending_(num_nodes) {}

void NodeMemory::ensure_nodes(std::size_t n) {
  if (n <= states_.size()) return;
  states_.resize(n);
  last_update_.resize(n, 0.0);
  pending_.resize(n);
}

void NodeMemory::reset() {
  std::fill(states_.begin(), states_.end(), Value());
  std::fill(last_update_.begin(), last_update_.end(), 0.0);
  for (auto& p : pending_) p.clear();
}

Value NodeMemory::state(std::int64_t v) const {
  if (states_[v].defined()) return states_[v];
  return Value::constant(Tensor::zeros(1, dim_));
}

void NodeMemory::detach_all() {
  for (auto& s : states_)
    if (s.defined() && s.requires_grad()) s = s.detach();
}

std::vector<double> NodeMemory::flatten() const {
  std::vector<double> out(states_.size() * dim_, 0.0);
  for (std::size_t v = 0; v < states_.size(); ++v)
    if (states_[v].defined())
      std::copy(states_[v].tensor().data.begin(), states_[v].tensor().data.end(),
                out.begin() + v * dim_);
  return out;
}

void NodeMemory::restore(const std::vector<double>& values,
                         const std::vector<double>& last_update) {
  if (values.size() != states_.size() * dim_ || last_update.size() != states_.size())
    throw ShapeMismatch("memory snapshot size mismatch");
  for (std::size_t v = 0; v < states_.size(); ++v) {
    Tensor t(1, dim_);
    std::copy(values.begin() + v * dim_, values.begin() + (v + 1) * dim_, t.data.begin());
    states_[v] = Value::constant(std::move(t));
  }
  last_update_ = last_update;
  for (auto& p : pending_) p.clear();
}

namespace {

std::vector<double> edge_attr_vector(const Htamg& g, std::int64_t edge_id) {
  const double* a = g.edge_attr(edge_id);
  return std::vector<double>(a, a + kEdgeAttrDim);
}

}  // namespace

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg), store_(seed) {
  cfg_.validate();
  std::size_t m = cfg_.memory_dim;
  std::size_t d = cfg_.freq_count();
  std::size_t attr = cfg_.edge_attr_dim;
  std::size_t feat = cfg_.feature_dim;

  omega_ = store_.add_param("time_enc.omega", 1, d, d);

  std::size_t msg_in = 3 * m + attr;  // [s_self || s_other || Phi(dt) || attr]
  store_.add_param("msg_src.W", msg_in, m, msg_in);
  store_.add_param("msg_src.b", 1, m, msg_in);
  store_.add_param("msg_dst.W", msg_in, m, msg_in);
  store_.add_param("msg_dst.b", 1, m, msg_in);

  for (const char* gate : {"z", "r", "h"}) {
    store_.add_param(std::string("gru.W_") + gate, 2 * m, m, 2 * m);
    store_.add_param(std::string("gru.b_") + gate, 1, m, 2 * m);
  }

  store_.add_param("node_in.W", m + feat, m, m + feat);
  store_.add_param("node_in.b", 1, m, m + feat);
  store_.add_param("edge_in.W", attr, m, attr);
  store_.add_param("edge_in.b", 1, m, attr);

  for (std::size_t l = 1; l <= cfg_.layers; ++l) {
    std::string p = "layer" + std::to_string(l) + ".";
    store_.add_param(p + "W_q", 2 * m, m, 2 * m);
    store_.add_param(p + "W_k", 3 * m, m, 3 * m);
    store_.add_param(p + "W_v", 3 * m, m, 3 * m);
    store_.add_param(p + "ffn.W1", 2 * m, m, 2 * m);
    store_.add_param(p + "ffn.b1", 1, m, 2 * m);
    store_.add_param(p + "ffn.W2", m, m, m);
    store_.add_param(p + "ffn.b2", 1, m, m);
  }

  store_.add_param("proj.W1", m, m, m);
  store_.add_param("proj.b1", 1, m, m);
  store_.add_param("proj.W2", m, m, m);
  store_.add_param("proj.b2", 1, m, m);
}

Value Model::encode_time(double t) const {
  std::size_t d = cfg_.freq_count();
  Value scaled = scalar_mul(omega_, t);
  Value enc = interleave_cols(cos_op(scaled), sin_op(scaled));
  return scalar_mul(enc, std::sqrt(1.0 / static_cast<double>(d)));
}

Value Model::message(const Value& self_mem, const Value& other_mem, double delta_t,
                     const Value& edge_attr, bool is_source) const {
  Value in = concat_cols({self_mem, other_mem, encode_time(delta_t), edge_attr});
  const char* which = is_source ? "msg_src" : "msg_dst";
  Value w = store_.get(std::string(which) + ".W");
  Value b = store_.get(std::string(which) + ".b");
  return tanh_op(add(matmul(in, w), b));
}

void Model::compute_messages(NodeMemory& mem, std::int64_t src, std::int64_t dst, double t,
                             const std::vector<double>& edge_attr) const {
  if (t < mem.last_update(src) || t < mem.last_update(dst))
    throw TimeRegression("event predates a memory update");
  PendingEvent for_src;
  for_src.other = dst;
  for_src.t = t;
  for_src.delta_t = t - mem.last_update(src);
  for_src.edge_attr = edge_attr;
  for_src.is_source = true;
  for_src.other_memory = mem.state(dst);

  PendingEvent for_dst;
  for_dst.other = src;
  for_dst.t = t;
  for_dst.delta_t = t - mem.last_update(dst);
  for_dst.edge_attr = edge_attr;
  for_dst.is_source = false;
  for_dst.other_memory = mem.state(src);

  mem.pending_[src].push_back(std::move(for_src));
  mem.pending_[dst].push_back(std::move(for_dst));
}

Value Model::aggregate_messages(const std::vector<Value>& messages) const {
  if (messages.empty()) throw EmptyBuffer("no messages to aggregate");
  if (messages.size() == 1) return messages[0];
  return mean_rows(concat_rows(messages));
}

Value Model::gru(const Value& input, const Value& state) const {
  Value gate_in = concat_cols({state, input});
  Value z = sigmoid(add(matmul(gate_in, store_.get("gru.W_z")), store_.get("gru.b_z")));
  Value r = sigmoid(add(matmul(gate_in, store_.get("gru.W_r")), store_.get("gru.b_r")));
  Value cand_in = concat_cols({mul(r, state), input});
  Value cand = tanh_op(add(matmul(cand_in, store_.get("gru.W_h")), store_.get("gru.b_h")));
  // s' = (1 - z) * s + z * cand
  return add(mul(scalar_add(neg(z), 1.0), state), mul(z, cand));
}

void Model::apply_pending(NodeMemory& mem, bool detach) const {
  apply_pending_before(mem, std::numeric_limits<double>::infinity(), detach);
}

void Model::apply_pending_before(NodeMemory& mem, double cutoff, bool detach) const {
  for (std::size_t v = 0; v < mem.size(); ++v) {
    auto& buffer = mem.pending_[v];
    if (buffer.empty()) continue;
    // Buffers fill in time order; take the prefix strictly before the cutoff.
    std::size_t take = 0;
    while (take < buffer.size() && buffer[take].t < cutoff) ++take;
    if (take == 0) continue;

    std::vector<Value> messages;
    messages.reserve(take);
    double latest = mem.last_update_[v];
    for (std::size_t i = 0; i < take; ++i) {
      const PendingEvent& ev = buffer[i];
      messages.push_back(message(mem.state(static_cast<std::int64_t>(v)), ev.other_memory,
                                 ev.delta_t, Value::constant(Tensor::row(ev.edge_attr)),
                                 ev.is_source));
      latest = std::max(latest, ev.t);
    }
    Value aggregated = aggregate_messages(messages);
    Value updated = gru(aggregated, mem.state(static_cast<std::int64_t>(v)));
    mem.states_[v] = detach ? updated.detach() : updated;
    mem.last_update_[v] = latest;
    buffer.erase(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(take));
  }
}

Value Model::edge_base(const Value& edge_attr) const {
  return add(matmul(edge_attr, store_.get("edge_in.W")), store_.get("edge_in.b"));
}

Value Model::attend(const Value& query_prev, const std::vector<Value>& neighbor_prev,
                    const std::vector<Value>& neighbor_edge_base,
                    const std::vector<double>& neighbor_dt, std::size_t layer) const {
  std::size_t m = cfg_.memory_dim;
  if (neighbor_prev.empty()) return Value::constant(Tensor::zeros(1, m));

  std::string p = "layer" + std::to_string(layer) + ".";
  Value q_in = concat_cols({query_prev, encode_time(0.0)});
  Value q = matmul(q_in, store_.get(p + "W_q"));

  std::vector<Value> rows;
  rows.reserve(neighbor_prev.size());
  for (std::size_t i = 0; i < neighbor_prev.size(); ++i)
    rows.push_back(concat_cols(
        {neighbor_prev[i], neighbor_edge_base[i], encode_time(neighbor_dt[i])}));
  Value kv_in = concat_rows(rows);
  Value keys = matmul(kv_in, store_.get(p + "W_k"));
  Value values = matmul(kv_in, store_.get(p + "W_v"));

  std::size_t head_dim = m / cfg_.heads;
  double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::size_t k = neighbor_prev.size();
  std::vector<Value> head_outputs;
  head_outputs.reserve(cfg_.heads);
  for (std::size_t h = 0; h < cfg_.heads; ++h) {
    std::size_t c0 = h * head_dim, c1 = (h + 1) * head_dim;
    Value qh = slice(q, 0, 1, c0, c1);
    Value kh = slice(keys, 0, k, c0, c1);
    Value vh = slice(values, 0, k, c0, c1);
    Value scores = scalar_mul(matmul(qh, transpose(kh)), scale);
    Value attn = softmax_rows(scores);
    head_outputs.push_back(matmul(attn, vh));
  }
  return concat_cols(head_outputs);
}

Value Model::combine_layer(const Value& prev, const Value& attended,
                           std::size_t layer) const {
  std::string p = "layer" + std::to_string(layer) + ".ffn.";
  Value in = concat_cols({prev, attended});
  Value hidden = tanh_op(add(matmul(in, store_.get(p + "W1")), store_.get(p + "b1")));
  return add(matmul(hidden, store_.get(p + "W2")), store_.get(p + "b2"));
}

NodeEmbeddings Model::embed(const Htamg& g, const NodeFeatureView& feats,
                            const NodeMemory& mem, const std::vector<std::int64_t>& targets,
                            double t) const {
  std::size_t L = cfg_.layers;

  // One temporal neighbor sample per node (queries share the time point).
  std::map<std::int64_t, NeighborSample> samples;
  std::vector<std::set<std::int64_t>> need(L + 1);
  need[L] = std::set<std::int64_t>(targets.begin(), targets.end());
  for (std::size_t l = L; l >= 1; --l) {
    need[l - 1] = need[l];
    for (std::int64_t v : need[l]) {
      auto [it, fresh] = samples.try_emplace(v);
      if (fresh) it->second = g.recent_neighbors(v, t, cfg_.neighbor_count, Direction::kBoth);
      for (std::int64_t u : it->second.nodes) need[l - 1].insert(u);
    }
  }

  std::map<std::int64_t, Value> edge_bases;
  auto edge_base_of = [&](std::int64_t edge_id) {
    auto it = edge_bases.find(edge_id);
    if (it != edge_bases.end()) return it->second;
    Value base = edge_base(Value::constant(Tensor::row(edge_attr_vector(g, edge_id))));
    edge_bases.emplace(edge_id, base);
    return base;
  };

  // Layer 0: fuse memory with static features.
  std::map<std::int64_t, Value> prev;
  for (std::int64_t v : need[0]) {
    Value in = concat_cols({mem.state(v), feats.row(v)});
    prev[v] = add(matmul(in, store_.get("node_in.W")), store_.get("node_in.b"));
  }

  NodeEmbeddings out;
  for (std::int64_t v : need[L]) out.layers[v].push_back(prev.at(v));

  for (std::size_t l = 1; l <= L; ++l) {
    std::map<std::int64_t, Value> cur;
    for (std::int64_t v : need[l]) {
      const NeighborSample& sample = samples.at(v);
      std::vector<Value> nbr_prev, nbr_edge;
      std::vector<double> nbr_dt;
      nbr_prev.reserve(sample.size());
      for (std::size_t i = 0; i < sample.size(); ++i) {
        nbr_prev.push_back(prev.at(sample.nodes[i]));
        nbr_edge.push_back(edge_base_of(sample.edge_ids[i]));
        nbr_dt.push_back(t - sample.times[i]);
      }
      Value h = attend(prev.at(v), nbr_prev, nbr_edge, nbr_dt, l);
      cur[v] = combine_layer(prev.at(v), h, l);
    }
    for (std::int64_t v : need[L]) out.layers[v].push_back(cur.at(v));
    prev = std::move(cur);
  }
  return out;
}

Value combine_endpoints(const Value& z_u, const Value& z_v) {
  return mean_rows(concat_rows({z_u, z_v}));
}

Value aggregate_incoming(const std::vector<Value>& prior, std::size_t dim) {
  if (prior.empty()) return Value::constant(Tensor::zeros(1, dim));
  if (prior.size() == 1) return prior[0];
  return mean_rows(concat_rows(prior));
}

std::map<std::int64_t, Value> edge_representations(const Model& model, const Htamg& g,
                                                   const NodeFeatureView& feats,
                                                   const std::vector<std::int64_t>& wanted,
                                                   bool keep_graph) {
  const ModelConfig& cfg = model.config();
  std::size_t L = cfg.layers;
  std::size_t m = cfg.memory_dim;
  std::set<std::int64_t> wanted_set(wanted.begin(), wanted.end());
  std::int64_t last_wanted = wanted_set.empty() ? -1 : *wanted_set.rbegin();

  NodeMemory mem(g.num_nodes(), m);
  // prior[l][u]: representations z^l of edges already delivered into u.
  std::vector<std::vector<std::vector<Value>>> prior(
      L + 1, std::vector<std::vector<Value>>(g.num_nodes()));

  std::map<std::int64_t, Value> result;
  for (std::int64_t id = 0; id <= last_wanted && id < g.num_edges(); ++id) {
    const TemporalEdge& e = g.edge(id);
    model.apply_pending_before(mem, e.t, /*detach=*/!keep_graph);

    std::vector<std::int64_t> targets{e.src};
    if (e.dst != e.src) targets.push_back(e.dst);
    NodeEmbeddings embs = model.embed(g, feats, mem, targets, e.t);

    Value z = model.edge_base(Value::constant(Tensor::row(edge_attr_vector(g, id))));
    for (std::size_t l = 1; l <= L; ++l) {
      Value h_uv = combine_endpoints(embs.at(e.dst, l), embs.at(e.src, l));
      Value h_in = aggregate_incoming(prior[l][e.dst], m);
      z = mean_rows(concat_rows({z, h_uv, h_in}));
      prior[l][e.dst].push_back(z);
    }
    if (wanted_set.count(id)) result.emplace(id, z);

    model.compute_messages(mem, e.src, e.dst, e.t, edge_attr_vector(g, id));
  }
  return result;
}

void replay_memory_range(const Model& model, const Htamg& g, NodeMemory& mem,
                         std::size_t from_edge, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  for (std::int64_t id = static_cast<std::int64_t>(from_edge); id < g.num_edges(); ++id) {
    if ((id - static_cast<std::int64_t>(from_edge)) % static_cast<std::int64_t>(batch_size) ==
        0)
      model.apply_pending(mem, /*detach=*/true);
    const TemporalEdge& e = g.edge(id);
    model.compute_messages(mem, e.src, e.dst, e.t, edge_attr_vector(g, id));
  }
  model.apply_pending(mem, /*detach=*/true);
}

void replay_memory(const Model& model, const Htamg& g, NodeMemory& mem,
                   std::size_t batch_size) {
  replay_memory_range(model, g, mem, 0, batch_size);
}

Value node_embedding(const Model& model, const Htamg& g, const NodeFeatureView& feats,
                     const NodeMemory& mem, std::int64_t v, double t) {
  return model.embed(g, feats, mem, {v}, t).top(v);
}

void to_json(json& j, const ModelConfig& cfg) {
  j = json{{"layers", cfg.layers},
           {"heads", cfg.heads},
           {"memory_dim", cfg.memory_dim},
           {"neighbor_count", cfg.neighbor_count},
           {"feature_dim", cfg.feature_dim},
           {"edge_attr_dim", cfg.edge_attr_dim}};
}

void from_json(const json& j, ModelConfig& cfg) {
  j.at("layers").get_to(cfg.layers);
  j.at("heads").get_to(cfg.heads);
  j.at("memory_dim").get_to(cfg.memory_dim);
  j.at("neighbor_count").get_to(cfg.neighbor_count);
  j.at("feature_dim").get_to(cfg.feature_dim);
  j.at("edge_attr_dim").get_to(cfg.edge_attr_dim);
}

void save_checkpoint(const std::string& path, const Model& model, const NodeMemory* memory) {
  json j;
  j["format"] = "phishtgl-checkpoint";
  j["version"] = 1;
  j["seed"] = model.store().seed();
  j["config"] = model.config();
  json params = json::object();
  for (const auto& name : model.store().names()) {
    const Tensor& t = model.store().get(name).tensor();
    params[name] = {{"shape", {t.rows, t.cols}}, {"data", base64_encode(t.data)}};
  }
  j["params"] = std::move(params);
  if (memory) {
    j["memory"] = {{"num_nodes", memory->size()},
                   {"dim", memory->dim()},
                   {"states", base64_encode(memory->flatten())},
                   {"last_update", base64_encode(memory->last_update_times())}};
  } else {
    j["memory"] = nullptr;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j = json::parse(in);
  if (j.value("format", "") != "phishtgl-checkpoint" || j.value("version", 0) != 1)
    throw SchemaError("not a recognized checkpoint file");
  Checkpoint ckpt;
  ckpt.config = j.at("config").get<ModelConfig>();
  ckpt.seed = j.at("seed").get<std::uint64_t>();
  ckpt.model = std::make_unique<Model>(ckpt.config, ckpt.seed);
  for (const auto& name : ckpt.model->store().names()) {
    const json& p = j.at("params").at(name);
    std::size_t rows = p.at("shape")[0].get<std::size_t>();
    std::size_t cols = p.at("shape")[1].get<std::size_t>();
    Tensor t(rows, cols, base64_decode(p.at("data").get<std::string>(), rows * cols));
    ckpt.model->store().set_value(name, t);
  }
  if (!j.at("memory").is_null()) {
    const json& mj = j.at("memory");
    std::size_t n = mj.at("num_nodes").get<std::size_t>();
    std::size_t dim = mj.at("dim").get<std::size_t>();
    ckpt.memory = std::make_unique<NodeMemory>(n, dim);
    ckpt.memory->restore(base64_decode(mj.at("states").get<std::string>(), n * dim),
                         base64_decode(mj.at("last_update").get<std::string>(), n));
  }
  return ckpt;
}

}  // namespace phishtgl
