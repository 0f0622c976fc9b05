#ifndef PHISHTGL_ENCODER_HPP_
#define PHISHTGL_ENCODER_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "phishtgl/features.hpp"
#include "phishtgl/htamg.hpp"
#include "phishtgl/tensor.hpp"

namespace phishtgl {

struct ModelConfig {
  std::size_t layers = 2;         // L
  std::size_t heads = 8;          // H
  std::size_t memory_dim = 128;   // m; time encoding has dim m (d = m/2 frequencies)
  std::size_t neighbor_count = 20;
  std::size_t feature_dim = kNodeFeatureDim;
  std::size_t edge_attr_dim = kEdgeAttrDim;

  std::size_t freq_count() const { return memory_dim / 2; }
  void validate() const;
};

// Read access to a (possibly feature-masked) node attribute table.
struct NodeFeatureView {
  const std::vector<double>* table = nullptr;  // row-major n x dim
  std::size_t dim = 0;
  std::vector<bool> masked;  // empty = nothing masked

  static NodeFeatureView of(const Htamg& g);
  Value row(std::int64_t v) const;  // constant 1 x dim; zeros when masked
};

// A raw event waiting to be turned into messages at the next memory update.
struct PendingEvent {
  std::int64_t other = 0;  // counterpart node
  double t = 0.0;
  double delta_t = 0.0;    // t - last_update at buffering time
  std::vector<double> edge_attr;
  bool is_source = false;  // this node is the sender (selects msg_s vs msg_d)
  Value other_memory;      // counterpart state snapshot s_u(t^-)
};

// Per-node memory states, last-update times, and pending message buffers.
class NodeMemory {
 public:
  NodeMemory(std::size_t num_nodes, std::size_t dim);

  std::size_t size() const { return states_.size(); }
  std::size_t dim() const { return dim_; }
  void ensure_nodes(std::size_t n);
  void reset();

  Value state(std::int64_t v) const;  // zero row for never-touched nodes
  double last_update(std::int64_t v) const { return last_update_[v]; }
  bool has_pending(std::int64_t v) const { return !pending_[v].empty(); }

  // Replaces every live state with a constant carrying the same payload.
  void detach_all();

  // Raw snapshot (values + last-update times) for checkpoints.
  std::vector<double> flatten() const;
  void restore(const std::vector<double>& values, const std::vector<double>& last_update);
  const std::vector<double>& last_update_times() const { return last_update_; }

 private:
  friend class Model;
  std::size_t dim_;
  std::vector<Value> states_;  // undefined handle = still zero
  std::vector<double> last_update_;
  std::vector<std::vector<PendingEvent>> pending_;
};

// All layer embeddings for a set of nodes queried at one time point.
struct NodeEmbeddings {
  std::map<std::int64_t, std::vector<Value>> layers;  // node -> z^0..z^L
  const Value& top(std::int64_t v) const { return layers.at(v).back(); }
  const Value& at(std::int64_t v, std::size_t l) const { return layers.at(v)[l]; }
};

// The temporal graph encoder: functional time encoding, message/GRU memory,
// temporal multi-head attention over sampled neighbors, and edge
// representation aggregation.
class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }

  // sqrt(1/d) * [cos(w1 t), sin(w1 t), ..., cos(wd t), sin(wd t)]; unit norm.
  Value encode_time(double t) const;

  // Message maps msg_s / msg_d over [s_self || s_other || Phi(dt) || attr].
  Value message(const Value& self_mem, const Value& other_mem, double delta_t,
                const Value& edge_attr, bool is_source) const;

  // Computes (m_v, m_u) for an event and appends them to the endpoint
  // buffers realized as raw pending events (messages are materialized by
  // apply_pending, with identical inputs).
  void compute_messages(NodeMemory& mem, std::int64_t src, std::int64_t dst, double t,
                        const std::vector<double>& edge_attr) const;

  // Element-wise mean of buffered messages.
  Value aggregate_messages(const std::vector<Value>& messages) const;

  // GRU cell: update/reset gates over [state || input].
  Value gru(const Value& input, const Value& state) const;

  // Turns every pending buffer into messages, aggregates them, and applies
  // the GRU update. In detach mode the resulting states are cut from the
  // graph afterwards (training across batches).
  void apply_pending(NodeMemory& mem, bool detach) const;
  // Same, restricted to buffered events strictly before `cutoff` (per-event
  // replay with timestamp ties).
  void apply_pending_before(NodeMemory& mem, double cutoff, bool detach) const;

  // Level-wise temporal attention embeddings for `targets` at time t.
  NodeEmbeddings embed(const Htamg& g, const NodeFeatureView& feats, const NodeMemory& mem,
                       const std::vector<std::int64_t>& targets, double t) const;

  Value edge_base(const Value& edge_attr) const;  // z_e^0 projection

  // Multi-head attention for one node at one layer given prev-layer inputs.
  Value attend(const Value& query_prev, const std::vector<Value>& neighbor_prev,
               const std::vector<Value>& neighbor_edge_base,
               const std::vector<double>& neighbor_dt, std::size_t layer) const;

  Value combine_layer(const Value& prev, const Value& attended, std::size_t layer) const;

 private:
  ModelConfig cfg_;
  ParamStore store_;
  Value omega_;
};

Value combine_endpoints(const Value& z_u, const Value& z_v);  // element-wise mean
Value aggregate_incoming(const std::vector<Value>& prior, std::size_t dim);  // mean or zero

// Replays the event stream (per-event memory granularity) and returns z_e^L
// for the requested edge ids. Prior-edge aggregation h_IN is maintained per
// recipient and layer in chronological order.
std::map<std::int64_t, Value> edge_representations(const Model& model, const Htamg& g,
                                                   const NodeFeatureView& feats,
                                                   const std::vector<std::int64_t>& wanted,
                                                   bool keep_graph = false);

// Runs messages + memory updates over the whole stream (no embeddings), then
// leaves all buffers applied; used before inference-time embedding.
void replay_memory(const Model& model, const Htamg& g, NodeMemory& mem,
                   std::size_t batch_size = 256);
// Continues a replay from a given edge id (appended test-era events).
void replay_memory_range(const Model& model, const Htamg& g, NodeMemory& mem,
                         std::size_t from_edge, std::size_t batch_size = 256);

// Single-node convenience wrapper around Model::embed.
Value node_embedding(const Model& model, const Htamg& g, const NodeFeatureView& feats,
                     const NodeMemory& mem, std::int64_t v, double t);

// Checkpoint I/O: versioned JSON with base64 parameter payloads, the RNG
// seed, a config echo, and an optional memory snapshot.
void save_checkpoint(const std::string& path, const Model& model,
                     const NodeMemory* memory = nullptr);
struct Checkpoint {
  ModelConfig config;
  std::uint64_t seed = 0;
  std::unique_ptr<Model> model;
  std::unique_ptr<NodeMemory> memory;  // null when absent
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace phishtgl

#endif  // PHISHTGL_ENCODER_HPP_
