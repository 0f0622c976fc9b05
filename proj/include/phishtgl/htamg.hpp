#ifndef PHISHTGL_HTAMG_HPP_
#define PHISHTGL_HTAMG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "phishtgl/ingest.hpp"

namespace phishtgl {

// Edge attribute layout: [value_z, gas_z, tx-type one-hot (5), token-type one-hot (4)].
inline constexpr std::size_t kEdgeAttrDim = 2 + kNumTxCategories + kNumTokenStandards;

struct TemporalEdge {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double t = 0.0;
  int tx_type_id = 0;
  int token_type_id = 0;
  double value_raw = 0.0;
};

enum class Direction { kIn, kOut, kBoth };

struct NeighborSample {
  std::vector<std::int64_t> nodes;
  std::vector<std::int64_t> edge_ids;
  std::vector<double> times;
  std::size_t size() const { return nodes.size(); }
};

// Heterogeneous temporal attributed multigraph: append-only edge list plus
// per-node time-sorted adjacency indexes.
class Htamg {
 public:
  Htamg() = default;

  std::int64_t num_nodes() const { return static_cast<std::int64_t>(kinds_.size()); }
  std::int64_t num_edges() const { return static_cast<std::int64_t>(edges_.size()); }
  const TemporalEdge& edge(std::int64_t id) const { return edges_[id]; }
  const std::vector<TemporalEdge>& edges() const { return edges_; }
  AccountKind kind(std::int64_t v) const { return kinds_[v]; }
  const std::vector<AccountKind>& kinds() const { return kinds_; }
  double max_time() const { return edges_.empty() ? 0.0 : edges_.back().t; }

  // Row `id` of the edge attribute table X^E.
  const double* edge_attr(std::int64_t id) const { return &edge_attrs_[id * kEdgeAttrDim]; }

  const std::vector<std::int64_t>& in_edges(std::int64_t v) const { return in_index_[v]; }
  const std::vector<std::int64_t>& out_edges(std::int64_t v) const { return out_index_[v]; }

  // Node attribute table X^V, attached by features::assemble (row-major).
  const std::vector<double>& node_features() const { return node_features_; }
  std::size_t node_feature_dim() const { return node_feature_dim_; }
  void attach_node_features(std::vector<double> table, std::size_t dim);

  // The n most recent events incident to v strictly before time t.
  NeighborSample recent_neighbors(std::int64_t v, double t, std::size_t n,
                                  Direction dir) const;

  void save(const std::string& path) const;  // binary snapshot + JSON sidecar
  static Htamg load(const std::string& path);

  friend Htamg build(const std::vector<Transaction>& txs,
                     const std::vector<AccountKind>& kinds);
  friend void extend(Htamg& g, const std::vector<Transaction>& txs,
                     const std::vector<AccountKind>& kinds);

 private:
  void append_edges(const std::vector<Transaction>& txs);

  std::vector<AccountKind> kinds_;
  std::vector<TemporalEdge> edges_;
  std::vector<double> edge_attrs_;  // num_edges x kEdgeAttrDim
  std::vector<std::vector<std::int64_t>> in_index_;
  std::vector<std::vector<std::int64_t>> out_index_;
  std::vector<double> node_features_;
  std::size_t node_feature_dim_ = 0;
};

// Builds the graph from a time-sorted transaction batch. `kinds` is the full
// node kind table (registry order); it also fixes the node count, so isolated
// registered nodes are represented.
Htamg build(const std::vector<Transaction>& txs, const std::vector<AccountKind>& kinds);

// Appends a later batch. Every new timestamp must be >= the latest stored one.
void extend(Htamg& g, const std::vector<Transaction>& txs,
            const std::vector<AccountKind>& kinds);

std::vector<double> encode_edge_attr(const Transaction& tx);

}  // namespace phishtgl

#endif  // PHISHTGL_HTAMG_HPP_
