#ifndef PHISHTGL_FUNDFLOW_HPP_
#define PHISHTGL_FUNDFLOW_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phishtgl/ingest.hpp"

namespace phishtgl {

enum class EntityCategory { kDex, kCex, kMixer, kBridge, kNone };

std::string to_string(EntityCategory c);
EntityCategory entity_category_from_string(const std::string& s);

struct EntityInfo {
  EntityCategory category = EntityCategory::kNone;
  std::string name;
};

// address (lowercased) -> laundering-relevant entity tag
class EntityLabels {
 public:
  void add(const std::string& address, EntityCategory category, const std::string& name);
  const EntityInfo* find(const std::string& address) const;

  void save_csv(const std::string& path) const;
  static EntityLabels load_csv(const std::string& path);

 private:
  std::map<std::string, EntityInfo> labels_;
};

struct TraceConfig {
  std::size_t max_depth = 10;
  std::size_t super_node_tx_threshold = 10000;
  double inactivity_days = 720;
  double min_value_threshold = 0.0;

  void validate() const;
};

enum class TerminationReason {
  kEntityReached,
  kDepthLimit,
  kSuperNode,
  kInactive,
  kExhausted,
  kInBalance,
};

std::string to_string(TerminationReason r);

struct TraceHop {
  std::string address;
  double amount = 0;    // tainted value attributed to this hop
  std::size_t depth = 0;
  double retained = 0;  // taint that never left this address
  std::optional<TerminationReason> reason;  // set on leaves
  EntityCategory entity_category = EntityCategory::kNone;  // EntityReached leaves
  std::string entity_name;
  std::vector<TraceHop> children;
};

struct FundFlowTrace {
  std::string root;
  std::string token;
  double total_tainted = 0;
  TraceHop root_hop;

  std::string to_json() const;
};

// Native-value transfers trace as "ETH"; token transfers by their symbol.
std::string token_key(const RawTransaction& tx);

// Recursive pro-rata taint trace from a phishing root over one token.
FundFlowTrace trace(const std::vector<RawTransaction>& ledger, const std::string& root,
                    const EntityLabels& labels, const TraceConfig& cfg,
                    const std::string& token = "ETH");

struct ConservationReport {
  bool ok = true;
  double max_relative_error = 0;
  std::string offending_address;
};

// Checks per-node taint conservation; throws ConservationViolation on breach.
ConservationReport conservation_check(const FundFlowTrace& trace_result);

struct DestinationBucket {
  double total = 0;
  double ratio = 0;
  std::map<std::string, double> entities;  // name -> amount
};

struct DestinationReport {
  std::map<std::string, DestinationBucket> categories;  // CEX/Mixer/Bridge/DEX/InBalance/Other
  double grand_total = 0;

  std::string to_json() const;
  std::string to_table() const;  // aligned text, one row per popular entity
};

DestinationReport aggregate(const std::vector<FundFlowTrace>& traces);

}  // namespace phishtgl

#endif  // PHISHTGL_FUNDFLOW_HPP_
