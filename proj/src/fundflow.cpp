#include "phishtgl/fundflow.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

namespace phishtgl {

using nlohmann::json;

std::string to_string(EntityCategory c) {
  switch (c) {
    case EntityCategory::kDex: return "dex";
    case EntityCategory::kCex: return "cex";
    case EntityCategory::kMixer: return "mixer";
    case EntityCategory::kBridge: return "bridge";
    case EntityCategory::kNone: return "none";
  }
  return "?";
}

EntityCategory entity_category_from_string(const std::string& s) {
  if (s == "dex") return EntityCategory::kDex;
  if (s == "cex") return EntityCategory::kCex;
  if (s == "mixer") return EntityCategory::kMixer;
  if (s == "bridge") return EntityCategory::kBridge;
  if (s == "none" || s.empty()) return EntityCategory::kNone;
  throw SchemaError("unknown entity category: " + s);
}

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::kEntityReached: return "entity_reached";
    case TerminationReason::kDepthLimit: return "depth_limit";
    case TerminationReason::kSuperNode: return "super_node";
    case TerminationReason::kInactive: return "inactive";
    case TerminationReason::kExhausted: return "exhausted";
    case TerminationReason::kInBalance: return "in_balance";
  }
  return "?";
}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void EntityLabels::add(const std::string& address, EntityCategory category,
                       const std::string& name) {
  labels_[lowercase(address)] = EntityInfo{category, name};
}

const EntityInfo* EntityLabels::find(const std::string& address) const {
  auto it = labels_.find(lowercase(address));
  return it == labels_.end() ? nullptr : &it->second;
}

void EntityLabels::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "address,category,name\n";
  for (const auto& [addr, info] : labels_)
    out << addr << ',' << to_string(info.category) << ',' << info.name << "\n";
}

EntityLabels EntityLabels::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  EntityLabels labels;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string addr, cat, name;
    std::getline(ss, addr, ',');
    std::getline(ss, cat, ',');
    std::getline(ss, name);
    labels.add(addr, entity_category_from_string(cat), name);
  }
  return labels;
}

void TraceConfig::validate() const {
  if (max_depth == 0) throw ConfigError("max_depth must be positive");
  if (super_node_tx_threshold == 0) throw ConfigError("super node threshold must be positive");
  if (inactivity_days <= 0) throw ConfigError("inactivity_days must be positive");
  if (min_value_threshold < 0) throw ConfigError("min_value_threshold must be >= 0");
}

std::string token_key(const RawTransaction& tx) {
  if (tx.tx_category == TxCategory::kFtTransfer || tx.tx_category == TxCategory::kNftTransfer)
    return tx.token_symbol.value_or("TKN");
  return "ETH";
}

namespace {

struct LedgerEvent {
  std::size_t tx_index;
  double t;
  double value;
  bool outgoing;
  std::string counterpart;
};

struct LedgerIndex {
  // per address: events of one token, time-ordered
  std::map<std::string, std::vector<LedgerEvent>> events;
  std::map<std::string, std::size_t> total_tx_count;  // all tokens, both directions
  double horizon = 0;
};

LedgerIndex build_index(const std::vector<RawTransaction>& ledger, const std::string& token) {
  LedgerIndex idx;
  std::vector<std::size_t> order(ledger.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ledger[a].timestamp < ledger[b].timestamp;
  });
  for (std::size_t i : order) {
    const RawTransaction& tx = ledger[i];
    std::string from = lowercase(tx.from_addr), to = lowercase(tx.to_addr);
    idx.total_tx_count[from] += 1;
    idx.total_tx_count[to] += 1;
    idx.horizon = std::max(idx.horizon, static_cast<double>(tx.timestamp));
    if (token_key(tx) != token) continue;
    double t = static_cast<double>(tx.timestamp);
    idx.events[from].push_back({i, t, tx.value, true, to});
    idx.events[to].push_back({i, t, tx.value, false, from});
  }
  return idx;
}

struct Tracer {
  const LedgerIndex& idx;
  const EntityLabels& labels;
  const TraceConfig& cfg;
  double inactivity_seconds;

  // Simulates the address's balance over its event history; taint arrives at
  // the event whose (time, index) matches `arrival`, or with every inflow
  // when tracing the root (arrival.tx_index == SIZE_MAX).
  TraceHop expand(const std::string& address, double taint_in, double arrival_t,
                  std::size_t arrival_index, std::size_t depth,
                  std::set<std::string>& path) {
    TraceHop hop;
    hop.address = address;
    hop.amount = taint_in;
    hop.depth = depth;
    bool is_root = arrival_index == static_cast<std::size_t>(-1);

    // Termination rules, first satisfied wins (root always expands).
    if (!is_root) {
      if (const EntityInfo* info = labels.find(address);
          info && info->category != EntityCategory::kNone) {
        hop.reason = TerminationReason::kEntityReached;
        hop.entity_category = info->category;
        hop.entity_name = info->name;
        return hop;
      }
      auto count_it = idx.total_tx_count.find(address);
      if (count_it != idx.total_tx_count.end() &&
          count_it->second > cfg.super_node_tx_threshold) {
        hop.reason = TerminationReason::kSuperNode;
        return hop;
      }
      // Inactivity: no outgoing movement of this token within the window.
      double next_out = -1;
      auto ev_it = idx.events.find(address);
      if (ev_it != idx.events.end())
        for (const LedgerEvent& ev : ev_it->second)
          if (ev.outgoing && (ev.t > arrival_t ||
                              (ev.t == arrival_t && ev.tx_index > arrival_index))) {
            next_out = ev.t;
            break;
          }
      bool horizon_proves_inactivity = idx.horizon - arrival_t > inactivity_seconds;
      if ((next_out < 0 && horizon_proves_inactivity) ||
          (next_out >= 0 && next_out - arrival_t > inactivity_seconds)) {
        hop.reason = TerminationReason::kInactive;
        hop.retained = taint_in;
        return hop;
      }
      if (depth >= cfg.max_depth) {
        hop.reason = TerminationReason::kDepthLimit;
        return hop;
      }
      if (path.count(address)) {  // cycle guard
        hop.reason = TerminationReason::kExhausted;
        return hop;
      }
      if (taint_in < 1e-12) {
        hop.reason = TerminationReason::kExhausted;
        return hop;
      }
    }

    auto ev_it = idx.events.find(address);
    if (ev_it == idx.events.end()) {
      hop.reason = TerminationReason::kInBalance;
      hop.retained = taint_in;
      return hop;
    }

    path.insert(address);
    double balance = 0, taint = 0;
    for (const LedgerEvent& ev : ev_it->second) {
      bool after_arrival =
          ev.t > arrival_t || (ev.t == arrival_t && ev.tx_index >= arrival_index);
      if (!ev.outgoing) {
        balance += ev.value;
        if (is_root)
          taint += ev.value;  // every inflow to the phishing root is stolen
        else if (ev.tx_index == arrival_index)
          taint += taint_in;
        continue;
      }
      if (!after_arrival || taint <= 0 || balance <= 0) {
        balance = std::max(balance - ev.value, 0.0);
        continue;
      }
      double effective = std::min(ev.value, balance);
      double moved = effective * (taint / balance);
      moved = std::min(moved, taint);
      balance -= effective;
      taint -= moved;
      if (moved < 1e-12) continue;
      if (ev.value < cfg.min_value_threshold) {
        hop.retained += moved;  // dust filter: taint stays accounted here
        continue;
      }
      hop.children.push_back(
          expand(ev.counterpart, moved, ev.t, ev.tx_index, depth + 1, path));
    }
    path.erase(address);

    hop.retained += taint;
    if (hop.children.empty() && !hop.reason) {
      hop.reason = TerminationReason::kInBalance;
    }
    return hop;
  }
};

}  // namespace

FundFlowTrace trace(const std::vector<RawTransaction>& ledger, const std::string& root,
                    const EntityLabels& labels, const TraceConfig& cfg,
                    const std::string& token) {
  cfg.validate();
  std::string root_lc = lowercase(root);
  LedgerIndex idx = build_index(ledger, token);
  auto ev_it = idx.events.find(root_lc);
  if (ev_it == idx.events.end()) throw UnknownRoot("no " + token + " activity for " + root);

  double total = 0;
  for (const LedgerEvent& ev : ev_it->second)
    if (!ev.outgoing) total += ev.value;
  if (total <= 0) throw UnknownRoot("root " + root + " never received " + token);

  Tracer tracer{idx, labels, cfg, cfg.inactivity_days * 86400.0};
  std::set<std::string> path;
  FundFlowTrace result;
  result.root = root_lc;
  result.token = token;
  result.total_tainted = total;
  result.root_hop = tracer.expand(root_lc, total, -1.0, static_cast<std::size_t>(-1), 0, path);
  return result;
}

namespace {

void check_hop(const TraceHop& hop, ConservationReport& report) {
  if (!hop.children.empty()) {
    double outgoing = hop.retained;
    for (const TraceHop& child : hop.children) outgoing += child.amount;
    double rel = std::abs(outgoing - hop.amount) / std::max(1.0, std::abs(hop.amount));
    if (rel > report.max_relative_error) {
      report.max_relative_error = rel;
      if (rel > 1e-9) {
        report.ok = false;
        report.offending_address = hop.address;
      }
    }
  }
  for (const TraceHop& child : hop.children) check_hop(child, report);
}

double leaf_sum(const TraceHop& hop) {
  if (hop.children.empty()) return hop.amount;
  double sum = hop.retained;
  for (const TraceHop& child : hop.children) sum += leaf_sum(child);
  return sum;
}

}  // namespace

ConservationReport conservation_check(const FundFlowTrace& trace_result) {
  ConservationReport report;
  check_hop(trace_result.root_hop, report);
  double total = leaf_sum(trace_result.root_hop);
  double rel = std::abs(total - trace_result.total_tainted) /
               std::max(1.0, trace_result.total_tainted);
  if (rel > 1e-9) {
    report.ok = false;
    report.max_relative_error = std::max(report.max_relative_error, rel);
    report.offending_address = trace_result.root;
  }
  if (!report.ok)
    throw ConservationViolation("taint conservation violated at " +
                                report.offending_address);
  return report;
}

namespace {

json hop_to_json(const TraceHop& hop) {
  json j;
  j["address"] = hop.address;
  j["amount"] = hop.amount;
  j["depth"] = hop.depth;
  if (hop.retained > 0) j["retained"] = hop.retained;
  if (hop.reason) {
    j["termination"] = to_string(*hop.reason);
    if (!hop.entity_name.empty()) j["entity"] = hop.entity_name;
  }
  json children = json::array();
  for (const TraceHop& child : hop.children) children.push_back(hop_to_json(child));
  if (!children.empty()) j["children"] = std::move(children);
  return j;
}

const char* bucket_of_entity(EntityCategory c) {
  switch (c) {
    case EntityCategory::kCex: return "CEX";
    case EntityCategory::kMixer: return "Mixer";
    case EntityCategory::kBridge: return "Bridge";
    case EntityCategory::kDex: return "DEX";
    case EntityCategory::kNone: return "Other";
  }
  return "Other";
}

}  // namespace

std::string FundFlowTrace::to_json() const {
  json j;
  j["root"] = root;
  j["token"] = token;
  j["total_tainted"] = total_tainted;
  j["trace"] = hop_to_json(root_hop);
  return j.dump(2);
}

DestinationReport aggregate(const std::vector<FundFlowTrace>& traces) {
  DestinationReport report;
  for (const char* cat : {"CEX", "Mixer", "Bridge", "DEX", "InBalance", "Other"})
    report.categories[cat];  // stable category set

  std::function<void(const TraceHop&)> visit = [&](const TraceHop& hop) {
    // Retained taint sits in the account balance regardless of hop kind.
    if (hop.retained > 0) report.categories["InBalance"].total += hop.retained;
    if (hop.children.empty() && hop.reason) {
      switch (*hop.reason) {
        case TerminationReason::kEntityReached: {
          const char* cat = bucket_of_entity(hop.entity_category);
          report.categories[cat].total += hop.amount;
          report.categories[cat].entities[hop.entity_name] += hop.amount;
          break;
        }
        case TerminationReason::kInactive:
        case TerminationReason::kInBalance:
          break;  // counted through `retained`
        default:
          report.categories["Other"].total += hop.amount;
      }
    }
    for (const TraceHop& child : hop.children) visit(child);
  };
  for (const FundFlowTrace& t : traces) visit(t.root_hop);

  report.grand_total = 0;
  for (const auto& [cat, bucket] : report.categories) report.grand_total += bucket.total;
  if (report.grand_total > 0)
    for (auto& [cat, bucket] : report.categories)
      bucket.ratio = bucket.total / report.grand_total;
  return report;
}

std::string DestinationReport::to_json() const {
  json j;
  j["grand_total"] = grand_total;
  for (const auto& [cat, bucket] : categories) {
    json bj;
    bj["total"] = bucket.total;
    bj["ratio"] = bucket.ratio;
    json entities = json::object();
    for (const auto& [name, amount] : bucket.entities) {
      entities[name] = {{"amount", amount},
                        {"proportion", grand_total > 0 ? amount / grand_total : 0.0}};
    }
    bj["entities"] = std::move(entities);
    j["categories"][cat] = std::move(bj);
  }
  return j.dump(2);
}

std::string DestinationReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "Destination" << std::right << std::setw(14) << "Total"
     << std::setw(9) << "Ratio" << "  " << std::left << std::setw(16) << "Popular"
     << std::right << std::setw(14) << "Amount" << std::setw(12) << "Proportion" << "\n";
  auto pct = [](double x) {
    std::ostringstream p;
    p << std::fixed << std::setprecision(1) << x * 100.0 << "%";
    return p.str();
  };
  auto amt = [](double x) {
    std::ostringstream p;
    p << std::fixed << std::setprecision(2) << x;
    return p.str();
  };
  for (const auto& [cat, bucket] : categories) {
    if (bucket.total <= 0) continue;
    // most popular entities first
    std::vector<std::pair<std::string, double>> ents(bucket.entities.begin(),
                                                     bucket.entities.end());
    std::sort(ents.begin(), ents.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (ents.empty()) ents.emplace_back("n.a", bucket.total);
    bool first = true;
    for (const auto& [name, amount] : ents) {
      os << std::left << std::setw(12) << (first ? cat : "") << std::right << std::setw(14)
         << (first ? amt(bucket.total) : "") << std::setw(9)
         << (first ? pct(bucket.ratio) : "") << "  " << std::left << std::setw(16) << name
         << std::right << std::setw(14) << amt(amount) << std::setw(12)
         << pct(grand_total > 0 ? amount / grand_total : 0) << "\n";
      first = false;
    }
  }
  return os.str();
}

}  // namespace phishtgl
