#include "phishtgl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace phishtgl {

void SyntheticConfig::validate() const {
  if (benign_accounts < 2) throw ConfigError("need at least 2 benign accounts");
  if (victims_per_collector < 1) throw ConfigError("victims_per_collector must be >= 1");
  if (burst_window_seconds <= 0 || time_span_seconds <= burst_window_seconds * 4)
    throw ConfigError("time span must dominate the burst window");
  if (ephemeral_fraction < 0 || ephemeral_fraction > 1)
    throw ConfigError("ephemeral_fraction must be in [0,1]");
}

namespace {

struct Clock {
  // Activity window of an account, in seconds from stream start.
  double begin = 0, end = 0;
};

std::string pad_name(const char* prefix, std::size_t i) {
  std::ostringstream os;
  os << prefix << i;
  return os.str();
}

}  // namespace

SyntheticData gen_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::lognormal_distribution<double> benign_value(0.0, 1.0);
  std::lognormal_distribution<double> stolen_value(2.0, 0.8);
  std::normal_distribution<double> gas_noise(0.0, 2000.0);

  SyntheticData data;
  std::vector<int> labels_tmp;  // per-tx labels, keyed to hashes after sorting
  double span = cfg.time_span_seconds;

  // Benign accounts, a slice of them contracts, a slice short-lived.
  std::vector<std::string> benign(cfg.benign_accounts);
  std::vector<AccountKind> benign_kind(cfg.benign_accounts, AccountKind::kEoa);
  std::vector<Clock> windows(cfg.benign_accounts);
  for (std::size_t i = 0; i < cfg.benign_accounts; ++i) {
    benign[i] = pad_name("0xbe", i);
    if (i % 10 == 9) benign_kind[i] = AccountKind::kCa;  // ~10% contracts
    if (uniform(rng) < cfg.ephemeral_fraction) {
      double len = span / 6.0;
      double start = uniform(rng) * (span - len);
      windows[i] = {start, start + len};
    } else {
      windows[i] = {0.0, span};
    }
    data.address_labels[benign[i]] = 0;
  }

  auto add_tx = [&](const std::string& from, AccountKind from_kind, const std::string& to,
                    AccountKind to_kind, double value, double t, TxCategory cat,
                    TokenStandard std_, int label) {
    RawTransaction tx;
    tx.from_addr = from;
    tx.to_addr = to;
    tx.from_kind = from_kind;
    tx.to_kind = to_kind;
    tx.value = std::max(value, 1e-6);
    tx.timestamp = static_cast<std::int64_t>(t);
    tx.tx_category = cat;
    tx.token_standard = std_;
    switch (cat) {
      case TxCategory::kEtherTransfer: tx.gas_used = 21000 + std::abs(gas_noise(rng)); break;
      case TxCategory::kFtTransfer: tx.gas_used = 52000 + std::abs(gas_noise(rng)); break;
      case TxCategory::kNftTransfer: tx.gas_used = 85000 + std::abs(gas_noise(rng)); break;
      default: tx.gas_used = 60000 + std::abs(gas_noise(rng));
    }
    if (std_ == TokenStandard::kErc20) tx.token_symbol = "TKN";
    if (std_ == TokenStandard::kErc721) {
      tx.token_symbol = "NFT";
      tx.token_id = static_cast<std::int64_t>(uniform(rng) * 100000);
    }
    tx.tx_hash = "pending";  // assigned after the final sort
    data.txs.push_back(std::move(tx));
    labels_tmp.push_back(label);
  };

  // Benign background: random transfers between accounts with overlapping
  // activity windows.
  std::size_t benign_tx_target =
      static_cast<std::size_t>(cfg.benign_tx_per_account * cfg.benign_accounts);
  std::uniform_int_distribution<std::size_t> pick_benign(0, cfg.benign_accounts - 1);
  std::size_t produced = 0, attempts = 0;
  while (produced < benign_tx_target && attempts < benign_tx_target * 50) {
    ++attempts;
    std::size_t a = pick_benign(rng), b = pick_benign(rng);
    if (a == b) continue;
    double lo = std::max(windows[a].begin, windows[b].begin);
    double hi = std::min(windows[a].end, windows[b].end);
    if (hi <= lo) continue;
    double t = lo + uniform(rng) * (hi - lo);
    double roll = uniform(rng);
    TxCategory cat;
    TokenStandard std_;
    if (benign_kind[b] == AccountKind::kCa && roll < 0.5) {
      cat = TxCategory::kContractInteraction;
      std_ = TokenStandard::kNone;
    } else if (roll < 0.55) {
      cat = TxCategory::kEtherTransfer;
      std_ = TokenStandard::kNone;
    } else if (roll < 0.85) {
      cat = TxCategory::kFtTransfer;
      std_ = TokenStandard::kErc20;
    } else {
      cat = TxCategory::kNftTransfer;
      std_ = TokenStandard::kErc721;
    }
    add_tx(benign[a], benign_kind[a], benign[b], benign_kind[b], benign_value(rng), t, cat,
           std_, 0);
    ++produced;
  }

  // Phishing campaigns: a victim burst into the collector, then a rapid
  // funnel through fresh laundering accounts.
  std::size_t campaigns = cfg.phishing_collectors;
  for (std::size_t c = 0; c < campaigns; ++c) {
    std::string collector = pad_name("0xc0", c);
    data.address_labels[collector] = 1;
    double margin = span * 0.05;
    double usable = span - 2 * margin - 3 * cfg.burst_window_seconds;
    double tau = margin + (campaigns == 1 ? 0.5 : static_cast<double>(c) / (campaigns - 1)) *
                              usable;
    tau += (uniform(rng) - 0.5) * cfg.burst_window_seconds;

    double stolen_total = 0;
    for (std::size_t v = 0; v < cfg.victims_per_collector; ++v) {
      std::string victim = pad_name(("0xv" + std::to_string(c) + "x").c_str(), v);
      data.address_labels[victim] = 0;
      std::size_t transfers = 1 + static_cast<std::size_t>(uniform(rng) * 2.999);
      for (std::size_t k = 0; k < transfers; ++k) {
        double t = tau + uniform(rng) * cfg.burst_window_seconds;
        double roll = uniform(rng);
        TxCategory cat = roll < 0.5  ? TxCategory::kEtherTransfer
                         : roll < 0.8 ? TxCategory::kFtTransfer
                                      : TxCategory::kNftTransfer;
        TokenStandard std_ = cat == TxCategory::kFtTransfer    ? TokenStandard::kErc20
                             : cat == TxCategory::kNftTransfer ? TokenStandard::kErc721
                                                               : TokenStandard::kNone;
        double value = stolen_value(rng);
        stolen_total += value;
        add_tx(victim, AccountKind::kEoa, collector, AccountKind::kEoa, value, t, cat, std_,
               1);
      }
    }
    // Fast outflow: the collector forwards the loot down a laundering chain.
    std::string holder = collector;
    double t_move = tau + cfg.burst_window_seconds * (1.05 + 0.2 * uniform(rng));
    double remaining = stolen_total;
    for (std::size_t d = 0; d < cfg.laundering_depth; ++d) {
      std::string laund = pad_name(("0x1a" + std::to_string(c) + "x").c_str(), d);
      data.address_labels[laund] = 1;
      double moved = remaining * (0.9 + 0.08 * uniform(rng));
      add_tx(holder, AccountKind::kEoa, laund, AccountKind::kEoa, moved, t_move,
             TxCategory::kEtherTransfer, TokenStandard::kNone, 1);
      holder = laund;
      remaining = moved;
      t_move += cfg.burst_window_seconds * (0.2 + 0.2 * uniform(rng));
    }
  }

  // Time-sort, then assign hashes and edge labels in final order.
  std::vector<std::size_t> order(data.txs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.txs[a].timestamp < data.txs[b].timestamp;
  });
  std::vector<RawTransaction> sorted;
  sorted.reserve(data.txs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    RawTransaction tx = data.txs[order[i]];
    tx.tx_hash = pad_name("0xt", i);
    data.tx_labels[tx.tx_hash] = labels_tmp[order[i]];
    sorted.push_back(std::move(tx));
  }
  data.txs = std::move(sorted);
  labels_tmp.clear();
  return data;
}

void save_labels_csv(const std::string& path, const std::map<std::string, int>& labels,
                     const std::string& key_header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << key_header << ",label\n";
  for (const auto& [key, label] : labels) out << key << ',' << label << "\n";
}

std::map<std::string, int> load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::map<std::string, int> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw SchemaError("bad label row: " + line);
    out[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
  }
  return out;
}

}  // namespace phishtgl
