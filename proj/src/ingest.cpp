#include "phishtgl/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace phishtgl {

using nlohmann::json;

std::string to_string(TxCategory c) {
  switch (c) {
    case TxCategory::kEtherTransfer: return "ether_transfer";
    case TxCategory::kFtTransfer: return "ft_transfer";
    case TxCategory::kNftTransfer: return "nft_transfer";
    case TxCategory::kInternalTx: return "internal_tx";
    case TxCategory::kContractInteraction: return "contract_interaction";
  }
  return "?";
}

std::string to_string(TokenStandard s) {
  switch (s) {
    case TokenStandard::kNone: return "none";
    case TokenStandard::kErc20: return "erc20";
    case TokenStandard::kErc721: return "erc721";
    case TokenStandard::kErc1155: return "erc1155";
  }
  return "?";
}

std::string to_string(AccountKind k) {
  switch (k) {
    case AccountKind::kEoa: return "eoa";
    case AccountKind::kCa: return "ca";
    case AccountKind::kUnknown: return "unknown";
  }
  return "?";
}

TxCategory tx_category_from_string(const std::string& s) {
  if (s == "ether_transfer") return TxCategory::kEtherTransfer;
  if (s == "ft_transfer") return TxCategory::kFtTransfer;
  if (s == "nft_transfer") return TxCategory::kNftTransfer;
  if (s == "internal_tx") return TxCategory::kInternalTx;
  if (s == "contract_interaction") return TxCategory::kContractInteraction;
  throw SchemaError("unknown transaction type: " + s);
}

TokenStandard token_standard_from_string(const std::string& s) {
  if (s == "none" || s.empty()) return TokenStandard::kNone;
  if (s == "erc20") return TokenStandard::kErc20;
  if (s == "erc721") return TokenStandard::kErc721;
  if (s == "erc1155") return TokenStandard::kErc1155;
  throw SchemaError("unknown token standard: " + s);
}

AccountKind account_kind_from_string(const std::string& s) {
  if (s == "eoa") return AccountKind::kEoa;
  if (s == "ca") return AccountKind::kCa;
  if (s == "unknown" || s.empty()) return AccountKind::kUnknown;
  throw SchemaError("unknown account kind: " + s);
}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void schema_fail(std::size_t line, const std::string& field,
                              const std::string& why) {
  throw SchemaError("line " + std::to_string(line) + ", field \"" + field + "\": " + why);
}

const char* const kCsvHeader =
    "tx_hash,from,to,value,gas,timestamp,type,token_standard,token_symbol,token_id,"
    "from_kind,to_kind";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, std::size_t line, const char* field) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) schema_fail(line, field, "trailing characters in number");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    schema_fail(line, field, "not a number: \"" + s + "\"");
  }
}

std::int64_t parse_int(const std::string& s, std::size_t line, const char* field) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) schema_fail(line, field, "trailing characters in integer");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    schema_fail(line, field, "not an integer: \"" + s + "\"");
  }
}

RawTransaction from_json(const json& j, std::size_t line) {
  RawTransaction tx;
  auto need = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) schema_fail(line, key, "missing");
    return *it;
  };
  auto need_string = [&](const char* key) {
    const json& v = need(key);
    if (!v.is_string()) schema_fail(line, key, "expected string");
    return v.get<std::string>();
  };
  auto need_number = [&](const char* key) {
    const json& v = need(key);
    if (!v.is_number()) schema_fail(line, key, "expected number");
    return v.get<double>();
  };
  tx.tx_hash = need_string("tx_hash");
  tx.from_addr = need_string("from");
  tx.to_addr = need_string("to");
  tx.value = need_number("value");
  tx.gas_used = need_number("gas");
  const json& ts = need("timestamp");
  if (!ts.is_number_integer()) schema_fail(line, "timestamp", "expected integer");
  tx.timestamp = ts.get<std::int64_t>();
  tx.tx_category = tx_category_from_string(need_string("type"));
  tx.token_standard = token_standard_from_string(
      j.contains("token_standard") && !j["token_standard"].is_null()
          ? j["token_standard"].get<std::string>()
          : "none");
  if (j.contains("token_symbol") && !j["token_symbol"].is_null())
    tx.token_symbol = j["token_symbol"].get<std::string>();
  if (j.contains("token_id") && !j["token_id"].is_null())
    tx.token_id = j["token_id"].get<std::int64_t>();
  tx.from_kind = account_kind_from_string(
      j.contains("from_kind") && !j["from_kind"].is_null() ? j["from_kind"].get<std::string>()
                                                           : "unknown");
  tx.to_kind = account_kind_from_string(
      j.contains("to_kind") && !j["to_kind"].is_null() ? j["to_kind"].get<std::string>()
                                                       : "unknown");
  return tx;
}

RawTransaction from_csv_fields(const std::vector<std::string>& f, std::size_t line) {
  if (f.size() != 12)
    schema_fail(line, "line", "expected 12 columns, got " + std::to_string(f.size()));
  RawTransaction tx;
  tx.tx_hash = f[0];
  tx.from_addr = f[1];
  tx.to_addr = f[2];
  if (tx.tx_hash.empty()) schema_fail(line, "tx_hash", "missing");
  if (tx.from_addr.empty()) schema_fail(line, "from", "missing");
  if (tx.to_addr.empty()) schema_fail(line, "to", "missing");
  tx.value = parse_number(f[3], line, "value");
  tx.gas_used = parse_number(f[4], line, "gas");
  if (f[5].empty()) schema_fail(line, "timestamp", "missing");
  tx.timestamp = parse_int(f[5], line, "timestamp");
  tx.tx_category = tx_category_from_string(f[6]);
  tx.token_standard = token_standard_from_string(f[7]);
  if (!f[8].empty()) tx.token_symbol = f[8];
  if (!f[9].empty()) tx.token_id = parse_int(f[9], line, "token_id");
  tx.from_kind = account_kind_from_string(f[10]);
  tx.to_kind = account_kind_from_string(f[11]);
  return tx;
}

std::string format_double(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void RawTransaction::validate(std::size_t line) const {
  if (value < 0) schema_fail(line, "value", "negative");
  if (gas_used < 0) schema_fail(line, "gas", "negative");
  if (timestamp < 0) schema_fail(line, "timestamp", "negative");
  bool token_tx = tx_category == TxCategory::kFtTransfer ||
                  tx_category == TxCategory::kNftTransfer;
  if (token_tx != (token_standard != TokenStandard::kNone))
    schema_fail(line, "token_standard",
                "token standard must be set exactly for FT/NFT transfers");
  bool wants_id = token_standard == TokenStandard::kErc721 ||
                  token_standard == TokenStandard::kErc1155;
  if (wants_id != token_id.has_value())
    schema_fail(line, "token_id", "token id must be present exactly for ERC-721/1155");
  if (token_id && *token_id < 0) schema_fail(line, "token_id", "negative");
}

std::vector<RawTransaction> parse_log_string(const std::string& text, LogFormat format) {
  std::vector<RawTransaction> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == LogFormat::kCsv && !saw_header) {
      if (line != kCsvHeader)
        throw SchemaError("line 1: unexpected CSV header \"" + line + "\"");
      saw_header = true;
      continue;
    }
    RawTransaction tx;
    if (format == LogFormat::kJsonl) {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded())
        throw SchemaError("line " + std::to_string(lineno) + ": invalid JSON");
      tx = from_json(j, lineno);
    } else {
      tx = from_csv_fields(split_csv_line(line), lineno);
    }
    tx.validate(lineno);
    out.push_back(std::move(tx));
  }
  return out;
}

std::vector<RawTransaction> parse_log(const std::string& path, LogFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_log_string(buf.str(), format);
}

std::string serialize_log(const std::vector<RawTransaction>& txs, LogFormat format) {
  std::ostringstream out;
  if (format == LogFormat::kCsv) out << kCsvHeader << "\n";
  for (const auto& tx : txs) {
    if (format == LogFormat::kJsonl) {
      json j;
      j["tx_hash"] = tx.tx_hash;
      j["from"] = tx.from_addr;
      j["to"] = tx.to_addr;
      j["value"] = tx.value;
      j["gas"] = tx.gas_used;
      j["timestamp"] = tx.timestamp;
      j["type"] = to_string(tx.tx_category);
      j["token_standard"] = to_string(tx.token_standard);
      j["token_symbol"] = tx.token_symbol ? json(*tx.token_symbol) : json(nullptr);
      j["token_id"] = tx.token_id ? json(*tx.token_id) : json(nullptr);
      j["from_kind"] = to_string(tx.from_kind);
      j["to_kind"] = to_string(tx.to_kind);
      out << j.dump() << "\n";
    } else {
      out << tx.tx_hash << ',' << tx.from_addr << ',' << tx.to_addr << ','
          << format_double(tx.value) << ',' << format_double(tx.gas_used) << ','
          << tx.timestamp << ',' << to_string(tx.tx_category) << ','
          << to_string(tx.token_standard) << ',' << (tx.token_symbol ? *tx.token_symbol : "")
          << ',' << (tx.token_id ? std::to_string(*tx.token_id) : "") << ','
          << to_string(tx.from_kind) << ',' << to_string(tx.to_kind) << "\n";
    }
  }
  return out.str();
}

void write_log(const std::string& path, const std::vector<RawTransaction>& txs,
               LogFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << serialize_log(txs, format);
}

std::vector<RawTransaction> filter_and_categorize(const std::vector<RawTransaction>& txs) {
  std::vector<RawTransaction> out;
  out.reserve(txs.size());
  for (const auto& tx : txs) {
    if (tx.tx_category == TxCategory::kEtherTransfer && tx.value == 0.0) continue;
    bool token_tx = tx.tx_category == TxCategory::kFtTransfer ||
                    tx.tx_category == TxCategory::kNftTransfer;
    if (token_tx && tx.token_standard == TokenStandard::kNone) continue;
    out.push_back(tx);
  }
  return out;
}

std::int64_t AddressRegistry::intern(const std::string& address, AccountKind kind) {
  std::string key = lowercase(address);
  auto it = ids_.find(key);
  if (it != ids_.end()) {
    // Upgrade Unknown kinds when better information arrives.
    if (kinds_[it->second] == AccountKind::kUnknown && kind != AccountKind::kUnknown)
      kinds_[it->second] = kind;
    return it->second;
  }
  std::int64_t id = static_cast<std::int64_t>(addresses_.size());
  ids_.emplace(key, id);
  addresses_.push_back(key);
  kinds_.push_back(kind);
  return id;
}

std::optional<std::int64_t> AddressRegistry::lookup(const std::string& address) const {
  auto it = ids_.find(lowercase(address));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& AddressRegistry::address_of(std::int64_t id) const {
  if (id < 0 || id >= size()) throw NodeOutOfRange("address id " + std::to_string(id));
  return addresses_[id];
}

void AddressRegistry::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "node_id,address,kind\n";
  for (std::int64_t i = 0; i < size(); ++i)
    out << i << ',' << addresses_[i] << ',' << to_string(kinds_[i]) << "\n";
}

AddressRegistry AddressRegistry::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  AddressRegistry reg;
  std::string line;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 3) schema_fail(lineno, "line", "expected 3 columns");
    std::int64_t id = parse_int(f[0], lineno, "node_id");
    std::int64_t got = reg.intern(f[1], account_kind_from_string(f[2]));
    if (got != id) schema_fail(lineno, "node_id", "ids not dense/in order");
  }
  return reg;
}

void NormalizationStats::save_json(const std::string& path, double t_min) const {
  json j;
  j["mu_value"] = mu_value;
  j["sigma_value"] = sigma_value;
  j["mu_gas"] = mu_gas;
  j["sigma_gas"] = sigma_gas;
  j["t_min"] = t_min;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

NormalizationStats NormalizationStats::load_json(const std::string& path, double* t_min) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j = json::parse(in);
  NormalizationStats s;
  s.mu_value = j.at("mu_value").get<double>();
  s.sigma_value = j.at("sigma_value").get<double>();
  s.mu_gas = j.at("mu_gas").get<double>();
  s.sigma_gas = j.at("sigma_gas").get<double>();
  if (t_min) *t_min = j.value("t_min", 0.0);
  return s;
}

namespace {

constexpr double kSigmaFloor = 1e-12;

// Population standard deviation with a positive floor.
std::pair<double, double> mean_std(const std::vector<double>& xs) {
  double mu = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mu) * (x - mu);
  var /= xs.size();
  return {mu, std::max(std::sqrt(var), kSigmaFloor)};
}

std::vector<Transaction> convert(const std::vector<RawTransaction>& txs,
                                 AddressRegistry& registry, const NormalizationStats& stats,
                                 double t_min) {
  std::vector<Transaction> out;
  out.reserve(txs.size());
  for (const auto& raw : txs) {
    Transaction tx;
    tx.src = registry.intern(raw.from_addr, raw.from_kind);
    tx.dst = registry.intern(raw.to_addr, raw.to_kind);
    tx.t = static_cast<double>(raw.timestamp) - t_min;
    tx.value_raw = raw.value;
    tx.gas_raw = raw.gas_used;
    tx.value_z = (raw.value - stats.mu_value) / stats.sigma_value;
    tx.gas_z = (raw.gas_used - stats.mu_gas) / stats.sigma_gas;
    tx.tx_type_id = static_cast<int>(raw.tx_category);
    tx.token_type_id = static_cast<int>(raw.token_standard);
    tx.tx_hash = raw.tx_hash;
    out.push_back(std::move(tx));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Transaction& a, const Transaction& b) { return a.t < b.t; });
  return out;
}

}  // namespace

NormalizeResult normalize(const std::vector<RawTransaction>& txs, AddressRegistry& registry) {
  if (txs.empty()) throw EmptyInput("normalize: no transactions");
  std::vector<double> values, gases;
  values.reserve(txs.size());
  gases.reserve(txs.size());
  std::int64_t min_ts = txs.front().timestamp;
  for (const auto& tx : txs) {
    values.push_back(tx.value);
    gases.push_back(tx.gas_used);
    min_ts = std::min(min_ts, tx.timestamp);
  }
  NormalizeResult res;
  std::tie(res.stats.mu_value, res.stats.sigma_value) = mean_std(values);
  std::tie(res.stats.mu_gas, res.stats.sigma_gas) = mean_std(gases);
  res.t_min = static_cast<double>(min_ts);
  res.txs = convert(txs, registry, res.stats, res.t_min);
  return res;
}

std::vector<Transaction> normalize_with_stats(const std::vector<RawTransaction>& txs,
                                              AddressRegistry& registry,
                                              const NormalizationStats& stats, double t_min) {
  return convert(txs, registry, stats, t_min);
}

void save_transactions_csv(const std::string& path, const std::vector<Transaction>& txs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "src,dst,t,value_z,gas_z,tx_type_id,token_type_id,value_raw,gas_raw,tx_hash\n";
  char buf[512];
  for (const auto& tx : txs) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.17g,%.17g,%.17g,%d,%d,%.17g,%.17g,",
                  static_cast<long long>(tx.src), static_cast<long long>(tx.dst), tx.t,
                  tx.value_z, tx.gas_z, tx.tx_type_id, tx.token_type_id, tx.value_raw,
                  tx.gas_raw);
    out << buf << tx.tx_hash << "\n";
  }
}

std::vector<Transaction> load_transactions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty transactions csv");
  std::vector<Transaction> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 10) schema_fail(lineno, "line", "expected 10 columns");
    Transaction tx;
    tx.src = parse_int(f[0], lineno, "src");
    tx.dst = parse_int(f[1], lineno, "dst");
    tx.t = parse_number(f[2], lineno, "t");
    tx.value_z = parse_number(f[3], lineno, "value_z");
    tx.gas_z = parse_number(f[4], lineno, "gas_z");
    tx.tx_type_id = static_cast<int>(parse_int(f[5], lineno, "tx_type_id"));
    tx.token_type_id = static_cast<int>(parse_int(f[6], lineno, "token_type_id"));
    tx.value_raw = parse_number(f[7], lineno, "value_raw");
    tx.gas_raw = parse_number(f[8], lineno, "gas_raw");
    tx.tx_hash = f[9];
    out.push_back(std::move(tx));
  }
  return out;
}

}  // namespace phishtgl
