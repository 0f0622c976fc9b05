#ifndef PHISHTGL_INGEST_HPP_
#define PHISHTGL_INGEST_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "phishtgl/errors.hpp"

namespace phishtgl {

enum class TxCategory : std::uint8_t {
  kEtherTransfer = 0,
  kFtTransfer = 1,
  kNftTransfer = 2,
  kInternalTx = 3,
  kContractInteraction = 4,
};
inline constexpr int kNumTxCategories = 5;

enum class TokenStandard : std::uint8_t {
  kNone = 0,
  kErc20 = 1,
  kErc721 = 2,
  kErc1155 = 3,
};
inline constexpr int kNumTokenStandards = 4;

enum class AccountKind : std::uint8_t { kEoa = 0, kCa = 1, kUnknown = 2 };

std::string to_string(TxCategory c);
std::string to_string(TokenStandard s);
std::string to_string(AccountKind k);
TxCategory tx_category_from_string(const std::string& s);
TokenStandard token_standard_from_string(const std::string& s);
AccountKind account_kind_from_string(const std::string& s);

// One transfer as it appears in a raw log, before normalization.
struct RawTransaction {
  std::string tx_hash;
  std::string from_addr;
  std::string to_addr;
  double value = 0.0;
  double gas_used = 0.0;
  std::int64_t timestamp = 0;
  TxCategory tx_category = TxCategory::kEtherTransfer;
  TokenStandard token_standard = TokenStandard::kNone;
  std::optional<std::string> token_symbol;
  std::optional<std::int64_t> token_id;
  AccountKind from_kind = AccountKind::kUnknown;
  AccountKind to_kind = AccountKind::kUnknown;

  void validate(std::size_t line) const;  // SchemaError on invariant breakage
};

// Normalized transfer ready for graph building. Raw value/gas and the
// transaction hash come along so features and label joins stay possible
// downstream.
struct Transaction {
  std::int64_t src = 0;
  std::int64_t dst = 0;
  double t = 0.0;
  double value_z = 0.0;
  double gas_z = 0.0;
  int tx_type_id = 0;
  int token_type_id = 0;
  double value_raw = 0.0;
  double gas_raw = 0.0;
  std::string tx_hash;
};

// Bijective map hex address <-> dense node id, first-seen order.
class AddressRegistry {
 public:
  // Returns existing id or assigns the next one (addresses are lowercased).
  std::int64_t intern(const std::string& address, AccountKind kind);
  std::optional<std::int64_t> lookup(const std::string& address) const;
  const std::string& address_of(std::int64_t id) const;
  AccountKind kind_of(std::int64_t id) const { return kinds_.at(id); }
  std::int64_t size() const { return static_cast<std::int64_t>(addresses_.size()); }
  const std::vector<AccountKind>& kinds() const { return kinds_; }

  void save_csv(const std::string& path) const;
  static AddressRegistry load_csv(const std::string& path);

 private:
  std::unordered_map<std::string, std::int64_t> ids_;
  std::vector<std::string> addresses_;
  std::vector<AccountKind> kinds_;
};

struct NormalizationStats {
  double mu_value = 0.0;
  double sigma_value = 1.0;
  double mu_gas = 0.0;
  double sigma_gas = 1.0;

  void save_json(const std::string& path, double t_min) const;
  static NormalizationStats load_json(const std::string& path, double* t_min = nullptr);
};

enum class LogFormat { kJsonl, kCsv };

// Parses a raw transaction log; malformed records raise SchemaError with
// the 1-based line number and offending field.
std::vector<RawTransaction> parse_log(const std::string& path, LogFormat format);
std::vector<RawTransaction> parse_log_string(const std::string& text, LogFormat format);
void write_log(const std::string& path, const std::vector<RawTransaction>& txs,
               LogFormat format);
std::string serialize_log(const std::vector<RawTransaction>& txs, LogFormat format);

// Drops zero-value Ether transfers and token transfers without a known
// ERC-20/721/1155 standard; order otherwise preserved.
std::vector<RawTransaction> filter_and_categorize(const std::vector<RawTransaction>& txs);

struct NormalizeResult {
  std::vector<Transaction> txs;  // sorted by t, min t == 0
  NormalizationStats stats;
  double t_min = 0.0;  // subtracted offset (raw seconds)
};

// Fits mu/sigma on the batch (population sigma, floored at 1e-12), shifts
// timestamps to start at 0 and extends the registry in first-seen order.
NormalizeResult normalize(const std::vector<RawTransaction>& txs, AddressRegistry& registry);

// Applies previously fitted statistics (inference path; no refitting).
std::vector<Transaction> normalize_with_stats(const std::vector<RawTransaction>& txs,
                                              AddressRegistry& registry,
                                              const NormalizationStats& stats, double t_min);

// Normalized-transaction persistence (full double precision).
void save_transactions_csv(const std::string& path, const std::vector<Transaction>& txs);
std::vector<Transaction> load_transactions_csv(const std::string& path);

}  // namespace phishtgl

#endif  // PHISHTGL_INGEST_HPP_
