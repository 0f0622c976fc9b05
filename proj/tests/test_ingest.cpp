#include <doctest.h>

#include <cmath>
#include <random>

#include "phishtgl/ingest.hpp"

using namespace phishtgl;

namespace {

RawTransaction make_tx(const std::string& hash, const std::string& from,
                       const std::string& to, double value, std::int64_t ts,
                       TxCategory cat = TxCategory::kEtherTransfer,
                       TokenStandard std_ = TokenStandard::kNone) {
  RawTransaction tx;
  tx.tx_hash = hash;
  tx.from_addr = from;
  tx.to_addr = to;
  tx.value = value;
  tx.gas_used = 21000;
  tx.timestamp = ts;
  tx.tx_category = cat;
  tx.token_standard = std_;
  if (std_ == TokenStandard::kErc721 || std_ == TokenStandard::kErc1155) tx.token_id = 7;
  tx.from_kind = AccountKind::kEoa;
  tx.to_kind = AccountKind::kEoa;
  return tx;
}

std::vector<RawTransaction> random_valid_batch(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(1.0, 100.0);
  std::uniform_int_distribution<int> addr(0, 19);
  std::vector<RawTransaction> txs;
  for (std::size_t i = 0; i < n; ++i) {
    auto tx = make_tx("0xh" + std::to_string(i), "0xa" + std::to_string(addr(rng)),
                      "0xa" + std::to_string(addr(rng)), val(rng),
                      1000 + static_cast<std::int64_t>(i));
    txs.push_back(tx);
  }
  return txs;
}

}  // namespace

TEST_CASE("parse_log reads JSONL records in order") {
  std::string text =
      R"({"tx_hash":"0x1","from":"0xA","to":"0xB","value":1.5,"gas":21000,"timestamp":100,"type":"ether_transfer","token_standard":"none","token_symbol":null,"token_id":null,"from_kind":"eoa","to_kind":"eoa"})"
      "\n"
      R"({"tx_hash":"0x2","from":"0xB","to":"0xC","value":2.0,"gas":30000,"timestamp":110,"type":"contract_interaction","token_standard":"none","token_symbol":null,"token_id":null,"from_kind":"eoa","to_kind":"ca"})"
      "\n"
      R"({"tx_hash":"0x3","from":"0xC","to":"0xA","value":0.5,"gas":21000,"timestamp":120,"type":"ether_transfer","token_standard":"none","token_symbol":null,"token_id":null,"from_kind":"eoa","to_kind":"eoa"})"
      "\n";
  auto txs = parse_log_string(text, LogFormat::kJsonl);
  REQUIRE(txs.size() == 3);
  CHECK(txs[0].tx_hash == "0x1");
  CHECK(txs[1].to_kind == AccountKind::kCa);
  CHECK(txs[2].timestamp == 120);
}

TEST_CASE("missing timestamp raises SchemaError with line and field") {
  std::string text =
      R"({"tx_hash":"0x1","from":"0xA","to":"0xB","value":1,"gas":1,"timestamp":5,"type":"ether_transfer","token_standard":"none","from_kind":"eoa","to_kind":"eoa"})"
      "\n"
      R"({"tx_hash":"0x2","from":"0xA","to":"0xB","value":1,"gas":1,"type":"ether_transfer","token_standard":"none","from_kind":"eoa","to_kind":"eoa"})"
      "\n";
  try {
    parse_log_string(text, LogFormat::kJsonl);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("timestamp") != std::string::npos);
  }
}

TEST_CASE("NFT transfer round-trips through CSV serialize/parse") {
  auto tx = make_tx("0xdeadbeef", "0xa1", "0xb2", 1.0, 777, TxCategory::kNftTransfer,
                    TokenStandard::kErc721);
  tx.token_symbol = "COOLCAT";
  std::string csv = serialize_log({tx}, LogFormat::kCsv);
  auto back = parse_log_string(csv, LogFormat::kCsv);
  REQUIRE(back.size() == 1);
  CHECK(back[0].tx_hash == tx.tx_hash);
  CHECK(back[0].from_addr == tx.from_addr);
  CHECK(back[0].to_addr == tx.to_addr);
  CHECK(back[0].value == tx.value);
  CHECK(back[0].gas_used == tx.gas_used);
  CHECK(back[0].timestamp == tx.timestamp);
  CHECK(back[0].tx_category == tx.tx_category);
  CHECK(back[0].token_standard == tx.token_standard);
  CHECK(back[0].token_symbol == tx.token_symbol);
  CHECK(back[0].token_id == tx.token_id);

  auto back2 = parse_log_string(serialize_log({tx}, LogFormat::kJsonl), LogFormat::kJsonl);
  REQUIRE(back2.size() == 1);
  CHECK(back2[0].token_id == tx.token_id);
}

TEST_CASE("filter drops zero-value ether transfers") {
  auto kept = filter_and_categorize(
      {make_tx("0x1", "0xA", "0xB", 0.0, 1), make_tx("0x2", "0xA", "0xB", 1.0, 2)});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].tx_hash == "0x2");
}

TEST_CASE("filter drops token transfers without a known standard") {
  auto bad =
      make_tx("0x1", "0xA", "0xB", 5.0, 1, TxCategory::kFtTransfer, TokenStandard::kNone);
  auto good =
      make_tx("0x2", "0xA", "0xB", 5.0, 2, TxCategory::kFtTransfer, TokenStandard::kErc20);
  auto kept = filter_and_categorize({bad, good});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].tx_hash == "0x2");
}

TEST_CASE("filter keeps clean batches untouched and is idempotent") {
  auto txs = random_valid_batch(100, 17);
  auto once = filter_and_categorize(txs);
  REQUIRE(once.size() == txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) CHECK(once[i].tx_hash == txs[i].tx_hash);
  auto twice = filter_and_categorize(once);
  REQUIRE(twice.size() == once.size());
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i].tx_hash == once[i].tx_hash);
}

TEST_CASE("normalize handles constant values via the sigma floor") {
  AddressRegistry reg;
  std::vector<RawTransaction> txs;
  for (int i = 0; i < 3; ++i)
    txs.push_back(make_tx("0x" + std::to_string(i), "0xA", "0xB", 2.0, 100 + i));
  auto res = normalize(txs, reg);
  for (const auto& tx : res.txs) CHECK(tx.value_z == 0.0);
}

TEST_CASE("normalize shifts timestamps to start at zero") {
  AddressRegistry reg;
  std::vector<RawTransaction> txs = {make_tx("0x1", "0xA", "0xB", 1, 100),
                                     make_tx("0x2", "0xA", "0xB", 2, 160),
                                     make_tx("0x3", "0xA", "0xB", 3, 220)};
  auto res = normalize(txs, reg);
  CHECK(res.txs[0].t == 0.0);
  CHECK(res.txs[1].t == 60.0);
  CHECK(res.txs[2].t == 120.0);
}

TEST_CASE("normalize z-scores with population sigma") {
  AddressRegistry reg;
  std::vector<RawTransaction> txs = {make_tx("0x1", "0xA", "0xB", 1, 10),
                                     make_tx("0x2", "0xA", "0xB", 2, 20),
                                     make_tx("0x3", "0xA", "0xB", 3, 30)};
  auto res = normalize(txs, reg);
  CHECK(res.txs[0].value_z == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(res.txs[1].value_z == doctest::Approx(0.0));
  CHECK(res.txs[2].value_z == doctest::Approx(1.2247).epsilon(1e-4));
}

TEST_CASE("normalized batches have mean 0 and std 1") {
  AddressRegistry reg;
  auto txs = random_valid_batch(200, 23);
  auto res = normalize(txs, reg);
  double mean = 0, var = 0;
  for (const auto& tx : res.txs) mean += tx.value_z;
  mean /= res.txs.size();
  for (const auto& tx : res.txs) var += (tx.value_z - mean) * (tx.value_z - mean);
  var /= res.txs.size();
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
}

TEST_CASE("normalize rejects empty input") {
  AddressRegistry reg;
  CHECK_THROWS_AS((void)normalize({}, reg), EmptyInput);
}

TEST_CASE("registry ids are deterministic and case-insensitive") {
  auto txs = random_valid_batch(60, 31);
  AddressRegistry a, b;
  (void)normalize(txs, a);
  (void)normalize(txs, b);
  REQUIRE(a.size() == b.size());
  for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a.address_of(i) == b.address_of(i));

  AddressRegistry reg;
  std::int64_t id1 = reg.intern("0xAbCd", AccountKind::kEoa);
  std::int64_t id2 = reg.intern("0xabcd", AccountKind::kEoa);
  CHECK(id1 == id2);
}

TEST_CASE("timestamp ties keep file order (stable sort)") {
  AddressRegistry reg;
  std::vector<RawTransaction> txs = {make_tx("0x1", "0xA", "0xB", 1, 50),
                                     make_tx("0x2", "0xC", "0xD", 2, 50),
                                     make_tx("0x3", "0xE", "0xF", 3, 40)};
  auto res = normalize(txs, reg);
  CHECK(res.txs[0].tx_hash == "0x3");
  CHECK(res.txs[1].tx_hash == "0x1");
  CHECK(res.txs[2].tx_hash == "0x2");
}
