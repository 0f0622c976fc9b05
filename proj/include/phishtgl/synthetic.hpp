#ifndef PHISHTGL_SYNTHETIC_HPP_
#define PHISHTGL_SYNTHETIC_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phishtgl/ingest.hpp"

namespace phishtgl {

// Knobs for the planted-pattern generator: benign background traffic plus
// phishing campaigns (victim burst into a collector, fast funnel through a
// laundering chain).
struct SyntheticConfig {
  std::size_t benign_accounts = 200;
  std::size_t phishing_collectors = 20;
  std::size_t victims_per_collector = 8;
  std::size_t laundering_depth = 2;
  double burst_window_seconds = 6 * 3600.0;
  double time_span_seconds = 30 * 86400.0;
  double benign_tx_per_account = 8.0;
  double ephemeral_fraction = 0.4;  // benign accounts active only in a narrow window
  std::uint64_t seed = 7;

  void validate() const;
};

struct SyntheticData {
  std::vector<RawTransaction> txs;             // timestamp-sorted
  std::map<std::string, int> address_labels;   // every generated address
  std::map<std::string, int> tx_labels;        // every tx hash
};

SyntheticData gen_synthetic(const SyntheticConfig& cfg);

void save_labels_csv(const std::string& path, const std::map<std::string, int>& labels,
                     const std::string& key_header);
std::map<std::string, int> load_labels_csv(const std::string& path);

}  // namespace phishtgl

#endif  // PHISHTGL_SYNTHETIC_HPP_
