#ifndef PHISHTGL_FEATURES_HPP_
#define PHISHTGL_FEATURES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "phishtgl/htamg.hpp"

namespace phishtgl {

struct FeatureConfig {
  double pagerank_damping = 0.85;
  double pagerank_tol = 1e-10;
  std::size_t pagerank_max_iter = 200;
  std::size_t utp_depth_cap = 3;
  double dtd_min_span = 1.0;  // seconds
};

// The 18 extracted node features plus the account-kind code, in table order.
struct NodeFeatureVector {
  double aid = 0, aod = 0, atd = 0;       // T1-T3 transaction counts
  double ivf = 0, ovf = 0, tve = 0;       // T4-T6 value flows (raw units)
  double dtd = 0;                         // T7 degree temporal density
  double cir = 0;                         // T8 contract interaction ratio
  double pntd = 0;                        // T9 peak neighbor transaction degree
  double ncd = 0;                         // N1 distinct counterparties
  double ic = 0, oc = 0, dc = 0;          // N2-N4 degree centralities
  double andc = 0;                        // N5 average neighbor degree centrality
  double pr = 0;                          // N6 pagerank
  double scc = 0;                         // N7 square clustering coefficient
  double mnr = 0;                         // N8 eccentricity within component
  double utp = 0;                         // N9 unique transactional pathways
  double kind_code = 0;                   // EOA/CA/Unknown code (categorical)
};

inline constexpr std::size_t kNodeFeatureDim = 19;
extern const char* const kFeatureNames[kNodeFeatureDim];

std::vector<double> feature_row(const NodeFeatureVector& f);  // fixed column order

struct DegreeValueFeatures {
  std::vector<double> aid, aod, atd, ivf, ovf, tve;
};
DegreeValueFeatures degree_value_features(const Htamg& g);

std::vector<double> dtd(const Htamg& g, const FeatureConfig& cfg);

struct CirPntd {
  std::vector<double> cir, pntd;
};
CirPntd cir_pntd(const Htamg& g);

struct CentralityFeatures {
  std::vector<double> ncd, ic, oc, dc, andc;
};
CentralityFeatures centrality_features(const Htamg& g);

struct PagerankResult {
  std::vector<double> pr;
  bool converged = true;
  std::size_t iterations = 0;
};
PagerankResult pagerank(const Htamg& g, const FeatureConfig& cfg);

std::vector<double> scc(const Htamg& g);
std::vector<double> mnr(const Htamg& g);
std::vector<double> utp(const Htamg& g, const FeatureConfig& cfg);

struct FeatureExtraction {
  std::vector<NodeFeatureVector> nodes;
  bool pagerank_converged = true;
};
FeatureExtraction compute_all_features(const Htamg& g, const FeatureConfig& cfg);

// Per-column normalization statistics for the assembled table.
struct ColumnStats {
  std::vector<double> mu;     // size kNodeFeatureDim
  std::vector<double> sigma;  // kind_code column carries mu=0, sigma=1

  void save_json(const std::string& path) const;
  static ColumnStats load_json(const std::string& path);
};

// Builds the z-scored node attribute table X^V (kind_code passes through
// unscaled) and attaches it to the graph. Fits column statistics when
// `frozen` is empty; reuses them otherwise (inference path).
ColumnStats assemble(Htamg& g, const std::vector<NodeFeatureVector>& feats,
                     const std::optional<ColumnStats>& frozen = std::nullopt);

void save_features_csv(const std::string& path, const std::vector<NodeFeatureVector>& feats);
std::vector<NodeFeatureVector> load_features_csv(const std::string& path);

// Undirected simple projection: sorted distinct neighbors, self-loops dropped.
std::vector<std::vector<std::int64_t>> simple_projection(const Htamg& g);

}  // namespace phishtgl

#endif  // PHISHTGL_FEATURES_HPP_
