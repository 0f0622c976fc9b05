#ifndef PHISHTGL_PIPELINE_HPP_
#define PHISHTGL_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phishtgl/contrastive.hpp"
#include "phishtgl/encoder.hpp"
#include "phishtgl/gbdt.hpp"
#include "phishtgl/metrics.hpp"
#include "phishtgl/synthetic.hpp"

namespace phishtgl {

enum class SplitMode { kRandomSplit, kKfold, kChronologicalUnseen };

std::string to_string(SplitMode m);
SplitMode split_mode_from_string(const std::string& s);

struct EvalProtocol {
  SplitMode mode = SplitMode::kKfold;
  double train_fraction = 0.7;
  std::size_t folds = 10;
  double resample_ratio = 0.8;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TaskKind { kNode, kEdge };

// Index-based resampling: node task downsamples the majority class, edge task
// duplicates the minority, both until minority/majority >= ratio.
std::vector<std::size_t> resample(const std::vector<int>& labels, TaskKind task,
                                  double ratio, std::uint64_t seed);

struct SplitPair {
  std::vector<std::size_t> train, test;
};

// Random 7:3 split or k disjoint folds over item indexes.
std::vector<SplitPair> split(std::size_t n, const EvalProtocol& protocol);

// Everything the experiment needs: the normalized stream, the registry, and
// label joins resolved to node ids / edge indexes.
struct Dataset {
  std::vector<Transaction> txs;
  AddressRegistry registry;
  std::map<std::int64_t, int> node_labels;
  std::map<std::int64_t, int> edge_labels;

  static Dataset from_raw(const std::vector<RawTransaction>& raw,
                          const std::map<std::string, int>& address_labels,
                          const std::map<std::string, int>& tx_labels);
};

struct PipelineConfig {
  ModelConfig model;
  ContrastiveConfig contrastive;
  GbdtConfig gbdt_node;   // num_leaves 127 by default
  GbdtConfig gbdt_edge;   // num_leaves 63 by default
  FeatureConfig features;
  EvalProtocol protocol;
  bool concat_features = true;  // append X^V (node) / edge attrs (edge) to reps
  std::uint64_t seed = 0;

  PipelineConfig();
  void validate() const;
};

struct ScoreRecord {
  std::string task;  // "node" | "edge"
  std::size_t fold = 0;
  std::string id;    // address or tx hash
  double score = 0;
  int label = 0;
};

struct ExperimentReport {
  MetricsReport node_task;
  MetricsReport edge_task;
  std::vector<ScoreRecord> scores;  // per-item test scores across folds

  std::string to_json() const;        // deterministic serialization
  std::string scores_to_csv() const;  // for external plotting (ROC/PDF data)
};

// Full protocol run: pretrain (label-free), embed, fit boosted trees on the
// resampled train split, evaluate per fold, aggregate.
ExperimentReport run_experiment(const Dataset& ds, const PipelineConfig& cfg);

// Representations used by the classifiers.
std::vector<std::vector<double>> node_representation_rows(
    const Model& model, const Htamg& g, const NodeFeatureView& feats, const NodeMemory& mem,
    const std::vector<std::int64_t>& nodes, double t_query, bool concat_features);
std::vector<std::vector<double>> edge_representation_rows(
    const Model& model, const Htamg& g, const NodeFeatureView& feats,
    const std::vector<std::int64_t>& edge_ids, bool concat_features);

struct DetectionTarget {
  enum class Kind { kAddress, kTxHash } kind = Kind::kAddress;
  std::string id;
};

struct DetectionResult {
  std::string id;
  double score = 0;
  int label = 0;
};

// Scores node/edge targets with the matching classifier. Node targets embed
// at (their latest event time + 1s); unseen ids raise UnknownTarget.
std::vector<DetectionResult> run_detection(const Dataset& ds, const PipelineConfig& cfg,
                                           const Model& model,
                                           const GbdtModel* gbdt_node_model,
                                           const GbdtModel* gbdt_edge_model,
                                           const std::vector<DetectionTarget>& targets);

}  // namespace phishtgl

#endif  // PHISHTGL_PIPELINE_HPP_
