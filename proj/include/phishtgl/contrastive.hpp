#ifndef PHISHTGL_CONTRASTIVE_HPP_
#define PHISHTGL_CONTRASTIVE_HPP_

#include <cstdint>
#include <vector>

#include "phishtgl/encoder.hpp"

namespace phishtgl {

// Bernoulli edge-drop and feature-mask pattern for one graph view.
struct AugmentationMask {
  std::vector<bool> edge_keep;       // drawn with P(keep) = 1 - p
  std::vector<bool> feature_masked;  // drawn with P(mask) = p
  double p = 0.2;
  std::uint64_t seed = 0;
};

AugmentationMask draw_augmentation(const Htamg& g, double p, std::uint64_t seed);

// A perturbed copy of the graph: surviving edges reindexed densely, node
// features read through the mask. The base graph is untouched.
struct GraphView {
  Htamg graph;
  std::vector<std::int64_t> edge_origin;  // view edge id -> base edge id
  NodeFeatureView features;
};

GraphView make_view(const Htamg& base, const AugmentationMask& mask);

// Two-layer projection head p(.) over encoder outputs.
struct ProjectionHead {
  Value w1, b1, w2, b2;
  static ProjectionHead from_store(const ParamStore& store);
  Value project(const Value& z) const;  // row-wise; works on N x m stacks
};

// Projected cosine similarity theta = s(p(a), p(b)); zero projections give 0
// and set the flag.
Value similarity(const ProjectionHead& head, const Value& z_a, const Value& z_b,
                 bool* zero_flag = nullptr);

struct ContrastiveConfig {
  double temperature = 1.0;
  std::size_t batch_size = 256;
  double learning_rate = 1e-4;
  std::size_t epochs = 30;
  double p = 0.2;  // edge drop and feature mask probability

  void validate() const;
};

// InfoNCE-style objective for anchor row i of view 1 against view 2:
// log( e^{th_ii/tau} / (e^{th_ii/tau} + inter-view + intra-view negatives) ).
Value pairwise_loss(const Value& anchors, const Value& positives, std::size_t i, double tau);

// Symmetric average over both view directions and all positive pairs.
Value batch_loss(const Value& proj1, const Value& proj2, double tau);

struct BatchLossStats {
  Value loss;
  double mean_positive_theta = 0.0;
};
BatchLossStats batch_loss_with_stats(const Value& proj1, const Value& proj2, double tau);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double mean_positive_theta = 0.0;
  double wall_ms = 0.0;
};

struct PretrainResult {
  std::vector<EpochLog> log;
};

// Self-supervised pretraining: per epoch, draw two augmented views, replay
// the event stream in batches, maximize the contrastive objective by SGA.
// Labels never enter. The graph must carry assembled node features.
PretrainResult pretrain(const Htamg& g, Model& model, const ContrastiveConfig& cfg,
                        std::uint64_t seed);

}  // namespace phishtgl

#endif  // PHISHTGL_CONTRASTIVE_HPP_
