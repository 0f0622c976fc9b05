#ifndef PHISHTGL_GBDT_HPP_
#define PHISHTGL_GBDT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "phishtgl/errors.hpp"

namespace phishtgl {

struct GbdtConfig {
  std::size_t num_leaves = 127;
  double learning_rate = 0.08;
  double feature_fraction = 0.9;
  std::size_t num_rounds = 200;
  std::size_t min_samples_leaf = 5;
  double lambda_l2 = 1.0;
  std::size_t early_stopping_rounds = 20;  // 0 disables early stopping
  std::uint64_t seed = 0;

  void validate() const;
};

// One regression tree stored as flat nodes; negative child index marks a leaf
// whose value lives in `leaf_value`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;
  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const double* row) const;
};

struct GbdtModel {
  double init_score = 0.0;  // log-odds of the training base rate
  std::size_t feature_dim = 0;
  std::vector<Tree> trees;
  GbdtConfig config;

  void save_json(const std::string& path) const;
  static GbdtModel load_json(const std::string& path);
};

struct Prediction {
  double logits[2] = {0.0, 0.0};
  int label = 0;       // argmax of logits
  double score = 0.5;  // logistic probability of the positive class
};

// Leaf-wise boosted trees on logistic loss with second-order leaf values.
GbdtModel fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
              const GbdtConfig& cfg);

std::vector<Prediction> predict(const GbdtModel& model,
                                const std::vector<std::vector<double>>& X);

double raw_margin(const GbdtModel& model, const double* row, std::size_t dim);

// Per-round logistic loss on the given set (diagnostics and tests).
double logistic_loss(const GbdtModel& model, const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y);

}  // namespace phishtgl

#endif  // PHISHTGL_GBDT_HPP_
