#include "phishtgl/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

namespace phishtgl {

using nlohmann::json;

void GbdtConfig::validate() const {
  if (num_leaves < 2) throw ConfigError("num_leaves must be >= 2");
  if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
  if (feature_fraction <= 0 || feature_fraction > 1)
    throw ConfigError("feature_fraction must be in (0,1]");
  if (num_rounds == 0) throw ConfigError("num_rounds must be positive");
  if (min_samples_leaf == 0) throw ConfigError("min_samples_leaf must be positive");
}

double Tree::predict(const double* row) const {
  int idx = 0;
  while (!nodes[idx].is_leaf())
    idx = row[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left
                                                          : nodes[idx].right;
  return nodes[idx].leaf_value;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SplitChoice {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool found = false;
};

struct LeafTask {
  std::vector<std::int64_t> samples;
  double sum_grad = 0.0;
  double sum_hess = 0.0;
  int node_index = -1;   // position in the tree being grown
  SplitChoice best;
};

// Exact greedy split search over sorted feature values.
SplitChoice find_best_split(const std::vector<std::vector<double>>& X,
                            const std::vector<double>& grad, const std::vector<double>& hess,
                            const LeafTask& leaf, const std::vector<int>& features,
                            const GbdtConfig& cfg) {
  SplitChoice best;
  double total_gain_base =
      leaf.sum_grad * leaf.sum_grad / (leaf.sum_hess + cfg.lambda_l2);
  std::vector<std::pair<double, std::int64_t>> order(leaf.samples.size());
  for (int f : features) {
    for (std::size_t i = 0; i < leaf.samples.size(); ++i)
      order[i] = {X[leaf.samples[i]][f], leaf.samples[i]};
    std::sort(order.begin(), order.end());
    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      gl += grad[order[i].second];
      hl += hess[order[i].second];
      if (order[i].first == order[i + 1].first) continue;  // no boundary here
      std::size_t left_count = i + 1;
      std::size_t right_count = order.size() - left_count;
      if (left_count < cfg.min_samples_leaf || right_count < cfg.min_samples_leaf) continue;
      double gr = leaf.sum_grad - gl;
      double hr = leaf.sum_hess - hl;
      double gain = gl * gl / (hl + cfg.lambda_l2) + gr * gr / (hr + cfg.lambda_l2) -
                    total_gain_base;
      double threshold = order[i].first + 0.5 * (order[i + 1].first - order[i].first);
      if (gain > best.gain + 1e-12 ||
          (best.found && std::abs(gain - best.gain) <= 1e-12 &&
           (f < best.feature || (f == best.feature && threshold < best.threshold)))) {
        best.gain = gain;
        best.feature = f;
        best.threshold = threshold;
        best.found = true;
      }
    }
  }
  return best;
}

Tree grow_tree(const std::vector<std::vector<double>>& X, const std::vector<double>& grad,
               const std::vector<double>& hess, const std::vector<std::int64_t>& samples,
               const std::vector<int>& features, const GbdtConfig& cfg) {
  Tree tree;
  auto leaf_value = [&](double g, double h) {
    return -g / (h + cfg.lambda_l2) * cfg.learning_rate;
  };

  LeafTask root;
  root.samples = samples;
  for (std::int64_t i : samples) {
    root.sum_grad += grad[i];
    root.sum_hess += hess[i];
  }
  root.node_index = 0;
  tree.nodes.push_back(TreeNode{});
  tree.nodes[0].leaf_value = leaf_value(root.sum_grad, root.sum_hess);
  root.best = find_best_split(X, grad, hess, root, features, cfg);

  std::vector<LeafTask> open{std::move(root)};
  std::size_t leaves = 1;
  // Leaf-wise growth: always split the open leaf with the largest gain.
  while (leaves < cfg.num_leaves) {
    std::size_t pick = open.size();
    double best_gain = 0.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (!open[i].best.found) continue;
      if (pick == open.size() || open[i].best.gain > best_gain) {
        pick = i;
        best_gain = open[i].best.gain;
      }
    }
    if (pick == open.size()) break;  // no positive-gain split anywhere

    LeafTask leaf = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

    LeafTask left, right;
    for (std::int64_t i : leaf.samples) {
      if (X[i][leaf.best.feature] <= leaf.best.threshold) {
        left.samples.push_back(i);
        left.sum_grad += grad[i];
        left.sum_hess += hess[i];
      } else {
        right.samples.push_back(i);
        right.sum_grad += grad[i];
        right.sum_hess += hess[i];
      }
    }
    TreeNode& parent = tree.nodes[leaf.node_index];
    parent.feature = leaf.best.feature;
    parent.threshold = leaf.best.threshold;
    parent.left = static_cast<int>(tree.nodes.size());
    parent.right = static_cast<int>(tree.nodes.size() + 1);
    left.node_index = parent.left;
    right.node_index = parent.right;

    TreeNode lnode, rnode;
    lnode.leaf_value = leaf_value(left.sum_grad, left.sum_hess);
    rnode.leaf_value = leaf_value(right.sum_grad, right.sum_hess);
    tree.nodes.push_back(lnode);
    tree.nodes.push_back(rnode);

    left.best = find_best_split(X, grad, hess, left, features, cfg);
    right.best = find_best_split(X, grad, hess, right, features, cfg);
    open.push_back(std::move(left));
    open.push_back(std::move(right));
    ++leaves;
  }
  return tree;
}

double loss_of_margins(const std::vector<double>& margins, const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    // log(1 + exp(-yhat)) with the usual stable form
    double m = y[i] == 1 ? margins[i] : -margins[i];
    loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  return loss / y.size();
}

}  // namespace

GbdtModel fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
              const GbdtConfig& cfg) {
  cfg.validate();
  if (X.size() != y.size()) throw ShapeError("fit: X and y lengths differ");
  if (X.size() < 2) throw ShapeError("fit: need at least two samples");
  std::size_t dim = X[0].size();
  for (const auto& row : X)
    if (row.size() != dim) throw ShapeError("fit: ragged feature matrix");

  std::size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw SchemaError("fit: labels must be 0/1");
    positives += label;
  }
  if (positives == 0 || positives == y.size())
    throw SingleClassError("fit: both classes must be present");

  GbdtModel model;
  model.feature_dim = dim;
  model.config = cfg;
  double p = static_cast<double>(positives) / y.size();
  model.init_score = std::log(p / (1.0 - p));

  // Optional holdout for early stopping; keeps both classes in train.
  std::vector<std::int64_t> train_idx(y.size());
  std::iota(train_idx.begin(), train_idx.end(), 0);
  std::vector<std::int64_t> holdout_idx;
  std::mt19937_64 rng(cfg.seed);
  bool early = cfg.early_stopping_rounds > 0;
  if (early) {
    std::size_t negatives = y.size() - positives;
    if (positives >= 10 && negatives >= 10) {
      std::shuffle(train_idx.begin(), train_idx.end(), rng);
      std::size_t hold = y.size() / 5;
      holdout_idx.assign(train_idx.begin(), train_idx.begin() + hold);
      train_idx.erase(train_idx.begin(), train_idx.begin() + hold);
      std::sort(train_idx.begin(), train_idx.end());
      std::sort(holdout_idx.begin(), holdout_idx.end());
      std::size_t train_pos = 0;
      for (std::int64_t i : train_idx) train_pos += y[i];
      if (train_pos == 0 || train_pos == train_idx.size()) {
        train_idx.resize(y.size());
        std::iota(train_idx.begin(), train_idx.end(), 0);
        holdout_idx.clear();
      }
    }
    early = !holdout_idx.empty();
  }

  std::vector<double> margins(y.size(), model.init_score);
  std::vector<double> grad(y.size()), hess(y.size());
  std::size_t feat_take =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.feature_fraction *
                                                                  static_cast<double>(dim))));
  std::vector<int> all_features(dim);
  std::iota(all_features.begin(), all_features.end(), 0);

  double best_holdout = std::numeric_limits<double>::infinity();
  std::size_t best_round = 0, since_best = 0;

  for (std::size_t round = 0; round < cfg.num_rounds; ++round) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      double prob = sigmoid(margins[i]);
      grad[i] = prob - y[i];
      hess[i] = std::max(prob * (1.0 - prob), 1e-16);
    }
    std::vector<int> features = all_features;
    if (feat_take < dim) {
      std::shuffle(features.begin(), features.end(), rng);
      features.resize(feat_take);
      std::sort(features.begin(), features.end());
    }
    Tree tree = grow_tree(X, grad, hess, train_idx, features, cfg);
    for (std::size_t i = 0; i < y.size(); ++i) margins[i] += tree.predict(X[i].data());
    model.trees.push_back(std::move(tree));

    if (early) {
      std::vector<double> hold_margins;
      std::vector<int> hold_y;
      hold_margins.reserve(holdout_idx.size());
      for (std::int64_t i : holdout_idx) {
        hold_margins.push_back(margins[i]);
        hold_y.push_back(y[i]);
      }
      double hold_loss = loss_of_margins(hold_margins, hold_y);
      if (hold_loss < best_holdout - 1e-9) {
        best_holdout = hold_loss;
        best_round = round + 1;
        since_best = 0;
      } else if (++since_best >= cfg.early_stopping_rounds) {
        break;
      }
    }
  }
  if (early && best_round < model.trees.size()) model.trees.resize(best_round);
  return model;
}

double raw_margin(const GbdtModel& model, const double* row, std::size_t dim) {
  if (dim != model.feature_dim) throw ShapeError("predict: feature dim mismatch");
  double margin = model.init_score;
  for (const Tree& tree : model.trees) margin += tree.predict(row);
  return margin;
}

std::vector<Prediction> predict(const GbdtModel& model,
                                const std::vector<std::vector<double>>& X) {
  std::vector<Prediction> out;
  out.reserve(X.size());
  for (const auto& row : X) {
    double margin = raw_margin(model, row.data(), row.size());
    Prediction p;
    p.logits[0] = -margin / 2.0;
    p.logits[1] = margin / 2.0;
    p.label = p.logits[1] > p.logits[0] ? 1 : 0;
    p.score = sigmoid(margin);
    out.push_back(p);
  }
  return out;
}

double logistic_loss(const GbdtModel& model, const std::vector<std::vector<double>>& X,
                     const std::vector<int>& y) {
  std::vector<double> margins;
  margins.reserve(X.size());
  for (const auto& row : X) margins.push_back(raw_margin(model, row.data(), row.size()));
  return loss_of_margins(margins, y);
}

namespace {

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const TreeNode& n : tree.nodes)
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"leaf_value", n.leaf_value}});
  return nodes;
}

Tree tree_from_json(const json& nodes) {
  Tree tree;
  for (const auto& nj : nodes) {
    TreeNode n;
    n.feature = nj.at("feature").get<int>();
    n.threshold = nj.at("threshold").get<double>();
    n.left = nj.at("left").get<int>();
    n.right = nj.at("right").get<int>();
    n.leaf_value = nj.at("leaf_value").get<double>();
    tree.nodes.push_back(n);
  }
  return tree;
}

}  // namespace

void GbdtModel::save_json(const std::string& path) const {
  json j;
  j["format"] = "phishtgl-gbdt";
  j["version"] = 1;
  j["init_score"] = init_score;
  j["feature_dim"] = feature_dim;
  j["config"] = {{"num_leaves", config.num_leaves},
                 {"learning_rate", config.learning_rate},
                 {"feature_fraction", config.feature_fraction},
                 {"num_rounds", config.num_rounds},
                 {"min_samples_leaf", config.min_samples_leaf},
                 {"lambda_l2", config.lambda_l2},
                 {"early_stopping_rounds", config.early_stopping_rounds},
                 {"seed", config.seed}};
  json trees_json = json::array();
  for (const Tree& t : trees) trees_json.push_back(tree_to_json(t));
  j["trees"] = std::move(trees_json);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << "\n";
}

GbdtModel GbdtModel::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j = json::parse(in);
  if (j.value("format", "") != "phishtgl-gbdt") throw SchemaError("not a gbdt model file");
  GbdtModel model;
  model.init_score = j.at("init_score").get<double>();
  model.feature_dim = j.at("feature_dim").get<std::size_t>();
  const json& c = j.at("config");
  model.config.num_leaves = c.at("num_leaves").get<std::size_t>();
  model.config.learning_rate = c.at("learning_rate").get<double>();
  model.config.feature_fraction = c.at("feature_fraction").get<double>();
  model.config.num_rounds = c.at("num_rounds").get<std::size_t>();
  model.config.min_samples_leaf = c.at("min_samples_leaf").get<std::size_t>();
  model.config.lambda_l2 = c.at("lambda_l2").get<double>();
  model.config.early_stopping_rounds = c.at("early_stopping_rounds").get<std::size_t>();
  model.config.seed = c.at("seed").get<std::uint64_t>();
  for (const auto& tj : j.at("trees")) model.trees.push_back(tree_from_json(tj));
  return model;
}

}  // namespace phishtgl
