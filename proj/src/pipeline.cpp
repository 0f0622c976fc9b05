#include "phishtgl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace phishtgl {

using nlohmann::json;

std::string to_string(SplitMode m) {
  switch (m) {
    case SplitMode::kRandomSplit: return "random_split";
    case SplitMode::kKfold: return "kfold";
    case SplitMode::kChronologicalUnseen: return "chronological_unseen";
  }
  return "?";
}

SplitMode split_mode_from_string(const std::string& s) {
  if (s == "random_split") return SplitMode::kRandomSplit;
  if (s == "kfold") return SplitMode::kKfold;
  if (s == "chronological_unseen") return SplitMode::kChronologicalUnseen;
  throw ConfigError("unknown split mode: " + s);
}

void EvalProtocol::validate() const {
  if (train_fraction <= 0 || train_fraction >= 1)
    throw ConfigError("train_fraction must be in (0,1)");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (resample_ratio <= 0 || resample_ratio > 1)
    throw ConfigError("resample_ratio must be in (0,1]");
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

std::vector<std::size_t> resample(const std::vector<int>& labels, TaskKind task,
                                  double ratio, std::uint64_t seed) {
  if (ratio <= 0 || ratio > 1) throw ConfigError("resample ratio must be in (0,1]");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw EmptyClass("resample needs both classes");

  std::vector<std::size_t>& minority = pos.size() <= neg.size() ? pos : neg;
  std::vector<std::size_t>& majority = pos.size() <= neg.size() ? neg : pos;
  double current = static_cast<double>(minority.size()) / majority.size();

  std::vector<std::size_t> out;
  if (current >= ratio) {  // already balanced enough
    out.resize(labels.size());
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  std::mt19937_64 rng(seed);
  if (task == TaskKind::kNode) {
    // Downsample the majority so that minority/majority >= ratio.
    std::size_t keep = static_cast<std::size_t>(
        std::floor(static_cast<double>(minority.size()) / ratio));
    keep = std::max<std::size_t>(keep, 1);
    std::vector<std::size_t> shuffled = majority;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    shuffled.resize(std::min(keep, shuffled.size()));
    out = minority;
    out.insert(out.end(), shuffled.begin(), shuffled.end());
    std::sort(out.begin(), out.end());
  } else {
    // Duplicate the minority until minority/majority >= ratio.
    std::size_t target = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(majority.size())));
    out.resize(labels.size());
    std::iota(out.begin(), out.end(), 0);
    std::uniform_int_distribution<std::size_t> pick(0, minority.size() - 1);
    for (std::size_t have = minority.size(); have < target; ++have)
      out.push_back(minority[pick(rng)]);
  }
  return out;
}

std::vector<SplitPair> split(std::size_t n, const EvalProtocol& protocol) {
  protocol.validate();
  if (protocol.mode == SplitMode::kChronologicalUnseen)
    throw ConfigError("chronological split needs the dataset, not bare indexes");
  if (n < 2) throw InsufficientData("need at least 2 items to split");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(protocol.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<SplitPair> out;
  if (protocol.mode == SplitMode::kRandomSplit) {
    std::size_t train_n = static_cast<std::size_t>(
        std::llround(protocol.train_fraction * static_cast<double>(n)));
    train_n = std::min(std::max<std::size_t>(train_n, 1), n - 1);
    SplitPair pair;
    pair.train.assign(order.begin(), order.begin() + train_n);
    pair.test.assign(order.begin() + train_n, order.end());
    std::sort(pair.train.begin(), pair.train.end());
    std::sort(pair.test.begin(), pair.test.end());
    out.push_back(std::move(pair));
  } else {
    std::size_t k = protocol.folds;
    if (n < k) throw InsufficientData("fewer items than folds");
    for (std::size_t f = 0; f < k; ++f) {
      std::size_t lo = f * n / k, hi = (f + 1) * n / k;
      SplitPair pair;
      pair.test.assign(order.begin() + lo, order.begin() + hi);
      pair.train.reserve(n - (hi - lo));
      pair.train.insert(pair.train.end(), order.begin(), order.begin() + lo);
      pair.train.insert(pair.train.end(), order.begin() + hi, order.end());
      std::sort(pair.train.begin(), pair.train.end());
      std::sort(pair.test.begin(), pair.test.end());
      out.push_back(std::move(pair));
    }
  }
  return out;
}

Dataset Dataset::from_raw(const std::vector<RawTransaction>& raw,
                          const std::map<std::string, int>& address_labels,
                          const std::map<std::string, int>& tx_labels) {
  Dataset ds;
  auto filtered = filter_and_categorize(raw);
  auto normalized = normalize(filtered, ds.registry);
  ds.txs = std::move(normalized.txs);
  for (const auto& [addr, label] : address_labels) {
    auto id = ds.registry.lookup(addr);
    if (id) ds.node_labels[*id] = label;
  }
  std::map<std::string, std::int64_t> hash_to_edge;
  for (std::size_t i = 0; i < ds.txs.size(); ++i)
    hash_to_edge[ds.txs[i].tx_hash] = static_cast<std::int64_t>(i);
  for (const auto& [hash, label] : tx_labels) {
    auto it = hash_to_edge.find(hash);
    if (it != hash_to_edge.end()) ds.edge_labels[it->second] = label;
  }
  return ds;
}

PipelineConfig::PipelineConfig() {
  gbdt_node.num_leaves = 127;
  gbdt_edge.num_leaves = 63;
}

void PipelineConfig::validate() const {
  model.validate();
  contrastive.validate();
  gbdt_node.validate();
  gbdt_edge.validate();
  protocol.validate();
}

std::vector<std::vector<double>> node_representation_rows(
    const Model& model, const Htamg& g, const NodeFeatureView& feats, const NodeMemory& mem,
    const std::vector<std::int64_t>& nodes, double t_query, bool concat_features) {
  std::vector<std::vector<double>> rows;
  rows.reserve(nodes.size());
  if (nodes.empty()) return rows;
  NoGradGuard guard;
  NodeEmbeddings embs = model.embed(g, feats, mem, nodes, t_query);
  for (std::int64_t v : nodes) {
    std::vector<double> row = embs.top(v).tensor().data;
    if (concat_features) {
      const Value fv = feats.row(v);
      row.insert(row.end(), fv.tensor().data.begin(), fv.tensor().data.end());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> edge_representation_rows(
    const Model& model, const Htamg& g, const NodeFeatureView& feats,
    const std::vector<std::int64_t>& edge_ids, bool concat_features) {
  std::vector<std::vector<double>> rows;
  rows.reserve(edge_ids.size());
  if (edge_ids.empty()) return rows;
  NoGradGuard guard;
  auto reps = edge_representations(model, g, feats, edge_ids);
  for (std::int64_t id : edge_ids) {
    std::vector<double> row = reps.at(id).tensor().data;
    if (concat_features) {
      const double* attr = g.edge_attr(id);
      row.insert(row.end(), attr, attr + kEdgeAttrDim);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

MetricsEntry evaluate_fold(const std::vector<std::vector<double>>& rows,
                           const std::vector<int>& labels, const SplitPair& fold,
                           TaskKind task, const GbdtConfig& gbdt_cfg, double resample_ratio,
                           std::uint64_t seed, std::vector<double>* test_scores) {
  std::vector<int> train_labels;
  train_labels.reserve(fold.train.size());
  for (std::size_t i : fold.train) train_labels.push_back(labels[i]);
  auto resampled = resample(train_labels, task, resample_ratio, seed);

  std::vector<std::vector<double>> X;
  std::vector<int> y;
  X.reserve(resampled.size());
  for (std::size_t r : resampled) {
    X.push_back(rows[fold.train[r]]);
    y.push_back(train_labels[r]);
  }
  GbdtConfig cfg = gbdt_cfg;
  cfg.seed = seed;
  GbdtModel booster = fit(X, y, cfg);

  std::vector<std::vector<double>> Xt;
  std::vector<int> yt;
  for (std::size_t i : fold.test) {
    Xt.push_back(rows[i]);
    yt.push_back(labels[i]);
  }
  auto preds = predict(booster, Xt);
  std::vector<double> scores;
  scores.reserve(preds.size());
  for (const auto& p : preds) scores.push_back(p.score);
  if (test_scores) *test_scores = scores;
  return compute_metrics(scores, yt, 0.5);
}

MetricsReport run_folds(const std::vector<std::vector<double>>& rows,
                        const std::vector<int>& labels,
                        const std::vector<std::string>& item_ids, TaskKind task,
                        const PipelineConfig& cfg, std::vector<ScoreRecord>* sink) {
  MetricsReport report;
  const GbdtConfig& gbdt_cfg = task == TaskKind::kNode ? cfg.gbdt_node : cfg.gbdt_edge;
  const char* task_name = task == TaskKind::kNode ? "node" : "edge";
  auto folds = split(rows.size(), cfg.protocol);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<double> scores;
    report.folds.push_back(evaluate_fold(rows, labels, folds[f], task, gbdt_cfg,
                                         cfg.protocol.resample_ratio,
                                         mix_seed(cfg.seed, 1000 + f,
                                                  task == TaskKind::kNode ? 1 : 2),
                                         &scores));
    if (sink)
      for (std::size_t i = 0; i < folds[f].test.size(); ++i)
        sink->push_back({task_name, f, item_ids[folds[f].test[i]], scores[i],
                         labels[folds[f].test[i]]});
  }
  return report;
}

struct ChronoSplit {
  std::size_t cut = 0;            // first test-era transaction index
  std::set<std::int64_t> train_nodes;
  std::set<std::int64_t> test_only_nodes;
};

ChronoSplit chronological_cut(const Dataset& ds, double train_fraction) {
  std::size_t n = ds.txs.size();
  if (n < 4) throw InsufficientData("too few transactions for a chronological split");
  std::size_t cut = static_cast<std::size_t>(std::floor(train_fraction * n));
  cut = std::min(std::max<std::size_t>(cut, 1), n - 1);
  // Push the boundary past timestamp ties so max(train t) < min(test t).
  while (cut < n && ds.txs[cut].t == ds.txs[cut - 1].t) ++cut;
  if (cut >= n) throw InsufficientData("timestamp ties swallow the test era");

  ChronoSplit out;
  out.cut = cut;
  for (std::size_t i = 0; i < cut; ++i) {
    out.train_nodes.insert(ds.txs[i].src);
    out.train_nodes.insert(ds.txs[i].dst);
  }
  for (std::size_t i = cut; i < n; ++i)
    for (std::int64_t v : {ds.txs[i].src, ds.txs[i].dst})
      if (!out.train_nodes.count(v)) out.test_only_nodes.insert(v);
  return out;
}

MetricsReport single_fold_report(const std::vector<std::vector<double>>& train_rows,
                                 const std::vector<int>& train_labels,
                                 const std::vector<std::vector<double>>& test_rows,
                                 const std::vector<int>& test_labels,
                                 const std::vector<std::string>& test_ids, TaskKind task,
                                 const PipelineConfig& cfg,
                                 std::vector<ScoreRecord>* sink) {
  auto resampled = resample(train_labels, task, cfg.protocol.resample_ratio,
                            mix_seed(cfg.seed, 77, task == TaskKind::kNode ? 1 : 2));
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  for (std::size_t r : resampled) {
    X.push_back(train_rows[r]);
    y.push_back(train_labels[r]);
  }
  GbdtConfig gcfg = task == TaskKind::kNode ? cfg.gbdt_node : cfg.gbdt_edge;
  gcfg.seed = mix_seed(cfg.seed, 78, task == TaskKind::kNode ? 1 : 2);
  GbdtModel booster = fit(X, y, gcfg);
  auto preds = predict(booster, test_rows);
  std::vector<double> scores;
  for (const auto& p : preds) scores.push_back(p.score);
  if (sink) {
    const char* task_name = task == TaskKind::kNode ? "node" : "edge";
    for (std::size_t i = 0; i < test_ids.size(); ++i)
      sink->push_back({task_name, 0, test_ids[i], scores[i], test_labels[i]});
  }
  MetricsReport report;
  report.folds.push_back(compute_metrics(scores, test_labels, 0.5));
  return report;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& ds, const PipelineConfig& cfg) {
  cfg.validate();
  if (ds.txs.empty()) throw EmptyInput("experiment needs transactions");
  const auto& kinds = ds.registry.kinds();

  ExperimentReport report;
  if (cfg.protocol.mode != SplitMode::kChronologicalUnseen) {
    Htamg g = build(ds.txs, kinds);
    auto fx = compute_all_features(g, cfg.features);
    assemble(g, fx.nodes);
    Model model(cfg.model, cfg.seed);
    pretrain(g, model, cfg.contrastive, cfg.seed);
    NodeMemory mem(g.num_nodes(), cfg.model.memory_dim);
    replay_memory(model, g, mem, cfg.contrastive.batch_size);
    NodeFeatureView feats = NodeFeatureView::of(g);

    std::vector<std::int64_t> node_ids;
    std::vector<int> node_labels;
    std::vector<std::string> node_names;
    for (const auto& [v, label] : ds.node_labels) {
      node_ids.push_back(v);
      node_labels.push_back(label);
      node_names.push_back(ds.registry.address_of(v));
    }
    double t_query = g.max_time() + 1.0;
    auto node_rows = node_representation_rows(model, g, feats, mem, node_ids, t_query,
                                              cfg.concat_features);
    if (!node_rows.empty())
      report.node_task =
          run_folds(node_rows, node_labels, node_names, TaskKind::kNode, cfg,
                    &report.scores);

    std::vector<std::int64_t> edge_ids;
    std::vector<int> edge_labels;
    std::vector<std::string> edge_names;
    for (const auto& [e, label] : ds.edge_labels) {
      edge_ids.push_back(e);
      edge_labels.push_back(label);
      edge_names.push_back(ds.txs[e].tx_hash);
    }
    auto edge_rows =
        edge_representation_rows(model, g, feats, edge_ids, cfg.concat_features);
    if (!edge_rows.empty())
      report.edge_task =
          run_folds(edge_rows, edge_labels, edge_names, TaskKind::kEdge, cfg,
                    &report.scores);
    return report;
  }

  // Chronological unseen-node protocol: pretrain and normalize on the train
  // era only; test nodes are embedded inductively from their own events.
  ChronoSplit chrono = chronological_cut(ds, cfg.protocol.train_fraction);
  std::vector<Transaction> train_txs(ds.txs.begin(),
                                     ds.txs.begin() + static_cast<std::ptrdiff_t>(chrono.cut));

  Htamg g_train = build(train_txs, kinds);
  auto fx_train = compute_all_features(g_train, cfg.features);
  ColumnStats frozen = assemble(g_train, fx_train.nodes);
  Model model(cfg.model, cfg.seed);
  pretrain(g_train, model, cfg.contrastive, cfg.seed);

  NodeMemory mem(g_train.num_nodes(), cfg.model.memory_dim);
  replay_memory(model, g_train, mem, cfg.contrastive.batch_size);
  NodeFeatureView feats_train = NodeFeatureView::of(g_train);

  std::vector<std::int64_t> train_node_ids;
  std::vector<int> train_node_labels;
  for (const auto& [v, label] : ds.node_labels)
    if (chrono.train_nodes.count(v)) {
      train_node_ids.push_back(v);
      train_node_labels.push_back(label);
    }
  double t_train_query = g_train.max_time() + 1.0;
  auto train_node_rows = node_representation_rows(model, g_train, feats_train, mem,
                                                  train_node_ids, t_train_query,
                                                  cfg.concat_features);
  std::vector<std::int64_t> train_edge_ids;
  std::vector<int> train_edge_labels;
  for (const auto& [e, label] : ds.edge_labels)
    if (static_cast<std::size_t>(e) < chrono.cut) {
      train_edge_ids.push_back(e);
      train_edge_labels.push_back(label);
    }
  auto train_edge_rows = edge_representation_rows(model, g_train, feats_train,
                                                  train_edge_ids, cfg.concat_features);

  // Extend to the full graph with frozen feature statistics, then continue
  // the memory replay through the test era.
  Htamg g_full = build(ds.txs, kinds);
  auto fx_full = compute_all_features(g_full, cfg.features);
  assemble(g_full, fx_full.nodes, frozen);
  NodeFeatureView feats_full = NodeFeatureView::of(g_full);
  mem.ensure_nodes(g_full.num_nodes());
  replay_memory_range(model, g_full, mem, chrono.cut, cfg.contrastive.batch_size);

  std::vector<std::int64_t> test_node_ids;
  std::vector<int> test_node_labels;
  std::vector<std::string> test_node_names;
  for (const auto& [v, label] : ds.node_labels)
    if (chrono.test_only_nodes.count(v)) {
      test_node_ids.push_back(v);
      test_node_labels.push_back(label);
      test_node_names.push_back(ds.registry.address_of(v));
    }
  double t_full_query = g_full.max_time() + 1.0;
  auto test_node_rows = node_representation_rows(model, g_full, feats_full, mem,
                                                 test_node_ids, t_full_query,
                                                 cfg.concat_features);

  std::vector<std::int64_t> test_edge_ids;
  std::vector<int> test_edge_labels;
  std::vector<std::string> test_edge_names;
  for (const auto& [e, label] : ds.edge_labels) {
    if (static_cast<std::size_t>(e) < chrono.cut) continue;
    const Transaction& tx = ds.txs[e];
    if (chrono.test_only_nodes.count(tx.src) && chrono.test_only_nodes.count(tx.dst)) {
      test_edge_ids.push_back(e);
      test_edge_labels.push_back(label);
      test_edge_names.push_back(tx.tx_hash);
    }
  }
  auto test_edge_rows = edge_representation_rows(model, g_full, feats_full, test_edge_ids,
                                                 cfg.concat_features);

  if (!train_node_rows.empty() && !test_node_rows.empty())
    report.node_task = single_fold_report(train_node_rows, train_node_labels,
                                          test_node_rows, test_node_labels, test_node_names,
                                          TaskKind::kNode, cfg, &report.scores);
  if (!train_edge_rows.empty() && !test_edge_rows.empty())
    report.edge_task = single_fold_report(train_edge_rows, train_edge_labels,
                                          test_edge_rows, test_edge_labels, test_edge_names,
                                          TaskKind::kEdge, cfg, &report.scores);
  return report;
}

std::vector<DetectionResult> run_detection(const Dataset& ds, const PipelineConfig& cfg,
                                           const Model& model,
                                           const GbdtModel* gbdt_node_model,
                                           const GbdtModel* gbdt_edge_model,
                                           const std::vector<DetectionTarget>& targets) {
  std::vector<DetectionResult> out;
  if (targets.empty()) return out;

  Htamg g = build(ds.txs, ds.registry.kinds());
  auto fx = compute_all_features(g, cfg.features);
  assemble(g, fx.nodes);
  NodeFeatureView feats = NodeFeatureView::of(g);
  NodeMemory mem(g.num_nodes(), model.config().memory_dim);
  replay_memory(model, g, mem, cfg.contrastive.batch_size);

  std::map<std::string, std::int64_t> hash_to_edge;
  for (std::size_t i = 0; i < ds.txs.size(); ++i)
    hash_to_edge[ds.txs[i].tx_hash] = static_cast<std::int64_t>(i);

  // Batch all edge targets into one representation pass.
  std::vector<std::int64_t> edge_ids;
  for (const auto& t : targets)
    if (t.kind == DetectionTarget::Kind::kTxHash) {
      auto it = hash_to_edge.find(t.id);
      if (it == hash_to_edge.end()) throw UnknownTarget("unknown tx hash: " + t.id);
      edge_ids.push_back(it->second);
    }
  std::map<std::int64_t, std::vector<double>> edge_row_by_id;
  if (!edge_ids.empty()) {
    auto rows = edge_representation_rows(model, g, feats, edge_ids, cfg.concat_features);
    for (std::size_t i = 0; i < edge_ids.size(); ++i)
      edge_row_by_id[edge_ids[i]] = std::move(rows[i]);
  }

  for (const auto& target : targets) {
    DetectionResult res;
    res.id = target.id;
    std::vector<double> row;
    const GbdtModel* booster = nullptr;
    if (target.kind == DetectionTarget::Kind::kAddress) {
      auto id = ds.registry.lookup(target.id);
      if (!id) throw UnknownTarget("unknown address: " + target.id);
      double t_latest = 0.0;
      const auto& in = g.in_edges(*id);
      const auto& outi = g.out_edges(*id);
      if (!in.empty()) t_latest = std::max(t_latest, g.edge(in.back()).t);
      if (!outi.empty()) t_latest = std::max(t_latest, g.edge(outi.back()).t);
      row = node_representation_rows(model, g, feats, mem, {*id}, t_latest + 1.0,
                                     cfg.concat_features)[0];
      booster = gbdt_node_model;
      if (!booster) throw ConfigError("node classifier required for address targets");
    } else {
      row = edge_row_by_id.at(hash_to_edge.at(target.id));
      booster = gbdt_edge_model;
      if (!booster) throw ConfigError("edge classifier required for tx targets");
    }
    auto preds = predict(*booster, {row});
    res.score = preds[0].score;
    res.label = preds[0].label;
    out.push_back(std::move(res));
  }
  return out;
}

std::string ExperimentReport::to_json() const {
  auto report_json = [](const MetricsReport& rep) {
    json folds = json::array();
    for (const auto& f : rep.folds) {
      json fj;
      fj["tp"] = f.tp;
      fj["fp"] = f.fp;
      fj["tn"] = f.tn;
      fj["fn"] = f.fn;
      fj["precision"] = f.precision;
      fj["recall"] = f.recall;
      fj["fpr"] = f.fpr;
      fj["fnr"] = f.fnr;
      fj["f1"] = f.f1;
      fj["bac"] = f.bac;
      if (f.auc)
        fj["auc"] = *f.auc;
      else
        fj["auc"] = nullptr;
      folds.push_back(fj);
    }
    json agg;
    for (const auto& name : MetricsReport::metric_names()) {
      auto a = rep.aggregate(name);
      agg[name] = {{"mean", a.mean}, {"std", a.stddev}};
    }
    return json{{"folds", folds}, {"aggregate", agg}};
  };
  json j;
  j["node_task"] = report_json(node_task);
  j["edge_task"] = report_json(edge_task);
  return j.dump(2);
}

std::string ExperimentReport::scores_to_csv() const {
  std::ostringstream os;
  os << "task,fold,id,score,label\n";
  os.precision(17);
  for (const auto& s : scores)
    os << s.task << ',' << s.fold << ',' << s.id << ',' << s.score << ',' << s.label << "\n";
  return os.str();
}

}  // namespace phishtgl
