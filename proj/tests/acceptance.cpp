// Acceptance suite: runs every criterion end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "feature_oracles.hpp"
#include "grad_check_util.hpp"
#include "phishtgl/contrastive.hpp"
#include "phishtgl/encoder.hpp"
#include "phishtgl/features.hpp"
#include "phishtgl/fundflow.hpp"
#include "phishtgl/pipeline.hpp"

using namespace phishtgl;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

using Criterion = std::function<CriterionResult()>;

// ---------------------------------------------------------------------------
// helpers

struct RandomGraphSpec {
  std::int64_t nodes;
  std::size_t edges;
  std::uint64_t seed;
};

struct RandomGraph {
  Htamg graph;
  std::vector<oracles::EdgeTriple> triples;
};

// Random typed multigraph with mixed account kinds and transaction types.
RandomGraph random_graph(const RandomGraphSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::int64_t> node(0, spec.nodes - 1);
  std::uniform_real_distribution<double> value(0.5, 50.0);
  std::uniform_int_distribution<int> tx_type(0, kNumTxCategories - 1);
  std::uniform_int_distribution<int> token_type(0, kNumTokenStandards - 1);
  std::uniform_int_distribution<int> kind(0, 9);

  std::vector<AccountKind> kinds(spec.nodes);
  for (auto& k : kinds)
    k = kind(rng) < 2 ? AccountKind::kCa : AccountKind::kEoa;

  RandomGraph out;
  std::vector<Transaction> txs;
  for (std::size_t i = 0; i < spec.edges; ++i) {
    std::int64_t a = node(rng), b = node(rng);
    if (a == b) b = (b + 1) % spec.nodes;
    Transaction tx;
    tx.src = a;
    tx.dst = b;
    tx.t = static_cast<double>(i + 1);
    tx.value_raw = value(rng);
    tx.value_z = tx.value_raw / 10.0;
    tx.tx_type_id = tx_type(rng);
    tx.token_type_id = token_type(rng);
    txs.push_back(tx);
    out.triples.push_back({a, b, tx.t, tx.value_raw});
  }
  out.graph = build(txs, kinds);
  return out;
}

void attach_random_features(Htamg& g, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> table(g.num_nodes() * dim);
  for (double& v : table) v = dist(rng);
  g.attach_node_features(std::move(table), dim);
}

// ---------------------------------------------------------------------------
// criterion 1: feature extraction vs brute-force oracles

CriterionResult criterion_features() {
  FeatureConfig cfg;
  std::mt19937_64 meta(101);
  std::uniform_int_distribution<std::int64_t> node_count(4, 30);
  std::uniform_int_distribution<std::size_t> edge_count(4, 120);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    RandomGraphSpec spec{node_count(meta), edge_count(meta), 9000 + trial};
    RandomGraph rg = random_graph(spec);
    const Htamg& g = rg.graph;
    std::int64_t n = g.num_nodes();
    auto got = compute_all_features(g, cfg);

    // direct linear-scan oracles over the raw triples
    std::vector<double> aid(n, 0), aod(n, 0), ivf(n, 0), ovf(n, 0);
    std::vector<double> first(n, 1e18), last(n, -1e18);
    for (const auto& e : rg.triples) {
      aod[e.src] += 1;
      aid[e.dst] += 1;
      ovf[e.src] += e.value;
      ivf[e.dst] += e.value;
      for (std::int64_t v : {e.src, e.dst}) {
        first[v] = std::min(first[v], e.t);
        last[v] = std::max(last[v], e.t);
      }
    }
    auto adj = oracles::adjacency_matrix(n, rg.triples);
    std::vector<std::set<std::int64_t>> nbr(n);
    for (std::int64_t v = 0; v < n; ++v)
      for (std::int64_t u = 0; u < n; ++u)
        if (adj[v][u]) nbr[v].insert(u);

    std::vector<double> cir_num(n, 0);
    for (std::int64_t id = 0; id < g.num_edges(); ++id) {
      const TemporalEdge& e = g.edge(id);
      bool typed = e.tx_type_id == static_cast<int>(TxCategory::kContractInteraction) ||
                   e.tx_type_id == static_cast<int>(TxCategory::kInternalTx);
      if (typed || g.kind(e.dst) == AccountKind::kCa) cir_num[e.src] += 1;
      if (typed || g.kind(e.src) == AccountKind::kCa) cir_num[e.dst] += 1;
    }
    auto pr_ref = oracles::pagerank_dense(n, rg.triples, cfg.pagerank_damping, 400);
    auto scc_ref = oracles::scc_quadruples(adj);
    auto mnr_ref = oracles::eccentricity_fw(adj);
    auto utp_ref = oracles::utp_enumerate(adj, cfg.utp_depth_cap);

    for (std::int64_t v = 0; v < n; ++v) {
      const NodeFeatureVector& f = got.nodes[v];
      double atd = aid[v] + aod[v];
      auto check = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
      check(f.aid, aid[v]);
      check(f.aod, aod[v]);
      check(f.atd, atd);
      check(f.ivf, ivf[v]);
      check(f.ovf, ovf[v]);
      check(f.tve, ivf[v] + ovf[v]);
      double span = atd > 0 ? std::max(last[v] - first[v], cfg.dtd_min_span) : 1.0;
      check(f.dtd, atd > 0 ? atd / span : 0.0);
      check(f.cir, atd > 0 ? cir_num[v] / atd : 0.0);
      double peak = 0;
      for (std::int64_t u : nbr[v]) peak = std::max(peak, aid[u] + aod[u]);
      check(f.pntd, peak);
      check(f.ncd, static_cast<double>(nbr[v].size()));
      check(f.ic, aid[v] / static_cast<double>(n - 1));
      check(f.oc, aod[v] / static_cast<double>(n - 1));
      check(f.dc, (aid[v] + aod[v]) / static_cast<double>(n - 1));
      double andc = 0;
      for (std::int64_t u : nbr[v]) andc += (aid[u] + aod[u]) / static_cast<double>(n - 1);
      if (!nbr[v].empty()) andc /= static_cast<double>(nbr[v].size());
      check(f.andc, andc);
      check(f.pr, pr_ref[v]);
      check(f.scc, scc_ref[v]);
      check(f.mnr, mnr_ref[v]);
      check(f.utp, utp_ref[v]);
    }
  }
  std::ostringstream os;
  os << "max feature deviation " << std::scientific << worst;
  return {worst < 1e-8, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 2: temporal encoding norm

CriterionResult criterion_time_encoding() {
  ModelConfig cfg;
  cfg.layers = 1;
  cfg.heads = 4;
  cfg.memory_dim = 32;
  cfg.feature_dim = 4;
  Model model(cfg, 11);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> t(-1e6, 1e6);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Value enc = model.encode_time(t(rng));
    double norm = 0;
    for (double v : enc.tensor().data) norm += v * v;
    worst = std::max(worst, std::abs(std::sqrt(norm) - 1.0));
  }
  std::ostringstream os;
  os << "max norm deviation " << std::scientific << worst;
  return {worst < 1e-12, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 3: gradient fidelity on a 6-node toy graph

CriterionResult criterion_gradients() {
  ModelConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.memory_dim = 4;
  cfg.neighbor_count = 3;
  cfg.feature_dim = 4;
  Model model(cfg, 21);

  std::vector<Transaction> txs;
  auto ev = [&](std::int64_t s, std::int64_t d, double t) {
    Transaction tx;
    tx.src = s;
    tx.dst = d;
    tx.t = t;
    tx.value_raw = 1.0 + 0.1 * t;
    tx.value_z = 0.3 * t - 0.5;
    tx.tx_type_id = static_cast<int>(t) % kNumTxCategories;
    tx.token_type_id = static_cast<int>(t) % kNumTokenStandards;
    txs.push_back(tx);
  };
  ev(0, 1, 1);
  ev(1, 2, 2);
  ev(3, 1, 3);
  ev(2, 4, 4);
  ev(4, 5, 5);
  ev(0, 2, 6);
  ev(5, 1, 7);
  ev(2, 3, 8);
  Htamg g = build(txs, std::vector<AccountKind>(6, AccountKind::kEoa));
  attach_random_features(g, cfg.feature_dim, 22);

  AugmentationMask m1 = draw_augmentation(g, 0.2, 31);
  AugmentationMask m2 = draw_augmentation(g, 0.2, 32);
  GraphView v1 = make_view(g, m1);
  GraphView v2 = make_view(g, m2);
  NodeFeatureView base_view = NodeFeatureView::of(g);

  // Full forward: two batches with memory updates between them, contrastive
  // loss per batch, plus a term through the edge representations.
  auto forward = [&]() {
    ProjectionHead head = ProjectionHead::from_store(model.store());
    NodeMemory mem1(6, cfg.memory_dim), mem2(6, cfg.memory_dim);
    std::size_t cursor1 = 0, cursor2 = 0;
    std::vector<Value> batch_losses;
    std::size_t batch_size = 4;
    for (std::size_t b = 0; b < 2; ++b) {
      std::size_t i0 = b * batch_size, i1 = std::min<std::size_t>(8, i0 + batch_size);
      std::set<std::int64_t> touched_set;
      for (std::size_t e = i0; e < i1; ++e) {
        touched_set.insert(g.edge(e).src);
        touched_set.insert(g.edge(e).dst);
      }
      std::vector<std::int64_t> touched(touched_set.begin(), touched_set.end());
      double t_q = g.edge(i1 - 1).t + 1e-6;
      model.apply_pending(mem1, false);
      model.apply_pending(mem2, false);
      NodeEmbeddings e1 = model.embed(v1.graph, v1.features, mem1, touched, t_q);
      NodeEmbeddings e2 = model.embed(v2.graph, v2.features, mem2, touched, t_q);
      std::vector<Value> r1, r2;
      for (std::int64_t v : touched) {
        r1.push_back(e1.top(v));
        r2.push_back(e2.top(v));
      }
      batch_losses.push_back(batch_loss(head.project(concat_rows(r1)),
                                        head.project(concat_rows(r2)), 1.0));
      auto feed = [&](const GraphView& view, NodeMemory& mem, std::size_t& cursor) {
        while (cursor < view.edge_origin.size() &&
               view.edge_origin[cursor] < static_cast<std::int64_t>(i1)) {
          const TemporalEdge& ed = view.graph.edge(cursor);
          const double* a = view.graph.edge_attr(cursor);
          model.compute_messages(mem, ed.src, ed.dst, ed.t,
                                 std::vector<double>(a, a + kEdgeAttrDim));
          ++cursor;
        }
      };
      feed(v1, mem1, cursor1);
      feed(v2, mem2, cursor2);
    }
    auto reps = edge_representations(model, g, base_view, {2, 5, 7}, /*keep_graph=*/true);
    std::vector<Value> parts = batch_losses;
    for (auto& [id, rep] : reps) parts.push_back(mean_all(rep));
    return sum_all(concat_rows(parts));
  };

  double err = testutil::model_grad_check(model.store(), forward, 1e-5);
  std::ostringstream os;
  os << "max relative gradient error " << std::scientific << err;
  return {err < 1e-4, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 4: loss correctness vs the naive double loop

CriterionResult criterion_loss() {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(-1, 1);
  double worst = 0;
  bool symmetric = true;
  for (std::size_t n : {1u, 2u, 5u, 17u, 33u, 64u}) {
    Tensor p1(n, 6), p2(n, 6);
    for (double& v : p1.data) v = dist(rng);
    for (double& v : p2.data) v = dist(rng);
    Value a = Value::constant(p1), b = Value::constant(p2);
    double fast = batch_loss(a, b, 1.0).item();
    double swapped = batch_loss(b, a, 1.0).item();
    symmetric = symmetric && std::memcmp(&fast, &swapped, sizeof(double)) == 0;

    // naive Eq.7/Eq.8 with unstabilized exponentials
    auto cosine = [&](const Tensor& x, std::size_t i, const Tensor& y, std::size_t j) {
      double dot = 0, nx = 0, ny = 0;
      for (std::size_t c = 0; c < x.cols; ++c) {
        dot += x.at(i, c) * y.at(j, c);
        nx += x.at(i, c) * x.at(i, c);
        ny += y.at(j, c) * y.at(j, c);
      }
      return dot / std::sqrt(nx * ny);
    };
    auto ell = [&](const Tensor& anc, const Tensor& pos, std::size_t i) {
      double top = std::exp(cosine(anc, i, pos, i));
      double denom = top;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        denom += std::exp(cosine(anc, i, pos, k));
        denom += std::exp(cosine(anc, i, anc, k));
      }
      return std::log(top / denom);
    };
    double naive = 0;
    for (std::size_t i = 0; i < n; ++i) naive += ell(p1, p2, i) + ell(p2, p1, i);
    naive /= 2.0 * n;
    worst = std::max(worst, std::abs(fast - naive));
  }
  std::ostringstream os;
  os << "max |stabilized - naive| = " << worst << ", swap symmetry "
     << (symmetric ? "exact" : "BROKEN");
  return {worst < 1e-10 && symmetric, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 5: causality under future appends

CriterionResult criterion_causality() {
  ModelConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.memory_dim = 8;
  cfg.neighbor_count = 4;
  cfg.feature_dim = 4;
  for (int trial = 0; trial < 20; ++trial) {
    RandomGraphSpec spec{10, 40, 500 + static_cast<std::uint64_t>(trial)};
    RandomGraph rg = random_graph(spec);
    Htamg& g1 = rg.graph;
    attach_random_features(g1, cfg.feature_dim, 600 + trial);

    // future events strictly after the query time
    double t_q = g1.max_time() + 1.0;
    std::vector<Transaction> future;
    for (int i = 0; i < 10; ++i) {
      Transaction tx;
      tx.src = (trial + i) % 10;
      tx.dst = (trial + i + 3) % 10;
      tx.t = t_q + 1.0 + i;
      tx.value_raw = 3.0;
      tx.value_z = 0.2;
      future.push_back(tx);
    }
    // rebuild the same stream plus the future burst
    std::vector<Transaction> all;
    for (std::int64_t id = 0; id < g1.num_edges(); ++id) {
      const TemporalEdge& e = g1.edge(id);
      Transaction tx;
      tx.src = e.src;
      tx.dst = e.dst;
      tx.t = e.t;
      tx.value_raw = e.value_raw;
      tx.value_z = g1.edge_attr(id)[0];
      tx.gas_z = g1.edge_attr(id)[1];
      tx.tx_type_id = e.tx_type_id;
      tx.token_type_id = e.token_type_id;
      all.push_back(tx);
    }
    std::size_t shared_prefix = all.size();
    all.insert(all.end(), future.begin(), future.end());
    Htamg g2 = build(all, g1.kinds());
    {
      std::vector<double> table = g1.node_features();
      g2.attach_node_features(std::move(table), cfg.feature_dim);
    }

    Model model(cfg, 700 + trial);
    NodeFeatureView f1 = NodeFeatureView::of(g1), f2 = NodeFeatureView::of(g2);
    // memory replay over the shared (pre-query) prefix only: a causal system
    // asked at t_q has ingested nothing after it
    NodeMemory mem1(g1.num_nodes(), cfg.memory_dim);
    replay_memory(model, g1, mem1, 8);
    NodeMemory mem2b(g2.num_nodes(), cfg.memory_dim);
    for (std::size_t id = 0; id < shared_prefix; ++id) {
      const TemporalEdge& e = g2.edge(static_cast<std::int64_t>(id));
      if (id % 8 == 0) model.apply_pending(mem2b, true);
      const double* a = g2.edge_attr(static_cast<std::int64_t>(id));
      model.compute_messages(mem2b, e.src, e.dst, e.t,
                             std::vector<double>(a, a + kEdgeAttrDim));
    }
    model.apply_pending(mem2b, true);

    NoGradGuard guard;
    std::vector<std::int64_t> all_nodes(g1.num_nodes());
    for (std::int64_t v = 0; v < g1.num_nodes(); ++v) all_nodes[v] = v;
    NodeEmbeddings e1 = model.embed(g1, f1, mem1, all_nodes, t_q);
    NodeEmbeddings e2 = model.embed(g2, f2, mem2b, all_nodes, t_q);
    for (std::int64_t v = 0; v < g1.num_nodes(); ++v)
      if (e1.top(v).tensor().data != e2.top(v).tensor().data)
        return {false, "node embedding changed by future events (trial " +
                           std::to_string(trial) + ")"};

    std::vector<std::int64_t> wanted;
    for (std::int64_t id = 0; id < g1.num_edges(); id += 7) wanted.push_back(id);
    auto r1 = edge_representations(model, g1, f1, wanted);
    auto r2 = edge_representations(model, g2, f2, wanted);
    for (std::int64_t id : wanted)
      if (r1.at(id).tensor().data != r2.at(id).tensor().data)
        return {false, "edge representation changed by future events"};
  }
  return {true, "bitwise identical on 20 random graphs"};
}

// ---------------------------------------------------------------------------
// criterion 6: contrastive learning signal

CriterionResult criterion_training_signal() {
  SyntheticConfig syn;
  syn.benign_accounts = 35;
  syn.phishing_collectors = 3;
  syn.victims_per_collector = 3;
  syn.laundering_depth = 1;
  syn.benign_tx_per_account = 7.0;
  syn.seed = 61;
  SyntheticData data = gen_synthetic(syn);
  Dataset ds = Dataset::from_raw(data.txs, data.address_labels, data.tx_labels);

  Htamg g = build(ds.txs, ds.registry.kinds());
  FeatureConfig fcfg;
  auto fx = compute_all_features(g, fcfg);
  assemble(g, fx.nodes);

  ModelConfig mcfg;
  mcfg.layers = 2;
  mcfg.heads = 2;
  mcfg.memory_dim = 16;
  mcfg.neighbor_count = 5;
  Model model(mcfg, 62);
  ContrastiveConfig ccfg;
  ccfg.epochs = 30;
  ccfg.batch_size = 256;
  ccfg.learning_rate = 3e-3;
  PretrainResult result = pretrain(g, model, ccfg, 63);
  double first = result.log.front().mean_positive_theta;
  double final = result.log.back().mean_positive_theta;
  std::ostringstream os;
  os << "mean positive theta " << first << " -> " << final << " over 30 epochs ("
     << g.num_nodes() << " nodes)";
  return {final > first, os.str()};
}

// ---------------------------------------------------------------------------
// criteria 7 + 8 + 10 share the synthetic end-to-end run

struct EndToEnd {
  ExperimentReport kfold;
  ExperimentReport chrono;
  Dataset ds;
  PipelineConfig cfg;
};

EndToEnd& end_to_end() {
  static EndToEnd* cached = nullptr;
  if (cached) return *cached;
  cached = new EndToEnd();

  SyntheticConfig syn;
  syn.benign_accounts = 200;
  syn.phishing_collectors = 20;
  syn.victims_per_collector = 8;
  syn.laundering_depth = 2;
  syn.seed = 71;
  SyntheticData data = gen_synthetic(syn);
  cached->ds = Dataset::from_raw(data.txs, data.address_labels, data.tx_labels);

  PipelineConfig cfg;
  cfg.model.layers = 2;
  cfg.model.heads = 4;
  cfg.model.memory_dim = 32;
  cfg.model.neighbor_count = 10;
  cfg.contrastive.epochs = 6;
  cfg.contrastive.batch_size = 256;
  cfg.contrastive.learning_rate = 1e-3;
  cfg.gbdt_node.num_leaves = 31;
  cfg.gbdt_node.num_rounds = 60;
  cfg.gbdt_node.early_stopping_rounds = 15;
  cfg.gbdt_node.min_samples_leaf = 3;
  cfg.gbdt_edge = cfg.gbdt_node;
  cfg.protocol.mode = SplitMode::kKfold;
  cfg.protocol.folds = 10;
  cfg.seed = 72;
  cached->cfg = cfg;

  cached->kfold = run_experiment(cached->ds, cfg);
  PipelineConfig chrono_cfg = cfg;
  chrono_cfg.protocol.mode = SplitMode::kChronologicalUnseen;
  cached->chrono = run_experiment(cached->ds, chrono_cfg);
  return *cached;
}

CriterionResult criterion_end_to_end() {
  EndToEnd& e2e = end_to_end();
  double node_f1 = e2e.kfold.node_task.aggregate("f1").mean;
  double edge_auc = e2e.kfold.edge_task.aggregate("auc").mean;
  double chrono_f1 = e2e.chrono.node_task.aggregate("f1").mean;
  std::ostringstream os;
  os << "kfold node F1 " << node_f1 << " (>=0.90), edge AUC " << edge_auc
     << " (>=0.95), unseen node F1 " << chrono_f1 << " (>=0.80)";
  return {node_f1 >= 0.90 && edge_auc >= 0.95 && chrono_f1 >= 0.80, os.str()};
}

CriterionResult criterion_metric_identities() {
  EndToEnd& e2e = end_to_end();
  for (const MetricsReport* rep :
       {&e2e.kfold.node_task, &e2e.kfold.edge_task, &e2e.chrono.node_task}) {
    for (const MetricsEntry& f : rep->folds) {
      double f1 = (f.precision + f.recall) == 0.0
                      ? 0.0
                      : 2.0 * f.precision * f.recall / (f.precision + f.recall);
      if (f.f1 != f1) return {false, "f1 identity broken"};
      if (f.fnr != 1.0 - f.recall) return {false, "fnr identity broken"};
      double tpr = f.tp + f.fn == 0 ? 0.0 : double(f.tp) / (f.tp + f.fn);
      double tnr = f.tn + f.fp == 0 ? 0.0 : double(f.tn) / (f.tn + f.fp);
      if (f.bac != (tpr + tnr) / 2.0) return {false, "bac identity broken"};
    }
  }
  // AUC vs the O(n^2) pairwise oracle on 200-point sets
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> dist(0, 1);
  std::uniform_int_distribution<int> coin(0, 1);
  double worst = 0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> scores;
    std::vector<int> labels;
    labels.push_back(1);
    scores.push_back(0.9);
    labels.push_back(0);
    scores.push_back(0.1);
    for (int i = 0; i < 198; ++i) {
      int l = coin(rng);
      labels.push_back(l);
      double s = 0.4 * dist(rng) + 0.3 * l;
      if (i % 9 == 0) s = 0.5;
      scores.push_back(s);
    }
    worst = std::max(worst,
                     std::abs(auc_score(scores, labels) - oracles::auc_pairwise(scores, labels)));
  }
  std::ostringstream os;
  os << "identities exact on every fold; AUC vs pairwise oracle within " << worst;
  return {worst < 1e-12, os.str()};
}

// ---------------------------------------------------------------------------
// criterion 9: fund-flow conservation and termination

CriterionResult criterion_fundflow() {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> val(0.5, 10.0);
  std::uniform_int_distribution<int> pick(0, 19);
  auto transfer = [](const std::string& from, const std::string& to, double v,
                     std::int64_t t) {
    RawTransaction tx;
    tx.tx_hash = from + ">" + to + "@" + std::to_string(t);
    tx.from_addr = from;
    tx.to_addr = to;
    tx.value = v;
    tx.gas_used = 21000;
    tx.timestamp = t;
    tx.tx_category = TxCategory::kEtherTransfer;
    return tx;
  };

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RawTransaction> ledger;
    ledger.push_back(transfer("victim", "n0", 30 + val(rng), 1));
    std::int64_t t = 4;
    int edges = 40 + trial % 50;
    for (int i = 0; i < edges; ++i) {
      int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      ledger.push_back(transfer("n" + std::to_string(a), "n" + std::to_string(b), val(rng),
                                t += 3));
    }
    FundFlowTrace res = trace(ledger, "n0", EntityLabels{}, TraceConfig{});
    conservation_check(res);  // throws when violated
  }

  // 12-hop chain halts with DepthLimit at depth 10
  std::vector<RawTransaction> chain = {transfer("v", "h0", 100, 10)};
  for (int hop = 0; hop < 12; ++hop)
    chain.push_back(
        transfer("h" + std::to_string(hop), "h" + std::to_string(hop + 1), 100, 20 + hop));
  FundFlowTrace deep = trace(chain, "h0", EntityLabels{}, TraceConfig{});
  const TraceHop* leaf = &deep.root_hop;
  while (!leaf->children.empty()) leaf = &leaf->children[0];
  if (leaf->depth != 10 || !leaf->reason || *leaf->reason != TerminationReason::kDepthLimit)
    return {false, "12-hop chain did not stop at depth 10"};

  // an over-10k-transaction hub halts with SuperNode
  std::vector<RawTransaction> busy = {transfer("v", "root", 50, 1),
                                      transfer("root", "hub", 50, 2)};
  for (int i = 0; i < 10001; ++i)
    busy.push_back(transfer("hub", "peer" + std::to_string(i % 7), 0.01,
                            10 + static_cast<std::int64_t>(i)));
  FundFlowTrace hub = trace(busy, "root", EntityLabels{}, TraceConfig{});
  if (hub.root_hop.children.size() != 1 ||
      !hub.root_hop.children[0].reason ||
      *hub.root_hop.children[0].reason != TerminationReason::kSuperNode)
    return {false, "10k-transaction hub did not stop as a super node"};

  return {true, "100 random ledgers conserve taint; depth and super-node rules fire"};
}

// ---------------------------------------------------------------------------
// criterion 10: determinism

CriterionResult criterion_determinism() {
  SyntheticConfig syn;
  syn.benign_accounts = 50;
  syn.phishing_collectors = 6;
  syn.victims_per_collector = 5;
  syn.laundering_depth = 1;
  syn.seed = 95;
  auto run_once = [&](const std::string& ckpt_path) {
    SyntheticData data = gen_synthetic(syn);
    Dataset ds = Dataset::from_raw(data.txs, data.address_labels, data.tx_labels);
    PipelineConfig cfg;
    cfg.model.layers = 1;
    cfg.model.heads = 2;
    cfg.model.memory_dim = 8;
    cfg.model.neighbor_count = 5;
    cfg.contrastive.epochs = 2;
    cfg.contrastive.learning_rate = 1e-3;
    cfg.gbdt_node.num_leaves = 15;
    cfg.gbdt_node.num_rounds = 25;
    cfg.gbdt_node.early_stopping_rounds = 0;
    cfg.gbdt_node.min_samples_leaf = 2;
    cfg.gbdt_edge = cfg.gbdt_node;
    cfg.protocol.folds = 4;
    cfg.seed = 96;
    ExperimentReport report = run_experiment(ds, cfg);

    Htamg g = build(ds.txs, ds.registry.kinds());
    auto fx = compute_all_features(g, cfg.features);
    assemble(g, fx.nodes);
    Model model(cfg.model, cfg.seed);
    pretrain(g, model, cfg.contrastive, cfg.seed);
    NodeMemory mem(g.num_nodes(), cfg.model.memory_dim);
    replay_memory(model, g, mem, cfg.contrastive.batch_size);
    save_checkpoint(ckpt_path, model, &mem);
    return report.to_json();
  };
  std::string r1 = run_once("/tmp/phishtgl_acc_ckpt1.json");
  std::string r2 = run_once("/tmp/phishtgl_acc_ckpt2.json");
  auto slurp = [](const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool reports_equal = r1 == r2;
  bool ckpts_equal =
      slurp("/tmp/phishtgl_acc_ckpt1.json") == slurp("/tmp/phishtgl_acc_ckpt2.json");
  std::remove("/tmp/phishtgl_acc_ckpt1.json");
  std::remove("/tmp/phishtgl_acc_ckpt2.json");
  std::ostringstream os;
  os << "report " << (reports_equal ? "byte-identical" : "DIFFERS") << ", checkpoint "
     << (ckpts_equal ? "byte-identical" : "DIFFERS");
  return {reports_equal && ckpts_equal, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int number;
    const char* name;
    Criterion fn;
    double budget_seconds;
  };
  std::vector<Entry> entries = {
      {1, "feature extraction matches brute-force oracles", criterion_features, 60},
      {2, "temporal encoding has unit norm", criterion_time_encoding, 30},
      {3, "full forward passes finite-difference checks", criterion_gradients, 30},
      {4, "contrastive loss matches the naive evaluation", criterion_loss, 30},
      {5, "representations are causal under future appends", criterion_causality, 120},
      {6, "pretraining increases positive-pair similarity", criterion_training_signal, 240},
      {7, "synthetic end-to-end detection quality", criterion_end_to_end, 600},
      {8, "metric identities and AUC oracle", criterion_metric_identities, 60},
      {9, "fund-flow conservation and termination", criterion_fundflow, 120},
      {10, "seeded runs replay byte-identically", criterion_determinism, 240},
  };

  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool all_pass = true;
  for (auto& entry : entries) {
    if (only != 0 && entry.number != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = secs <= entry.budget_seconds;
    bool pass = result.pass && in_budget;
    all_pass = all_pass && pass;
    std::printf("[%s] criterion %2d: %s — %s (%.1fs%s)\n", pass ? "PASS" : "FAIL",
                entry.number, entry.name, result.detail.c_str(), secs,
                in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
