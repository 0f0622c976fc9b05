#include "phishtgl/contrastive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

namespace phishtgl {

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

constexpr double kQueryEps = 1e-6;  // query just after the batch window

}  // namespace

AugmentationMask draw_augmentation(const Htamg& g, double p, std::uint64_t seed) {
  if (p < 0.0 || p >= 1.0) throw ConfigError("augmentation p must be in [0,1)");
  AugmentationMask mask;
  mask.p = p;
  mask.seed = seed;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - p);
  std::bernoulli_distribution drop(p);
  mask.edge_keep.resize(g.num_edges());
  for (std::int64_t e = 0; e < g.num_edges(); ++e) mask.edge_keep[e] = keep(rng);
  mask.feature_masked.resize(g.num_nodes());
  for (std::int64_t v = 0; v < g.num_nodes(); ++v) mask.feature_masked[v] = drop(rng);
  return mask;
}

GraphView make_view(const Htamg& base, const AugmentationMask& mask) {
  if (static_cast<std::int64_t>(mask.edge_keep.size()) != base.num_edges() ||
      static_cast<std::int64_t>(mask.feature_masked.size()) != base.num_nodes())
    throw ShapeMismatch("augmentation mask does not fit the graph");

  std::vector<Transaction> kept;
  GraphView view;
  for (std::int64_t e = 0; e < base.num_edges(); ++e) {
    if (!mask.edge_keep[e]) continue;
    const TemporalEdge& ed = base.edge(e);
    Transaction tx;
    tx.src = ed.src;
    tx.dst = ed.dst;
    tx.t = ed.t;
    tx.value_z = base.edge_attr(e)[0];
    tx.gas_z = base.edge_attr(e)[1];
    tx.tx_type_id = ed.tx_type_id;
    tx.token_type_id = ed.token_type_id;
    tx.value_raw = ed.value_raw;
    kept.push_back(std::move(tx));
    view.edge_origin.push_back(e);
  }
  view.graph = build(kept, base.kinds());
  view.features.table = &base.node_features();
  view.features.dim = base.node_feature_dim();
  view.features.masked = mask.feature_masked;
  return view;
}

ProjectionHead ProjectionHead::from_store(const ParamStore& store) {
  return ProjectionHead{store.get("proj.W1"), store.get("proj.b1"), store.get("proj.W2"),
                        store.get("proj.b2")};
}

Value ProjectionHead::project(const Value& z) const {
  Value hidden = tanh_op(add(matmul(z, w1), b1));
  return add(matmul(hidden, w2), b2);
}

Value similarity(const ProjectionHead& head, const Value& z_a, const Value& z_b,
                 bool* zero_flag) {
  Value pa = head.project(z_a);
  Value pb = head.project(z_b);
  if (zero_flag) {
    auto norm = [](const Value& v) {
      double s = 0;
      for (double x : v.tensor().data) s += x * x;
      return std::sqrt(s);
    };
    *zero_flag = norm(pa) < 1e-15 || norm(pb) < 1e-15;
  }
  return cosine_similarity(pa, pb);
}

void ContrastiveConfig::validate() const {
  if (temperature <= 0) throw ConfigError("temperature must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
  if (p < 0 || p >= 1) throw ConfigError("p must be in [0,1)");
}

namespace {

// Row i of the similarity structure: positives_row carries theta(i, k) for the
// positive matrix, anchors_row carries theta(i, k) within the anchor view.
Value pairwise_from_rows(const Value& positives_row, const Value& anchors_row, std::size_t i,
                         double tau) {
  std::size_t n = positives_row.cols();
  Value pos = slice(positives_row, 0, 1, i, i + 1);
  std::vector<Value> denom_parts{positives_row};
  if (n > 1) {
    if (i > 0) denom_parts.push_back(slice(anchors_row, 0, 1, 0, i));
    if (i + 1 < n) denom_parts.push_back(slice(anchors_row, 0, 1, i + 1, n));
  }
  Value denom = denom_parts.size() == 1 ? denom_parts[0] : concat_cols(denom_parts);
  Value lse = logsumexp_rows(scalar_mul(denom, 1.0 / tau));
  return sub(scalar_mul(pos, 1.0 / tau), lse);
}

}  // namespace

Value pairwise_loss(const Value& anchors, const Value& positives, std::size_t i, double tau) {
  if (anchors.rows() != positives.rows() || anchors.cols() != positives.cols())
    throw ShapeError("pairwise_loss: view shapes differ");
  if (i >= anchors.rows()) throw ShapeError("pairwise_loss: index out of range");
  Value an = l2_normalize_rows(anchors);
  Value pn = l2_normalize_rows(positives);
  Value a_i = slice(an, i, i + 1, 0, an.cols());
  Value sims_pos = matmul(a_i, transpose(pn));  // 1 x N
  Value sims_anchor = matmul(a_i, transpose(an));
  return pairwise_from_rows(sims_pos, sims_anchor, i, tau);
}

namespace {

BatchLossStats batch_loss_impl(const Value& proj1, const Value& proj2, double tau) {
  if (proj1.rows() != proj2.rows() || proj1.cols() != proj2.cols())
    throw ShapeError("batch_loss: view shapes differ");
  std::size_t n = proj1.rows();
  if (n == 0) throw ShapeError("batch_loss: empty batch");

  Value p1 = l2_normalize_rows(proj1);
  Value p2 = l2_normalize_rows(proj2);
  Value s12 = matmul(p1, transpose(p2));
  Value s21 = transpose(s12);
  Value s11 = matmul(p1, transpose(p1));
  Value s22 = matmul(p2, transpose(p2));

  // Summing the two directions per node first keeps the view-swap symmetry
  // exact in floating point (addition commutes; only the pairing matters).
  std::vector<Value> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Value row12 = slice(s12, i, i + 1, 0, n);
    Value row11 = slice(s11, i, i + 1, 0, n);
    Value l_12 = pairwise_from_rows(row12, row11, i, tau);
    Value row21 = slice(s21, i, i + 1, 0, n);
    Value row22 = slice(s22, i, i + 1, 0, n);
    Value l_21 = pairwise_from_rows(row21, row22, i, tau);
    terms.push_back(add(l_12, l_21));
  }
  Value total = sum_all(concat_cols(terms));
  BatchLossStats stats;
  stats.loss = scalar_mul(total, 1.0 / (2.0 * static_cast<double>(n)));
  double theta = 0;
  for (std::size_t i = 0; i < n; ++i) theta += s12.tensor().at(i, i);
  stats.mean_positive_theta = theta / static_cast<double>(n);
  return stats;
}

}  // namespace

Value batch_loss(const Value& proj1, const Value& proj2, double tau) {
  return batch_loss_impl(proj1, proj2, tau).loss;
}

BatchLossStats batch_loss_with_stats(const Value& proj1, const Value& proj2, double tau) {
  return batch_loss_impl(proj1, proj2, tau);
}

PretrainResult pretrain(const Htamg& g, Model& model, const ContrastiveConfig& cfg,
                        std::uint64_t seed) {
  cfg.validate();
  if (g.node_feature_dim() != model.config().feature_dim)
    throw ShapeMismatch("graph feature dim does not match model config");

  ProjectionHead head = ProjectionHead::from_store(model.store());
  OptimizerState opt;
  opt.learning_rate = cfg.learning_rate;
  opt.sign = StepSign::kAscent;

  std::size_t num_edges = static_cast<std::size_t>(g.num_edges());
  std::size_t num_batches = num_edges == 0 ? 0 : (num_edges + cfg.batch_size - 1) / cfg.batch_size;

  PretrainResult result;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    GraphView v1 = make_view(g, draw_augmentation(g, cfg.p, mix_seed(seed, epoch, 1)));
    GraphView v2 = make_view(g, draw_augmentation(g, cfg.p, mix_seed(seed, epoch, 2)));
    NodeMemory mem1(g.num_nodes(), model.config().memory_dim);
    NodeMemory mem2(g.num_nodes(), model.config().memory_dim);
    std::size_t cursor1 = 0, cursor2 = 0;

    double loss_sum = 0, theta_sum = 0;
    for (std::size_t b = 0; b < num_batches; ++b) {
      std::size_t i0 = b * cfg.batch_size;
      std::size_t i1 = std::min(num_edges, i0 + cfg.batch_size);

      std::set<std::int64_t> touched_set;
      for (std::size_t e = i0; e < i1; ++e) {
        touched_set.insert(g.edge(static_cast<std::int64_t>(e)).src);
        touched_set.insert(g.edge(static_cast<std::int64_t>(e)).dst);
      }
      std::vector<std::int64_t> touched(touched_set.begin(), touched_set.end());
      double t_query = g.edge(static_cast<std::int64_t>(i1 - 1)).t + kQueryEps;

      model.apply_pending(mem1, /*detach=*/true);
      model.apply_pending(mem2, /*detach=*/true);

      NodeEmbeddings e1 = model.embed(v1.graph, v1.features, mem1, touched, t_query);
      NodeEmbeddings e2 = model.embed(v2.graph, v2.features, mem2, touched, t_query);
      std::vector<Value> rows1, rows2;
      rows1.reserve(touched.size());
      for (std::int64_t v : touched) {
        rows1.push_back(e1.top(v));
        rows2.push_back(e2.top(v));
      }
      Value z1 = concat_rows(rows1);
      Value z2 = concat_rows(rows2);
      BatchLossStats stats =
          batch_loss_with_stats(head.project(z1), head.project(z2), cfg.temperature);
      double loss_value = stats.loss.item();
      if (!std::isfinite(loss_value)) throw NumericalError("contrastive loss diverged");
      loss_sum += loss_value;
      theta_sum += stats.mean_positive_theta;

      backward(stats.loss);
      sga_step(model.store(), opt);
      mem1.detach_all();
      mem2.detach_all();

      // Buffer this window's events per view for the next memory update.
      auto feed = [&](const GraphView& view, NodeMemory& mem, std::size_t& cursor) {
        while (cursor < view.edge_origin.size() &&
               view.edge_origin[cursor] < static_cast<std::int64_t>(i1)) {
          const TemporalEdge& ed = view.graph.edge(static_cast<std::int64_t>(cursor));
          const double* a = view.graph.edge_attr(static_cast<std::int64_t>(cursor));
          model.compute_messages(mem, ed.src, ed.dst, ed.t,
                                 std::vector<double>(a, a + kEdgeAttrDim));
          ++cursor;
        }
      };
      feed(v1, mem1, cursor1);
      feed(v2, mem2, cursor2);
    }

    auto t1 = std::chrono::steady_clock::now();
    EpochLog log;
    log.epoch = epoch;
    log.loss = num_batches ? loss_sum / num_batches : 0.0;
    log.mean_positive_theta = num_batches ? theta_sum / num_batches : 0.0;
    log.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    result.log.push_back(log);
  }
  return result;
}

}  // namespace phishtgl
