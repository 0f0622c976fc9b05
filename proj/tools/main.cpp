// phishtgl command-line interface: every subcommand is a pure function of
// (inputs, config, seed) and writes its artifacts into --out.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "phishtgl/contrastive.hpp"
#include "phishtgl/encoder.hpp"
#include "phishtgl/features.hpp"
#include "phishtgl/fundflow.hpp"
#include "phishtgl/gbdt.hpp"
#include "phishtgl/htamg.hpp"
#include "phishtgl/ingest.hpp"
#include "phishtgl/pipeline.hpp"
#include "phishtgl/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phishtgl;

namespace {

struct ToolConfig {
  PipelineConfig pipeline;
  TraceConfig trace;
};

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown config key \"" + key + "\" in " + where);
  }
}

void parse_section(const json& j, const std::string& name, ModelConfig& cfg) {
  reject_unknown(j, {"layers", "heads", "memory_dim", "neighbor_count"}, name);
  cfg.layers = j.value("layers", cfg.layers);
  cfg.heads = j.value("heads", cfg.heads);
  cfg.memory_dim = j.value("memory_dim", cfg.memory_dim);
  cfg.neighbor_count = j.value("neighbor_count", cfg.neighbor_count);
}

void parse_section(const json& j, const std::string& name, ContrastiveConfig& cfg) {
  reject_unknown(j, {"temperature", "batch_size", "learning_rate", "epochs", "p"}, name);
  cfg.temperature = j.value("temperature", cfg.temperature);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.p = j.value("p", cfg.p);
}

void parse_section(const json& j, const std::string& name, GbdtConfig& cfg) {
  reject_unknown(j,
                 {"num_leaves", "learning_rate", "feature_fraction", "num_rounds",
                  "min_samples_leaf", "lambda_l2", "early_stopping_rounds"},
                 name);
  cfg.num_leaves = j.value("num_leaves", cfg.num_leaves);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.feature_fraction = j.value("feature_fraction", cfg.feature_fraction);
  cfg.num_rounds = j.value("num_rounds", cfg.num_rounds);
  cfg.min_samples_leaf = j.value("min_samples_leaf", cfg.min_samples_leaf);
  cfg.lambda_l2 = j.value("lambda_l2", cfg.lambda_l2);
  cfg.early_stopping_rounds = j.value("early_stopping_rounds", cfg.early_stopping_rounds);
}

void parse_section(const json& j, const std::string& name, FeatureConfig& cfg) {
  reject_unknown(j,
                 {"pagerank_damping", "pagerank_tol", "pagerank_max_iter", "utp_depth_cap",
                  "dtd_min_span"},
                 name);
  cfg.pagerank_damping = j.value("pagerank_damping", cfg.pagerank_damping);
  cfg.pagerank_tol = j.value("pagerank_tol", cfg.pagerank_tol);
  cfg.pagerank_max_iter = j.value("pagerank_max_iter", cfg.pagerank_max_iter);
  cfg.utp_depth_cap = j.value("utp_depth_cap", cfg.utp_depth_cap);
  cfg.dtd_min_span = j.value("dtd_min_span", cfg.dtd_min_span);
}

void parse_section(const json& j, const std::string& name, EvalProtocol& cfg) {
  reject_unknown(j, {"mode", "train_fraction", "folds", "resample_ratio"}, name);
  if (j.contains("mode")) cfg.mode = split_mode_from_string(j["mode"].get<std::string>());
  cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
  cfg.folds = j.value("folds", cfg.folds);
  cfg.resample_ratio = j.value("resample_ratio", cfg.resample_ratio);
}

void parse_section(const json& j, const std::string& name, TraceConfig& cfg) {
  reject_unknown(
      j, {"max_depth", "super_node_tx_threshold", "inactivity_days", "min_value_threshold"},
      name);
  cfg.max_depth = j.value("max_depth", cfg.max_depth);
  cfg.super_node_tx_threshold =
      j.value("super_node_tx_threshold", cfg.super_node_tx_threshold);
  cfg.inactivity_days = j.value("inactivity_days", cfg.inactivity_days);
  cfg.min_value_threshold = j.value("min_value_threshold", cfg.min_value_threshold);
}

ToolConfig load_config(const std::string& path) {
  ToolConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j = json::parse(in);
  reject_unknown(j,
                 {"seed", "concat_features", "model", "contrastive", "gbdt_node",
                  "gbdt_edge", "features", "protocol", "trace"},
                 "config root");
  cfg.pipeline.seed = j.value("seed", cfg.pipeline.seed);
  cfg.pipeline.concat_features = j.value("concat_features", cfg.pipeline.concat_features);
  if (j.contains("model")) parse_section(j["model"], "model", cfg.pipeline.model);
  if (j.contains("contrastive"))
    parse_section(j["contrastive"], "contrastive", cfg.pipeline.contrastive);
  if (j.contains("gbdt_node")) parse_section(j["gbdt_node"], "gbdt_node", cfg.pipeline.gbdt_node);
  if (j.contains("gbdt_edge")) parse_section(j["gbdt_edge"], "gbdt_edge", cfg.pipeline.gbdt_edge);
  if (j.contains("features")) parse_section(j["features"], "features", cfg.pipeline.features);
  if (j.contains("protocol")) parse_section(j["protocol"], "protocol", cfg.pipeline.protocol);
  if (j.contains("trace")) parse_section(j["trace"], "trace", cfg.trace);
  return cfg;
}

json echo_config(const ToolConfig& cfg) {
  json j;
  j["seed"] = cfg.pipeline.seed;
  j["concat_features"] = cfg.pipeline.concat_features;
  j["model"] = {{"layers", cfg.pipeline.model.layers},
                {"heads", cfg.pipeline.model.heads},
                {"memory_dim", cfg.pipeline.model.memory_dim},
                {"neighbor_count", cfg.pipeline.model.neighbor_count}};
  j["contrastive"] = {{"temperature", cfg.pipeline.contrastive.temperature},
                      {"batch_size", cfg.pipeline.contrastive.batch_size},
                      {"learning_rate", cfg.pipeline.contrastive.learning_rate},
                      {"epochs", cfg.pipeline.contrastive.epochs},
                      {"p", cfg.pipeline.contrastive.p}};
  auto gbdt_json = [](const GbdtConfig& g) {
    return json{{"num_leaves", g.num_leaves},
                {"learning_rate", g.learning_rate},
                {"feature_fraction", g.feature_fraction},
                {"num_rounds", g.num_rounds},
                {"min_samples_leaf", g.min_samples_leaf},
                {"lambda_l2", g.lambda_l2},
                {"early_stopping_rounds", g.early_stopping_rounds}};
  };
  j["gbdt_node"] = gbdt_json(cfg.pipeline.gbdt_node);
  j["gbdt_edge"] = gbdt_json(cfg.pipeline.gbdt_edge);
  j["features"] = {{"pagerank_damping", cfg.pipeline.features.pagerank_damping},
                   {"pagerank_tol", cfg.pipeline.features.pagerank_tol},
                   {"pagerank_max_iter", cfg.pipeline.features.pagerank_max_iter},
                   {"utp_depth_cap", cfg.pipeline.features.utp_depth_cap},
                   {"dtd_min_span", cfg.pipeline.features.dtd_min_span}};
  j["protocol"] = {{"mode", to_string(cfg.pipeline.protocol.mode)},
                   {"train_fraction", cfg.pipeline.protocol.train_fraction},
                   {"folds", cfg.pipeline.protocol.folds},
                   {"resample_ratio", cfg.pipeline.protocol.resample_ratio}};
  j["trace"] = {{"max_depth", cfg.trace.max_depth},
                {"super_node_tx_threshold", cfg.trace.super_node_tx_threshold},
                {"inactivity_days", cfg.trace.inactivity_days},
                {"min_value_threshold", cfg.trace.min_value_threshold}};
  return j;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

fs::path prepare_out(const std::string& out, const ToolConfig& cfg) {
  fs::create_directories(out);
  write_file(fs::path(out) / "config_echo.json", echo_config(cfg).dump(2) + "\n");
  return out;
}

LogFormat format_of(const std::string& s) {
  if (s == "jsonl") return LogFormat::kJsonl;
  if (s == "csv") return LogFormat::kCsv;
  throw ConfigError("format must be jsonl or csv");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// Embedding CSVs: first column is the item id (address or tx hash).
void write_embedding_csv(const fs::path& path, const std::vector<std::string>& ids,
                         const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "id";
  if (!rows.empty())
    for (std::size_t j = 0; j < rows[0].size(); ++j) out << ",e" << j;
  out << "\n";
  out.precision(17);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (double v : rows[i]) out << ',' << v;
    out << "\n";
  }
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_embedding_csv(
    const std::string& path) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  bool header = true;
  for (const auto& line : read_lines(path)) {
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    ids.push_back(cell);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return {ids, rows};
}

int error_exit_code(const Error& e) {
  static const std::map<std::string, int> codes = {
      {"config_error", 10}, {"io_error", 11},          {"schema_error", 12},
      {"empty_input", 13},  {"unsorted_input", 14},    {"time_regression", 15},
      {"node_out_of_range", 16}, {"too_few_nodes", 17}, {"shape_error", 18},
      {"shape_mismatch", 18},    {"numerical_error", 19}, {"graph_error", 20},
      {"empty_buffer", 21},      {"single_class_error", 22}, {"empty_class", 23},
      {"insufficient_data", 24}, {"unknown_target", 25}, {"unknown_root", 26},
      {"conservation_violation", 27}};
  auto it = codes.find(e.code());
  return it == codes.end() ? 1 : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"temporal graph contrastive learning pipeline for blockchain phishing "
               "detection"};
  app.require_subcommand(1);

  std::string config_path, out_dir, input, format = "jsonl";
  std::optional<std::uint64_t> seed_flag;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--seed", seed_flag, "override the config seed");
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse, filter and normalize a raw log");
  std::string stats_path, registry_path;
  ingest->add_option("--input", input, "raw transaction log")->required();
  ingest->add_option("--format", format, "jsonl or csv");
  ingest->add_option("--stats", stats_path, "frozen normalization stats (inference)");
  ingest->add_option("--registry", registry_path, "existing registry to extend");
  add_common(ingest);

  // build-graph
  auto* buildg = app.add_subcommand("build-graph", "build the temporal multigraph");
  std::string tx_path, reg_path;
  buildg->add_option("--transactions", tx_path, "normalized transactions csv")->required();
  buildg->add_option("--registry", reg_path, "registry csv")->required();
  add_common(buildg);

  // extract-features
  auto* extract = app.add_subcommand("extract-features", "compute the 18 node features");
  std::string graph_path, feat_stats_path;
  extract->add_option("--graph", graph_path, "graph snapshot")->required();
  extract->add_option("--stats", feat_stats_path, "frozen feature stats (inference)");
  add_common(extract);

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "self-supervised contrastive pretraining");
  std::string features_path, feature_stats_in;
  pre->add_option("--graph", graph_path, "graph snapshot")->required();
  pre->add_option("--features", features_path, "features csv")->required();
  pre->add_option("--feature-stats", feature_stats_in, "feature stats json")->required();
  add_common(pre);

  // embed
  auto* emb = app.add_subcommand("embed", "export node/edge representations");
  std::string ckpt_path, edges_path;
  emb->add_option("--graph", graph_path, "graph snapshot")->required();
  emb->add_option("--features", features_path, "features csv")->required();
  emb->add_option("--feature-stats", feature_stats_in, "feature stats json")->required();
  emb->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  emb->add_option("--registry", reg_path, "registry csv")->required();
  emb->add_option("--transactions", tx_path, "normalized transactions csv (edge hashes)");
  emb->add_option("--edges", edges_path, "file with tx hashes to embed (one per line)");
  add_common(emb);

  // train-classifier
  auto* trainc = app.add_subcommand("train-classifier", "fit the boosted-tree head");
  std::string embeddings_path, labels_path, task = "node";
  trainc->add_option("--embeddings", embeddings_path, "embedding csv")->required();
  trainc->add_option("--labels", labels_path, "label csv (address/tx_hash,label)")
      ->required();
  trainc->add_option("--task", task, "node or edge");
  add_common(trainc);

  // detect
  auto* detect = app.add_subcommand("detect", "score targets with trained models");
  std::string node_model_path, edge_model_path, targets_path;
  detect->add_option("--transactions", tx_path, "normalized transactions csv")->required();
  detect->add_option("--registry", reg_path, "registry csv")->required();
  detect->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  detect->add_option("--node-model", node_model_path, "node classifier json");
  detect->add_option("--edge-model", edge_model_path, "edge classifier json");
  detect->add_option("--targets", targets_path, "targets csv: kind,id")->required();
  add_common(detect);

  // eval
  auto* eval = app.add_subcommand("eval", "full protocol run with metrics report");
  std::string node_labels_path, tx_labels_path, protocol_flag;
  bool emit_scores = false;
  eval->add_option("--input", input, "raw transaction log")->required();
  eval->add_option("--format", format, "jsonl or csv");
  eval->add_option("--node-labels", node_labels_path, "address,label csv")->required();
  eval->add_option("--tx-labels", tx_labels_path, "tx_hash,label csv")->required();
  eval->add_option("--protocol", protocol_flag,
                   "random_split | kfold | chronological_unseen");
  eval->add_flag("--scores", emit_scores, "also write per-item scores csv");
  add_common(eval);

  // trace-funds
  auto* tracecmd = app.add_subcommand("trace-funds", "taint-trace stolen funds");
  std::string ledger_path, root_addr, entities_path, token = "ETH";
  tracecmd->add_option("--ledger", ledger_path, "raw transaction log")->required();
  tracecmd->add_option("--format", format, "jsonl or csv");
  tracecmd->add_option("--root", root_addr, "phishing address to trace")->required();
  tracecmd->add_option("--entities", entities_path, "address,category,name csv");
  tracecmd->add_option("--token", token, "token symbol (native = ETH)");
  add_common(tracecmd);

  // gen-synthetic
  auto* gen = app.add_subcommand("gen-synthetic", "generate a labeled synthetic dataset");
  SyntheticConfig syn;
  gen->add_option("--benign", syn.benign_accounts, "benign account count");
  gen->add_option("--collectors", syn.phishing_collectors, "phishing collector count");
  gen->add_option("--victims", syn.victims_per_collector, "victims per collector");
  gen->add_option("--depth", syn.laundering_depth, "laundering chain depth");
  gen->add_option("--burst-window", syn.burst_window_seconds, "burst window seconds");
  gen->add_option("--span", syn.time_span_seconds, "total time span seconds");
  gen->add_option("--benign-rate", syn.benign_tx_per_account, "benign txs per account");
  add_common(gen);

  CLI11_PARSE(app, argc, argv);

  try {
    ToolConfig cfg = load_config(config_path);
    if (seed_flag) cfg.pipeline.seed = *seed_flag;

    if (*ingest) {
      fs::path out = prepare_out(out_dir, cfg);
      auto raw = parse_log(input, format_of(format));
      auto filtered = filter_and_categorize(raw);
      AddressRegistry registry;
      if (!registry_path.empty()) registry = AddressRegistry::load_csv(registry_path);
      std::vector<Transaction> txs;
      NormalizationStats stats;
      double t_min = 0;
      if (!stats_path.empty()) {
        stats = NormalizationStats::load_json(stats_path, &t_min);
        txs = normalize_with_stats(filtered, registry, stats, t_min);
      } else {
        auto res = normalize(filtered, registry);
        txs = std::move(res.txs);
        stats = res.stats;
        t_min = res.t_min;
      }
      save_transactions_csv((out / "transactions.csv").string(), txs);
      registry.save_csv((out / "registry.csv").string());
      stats.save_json((out / "normalization_stats.json").string(), t_min);
      std::cout << "ingested " << txs.size() << " transactions, "
                << registry.size() << " addresses\n";
    } else if (*buildg) {
      fs::path out = prepare_out(out_dir, cfg);
      auto txs = load_transactions_csv(tx_path);
      auto registry = AddressRegistry::load_csv(reg_path);
      Htamg g = build(txs, registry.kinds());
      g.save((out / "graph.htamg").string());
      std::cout << "graph: " << g.num_nodes() << " nodes, " << g.num_edges() << " edges\n";
    } else if (*extract) {
      fs::path out = prepare_out(out_dir, cfg);
      Htamg g = Htamg::load(graph_path);
      auto fx = compute_all_features(g, cfg.pipeline.features);
      std::optional<ColumnStats> frozen;
      if (!feat_stats_path.empty()) frozen = ColumnStats::load_json(feat_stats_path);
      ColumnStats stats = assemble(g, fx.nodes, frozen);
      save_features_csv((out / "features.csv").string(), fx.nodes);
      stats.save_json((out / "feature_stats.json").string());
      if (!fx.pagerank_converged)
        std::cerr << "warning: pagerank did not converge within max_iter\n";
      std::cout << "features for " << fx.nodes.size() << " nodes\n";
    } else if (*pre) {
      fs::path out = prepare_out(out_dir, cfg);
      Htamg g = Htamg::load(graph_path);
      auto feats = load_features_csv(features_path);
      ColumnStats stats = ColumnStats::load_json(feature_stats_in);
      assemble(g, feats, stats);
      Model model(cfg.pipeline.model, cfg.pipeline.seed);
      auto result = pretrain(g, model, cfg.pipeline.contrastive, cfg.pipeline.seed);
      NodeMemory mem(g.num_nodes(), cfg.pipeline.model.memory_dim);
      replay_memory(model, g, mem, cfg.pipeline.contrastive.batch_size);
      save_checkpoint((out / "checkpoint.json").string(), model, &mem);
      std::ofstream log(out / "train_log.jsonl");
      for (const auto& e : result.log) {
        json lj = {{"epoch", e.epoch},
                   {"loss", e.loss},
                   {"mean_positive_theta", e.mean_positive_theta},
                   {"wall_ms", e.wall_ms}};
        log << lj.dump() << "\n";
      }
      std::cout << "pretrained " << result.log.size() << " epochs\n";
    } else if (*emb) {
      fs::path out = prepare_out(out_dir, cfg);
      Htamg g = Htamg::load(graph_path);
      auto feats_raw = load_features_csv(features_path);
      ColumnStats stats = ColumnStats::load_json(feature_stats_in);
      assemble(g, feats_raw, stats);
      auto registry = AddressRegistry::load_csv(reg_path);
      Checkpoint ckpt = load_checkpoint(ckpt_path);
      NodeFeatureView view = NodeFeatureView::of(g);
      NodeMemory mem(g.num_nodes(), ckpt.config.memory_dim);
      if (ckpt.memory && ckpt.memory->size() == static_cast<std::size_t>(g.num_nodes()))
        mem = *ckpt.memory;
      else
        replay_memory(*ckpt.model, g, mem, cfg.pipeline.contrastive.batch_size);

      std::vector<std::int64_t> nodes(g.num_nodes());
      std::iota(nodes.begin(), nodes.end(), 0);
      auto rows = node_representation_rows(*ckpt.model, g, view, mem, nodes,
                                           g.max_time() + 1.0,
                                           cfg.pipeline.concat_features);
      std::vector<std::string> ids;
      for (std::int64_t v : nodes) ids.push_back(registry.address_of(v));
      write_embedding_csv(out / "node_embeddings.csv", ids, rows);

      if (!edges_path.empty()) {
        if (tx_path.empty())
          throw ConfigError("--edges requires --transactions for the hash mapping");
        auto txs = load_transactions_csv(tx_path);
        std::map<std::string, std::int64_t> hash_to_edge;
        for (std::size_t i = 0; i < txs.size(); ++i)
          hash_to_edge[txs[i].tx_hash] = static_cast<std::int64_t>(i);
        std::vector<std::int64_t> edge_ids;
        std::vector<std::string> edge_hashes = read_lines(edges_path);
        for (const auto& h : edge_hashes) {
          auto it = hash_to_edge.find(h);
          if (it == hash_to_edge.end()) throw UnknownTarget("unknown tx hash: " + h);
          edge_ids.push_back(it->second);
        }
        auto erows = edge_representation_rows(*ckpt.model, g, view, edge_ids,
                                              cfg.pipeline.concat_features);
        write_embedding_csv(out / "edge_embeddings.csv", edge_hashes, erows);
      }
      std::cout << "embedded " << nodes.size() << " nodes\n";
    } else if (*trainc) {
      fs::path out = prepare_out(out_dir, cfg);
      auto [ids, rows] = read_embedding_csv(embeddings_path);
      auto labels = load_labels_csv(labels_path);
      std::vector<std::vector<double>> X;
      std::vector<int> y;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        auto it = labels.find(ids[i]);
        if (it == labels.end()) continue;
        X.push_back(rows[i]);
        y.push_back(it->second);
      }
      GbdtConfig gcfg = task == "edge" ? cfg.pipeline.gbdt_edge : cfg.pipeline.gbdt_node;
      gcfg.seed = cfg.pipeline.seed;
      GbdtModel model = fit(X, y, gcfg);
      std::string name = task == "edge" ? "gbdt_edge.json" : "gbdt_node.json";
      model.save_json((out / name).string());
      std::cout << "trained " << task << " classifier on " << X.size() << " rows ("
                << model.trees.size() << " trees)\n";
    } else if (*detect) {
      fs::path out = prepare_out(out_dir, cfg);
      Dataset ds;
      ds.txs = load_transactions_csv(tx_path);
      ds.registry = AddressRegistry::load_csv(reg_path);
      Checkpoint ckpt = load_checkpoint(ckpt_path);
      std::optional<GbdtModel> node_model, edge_model;
      if (!node_model_path.empty()) node_model = GbdtModel::load_json(node_model_path);
      if (!edge_model_path.empty()) edge_model = GbdtModel::load_json(edge_model_path);

      std::vector<DetectionTarget> targets;
      bool header = true;
      for (const auto& line : read_lines(targets_path)) {
        if (header) {
          header = false;
          continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw SchemaError("bad target row: " + line);
        DetectionTarget t;
        std::string kind = line.substr(0, comma);
        t.id = line.substr(comma + 1);
        if (kind == "address")
          t.kind = DetectionTarget::Kind::kAddress;
        else if (kind == "tx")
          t.kind = DetectionTarget::Kind::kTxHash;
        else
          throw SchemaError("target kind must be address or tx: " + kind);
        targets.push_back(std::move(t));
      }
      auto results = run_detection(ds, cfg.pipeline, *ckpt.model,
                                   node_model ? &*node_model : nullptr,
                                   edge_model ? &*edge_model : nullptr, targets);
      std::ostringstream os;
      os << "id,score,label\n";
      os.precision(17);
      for (const auto& r : results) os << r.id << ',' << r.score << ',' << r.label << "\n";
      write_file(out / "predictions.csv", os.str());
      std::cout << "scored " << results.size() << " targets\n";
    } else if (*eval) {
      if (!protocol_flag.empty())
        cfg.pipeline.protocol.mode = split_mode_from_string(protocol_flag);
      fs::path out = prepare_out(out_dir, cfg);
      auto raw = parse_log(input, format_of(format));
      auto ds = Dataset::from_raw(raw, load_labels_csv(node_labels_path),
                                  load_labels_csv(tx_labels_path));
      ExperimentReport report = run_experiment(ds, cfg.pipeline);
      write_file(out / "report.json", report.to_json() + "\n");
      if (emit_scores) write_file(out / "scores.csv", report.scores_to_csv());
      std::cout << report.to_json() << "\n";
    } else if (*tracecmd) {
      fs::path out = prepare_out(out_dir, cfg);
      auto ledger = parse_log(ledger_path, format_of(format));
      EntityLabels labels;
      if (!entities_path.empty()) labels = EntityLabels::load_csv(entities_path);
      FundFlowTrace result = trace(ledger, root_addr, labels, cfg.trace, token);
      conservation_check(result);
      write_file(out / "trace.json", result.to_json() + "\n");
      DestinationReport dest = aggregate({result});
      write_file(out / "destinations.json", dest.to_json() + "\n");
      write_file(out / "destinations.txt", dest.to_table());
      std::cout << dest.to_table();
    } else if (*gen) {
      fs::path out = prepare_out(out_dir, cfg);
      if (seed_flag) syn.seed = *seed_flag;
      SyntheticData data = gen_synthetic(syn);
      write_log((out / "transactions.jsonl").string(), data.txs, LogFormat::kJsonl);
      save_labels_csv((out / "address_labels.csv").string(), data.address_labels,
                      "address");
      save_labels_csv((out / "tx_labels.csv").string(), data.tx_labels, "tx_hash");
      std::cout << "generated " << data.txs.size() << " transactions, "
                << data.address_labels.size() << " addresses\n";
    }
    return 0;
  } catch (const Error& e) {
    json err = {{"error", e.code()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return error_exit_code(e);
  } catch (const std::exception& e) {
    json err = {{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
