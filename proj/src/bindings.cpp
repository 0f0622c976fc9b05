#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phishtgl/contrastive.hpp"
#include "phishtgl/encoder.hpp"
#include "phishtgl/features.hpp"
#include "phishtgl/fundflow.hpp"
#include "phishtgl/gbdt.hpp"
#include "phishtgl/htamg.hpp"
#include "phishtgl/ingest.hpp"
#include "phishtgl/metrics.hpp"
#include "phishtgl/pipeline.hpp"
#include "phishtgl/synthetic.hpp"

namespace py = pybind11;
using namespace phishtgl;

namespace {

Htamg build_graph_py(const Dataset& ds) { return build(ds.txs, ds.registry.kinds()); }

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> extract_features_py(
    const Htamg& g, const FeatureConfig& cfg) {
  auto fx = compute_all_features(g, cfg);
  std::vector<std::string> names(kFeatureNames, kFeatureNames + kNodeFeatureDim);
  std::vector<std::vector<double>> rows;
  rows.reserve(fx.nodes.size());
  for (const auto& f : fx.nodes) rows.push_back(feature_row(f));
  return {names, rows};
}

std::string run_experiment_py(const Dataset& ds, const PipelineConfig& cfg) {
  return run_experiment(ds, cfg).to_json();
}

std::string trace_funds_py(const std::vector<RawTransaction>& ledger,
                           const std::string& root, const EntityLabels& labels,
                           const TraceConfig& cfg, const std::string& token) {
  FundFlowTrace result = trace(ledger, root, labels, cfg, token);
  conservation_check(result);
  return result.to_json();
}

std::string aggregate_traces_py(const std::vector<RawTransaction>& ledger,
                                const std::vector<std::string>& roots,
                                const EntityLabels& labels, const TraceConfig& cfg,
                                const std::string& token) {
  std::vector<FundFlowTrace> traces;
  for (const auto& root : roots) traces.push_back(trace(ledger, root, labels, cfg, token));
  return aggregate(traces).to_json();
}

py::dict metrics_py(const std::vector<double>& scores, const std::vector<int>& labels,
                    double threshold) {
  MetricsEntry m = compute_metrics(scores, labels, threshold);
  py::dict d;
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["tn"] = m.tn;
  d["fn"] = m.fn;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["fpr"] = m.fpr;
  d["fnr"] = m.fnr;
  d["f1"] = m.f1;
  d["bac"] = m.bac;
  if (m.auc)
    d["auc"] = *m.auc;
  else
    d["auc"] = py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "temporal graph contrastive learning for blockchain phishing detection";

  py::register_exception<Error>(m, "PhishtglError");

  py::enum_<TxCategory>(m, "TxCategory")
      .value("ETHER_TRANSFER", TxCategory::kEtherTransfer)
      .value("FT_TRANSFER", TxCategory::kFtTransfer)
      .value("NFT_TRANSFER", TxCategory::kNftTransfer)
      .value("INTERNAL_TX", TxCategory::kInternalTx)
      .value("CONTRACT_INTERACTION", TxCategory::kContractInteraction);

  py::enum_<LogFormat>(m, "LogFormat")
      .value("JSONL", LogFormat::kJsonl)
      .value("CSV", LogFormat::kCsv);

  py::enum_<SplitMode>(m, "SplitMode")
      .value("RANDOM_SPLIT", SplitMode::kRandomSplit)
      .value("KFOLD", SplitMode::kKfold)
      .value("CHRONOLOGICAL_UNSEEN", SplitMode::kChronologicalUnseen);

  py::enum_<EntityCategory>(m, "EntityCategory")
      .value("DEX", EntityCategory::kDex)
      .value("CEX", EntityCategory::kCex)
      .value("MIXER", EntityCategory::kMixer)
      .value("BRIDGE", EntityCategory::kBridge)
      .value("NONE", EntityCategory::kNone);

  py::class_<RawTransaction>(m, "RawTransaction")
      .def(py::init<>())
      .def_readwrite("tx_hash", &RawTransaction::tx_hash)
      .def_readwrite("from_addr", &RawTransaction::from_addr)
      .def_readwrite("to_addr", &RawTransaction::to_addr)
      .def_readwrite("value", &RawTransaction::value)
      .def_readwrite("gas_used", &RawTransaction::gas_used)
      .def_readwrite("timestamp", &RawTransaction::timestamp)
      .def_readwrite("tx_category", &RawTransaction::tx_category);

  py::class_<SyntheticConfig>(m, "SyntheticConfig")
      .def(py::init<>())
      .def_readwrite("benign_accounts", &SyntheticConfig::benign_accounts)
      .def_readwrite("phishing_collectors", &SyntheticConfig::phishing_collectors)
      .def_readwrite("victims_per_collector", &SyntheticConfig::victims_per_collector)
      .def_readwrite("laundering_depth", &SyntheticConfig::laundering_depth)
      .def_readwrite("burst_window_seconds", &SyntheticConfig::burst_window_seconds)
      .def_readwrite("time_span_seconds", &SyntheticConfig::time_span_seconds)
      .def_readwrite("benign_tx_per_account", &SyntheticConfig::benign_tx_per_account)
      .def_readwrite("seed", &SyntheticConfig::seed);

  py::class_<SyntheticData>(m, "SyntheticData")
      .def_readonly("txs", &SyntheticData::txs)
      .def_readonly("address_labels", &SyntheticData::address_labels)
      .def_readonly("tx_labels", &SyntheticData::tx_labels);

  py::class_<Dataset>(m, "Dataset")
      .def_static("from_raw", &Dataset::from_raw, py::arg("raw"),
                  py::arg("address_labels"), py::arg("tx_labels"))
      .def_property_readonly("num_transactions",
                             [](const Dataset& ds) { return ds.txs.size(); })
      .def_property_readonly("num_labeled_nodes",
                             [](const Dataset& ds) { return ds.node_labels.size(); });

  py::class_<NeighborSample>(m, "NeighborSample")
      .def_readonly("nodes", &NeighborSample::nodes)
      .def_readonly("edge_ids", &NeighborSample::edge_ids)
      .def_readonly("times", &NeighborSample::times);

  py::class_<Htamg>(m, "Htamg")
      .def_property_readonly("num_nodes", &Htamg::num_nodes)
      .def_property_readonly("num_edges", &Htamg::num_edges)
      .def(
          "recent_neighbors",
          [](const Htamg& g, std::int64_t v, double t, std::size_t n,
             const std::string& dir) {
            Direction d = dir == "in"    ? Direction::kIn
                          : dir == "out" ? Direction::kOut
                                         : Direction::kBoth;
            return g.recent_neighbors(v, t, n, d);
          },
          py::arg("node"), py::arg("time"), py::arg("count"), py::arg("direction") = "both");

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("layers", &ModelConfig::layers)
      .def_readwrite("heads", &ModelConfig::heads)
      .def_readwrite("memory_dim", &ModelConfig::memory_dim)
      .def_readwrite("neighbor_count", &ModelConfig::neighbor_count);

  py::class_<ContrastiveConfig>(m, "ContrastiveConfig")
      .def(py::init<>())
      .def_readwrite("temperature", &ContrastiveConfig::temperature)
      .def_readwrite("batch_size", &ContrastiveConfig::batch_size)
      .def_readwrite("learning_rate", &ContrastiveConfig::learning_rate)
      .def_readwrite("epochs", &ContrastiveConfig::epochs)
      .def_readwrite("p", &ContrastiveConfig::p);

  py::class_<GbdtConfig>(m, "GbdtConfig")
      .def(py::init<>())
      .def_readwrite("num_leaves", &GbdtConfig::num_leaves)
      .def_readwrite("learning_rate", &GbdtConfig::learning_rate)
      .def_readwrite("feature_fraction", &GbdtConfig::feature_fraction)
      .def_readwrite("num_rounds", &GbdtConfig::num_rounds)
      .def_readwrite("min_samples_leaf", &GbdtConfig::min_samples_leaf)
      .def_readwrite("early_stopping_rounds", &GbdtConfig::early_stopping_rounds)
      .def_readwrite("seed", &GbdtConfig::seed);

  py::class_<FeatureConfig>(m, "FeatureConfig")
      .def(py::init<>())
      .def_readwrite("pagerank_damping", &FeatureConfig::pagerank_damping)
      .def_readwrite("pagerank_tol", &FeatureConfig::pagerank_tol)
      .def_readwrite("pagerank_max_iter", &FeatureConfig::pagerank_max_iter)
      .def_readwrite("utp_depth_cap", &FeatureConfig::utp_depth_cap)
      .def_readwrite("dtd_min_span", &FeatureConfig::dtd_min_span);

  py::class_<EvalProtocol>(m, "EvalProtocol")
      .def(py::init<>())
      .def_readwrite("mode", &EvalProtocol::mode)
      .def_readwrite("train_fraction", &EvalProtocol::train_fraction)
      .def_readwrite("folds", &EvalProtocol::folds)
      .def_readwrite("resample_ratio", &EvalProtocol::resample_ratio)
      .def_readwrite("seed", &EvalProtocol::seed);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("model", &PipelineConfig::model)
      .def_readwrite("contrastive", &PipelineConfig::contrastive)
      .def_readwrite("gbdt_node", &PipelineConfig::gbdt_node)
      .def_readwrite("gbdt_edge", &PipelineConfig::gbdt_edge)
      .def_readwrite("features", &PipelineConfig::features)
      .def_readwrite("protocol", &PipelineConfig::protocol)
      .def_readwrite("concat_features", &PipelineConfig::concat_features)
      .def_readwrite("seed", &PipelineConfig::seed);

  py::class_<TraceConfig>(m, "TraceConfig")
      .def(py::init<>())
      .def_readwrite("max_depth", &TraceConfig::max_depth)
      .def_readwrite("super_node_tx_threshold", &TraceConfig::super_node_tx_threshold)
      .def_readwrite("inactivity_days", &TraceConfig::inactivity_days)
      .def_readwrite("min_value_threshold", &TraceConfig::min_value_threshold);

  py::class_<EntityLabels>(m, "EntityLabels")
      .def(py::init<>())
      .def("add", &EntityLabels::add, py::arg("address"), py::arg("category"),
           py::arg("name"));

  m.def("parse_log_string", &parse_log_string, py::arg("text"), py::arg("format"));
  m.def(
      "parse_jsonl", [](const std::string& text) {
        return parse_log_string(text, LogFormat::kJsonl);
      },
      py::arg("text"));
  m.def(
      "serialize_jsonl",
      [](const std::vector<RawTransaction>& txs) {
        return serialize_log(txs, LogFormat::kJsonl);
      },
      py::arg("txs"));
  m.def("filter_and_categorize", &filter_and_categorize, py::arg("txs"));
  m.def("gen_synthetic", &gen_synthetic, py::arg("config"));
  m.def("build_graph", &build_graph_py, py::arg("dataset"));
  m.def("extract_features", &extract_features_py, py::arg("graph"),
        py::arg("config") = FeatureConfig{});
  m.def("run_experiment_json", &run_experiment_py, py::arg("dataset"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("auc_score", &auc_score, py::arg("scores"), py::arg("labels"));
  m.def("compute_metrics", &metrics_py, py::arg("scores"), py::arg("labels"),
        py::arg("threshold") = 0.5);
  m.def("trace_funds_json", &trace_funds_py, py::arg("ledger"), py::arg("root"),
        py::arg("labels") = EntityLabels{}, py::arg("config") = TraceConfig{},
        py::arg("token") = "ETH");
  m.def("aggregate_traces_json", &aggregate_traces_py, py::arg("ledger"), py::arg("roots"),
        py::arg("labels") = EntityLabels{}, py::arg("config") = TraceConfig{},
        py::arg("token") = "ETH");
}
