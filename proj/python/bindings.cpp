#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "openset/error.hpp"
#include "openset/feature_store.hpp"
#include "openset/io.hpp"
#include "openset/metrics.hpp"
#include "openset/model_bank.hpp"
#include "openset/threshold_search.hpp"

namespace py = pybind11;
using namespace openset;

namespace {

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

template <typename T>
std::vector<T> column(const FeatureDataset& d, T SampleRecord::*field) {
  std::vector<T> out;
  out.reserve(d.records.size());
  for (const auto& r : d.records) out.push_back(r.*field);
  return out;
}

FeatureDataset from_arrays(const Eigen::Ref<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>& X,
                           const std::vector<std::int32_t>& true_labels,
                           const std::vector<std::int32_t>& predicted_labels, std::uint32_t num_classes) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (true_labels.size() != n || predicted_labels.size() != n) {
    throw DataError("features, true_labels and predicted_labels must have the same length");
  }
  FeatureDataset d;
  d.dim = static_cast<std::uint32_t>(X.cols());
  d.num_classes = num_classes;
  d.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = d.records[i];
    r.sample_id = static_cast<std::uint32_t>(i);
    r.true_label = true_labels[i];
    r.predicted_label = predicted_labels[i];
    r.features.assign(X.row(static_cast<Eigen::Index>(i)).data(), X.row(static_cast<Eigen::Index>(i)).data() + d.dim);
  }
  if (const auto v = validate(d); !v.empty()) throw DataError(v.front().field + ": " + v.front().message);
  return d;
}

ScorerConfig make_config(const std::string& model, int components, int trees, int subsample, int neighbors,
                         double em_tolerance, int em_max_iters, int em_restarts, std::uint64_t seed) {
  ScorerConfig c;
  c.kind = parse_scorer_kind(model);
  c.num_components = components;
  c.num_trees = trees;
  c.subsample_size = subsample;
  c.k_neighbors = neighbors;
  c.em_tolerance = em_tolerance;
  c.em_max_iters = em_max_iters;
  c.em_restarts = em_restarts;
  c.rng_seed = seed;
  check(c);
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Per-class generative scorers for open-set recognition";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  py::class_<FeatureDataset>(m, "Dataset")
      .def_readonly("dim", &FeatureDataset::dim)
      .def_readonly("num_classes", &FeatureDataset::num_classes)
      .def("__len__", [](const FeatureDataset& d) { return d.records.size(); })
      .def_property_readonly("features", [](const FeatureDataset& d) { return to_matrix(d); })
      .def_property_readonly("sample_ids", [](const FeatureDataset& d) { return column(d, &SampleRecord::sample_id); })
      .def_property_readonly("true_labels", [](const FeatureDataset& d) { return column(d, &SampleRecord::true_label); })
      .def_property_readonly("predicted_labels",
                             [](const FeatureDataset& d) { return column(d, &SampleRecord::predicted_label); })
      .def_property_readonly("backbone_name", [](const FeatureDataset& d) { return d.manifest.backbone_name; })
      .def_static("from_arrays", &from_arrays, py::arg("features"), py::arg("true_labels"),
                  py::arg("predicted_labels"), py::arg("num_classes"));

  m.def("read_dataset", &read_dataset, py::arg("path"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));

  py::class_<ScorerConfig>(m, "ScorerConfig")
      .def(py::init(&make_config), py::arg("model") = "gmm", py::arg("components") = 8, py::arg("trees") = 100,
           py::arg("subsample") = 256, py::arg("neighbors") = 20, py::arg("em_tolerance") = 1e-4,
           py::arg("em_max_iters") = 200, py::arg("em_restarts") = 3, py::arg("seed") = 42)
      .def_property_readonly("model", [](const ScorerConfig& c) { return std::string(to_string(c.kind)); })
      .def("to_dict", [](const ScorerConfig& c) { return to_python(to_json(c)); });

  py::class_<ScoreRecord>(m, "ScoreRecord")
      .def_readonly("sample_id", &ScoreRecord::sample_id)
      .def_readonly("true_label", &ScoreRecord::true_label)
      .def_readonly("predicted_label", &ScoreRecord::predicted_label)
      .def_readonly("raw_score", &ScoreRecord::raw_score)
      .def_readonly("norm_score", &ScoreRecord::norm_score)
      .def("__repr__", [](const ScoreRecord& r) {
        return "ScoreRecord(sample_id=" + std::to_string(r.sample_id) + ", norm_score=" + format_double(r.norm_score) + ")";
      });

  py::class_<ModelBank>(m, "ModelBank")
      .def_readonly("num_classes", &ModelBank::num_classes)
      .def_readonly("dim", &ModelBank::dim)
      .def_readonly("train_counts", &ModelBank::train_counts)
      .def("score", &score_dataset, py::arg("dataset"), py::call_guard<py::gil_scoped_release>())
      .def("to_json", [](const ModelBank& b) { return to_json(b).dump(); })
      .def("save", &write_bank, py::arg("path"));

  m.def("fit_bank", &fit_bank, py::arg("train"), py::arg("config") = ScorerConfig{},
        py::arg("min_class_samples") = py::none(), py::call_guard<py::gil_scoped_release>());
  m.def("load_bank", &read_bank, py::arg("path"));
  m.def("read_scores", &read_scores_csv, py::arg("path"));
  m.def("write_scores",
        py::overload_cast<const std::vector<ScoreRecord>&, const std::filesystem::path&>(&write_scores_csv),
        py::arg("records"), py::arg("path"));

  m.def(
      "binary_auc",
      [](const std::vector<double>& scores, const std::vector<bool>& is_known) { return binary_auc(scores, is_known); },
      py::arg("scores"), py::arg("is_known"));
  m.def(
      "open_set_f1",
      [](const std::vector<int>& predictions, const std::vector<int>& truths, int num_classes,
         const std::string& averaging) {
        return open_set_f1(predictions, truths, num_classes, parse_f1_averaging(averaging)).average;
      },
      py::arg("predictions"), py::arg("truths"), py::arg("num_classes"), py::arg("averaging") = "macro");

  m.def(
      "grid_search_threshold",
      [](const std::vector<ScoreRecord>& records, int num_classes, int grid_size, const std::string& averaging) {
        const auto g = grid_search_threshold(records, num_classes, grid_size, parse_f1_averaging(averaging));
        return py::dict(py::arg("tau") = g.tau, py::arg("f1") = g.f1, py::arg("grid_points") = g.grid_points);
      },
      py::arg("records"), py::arg("num_classes"), py::arg("grid_size") = kDefaultGridSize,
      py::arg("averaging") = "macro");
  m.def(
      "cross_validate_threshold",
      [](const std::vector<ScoreRecord>& records, int num_classes, int folds, int grid_size, std::uint64_t seed,
         const std::string& averaging) {
        return to_python(to_json(
            cross_validate_threshold(records, num_classes, folds, grid_size, seed, parse_f1_averaging(averaging))));
      },
      py::arg("records"), py::arg("num_classes"), py::arg("folds") = kDefaultFolds,
      py::arg("grid_size") = kDefaultGridSize, py::arg("seed") = 42, py::arg("averaging") = "macro");
  m.def(
      "evaluate",
      [](const std::vector<ScoreRecord>& records, double tau, int num_classes, const std::string& averaging) {
        return to_python(
            to_json(evaluate(records, ThresholdPolicy::global(tau), num_classes, parse_f1_averaging(averaging))));
      },
      py::arg("records"), py::arg("tau"), py::arg("num_classes"), py::arg("averaging") = "macro");
  m.def(
      "classify_open_set",
      [](const std::vector<ScoreRecord>& records, double tau, int num_classes) {
        std::vector<int> labels;
        for (const auto& l : classify_open_set(records, ThresholdPolicy::global(tau), num_classes)) labels.push_back(l.label);
        return labels;
      },
      py::arg("records"), py::arg("tau"), py::arg("num_classes"));
}
