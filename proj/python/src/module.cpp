// Python bindings over the pipeline stages. Arrays cross as numpy float64.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>

#include "cogsense/config.hpp"
#include "cogsense/dataset.hpp"
#include "cogsense/experiment.hpp"
#include "cogsense/metrics.hpp"
#include "cogsense/synth.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace cogsense;

namespace {

PipelineConfig config_from(const std::string& json_text) {
  auto cfg = config_from_json_text(json_text);
  apply_environment(cfg);
  return cfg;
}

py::dict metrics_dict(const MetricReport& report) {
  py::dict out;
  for (const auto& row : report.rows) {
    py::dict entry;
    entry["mean"] = row.mean;
    entry["sd"] = row.sd;
    entry["per_seed"] = row.per_seed;
    out[py::str(row.level + "_" + row.metric)] = entry;
  }
  return out;
}

py::list participants_list(const std::vector<ParticipantSeries>& series) {
  const auto width = FeatureRegistry::standard().size();
  py::list out;
  for (const auto& p : series) {
    py::array_t<double> values({p.days.size(), width});
    auto view = values.mutable_unchecked<2>();
    std::vector<std::string> dates;
    for (std::size_t d = 0; d < p.days.size(); ++d) {
      dates.push_back(format_date(p.days[d].date));
      for (std::size_t f = 0; f < width; ++f) view(d, f) = p.days[d].values[f];
    }
    py::dict entry;
    entry["id"] = p.id;
    entry["label"] = p.label;
    entry["age"] = p.demographics.age;
    entry["sex"] = p.demographics.sex == Sex::male ? "male" : "female";
    entry["education"] = p.demographics.education;
    entry["dates"] = dates;
    entry["values"] = values;
    out.append(entry);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_cogsense, m) {
  m.doc() = "Smartphone-sensing cognitive impairment pipeline";

  py::register_exception<Error>(m, "CogsenseError", PyExc_ValueError);

  m.def(
      "auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) { return auc(scores, labels); },
      py::arg("scores"), py::arg("labels"), "ROC AUC with ties counted as one half.");
  m.def(
      "auprc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) { return auprc(scores, labels); },
      py::arg("scores"), py::arg("labels"), "Step-wise average precision.");

  m.def("feature_names", [] {
    std::vector<std::string> names;
    for (const auto& s : FeatureRegistry::standard().specs()) names.push_back(s.name);
    return names;
  });
  m.def("sensing_feature_count", [] { return FeatureRegistry::standard().sensing_count(); });
  m.def("default_config", [] { return config_to_json_text(PipelineConfig{}); },
        "Default pipeline configuration as JSON text.");

  m.def(
      "generate_cohort",
      [](const fs::path& out, const std::string& spec_json, std::size_t jobs) {
        const auto spec = cohort_spec_from_json_text(spec_json);
        py::gil_scoped_release release;
        generate_cohort(spec, out, jobs);
      },
      py::arg("out"), py::arg("spec_json") = "{}", py::arg("jobs") = 1,
      "Writes a synthetic cohort directory from a JSON cohort spec.");

  m.def(
      "featurize",
      [](const fs::path& cohort_dir, const fs::path& out, const std::string& config_json) {
        const auto cfg = config_from(config_json);
        py::gil_scoped_release release;
        const auto participants = load_cohort(cohort_dir, cfg.features.coverage);
        const auto series = featurize_cohort(participants, cfg.features, cfg.jobs);
        write_feature_table(out, series);
        return series.size();
      },
      py::arg("cohort_dir"), py::arg("out"), py::arg("config_json") = "{}",
      "Featurizes a cohort directory into a feature table; returns the participant count.");

  m.def(
      "load_features", [](const fs::path& dir) { return participants_list(read_feature_table(dir)); },
      py::arg("features_dir"), "Per-participant dicts with dates and a days x features array (NaN = missing).");

  m.def(
      "evaluate",
      [](const fs::path& features_dir, const std::string& setting, const std::string& features,
         const std::string& config_json) {
        const auto cfg = config_from(config_json);
        const RunSpec run{parse_setting(setting), parse_feature_set(features)};
        MetricReport report;
        std::vector<FoldResult> folds;
        {
          py::gil_scoped_release release;
          const auto cohort = retain_participants(read_feature_table(features_dir), cfg.window);
          folds = lopo_run(cohort, cfg, run, cfg.evaluate.seeds);
          report = summarize_folds(setting, features, folds);
        }
        py::list preds;
        for (const auto& f : folds) {
          py::dict d;
          d["participant_id"] = f.participant_id;
          d["label"] = f.label;
          d["seed"] = f.seed;
          d["probability"] = f.participant_probability;
          d["sequence_probabilities"] = f.sequence_probabilities;
          preds.append(d);
        }
        py::dict out;
        out["metrics"] = metrics_dict(report);
        out["folds"] = preds;
        return out;
      },
      py::arg("features_dir"), py::arg("setting") = "base", py::arg("features") = "sensing",
      py::arg("config_json") = "{}", "Leave-one-participant-out evaluation of one setting.");

  m.def(
      "routine_embedding",
      [](const fs::path& features_dir, double variance_target) {
        const auto cohort = retain_participants(read_feature_table(features_dir));
        const auto e = routine_embedding(cohort, variance_target);
        std::vector<std::string> dates;
        for (const auto d : e.dates) dates.push_back(format_date(d));
        py::dict out;
        out["participant_ids"] = e.participant_ids;
        out["dates"] = dates;
        out["labels"] = e.labels;
        out["explained"] = e.pca.explained_by_retained();
        out["components"] = e.pca.retained;
        out["separation"] = routine_separation(e);
        return out;
      },
      py::arg("features_dir"), py::arg("variance_target") = 0.95);
}
