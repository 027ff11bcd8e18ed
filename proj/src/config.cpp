#include "cogsense/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"

namespace cogsense {

using nlohmann::json;

namespace {

json to_json(const PipelineConfig& c) {
  const auto& f = c.features;
  const auto& loc = f.location;
  return json{
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"ingest",
       {{"coverage_window_start_hour", f.coverage.window_start_hour},
        {"coverage_window_end_hour", f.coverage.window_end_hour},
        {"min_valid_hours", f.coverage.min_valid_hours}}},
      {"features",
       {{"walk_gap_s", f.walk_gap_s},
        {"min_walk_duration_s", f.min_walk_duration_s},
        {"min_walk_steps_exclusive", f.min_walk_steps_exclusive},
        {"max_accuracy_m", loc.max_accuracy_m},
        {"max_speed_kmh", loc.max_speed_mps * 3.6},
        {"stationary_radius_m", loc.stationary_radius_m},
        {"stationary_window_min", loc.stationary_window_s / 60.0},
        {"dwell_cap_min", loc.dwell_cap_s / 60.0},
        {"variance_epsilon", loc.variance_epsilon},
        {"dbscan_eps_m", loc.dbscan_eps_m},
        {"dbscan_min_points", loc.dbscan_min_points},
        {"usage_category_map", c.usage_category_map}}},
      {"sequence",
       {{"window_days", c.window.length_days},
        {"min_valid_days", c.window.min_valid_days},
        {"min_sequences", c.window.min_windows_per_participant}}},
      {"augment",
       {{"k", c.augment.synthetic_per_sample},
        {"neighbors", c.augment.neighbors},
        {"tau_percentile", c.augment.tau_percentile}}},
      {"personalization",
       {{"enabled", c.personalization.enabled},
        {"batch_softmax", c.personalization.batch_softmax},
        {"clamp", c.personalization.clamp}}},
      {"model",
       {{"hidden", c.model.hidden},
        {"dense", c.model.dense},
        {"dropout", c.model.dropout},
        {"learning_rate", c.model.learning_rate},
        {"batch_size", c.model.batch_size},
        {"epochs_base", c.model.epochs},
        {"epochs_augmented", c.epochs_augmented},
        {"label_smoothing", c.model.label_smoothing},
        {"adam_beta1", c.model.adam.beta1},
        {"adam_beta2", c.model.adam.beta2},
        {"adam_epsilon", c.model.adam.epsilon}}},
      {"baseline",
       {{"l2", c.baseline.l2},
        {"max_iterations", c.baseline.max_iterations},
        {"tolerance", c.baseline.tolerance},
        {"stop_on_separation", c.baseline.stop_on_separation},
        {"balanced", c.baseline.balanced}}},
      {"evaluate", {{"seeds", c.evaluate.seeds}, {"pca_variance", c.evaluate.pca_variance}}},
  };
}

PipelineConfig from_json(const json& j) {
  PipelineConfig c;
  auto& f = c.features;
  auto& loc = f.location;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.jobs = j.at("jobs").get<std::size_t>();
  const json& in = j.at("ingest");
  f.coverage.window_start_hour = in.at("coverage_window_start_hour").get<double>();
  f.coverage.window_end_hour = in.at("coverage_window_end_hour").get<double>();
  f.coverage.min_valid_hours = in.at("min_valid_hours").get<double>();
  const json& fe = j.at("features");
  f.walk_gap_s = fe.at("walk_gap_s").get<double>();
  f.min_walk_duration_s = fe.at("min_walk_duration_s").get<double>();
  f.min_walk_steps_exclusive = fe.at("min_walk_steps_exclusive").get<std::int64_t>();
  loc.max_accuracy_m = fe.at("max_accuracy_m").get<double>();
  loc.max_speed_mps = fe.at("max_speed_kmh").get<double>() / 3.6;
  loc.stationary_radius_m = fe.at("stationary_radius_m").get<double>();
  loc.stationary_window_s = fe.at("stationary_window_min").get<double>() * 60.0;
  loc.dwell_cap_s = fe.at("dwell_cap_min").get<double>() * 60.0;
  loc.variance_epsilon = fe.at("variance_epsilon").get<double>();
  loc.dbscan_eps_m = fe.at("dbscan_eps_m").get<double>();
  loc.dbscan_min_points = fe.at("dbscan_min_points").get<std::size_t>();
  c.usage_category_map = fe.at("usage_category_map").get<std::string>();
  if (!c.usage_category_map.empty()) f.usage_map = UsageCategoryMap::from_csv(c.usage_category_map);
  const json& sq = j.at("sequence");
  c.window.length_days = sq.at("window_days").get<std::size_t>();
  c.window.min_valid_days = sq.at("min_valid_days").get<std::size_t>();
  c.window.min_windows_per_participant = sq.at("min_sequences").get<std::size_t>();
  const json& au = j.at("augment");
  c.augment.synthetic_per_sample = au.at("k").get<std::size_t>();
  c.augment.neighbors = au.at("neighbors").get<std::size_t>();
  c.augment.tau_percentile = au.at("tau_percentile").get<double>();
  const json& pe = j.at("personalization");
  c.personalization.enabled = pe.at("enabled").get<bool>();
  c.personalization.batch_softmax = pe.at("batch_softmax").get<bool>();
  c.personalization.clamp = pe.at("clamp").get<double>();
  c.model.batch_softmax = c.personalization.batch_softmax;
  const json& mo = j.at("model");
  c.model.hidden = mo.at("hidden").get<std::size_t>();
  c.model.dense = mo.at("dense").get<std::size_t>();
  c.model.dropout = mo.at("dropout").get<double>();
  c.model.learning_rate = mo.at("learning_rate").get<double>();
  c.model.batch_size = mo.at("batch_size").get<std::size_t>();
  c.model.epochs = mo.at("epochs_base").get<std::size_t>();
  c.epochs_augmented = mo.at("epochs_augmented").get<std::size_t>();
  c.model.label_smoothing = mo.at("label_smoothing").get<double>();
  c.model.adam.beta1 = mo.at("adam_beta1").get<double>();
  c.model.adam.beta2 = mo.at("adam_beta2").get<double>();
  c.model.adam.epsilon = mo.at("adam_epsilon").get<double>();
  const json& ba = j.at("baseline");
  c.baseline.l2 = ba.at("l2").get<double>();
  c.baseline.max_iterations = ba.at("max_iterations").get<std::size_t>();
  c.baseline.tolerance = ba.at("tolerance").get<double>();
  c.baseline.stop_on_separation = ba.at("stop_on_separation").get<bool>();
  c.baseline.balanced = ba.at("balanced").get<bool>();
  const json& ev = j.at("evaluate");
  c.evaluate.seeds = ev.at("seeds").get<std::vector<std::uint64_t>>();
  c.evaluate.pca_variance = ev.at("pca_variance").get<double>();

  if (c.window.min_valid_days > c.window.length_days) {
    throw Error("sequence.min_valid_days exceeds sequence.window_days");
  }
  if (c.evaluate.seeds.empty()) throw Error("evaluate.seeds must not be empty");
  if (c.jobs == 0) throw Error("jobs must be at least 1");
  return c;
}

}  // namespace

PipelineConfig config_from_json_text(const std::string& text) {
  json merged = to_json(PipelineConfig{});
  try {
    detail::merge_checked(merged, json::parse(text), "");
    return from_json(merged);
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json_text(buf.str());
  } catch (const Error& e) {
    throw Error(file.string() + ": " + e.what());
  }
}

std::string config_to_json_text(const PipelineConfig& config) { return to_json(config).dump(2); }

void apply_environment(PipelineConfig& config) {
  if (const char* s = std::getenv("COGSENSE_SEED")) {
    const std::string_view text(s);
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
      throw Error(std::string("COGSENSE_SEED is not an unsigned integer: '") + s + "'");
    }
    config.seed = seed;
  }
}

}  // namespace cogsense
