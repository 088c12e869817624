#include <algorithm>
#include <fstream>

#include "rppl/experiment.hpp"
#include "rppl/json_io.hpp"
#include "rppl/parallel.hpp"
#include "rppl/rng.hpp"

namespace rppl {

using nlohmann::json;

void TrainingConfig::validate() const {
  if (epochs < 1) throw ConfigError("training.epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("training.learning_rate must be > 0");
  if (early_stop_patience < 0) throw ConfigError("training.early_stop_patience must be >= 0");
}

void SweepConfig::validate() const {
  if (holdouts.empty()) throw ConfigError("sweep.holdouts must not be empty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("sweep.train_fraction must be in (0, 1)");
  if (n_values.empty()) throw ConfigError("sweep.n_values must not be empty");
  for (long n : n_values)
    if (n < 0) throw ConfigError("sweep.n_values must be >= 0");
  if (repeats < 1) throw ConfigError("sweep.repeats must be >= 1");
}

ExperimentConfig::ExperimentConfig() {
  downlink.scenario = LinkScenario::bs_to_ue;
  downlink.tx_height_agl = 17.0;
  downlink.rx_height_agl = 1.5;

  backhaul.scenario = LinkScenario::bs_to_bs;
  backhaul.tx_height_agl = 11.0;
  backhaul.rx_height_agl = 11.0;
  backhaul.bands_mhz = {3455.0};
  backhaul.links_per_region = 500;

  profile.length_samples = 64;
  profile.transverse_samples = 16;
  profile.d_max = 2000.0;

  model.blocks = {{16}, {32}, {64}, {64}};
  model.in_height = profile.length_samples;
  model.in_width = profile.transverse_samples;
}

void ExperimentConfig::validate() const {
  if (regions.empty()) throw ConfigError("regions must not be empty");
  for (const auto& r : regions) {
    if (r.empty()) throw ConfigError("region names must not be empty");
    if (std::count(regions.begin(), regions.end(), r) != 1)
      throw ConfigError("duplicate region '" + r + "'");
  }
  if (std::find(regions.begin(), regions.end(), backhaul_region) != regions.end())
    throw ConfigError("backhaul_region must not be one of the training regions");
  if (region_stat_jitter < 0 || region_stat_jitter >= 1)
    throw ConfigError("region_stat_jitter must be in [0, 1)");
  scene.validate();
  downlink.validate();
  backhaul.validate();
  profile.validate();
  model.validate();
  training.validate();
  sweep.validate();
  for (const auto& h : sweep.holdouts)
    if (std::find(regions.begin(), regions.end(), h) == regions.end())
      throw ConfigError("holdout '" + h + "' is not a configured region");
  for (double f : downlink.bands_mhz)
    if (f < profile.f_min_mhz || f > profile.f_max_mhz)
      throw ConfigError("downlink band outside profile frequency bounds");
  for (double f : backhaul.bands_mhz)
    if (f < profile.f_min_mhz || f > profile.f_max_mhz)
      throw ConfigError("backhaul band outside profile frequency bounds");
  if (model.in_height != profile.length_samples || model.in_width != profile.transverse_samples)
    throw ConfigError("model input size must match the profile (length, transverse) samples");
}

namespace {

json scene_to_json(const SceneParams& s) {
  return json{{"extent_m", s.extent_m},
              {"cell_size_m", s.cell_size_m},
              {"base_height_m", s.base_height_m},
              {"terrain_amplitude_m", s.terrain_amplitude_m},
              {"terrain_correlation_m", s.terrain_correlation_m},
              {"building_density_per_km2", s.building_density_per_km2},
              {"building_height_min_m", s.building_height_min_m},
              {"building_height_max_m", s.building_height_max_m},
              {"building_side_min_m", s.building_side_min_m},
              {"building_side_max_m", s.building_side_max_m},
              {"tree_density_per_km2", s.tree_density_per_km2},
              {"tree_height_min_m", s.tree_height_min_m},
              {"tree_height_max_m", s.tree_height_max_m},
              {"tree_radius_min_m", s.tree_radius_min_m},
              {"tree_radius_max_m", s.tree_radius_max_m}};
}

SceneParams scene_from_json(const json& j, SceneParams d) {
  d.extent_m = j.value("extent_m", d.extent_m);
  d.cell_size_m = j.value("cell_size_m", d.cell_size_m);
  d.base_height_m = j.value("base_height_m", d.base_height_m);
  d.terrain_amplitude_m = j.value("terrain_amplitude_m", d.terrain_amplitude_m);
  d.terrain_correlation_m = j.value("terrain_correlation_m", d.terrain_correlation_m);
  d.building_density_per_km2 = j.value("building_density_per_km2", d.building_density_per_km2);
  d.building_height_min_m = j.value("building_height_min_m", d.building_height_min_m);
  d.building_height_max_m = j.value("building_height_max_m", d.building_height_max_m);
  d.building_side_min_m = j.value("building_side_min_m", d.building_side_min_m);
  d.building_side_max_m = j.value("building_side_max_m", d.building_side_max_m);
  d.tree_density_per_km2 = j.value("tree_density_per_km2", d.tree_density_per_km2);
  d.tree_height_min_m = j.value("tree_height_min_m", d.tree_height_min_m);
  d.tree_height_max_m = j.value("tree_height_max_m", d.tree_height_max_m);
  d.tree_radius_min_m = j.value("tree_radius_min_m", d.tree_radius_min_m);
  d.tree_radius_max_m = j.value("tree_radius_max_m", d.tree_radius_max_m);
  return d;
}

json scenario_to_json(const ScenarioParams& s) {
  return json{{"scenario", to_string(s.scenario)},
              {"tx_height_agl", s.tx_height_agl},
              {"rx_height_agl", s.rx_height_agl},
              {"bands_mhz", s.bands_mhz},
              {"links_per_region", s.links_per_region},
              {"min_length_m", s.min_length_m},
              {"max_length_m", s.max_length_m},
              {"noise_sd_db", s.noise_sd_db},
              {"placement_margin_m", s.placement_margin_m},
              {"oracle_samples", s.oracle_samples}};
}

ScenarioParams scenario_from_json(const json& j, ScenarioParams d) {
  if (j.contains("scenario")) d.scenario = scenario_from_string(j["scenario"].get<std::string>());
  d.tx_height_agl = j.value("tx_height_agl", d.tx_height_agl);
  d.rx_height_agl = j.value("rx_height_agl", d.rx_height_agl);
  d.bands_mhz = j.value("bands_mhz", d.bands_mhz);
  d.links_per_region = j.value("links_per_region", d.links_per_region);
  d.min_length_m = j.value("min_length_m", d.min_length_m);
  d.max_length_m = j.value("max_length_m", d.max_length_m);
  d.noise_sd_db = j.value("noise_sd_db", d.noise_sd_db);
  d.placement_margin_m = j.value("placement_margin_m", d.placement_margin_m);
  d.oracle_samples = j.value("oracle_samples", d.oracle_samples);
  return d;
}

json profile_to_json_obj(const ProfileConfig& p) {
  json j;
  to_json(j, p);
  return j;
}

ProfileConfig profile_from_json_obj(const json& j, ProfileConfig d) {
  d.length_samples = j.value("length_samples", d.length_samples);
  d.transverse_samples = j.value("transverse_samples", d.transverse_samples);
  d.transverse_halfwidth = j.value("transverse_halfwidth", d.transverse_halfwidth);
  d.h_max = j.value("h_max", d.h_max);
  d.d_max = j.value("d_max", d.d_max);
  d.f_min_mhz = j.value("f_min_mhz", d.f_min_mhz);
  d.f_max_mhz = j.value("f_max_mhz", d.f_max_mhz);
  return d;
}

json model_to_json_obj(const nn::ModelConfig& m) {
  json blocks = json::array();
  for (const auto& b : m.blocks)
    blocks.push_back(json{{"out_channels", b.out_channels},
                          {"kernel_h", b.kernel_h},
                          {"kernel_w", b.kernel_w},
                          {"stride", b.stride},
                          {"pad", b.pad}});
  return json{{"blocks", blocks},
              {"dense_hidden", m.dense_hidden},
              {"out_lo_db", m.out_lo_db},
              {"out_hi_db", m.out_hi_db}};
}

nn::ModelConfig model_from_json_obj(const json& j, nn::ModelConfig d) {
  if (j.contains("blocks")) {
    d.blocks.clear();
    for (const auto& bj : j["blocks"]) {
      nn::ConvBlockConfig b;
      b.out_channels = bj.at("out_channels").get<int>();
      b.kernel_h = bj.value("kernel_h", 3);
      b.kernel_w = bj.value("kernel_w", 3);
      b.stride = bj.value("stride", 1);
      b.pad = bj.value("pad", 1);
      d.blocks.push_back(b);
    }
  }
  d.dense_hidden = j.value("dense_hidden", d.dense_hidden);
  d.out_lo_db = j.value("out_lo_db", d.out_lo_db);
  d.out_hi_db = j.value("out_hi_db", d.out_hi_db);
  return d;
}

const char* to_string(SelectionScope s) {
  return s == SelectionScope::uniform_random ? "uniform_random" : "per_band_stratified";
}

SelectionScope selection_scope_from_string(const std::string& s) {
  if (s == "uniform_random") return SelectionScope::uniform_random;
  if (s == "per_band_stratified") return SelectionScope::per_band_stratified;
  throw ConfigError("unknown selection_scope '" + s + "'");
}

size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string closest_key(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  size_t best_dist = static_cast<size_t>(-1);
  for (const auto& c : candidates) {
    const size_t d = levenshtein(key, c);
    if (d < best_dist) {
      best_dist = d;
      best = c;
    }
  }
  return best;
}

void flatten_into(const json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
      out.push_back(path);
      flatten_into(it.value(), path, out);
    }
  }
}

/// Merge user JSON over defaults, rejecting keys the schema does not have.
void merge_config(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object())
    throw ConfigError("config section '" + (prefix.empty() ? "<root>" : prefix) +
                      "' must be a JSON object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) {
      std::vector<std::string> keys = flatten_keys(base);
      for (auto& k : keys)
        if (!prefix.empty()) k = prefix + "." + k;
      const std::string hint = closest_key(path, keys);
      throw ConfigError("unknown config key '" + path + "'" +
                        (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
    }
    if (base[it.key()].is_object() && it.value().is_object()) {
      merge_config(base[it.key()], it.value(), path);
    } else {
      base[it.key()] = it.value();
    }
  }
}

}  // namespace

std::vector<std::string> flatten_keys(const json& j) {
  std::vector<std::string> out;
  flatten_into(j, "", out);
  return out;
}

json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["regions"] = regions;
  j["backhaul_region"] = backhaul_region;
  j["region_stat_jitter"] = region_stat_jitter;
  j["scene"] = scene_to_json(scene);
  j["downlink"] = scenario_to_json(downlink);
  j["backhaul"] = scenario_to_json(backhaul);
  j["profile"] = profile_to_json_obj(profile);
  j["model"] = model_to_json_obj(model);
  j["training"] = json{{"epochs", training.epochs},
                       {"batch_size", training.batch_size},
                       {"learning_rate", training.learning_rate},
                       {"early_stop_patience", training.early_stop_patience}};
  j["sweep"] = json{{"holdouts", sweep.holdouts},
                    {"train_fraction", sweep.train_fraction},
                    {"n_values", sweep.n_values},
                    {"repeats", sweep.repeats},
                    {"selection_scope", to_string(sweep.selection_scope)}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    cfg.seed = j.value("seed", cfg.seed);
    cfg.regions = j.value("regions", cfg.regions);
    cfg.backhaul_region = j.value("backhaul_region", cfg.backhaul_region);
    cfg.region_stat_jitter = j.value("region_stat_jitter", cfg.region_stat_jitter);
    if (j.contains("scene")) cfg.scene = scene_from_json(j["scene"], cfg.scene);
    if (j.contains("downlink")) cfg.downlink = scenario_from_json(j["downlink"], cfg.downlink);
    if (j.contains("backhaul")) cfg.backhaul = scenario_from_json(j["backhaul"], cfg.backhaul);
    if (j.contains("profile")) cfg.profile = profile_from_json_obj(j["profile"], cfg.profile);
    if (j.contains("model")) cfg.model = model_from_json_obj(j["model"], cfg.model);
    if (j.contains("training")) {
      const json& t = j["training"];
      cfg.training.epochs = t.value("epochs", cfg.training.epochs);
      cfg.training.batch_size = t.value("batch_size", cfg.training.batch_size);
      cfg.training.learning_rate = t.value("learning_rate", cfg.training.learning_rate);
      cfg.training.early_stop_patience =
          t.value("early_stop_patience", cfg.training.early_stop_patience);
    }
    if (j.contains("sweep")) {
      const json& s = j["sweep"];
      cfg.sweep.holdouts = s.value("holdouts", cfg.sweep.holdouts);
      cfg.sweep.train_fraction = s.value("train_fraction", cfg.sweep.train_fraction);
      cfg.sweep.n_values = s.value("n_values", cfg.sweep.n_values);
      cfg.sweep.repeats = s.value("repeats", cfg.sweep.repeats);
      if (s.contains("selection_scope"))
        cfg.sweep.selection_scope =
            selection_scope_from_string(s["selection_scope"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  // The model consumes profiles directly; keep the shapes glued together.
  cfg.model.in_channels = kNumChannels;
  cfg.model.in_height = cfg.profile.length_samples;
  cfg.model.in_width = cfg.profile.transverse_samples;
  if (cfg.sweep.holdouts.empty() && !cfg.regions.empty()) cfg.sweep.holdouts = {cfg.regions[0]};
  cfg.validate();
  return cfg;
}

void apply_override(json& config, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  std::vector<std::string> segments;
  size_t start = 0;
  for (size_t i = 0; i <= key.size(); ++i) {
    if (i == key.size() || key[i] == '.') {
      segments.push_back(key.substr(start, i - start));
      start = i + 1;
    }
  }

  json* node = &config;
  for (size_t s = 0; s < segments.size(); ++s) {
    if (!node->is_object() || !node->contains(segments[s])) {
      const std::string hint = closest_key(key, flatten_keys(config));
      throw ConfigError("unknown config key '" + key + "'" +
                        (hint.empty() ? "" : " (did you mean '" + hint + "'?)"));
    }
    node = &(*node)[segments[s]];
  }

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // plain string
  }
  if (node->is_object())
    throw ConfigError("config key '" + key + "' is a section, not a value");
  *node = parsed;
}

ExperimentConfig ExperimentConfig::load(const std::string& path,
                                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json user;
  try {
    in >> user;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  json merged = ExperimentConfig().to_json();
  merge_config(merged, user, "");
  for (const auto& o : overrides) apply_override(merged, o);
  return from_json(merged);
}

ExperimentConfig ExperimentConfig::defaults_with_overrides(
    const std::vector<std::string>& overrides) {
  json merged = ExperimentConfig().to_json();
  for (const auto& o : overrides) apply_override(merged, o);
  return from_json(merged);
}

SceneParams scene_params_for_region_index(const ExperimentConfig& cfg, std::uint64_t index) {
  SceneParams p = cfg.scene;
  Rng rng(derive_seed(cfg.seed, "region-stats", index));
  const double j = cfg.region_stat_jitter;
  auto factor = [&] { return 1.0 + j * (2.0 * rng.uniform() - 1.0); };
  p.terrain_amplitude_m *= factor();
  p.terrain_correlation_m *= factor();
  p.building_density_per_km2 *= factor();
  p.building_height_max_m =
      std::max(p.building_height_min_m, p.building_height_max_m * factor());
  p.tree_density_per_km2 *= factor();
  p.seed = derive_seed(cfg.seed, "scene", index);
  return p;
}

SceneParams scene_params_for_region(const ExperimentConfig& cfg, size_t region_index) {
  return scene_params_for_region_index(cfg, region_index);
}

SceneParams scene_params_for_backhaul(const ExperimentConfig& cfg) {
  return scene_params_for_region_index(cfg, cfg.regions.size());
}

std::vector<Scene> build_scenes(const ExperimentConfig& cfg, bool include_backhaul) {
  std::vector<Scene> scenes;
  scenes.reserve(cfg.regions.size() + (include_backhaul ? 1 : 0));
  for (size_t i = 0; i < cfg.regions.size(); ++i)
    scenes.push_back(generate_scene(scene_params_for_region(cfg, i), cfg.regions[i]));
  if (include_backhaul)
    scenes.push_back(generate_scene(scene_params_for_backhaul(cfg), cfg.backhaul_region));
  return scenes;
}

std::vector<LinkRecord> generate_links_for_scene(const ExperimentConfig& cfg, const Scene& scene,
                                                 bool is_backhaul) {
  const ScenarioParams& params = is_backhaul ? cfg.backhaul : cfg.downlink;
  std::uint64_t index = cfg.regions.size();
  if (!is_backhaul) {
    auto it = std::find(cfg.regions.begin(), cfg.regions.end(), scene.region_id);
    if (it == cfg.regions.end())
      throw ConfigError("scene region '" + scene.region_id + "' is not configured");
    index = static_cast<std::uint64_t>(it - cfg.regions.begin());
  }
  return generate_dataset({scene}, params,
                          derive_seed(cfg.seed, is_backhaul ? "links-backhaul" : "links", index));
}

std::vector<PathProfileTensor> extract_profiles(const Scene& scene,
                                                const std::vector<LinkRecord>& links,
                                                const ProfileConfig& cfg, int jobs) {
  std::vector<PathProfileTensor> profiles(links.size());
  parallel_chunks(links.size(), jobs, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
      profiles[i] = extract_profile(scene.dsm, scene.dtm, links[i], cfg);
  });
  return profiles;
}

}  // namespace rppl
