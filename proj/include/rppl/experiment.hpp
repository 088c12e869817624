#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rppl/evaluate.hpp"
#include "rppl/nn/adam.hpp"
#include "rppl/nn/checkpoint.hpp"
#include "rppl/profile.hpp"
#include "rppl/synthetic.hpp"
#include "rppl/transforms.hpp"

namespace rppl {

struct TrainingConfig {
  int epochs = 40;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int early_stop_patience = 10;

  void validate() const;
};

/// Sweep shape: which regions exist, which are held out, how train/val are
/// split, and the augmentation levels.
struct SweepConfig {
  std::vector<std::string> holdouts;  // subset of regions to run as folds
  double train_fraction = 0.8;
  std::vector<long> n_values = {0, 80, 500};
  int repeats = 3;
  SelectionScope selection_scope = SelectionScope::uniform_random;

  void validate() const;
};

/// The complete experiment schema: one JSON file drives generation,
/// extraction, training and evaluation. All randomness in a run derives
/// from `seed` via named sub-streams.
struct ExperimentConfig {
  std::uint64_t seed = 12345;
  std::vector<std::string> regions = {"r0", "r1", "r2", "r3", "r4", "r5"};
  std::string backhaul_region = "backhaul";
  SceneParams scene;             // base scene; per-region statistics vary
  double region_stat_jitter = 0.35;
  ScenarioParams downlink;       // BS-to-UE links for the training regions
  ScenarioParams backhaul;       // BS-to-BS links for the backhaul region
  ProfileConfig profile;
  nn::ModelConfig model;         // input size synced to the profile config
  TrainingConfig training;
  SweepConfig sweep;

  ExperimentConfig();

  void validate() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);

  /// Load a config file, merge it over the defaults (unknown keys are
  /// rejected with a did-you-mean hint), then apply dotted-key overrides.
  static ExperimentConfig load(const std::string& path,
                               const std::vector<std::string>& overrides = {});
  static ExperimentConfig defaults_with_overrides(const std::vector<std::string>& overrides);
};

/// Apply "dotted.key=value" onto a config JSON tree. The key must already
/// exist; unknown keys throw ConfigError naming the closest valid key.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// All dotted key paths of a JSON tree (leaves and containers).
std::vector<std::string> flatten_keys(const nlohmann::json& j);

/// Scene parameters for one region: the base scene with per-region
/// statistics (roughness, clutter density, heights) varied deterministically
/// from the experiment seed.
SceneParams scene_params_for_region(const ExperimentConfig& cfg, size_t region_index);
SceneParams scene_params_for_backhaul(const ExperimentConfig& cfg);

struct FoldIndices {
  std::vector<size_t> train;
  std::vector<size_t> val;
  std::vector<size_t> test;
};

/// Geographic fold: every sample of `holdout` goes to test; the remaining
/// samples are shuffled with `seed` and split by `train_fraction`. The
/// three partitions are disjoint and cover the input exactly.
/// Throws DomainError when the holdout region has no samples or nothing
/// remains for training.
FoldIndices make_folds(const std::vector<PathProfileTensor>& samples, const std::string& holdout,
                       double train_fraction, std::uint64_t seed);

struct TrainHistory {
  std::vector<double> train_mse;
  std::vector<double> val_mse;
  int best_epoch = -1;
};

struct TrainOutcome {
  nn::ModelParams params;  // best-validation checkpoint
  TrainHistory history;
};

/// Mini-batch training with early stopping on validation RMSE. Deterministic
/// given (model config, training config, seed, data): batch gradients are
/// reduced over fixed-size micro-chunks in index order, so the result does
/// not depend on the worker count.
TrainOutcome train_model(const nn::ModelConfig& model_cfg, const TrainingConfig& train_cfg,
                         const std::vector<PathProfileTensor>& train_set,
                         const std::vector<PathProfileTensor>& val_set, std::uint64_t seed,
                         int jobs = 1);

struct RunResult {
  std::string holdout;
  long n = 0;
  int repeat = 0;
  std::string status = "done";  // "done" or "failed"
  std::string error;
  double rmse_identity = 0.0, bias_identity = 0.0;
  double rmse_reflected = 0.0, bias_reflected = 0.0;
  double rmse_backhaul = 0.0, bias_backhaul = 0.0;
  double gap_mean_db = 0.0, gap_sd_db = 0.0;
  TrainHistory history;
  nlohmann::json seeds;  // named sub-seeds actually used, for audit
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  static RunResult from_json(const nlohmann::json& j);
};

/// JSON-lines manifest, one RunResult per line, appended as cells finish.
std::vector<RunResult> load_manifest(const std::string& path);
void append_manifest(const std::string& path, const RunResult& result);

using LogFn = std::function<void(const std::string&)>;

/// Run every (holdout x n x repeat) cell: fold, augment train AND val,
/// train, evaluate on the identity / reflected / backhaul test sets, and
/// record reciprocity gaps. Completed cells found in an existing manifest
/// are not recomputed. Failed cells are recorded with their error and do
/// not stop the sweep. Finishes by (re)writing the summary CSV tables.
std::vector<RunResult> run_sweep(const ExperimentConfig& cfg,
                                 const std::vector<PathProfileTensor>& downlink_profiles,
                                 const std::vector<PathProfileTensor>& backhaul_profiles,
                                 const std::string& out_dir, int jobs = 1, const LogFn& log = {});

/// Aggregate manifest rows into per-holdout mean/SD tables (across repeats)
/// and write summary_identity.csv, summary_reflected.csv,
/// summary_backhaul.csv and summary_reciprocity_gap.csv.
void write_sweep_summaries(const ExperimentConfig& cfg, const std::vector<RunResult>& results,
                           const std::string& out_dir);

/// Generation + extraction pipeline pieces shared by the CLI and tests.
std::vector<Scene> build_scenes(const ExperimentConfig& cfg, bool include_backhaul = true);
std::vector<LinkRecord> generate_links_for_scene(const ExperimentConfig& cfg, const Scene& scene,
                                                 bool is_backhaul);
std::vector<PathProfileTensor> extract_profiles(const Scene& scene,
                                                const std::vector<LinkRecord>& links,
                                                const ProfileConfig& cfg, int jobs = 1);

}  // namespace rppl
