#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "rppl/experiment.hpp"
#include "rppl/rng.hpp"

namespace rppl {

using nlohmann::json;
namespace fs = std::filesystem;

json RunResult::to_json() const {
  json j;
  j["holdout"] = holdout;
  j["n"] = n;
  j["repeat"] = repeat;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["rmse_identity"] = rmse_identity;
  j["bias_identity"] = bias_identity;
  j["rmse_reflected"] = rmse_reflected;
  j["bias_reflected"] = bias_reflected;
  j["rmse_backhaul"] = rmse_backhaul;
  j["bias_backhaul"] = bias_backhaul;
  j["gap_mean_db"] = gap_mean_db;
  j["gap_sd_db"] = gap_sd_db;
  j["train_mse"] = history.train_mse;
  j["val_mse"] = history.val_mse;
  j["best_epoch"] = history.best_epoch;
  j["seeds"] = seeds;
  j["wall_seconds"] = wall_seconds;
  return j;
}

RunResult RunResult::from_json(const json& j) {
  RunResult r;
  r.holdout = j.at("holdout").get<std::string>();
  r.n = j.at("n").get<long>();
  r.repeat = j.at("repeat").get<int>();
  r.status = j.value("status", std::string("done"));
  r.error = j.value("error", std::string());
  r.rmse_identity = j.value("rmse_identity", 0.0);
  r.bias_identity = j.value("bias_identity", 0.0);
  r.rmse_reflected = j.value("rmse_reflected", 0.0);
  r.bias_reflected = j.value("bias_reflected", 0.0);
  r.rmse_backhaul = j.value("rmse_backhaul", 0.0);
  r.bias_backhaul = j.value("bias_backhaul", 0.0);
  r.gap_mean_db = j.value("gap_mean_db", 0.0);
  r.gap_sd_db = j.value("gap_sd_db", 0.0);
  r.history.train_mse = j.value("train_mse", std::vector<double>{});
  r.history.val_mse = j.value("val_mse", std::vector<double>{});
  r.history.best_epoch = j.value("best_epoch", -1);
  r.seeds = j.value("seeds", json::object());
  r.wall_seconds = j.value("wall_seconds", 0.0);
  return r;
}

std::vector<RunResult> load_manifest(const std::string& path) {
  std::vector<RunResult> results;
  std::ifstream in(path);
  if (!in) return results;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      results.push_back(RunResult::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError("bad manifest line: " + std::string(e.what()), line_no);
    }
  }
  return results;
}

void append_manifest(const std::string& path, const RunResult& result) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw ParseError("cannot append to manifest: " + path);
  out << result.to_json().dump() << "\n";
  out.flush();
}

namespace {

struct CellKey {
  std::string holdout;
  long n;
  int repeat;
  bool operator<(const CellKey& o) const {
    return std::tie(holdout, n, repeat) < std::tie(o.holdout, o.n, o.repeat);
  }
};

void assert_no_leakage(const std::vector<PathProfileTensor>& samples,
                       const std::vector<size_t>& train, const std::vector<size_t>& val,
                       const std::vector<size_t>& test, const std::string& holdout) {
  for (size_t i : test)
    if (samples[i].link.region_id != holdout)
      throw DomainError("leakage: non-holdout sample in test partition");
  for (const auto* part : {&train, &val})
    for (size_t i : *part)
      if (samples[i].link.region_id == holdout)
        throw DomainError("leakage: holdout sample in train/val partition");
}

std::vector<PathProfileTensor> gather(const std::vector<PathProfileTensor>& samples,
                                      const std::vector<size_t>& indices) {
  std::vector<PathProfileTensor> out;
  out.reserve(indices.size());
  for (size_t i : indices) out.push_back(samples[i]);
  return out;
}

}  // namespace

std::vector<RunResult> run_sweep(const ExperimentConfig& cfg,
                                 const std::vector<PathProfileTensor>& downlink_profiles,
                                 const std::vector<PathProfileTensor>& backhaul_profiles,
                                 const std::string& out_dir, int jobs, const LogFn& log) {
  cfg.validate();
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };

  fs::create_directories(out_dir);
  const std::string manifest_path = out_dir + "/manifest.jsonl";

  std::vector<RunResult> results = load_manifest(manifest_path);
  std::set<CellKey> done;
  for (const auto& r : results)
    if (r.status == "done") done.insert({r.holdout, r.n, r.repeat});
  if (!done.empty())
    say("resuming: " + std::to_string(done.size()) + " completed cells found in manifest");

  // Fix the model input shape from the data.
  nn::ModelConfig model_cfg = cfg.model;
  if (!downlink_profiles.empty()) {
    model_cfg.in_height = downlink_profiles.front().length_samples;
    model_cfg.in_width = downlink_profiles.front().transverse_samples;
  }

  for (const auto& holdout : cfg.sweep.holdouts) {
    const auto region_it = std::find(cfg.regions.begin(), cfg.regions.end(), holdout);
    if (region_it == cfg.regions.end())
      throw ConfigError("holdout '" + holdout + "' is not a configured region");
    const auto holdout_index = static_cast<std::uint64_t>(region_it - cfg.regions.begin());

    for (size_t ni = 0; ni < cfg.sweep.n_values.size(); ++ni) {
      const long n = cfg.sweep.n_values[ni];
      for (int repeat = 0; repeat < cfg.sweep.repeats; ++repeat) {
        if (done.count({holdout, n, repeat})) continue;

        RunResult result;
        result.holdout = holdout;
        result.n = n;
        result.repeat = repeat;

        const std::uint64_t split_seed =
            derive_seed(cfg.seed, "split", holdout_index, static_cast<std::uint64_t>(repeat));
        const std::uint64_t augment_seed =
            derive_seed(cfg.seed, "augment", holdout_index, static_cast<std::uint64_t>(repeat),
                        static_cast<std::uint64_t>(n));
        const std::uint64_t train_seed =
            derive_seed(cfg.seed, "train", holdout_index, static_cast<std::uint64_t>(repeat),
                        static_cast<std::uint64_t>(n));
        result.seeds = {{"split", split_seed},
                        {"augment", augment_seed},
                        {"train", train_seed},
                        {"augment_redrawn_per_repeat", true}};

        const auto t0 = std::chrono::steady_clock::now();
        try {
          FoldIndices folds =
              make_folds(downlink_profiles, holdout, cfg.sweep.train_fraction, split_seed);
          assert_no_leakage(downlink_profiles, folds.train, folds.val, folds.test, holdout);

          std::vector<PathProfileTensor> train_set = gather(downlink_profiles, folds.train);
          std::vector<PathProfileTensor> val_set = gather(downlink_profiles, folds.val);

          // Augment both partitions, proportionally to the split.
          const long n_train = std::lround(static_cast<double>(n) * cfg.sweep.train_fraction);
          const long n_val = n - n_train;
          train_set = augment_dataset(
              train_set, {n_train, derive_seed(augment_seed, "train-part"), cfg.sweep.selection_scope});
          val_set = augment_dataset(
              val_set, {n_val, derive_seed(augment_seed, "val-part"), cfg.sweep.selection_scope});

          say("cell holdout=" + holdout + " n=" + std::to_string(n) + " repeat=" +
              std::to_string(repeat) + ": train=" + std::to_string(train_set.size()) +
              " val=" + std::to_string(val_set.size()) + " test=" + std::to_string(folds.test.size()));

          TrainOutcome trained =
              train_model(model_cfg, cfg.training, train_set, val_set, train_seed, jobs);
          result.history = trained.history;

          nn::CnnModel model(model_cfg, trained.params);

          const std::vector<PathProfileTensor> identity_test = gather(downlink_profiles, folds.test);
          std::vector<PathProfileTensor> reflected_test;
          reflected_test.reserve(identity_test.size());
          for (const auto& p : identity_test) reflected_test.push_back(reflect(p));

          auto targets = [](const std::vector<PathProfileTensor>& set) {
            std::vector<double> t(set.size());
            for (size_t i = 0; i < set.size(); ++i) t[i] = set[i].link.path_loss_db;
            return t;
          };

          EvalReport rep_identity =
              make_report("identity", predict_all(model, identity_test, jobs), targets(identity_test));
          EvalReport rep_reflected = make_report(
              "reflected", predict_all(model, reflected_test, jobs), targets(reflected_test));
          EvalReport rep_backhaul;
          if (!backhaul_profiles.empty())
            rep_backhaul = make_report("backhaul", predict_all(model, backhaul_profiles, jobs),
                                       targets(backhaul_profiles));

          std::vector<std::pair<PathProfileTensor, PathProfileTensor>> pairs;
          pairs.reserve(identity_test.size());
          for (size_t i = 0; i < identity_test.size(); ++i)
            pairs.emplace_back(identity_test[i], reflected_test[i]);
          GapSummary gaps = reciprocity_gap(model, pairs, jobs);
          rep_reflected.reciprocity_gaps_db = gaps.gaps_db;
          rep_reflected.gap_mean_db = gaps.mean_db;
          rep_reflected.gap_sd_db = gaps.sd_db;

          result.rmse_identity = rep_identity.rmse_db;
          result.bias_identity = rep_identity.mean_error_db;
          result.rmse_reflected = rep_reflected.rmse_db;
          result.bias_reflected = rep_reflected.mean_error_db;
          if (!backhaul_profiles.empty()) {
            result.rmse_backhaul = rep_backhaul.rmse_db;
            result.bias_backhaul = rep_backhaul.mean_error_db;
          }
          result.gap_mean_db = gaps.mean_db;
          result.gap_sd_db = gaps.sd_db;

          const std::string cell_dir = out_dir + "/runs/" + holdout + "/" + std::to_string(n) +
                                       "/" + std::to_string(repeat);
          fs::create_directories(cell_dir);
          nn::Checkpoint ckpt{model_cfg, trained.params};
          save_checkpoint(ckpt, cell_dir + "/model.rpnn");
          std::vector<EvalReport> reports = {rep_identity, rep_reflected};
          if (!backhaul_profiles.empty()) reports.push_back(rep_backhaul);
          emit_report(reports, cell_dir);

          result.status = "done";
        } catch (const std::exception& e) {
          result.status = "failed";
          result.error = e.what();
          say("cell holdout=" + holdout + " n=" + std::to_string(n) + " repeat=" +
              std::to_string(repeat) + " FAILED: " + result.error);
        }
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        append_manifest(manifest_path, result);
        results.push_back(result);
        if (result.status == "done")
          say("cell holdout=" + holdout + " n=" + std::to_string(n) + " repeat=" +
              std::to_string(repeat) + " done: identity=" +
              std::to_string(result.rmse_identity) + " dB, reflected=" +
              std::to_string(result.rmse_reflected) + " dB, backhaul=" +
              std::to_string(result.rmse_backhaul) + " dB, gap=" +
              std::to_string(result.gap_mean_db) + "+-" + std::to_string(result.gap_sd_db) +
              " dB (" + std::to_string(result.wall_seconds) + " s)");
      }
    }
  }

  write_sweep_summaries(cfg, results, out_dir);
  return results;
}

void write_sweep_summaries(const ExperimentConfig& cfg, const std::vector<RunResult>& results,
                           const std::string& out_dir) {
  const std::vector<long>& n_values = cfg.sweep.n_values;

  auto build_rows = [&](auto value_of) {
    std::vector<SummaryRow> rows;
    for (const auto& holdout : cfg.sweep.holdouts) {
      SummaryRow row;
      row.holdout = holdout;
      for (long n : n_values) {
        std::vector<double> values;
        for (const auto& r : results)
          if (r.status == "done" && r.holdout == holdout && r.n == n)
            values.push_back(value_of(r));
        if (values.empty()) {
          row.mean_per_n.push_back(std::numeric_limits<double>::quiet_NaN());
          row.sd_per_n.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
          row.mean_per_n.push_back(mean_of(values));
          row.sd_per_n.push_back(sample_sd(values));
        }
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };

  write_summary_csv(out_dir + "/summary_identity.csv", n_values,
                    build_rows([](const RunResult& r) { return r.rmse_identity; }));
  write_summary_csv(out_dir + "/summary_reflected.csv", n_values,
                    build_rows([](const RunResult& r) { return r.rmse_reflected; }));
  write_summary_csv(out_dir + "/summary_backhaul.csv", n_values,
                    build_rows([](const RunResult& r) { return r.rmse_backhaul; }));
  write_summary_csv(out_dir + "/summary_reciprocity_gap.csv", n_values,
                    build_rows([](const RunResult& r) { return r.gap_mean_db; }));
}

}  // namespace rppl
