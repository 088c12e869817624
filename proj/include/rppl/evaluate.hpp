#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rppl/nn/model.hpp"
#include "rppl/profile.hpp"

namespace rppl {

/// Root mean squared error in dB. Throws DomainError on empty input.
double rmse(const std::vector<double>& predictions, const std::vector<double>& measurements);

double mean_of(const std::vector<double>& xs);
/// Sample standard deviation (n-1 denominator); 0 for a single value.
double sample_sd(const std::vector<double>& xs);

struct KdeCurve {
  double bandwidth_db = 0.0;
  std::vector<double> x_db;     // 512 uniform points spanning [min-3h, max+3h]
  std::vector<double> density;  // per dB
};

inline constexpr int kKdeGridSize = 512;

/// Gaussian-kernel density estimate. bandwidth <= 0 selects Silverman's
/// rule, 1.06 * sd * n^(-1/5); all-identical samples then raise
/// DomainError (degenerate bandwidth). Needs at least 2 samples.
KdeCurve kde(const std::vector<double>& samples, double bandwidth = 0.0);

/// Per-test-set evaluation summary. errors are prediction - measurement in
/// dB; the full vector is always carried so paired statistics and re-plots
/// never require re-inference.
struct EvalReport {
  std::string label;
  std::vector<double> errors_db;
  double rmse_db = 0.0;
  double mean_error_db = 0.0;
  double sd_error_db = 0.0;
  KdeCurve kde_curve;
  std::vector<double> reciprocity_gaps_db;  // only for paired test sets
  double gap_mean_db = 0.0;
  double gap_sd_db = 0.0;
};

EvalReport make_report(const std::string& label, const std::vector<double>& predictions,
                       const std::vector<double>& measurements);

/// Flatten a profile into the (4, L, W) model input.
nn::Tensor profile_to_input(const PathProfileTensor& profile);

/// Model predictions over a set of profiles, in order.
std::vector<double> predict_all(const nn::CnnModel& model,
                                const std::vector<PathProfileTensor>& profiles, int jobs = 1);

struct GapSummary {
  std::vector<double> gaps_db;  // forward(identity) - forward(reflected), per link
  double mean_db = 0.0;
  double sd_db = 0.0;
};

/// Model self-consistency under Tx/Rx exchange. Measurement labels are not
/// consulted; a perfectly reciprocity-aware model has all gaps at zero.
GapSummary reciprocity_gap(const nn::CnnModel& model,
                           const std::vector<std::pair<PathProfileTensor, PathProfileTensor>>& pairs,
                           int jobs = 1);

/// report_<label>.json plus kde_<label>.csv (columns x_db,density) for each
/// report, byte-deterministic for identical inputs. Returns written paths.
std::vector<std::string> emit_report(const std::vector<EvalReport>& reports,
                                     const std::string& directory);

/// Published reference values from the drive-test study this pipeline
/// mirrors, embedded in every report as context. The underlying
/// measurements are not redistributable, so these are labeled
/// non-reproducible rather than treated as targets.
std::string published_reference_json();

/// One row of a Tables-style summary: a holdout region with mean/SD per
/// augmentation level.
struct SummaryRow {
  std::string holdout;
  std::vector<double> mean_per_n;
  std::vector<double> sd_per_n;
};

/// CSV shaped like the augmentation-sweep tables: one row per holdout, a
/// trailing "Mean" row with column means.
void write_summary_csv(const std::string& path, const std::vector<long>& n_values,
                       const std::vector<SummaryRow>& rows);

void write_kde_csv(const KdeCurve& curve, const std::string& path);

}  // namespace rppl
