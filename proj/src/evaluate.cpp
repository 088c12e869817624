#include "rppl/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rppl/json_io.hpp"
#include "rppl/parallel.hpp"

namespace rppl {

double rmse(const std::vector<double>& predictions, const std::vector<double>& measurements) {
  if (predictions.empty()) throw DomainError("rmse over an empty test set");
  if (predictions.size() != measurements.size()) throw DomainError("rmse length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - measurements[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(predictions.size()));
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("mean of an empty vector");
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("sd of an empty vector");
  if (xs.size() == 1) return 0.0;
  const double mu = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

KdeCurve kde(const std::vector<double>& samples, double bandwidth) {
  if (samples.size() < 2) throw DomainError("kde needs at least 2 samples");
  double h = bandwidth;
  if (h <= 0.0) {
    const double sd = sample_sd(samples);
    if (sd == 0.0)
      throw DomainError("kde bandwidth is degenerate: all samples identical");
    h = 1.06 * sd * std::pow(static_cast<double>(samples.size()), -0.2);
  }

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it - 3.0 * h;
  const double hi = *hi_it + 3.0 * h;

  KdeCurve curve;
  curve.bandwidth_db = h;
  curve.x_db.resize(kKdeGridSize);
  curve.density.resize(kKdeGridSize);
  const double step = (hi - lo) / (kKdeGridSize - 1);
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * 3.14159265358979323846));
  for (int k = 0; k < kKdeGridSize; ++k) {
    const double x = lo + k * step;
    double acc = 0.0;
    for (double s : samples) {
      const double u = (x - s) / h;
      acc += std::exp(-0.5 * u * u);
    }
    curve.x_db[k] = x;
    curve.density[k] = norm * acc;
  }
  return curve;
}

EvalReport make_report(const std::string& label, const std::vector<double>& predictions,
                       const std::vector<double>& measurements) {
  EvalReport report;
  report.label = label;
  report.errors_db.resize(predictions.size());
  for (size_t i = 0; i < predictions.size(); ++i)
    report.errors_db[i] = predictions[i] - measurements[i];
  report.rmse_db = rmse(predictions, measurements);
  report.mean_error_db = mean_of(report.errors_db);
  report.sd_error_db = sample_sd(report.errors_db);
  report.kde_curve = kde(report.errors_db);
  return report;
}

nn::Tensor profile_to_input(const PathProfileTensor& profile) {
  nn::Tensor input({kNumChannels, profile.length_samples, profile.transverse_samples});
  std::copy(profile.values.begin(), profile.values.end(), input.v.begin());
  return input;
}

std::vector<double> predict_all(const nn::CnnModel& model,
                                const std::vector<PathProfileTensor>& profiles, int jobs) {
  std::vector<double> out(profiles.size());
  parallel_chunks(profiles.size(), jobs, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i)
      out[i] = static_cast<double>(model.predict(profile_to_input(profiles[i])));
  });
  return out;
}

GapSummary reciprocity_gap(const nn::CnnModel& model,
                           const std::vector<std::pair<PathProfileTensor, PathProfileTensor>>& pairs,
                           int jobs) {
  if (pairs.empty()) throw DomainError("reciprocity_gap needs at least one profile pair");
  GapSummary summary;
  summary.gaps_db.resize(pairs.size());
  parallel_chunks(pairs.size(), jobs, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const double fwd = model.predict(profile_to_input(pairs[i].first));
      const double rev = model.predict(profile_to_input(pairs[i].second));
      summary.gaps_db[i] = fwd - rev;
    }
  });
  summary.mean_db = mean_of(summary.gaps_db);
  summary.sd_db = sample_sd(summary.gaps_db);
  return summary;
}

std::string published_reference_json() {
  json ref;
  ref["note"] =
      "Values published for the original Ofcom/CRC drive-test study. The underlying "
      "measurements are not redistributable and the full-scale runs are beyond desk-scale "
      "compute, so these are context only, not reproduction targets.";
  ref["identity_rmse_db"] = {{"n0", 7.35}, {"n1", 7.32}, {"n2", 7.36}};
  ref["reflected_rmse_db"] = {{"n0", 16.20}, {"n1", 7.76}, {"n2", 7.42}};
  ref["backhaul_rmse_db"] = {{"n0", 7.33}, {"n1", 7.16}, {"n2", 7.09}};
  ref["reciprocity_gap_mean_db"] = {{"n0", 12.50}, {"n1", -0.05}, {"n2", -0.02}};
  ref["reciprocity_gap_sd_db"] = {{"n0", 9.48}, {"n1", 4.74}, {"n2", 3.90}};
  ref["augmentation_n"] = {{"n0", 0}, {"n1", 500}, {"n2", 3000}};
  return ref.dump();
}

namespace {

json report_to_json(const EvalReport& r) {
  json j;
  j["schema_version"] = 1;
  j["label"] = r.label;
  j["n_samples"] = r.errors_db.size();
  j["rmse_db"] = r.rmse_db;
  j["mean_error_db"] = r.mean_error_db;
  j["sd_error_db"] = r.sd_error_db;
  j["errors_db"] = r.errors_db;
  j["kde"] = {{"bandwidth_db", r.kde_curve.bandwidth_db},
              {"x_db", r.kde_curve.x_db},
              {"density", r.kde_curve.density}};
  if (!r.reciprocity_gaps_db.empty()) {
    j["reciprocity_gaps_db"] = r.reciprocity_gaps_db;
    j["gap_mean_db"] = r.gap_mean_db;
    j["gap_sd_db"] = r.gap_sd_db;
  }
  j["published_reference"] = json::parse(published_reference_json());
  return j;
}

}  // namespace

void write_kde_csv(const KdeCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write kde csv: " + path);
  out << "x_db,density\n";
  for (size_t i = 0; i < curve.x_db.size(); ++i)
    out << format_double(curve.x_db[i]) << ',' << format_double(curve.density[i]) << "\n";
}

std::vector<std::string> emit_report(const std::vector<EvalReport>& reports,
                                     const std::string& directory) {
  std::vector<std::string> written;
  for (const auto& r : reports) {
    const std::string json_path = directory + "/report_" + r.label + ".json";
    std::ofstream out(json_path);
    if (!out) throw ParseError("cannot write report: " + json_path);
    out << report_to_json(r).dump(2) << "\n";
    written.push_back(json_path);

    const std::string kde_path = directory + "/kde_" + r.label + ".csv";
    write_kde_csv(r.kde_curve, kde_path);
    written.push_back(kde_path);
  }
  return written;
}

void write_summary_csv(const std::string& path, const std::vector<long>& n_values,
                       const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write summary csv: " + path);
  out << "holdout";
  for (long n : n_values) out << ",mean_n" << n << ",sd_n" << n;
  out << "\n";

  std::vector<double> mean_acc(n_values.size(), 0.0), sd_acc(n_values.size(), 0.0);
  for (const auto& row : rows) {
    out << row.holdout;
    for (size_t c = 0; c < n_values.size(); ++c) {
      out << ',' << format_double(row.mean_per_n[c]) << ',' << format_double(row.sd_per_n[c]);
      mean_acc[c] += row.mean_per_n[c];
      sd_acc[c] += row.sd_per_n[c];
    }
    out << "\n";
  }
  if (!rows.empty()) {
    out << "Mean";
    for (size_t c = 0; c < n_values.size(); ++c)
      out << ',' << format_double(mean_acc[c] / rows.size()) << ','
          << format_double(sd_acc[c] / rows.size());
    out << "\n";
  }
}

}  // namespace rppl
