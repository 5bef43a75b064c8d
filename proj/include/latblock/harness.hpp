#pragma once

#include "latblock/covariance.hpp"
#include "latblock/estimators.hpp"
#include "latblock/fieldsim.hpp"
#include "latblock/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latblock {

struct StudyRegion {
  std::string name;
  Region region;
  std::vector<double> s_lambda_grid;  // empty: use the study grid
  std::vector<int> hj_lambda_m;       // empty: use the study list
};

struct StudyModel {
  std::string name;
  Covariogram cov;
};

struct NpiConfig {
  std::vector<double> c1, c2;
};

struct HjConfig {
  std::vector<int> lambda_m;
  std::vector<double> candidates;  // empty: {2, ..., lambda_m - 1}
};

/// Key of an OL/NOL column: (region, model, scheme).
struct CellKey {
  std::string region, model;
  Scheme scheme;
  friend bool operator<(const CellKey& a, const CellKey& b) {
    return std::tie(a.region, a.model, a.scheme) < std::tie(b.region, b.model, b.scheme);
  }
};

struct StudyConfig {
  std::vector<StudyRegion> regions;
  std::vector<StudyModel> models;
  std::string statistic = "mean";
  std::vector<Scheme> schemes{Scheme::ol};
  std::vector<std::string> sub_templates{"same"};
  std::vector<double> s_lambda_grid;
  int replicates = 1000;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  SimMethod sim_method = SimMethod::automatic;
  Containment containment = Containment::lattice;
  std::optional<NpiConfig> npi;
  std::optional<HjConfig> hj;
  std::optional<double> tau_n_sq;  // required for nonlinear statistics
  std::optional<double> s_lambda_opt_all;
  std::map<CellKey, double> s_lambda_opt;
  std::string mse_csv, scaling_csv, phi_csv, freq_csv;

  /// Throws validation errors; called before any compute.
  void validate() const;
};

StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::string& path);

struct MseRow {
  std::string region, model, scheme, sub_template;
  double s_lambda = 0.0;
  double mse = 0.0, mc_se = 0.0;
  int reps = 0;
  std::string note;  // NA reason, or empty
  bool na() const { return !note.empty() && note.rfind("NA", 0) == 0; }
};

struct ScalingRow {
  std::string region, model, scheme, sub_template;
  double s_lambda_opt = 0.0;
  double mse = 0.0, mc_se = 0.0;
  std::string note;
};

struct PhiRow {
  std::string region, model, scheme, selector, setting;
  double s_lambda_opt = 0.0;
  double e_phi_sq = 0.0, mc_se = 0.0;
  int reps = 0;
  std::string note;
};

struct FreqRow {
  std::string region, model, scheme, selector, setting;
  int estimate = 0;
  int count = 0;
};

struct MseTable {
  std::vector<MseRow> rows;
};

struct PhiTable {
  std::vector<PhiRow> rows;
  std::vector<FreqRow> freq;
};

struct StudyResult {
  MseTable mse;
  std::vector<ScalingRow> scaling;
  PhiTable phi;
};

/// Normalized MSE E(tau_hat^2 / tau_n^2 - 1)^2 for every (region, model, scheme,
/// sub-template, scale) cell.
MseTable mse_study(const StudyConfig& config);
/// Per column argmin over the scale grid; ties go to the smallest scale.
std::vector<ScalingRow> optimal_scaling(const MseTable& table);
std::vector<ScalingRow> optimal_scaling_study(const StudyConfig& config);
/// Selector performance E(phi_n^2) and integer-estimate frequencies.
PhiTable phi_study(const StudyConfig& config, const std::vector<ScalingRow>& optimal = {});
StudyResult run_study(const StudyConfig& config);

std::string mse_csv(const MseTable& table);
MseTable parse_mse_csv(const std::string& text);
std::string scaling_csv(const std::vector<ScalingRow>& rows);
std::string phi_csv(const PhiTable& table);
std::string freq_csv(const PhiTable& table);
void emit_csv(const MseTable& table, const std::string& path);
/// Writes every configured output; removes any partial outputs on failure.
void write_study_outputs(const StudyConfig& config, const StudyResult& result);

/// Mean and standard error (sample sd / sqrt(n)) of a series, two-pass.
std::pair<double, double> mean_and_se(const std::vector<double>& values);

/// Stream seed for one (region, model) pair, independent of the rest of the config.
std::uint64_t pair_seed(std::uint64_t master, const std::string& region, const std::string& model);

}  // namespace latblock
