#pragma once

#include "latblock/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace latblock {

/// theta = H(mean vector) with a known gradient.
struct SmoothStatistic {
  std::string name;
  int arity = 1;
  bool linear = false;
  std::function<double(const Vector&)> h;
  std::function<Vector(const Vector&)> gradient;

  static SmoothStatistic mean();
  /// x1 / x2
  static SmoothStatistic ratio();
  /// x2 - x1^2
  static SmoothStatistic moment_variance();
  static SmoothStatistic from_name(const std::string& name);

  /// H(x); throws Domain on a non-finite value or a zero ratio denominator.
  double operator()(const Vector& x) const;
};

/// Values for each window site, one column per site in window order.
struct FieldSample {
  LatticeWindow window;
  Eigen::MatrixXd values;  // p x N

  FieldSample() = default;
  FieldSample(LatticeWindow w, Eigen::MatrixXd v);
  /// Sites in any order; values are re-ordered to match the window.
  static FieldSample from_unordered(const LatticePoints& sites, const Eigen::MatrixXd& values);

  int arity() const { return static_cast<int>(values.rows()); }
};

/// Per-site vector a statistic reads from a scalar field:
///   mean -> (x), momvar -> (x, x^2), ratio -> (x + 4, x^2 + 1).
Eigen::MatrixXd lift_scalar_field(const Eigen::RowVectorXd& scalar, const SmoothStatistic& stat);

FieldSample read_field_csv(const std::string& path);
std::string field_csv(const FieldSample& sample);

double evaluate_statistic(const SmoothStatistic& stat, const FieldSample& sample,
                          const LatticePoints& sites);

struct EstimatorResult {
  double tau_hat_sq = 0.0;
  Scheme scheme = Scheme::ol;
  Eigen::Index subsample_count = 0;
  std::vector<Eigen::Index> site_counts;  // one entry for OL, one per subregion for NOL
  double grand_mean = 0.0;
  std::vector<double> thetas;             // filled when retained
  bool non_integer_scale = false;
};

enum class Summation { direct, prefix };

struct EstimatorOptions {
  bool retain_thetas = false;
  /// Prefix-sum tables for hypercube subsamples; agrees with direct summation to rounding.
  Summation summation = Summation::direct;
};

/// Subsample site lists resolved to column indices of a sample window, reusable across fields.
class CompiledEstimator {
 public:
  CompiledEstimator(const LatticeWindow& sample_window, const Region& region,
                    const SubsampleSpec& spec, Summation summation = Summation::direct);

  Scheme scheme() const { return scheme_; }
  Eigen::Index subsample_count() const { return static_cast<Eigen::Index>(counts_.size()); }
  bool non_integer_scale() const { return non_integer_; }

  EstimatorResult evaluate(const Eigen::MatrixXd& values, const SmoothStatistic& stat,
                           bool retain_thetas = false) const;
  double tau_hat_sq(const Eigen::MatrixXd& values, const SmoothStatistic& stat) const;

 private:
  void subsample_means(const Eigen::MatrixXd& values, Eigen::MatrixXd& means) const;

  Scheme scheme_;
  bool non_integer_ = false;
  std::vector<int> index_;          // concatenated site columns
  std::vector<std::size_t> start_;  // subsample j uses index_[start_[j] .. start_[j+1])
  std::vector<Eigen::Index> counts_;
  // Prefix path: box corners per subsample in the padded table.
  bool prefix_ = false;
  std::vector<int> box_dims_;
  std::vector<int> sample_to_box_;
  std::vector<std::vector<std::pair<std::size_t, int>>> corners_;  // (cell, sign)
};

EstimatorResult ol_estimate(const FieldSample& sample, const Region& region,
                            const SubsampleSpec& spec, const SmoothStatistic& stat,
                            const EstimatorOptions& options = {});
EstimatorResult nol_estimate(const FieldSample& sample, const Region& region,
                             const SubsampleSpec& spec, const SmoothStatistic& stat,
                             const EstimatorOptions& options = {});
EstimatorResult subsample_estimate(const FieldSample& sample, const Region& region,
                                   const SubsampleSpec& spec, const SmoothStatistic& stat,
                                   const EstimatorOptions& options = {});

}  // namespace latblock
