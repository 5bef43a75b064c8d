#pragma once

#include "latblock/constants.hpp"
#include "latblock/estimators.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace latblock {

struct NpiDiagnostics {
  double c1 = 0.0, c2 = 0.0;
  int s1 = 0, s2 = 0;  // rounded pilot scales; the bias pilot also uses 2 * s2
  double tau_hat_sq = 0.0;
  double tau_hat_sq_s2 = 0.0, tau_hat_sq_2s2 = 0.0;
  double b0_hat = 0.0;
};

struct HjDiagnostics {
  int lambda_m = 0;
  std::vector<double> candidates;
  std::vector<double> mse;  // empirical MSE per candidate
  double argmin = 0.0;
  double factor = 0.0;      // (|R_n| / |lambda_m R0|)^{1/(d+2)}
  Eigen::Index inner_regions = 0;
  double proxy = 0.0;       // full-region estimate at lambda_m
};

struct ScalingPlan {
  std::string method;  // theory | npi | hj
  Scheme scheme = Scheme::ol;
  double lambda_opt_real = 0.0;
  int lambda_opt_int = 1;
  int dim = 0;
  double det_scale = 0.0, b0 = 0.0, tau_sq = 0.0, k0 = 0.0, volume = 0.0;
  std::optional<NpiDiagnostics> npi;
  std::optional<HjDiagnostics> hj;
};

/// floor(x + 1/2), clamped to [1, upper] (upper ignored when < 1).
int round_scale(double x, int upper = 0);
/// Largest integer strictly below the smallest region scaling.
int max_subsample_scale(const Region& region);

/// OL: (detΔ B0^2 / (d K0 tau^4))^{1/(d+2)}; NOL: (detΔ |R0| B0^2 / (d tau^4))^{1/(d+2)}.
ScalingPlan theoretical_scaling(int dim, double det_scale, double b0, double tau_sq,
                                const ShapeConstants& shape, Scheme scheme);

/// Pilot scales for a region of volume |R_n|: c1 |R_n|^{1/(d+2)} and c2 |R_n|^{1/(d+4)}.
std::pair<int, int> npi_pilot_scales(double region_volume, int dim, double c1, double c2);

/// Pilot arithmetic on an arbitrary estimator curve tau_hat(scale).
NpiDiagnostics npi_pilots(double region_volume, int dim, double c1, double c2,
                          const std::function<double(int)>& tau_hat);

/// HJ recalibration argmin * ratio^{1/(d+2)}.
double hj_recalibrate(double argmin, double volume_ratio, int dim);

/// Empirical scale selectors compiled against one sample window, reusable across fields.
class NpiSelector {
 public:
  NpiSelector(const LatticeWindow& window, const Region& region, double c1, double c2, Scheme scheme);
  ScalingPlan select(const Eigen::MatrixXd& values, const SmoothStatistic& stat) const;
  std::pair<int, int> pilots() const { return {s1_, s2_}; }

 private:
  Region region_;
  double c1_, c2_;
  Scheme scheme_;
  int s1_, s2_;
  ShapeConstants shape_;
  std::unique_ptr<CompiledEstimator> e1_, e2_, e22_;
};

class HjSelector {
 public:
  /// Empty `candidates` selects {2, ..., lambda_m - 1}.
  HjSelector(const LatticeWindow& window, const Region& region, int lambda_m,
             std::vector<double> candidates, Scheme scheme);
  ScalingPlan select(const Eigen::MatrixXd& values, const SmoothStatistic& stat) const;
  const std::vector<double>& candidates() const { return candidates_; }

 private:
  Region region_;
  int lambda_m_;
  std::vector<double> candidates_;
  Scheme scheme_;
  std::unique_ptr<CompiledEstimator> proxy_;
  // inner_[r][c]: estimator on inner region r at candidate c
  std::vector<std::vector<CompiledEstimator>> inner_;
};

ScalingPlan npi_scaling(const FieldSample& sample, const Region& region, const SmoothStatistic& stat,
                        double c1, double c2, Scheme scheme);
ScalingPlan hj_scaling(const FieldSample& sample, const Region& region, const SmoothStatistic& stat,
                       int lambda_m, const std::vector<double>& candidates, Scheme scheme);

}  // namespace latblock
