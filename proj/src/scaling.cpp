#include "latblock/scaling.hpp"

#include "latblock/error.hpp"
#include "latblock/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latblock {

int round_scale(double x, int upper) {
  if (!std::isfinite(x)) fail(ErrorKind::domain, "scale is not finite");
  double r = std::floor(x + 0.5);
  if (upper >= 1) r = std::min(r, static_cast<double>(upper));
  return static_cast<int>(std::max(1.0, r));
}

int max_subsample_scale(const Region& region) {
  return std::max(1, static_cast<int>(std::ceil(region.min_scale())) - 1);
}

ScalingPlan theoretical_scaling(int dim, double det_scale, double b0, double tau_sq,
                                const ShapeConstants& shape, Scheme scheme) {
  if (dim < 1) fail(ErrorKind::invalid_argument, "dimension must be positive");
  if (!(det_scale > 0)) fail(ErrorKind::invalid_argument, "det(Delta) must be positive");
  if (!(tau_sq > 0)) fail(ErrorKind::domain, "tau^2 must be positive");
  if (b0 == 0.0) fail(ErrorKind::zero_bias_constant, "B0 = 0: the bias-variance balance degenerates");
  if (!std::isfinite(b0)) fail(ErrorKind::domain, "B0 is not finite");
  const double d = dim;
  const double inner = scheme == Scheme::ol
                           ? det_scale * b0 * b0 / (d * shape.k0 * tau_sq * tau_sq)
                           : det_scale * shape.volume * b0 * b0 / (d * tau_sq * tau_sq);
  ScalingPlan plan;
  plan.method = "theory";
  plan.scheme = scheme;
  plan.lambda_opt_real = std::pow(inner, 1.0 / (d + 2.0));
  plan.lambda_opt_int = round_scale(plan.lambda_opt_real);
  plan.dim = dim;
  plan.det_scale = det_scale;
  plan.b0 = b0;
  plan.tau_sq = tau_sq;
  plan.k0 = shape.k0;
  plan.volume = shape.volume;
  return plan;
}

std::pair<int, int> npi_pilot_scales(double region_volume, int dim, double c1, double c2) {
  if (!(c1 > 0 && c2 > 0)) fail(ErrorKind::invalid_argument, "NPI constants must be positive");
  if (!(region_volume > 0)) fail(ErrorKind::invalid_argument, "region volume must be positive");
  return {round_scale(c1 * std::pow(region_volume, 1.0 / (dim + 2.0))),
          round_scale(c2 * std::pow(region_volume, 1.0 / (dim + 4.0)))};
}

NpiDiagnostics npi_pilots(double region_volume, int dim, double c1, double c2,
                          const std::function<double(int)>& tau_hat) {
  NpiDiagnostics out;
  out.c1 = c1;
  out.c2 = c2;
  std::tie(out.s1, out.s2) = npi_pilot_scales(region_volume, dim, c1, c2);
  out.tau_hat_sq = tau_hat(out.s1);
  out.tau_hat_sq_s2 = tau_hat(out.s2);
  out.tau_hat_sq_2s2 = tau_hat(2 * out.s2);
  out.b0_hat = 2.0 * out.s2 * (out.tau_hat_sq_2s2 - out.tau_hat_sq_s2);
  return out;
}

double hj_recalibrate(double argmin, double volume_ratio, int dim) {
  if (!(volume_ratio > 0)) fail(ErrorKind::invalid_argument, "volume ratio must be positive");
  return argmin * std::pow(volume_ratio, 1.0 / (2.0 + dim));
}

// ---------------------------------------------------------------------------

NpiSelector::NpiSelector(const LatticeWindow& window, const Region& region, double c1, double c2,
                         Scheme scheme)
    : region_(region), c1_(c1), c2_(c2), scheme_(scheme), shape_(k0(region.shape())) {
  std::tie(s1_, s2_) = npi_pilot_scales(region.volume(), region.dim(), c1, c2);
  auto compile = [&](int s) {
    if (s >= region.min_scale()) {
      fail(ErrorKind::degenerate_subsampling,
           "NPI pilot scale " + std::to_string(s) + " does not fit inside the region");
    }
    return std::make_unique<CompiledEstimator>(
        window, region, SubsampleSpec{region.shape(), static_cast<double>(s), scheme});
  };
  e1_ = compile(s1_);
  e2_ = compile(s2_);
  e22_ = compile(2 * s2_);
}

ScalingPlan NpiSelector::select(const Eigen::MatrixXd& values, const SmoothStatistic& stat) const {
  auto curve = [&](int s) {
    if (s == s1_) return e1_->tau_hat_sq(values, stat);
    if (s == s2_) return e2_->tau_hat_sq(values, stat);
    return e22_->tau_hat_sq(values, stat);
  };
  const NpiDiagnostics diag = npi_pilots(region_.volume(), region_.dim(), c1_, c2_, curve);
  ScalingPlan plan =
      theoretical_scaling(region_.dim(), region_.det_scale(), diag.b0_hat, diag.tau_hat_sq, shape_, scheme_);
  plan.method = "npi";
  plan.lambda_opt_int = round_scale(plan.lambda_opt_real, max_subsample_scale(region_));
  plan.npi = diag;
  return plan;
}

HjSelector::HjSelector(const LatticeWindow& window, const Region& region, int lambda_m,
                       std::vector<double> candidates, Scheme scheme)
    : region_(region), lambda_m_(lambda_m), candidates_(std::move(candidates)), scheme_(scheme) {
  if (!(lambda_m >= 1 && lambda_m < region.min_scale())) {
    fail(ErrorKind::invalid_argument, "lambda_m must be below the smallest region scaling");
  }
  if (candidates_.empty()) {
    for (int c = 2; c < lambda_m; ++c) candidates_.push_back(c);
  }
  for (double c : candidates_) {
    if (!(c > 0 && c < lambda_m)) {
      fail(ErrorKind::invalid_argument, "HJ candidates must lie in (0, lambda_m)");
    }
  }
  if (candidates_.size() < 5) {
    fail(ErrorKind::insufficient_candidates,
         "HJ needs at least 5 candidate scales, got " + std::to_string(candidates_.size()) +
             " for lambda_m = " + std::to_string(lambda_m));
  }
  std::sort(candidates_.begin(), candidates_.end());
  proxy_ = std::make_unique<CompiledEstimator>(
      window, region, SubsampleSpec{region.shape(), static_cast<double>(lambda_m), scheme});
  const SubsampleIndexSet outer =
      enumerate_ol(region, SubsampleSpec{region.shape(), static_cast<double>(lambda_m), Scheme::ol});
  const int d = region.dim();
  for (Eigen::Index r = 0; r < outer.size(); ++r) {
    const Region inner(region.shape(), Vector::Constant(d, lambda_m), region.shift(), outer.offsets.col(r));
    std::vector<CompiledEstimator> row;
    for (double c : candidates_) row.emplace_back(window, inner, SubsampleSpec{region.shape(), c, scheme});
    inner_.push_back(std::move(row));
  }
}

ScalingPlan HjSelector::select(const Eigen::MatrixXd& values, const SmoothStatistic& stat) const {
  HjDiagnostics diag;
  diag.lambda_m = lambda_m_;
  diag.candidates = candidates_;
  diag.inner_regions = static_cast<Eigen::Index>(inner_.size());
  diag.proxy = proxy_->tau_hat_sq(values, stat);
  diag.mse.assign(candidates_.size(), 0.0);
  for (const auto& row : inner_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double dev = row[c].tau_hat_sq(values, stat) - diag.proxy;
      diag.mse[c] += dev * dev;
    }
  }
  std::size_t best = 0;
  for (std::size_t c = 0; c < diag.mse.size(); ++c) {
    diag.mse[c] /= static_cast<double>(inner_.size());
    if (diag.mse[c] < diag.mse[best]) best = c;
  }
  diag.argmin = candidates_[best];
  const double ratio = region_.det_scale() / std::pow(static_cast<double>(lambda_m_), region_.dim());
  diag.factor = std::pow(ratio, 1.0 / (2.0 + region_.dim()));
  ScalingPlan plan;
  plan.method = "hj";
  plan.scheme = scheme_;
  plan.dim = region_.dim();
  plan.det_scale = region_.det_scale();
  plan.volume = region_.shape().volume();
  plan.lambda_opt_real = hj_recalibrate(diag.argmin, ratio, region_.dim());
  plan.lambda_opt_int = round_scale(plan.lambda_opt_real, max_subsample_scale(region_));
  plan.hj = std::move(diag);
  return plan;
}

ScalingPlan npi_scaling(const FieldSample& sample, const Region& region, const SmoothStatistic& stat,
                        double c1, double c2, Scheme scheme) {
  return NpiSelector(sample.window, region, c1, c2, scheme).select(sample.values, stat);
}

ScalingPlan hj_scaling(const FieldSample& sample, const Region& region, const SmoothStatistic& stat,
                       int lambda_m, const std::vector<double>& candidates, Scheme scheme) {
  return HjSelector(sample.window, region, lambda_m, candidates, scheme).select(sample.values, stat);
}

}  // namespace latblock
