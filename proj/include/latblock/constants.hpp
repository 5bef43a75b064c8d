#pragma once

#include "latblock/covariance.hpp"
#include "latblock/geometry.hpp"

#include <map>
#include <optional>
#include <vector>

namespace latblock {

enum class Source { analytic, numeric };
std::string to_string(Source source);

struct ShapeConstants {
  double k0 = 0.0;
  double k1 = 0.0;  // k0 * volume
  double volume = 0.0;
  Source source = Source::analytic;
};

struct QuadratureOptions {
  double step = 0.0;               // 0 selects a per-dimension default
  std::int64_t max_cells = 1 << 25;  // padded FFT grid size limit
};

std::optional<double> k0_analytic(const Template& shape);
/// Raster autocorrelation of the indicator via FFT: sum_x g(x)^2 / |R0|^3.
ShapeConstants k0_numeric(const Template& shape, const QuadratureOptions& options = {});
ShapeConstants k0(const Template& shape);
double k1(const Template& shape);
/// NOL:OL relative efficiency K1^{2/(d+2)}.
double are(const Template& shape);
double are(const Template& shape, int dim);

struct VWeightOptions {
  double epsilon = 1e-2;  // Richardson pair (epsilon, epsilon / 2)
  int lines = 4096;
};

std::optional<double> v_weight_analytic(const Template& shape, const LatticePoint& k);
double v_weight_numeric(const Template& shape, const LatticePoint& k,
                        const VWeightOptions& options = {});
double v_weight(const Template& shape, const LatticePoint& k);

struct BiasWeights {
  std::map<std::vector<int>, double> values;
  Source source = Source::analytic;
};
BiasWeights bias_weights(const Template& shape, int radius);

/// B0 = |R0|^{-1} sum_k V(k) sigma(k).
double b0(const Template& shape, const Covariogram& cov, double rel_tol = 1e-10,
          bool linear_statistic = true);

}  // namespace latblock
