#pragma once

#include "latblock/geometry.hpp"

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace latblock {

namespace model {
/// sigma(k) = exp(-sum beta_i |k_i|)
struct ExpSeparable { Vector beta; };
/// sigma(k) = exp(-sum beta_i k_i^2)
struct GaussSeparable { Vector beta; };
/// sigma(k) = exp(-beta |k|^2)
struct GaussIsotropic { double beta; int dim; };
struct WhiteNoise { int dim; };
/// Finite symmetric table, zero elsewhere.
struct Tabulated { int dim; std::map<std::vector<int>, double> values; };
}  // namespace model

using CovariogramModel = std::variant<model::ExpSeparable, model::GaussSeparable,
                                      model::GaussIsotropic, model::WhiteNoise, model::Tabulated>;

/// Autocovariance sigma(k) of the scalar field at integer lag k.
class Covariogram {
 public:
  static Covariogram exp_separable(Vector beta);
  static Covariogram gauss_separable(Vector beta);
  static Covariogram gauss_isotropic(double beta, int dim = 2);
  static Covariogram white_noise(int dim = 2);
  static Covariogram tabulated(int dim, const std::vector<std::pair<LatticePoint, double>>& entries);

  int dim() const { return dim_; }
  const CovariogramModel& model() const { return model_; }
  double sigma(const LatticePoint& k) const;
  /// Product form sigma(k) = prod_i axis_factor(i, k_i), when available.
  bool separable() const;
  double axis_factor(int axis, int k) const;
  /// Largest |k|_inf with nonzero sigma for finite-support models, -1 otherwise.
  int support_radius() const;
  std::string spec() const;

 private:
  Covariogram(CovariogramModel m, int dim) : model_(std::move(m)), dim_(dim) {}
  CovariogramModel model_;
  int dim_;
};

double sigma(const Covariogram& cov, const LatticePoint& k);

/// Sum of term(k) over Z^d by growing |k|_inf shells until a shell's absolute
/// contribution drops below rel_tol times the running |sum| (at least one shell).
/// A nonnegative `radius` sums exactly that ball instead.
double lattice_shell_sum(int dim, const std::function<double(const LatticePoint&)>& term,
                         double rel_tol, int max_radius, int radius = -1);

/// tau^2 = sum_k sigma(k).
double tau_sq(const Covariogram& cov, double rel_tol = 1e-10, int max_radius = 10000);

enum class TauMethod { lag_count, pair_sum };

/// N Var(sample mean) = N^{-1} sum_k N(k) sigma(k) on the given sites.
double exact_tau_n_sq(const LatticeWindow& window, const Covariogram& cov,
                      TauMethod method = TauMethod::lag_count);
double exact_tau_n_sq(const Region& region, const Covariogram& cov,
                      TauMethod method = TauMethod::lag_count);

}  // namespace latblock
