#include "latblock/covariance.hpp"

#include "latblock/error.hpp"
#include "latblock/format.hpp"

#include <cmath>

namespace latblock {

namespace {

void check_betas(const Vector& beta) {
  if (beta.size() < 1) fail(ErrorKind::invalid_argument, "covariogram needs at least one beta");
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (!(beta[i] > 0) || !std::isfinite(beta[i])) {
      fail(ErrorKind::invalid_argument, "covariogram betas must be positive and finite");
    }
  }
}

std::string join_betas(const Vector& beta) {
  std::string out;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    out += (i ? ",b" : "b") + std::to_string(i + 1) + "=" + format_number(beta[i]);
  }
  return out;
}

// Visits every k with |k|_inf == radius.
void for_each_shell_point(int dim, int radius, const std::function<void(const LatticePoint&)>& visit) {
  if (radius == 0) {
    visit(LatticePoint::Zero(dim));
    return;
  }
  // Split by the first axis attaining |k_j| = radius.
  for (int j = 0; j < dim; ++j) {
    LatticePoint lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      const int r = i < j ? radius - 1 : radius;
      lo[i] = -r;
      hi[i] = r;
    }
    for (int sign : {-1, 1}) {
      lo[j] = hi[j] = sign * radius;
      for_each_lattice_point(lo, hi, visit);
    }
  }
}

}  // namespace

Covariogram Covariogram::exp_separable(Vector beta) {
  check_betas(beta);
  const int d = static_cast<int>(beta.size());
  return Covariogram(model::ExpSeparable{std::move(beta)}, d);
}

Covariogram Covariogram::gauss_separable(Vector beta) {
  check_betas(beta);
  const int d = static_cast<int>(beta.size());
  return Covariogram(model::GaussSeparable{std::move(beta)}, d);
}

Covariogram Covariogram::gauss_isotropic(double beta, int dim) {
  check_betas(Vector::Constant(1, beta));
  if (dim < 1) fail(ErrorKind::invalid_argument, "covariogram dimension must be positive");
  return Covariogram(model::GaussIsotropic{beta, dim}, dim);
}

Covariogram Covariogram::white_noise(int dim) {
  if (dim < 1) fail(ErrorKind::invalid_argument, "covariogram dimension must be positive");
  return Covariogram(model::WhiteNoise{dim}, dim);
}

Covariogram Covariogram::tabulated(int dim,
                                   const std::vector<std::pair<LatticePoint, double>>& entries) {
  if (dim < 1) fail(ErrorKind::invalid_argument, "covariogram dimension must be positive");
  model::Tabulated table{dim, {}};
  for (const auto& [k, value] : entries) {
    if (k.size() != dim) fail(ErrorKind::dimension_mismatch, "table lag has wrong dimension");
    if (!std::isfinite(value)) fail(ErrorKind::invalid_argument, "table values must be finite");
    std::vector<int> key(k.data(), k.data() + dim);
    if (!table.values.emplace(key, value).second) {
      fail(ErrorKind::invalid_argument, "duplicate lag in covariogram table");
    }
  }
  const auto zero = table.values.find(std::vector<int>(static_cast<std::size_t>(dim), 0));
  if (zero == table.values.end() || !(zero->second > 0)) {
    fail(ErrorKind::invalid_argument, "covariogram table needs sigma(0) > 0");
  }
  for (const auto& [key, value] : table.values) {
    std::vector<int> neg(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) neg[i] = -key[i];
    const auto it = table.values.find(neg);
    const double mirror = it == table.values.end() ? 0.0 : it->second;
    if (std::abs(mirror - value) > 1e-12 * std::max(1.0, std::abs(value))) {
      fail(ErrorKind::invalid_argument, "covariogram table is not symmetric in k");
    }
  }
  return Covariogram(std::move(table), dim);
}

double Covariogram::sigma(const LatticePoint& k) const {
  if (k.size() != dim_) fail(ErrorKind::dimension_mismatch, "lag dimension does not match covariogram");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, model::ExpSeparable>) {
          return std::exp(-m.beta.dot(k.cast<double>().cwiseAbs()));
        } else if constexpr (std::is_same_v<T, model::GaussSeparable>) {
          return std::exp(-m.beta.dot(k.cast<double>().cwiseAbs2()));
        } else if constexpr (std::is_same_v<T, model::GaussIsotropic>) {
          return std::exp(-m.beta * k.cast<double>().squaredNorm());
        } else if constexpr (std::is_same_v<T, model::WhiteNoise>) {
          return k.isZero() ? 1.0 : 0.0;
        } else {
          const auto it = m.values.find(std::vector<int>(k.data(), k.data() + k.size()));
          return it == m.values.end() ? 0.0 : it->second;
        }
      },
      model_);
}

bool Covariogram::separable() const { return !std::holds_alternative<model::Tabulated>(model_); }

double Covariogram::axis_factor(int axis, int k) const {
  const double a = std::abs(static_cast<double>(k));
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, model::ExpSeparable>) {
          return std::exp(-m.beta[axis] * a);
        } else if constexpr (std::is_same_v<T, model::GaussSeparable>) {
          return std::exp(-m.beta[axis] * a * a);
        } else if constexpr (std::is_same_v<T, model::GaussIsotropic>) {
          return std::exp(-m.beta * a * a);
        } else if constexpr (std::is_same_v<T, model::WhiteNoise>) {
          return k == 0 ? 1.0 : 0.0;
        } else {
          fail(ErrorKind::invalid_argument, "tabulated covariograms have no product form");
        }
      },
      model_);
}

int Covariogram::support_radius() const {
  if (std::holds_alternative<model::WhiteNoise>(model_)) return 0;
  if (const auto* t = std::get_if<model::Tabulated>(&model_)) {
    int r = 0;
    for (const auto& [key, value] : t->values) {
      if (value == 0.0) continue;
      for (int c : key) r = std::max(r, std::abs(c));
    }
    return r;
  }
  return -1;
}

std::string Covariogram::spec() const {
  return std::visit(
      [&](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, model::ExpSeparable>) {
          return "expsep:" + join_betas(m.beta);
        } else if constexpr (std::is_same_v<T, model::GaussSeparable>) {
          return "gausssep:" + join_betas(m.beta);
        } else if constexpr (std::is_same_v<T, model::GaussIsotropic>) {
          return "gaussiso:b=" + format_number(m.beta) + ",d=" + std::to_string(m.dim);
        } else if constexpr (std::is_same_v<T, model::WhiteNoise>) {
          return "white:d=" + std::to_string(m.dim);
        } else {
          return "table:" + std::to_string(m.values.size()) + "lags";
        }
      },
      model_);
}

double sigma(const Covariogram& cov, const LatticePoint& k) { return cov.sigma(k); }

double lattice_shell_sum(int dim, const std::function<double(const LatticePoint&)>& term,
                         double rel_tol, int max_radius, int radius) {
  if (!(rel_tol > 0)) fail(ErrorKind::invalid_argument, "rel_tol must be positive");
  double total = 0.0;
  const int last = radius >= 0 ? radius : max_radius;
  for (int r = 0; r <= last; ++r) {
    double shell = 0.0;
    double shell_abs = 0.0;
    for_each_shell_point(dim, r, [&](const LatticePoint& k) {
      const double t = term(k);
      shell += t;
      shell_abs += std::abs(t);
    });
    total += shell;
    if (radius < 0 && r >= 1 && shell_abs <= rel_tol * std::abs(total)) return total;
    if (radius < 0 && r >= 1 && shell_abs == 0.0) return total;
  }
  if (radius >= 0) return total;
  fail(ErrorKind::non_convergent,
       "lattice sum did not converge within radius " + std::to_string(max_radius));
}

double tau_sq(const Covariogram& cov, double rel_tol, int max_radius) {
  if (!(rel_tol > 0)) fail(ErrorKind::invalid_argument, "rel_tol must be positive");
  const int support = cov.support_radius();
  if (!cov.separable() || support >= 0) {
    return lattice_shell_sum(cov.dim(), [&](const LatticePoint& k) { return cov.sigma(k); },
                             rel_tol, max_radius, support);
  }
  double product = 1.0;
  for (int axis = 0; axis < cov.dim(); ++axis) {
    double sum = cov.axis_factor(axis, 0);
    bool converged = false;
    for (int k = 1; k <= max_radius; ++k) {
      const double pair = 2.0 * cov.axis_factor(axis, k);
      sum += pair;
      if (std::abs(pair) <= rel_tol * std::abs(sum)) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      fail(ErrorKind::non_convergent,
           "tau^2 series did not converge within radius " + std::to_string(max_radius));
    }
    product *= sum;
  }
  return product;
}

double exact_tau_n_sq(const LatticeWindow& window, const Covariogram& cov, TauMethod method) {
  if (window.empty()) fail(ErrorKind::empty_window, "exact variance needs a nonempty window");
  if (window.dim() != cov.dim()) {
    fail(ErrorKind::dimension_mismatch, "window and covariogram dimensions differ");
  }
  const Eigen::Index n = window.size();
  const LatticePoints& sites = window.sites();
  double total = 0.0;
  if (method == TauMethod::pair_sum) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        total += cov.sigma(sites.col(j) - sites.col(i));
      }
    }
  } else {
    const LatticePoint span = window.upper() - window.lower();
    for_each_lattice_point(-span, span, [&](const LatticePoint& k) {
      const double s = cov.sigma(k);
      if (s == 0.0) return;
      std::int64_t pairs = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (window.contains(sites.col(i) + k)) ++pairs;
      }
      total += static_cast<double>(pairs) * s;
    });
  }
  return total / static_cast<double>(n);
}

double exact_tau_n_sq(const Region& region, const Covariogram& cov, TauMethod method) {
  return exact_tau_n_sq(lattice_sites(region), cov, method);
}

}  // namespace latblock
