#include "latblock/constants.hpp"

#include "fft_nd.hpp"
#include "latblock/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace latblock {

namespace {

constexpr double kPi = std::numbers::pi;

double default_step(int d) {
  switch (d) {
    case 1: return 1.0 / 4096;
    case 2: return 1.0 / 512;
    case 3: return 1.0 / 96;
    default: return 1.0 / 16;
  }
}

int fft_size(int n) {
  // Smallest 2^a 3^b 5^c >= n keeps the mixed-radix transform fast.
  for (int m = n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

double trapezoid_c(double b1, double b2) {
  const double rho = b2 / b1;
  return (1.0 + 2.0 * (rho - 1.0) / (rho + 1.0)) / ((rho + 1.0) * (rho + 1.0));
}

}  // namespace

std::string to_string(Source source) { return source == Source::analytic ? "analytic" : "numeric"; }

std::optional<double> k0_analytic(const Template& shape) {
  const double disk = 1.0 - 16.0 / (3.0 * kPi * kPi);
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::Hypercube>) return std::pow(2.0 / 3.0, s.dim);
        else if constexpr (std::is_same_v<T, shape::RotatedRectangle>) return 4.0 / 9.0;
        else if constexpr (std::is_same_v<T, shape::Circle>) return disk;
        else if constexpr (std::is_same_v<T, shape::RightTriangle> ||
                           std::is_same_v<T, shape::IsoscelesTriangle>) return 0.4;
        else if constexpr (std::is_same_v<T, shape::Trapezoid>)
          return 0.4 * (1.0 + 4.0 * trapezoid_c(s.b1, s.b2) / 9.0);
        else if constexpr (std::is_same_v<T, shape::Hexagon>) return 37.0 / 81.0;
        else if constexpr (std::is_same_v<T, shape::Sphere>) return 34.0 / 105.0;
        else if constexpr (std::is_same_v<T, shape::Cylinder>) return 2.0 / 3.0 * disk;
        else return std::nullopt;
      },
      shape.kind());
}

ShapeConstants k0_numeric(const Template& shape, const QuadratureOptions& options) {
  const int d = shape.dim();
  const double h = options.step > 0 ? options.step : default_step(d);
  std::vector<int> first(static_cast<std::size_t>(d)), count(static_cast<std::size_t>(d)),
      dims(static_cast<std::size_t>(d));
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) {
    const auto a = static_cast<std::size_t>(i);
    first[a] = static_cast<int>(std::floor(shape.lower()[i] / h));
    count[a] = static_cast<int>(std::ceil(shape.upper()[i] / h)) - first[a];
    dims[a] = fft_size(2 * count[a] - 1);
    total *= dims[a];
    if (total > options.max_cells) {
      fail(ErrorKind::quadrature_budget_exceeded,
           "K0 quadrature grid exceeds " + std::to_string(options.max_cells) + " cells");
    }
  }
  std::vector<std::complex<double>> grid(static_cast<std::size_t>(total));
  double inside = 0.0;
  LatticePoint lo = LatticePoint::Zero(d), hi(d);
  for (int i = 0; i < d; ++i) hi[i] = count[static_cast<std::size_t>(i)] - 1;
  Vector x(d);
  for_each_lattice_point(lo, hi, [&](const LatticePoint& z) {
    std::size_t index = 0;
    for (int i = 0; i < d; ++i) {
      const auto a = static_cast<std::size_t>(i);
      x[i] = (first[a] + z[i] + 0.5) * h;
      index = index * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(z[i]);
    }
    if (body_contains(shape.body(), x, 0.0)) {
      grid[index] = 1.0;
      inside += 1.0;
    }
  });
  if (inside == 0.0) fail(ErrorKind::quadrature_budget_exceeded, "quadrature grid too coarse");
  detail::fft_nd(grid, dims, false);
  // Parseval: sum_m A(m)^2 = M^{-1} sum |F|^4 with A the cell autocorrelation.
  double sum4 = 0.0;
  for (const auto& f : grid) {
    const double p = std::norm(f);
    sum4 += p * p;
  }
  const double k0 = sum4 / static_cast<double>(total) / (inside * inside * inside);
  return {k0, k0 * shape.volume(), shape.volume(), Source::numeric};
}

ShapeConstants k0(const Template& shape) {
  if (const auto value = k0_analytic(shape)) {
    return {*value, *value * shape.volume(), shape.volume(), Source::analytic};
  }
  return k0_numeric(shape);
}

double k1(const Template& shape) { return k0(shape).k1; }

double are(const Template& shape) {
  return std::pow(k1(shape), 2.0 / (shape.dim() + 2.0));
}

double are(const Template& shape, int dim) {
  if (dim != shape.dim()) fail(ErrorKind::dimension_mismatch, "dimension does not match template");
  return are(shape);
}

std::optional<double> v_weight_analytic(const Template& shape, const LatticePoint& k) {
  if (k.size() != shape.dim()) {
    fail(ErrorKind::dimension_mismatch, "lag dimension does not match template");
  }
  const Vector kv = k.cast<double>();
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::Hypercube>) {
          return kv.lpNorm<1>();
        } else if constexpr (std::is_same_v<T, shape::RotatedRectangle>) {
          const double c = std::cos(s.theta), n = std::sin(s.theta);
          return s.l2 * std::abs(kv[0] * c - kv[1] * n) + s.l1 * std::abs(kv[0] * n + kv[1] * c);
        } else if constexpr (std::is_same_v<T, shape::Circle>) {
          return 2.0 * s.r * kv.norm();
        } else if constexpr (std::is_same_v<T, shape::RightTriangle>) {
          if (kv[0] * kv[1] >= 0) return kv.lpNorm<1>();
          return kv.lpNorm<Eigen::Infinity>();
        } else if constexpr (std::is_same_v<T, shape::IsoscelesTriangle>) {
          return (std::abs(kv[1]) + std::max(2.0 * std::abs(kv[0]), std::abs(kv[1]))) / 2.0;
        } else if constexpr (std::is_same_v<T, shape::Hexagon>) {
          return s.side *
                 (std::abs(kv[1]) + std::max(std::sqrt(3.0) * std::abs(kv[0]), std::abs(kv[1])));
        } else if constexpr (std::is_same_v<T, shape::Trapezoid>) {
          // Half the edge-length-weighted sum of |n_e . k| over the boundary.
          const auto& p = std::get<Polytope>(shape.body());
          double sum = 0.0;
          const Eigen::Index n = p.vertices.cols();
          for (Eigen::Index e = 0; e < n; ++e) {
            const double len = (p.vertices.col((e + 1) % n) - p.vertices.col(e)).norm();
            sum += len * std::abs(p.faces[static_cast<std::size_t>(e)].normal.dot(kv));
          }
          return sum / 2.0;
        } else if constexpr (std::is_same_v<T, shape::Sphere>) {
          return kPi * s.r * s.r * kv.norm();
        } else if constexpr (std::is_same_v<T, shape::Cylinder>) {
          return kPi * s.r * s.r * std::abs(kv[2]) + 2.0 * s.r * s.h * kv.head<2>().norm();
        } else {
          return std::nullopt;
        }
      },
      shape.kind());
}

double v_weight_numeric(const Template& shape, const LatticePoint& k, const VWeightOptions& options) {
  if (k.size() != shape.dim()) {
    fail(ErrorKind::dimension_mismatch, "lag dimension does not match template");
  }
  if (shape.dim() > 3) fail(ErrorKind::unsupported_shape, "numeric V(k) supports d <= 3");
  if (k.isZero()) return 0.0;
  const Vector kv = k.cast<double>();
  const double len = kv.norm();
  const Vector u = kv / len;
  // V is 1-homogeneous; the secant is taken along the unit direction.
  auto secant = [&](double eps) {
    return set_covariance_deficit(shape, eps * u, options.lines) / eps;
  };
  const double coarse = secant(options.epsilon);
  const double fine = secant(options.epsilon / 2.0);
  return len * (2.0 * fine - coarse);
}

double v_weight(const Template& shape, const LatticePoint& k) {
  if (const auto value = v_weight_analytic(shape, k)) return *value;
  return v_weight_numeric(shape, k);
}

BiasWeights bias_weights(const Template& shape, int radius) {
  if (radius < 0) fail(ErrorKind::invalid_argument, "radius must be nonnegative");
  const int d = shape.dim();
  BiasWeights out;
  out.source = v_weight_analytic(shape, LatticePoint::Zero(d)) ? Source::analytic : Source::numeric;
  for_each_lattice_point(LatticePoint::Constant(d, -radius), LatticePoint::Constant(d, radius),
                         [&](const LatticePoint& k) {
                           out.values[std::vector<int>(k.data(), k.data() + d)] = v_weight(shape, k);
                         });
  return out;
}

double b0(const Template& shape, const Covariogram& cov, double rel_tol, bool linear_statistic) {
  const int d = shape.dim();
  if (cov.dim() != d) fail(ErrorKind::dimension_mismatch, "covariogram and template dimensions differ");
  if (d == 1 && !linear_statistic) {
    fail(ErrorKind::unsupported_d1_nonlinear,
         "d = 1 bias constant for nonlinear statistics is not supported");
  }
  const bool analytic = v_weight_analytic(shape, LatticePoint::Zero(d)).has_value();
  // Numeric weights: cache by primitive direction, V(m p) = m V(p), V(-p) = V(p).
  std::map<std::vector<int>, double> cache;
  auto weight = [&](const LatticePoint& k) -> double {
    if (analytic) return *v_weight_analytic(shape, k);
    if (k.isZero()) return 0.0;
    int g = 0;
    for (int i = 0; i < d; ++i) g = std::gcd(g, std::abs(k[i]));
    LatticePoint p = k / g;
    for (int i = 0; i < d; ++i) {
      if (p[i] != 0) {
        if (p[i] < 0) p = -p;
        break;
      }
    }
    std::vector<int> key(p.data(), p.data() + d);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, v_weight_numeric(shape, p)).first;
    return g * it->second;
  };
  auto term = [&](const LatticePoint& k) {
    const double s = cov.sigma(k);
    return s == 0.0 ? 0.0 : weight(k) * s;
  };
  const double sum = lattice_shell_sum(d, term, rel_tol, 10000, cov.support_radius());
  return sum / shape.volume();
}

}  // namespace latblock
