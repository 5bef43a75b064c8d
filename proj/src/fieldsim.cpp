#include "latblock/fieldsim.hpp"

#include "fft_nd.hpp"
#include "latblock/error.hpp"

#include <cmath>
#include <numbers>

namespace latblock {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t counter)
    : seed_(seed), replicate_(replicate), counter_(counter),
      key_(mix64(mix64(seed) ^ mix64(replicate ^ 0x5851f42d4c957f2dULL))) {}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t out = mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_);
  ++counter_;
  return mix64(out ^ key_);
}

double RngStream::next_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::next_normal() { return normal_quantile(next_uniform()); }

RngStream substream(std::uint64_t master, std::uint64_t replicate) {
  return RngStream(master, replicate, 0);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::domain, "normal quantile needs p in (0, 1)");
  // Rational approximation (relative error ~1e-9) refined by one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

SimMethod parse_sim_method(const std::string& text) {
  if (text == "auto") return SimMethod::automatic;
  if (text == "cholesky") return SimMethod::cholesky;
  if (text == "circulant") return SimMethod::circulant;
  fail(ErrorKind::parse, "unknown simulation method '" + text + "' (auto, cholesky, circulant)");
}

Generator::Generator(const Covariogram& cov, const LatticeWindow& window, SimMethod method,
                     const GeneratorOptions& options)
    : window_(window) {
  if (window_.empty()) fail(ErrorKind::empty_window, "cannot simulate on an empty window");
  if (window_.dim() != cov.dim()) {
    fail(ErrorKind::dimension_mismatch, "window and covariogram dimensions differ");
  }
  const Eigen::Index n = window_.size();
  if (method != SimMethod::cholesky) {
    const bool wanted = method == SimMethod::circulant || n > options.max_cholesky_sites;
    if (wanted && try_circulant(cov, options.max_embedding_growth)) {
      method_ = "circulant";
      return;
    }
  }
  if (n > options.max_cholesky_sites) {
    fail(ErrorKind::window_too_large,
         "Cholesky path limited to " + std::to_string(options.max_cholesky_sites) + " sites, window has " +
             std::to_string(n) + (fallback_.empty() ? "" : " (circulant: " + fallback_ + ")"));
  }
  Eigen::MatrixXd c(n, n);
  const LatticePoints& s = window_.sites();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) c(i, j) = c(j, i) = cov.sigma(s.col(i) - s.col(j));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) {
    fail(ErrorKind::not_positive_definite, "covariance matrix is not positive definite on this window");
  }
  factor_ = llt.matrixL();
  method_ = "cholesky";
}

bool Generator::try_circulant(const Covariogram& cov, int growth_limit) {
  const int d = window_.dim();
  std::int64_t box = 1;
  std::vector<int> n(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    n[static_cast<std::size_t>(i)] = window_.upper()[i] - window_.lower()[i] + 1;
    box *= n[static_cast<std::size_t>(i)];
  }
  if (box != window_.size()) {
    fallback_ = "window is not a full rectangle";
    return false;
  }
  std::vector<int> m(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i)] = std::max(1, 2 * (n[static_cast<std::size_t>(i)] - 1));
  for (int attempt = 0; attempt <= growth_limit; ++attempt) {
    std::size_t total = 1;
    for (int mi : m) total *= static_cast<std::size_t>(mi);
    std::vector<std::complex<double>> base(total);
    LatticePoint lo = LatticePoint::Zero(d), hi(d);
    for (int i = 0; i < d; ++i) hi[i] = m[static_cast<std::size_t>(i)] - 1;
    std::size_t cell = 0;
    for_each_lattice_point(lo, hi, [&](const LatticePoint& j) {
      LatticePoint k(d);
      for (int i = 0; i < d; ++i) {
        const int mi = m[static_cast<std::size_t>(i)];
        k[i] = 2 * j[i] <= mi ? j[i] : j[i] - mi;
      }
      base[cell++] = cov.sigma(k);
    });
    detail::fft_nd(base, m, false);
    double largest = 0.0, smallest = 0.0;
    for (const auto& v : base) {
      largest = std::max(largest, v.real());
      smallest = std::min(smallest, v.real());
    }
    if (smallest >= -1e-10 * largest) {
      embed_dims_ = m;
      sqrt_eigen_.resize(total);
      for (std::size_t t = 0; t < total; ++t) {
        sqrt_eigen_[t] = std::sqrt(std::max(0.0, base[t].real()) / static_cast<double>(total));
      }
      window_cells_.clear();
      for (Eigen::Index s = 0; s < window_.size(); ++s) {
        std::size_t key = 0;
        for (int i = 0; i < d; ++i) {
          key = key * static_cast<std::size_t>(m[static_cast<std::size_t>(i)]) +
                static_cast<std::size_t>(window_.sites()(i, s) - window_.lower()[i]);
        }
        window_cells_.push_back(key);
      }
      return true;
    }
    for (auto& mi : m) mi *= 2;
  }
  fallback_ = "circulant embedding is not nonnegative definite";
  return false;
}

Eigen::RowVectorXd Generator::sample(RngStream& stream) const {
  if (method_ == "cholesky") {
    Vector z(factor_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = stream.next_normal();
    return (factor_.triangularView<Eigen::Lower>() * z).transpose();
  }
  std::vector<std::complex<double>> w(sqrt_eigen_.size());
  for (std::size_t t = 0; t < w.size(); ++t) {
    const double re = stream.next_normal();
    const double im = stream.next_normal();
    w[t] = sqrt_eigen_[t] * std::complex<double>(re, im);
  }
  detail::fft_nd(w, embed_dims_, false);
  Eigen::RowVectorXd out(window_.size());
  for (Eigen::Index s = 0; s < out.size(); ++s) out[s] = w[window_cells_[static_cast<std::size_t>(s)]].real();
  return out;
}

double Generator::reconstruction_error(const Covariogram& cov) const {
  if (method_ != "cholesky") fail(ErrorKind::invalid_argument, "no Cholesky factor to check");
  const Eigen::MatrixXd rebuilt = factor_ * factor_.transpose();
  const LatticePoints& s = window_.sites();
  Eigen::MatrixXd c(rebuilt.rows(), rebuilt.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, j) = cov.sigma(s.col(i) - s.col(j));
  }
  return (rebuilt - c).norm() / c.norm();
}

Generator build_generator(const Covariogram& cov, const LatticeWindow& window, SimMethod method,
                          const GeneratorOptions& options) {
  return Generator(cov, window, method, options);
}

FieldSample sample_field(const Generator& gen, RngStream& stream) {
  return FieldSample(gen.window(), gen.sample(stream));
}

}  // namespace latblock
