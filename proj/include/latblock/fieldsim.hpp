#pragma once

#include "latblock/covariance.hpp"
#include "latblock/estimators.hpp"

#include <cstdint>
#include <string>

namespace latblock {

/// Counter-based stream: output k is a pure function of (seed, replicate, k).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t counter = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double next_uniform();
  /// Standard normal by inverse-CDF transform of next_uniform().
  double next_normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replicate() const { return replicate_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_, replicate_, counter_, key_;
};

RngStream substream(std::uint64_t master, std::uint64_t replicate);

/// Standard normal quantile, accurate to about 1e-15 relative.
double normal_quantile(double p);

enum class SimMethod { automatic, cholesky, circulant };
SimMethod parse_sim_method(const std::string& text);

struct GeneratorOptions {
  Eigen::Index max_cholesky_sites = 5000;
  int max_embedding_growth = 4;
};

/// Exact mean-zero Gaussian sampler for one covariogram on one lattice window.
class Generator {
 public:
  Generator(const Covariogram& cov, const LatticeWindow& window, SimMethod method = SimMethod::automatic,
            const GeneratorOptions& options = {});

  const LatticeWindow& window() const { return window_; }
  /// "cholesky" or "circulant".
  const std::string& method() const { return method_; }
  /// Why the circulant path was not used, when it was requested.
  const std::string& fallback_reason() const { return fallback_; }
  const Eigen::MatrixXd& factor() const { return factor_; }
  const std::vector<int>& embedding() const { return embed_dims_; }

  Eigen::RowVectorXd sample(RngStream& stream) const;
  /// |L L^T - C|_F / |C|_F for the Cholesky factor.
  double reconstruction_error(const Covariogram& cov) const;

 private:
  bool try_circulant(const Covariogram& cov, int growth_limit);

  LatticeWindow window_;
  std::string method_, fallback_;
  Eigen::MatrixXd factor_;
  std::vector<int> embed_dims_;
  std::vector<double> sqrt_eigen_;  // sqrt(lambda / M) per embedding cell
  std::vector<std::size_t> window_cells_;
};

Generator build_generator(const Covariogram& cov, const LatticeWindow& window,
                          SimMethod method = SimMethod::automatic, const GeneratorOptions& options = {});
FieldSample sample_field(const Generator& gen, RngStream& stream);

}  // namespace latblock
