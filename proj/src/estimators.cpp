#include "latblock/estimators.hpp"

#include "latblock/csv.hpp"
#include "latblock/error.hpp"
#include "latblock/format.hpp"

#include <algorithm>
#include <cmath>

namespace latblock {

// ---------------------------------------------------------------------------
// Statistics

SmoothStatistic SmoothStatistic::mean() {
  return {"mean", 1, true, [](const Vector& x) { return x[0]; },
          [](const Vector&) { return Vector::Ones(1); }};
}

SmoothStatistic SmoothStatistic::ratio() {
  return {"ratio", 2, false,
          [](const Vector& x) {
            if (x[1] == 0.0) fail(ErrorKind::domain, "ratio of means with zero denominator");
            return x[0] / x[1];
          },
          [](const Vector& x) {
            Vector g(2);
            g << 1.0 / x[1], -x[0] / (x[1] * x[1]);
            return g;
          }};
}

SmoothStatistic SmoothStatistic::moment_variance() {
  return {"momvar", 2, false, [](const Vector& x) { return x[1] - x[0] * x[0]; },
          [](const Vector& x) {
            Vector g(2);
            g << -2.0 * x[0], 1.0;
            return g;
          }};
}

SmoothStatistic SmoothStatistic::from_name(const std::string& name) {
  if (name == "mean") return mean();
  if (name == "ratio") return ratio();
  if (name == "momvar") return moment_variance();
  fail(ErrorKind::parse, "unknown statistic '" + name + "' (expected mean, ratio or momvar)");
}

double SmoothStatistic::operator()(const Vector& x) const {
  if (x.size() != arity) fail(ErrorKind::dimension_mismatch, "statistic arity mismatch");
  const double value = h(x);
  if (!std::isfinite(value)) fail(ErrorKind::domain, "statistic " + name + " is not finite here");
  return value;
}

// ---------------------------------------------------------------------------
// Samples

FieldSample::FieldSample(LatticeWindow w, Eigen::MatrixXd v) : window(std::move(w)), values(std::move(v)) {
  if (values.cols() != window.size()) {
    fail(ErrorKind::dimension_mismatch, "one value vector per site is required");
  }
  if (!values.allFinite()) fail(ErrorKind::invalid_argument, "field values must be finite");
}

FieldSample FieldSample::from_unordered(const LatticePoints& sites, const Eigen::MatrixXd& values) {
  if (values.cols() != sites.cols()) {
    fail(ErrorKind::dimension_mismatch, "one value vector per site is required");
  }
  LatticeWindow window(sites);
  Eigen::MatrixXd ordered(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < sites.cols(); ++i) ordered.col(window.find(sites.col(i))) = values.col(i);
  return FieldSample(std::move(window), std::move(ordered));
}

Eigen::MatrixXd lift_scalar_field(const Eigen::RowVectorXd& scalar, const SmoothStatistic& stat) {
  if (stat.name == "mean") return scalar;
  Eigen::MatrixXd out(2, scalar.size());
  if (stat.name == "momvar") {
    out.row(0) = scalar;
    out.row(1) = scalar.array().square();
  } else if (stat.name == "ratio") {
    out.row(0) = scalar.array() + 4.0;
    out.row(1) = scalar.array().square() + 1.0;
  } else {
    fail(ErrorKind::invalid_argument, "no scalar-field lift for statistic " + stat.name);
  }
  return out;
}

FieldSample read_field_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  int d = 0, p = 0;
  for (const auto& name : table.header) {
    if (!name.empty() && name[0] == 's' && p == 0) {
      ++d;
    } else if (!name.empty() && name[0] == 'v') {
      ++p;
    } else {
      fail(ErrorKind::parse, "field CSV header must be s1..sd,v1..vp (got '" + name + "')");
    }
  }
  if (d == 0 || p == 0) fail(ErrorKind::parse, "field CSV needs site and value columns");
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  if (n == 0) fail(ErrorKind::empty_window, "field CSV has no rows");
  LatticePoints sites(d, n);
  Eigen::MatrixXd values(p, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    for (int c = 0; c < d + p; ++c) {
      const std::string& cell = row[static_cast<std::size_t>(c)];
      std::size_t used = 0;
      try {
        if (c < d) {
          sites(c, r) = std::stoi(cell, &used);
        } else {
          values(c - d, r) = std::stod(cell, &used);
        }
      } catch (const std::exception&) {
        used = std::string::npos;
      }
      if (used != cell.size()) {
        fail(ErrorKind::parse, path + ": bad number '" + cell + "' on row " + std::to_string(r + 2));
      }
    }
  }
  return FieldSample::from_unordered(sites, values);
}

std::string field_csv(const FieldSample& sample) {
  CsvTable table;
  for (int i = 0; i < sample.window.dim(); ++i) table.header.push_back("s" + std::to_string(i + 1));
  for (int i = 0; i < sample.arity(); ++i) table.header.push_back("v" + std::to_string(i + 1));
  for (Eigen::Index j = 0; j < sample.window.size(); ++j) {
    std::vector<std::string> row;
    for (int i = 0; i < sample.window.dim(); ++i) row.push_back(std::to_string(sample.window.sites()(i, j)));
    for (int i = 0; i < sample.arity(); ++i) row.push_back(format_number(sample.values(i, j)));
    table.rows.push_back(std::move(row));
  }
  return to_csv(table);
}

double evaluate_statistic(const SmoothStatistic& stat, const FieldSample& sample,
                          const LatticePoints& sites) {
  if (sites.cols() == 0) fail(ErrorKind::invalid_argument, "statistic needs a nonempty site set");
  Vector sum = Vector::Zero(sample.arity());
  for (Eigen::Index i = 0; i < sites.cols(); ++i) {
    const Eigen::Index c = sample.window.find(sites.col(i));
    if (c < 0) fail(ErrorKind::missing_sites, "site not present in the field sample");
    sum += sample.values.col(c);
  }
  return stat(sum / static_cast<double>(sites.cols()));
}

// ---------------------------------------------------------------------------
// Estimators

CompiledEstimator::CompiledEstimator(const LatticeWindow& sample_window, const Region& region,
                                     const SubsampleSpec& spec, Summation summation)
    : scheme_(spec.scheme) {
  const LatticeWindow region_sites = lattice_sites(region);
  for (Eigen::Index i = 0; i < region_sites.size(); ++i) {
    if (!sample_window.contains(region_sites.site(i))) {
      fail(ErrorKind::missing_sites, "field sample does not cover every region site");
    }
  }
  const SubsampleIndexSet set = enumerate_subsamples(region, spec);
  non_integer_ = set.non_integer_scale;
  if (set.size() < 2) {
    fail(ErrorKind::degenerate_subsampling,
         "only " + std::to_string(set.size()) + " " + to_string(spec.scheme) +
             " subsample(s) at scale " + format_number(spec.scale));
  }
  start_.push_back(0);
  for (Eigen::Index j = 0; j < set.size(); ++j) {
    const LatticePoints sites = set.sites(j);
    for (Eigen::Index c = 0; c < sites.cols(); ++c) {
      const Eigen::Index col = sample_window.find(sites.col(c));
      if (col < 0) fail(ErrorKind::missing_sites, "subsample site missing from the field sample");
      index_.push_back(static_cast<int>(col));
    }
    start_.push_back(index_.size());
    counts_.push_back(sites.cols());
  }

  prefix_ = summation == Summation::prefix &&
            std::holds_alternative<shape::Hypercube>(spec.sub_template.kind());
  if (!prefix_) return;
  const int d = sample_window.dim();
  const LatticePoint lo = sample_window.lower();
  box_dims_.resize(static_cast<std::size_t>(d));
  for (int r = 0; r < d; ++r) box_dims_[static_cast<std::size_t>(r)] = sample_window.upper()[r] - lo[r] + 2;
  auto cell_of = [&](const LatticePoint& padded) {
    std::size_t key = 0;
    for (int r = 0; r < d; ++r) key = key * static_cast<std::size_t>(box_dims_[static_cast<std::size_t>(r)]) + static_cast<std::size_t>(padded[r]);
    return key;
  };
  for (Eigen::Index c = 0; c < sample_window.size(); ++c) {
    sample_to_box_.push_back(static_cast<int>(cell_of(sample_window.site(c) - lo + LatticePoint::Ones(d))));
  }
  for (Eigen::Index j = 0; j < set.size(); ++j) {
    const LatticePoints sites = set.sites(j);
    const LatticePoint a = sites.rowwise().minCoeff();
    const LatticePoint b = sites.rowwise().maxCoeff();
    std::vector<std::pair<std::size_t, int>> corners;
    for (int mask = 0; mask < (1 << d); ++mask) {
      LatticePoint corner(d);
      int ones = 0;
      for (int r = 0; r < d; ++r) {
        if (mask & (1 << r)) {
          corner[r] = b[r] - lo[r] + 1;
          ++ones;
        } else {
          corner[r] = a[r] - lo[r];
        }
      }
      corners.emplace_back(cell_of(corner), ((d - ones) % 2) ? -1 : 1);
    }
    corners_.push_back(std::move(corners));
  }
}

void CompiledEstimator::subsample_means(const Eigen::MatrixXd& values, Eigen::MatrixXd& means) const {
  const Eigen::Index p = values.rows();
  const Eigen::Index J = subsample_count();
  means.resize(p, J);
  if (!prefix_) {
    if (p == 1) {
      const double* v = values.data();
      for (Eigen::Index j = 0; j < J; ++j) {
        double sum = 0.0;
        for (std::size_t t = start_[static_cast<std::size_t>(j)]; t < start_[static_cast<std::size_t>(j) + 1]; ++t) {
          sum += v[index_[t]];
        }
        means(0, j) = sum / static_cast<double>(counts_[static_cast<std::size_t>(j)]);
      }
      return;
    }
    Vector sum(p);
    for (Eigen::Index j = 0; j < J; ++j) {
      sum.setZero();
      for (std::size_t t = start_[static_cast<std::size_t>(j)]; t < start_[static_cast<std::size_t>(j) + 1]; ++t) {
        sum += values.col(index_[t]);
      }
      means.col(j) = sum / static_cast<double>(counts_[static_cast<std::size_t>(j)]);
    }
    return;
  }
  // Inclusive prefix sums over the padded bounding box, one axis at a time.
  std::size_t cells = 1;
  for (int n : box_dims_) cells *= static_cast<std::size_t>(n);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(p, static_cast<Eigen::Index>(cells));
  for (Eigen::Index c = 0; c < values.cols(); ++c) table.col(sample_to_box_[static_cast<std::size_t>(c)]) = values.col(c);
  std::size_t stride = 1;
  for (auto axis = box_dims_.size(); axis-- > 0;) {
    const auto n = static_cast<std::size_t>(box_dims_[axis]);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      if ((cell / stride) % n != 0) table.col(static_cast<Eigen::Index>(cell)) += table.col(static_cast<Eigen::Index>(cell - stride));
    }
    stride *= n;
  }
  for (Eigen::Index j = 0; j < J; ++j) {
    Vector sum = Vector::Zero(p);
    for (const auto& [cell, sign] : corners_[static_cast<std::size_t>(j)]) {
      sum += sign * table.col(static_cast<Eigen::Index>(cell));
    }
    means.col(j) = sum / static_cast<double>(counts_[static_cast<std::size_t>(j)]);
  }
}

EstimatorResult CompiledEstimator::evaluate(const Eigen::MatrixXd& values, const SmoothStatistic& stat,
                                            bool retain_thetas) const {
  if (values.rows() != stat.arity) {
    fail(ErrorKind::dimension_mismatch, "field arity does not match statistic " + stat.name);
  }
  Eigen::MatrixXd means;
  subsample_means(values, means);
  const Eigen::Index J = subsample_count();
  std::vector<double> thetas(static_cast<std::size_t>(J));
  double total = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    thetas[static_cast<std::size_t>(j)] = stat(means.col(j));
    total += thetas[static_cast<std::size_t>(j)];
  }
  const double grand = total / static_cast<double>(J);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    const double dev = thetas[static_cast<std::size_t>(j)] - grand;
    acc += static_cast<double>(counts_[static_cast<std::size_t>(j)]) * dev * dev;
  }
  EstimatorResult out;
  out.tau_hat_sq = acc / static_cast<double>(J);
  out.scheme = scheme_;
  out.subsample_count = J;
  if (scheme_ == Scheme::ol) {
    out.site_counts = {counts_.front()};
  } else {
    out.site_counts = counts_;
  }
  out.grand_mean = grand;
  out.non_integer_scale = non_integer_;
  if (retain_thetas) out.thetas = std::move(thetas);
  return out;
}

double CompiledEstimator::tau_hat_sq(const Eigen::MatrixXd& values, const SmoothStatistic& stat) const {
  return evaluate(values, stat, false).tau_hat_sq;
}

namespace {

EstimatorResult run(const FieldSample& sample, const Region& region, const SubsampleSpec& spec,
                    const SmoothStatistic& stat, const EstimatorOptions& options) {
  const CompiledEstimator estimator(sample.window, region, spec, options.summation);
  return estimator.evaluate(sample.values, stat, options.retain_thetas);
}

}  // namespace

EstimatorResult ol_estimate(const FieldSample& sample, const Region& region, const SubsampleSpec& spec,
                            const SmoothStatistic& stat, const EstimatorOptions& options) {
  if (spec.scheme != Scheme::ol) fail(ErrorKind::invalid_argument, "ol_estimate needs scheme OL");
  return run(sample, region, spec, stat, options);
}

EstimatorResult nol_estimate(const FieldSample& sample, const Region& region, const SubsampleSpec& spec,
                             const SmoothStatistic& stat, const EstimatorOptions& options) {
  if (spec.scheme != Scheme::nol) fail(ErrorKind::invalid_argument, "nol_estimate needs scheme NOL");
  return run(sample, region, spec, stat, options);
}

EstimatorResult subsample_estimate(const FieldSample& sample, const Region& region,
                                   const SubsampleSpec& spec, const SmoothStatistic& stat,
                                   const EstimatorOptions& options) {
  return run(sample, region, spec, stat, options);
}

}  // namespace latblock
