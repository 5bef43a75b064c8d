#include "latblock/csv.hpp"
#include "latblock/error.hpp"
#include "latblock/estimators.hpp"
#include "latblock/fieldsim.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace latblock;

namespace {

FieldSample random_field(const Region& r, std::uint64_t seed) {
  const LatticeWindow w = lattice_sites(r);
  RngStream s(seed, 0);
  Eigen::MatrixXd v(1, w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) v(0, j) = s.next_normal();
  return FieldSample(w, v);
}

}  // namespace

TEST_CASE("statistics") {
  CHECK(SmoothStatistic::mean()(Vector::Constant(1, 2.5)) == 2.5);
  CHECK(SmoothStatistic::ratio()(Eigen::Vector2d(3, 2)) == 1.5);
  CHECK(SmoothStatistic::moment_variance()(Eigen::Vector2d(2, 5)) == 1.0);
  try {
    SmoothStatistic::ratio()(Eigen::Vector2d(1, 0));
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(SmoothStatistic::from_name("median"), Error);
  CHECK(SmoothStatistic::from_name("momvar").arity == 2);
}

TEST_CASE("scalar lifts") {
  const Eigen::RowVectorXd x = Eigen::RowVector2d(1.0, -2.0);
  const Eigen::MatrixXd r = lift_scalar_field(x, SmoothStatistic::ratio());
  CHECK(r(0, 1) == 2.0);
  CHECK(r(1, 1) == 5.0);
  CHECK(lift_scalar_field(x, SmoothStatistic::moment_variance())(1, 0) == 1.0);
}

TEST_CASE("field CSV round trip and reordering") {
  const Region r(Template::hypercube(2), Eigen::Vector2d(4, 3));
  const FieldSample f = random_field(r, 3);
  const auto path = (std::filesystem::temp_directory_path() / "latblock_field_test.csv").string();
  write_text_file(path, field_csv(f));
  const FieldSample back = read_field_csv(path);
  std::remove(path.c_str());
  CHECK(back.window == f.window);
  CHECK(back.values == f.values);

  LatticePoints shuffled = f.window.sites().rowwise().reverse();
  Eigen::MatrixXd vals = f.values.rowwise().reverse();
  const FieldSample re = FieldSample::from_unordered(shuffled, vals);
  CHECK(re.values == f.values);
}

TEST_CASE("OL mean estimator on a tiny window by hand") {
  // Sites 0..3 on a line, s = 2: blocks {0,1}, {1,2}, {2,3}.
  const Region r(Template::hypercube(1), Vector::Constant(1, 4.0), Vector::Constant(1, 0.5));
  const LatticeWindow w = lattice_sites(r);
  Eigen::MatrixXd v(1, 4);
  v << 1, 3, 2, 6;
  const SubsampleSpec spec{Template::hypercube(1), 2.0, Scheme::ol};
  const EstimatorResult res = ol_estimate(FieldSample(w, v), r, spec, SmoothStatistic::mean(), {true});
  CHECK(res.subsample_count == 3);
  const double means[3] = {2.0, 2.5, 4.0};
  const double grand = (2.0 + 2.5 + 4.0) / 3.0;
  double acc = 0;
  for (double m : means) acc += 2 * (m - grand) * (m - grand);
  CHECK(res.tau_hat_sq == doctest::Approx(acc / 3));
  CHECK(res.thetas.size() == 3);
  CHECK(res.grand_mean == doctest::Approx(grand));
}

TEST_CASE("degenerate and missing data") {
  const Region r(Template::hypercube(2), Eigen::Vector2d(6, 6));
  const FieldSample f = random_field(r, 5);
  try {
    subsample_estimate(f, r, SubsampleSpec{Template::hypercube(2), 6.0, Scheme::ol}, SmoothStatistic::mean());
    FAIL("expected DegenerateSubsampling");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate_subsampling);
  }
  const Region bigger(Template::hypercube(2), Eigen::Vector2d(8, 8));
  try {
    subsample_estimate(f, bigger, SubsampleSpec{Template::hypercube(2), 2.0, Scheme::ol}, SmoothStatistic::mean());
    FAIL("expected MissingSites");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_sites);
  }
  CHECK_THROWS_AS(ol_estimate(f, r, SubsampleSpec{Template::hypercube(2), 2.0, Scheme::nol}, SmoothStatistic::mean()),
                  Error);
}

TEST_CASE("prefix sums agree with direct summation") {
  const Region r(Template::hypercube(2), Eigen::Vector2d(14, 18));
  const FieldSample f = random_field(r, 9);
  for (Scheme scheme : {Scheme::ol, Scheme::nol}) {
    for (int s = 1; s <= (scheme == Scheme::ol ? 10 : 6); ++s) {
      const SubsampleSpec spec{Template::hypercube(2), double(s), scheme};
      const double direct = subsample_estimate(f, r, spec, SmoothStatistic::mean()).tau_hat_sq;
      const double prefix =
          subsample_estimate(f, r, spec, SmoothStatistic::mean(), {false, Summation::prefix}).tau_hat_sq;
      CHECK(prefix == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("NOL on a disk and non-integer scales") {
  const Region r(Template::circle(), Eigen::Vector2d(18, 18));
  const FieldSample f = random_field(r, 11);
  const EstimatorResult a =
      nol_estimate(f, r, SubsampleSpec{Template::circle(), 4.0, Scheme::nol}, SmoothStatistic::mean());
  CHECK(a.subsample_count >= 2);
  CHECK_FALSE(a.non_integer_scale);
  const EstimatorResult b =
      nol_estimate(f, r, SubsampleSpec{Template::circle(), 4.5, Scheme::nol}, SmoothStatistic::mean());
  CHECK(b.non_integer_scale);
  CHECK(b.tau_hat_sq >= 0);
}

TEST_CASE("disk subsamples inside a square region") {
  const Region r(Template::hypercube(2), Eigen::Vector2d(20, 20));
  const FieldSample f = random_field(r, 13);
  const EstimatorResult sq =
      ol_estimate(f, r, SubsampleSpec{Template::hypercube(2), 3.0, Scheme::ol}, SmoothStatistic::mean());
  const EstimatorResult disk =
      ol_estimate(f, r, SubsampleSpec{Template::circle(), 3.0, Scheme::ol}, SmoothStatistic::mean());
  // A radius-1.5 disk covers the same 3 x 3 block of sites as the square.
  CHECK(disk.subsample_count == sq.subsample_count);
  CHECK(disk.tau_hat_sq == doctest::Approx(sq.tau_hat_sq));
}
