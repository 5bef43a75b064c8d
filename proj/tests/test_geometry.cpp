#include "latblock/error.hpp"
#include "latblock/geometry.hpp"
#include "latblock/parse.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace latblock;

namespace {

Vector v2(double a, double b) { return Eigen::Vector2d(a, b); }

LatticePoint p2(int a, int b) { return Eigen::Vector2i(a, b); }

}  // namespace

TEST_CASE("rectangular region sites") {
  const Region r(Template::hypercube(2), v2(14, 18));
  const LatticeWindow w = lattice_sites(r);
  CHECK(w.size() == 14 * 18);
  CHECK(w.lower() == p2(-6, -8));
  CHECK(w.upper() == p2(7, 9));
  CHECK(w.contains(p2(7, 9)));
  CHECK_FALSE(w.contains(p2(-7, 0)));
}

TEST_CASE("disk region sites match a direct count") {
  const Region r(Template::circle(), v2(18, 18));
  int count = 0;
  for (int x = -10; x <= 10; ++x)
    for (int y = -10; y <= 10; ++y) count += x * x + y * y <= 81;
  CHECK(lattice_sites(r).size() == count);
}

TEST_CASE("shifted lattice") {
  const Region r(Template::hypercube(1), Vector::Constant(1, 4.0), Vector::Constant(1, 0.5));
  // sites t + z in (-2, 2] with t = 1/2
  const LatticeWindow w = lattice_sites(r);
  CHECK(w.size() == 4);
  CHECK(w.lower()[0] == -2);
  CHECK(w.upper()[0] == 1);
}

TEST_CASE("window ordering and lookup") {
  LatticePoints pts(2, 3);
  pts << 1, 0, 0,
         0, 1, 0;
  const LatticeWindow w(pts);
  CHECK(w.site(0) == p2(0, 0));
  CHECK(w.site(1) == p2(0, 1));
  CHECK(w.site(2) == p2(1, 0));
  CHECK(w.find(p2(1, 0)) == 2);
  CHECK(w.find(p2(2, 2)) == -1);
  LatticePoints dup(2, 2);
  dup << 0, 0,
         1, 1;
  CHECK_THROWS_AS(LatticeWindow{dup}, Error);
}

TEST_CASE("template validation") {
  CHECK_THROWS_AS(Template::circle(0.6), Error);
  CHECK_THROWS_AS(Template::hexagon(0.7), Error);
  CHECK_NOTHROW(Template::right_triangle());
  CHECK(Template::right_triangle().contains(Vector::Zero(2)));
  CHECK(Template::hypercube(3).volume() == doctest::Approx(1.0));
  CHECK(Template::circle().volume() == doctest::Approx(std::numbers::pi / 4));
  CHECK(Template::sphere().volume() == doctest::Approx(std::numbers::pi / 6));
  CHECK(Template::trapezoid(0.3, 0.6).volume() == doctest::Approx(0.45));
  CHECK(Template::trapezoid(0.001, 1.0).volume() == doctest::Approx(0.5005));
}

TEST_CASE("half-open hypercube faces") {
  const Template t = Template::hypercube(2);
  CHECK(t.contains(v2(0.5, 0.5)));
  CHECK_FALSE(t.contains(v2(-0.5, 0.0)));
}

TEST_CASE("template specs round trip") {
  for (const char* spec : {"hypercube:d=3", "circle:r=0.4", "hex:l=0.5", "trapezoid:b1=0.3,b2=0.6", "righttri",
                           "isotri", "sphere:r=0.5", "cylinder:r=0.4,h=0.9", "diamond",
                           "parallelogram:gamma=1,l1=0.5,l2=0.5"}) {
    const Template t = parse_template(spec);
    CHECK(parse_template(t.spec()).spec() == t.spec());
  }
  CHECK_THROWS_AS(parse_template("circle:radius=0.5"), Error);
  CHECK_THROWS_AS(parse_template("blob"), Error);
}

TEST_CASE("set covariance") {
  const Template sq = Template::hypercube(2);
  CHECK(set_covariance(sq, v2(0.25, 0.5), 0.01) == doctest::Approx(0.75 * 0.5));
  // Lens area of two unit-diameter disks at distance t.
  const Template disk = Template::circle();
  for (double t : {0.1, 0.3, 0.7}) {
    const double r = 0.5;
    const double lens = 2 * r * r * std::acos(t / (2 * r)) - t / 2 * std::sqrt(4 * r * r - t * t);
    CHECK(disk.volume() - set_covariance_deficit(disk, v2(t, 0)) == doctest::Approx(lens).epsilon(1e-6));
    CHECK(set_covariance(disk, v2(0, t), 1.0 / 1024) == doctest::Approx(lens).epsilon(1e-2));
  }
}

TEST_CASE("overlap counts") {
  const Template sq = Template::hypercube(2);
  CHECK(overlap_count(sq, 4, p2(0, 0)) == 16);
  CHECK(overlap_count(sq, 4, p2(1, 2)) == 6);
  CHECK(overlap_count(sq, 4, p2(-1, -2)) == 6);
  CHECK(overlap_count(sq, 4, p2(4, 0)) == 0);
}

TEST_CASE("OL and NOL enumeration on a rectangle") {
  const Region r(Template::hypercube(2), v2(14, 18));
  for (int s = 1; s <= 13; ++s) {
    const auto ol = enumerate_ol(r, SubsampleSpec::same_shape(r, s, Scheme::ol));
    CHECK(ol.size() == (14 - s + 1) * (18 - s + 1));
    CHECK(ol.site_count(0) == s * s);
  }
  const auto nol = enumerate_nol(r, SubsampleSpec::same_shape(r, 4, Scheme::nol));
  CHECK(nol.size() == 9);
  for (Eigen::Index j = 0; j < nol.size(); ++j) CHECK(nol.site_count(j) == 16);
  CHECK_FALSE(nol.non_integer_scale);
  CHECK(enumerate_nol(r, SubsampleSpec::same_shape(r, 3.5, Scheme::nol)).non_integer_scale);
}

TEST_CASE("subsample scale must not exceed the region") {
  const Region r(Template::hypercube(2), v2(6, 8));
  CHECK_THROWS_AS(enumerate_ol(r, SubsampleSpec::same_shape(r, 7, Scheme::ol)), Error);
  CHECK_NOTHROW(enumerate_ol(r, SubsampleSpec::same_shape(r, 6, Scheme::ol)));
}

TEST_CASE("OL subsamples lie inside the region") {
  const Region r(Template::circle(), v2(18, 18));
  const LatticeWindow w = lattice_sites(r);
  const auto ol = enumerate_ol(r, SubsampleSpec::same_shape(r, 5, Scheme::ol));
  REQUIRE(ol.size() > 0);
  for (Eigen::Index j = 0; j < ol.size(); ++j) {
    const LatticePoints sites = ol.sites(j);
    for (Eigen::Index c = 0; c < sites.cols(); ++c) CHECK(w.contains(sites.col(c)));
  }
}

TEST_CASE("support function honours open faces") {
  const ConvexBody cube = Template::hypercube(2).body();
  const Support up = support(cube, v2(1, 0));
  CHECK(up.value == doctest::Approx(0.5));
  CHECK(up.attained);
  const Support down = support(cube, v2(-1, 0));
  CHECK(down.value == doctest::Approx(0.5));
  CHECK_FALSE(down.attained);
}
