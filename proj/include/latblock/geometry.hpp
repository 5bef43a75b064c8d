#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace latblock {

using Vector = Eigen::VectorXd;
using LatticePoint = Eigen::VectorXi;
/// Lattice sites stored one per column.
using LatticePoints = Eigen::MatrixXi;

// ---------------------------------------------------------------------------
// Convex bodies

/// normal . x <= offset when closed, normal . x < offset otherwise.
struct HalfSpace {
  Vector normal;
  double offset = 0.0;
  bool closed = true;
};

struct Polytope {
  std::vector<HalfSpace> faces;
  Eigen::MatrixXd vertices;  // one vertex per column
};

/// center + axes * (closed unit ball).
struct Ellipsoid {
  Vector center;
  Eigen::MatrixXd axes;
  Eigen::MatrixXd inverse;
};

/// Closed cylinder in R^3 with elliptic cross-section and axis along e3.
struct EllipticCylinder {
  Vector center;
  Eigen::Matrix2d base;
  Eigen::Matrix2d inverse;
  double half_height = 0.0;
};

using ConvexBody = std::variant<Polytope, Ellipsoid, EllipticCylinder>;

struct Support {
  double value;
  bool attained;  // false when the supremum sits on an excluded (open) face
};

int body_dim(const ConvexBody& body);
bool body_contains(const ConvexBody& body, const Vector& x, double tol = 1e-10);
Support support(const ConvexBody& body, const Vector& direction, double tol = 1e-10);
/// x -> scale .* x + shift.
ConvexBody transform_body(const ConvexBody& body, const Vector& scale, const Vector& shift);
/// x -> map * x; elliptic cylinders only accept maps that keep the axis.
ConvexBody map_body(const ConvexBody& body, const Eigen::MatrixXd& map);
/// Exact containment of inner in outer, honouring open faces of outer.
bool body_inside(const ConvexBody& inner, const ConvexBody& outer, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Templates

namespace shape {
struct Hypercube { int dim; };
struct RotatedRectangle { double theta, l1, l2; };
struct Circle { double r; };
struct RightTriangle {};
struct IsoscelesTriangle {};
/// Right trapezoid: parallel horizontal sides b1 (top) and b2 (bottom), height 1.
struct Trapezoid { double b1, b2; };
/// Flat-topped regular hexagon with side length `side`.
struct Hexagon { double side; };
/// Spanned by (l1, 0) and l2 (cos gamma, sin gamma), centered.
struct Parallelogram { double gamma, l1, l2; };
struct Sphere { double r; };
/// Circular base of radius r in the x-y plane, height h along z.
struct Cylinder { double r, h; };
/// Linear image of another template; used by the numeric constant paths.
struct Mapped { std::string base; Eigen::MatrixXd map; };
}  // namespace shape

using ShapeKind = std::variant<shape::Hypercube, shape::RotatedRectangle, shape::Circle,
                               shape::RightTriangle, shape::IsoscelesTriangle, shape::Trapezoid,
                               shape::Hexagon, shape::Parallelogram, shape::Sphere,
                               shape::Cylinder, shape::Mapped>;

/// A prototype set R0 inside (-1/2, 1/2]^d containing a neighbourhood of the origin.
class Template {
 public:
  static Template hypercube(int dim);
  static Template rotated_rectangle(double theta, double l1, double l2);
  static Template diamond();
  static Template circle(double r = 0.5);
  static Template right_triangle();
  static Template isosceles_triangle();
  static Template trapezoid(double b1, double b2);
  static Template hexagon(double side = 0.5);
  static Template parallelogram(double gamma, double l1, double l2);
  static Template sphere(double r = 0.5);
  static Template cylinder(double r, double h);

  /// Linear image `map * R0`. Only checked to be a valid template when `rescale_to_fit`
  /// is false; with it set the image is shrunk uniformly to fit (-1/2, 1/2]^d.
  Template mapped(const Eigen::MatrixXd& map, bool rescale_to_fit = true) const;

  int dim() const { return dim_; }
  const ShapeKind& kind() const { return kind_; }
  const ConvexBody& body() const { return body_; }
  double volume() const { return volume_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  /// Largest Euclidean norm of a point of the closure.
  double radius() const;
  std::string spec() const;

  bool contains(const Vector& x) const;

 private:
  Template(ShapeKind kind, ConvexBody body, double volume);
  void validate_placement() const;

  ShapeKind kind_;
  ConvexBody body_;
  double volume_ = 0.0;
  int dim_ = 0;
  Vector lower_, upper_;
};

bool contains(const Template& shape, const Vector& point);

/// g(x) = |R0 ∩ (x + R0)| by cell-center quadrature with grid step `step`
/// (closed form for the hypercube).
double set_covariance(const Template& shape, const Vector& x, double step);

/// |R0| - |R0 ∩ (x + R0)| for convex templates from a chord-length line integral.
double set_covariance_deficit(const Template& shape, const Vector& x, int lines = 4096);

// ---------------------------------------------------------------------------
// Regions and lattice windows

/// offset + Δ R0 observed on the shifted lattice t + Z^d.
class Region {
 public:
  Region(Template shape, Vector scale);
  Region(Template shape, Vector scale, Vector shift);
  Region(Template shape, Vector scale, Vector shift, LatticePoint offset);

  const Template& shape() const { return shape_; }
  const Vector& scale() const { return scale_; }
  const Vector& shift() const { return shift_; }
  const LatticePoint& offset() const { return offset_; }
  int dim() const { return shape_.dim(); }
  double det_scale() const { return scale_.prod(); }
  double min_scale() const { return scale_.minCoeff(); }
  double max_scale() const { return scale_.maxCoeff(); }
  double volume() const { return det_scale() * shape_.volume(); }

  bool contains(const Vector& x) const;
  bool contains_site(const LatticePoint& z) const;
  ConvexBody body() const;
  Region translated(const LatticePoint& by) const;

 private:
  Template shape_;
  Vector scale_, shift_;
  LatticePoint offset_;
};

/// Integer sites (lattice shift removed), distinct and lexicographically ordered.
class LatticeWindow {
 public:
  LatticeWindow() = default;
  explicit LatticeWindow(LatticePoints sites);

  Eigen::Index size() const { return sites_.cols(); }
  int dim() const { return static_cast<int>(sites_.rows()); }
  bool empty() const { return sites_.cols() == 0; }
  const LatticePoints& sites() const { return sites_; }
  LatticePoint site(Eigen::Index i) const { return sites_.col(i); }
  const LatticePoint& lower() const { return lower_; }
  const LatticePoint& upper() const { return upper_; }

  /// Column index of z, or -1.
  Eigen::Index find(const LatticePoint& z) const;
  bool contains(const LatticePoint& z) const { return find(z) >= 0; }

  friend bool operator==(const LatticeWindow& a, const LatticeWindow& b) {
    return a.sites_ == b.sites_;
  }

 private:
  LatticePoints sites_;
  LatticePoint lower_, upper_;
  std::vector<std::int64_t> strides_;
  std::vector<int> lookup_;
};

LatticeWindow lattice_sites(const Region& region);

/// Visit every z with lower <= z <= upper, first coordinate slowest.
void for_each_lattice_point(const LatticePoint& lower, const LatticePoint& upper,
                            const std::function<void(const LatticePoint&)>& visit);

/// |lattice ∩ sR ∩ (k + sR)| for sR = scale * R0 on t + Z^d.
std::int64_t overlap_count(const Template& shape, double scale, const LatticePoint& k,
                           const Vector& shift);
std::int64_t overlap_count(const Template& shape, double scale, const LatticePoint& k);

// ---------------------------------------------------------------------------
// Subsamples

enum class Scheme { ol, nol };
std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

/// How "subsample lies within the region" is decided.
///   lattice:   every lattice site of the subsample is a site of the region.
///   geometric: the subsample set is contained in the region set.
enum class Containment { lattice, geometric };

struct SubsampleSpec {
  Template sub_template;
  double scale;
  Scheme scheme;
  Containment containment = Containment::lattice;

  static SubsampleSpec same_shape(const Region& region, double scale, Scheme scheme);
  bool integer_scale() const;
};

struct SubsampleIndexSet {
  Scheme scheme = Scheme::ol;
  LatticePoints offsets;               // one offset i per column
  LatticePoints pattern;               // OL: sites of sR relative to i
  std::vector<LatticePoints> members;  // NOL: absolute sites of each subregion
  bool non_integer_scale = false;      // NOL scale outside Z+ (flagged, still valid)

  Eigen::Index size() const { return offsets.cols(); }
  Eigen::Index site_count(Eigen::Index j) const;
  LatticePoints sites(Eigen::Index j) const;
};

SubsampleIndexSet enumerate_ol(const Region& region, const SubsampleSpec& spec);
SubsampleIndexSet enumerate_nol(const Region& region, const SubsampleSpec& spec);
SubsampleIndexSet enumerate_subsamples(const Region& region, const SubsampleSpec& spec);

/// Sites z of the lattice t + Z^d with t + z in center + scale * R0.
LatticePoints scaled_template_sites(const Template& shape, double scale, const Vector& center,
                                    const Vector& shift);

}  // namespace latblock
