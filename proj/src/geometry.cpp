#include "latblock/geometry.hpp"

#include "latblock/error.hpp"
#include "latblock/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace latblock {

namespace {

constexpr double kMemberTol = 1e-10;
constexpr double kPi = std::numbers::pi;

// First nonzero component positive: the face belongs to the set, as for (-1/2, 1/2]^d.
bool lex_positive(const Vector& n) {
  for (Eigen::Index i = 0; i < n.size(); ++i) {
    if (std::abs(n[i]) > 1e-12) return n[i] > 0;
  }
  return false;
}

Polytope polygon(const std::vector<Eigen::Vector2d>& ccw, bool all_closed) {
  Polytope p;
  const auto n = ccw.size();
  p.vertices.resize(2, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    p.vertices.col(static_cast<Eigen::Index>(i)) = ccw[i];
    const Eigen::Vector2d e = ccw[(i + 1) % n] - ccw[i];
    Vector normal(2);
    normal << e.y(), -e.x();
    normal.normalize();
    p.faces.push_back({normal, normal.dot(ccw[i]), all_closed || lex_positive(normal)});
  }
  return p;
}

Polytope unit_cube(int d) {
  Polytope p;
  for (int i = 0; i < d; ++i) {
    Vector e = Vector::Zero(d);
    e[i] = 1.0;
    p.faces.push_back({e, 0.5, true});
    p.faces.push_back({-e, 0.5, false});
  }
  const Eigen::Index count = Eigen::Index{1} << d;
  p.vertices.resize(d, count);
  for (Eigen::Index m = 0; m < count; ++m) {
    for (int i = 0; i < d; ++i) p.vertices(i, m) = ((m >> i) & 1) ? 0.5 : -0.5;
  }
  return p;
}

Ellipsoid make_ellipsoid(Vector center, Eigen::MatrixXd axes) {
  Eigen::MatrixXd inverse = axes.inverse();
  return {std::move(center), std::move(axes), std::move(inverse)};
}

EllipticCylinder make_cylinder(Vector center, const Eigen::Matrix2d& base, double half_height) {
  return {std::move(center), base, base.inverse(), half_height};
}

std::string kind_spec(const ShapeKind& kind) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, shape::Hypercube>) {
          return "hypercube:d=" + std::to_string(s.dim);
        } else if constexpr (std::is_same_v<T, shape::RotatedRectangle>) {
          return "rotrect:theta=" + format_number(s.theta) + ",l1=" + format_number(s.l1) +
                 ",l2=" + format_number(s.l2);
        } else if constexpr (std::is_same_v<T, shape::Circle>) {
          return "circle:r=" + format_number(s.r);
        } else if constexpr (std::is_same_v<T, shape::RightTriangle>) {
          return "righttri";
        } else if constexpr (std::is_same_v<T, shape::IsoscelesTriangle>) {
          return "isotri";
        } else if constexpr (std::is_same_v<T, shape::Trapezoid>) {
          return "trapezoid:b1=" + format_number(s.b1) + ",b2=" + format_number(s.b2);
        } else if constexpr (std::is_same_v<T, shape::Hexagon>) {
          return "hex:l=" + format_number(s.side);
        } else if constexpr (std::is_same_v<T, shape::Parallelogram>) {
          return "parallelogram:gamma=" + format_number(s.gamma) + ",l1=" + format_number(s.l1) +
                 ",l2=" + format_number(s.l2);
        } else if constexpr (std::is_same_v<T, shape::Sphere>) {
          return "sphere:r=" + format_number(s.r);
        } else if constexpr (std::is_same_v<T, shape::Cylinder>) {
          return "cylinder:r=" + format_number(s.r) + ",h=" + format_number(s.h);
        } else {
          std::ostringstream out;
          out << "mapped(" << s.base << ";";
          for (Eigen::Index i = 0; i < s.map.size(); ++i) {
            out << (i ? "," : "") << format_number(s.map(i / s.map.cols(), i % s.map.cols()));
          }
          out << ")";
          return out.str();
        }
      },
      kind);
}

// s-interval of the line p + s u inside the closure of a body; empty when lo >= hi.
std::pair<double, double> chord(const ConvexBody& body, const Vector& p, const Vector& u) {
  return std::visit(
      [&](const auto& b) -> std::pair<double, double> {
        using T = std::decay_t<decltype(b)>;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        if constexpr (std::is_same_v<T, Polytope>) {
          for (const auto& f : b.faces) {
            const double a = f.normal.dot(u);
            const double r = f.offset - f.normal.dot(p);
            if (std::abs(a) < 1e-15) {
              if (r < 0) return {0.0, 0.0};
            } else if (a > 0) {
              hi = std::min(hi, r / a);
            } else {
              lo = std::max(lo, r / a);
            }
          }
        } else {
          // Quadratic |M (p + s u - c)|^2 <= 1 on the elliptic part.
          Vector q, w;
          if constexpr (std::is_same_v<T, Ellipsoid>) {
            q = b.inverse * (p - b.center);
            w = b.inverse * u;
          } else {
            q = b.inverse * (p.head<2>() - b.center.template head<2>());
            w = b.inverse * u.head<2>();
            const double z0 = p[2] - b.center[2];
            if (std::abs(u[2]) < 1e-15) {
              if (std::abs(z0) > b.half_height) return {0.0, 0.0};
            } else {
              double a = (-b.half_height - z0) / u[2];
              double c = (b.half_height - z0) / u[2];
              if (a > c) std::swap(a, c);
              lo = a;
              hi = c;
            }
          }
          const double qa = w.squaredNorm();
          const double qb = 2.0 * q.dot(w);
          const double qc = q.squaredNorm() - 1.0;
          if (qa < 1e-30) {
            if (qc > 0) return {0.0, 0.0};
          } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc <= 0) return {0.0, 0.0};
            const double root = std::sqrt(disc);
            lo = std::max(lo, (-qb - root) / (2.0 * qa));
            hi = std::min(hi, (-qb + root) / (2.0 * qa));
          }
        }
        return {lo, hi};
      },
      body);
}

struct ShapeMatrix {
  Vector center;
  Eigen::MatrixXd spread;  // S with ellipse {c + S^{1/2} B}
};

// Ellipse-in-ellipse test for conformal pairs; other pairs are refused.
bool ellipse_inside(const ShapeMatrix& inner, const Vector& outer_center,
                    const Eigen::MatrixXd& outer_inverse, double tol) {
  const Vector c = outer_inverse * (inner.center - outer_center);
  const Eigen::MatrixXd s = outer_inverse * inner.spread * outer_inverse.transpose();
  const double radius_sq = s.trace() / static_cast<double>(s.rows());
  const Eigen::MatrixXd residual = s - radius_sq * Eigen::MatrixXd::Identity(s.rows(), s.cols());
  if (residual.norm() > 1e-9 * std::max(1.0, radius_sq)) {
    fail(ErrorKind::unsupported_shape,
         "geometric containment of non-similar ellipsoids is not supported");
  }
  return c.norm() + std::sqrt(std::max(radius_sq, 0.0)) <= 1.0 + tol;
}

bool points_in_ellipse(const Eigen::MatrixXd& points, const Vector& center,
                       const Eigen::MatrixXd& inverse, double tol) {
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    if ((inverse * (points.col(j) - center)).norm() > 1.0 + tol) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Convex bodies

int body_dim(const ConvexBody& body) {
  return std::visit(
      [](const auto& b) -> int {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) return static_cast<int>(b.vertices.rows());
        else if constexpr (std::is_same_v<T, Ellipsoid>) return static_cast<int>(b.center.size());
        else return 3;
      },
      body);
}

bool body_contains(const ConvexBody& body, const Vector& x, double tol) {
  return std::visit(
      [&](const auto& b) -> bool {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          for (const auto& f : b.faces) {
            const double v = f.normal.dot(x) - f.offset;
            if (v > tol) return false;
            if (v > -tol && !f.closed) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return (b.inverse * (x - b.center)).squaredNorm() <= 1.0 + tol;
        } else {
          const Eigen::Vector2d y = b.inverse * (x.head<2>() - b.center.template head<2>());
          return y.squaredNorm() <= 1.0 + tol &&
                 std::abs(x[2] - b.center[2]) <= b.half_height + tol;
        }
      },
      body);
}

Support support(const ConvexBody& body, const Vector& direction, double tol) {
  return std::visit(
      [&](const auto& b) -> Support {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          const Vector values = b.vertices.transpose() * direction;
          const double best = values.maxCoeff();
          const double band = tol * std::max(1.0, std::abs(best));
          Vector centroid = Vector::Zero(b.vertices.rows());
          int count = 0;
          for (Eigen::Index j = 0; j < values.size(); ++j) {
            if (values[j] >= best - band) {
              centroid += b.vertices.col(j);
              ++count;
            }
          }
          centroid /= count;
          return {best, body_contains(body, centroid, tol)};
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return {b.center.dot(direction) + (b.axes.transpose() * direction).norm(), true};
        } else {
          const Eigen::Vector2d uxy = direction.head<2>();
          return {b.center.dot(direction) + (b.base.transpose() * uxy).norm() +
                      b.half_height * std::abs(direction[2]),
                  true};
        }
      },
      body);
}

ConvexBody transform_body(const ConvexBody& body, const Vector& scale, const Vector& shift) {
  return std::visit(
      [&](const auto& b) -> ConvexBody {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          Polytope out;
          out.vertices = (scale.asDiagonal() * b.vertices).colwise() + shift;
          for (const auto& f : b.faces) {
            Vector n = f.normal.cwiseQuotient(scale);
            double offset = f.offset + n.dot(shift);
            const double len = n.norm();
            out.faces.push_back({n / len, offset / len, f.closed});
          }
          return out;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return make_ellipsoid(scale.cwiseProduct(b.center) + shift, scale.asDiagonal() * b.axes);
        } else {
          const Eigen::Matrix2d base = scale.head<2>().asDiagonal() * b.base;
          return make_cylinder(scale.cwiseProduct(b.center) + shift, base,
                               b.half_height * scale[2]);
        }
      },
      body);
}

ConvexBody map_body(const ConvexBody& body, const Eigen::MatrixXd& map) {
  return std::visit(
      [&](const auto& b) -> ConvexBody {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          Polytope out;
          out.vertices = map * b.vertices;
          const Eigen::MatrixXd inv_t = map.inverse().transpose();
          for (const auto& f : b.faces) {
            Vector n = inv_t * f.normal;
            const double len = n.norm();
            n /= len;
            out.faces.push_back({n, f.offset / len, lex_positive(n)});
          }
          // Re-derive the boundary rule on the image so it stays a valid template rule.
          const bool all_closed = std::all_of(b.faces.begin(), b.faces.end(),
                                              [](const HalfSpace& f) { return f.closed; });
          if (all_closed) {
            for (auto& f : out.faces) f.closed = true;
          }
          return out;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return make_ellipsoid(map * b.center, map * b.axes);
        } else {
          if (map.rows() != 3 || std::abs(map(0, 2)) > 0 || std::abs(map(1, 2)) > 0 ||
              std::abs(map(2, 0)) > 0 || std::abs(map(2, 1)) > 0) {
            fail(ErrorKind::unsupported_shape, "cylinder images must keep the axis direction");
          }
          const Eigen::Matrix2d top = map.topLeftCorner<2, 2>();
          return make_cylinder(map * b.center, top * b.base, std::abs(map(2, 2)) * b.half_height);
        }
      },
      body);
}

bool body_inside(const ConvexBody& inner, const ConvexBody& outer, double tol) {
  if (body_dim(inner) != body_dim(outer)) {
    fail(ErrorKind::dimension_mismatch, "containment test between bodies of different dimension");
  }
  const int d = body_dim(inner);
  return std::visit(
      [&](const auto& o) -> bool {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          for (const auto& f : o.faces) {
            const Support s = support(inner, f.normal, 1e-12);
            if (s.value > f.offset + tol) return false;
            if (!f.closed && s.value > f.offset - tol && s.attained) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          if (const auto* p = std::get_if<Polytope>(&inner)) {
            return points_in_ellipse(p->vertices, o.center, o.inverse, tol);
          }
          if (const auto* e = std::get_if<Ellipsoid>(&inner)) {
            return ellipse_inside({e->center, e->axes * e->axes.transpose()}, o.center, o.inverse,
                                  tol);
          }
          fail(ErrorKind::unsupported_shape, "cylinder inside ellipsoid is not supported");
        } else {
          Vector e3 = Vector::Zero(d);
          e3[2] = 1.0;
          if (support(inner, e3).value > o.center[2] + o.half_height + tol) return false;
          if (support(inner, -e3).value > -o.center[2] + o.half_height + tol) return false;
          const Vector oc = o.center.head(2);
          const Eigen::MatrixXd oinv = o.inverse;
          if (const auto* p = std::get_if<Polytope>(&inner)) {
            return points_in_ellipse(p->vertices.topRows(2), oc, oinv, tol);
          }
          if (const auto* e = std::get_if<Ellipsoid>(&inner)) {
            const Eigen::MatrixXd rows = e->axes.topRows(2);
            return ellipse_inside({e->center.head(2), rows * rows.transpose()}, oc, oinv, tol);
          }
          const auto& c = std::get<EllipticCylinder>(inner);
          const Eigen::MatrixXd base = c.base;
          return ellipse_inside({c.center.head(2), base * base.transpose()}, oc, oinv, tol);
        }
      },
      outer);
}

// ---------------------------------------------------------------------------
// Templates

Template::Template(ShapeKind kind, ConvexBody body, double volume)
    : kind_(std::move(kind)), body_(std::move(body)), volume_(volume) {
  dim_ = body_dim(body_);
  lower_.resize(dim_);
  upper_.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    Vector e = Vector::Zero(dim_);
    e[i] = 1.0;
    upper_[i] = support(body_, e).value;
    lower_[i] = -support(body_, -e).value;
  }
  validate_placement();
}

void Template::validate_placement() const {
  constexpr double slack = 1e-12;
  if (!(volume_ > 0)) fail(ErrorKind::invalid_argument, "template volume must be positive");
  for (int i = 0; i < dim_; ++i) {
    if (lower_[i] < -0.5 - slack || upper_[i] > 0.5 + slack) {
      fail(ErrorKind::invalid_argument, "template " + spec() + " does not fit in (-1/2, 1/2]^d");
    }
  }
  const Vector origin = Vector::Zero(dim_);
  const bool interior = std::visit(
      [&](const auto& b) -> bool {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          return std::all_of(b.faces.begin(), b.faces.end(),
                             [](const HalfSpace& f) { return f.offset > 1e-12; });
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          return (b.inverse * b.center).norm() < 1.0;
        } else {
          return (b.inverse * b.center.template head<2>()).norm() < 1.0 &&
                 std::abs(b.center[2]) < b.half_height;
        }
      },
      body_);
  // A unit right triangle in the unit cube has the origin on its hypotenuse.
  const bool boundary_ok = std::holds_alternative<shape::RightTriangle>(kind_) && contains(origin);
  if (!interior && !boundary_ok) {
    fail(ErrorKind::invalid_argument, "template " + spec() + " must contain the origin inside");
  }
}

Template Template::hypercube(int dim) {
  if (dim < 1 || dim > 12) fail(ErrorKind::invalid_argument, "hypercube dimension must be 1..12");
  return Template(shape::Hypercube{dim}, unit_cube(dim), 1.0);
}

Template Template::rotated_rectangle(double theta, double l1, double l2) {
  if (!(theta >= 0 && theta <= kPi)) fail(ErrorKind::invalid_argument, "theta must be in [0, pi]");
  if (!(l1 > 0 && l2 > 0)) fail(ErrorKind::invalid_argument, "rectangle sides must be positive");
  Eigen::Matrix2d a;
  a << l1 * std::cos(theta), l2 * std::sin(theta), -l1 * std::sin(theta), l2 * std::cos(theta);
  std::vector<Eigen::Vector2d> corners = {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  for (auto& c : corners) c = a * c;
  return Template(shape::RotatedRectangle{theta, l1, l2}, polygon(corners, false), l1 * l2);
}

Template Template::diamond() {
  return rotated_rectangle(kPi / 4, std::sqrt(0.5), std::sqrt(0.5));
}

Template Template::circle(double r) {
  if (!(r > 0 && r <= 0.5)) fail(ErrorKind::invalid_argument, "circle radius must be in (0, 1/2]");
  return Template(shape::Circle{r}, make_ellipsoid(Vector::Zero(2), r * Eigen::MatrixXd::Identity(2, 2)),
                  kPi * r * r);
}

Template Template::right_triangle() {
  return Template(shape::RightTriangle{}, polygon({{-0.5, -0.5}, {0.5, -0.5}, {-0.5, 0.5}}, false),
                  0.5);
}

Template Template::isosceles_triangle() {
  return Template(shape::IsoscelesTriangle{},
                  polygon({{-0.5, -0.5}, {0.5, -0.5}, {0.0, 0.5}}, false), 0.5);
}

Template Template::trapezoid(double b1, double b2) {
  if (!(b1 > 0 && b2 >= b1)) fail(ErrorKind::invalid_argument, "trapezoid needs b2 >= b1 > 0");
  if (b2 > 1.0 + 1e-12) fail(ErrorKind::invalid_argument, "trapezoid side b2 must not exceed 1");
  // Centre the mid-height chord, then slide left as needed to fit the cube.
  const double x0 = std::max(-0.5, std::min(-(b1 + b2) / 4.0, 0.5 - b2));
  return Template(shape::Trapezoid{b1, b2},
                  polygon({{x0, -0.5}, {x0 + b2, -0.5}, {x0 + b1, 0.5}, {x0, 0.5}}, false),
                  (b1 + b2) / 2.0);
}

Template Template::hexagon(double side) {
  if (!(side > 0 && side <= 0.5)) fail(ErrorKind::invalid_argument, "hexagon side must be in (0, 1/2]");
  const double h = std::sqrt(3.0) / 2.0 * side;
  return Template(shape::Hexagon{side},
                  polygon({{side, 0}, {side / 2, h}, {-side / 2, h}, {-side, 0}, {-side / 2, -h},
                           {side / 2, -h}},
                          true),
                  1.5 * std::sqrt(3.0) * side * side);
}

Template Template::parallelogram(double gamma, double l1, double l2) {
  if (!(gamma > 0 && gamma < kPi)) fail(ErrorKind::invalid_argument, "gamma must be in (0, pi)");
  if (!(l1 > 0 && l2 > 0)) fail(ErrorKind::invalid_argument, "parallelogram sides must be positive");
  const Eigen::Vector2d a(l1, 0.0);
  const Eigen::Vector2d b(l2 * std::cos(gamma), l2 * std::sin(gamma));
  const Eigen::Vector2d p = -(a + b) / 2.0;
  return Template(shape::Parallelogram{gamma, l1, l2}, polygon({p, p + a, p + a + b, p + b}, false),
                  l1 * l2 * std::sin(gamma));
}

Template Template::sphere(double r) {
  if (!(r > 0 && r <= 0.5)) fail(ErrorKind::invalid_argument, "sphere radius must be in (0, 1/2]");
  return Template(shape::Sphere{r}, make_ellipsoid(Vector::Zero(3), r * Eigen::MatrixXd::Identity(3, 3)),
                  4.0 / 3.0 * kPi * r * r * r);
}

Template Template::cylinder(double r, double h) {
  if (!(r > 0 && r <= 0.5)) fail(ErrorKind::invalid_argument, "cylinder radius must be in (0, 1/2]");
  if (!(h > 0 && h <= 1.0)) fail(ErrorKind::invalid_argument, "cylinder height must be in (0, 1]");
  return Template(shape::Cylinder{r, h},
                  make_cylinder(Vector::Zero(3), r * Eigen::Matrix2d::Identity(), h / 2.0),
                  kPi * r * r * h);
}

Template Template::mapped(const Eigen::MatrixXd& map, bool rescale_to_fit) const {
  if (map.rows() != dim_ || map.cols() != dim_) {
    fail(ErrorKind::dimension_mismatch, "map size does not match template dimension");
  }
  const double det = map.determinant();
  if (!(std::abs(det) > 1e-12)) fail(ErrorKind::invalid_argument, "map must be invertible");
  Eigen::MatrixXd m = map;
  if (rescale_to_fit) {
    const ConvexBody image = map_body(body_, map);
    double extent = 0.0;
    for (int i = 0; i < dim_; ++i) {
      Vector e = Vector::Zero(dim_);
      e[i] = 1.0;
      extent = std::max({extent, support(image, e).value, support(image, -e).value});
    }
    m *= 0.5 / extent;
  }
  return Template(shape::Mapped{spec(), m}, map_body(body_, m),
                  volume_ * std::abs(m.determinant()));
}

double Template::radius() const {
  return std::visit(
      [](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Polytope>) {
          return b.vertices.colwise().norm().maxCoeff();
        } else if constexpr (std::is_same_v<T, Ellipsoid>) {
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.axes);
          return b.center.norm() + svd.singularValues()[0];
        } else {
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(b.base));
          const double rxy = b.center.template head<2>().norm() + svd.singularValues()[0];
          const double rz = std::abs(b.center[2]) + b.half_height;
          return std::hypot(rxy, rz);
        }
      },
      body_);
}

std::string Template::spec() const { return kind_spec(kind_); }

bool Template::contains(const Vector& x) const {
  if (x.size() != dim_) fail(ErrorKind::dimension_mismatch, "point dimension does not match template");
  if (!x.allFinite()) fail(ErrorKind::invalid_argument, "point must be finite");
  return body_contains(body_, x, kMemberTol);
}

bool contains(const Template& shape, const Vector& point) { return shape.contains(point); }

double set_covariance(const Template& shape, const Vector& x, double step) {
  if (!(step > 0)) fail(ErrorKind::invalid_argument, "quadrature step must be positive");
  const int d = shape.dim();
  if (x.size() != d) fail(ErrorKind::dimension_mismatch, "lag dimension does not match template");
  if (std::holds_alternative<shape::Hypercube>(shape.kind())) {
    double g = 1.0;
    for (int i = 0; i < d; ++i) g *= std::max(0.0, 1.0 - std::abs(x[i]));
    return g;
  }
  // Cell centers over the bounding box of R0 ∩ (x + R0).
  Vector lo = shape.lower().cwiseMax(shape.lower() + x);
  Vector hi = shape.upper().cwiseMin(shape.upper() + x);
  if ((hi - lo).minCoeff() <= 0) return 0.0;
  LatticePoint first(d), last(d);
  for (int i = 0; i < d; ++i) {
    first[i] = static_cast<int>(std::floor(lo[i] / step));
    last[i] = static_cast<int>(std::ceil(hi[i] / step));
  }
  double budget = 1.0;
  for (int i = 0; i < d; ++i) budget *= static_cast<double>(last[i] - first[i] + 1);
  if (budget > 5e8) fail(ErrorKind::quadrature_budget_exceeded, "set covariance grid too fine");
  std::int64_t count = 0;
  Vector p(d);
  for_each_lattice_point(first, last, [&](const LatticePoint& z) {
    for (int i = 0; i < d; ++i) p[i] = (z[i] + 0.5) * step;
    if (body_contains(shape.body(), p, 0.0) && body_contains(shape.body(), p - x, 0.0)) ++count;
  });
  return static_cast<double>(count) * std::pow(step, d);
}

double set_covariance_deficit(const Template& shape, const Vector& x, int lines) {
  const int d = shape.dim();
  if (x.size() != d) fail(ErrorKind::dimension_mismatch, "lag dimension does not match template");
  if (d < 1 || d > 3) fail(ErrorKind::unsupported_shape, "line integral supports d <= 3");
  if (lines < 8) fail(ErrorKind::invalid_argument, "need at least 8 lines");
  const double len = x.norm();
  if (len == 0.0) return 0.0;
  if (d == 1) return std::min(len, shape.upper()[0] - shape.lower()[0]);
  const Vector u = x / len;
  // Orthonormal basis of the complement of u.
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
  q.col(0) = u;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd basis = Eigen::MatrixXd(qr.householderQ()).rightCols(d - 1);
  Vector lo(d - 1), hi(d - 1);
  for (int j = 0; j < d - 1; ++j) {
    hi[j] = support(shape.body(), basis.col(j)).value;
    lo[j] = -support(shape.body(), -basis.col(j)).value;
  }
  const int per_axis = d == 2 ? lines : std::max(16, static_cast<int>(std::sqrt(lines * 16.0)));
  Vector h = (hi - lo) / per_axis;
  double total = 0.0;
  auto line_term = [&](const Vector& offset) {
    const Vector p = basis * offset;
    const auto [a, b] = chord(shape.body(), p, u);
    if (b > a) total += std::min(b - a, len);
  };
  Vector offset(d - 1);
  if (d == 2) {
    for (int i = 0; i < per_axis; ++i) {
      offset[0] = lo[0] + (i + 0.5) * h[0];
      line_term(offset);
    }
  } else {
    for (int i = 0; i < per_axis; ++i) {
      offset[0] = lo[0] + (i + 0.5) * h[0];
      for (int j = 0; j < per_axis; ++j) {
        offset[1] = lo[1] + (j + 0.5) * h[1];
        line_term(offset);
      }
    }
  }
  return total * h.prod();
}

// ---------------------------------------------------------------------------
// Regions

Region::Region(Template shape, Vector scale)
    : Region(std::move(shape), std::move(scale), Vector(), LatticePoint()) {}

Region::Region(Template shape, Vector scale, Vector shift)
    : Region(std::move(shape), std::move(scale), std::move(shift), LatticePoint()) {}

Region::Region(Template shape, Vector scale, Vector shift, LatticePoint offset)
    : shape_(std::move(shape)), scale_(std::move(scale)), shift_(std::move(shift)),
      offset_(std::move(offset)) {
  const int d = shape_.dim();
  if (shift_.size() == 0) shift_ = Vector::Zero(d);
  if (offset_.size() == 0) offset_ = LatticePoint::Zero(d);
  if (scale_.size() != d || shift_.size() != d || offset_.size() != d) {
    fail(ErrorKind::dimension_mismatch, "region scaling/shift dimension does not match template");
  }
  for (int i = 0; i < d; ++i) {
    if (!(scale_[i] > 0) || !std::isfinite(scale_[i])) {
      fail(ErrorKind::invalid_argument, "region scaling entries must be positive and finite");
    }
    if (!(std::abs(shift_[i]) <= 0.5)) {
      fail(ErrorKind::invalid_argument, "lattice shift must lie in [-1/2, 1/2]^d");
    }
  }
}

bool Region::contains(const Vector& x) const {
  return shape_.contains((x - offset_.cast<double>()).cwiseQuotient(scale_));
}

bool Region::contains_site(const LatticePoint& z) const {
  return contains(shift_ + z.cast<double>());
}

ConvexBody Region::body() const {
  return transform_body(shape_.body(), scale_, offset_.cast<double>());
}

Region Region::translated(const LatticePoint& by) const {
  return Region(shape_, scale_, shift_, offset_ + by);
}

// ---------------------------------------------------------------------------
// Lattice windows

void for_each_lattice_point(const LatticePoint& lower, const LatticePoint& upper,
                            const std::function<void(const LatticePoint&)>& visit) {
  const auto d = lower.size();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (upper[i] < lower[i]) return;
  }
  LatticePoint z = lower;
  while (true) {
    visit(z);
    Eigen::Index i = d - 1;
    while (i >= 0 && z[i] == upper[i]) {
      z[i] = lower[i];
      --i;
    }
    if (i < 0) return;
    ++z[i];
  }
}

LatticeWindow::LatticeWindow(LatticePoints sites) : sites_(std::move(sites)) {
  const int d = static_cast<int>(sites_.rows());
  const Eigen::Index n = sites_.cols();
  if (n == 0) return;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (int r = 0; r < d; ++r) {
      if (sites_(r, a) != sites_(r, b)) return sites_(r, a) < sites_(r, b);
    }
    return false;
  };
  if (!std::is_sorted(order.begin(), order.end(), less)) {
    std::sort(order.begin(), order.end(), less);
    LatticePoints sorted(d, n);
    for (Eigen::Index i = 0; i < n; ++i) sorted.col(i) = sites_.col(order[static_cast<std::size_t>(i)]);
    sites_ = std::move(sorted);
  }
  lower_ = sites_.rowwise().minCoeff();
  upper_ = sites_.rowwise().maxCoeff();
  strides_.assign(static_cast<std::size_t>(d), 1);
  std::int64_t cells = 1;
  for (int r = d - 1; r >= 0; --r) {
    strides_[static_cast<std::size_t>(r)] = cells;
    cells *= static_cast<std::int64_t>(upper_[r]) - lower_[r] + 1;
  }
  if (cells > (std::int64_t{1} << 31)) {
    fail(ErrorKind::invalid_argument, "lattice window bounding box is too large");
  }
  lookup_.assign(static_cast<std::size_t>(cells), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::int64_t key = 0;
    for (int r = 0; r < d; ++r) key += (sites_(r, i) - lower_[r]) * strides_[static_cast<std::size_t>(r)];
    int& slot = lookup_[static_cast<std::size_t>(key)];
    if (slot >= 0) fail(ErrorKind::invalid_argument, "duplicate lattice site");
    slot = static_cast<int>(i);
  }
}

Eigen::Index LatticeWindow::find(const LatticePoint& z) const {
  if (empty() || z.size() != dim()) return -1;
  std::int64_t key = 0;
  for (int r = 0; r < dim(); ++r) {
    if (z[r] < lower_[r] || z[r] > upper_[r]) return -1;
    key += (z[r] - lower_[r]) * strides_[static_cast<std::size_t>(r)];
  }
  return lookup_[static_cast<std::size_t>(key)];
}

LatticePoints scaled_template_sites(const Template& shape, double scale, const Vector& center,
                                    const Vector& shift) {
  const int d = shape.dim();
  LatticePoint lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = static_cast<int>(std::ceil(center[i] + scale * shape.lower()[i] - shift[i] - 1e-9));
    hi[i] = static_cast<int>(std::floor(center[i] + scale * shape.upper()[i] - shift[i] + 1e-9));
  }
  std::vector<int> flat;
  Vector x(d);
  for_each_lattice_point(lo, hi, [&](const LatticePoint& z) {
    for (int i = 0; i < d; ++i) x[i] = (shift[i] + z[i] - center[i]) / scale;
    if (body_contains(shape.body(), x, kMemberTol)) flat.insert(flat.end(), z.data(), z.data() + d);
  });
  return Eigen::Map<const LatticePoints>(flat.data(), d, static_cast<Eigen::Index>(flat.size()) / d);
}

LatticeWindow lattice_sites(const Region& region) {
  const int d = region.dim();
  LatticePoint lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    const double o = region.offset()[i] - region.shift()[i];
    lo[i] = static_cast<int>(std::ceil(o + region.scale()[i] * region.shape().lower()[i] - 1e-9));
    hi[i] = static_cast<int>(std::floor(o + region.scale()[i] * region.shape().upper()[i] + 1e-9));
  }
  std::vector<int> flat;
  for_each_lattice_point(lo, hi, [&](const LatticePoint& z) {
    if (region.contains_site(z)) flat.insert(flat.end(), z.data(), z.data() + d);
  });
  if (flat.empty()) fail(ErrorKind::empty_window, "region contains no lattice sites");
  return LatticeWindow(
      Eigen::Map<const LatticePoints>(flat.data(), d, static_cast<Eigen::Index>(flat.size()) / d));
}

std::int64_t overlap_count(const Template& shape, double scale, const LatticePoint& k,
                           const Vector& shift) {
  if (!(scale > 0)) fail(ErrorKind::invalid_argument, "scale must be positive");
  if (k.size() != shape.dim() || shift.size() != shape.dim()) {
    fail(ErrorKind::dimension_mismatch, "lag dimension does not match template");
  }
  const LatticeWindow window(scaled_template_sites(shape, scale, Vector::Zero(shape.dim()), shift));
  std::int64_t count = 0;
  for (Eigen::Index i = 0; i < window.size(); ++i) {
    if (window.contains(window.site(i) - k)) ++count;
  }
  return count;
}

std::int64_t overlap_count(const Template& shape, double scale, const LatticePoint& k) {
  return overlap_count(shape, scale, k, Vector::Zero(shape.dim()));
}

// ---------------------------------------------------------------------------
// Subsamples

std::string to_string(Scheme scheme) { return scheme == Scheme::ol ? "OL" : "NOL"; }

Scheme parse_scheme(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "ol") return Scheme::ol;
  if (t == "nol") return Scheme::nol;
  fail(ErrorKind::parse, "unknown scheme '" + text + "' (expected ol or nol)");
}

SubsampleSpec SubsampleSpec::same_shape(const Region& region, double scale, Scheme scheme) {
  return SubsampleSpec{region.shape(), scale, scheme};
}

bool SubsampleSpec::integer_scale() const {
  return scale >= 1.0 && std::abs(scale - std::round(scale)) < 1e-12;
}

Eigen::Index SubsampleIndexSet::site_count(Eigen::Index j) const {
  return scheme == Scheme::ol ? pattern.cols() : members[static_cast<std::size_t>(j)].cols();
}

LatticePoints SubsampleIndexSet::sites(Eigen::Index j) const {
  if (scheme == Scheme::nol) return members[static_cast<std::size_t>(j)];
  return pattern.colwise() + offsets.col(j);
}

namespace {

void check_spec(const Region& region, const SubsampleSpec& spec) {
  if (spec.sub_template.dim() != region.dim()) {
    fail(ErrorKind::dimension_mismatch, "subsample template dimension does not match region");
  }
  if (!(spec.scale > 0) || !std::isfinite(spec.scale)) {
    fail(ErrorKind::invalid_argument, "subsample scale must be positive");
  }
  if (spec.scale > region.min_scale()) {
    fail(ErrorKind::invalid_argument, "subsample scale exceeds the smallest region scaling");
  }
}

bool sites_inside(const LatticeWindow& window, const LatticePoints& pattern, const LatticePoint& i) {
  if (pattern.cols() == 0) return false;
  for (Eigen::Index c = 0; c < pattern.cols(); ++c) {
    if (!window.contains(pattern.col(c) + i)) return false;
  }
  return true;
}

}  // namespace

SubsampleIndexSet enumerate_ol(const Region& region, const SubsampleSpec& spec) {
  if (spec.scheme != Scheme::ol) fail(ErrorKind::invalid_argument, "enumerate_ol needs scheme OL");
  check_spec(region, spec);
  const int d = region.dim();
  const LatticeWindow window = lattice_sites(region);
  SubsampleIndexSet out;
  out.scheme = Scheme::ol;
  out.pattern = scaled_template_sites(spec.sub_template, spec.scale, Vector::Zero(d), region.shift());
  const ConvexBody outer = region.body();
  const ConvexBody unit = transform_body(spec.sub_template.body(), Vector::Constant(d, spec.scale),
                                         Vector::Zero(d));

  // Candidate offsets: window box shrunk by the subsample's extent.
  LatticePoint lo(d), hi(d);
  for (int r = 0; r < d; ++r) {
    const double o = region.offset()[r];
    lo[r] = static_cast<int>(std::floor(o + region.scale()[r] * region.shape().lower()[r] -
                                        spec.scale * spec.sub_template.lower()[r])) - 1;
    hi[r] = static_cast<int>(std::ceil(o + region.scale()[r] * region.shape().upper()[r] -
                                       spec.scale * spec.sub_template.upper()[r])) + 1;
  }
  std::vector<int> flat;
  for_each_lattice_point(lo, hi, [&](const LatticePoint& i) {
    bool inside = false;
    if (spec.containment == Containment::lattice) {
      inside = sites_inside(window, out.pattern, i);
    } else {
      inside = body_inside(transform_body(unit, Vector::Ones(d), i.cast<double>()), outer);
    }
    if (inside) flat.insert(flat.end(), i.data(), i.data() + d);
  });
  if (flat.empty()) fail(ErrorKind::empty_subsample_set, "no OL subsample fits inside the region");
  out.offsets = Eigen::Map<const LatticePoints>(flat.data(), d, static_cast<Eigen::Index>(flat.size()) / d);
  return out;
}

SubsampleIndexSet enumerate_nol(const Region& region, const SubsampleSpec& spec) {
  if (spec.scheme != Scheme::nol) fail(ErrorKind::invalid_argument, "enumerate_nol needs scheme NOL");
  check_spec(region, spec);
  const int d = region.dim();
  const double s = spec.scale;
  const LatticeWindow window = lattice_sites(region);
  const Template cube = Template::hypercube(d);
  const ConvexBody outer = region.body();
  SubsampleIndexSet out;
  out.scheme = Scheme::nol;
  out.non_integer_scale = !spec.integer_scale();

  LatticePoint lo(d), hi(d);
  for (int r = 0; r < d; ++r) {
    const double o = region.offset()[r];
    lo[r] = static_cast<int>(std::floor((o + region.scale()[r] * region.shape().lower()[r]) / s)) - 1;
    hi[r] = static_cast<int>(std::ceil((o + region.scale()[r] * region.shape().upper()[r]) / s)) + 1;
  }
  std::vector<int> flat;
  for_each_lattice_point(lo, hi, [&](const LatticePoint& i) {
    const Vector center = s * i.cast<double>();
    bool inside = false;
    if (spec.containment == Containment::lattice) {
      const LatticePoints cell = scaled_template_sites(cube, s, center, region.shift());
      inside = sites_inside(window, cell, LatticePoint::Zero(d));
    } else {
      inside = body_inside(transform_body(cube.body(), Vector::Constant(d, s), center), outer);
    }
    if (!inside) return;
    LatticePoints members = scaled_template_sites(spec.sub_template, s, center, region.shift());
    if (members.cols() == 0) return;
    flat.insert(flat.end(), i.data(), i.data() + d);
    out.members.push_back(std::move(members));
  });
  if (flat.empty()) fail(ErrorKind::empty_subsample_set, "no NOL subregion fits inside the region");
  out.offsets = Eigen::Map<const LatticePoints>(flat.data(), d, static_cast<Eigen::Index>(flat.size()) / d);
  return out;
}

SubsampleIndexSet enumerate_subsamples(const Region& region, const SubsampleSpec& spec) {
  return spec.scheme == Scheme::ol ? enumerate_ol(region, spec) : enumerate_nol(region, spec);
}

}  // namespace latblock
