#include "latblock/parse.hpp"

#include "latblock/csv.hpp"
#include "latblock/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <numbers>

namespace latblock {

namespace {

struct Spec {
  std::string name;
  std::map<std::string, std::string> params;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (t.empty() || used != t.size()) fail(ErrorKind::parse, "bad number '" + text + "' for " + what);
  return v;
}

int to_int(const std::string& text, const std::string& what) {
  const double v = to_real(text, what);
  if (v != std::floor(v)) fail(ErrorKind::parse, what + " must be an integer");
  return static_cast<int>(v);
}

Spec split(const std::string& text) {
  Spec out;
  const auto colon = text.find(':');
  out.name = trim(text.substr(0, colon));
  if (out.name.empty()) fail(ErrorKind::parse, "empty model string");
  if (colon == std::string::npos) return out;
  const std::string rest = text.substr(colon + 1);
  if (!rest.empty() && rest[0] == '@') {
    out.params["@"] = rest.substr(1);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item = trim(rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::parse, "expected key=value in '" + text + "'");
    const std::string key = trim(item.substr(0, eq));
    if (!out.params.emplace(key, item.substr(eq + 1)).second) {
      fail(ErrorKind::parse, "duplicate key '" + key + "' in '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

class Params {
 public:
  explicit Params(const Spec& spec) : spec_(spec) {}
  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    used_.push_back(key);
    const auto it = spec_.params.find(key);
    if (it == spec_.params.end()) {
      if (fallback) return *fallback;
      fail(ErrorKind::parse, spec_.name + " needs parameter '" + key + "'");
    }
    return to_real(it->second, spec_.name + "." + key);
  }
  int integer(const std::string& key, int fallback) {
    const double v = real(key, static_cast<double>(fallback));
    if (v != std::floor(v)) fail(ErrorKind::parse, spec_.name + "." + key + " must be an integer");
    return static_cast<int>(v);
  }
  bool has(const std::string& key) const { return spec_.params.count(key) > 0; }
  void done() const {
    for (const auto& [key, value] : spec_.params) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        fail(ErrorKind::parse, "unknown parameter '" + key + "' for " + spec_.name);
      }
    }
  }

 private:
  const Spec& spec_;
  std::vector<std::string> used_;
};

}  // namespace

Template parse_template(const std::string& text) {
  const Spec spec = split(text);
  Params p(spec);
  const std::string& n = spec.name;
  Template t = [&]() -> Template {
    if (n == "hypercube" || n == "square" || n == "cube") {
      return Template::hypercube(p.integer("d", n == "cube" ? 3 : 2));
    }
    if (n == "rotrect") return Template::rotated_rectangle(p.real("theta"), p.real("l1"), p.real("l2"));
    if (n == "diamond") return Template::diamond();
    if (n == "circle" || n == "disk") return Template::circle(p.real("r", 0.5));
    if (n == "righttri") return Template::right_triangle();
    if (n == "isotri") return Template::isosceles_triangle();
    if (n == "trapezoid") return Template::trapezoid(p.real("b1"), p.real("b2"));
    if (n == "hex" || n == "hexagon") return Template::hexagon(p.real("l", 0.5));
    if (n == "parallelogram") {
      return Template::parallelogram(p.real("gamma"), p.real("l1"), p.real("l2"));
    }
    if (n == "sphere") return Template::sphere(p.real("r", 0.5));
    if (n == "cylinder") return Template::cylinder(p.real("r"), p.real("h"));
    fail(ErrorKind::parse, "unknown template '" + n + "'");
  }();
  p.done();
  return t;
}

Covariogram parse_covariogram(const std::string& text, int dim_hint) {
  const Spec spec = split(text);
  Params p(spec);
  const std::string& n = spec.name;
  auto betas = [&]() {
    std::vector<double> b;
    for (int i = 1; p.has("b" + std::to_string(i)); ++i) b.push_back(p.real("b" + std::to_string(i)));
    if (b.empty()) fail(ErrorKind::parse, n + " needs b1, b2, ...");
    return Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size())).eval();
  };
  auto dim = [&]() { return p.integer("d", dim_hint > 0 ? dim_hint : 2); };
  Covariogram cov = [&]() -> Covariogram {
    if (n == "expsep") return Covariogram::exp_separable(betas());
    if (n == "gausssep") return Covariogram::gauss_separable(betas());
    if (n == "gaussiso") {
      const double b = p.real("b");
      return Covariogram::gauss_isotropic(b, dim());
    }
    if (n == "white") return Covariogram::white_noise(dim());
    if (n == "table") {
      const auto it = spec.params.find("@");
      if (it == spec.params.end()) fail(ErrorKind::parse, "table covariogram needs table:@file.csv");
      const CsvTable table = read_csv(it->second);
      const int d = static_cast<int>(table.header.size()) - 1;
      if (d < 1 || table.header.back() != "sigma") {
        fail(ErrorKind::parse, "covariogram table header must be k1..kd,sigma");
      }
      std::vector<std::pair<LatticePoint, double>> entries;
      for (const auto& row : table.rows) {
        LatticePoint k(d);
        for (int i = 0; i < d; ++i) k[i] = to_int(row[static_cast<std::size_t>(i)], "table lag");
        entries.emplace_back(k, to_real(row.back(), "table sigma"));
      }
      return Covariogram::tabulated(d, entries);
    }
    fail(ErrorKind::parse, "unknown covariogram '" + n + "'");
  }();
  if (n != "table") p.done();
  if (dim_hint > 0 && cov.dim() != dim_hint) {
    fail(ErrorKind::dimension_mismatch, "covariogram '" + text + "' has dimension " +
                                            std::to_string(cov.dim()) + ", expected " +
                                            std::to_string(dim_hint));
  }
  return cov;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(to_real(text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos),
                          "list entry"));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

Vector parse_vector(const std::string& text, int dim) {
  const std::vector<double> v = parse_reals(text);
  if (dim > 0 && v.size() == 1) return Vector::Constant(dim, v[0]);
  if (dim > 0 && static_cast<int>(v.size()) != dim) {
    fail(ErrorKind::dimension_mismatch, "expected " + std::to_string(dim) + " values in '" + text + "'");
  }
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace latblock
