// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "latblock/constants.hpp"
#include "latblock/covariance.hpp"
#include "latblock/error.hpp"
#include "latblock/estimators.hpp"
#include "latblock/fieldsim.hpp"
#include "latblock/harness.hpp"
#include "latblock/parse.hpp"
#include "latblock/scaling.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

using namespace latblock;

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20030611;

struct Criterion {
  std::vector<std::string> failures;
  std::vector<std::string> info;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void close(double got, double want, double tol, const std::string& what) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: got %.12g want %.12g (tol %.1e)", what.c_str(), got, want, tol);
    check(std::abs(got - want) <= tol, buf);
  }
  void note(const std::string& text) { info.push_back(text); }
};

int failed_count = 0;

void run(const std::string& id, const std::string& title, const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = c.failures.empty();
  if (!ok) ++failed_count;
  std::printf("[%s] %s %s (%.1fs)\n", ok ? "PASS" : "FAIL", id.c_str(), title.c_str(), secs);
  for (const auto& s : c.info) std::printf("       %s\n", s.c_str());
  for (const auto& s : c.failures) std::printf("       FAILED: %s\n", s.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

StudyRegion box(const std::string& name, double a, double b, std::vector<double> grid = {}) {
  return {name, Region(Template::hypercube(2), vec({a, b})), std::move(grid), {}};
}

StudyModel study_model(const std::string& spec) { return {spec, parse_covariogram(spec, 2)}; }

const MseRow& find_row(const MseTable& t, const std::string& region, const std::string& sub, double s) {
  for (const auto& r : t.rows) {
    if (r.region == region && r.sub_template == sub && r.s_lambda == s) return r;
  }
  fail(ErrorKind::invalid_argument, "missing MSE row " + region + " " + sub);
}

void within_se(Criterion& c, const MseRow& row, double target, const std::string& label) {
  const double z = std::abs(row.mse - target) / row.mc_se;
  c.note(label + fmt(": mse %.4f se %.4f target %.4f (%.2f SE)", row.mse, row.mc_se, target, z));
  c.check(!row.na() && z <= 3.0, label + " not within 3 standard errors" + (row.na() ? " (" + row.note + ")" : ""));
}

// ---------------------------------------------------------------------------
// Direct subsample estimator on a box window, written from the definitions only.

struct BoxField {
  int lo[2], hi[2];
  Eigen::MatrixXd values;  // p x N, sites in row-major (first coordinate slowest) order
  double at(int row, int z1, int z2) const {
    return values(row, (z1 - lo[0]) * (hi[1] - lo[1] + 1) + (z2 - lo[1]));
  }
};

// Sites z of an s-block centred at c: c - s/2 < z <= c + s/2 per axis.
void block_range(double c, int s, int& first, int& last) {
  first = static_cast<int>(std::floor(c - s / 2.0)) + 1;
  last = static_cast<int>(std::floor(c + s / 2.0));
}

// Returns -1 when fewer than two subsamples exist.
double direct_tau_hat(const BoxField& f, int s, bool nol, bool momvar) {
  std::vector<double> thetas;
  std::vector<double> counts;
  const int reach = 2 * (f.hi[0] - f.lo[0] + f.hi[1] - f.lo[1]) + 4;
  for (int i1 = -reach; i1 <= reach; ++i1) {
    for (int i2 = -reach; i2 <= reach; ++i2) {
      const double c1 = nol ? static_cast<double>(s) * i1 : i1;
      const double c2 = nol ? static_cast<double>(s) * i2 : i2;
      int a1, b1, a2, b2;
      block_range(c1, s, a1, b1);
      block_range(c2, s, a2, b2);
      if (a1 < f.lo[0] || b1 > f.hi[0] || a2 < f.lo[1] || b2 > f.hi[1]) continue;
      double sum0 = 0.0, sum1 = 0.0;
      for (int z1 = a1; z1 <= b1; ++z1) {
        for (int z2 = a2; z2 <= b2; ++z2) {
          sum0 += f.at(0, z1, z2);
          if (momvar) sum1 += f.at(1, z1, z2);
        }
      }
      const double n = static_cast<double>((b1 - a1 + 1) * (b2 - a2 + 1));
      const double m0 = sum0 / n, m1 = sum1 / n;
      thetas.push_back(momvar ? m1 - m0 * m0 : m0);
      counts.push_back(n);
    }
  }
  if (thetas.size() < 2) return -1.0;
  double total = 0.0;
  for (double t : thetas) total += t;
  const double grand = total / static_cast<double>(thetas.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    const double dev = thetas[j] - grand;
    acc += counts[j] * dev * dev;
  }
  return acc / static_cast<double>(thetas.size());
}

// Independent O(N^2) oracle: N^{-1} sum_{s, t} sigma(s - t) on a box window.
double brute_tau_n_sq(int a, int b, const std::function<double(int, int)>& sigma) {
  double total = 0.0;
  for (int x1 = 0; x1 < a; ++x1)
    for (int y1 = 0; y1 < b; ++y1)
      for (int x2 = 0; x2 < a; ++x2)
        for (int y2 = 0; y2 < b; ++y2) total += sigma(x1 - x2, y1 - y2);
  return total / (a * b);
}

}  // namespace

int main() {
  std::printf("latblock acceptance suite\n");

  run("AC1", "analytic shape constants", [](Criterion& c) {
    const double tol = 1e-6;
    for (int d = 1; d <= 5; ++d) {
      c.close(*k0_analytic(Template::hypercube(d)), std::pow(2.0 / 3.0, d), tol, "K0 hypercube d=" + std::to_string(d));
    }
    c.close(*k0_analytic(Template::sphere()), 34.0 / 105.0, tol, "K0 sphere");
    c.close(*k0_analytic(Template::circle()), 1.0 - 16.0 / (3.0 * pi * pi), tol, "K0 circle");
    c.close(*k0_analytic(Template::hexagon()), 37.0 / 81.0, tol, "K0 hexagon");
    c.close(*k0_analytic(Template::right_triangle()), 0.4, tol, "K0 right triangle");
    c.close(*k0_analytic(Template::isosceles_triangle()), 0.4, tol, "K0 isosceles triangle");
    c.close(k1(Template::circle()), pi / 4.0 - 4.0 / (3.0 * pi), tol, "K1 circle");
    c.close(k1(Template::sphere()), 17.0 * pi / 315.0, tol, "K1 sphere");
    c.close(k1(Template::right_triangle()), 0.2, tol, "K1 right triangle");
    c.close(k1(Template::diamond()), 2.0 / 9.0, tol, "K1 diamond");
  });

  run("AC2", "quadrature K0 against golden values", [](Criterion& c) {
    const double tol = 1e-3;
    const std::vector<std::pair<Template, double>> golden = {
        {Template::hypercube(1), 2.0 / 3.0},
        {Template::hypercube(2), 4.0 / 9.0},
        {Template::hypercube(3), 8.0 / 27.0},
        {Template::sphere(), 34.0 / 105.0},
        {Template::circle(), 1.0 - 16.0 / (3.0 * pi * pi)},
        {Template::hexagon(), 37.0 / 81.0},
        {Template::right_triangle(), 0.4},
        {Template::isosceles_triangle(), 0.4},
        {Template::diamond(), 4.0 / 9.0},
        {Template::cylinder(0.4, 0.9), (2.0 / 3.0) * (1.0 - 16.0 / (3.0 * pi * pi))},
    };
    for (const auto& [shape, want] : golden) {
      const ShapeConstants sc = k0_numeric(shape);
      c.close(sc.k0, want, tol, "numeric K0 " + shape.spec());
    }
    // K0 is invariant under linear maps.
    Eigen::Matrix2d shear;
    shear << 1.0, 0.35, -0.2, 0.9;
    const std::vector<std::pair<Template, double>> mapped = {
        {Template::hypercube(2).mapped(shear), 4.0 / 9.0},
        {Template::circle().mapped(shear), 1.0 - 16.0 / (3.0 * pi * pi)},
        {Template::isosceles_triangle().mapped(shear), 0.4},
        {Template::hexagon().mapped(shear), 37.0 / 81.0},
    };
    for (const auto& [shape, want] : mapped) {
      c.close(k0(shape).k0, want, 2e-3, "affine image " + shape.spec());
    }
  });

  run("AC3", "degenerate limits", [](Criterion& c) {
    c.close(k0(Template::trapezoid(0.6, 0.6)).k0, 4.0 / 9.0, 1e-3, "trapezoid b2/b1 = 1");
    c.close(k0(Template::trapezoid(0.001, 1.0)).k0, 0.4, 1e-3, "trapezoid b2/b1 = 1000");
    const Template rot = Template::rotated_rectangle(pi / 4.0, std::sqrt(0.5), std::sqrt(0.5));
    for (int k1v = -5; k1v <= 5; ++k1v) {
      for (int k2v = -5; k2v <= 5; ++k2v) {
        LatticePoint k(2);
        k << k1v, k2v;
        const double weight = *v_weight_analytic(rot, k) / rot.volume();
        const double want = 2.0 * k.cwiseAbs().maxCoeff();
        c.close(weight, want, 1e-12 * std::max(1.0, want),
                "rotated rectangle weight at (" + std::to_string(k1v) + "," + std::to_string(k2v) + ")");
      }
    }
  });

  run("AC4", "numeric bias weights against the analytic registry", [](Criterion& c) {
    const std::vector<Template> shapes = {Template::hypercube(2), Template::circle(), Template::diamond(),
                                          Template::right_triangle(), Template::isosceles_triangle(),
                                          Template::hexagon()};
    for (const auto& shape : shapes) {
      double worst = 0.0;
      for (int a = -3; a <= 3; ++a) {
        for (int b = -3; b <= 3; ++b) {
          if (a == 0 && b == 0) continue;
          LatticePoint k(2);
          k << a, b;
          const double diff = std::abs(v_weight_numeric(shape, k) - *v_weight_analytic(shape, k));
          worst = std::max(worst, diff);
          c.check(diff <= 1e-3, shape.spec() + fmt(" V(%g,%g) off by %.3g", a, b, diff));
        }
      }
      c.note(shape.spec() + fmt(": max |numeric - analytic| = %.2e", worst));
    }
  });

  run("AC5", "OL/NOL estimators equal a direct implementation bit for bit", [](Criterion& c) {
    int compared = 0;
    for (int a = 1; a <= 6; ++a) {
      for (int b = 1; b <= 6; ++b) {
        const Region region(Template::hypercube(2), vec({double(a), double(b)}));
        const LatticeWindow window = lattice_sites(region);
        BoxField f;
        f.lo[0] = static_cast<int>(std::floor(-a / 2.0)) + 1;
        f.hi[0] = static_cast<int>(std::floor(a / 2.0));
        f.lo[1] = static_cast<int>(std::floor(-b / 2.0)) + 1;
        f.hi[1] = static_cast<int>(std::floor(b / 2.0));
        // The library window must list the same sites in the same order.
        int col = 0;
        bool same = window.size() == a * b;
        for (int z1 = f.lo[0]; same && z1 <= f.hi[0]; ++z1)
          for (int z2 = f.lo[1]; z2 <= f.hi[1]; ++z2, ++col)
            same = same && window.site(col)[0] == z1 && window.site(col)[1] == z2;
        c.check(same, "window order differs for " + std::to_string(a) + "x" + std::to_string(b));
        if (!same) continue;
        RngStream stream(kSeed, static_cast<std::uint64_t>(10 * a + b));
        f.values.resize(2, a * b);
        for (int j = 0; j < a * b; ++j) {
          const double x = stream.next_normal();
          f.values(0, j) = x;
          f.values(1, j) = x * x;
        }
        const FieldSample sample(window, f.values);
        const FieldSample mean_sample(window, f.values.topRows(1));
        for (int s = 1; s <= std::min(a, b); ++s) {
          for (bool nol : {false, true}) {
            for (bool momvar : {false, true}) {
              const double want = direct_tau_hat(f, s, nol, momvar);
              const SubsampleSpec spec{Template::hypercube(2), double(s), nol ? Scheme::nol : Scheme::ol};
              const SmoothStatistic stat = momvar ? SmoothStatistic::moment_variance() : SmoothStatistic::mean();
              const std::string label = std::to_string(a) + "x" + std::to_string(b) + " s=" + std::to_string(s) +
                                        (nol ? " NOL" : " OL") + (momvar ? " momvar" : " mean");
              try {
                const double got = subsample_estimate(momvar ? sample : mean_sample, region, spec, stat).tau_hat_sq;
                c.check(want >= 0 && got == want, label + fmt(": %.17g vs %.17g", got, want));
                ++compared;
              } catch (const Error& e) {
                const bool expected = want < 0 && (e.kind() == ErrorKind::degenerate_subsampling ||
                                                   e.kind() == ErrorKind::empty_subsample_set);
                c.check(expected, label + ": " + e.what());
              }
            }
          }
        }
      }
    }
    c.note("compared " + std::to_string(compared) + " (window, scale, scheme, statistic) cases");
  });

  run("AC6", "exact variance paths agree", [](Criterion& c) {
    const std::vector<Covariogram> models = {Covariogram::exp_separable(vec({1.0, 1.0})),
                                             Covariogram::exp_separable(vec({0.5, 0.3})),
                                             Covariogram::gauss_separable(vec({0.5, 0.3})),
                                             Covariogram::gauss_isotropic(0.2, 2), Covariogram::white_noise(2)};
    double worst = 0.0;
    for (const auto& cov : models) {
      for (int a = 1; a <= 12; ++a) {
        for (int b = 1; b <= 12; ++b) {
          const LatticeWindow w = lattice_sites(Region(Template::hypercube(2), vec({double(a), double(b)})));
          const double lag = exact_tau_n_sq(w, cov, TauMethod::lag_count);
          const double pair = exact_tau_n_sq(w, cov, TauMethod::pair_sum);
          const double rel = std::abs(lag - pair) / std::abs(pair);
          worst = std::max(worst, rel);
          c.check(rel <= 1e-12, cov.spec() + " " + std::to_string(a) + "x" + std::to_string(b) + fmt(" rel %.2e", rel));
        }
      }
    }
    c.note(fmt("max relative difference %.2e", worst));
    const Covariogram e11 = Covariogram::exp_separable(vec({1.0, 1.0}));
    const LatticeWindow w22 = lattice_sites(Region(Template::hypercube(2), vec({2.0, 2.0})));
    const double want = std::pow(1.0 + std::exp(-1.0), 2);
    c.close(exact_tau_n_sq(w22, e11), want, 1e-12 * want, "2x2 E(1,1)");
    const double brute = brute_tau_n_sq(7, 9, [](int x, int y) { return std::exp(-0.5 * std::abs(x) - 0.3 * std::abs(y)); });
    const LatticeWindow w79 = lattice_sites(Region(Template::hypercube(2), vec({7.0, 9.0})));
    c.close(exact_tau_n_sq(w79, Covariogram::exp_separable(vec({0.5, 0.3}))), brute, 1e-12 * brute,
            "7x9 E(0.5,0.3) against direct double sum");
  });

  run("AC7", "NPI and HJ arithmetic", [](Criterion& c) {
    const double tau2 = 4.6826943763142, B0 = 7.96917906822;
    for (double volume : {252.0, 1260.0, 400.0, 81.0 * pi}) {
      for (double c1 : {0.5, 1.0}) {
        for (double c2 : {0.5}) {
          const NpiDiagnostics diag =
              npi_pilots(volume, 2, c1, c2, [&](int s) { return tau2 - B0 / static_cast<double>(s); });
          c.close(diag.b0_hat, B0, 1e-12 * B0, fmt("B0 hat, |R_n|=%g c1=%g c2=%g", volume, c1, c2));
        }
      }
    }
    const double hj = hj_recalibrate(3.0, 16.0, 2);
    c.check(hj == 6.0, fmt("HJ recalibration gave %.17g, want 6", hj));
  });

  run("AC8", "optimal scaling laws", [](Criterion& c) {
    const std::vector<Template> shapes = {Template::hypercube(2), Template::circle(), Template::hexagon(),
                                          Template::right_triangle(), Template::sphere(), Template::hypercube(1)};
    for (const auto& shape : shapes) {
      const int d = shape.dim();
      const ShapeConstants sc = k0(shape);
      const double det = 252.0, b = 7.5, t2 = 4.5;
      const double ol = theoretical_scaling(d, det, b, t2, sc, Scheme::ol).lambda_opt_real;
      const double nol = theoretical_scaling(d, det, b, t2, sc, Scheme::nol).lambda_opt_real;
      const double want = std::pow(sc.k1, -1.0 / (d + 2.0));
      c.close(ol / nol, want, 1e-12 * want, "OL/NOL ratio " + shape.spec());
      for (double factor : {2.0, 10.0, 1000.0}) {
        const double scaled = theoretical_scaling(d, det * factor, b, t2, sc, Scheme::ol).lambda_opt_real;
        const double exponent = std::log(scaled / ol) / std::log(factor);
        c.close(exponent, 1.0 / (d + 2.0), 1e-12, fmt("det exponent, factor %g", factor) + " " + shape.spec());
      }
    }
  });

  run("AC9", "normalized MSE, E(1,1) on rectangles", [](Criterion& c) {
    StudyConfig config;
    std::vector<double> grid;
    for (int s = 1; s <= 10; ++s) grid.push_back(s);
    config.regions = {box("(-7,7]x(-9,9]", 14, 18, grid), box("(-15,15]x(-21,21]", 30, 42, {7})};
    config.models = {study_model("expsep:b1=1,b2=1")};
    config.replicates = 1000;
    config.seed = kSeed;
    const MseTable table = mse_study(config);
    within_se(c, find_row(table, "(-7,7]x(-9,9]", "same", 3), 0.2201, "14x18 s=3");
    within_se(c, find_row(table, "(-7,7]x(-9,9]", "same", 4), 0.1926, "14x18 s=4");
    within_se(c, find_row(table, "(-7,7]x(-9,9]", "same", 5), 0.2106, "14x18 s=5");
    within_se(c, find_row(table, "(-15,15]x(-21,21]", "same", 7), 0.0983, "30x42 s=7");
    for (const auto& row : optimal_scaling(table)) {
      if (row.region != "(-7,7]x(-9,9]") continue;
      c.note(fmt("14x18 OL argmin %g", row.s_lambda_opt));
      c.check(row.s_lambda_opt >= 3 && row.s_lambda_opt <= 5, fmt("argmin %g not in {3,4,5}", row.s_lambda_opt));
    }
  });

  run("AC10", "normalized MSE, Gaussian beta=2, square and disk subsamples", [](Criterion& c) {
    StudyConfig config;
    config.regions = {box("(-10,10]^2", 20, 20, {3})};
    config.models = {study_model("gaussiso:b=2")};
    config.sub_templates = {"same", "circle:r=0.5"};
    config.replicates = 1000;
    config.seed = kSeed;
    const MseTable table = mse_study(config);
    within_se(c, find_row(table, "(-10,10]^2", "same", 3), 0.0436, "square subsamples s=3");
    within_se(c, find_row(table, "(-10,10]^2", "circle:r=0.5", 3), 0.0436, "disk subsamples s=3");
  });

  run("AC11", "selector sanity", [](Criterion& c) {
    auto share = [](const PhiTable& t, const std::string& selector, const std::string& model,
                    std::initializer_list<int> keep) {
      int hit = 0, total = 0;
      for (const auto& f : t.freq) {
        if (f.selector != selector || f.model != model) continue;
        total += f.count;
        for (int k : keep) hit += f.estimate == k ? f.count : 0;
      }
      return total ? static_cast<double>(hit) / total : -1.0;
    };

    // NPI on the 14 x 18 rectangle.
    StudyConfig npi;
    std::vector<double> grid;
    for (int s = 1; s <= 10; ++s) grid.push_back(s);
    npi.regions = {box("(-7,7]x(-9,9]", 14, 18, grid)};
    npi.models = {study_model("expsep:b1=1,b2=1"), study_model("expsep:b1=0.5,b2=0.3")};
    npi.replicates = 1000;
    npi.seed = kSeed;
    npi.npi = NpiConfig{{0.5, 1.0}, {0.5}};
    const StudyResult r = run_study(npi);
    for (const auto& row : r.scaling) c.note(row.model + fmt(": empirical optimal scale %g", row.s_lambda_opt));
    for (const auto& row : r.phi.rows) {
      c.note(row.model + " npi " + row.setting + fmt(": E(phi^2) %.4f (se %.4f)", row.e_phi_sq, row.mc_se) +
             (row.note.empty() ? "" : " " + row.note));
      c.check(row.note.empty() && row.e_phi_sq < 0.05, row.model + " " + row.setting + " E(phi^2) not below 0.05");
    }
    int npi_hit = 0, npi_total = 0;
    for (const auto& f : r.phi.freq) {
      if (f.model != "expsep:b1=1,b2=1" || f.setting != "c1=0.5;c2=0.5") continue;
      npi_total += f.count;
      if (f.estimate >= 3 && f.estimate <= 5) npi_hit += f.count;
    }
    const double npi_share = npi_total ? static_cast<double>(npi_hit) / npi_total : 0.0;
    c.note(fmt("NPI (0.5,0.5) E(1,1): share on {3,4,5} = %.3f", npi_share));
    c.check(npi_share >= 0.9, fmt("NPI share on {3,4,5} is %.3f < 0.9", npi_share));

    // HJ on the radius-9 disk.
    StudyConfig hj;
    hj.regions = {{"disk r=9", Region(Template::circle(), vec({18.0, 18.0})), grid, {}}};
    hj.models = {study_model("gausssep:b1=0.5,b2=0.3")};
    hj.replicates = 1000;
    hj.seed = kSeed;
    hj.hj = HjConfig{{3}, {}};
    const StudyResult h = run_study(hj);
    for (const auto& row : h.phi.rows) {
      c.note("HJ " + row.setting + fmt(": E(phi^2) %.4f", row.e_phi_sq) + (row.note.empty() ? "" : " " + row.note));
    }
    const double hj_share = share(h.phi, "hj", "gausssep:b1=0.5,b2=0.3", {5, 6});
    c.note(hj_share < 0 ? std::string("HJ lambda_m=3 disk: no estimates")
                        : fmt("HJ lambda_m=3 disk: share on {5,6} = %.3f", hj_share));
    c.check(hj_share >= 0.8, "HJ lambda_m=3 on the radius-9 disk: share on {5,6} below 0.8 or no estimates");
  });

  run("AC12", "determinism across thread counts", [](Criterion& c) {
    auto make = [](int threads) {
      StudyConfig config;
      config.regions = {box("(-7,7]x(-9,9]", 14, 18, {2, 3, 4, 5}), box("(-5,5]^2", 10, 10, {2, 3})};
      config.models = {study_model("expsep:b1=1,b2=1"), study_model("gaussiso:b=0.2")};
      config.schemes = {Scheme::ol, Scheme::nol};
      config.replicates = 200;
      config.seed = kSeed;
      config.threads = threads;
      config.npi = NpiConfig{{0.5}, {0.5}};
      const StudyResult r = run_study(config);
      return mse_csv(r.mse) + scaling_csv(r.scaling) + phi_csv(r.phi) + freq_csv(r.phi);
    };
    const std::string one = make(1);
    const std::string again = make(1);
    const std::string four = make(4);
    const std::string seven = make(7);
    c.check(one == again, "repeat run with one thread differs");
    c.check(one == four, "one thread and four threads differ");
    c.check(one == seven, "one thread and seven threads differ");
    c.note("compared " + std::to_string(one.size()) + " bytes of CSV output");
  });

  std::printf("%d criteria failed\n", failed_count);
  return failed_count == 0 ? 0 : 1;
}
