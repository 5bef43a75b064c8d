#include "latblock/harness.hpp"

#include "latblock/constants.hpp"
#include "latblock/csv.hpp"
#include "latblock/error.hpp"
#include "latblock/format.hpp"
#include "latblock/parse.hpp"
#include "latblock/scaling.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace latblock {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string na_note(const Error& e) { return "NA: " + std::string(e.what()); }

// ---------------------------------------------------------------------------
// Config parsing

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(ErrorKind::parse, where + " must be an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(ErrorKind::parse, "unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
std::vector<T> list_of(const json& value, const std::string& what) {
  try {
    if (value.is_array()) return value.get<std::vector<T>>();
    return {value.get<T>()};
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, what + ": " + e.what());
  }
}

Vector json_vector(const json& value, int dim, const std::string& what) {
  const auto v = list_of<double>(value, what);
  if (v.size() == 1) return Vector::Constant(dim, v[0]);
  if (static_cast<int>(v.size()) != dim) {
    fail(ErrorKind::dimension_mismatch, what + " needs " + std::to_string(dim) + " entries");
  }
  return Eigen::Map<const Vector>(v.data(), dim);
}

StudyRegion parse_region(const json& obj, std::size_t index) {
  const std::string where = "regions[" + std::to_string(index) + "]";
  check_keys(obj, {"template", "delta", "shift", "name", "s_lambda_grid", "hj_lambda_m"}, where);
  if (!obj.contains("template") || !obj.contains("delta")) {
    fail(ErrorKind::parse, where + " needs 'template' and 'delta'");
  }
  const Template t = parse_template(obj.at("template").get<std::string>());
  const int d = t.dim();
  Vector delta = json_vector(obj.at("delta"), d, where + ".delta");
  Vector shift = obj.contains("shift") ? json_vector(obj.at("shift"), d, where + ".shift") : Vector::Zero(d);
  StudyRegion out{"", Region(t, delta, shift), {}, {}};
  if (obj.contains("name")) {
    out.name = obj.at("name").get<std::string>();
  } else {
    out.name = t.spec() + "*";
    for (int i = 0; i < d; ++i) out.name += (i ? "x" : "") + format_number(delta[i]);
  }
  if (obj.contains("s_lambda_grid")) out.s_lambda_grid = list_of<double>(obj.at("s_lambda_grid"), where);
  if (obj.contains("hj_lambda_m")) out.hj_lambda_m = list_of<int>(obj.at("hj_lambda_m"), where);
  return out;
}

}  // namespace

StudyConfig parse_study_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::parse, std::string("study config is not valid JSON: ") + e.what());
  }
  check_keys(root, {"regions", "covariograms", "statistic", "schemes", "sub_templates", "s_lambda_grid",
                    "replicates", "seed", "threads", "sim_method", "containment", "selectors",
                    "s_lambda_opt", "tau_n_sq", "outputs"},
             "study config");
  StudyConfig c;
  try {
    if (!root.contains("regions") || !root.at("regions").is_array()) {
      fail(ErrorKind::parse, "study config needs a 'regions' array");
    }
    for (std::size_t i = 0; i < root.at("regions").size(); ++i) {
      c.regions.push_back(parse_region(root.at("regions")[i], i));
    }
    if (!root.contains("covariograms")) fail(ErrorKind::parse, "study config needs 'covariograms'");
    const int d = c.regions.empty() ? 0 : c.regions.front().region.dim();
    for (const auto& entry : root.at("covariograms")) {
      std::string spec, name;
      if (entry.is_string()) {
        spec = name = entry.get<std::string>();
      } else {
        check_keys(entry, {"spec", "name"}, "covariograms entry");
        spec = entry.at("spec").get<std::string>();
        name = entry.value("name", spec);
      }
      c.models.push_back({name, parse_covariogram(spec, d)});
    }
    if (root.contains("statistic")) c.statistic = root.at("statistic").get<std::string>();
    if (root.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : list_of<std::string>(root.at("schemes"), "schemes")) c.schemes.push_back(parse_scheme(s));
    }
    if (root.contains("sub_templates")) c.sub_templates = list_of<std::string>(root.at("sub_templates"), "sub_templates");
    if (root.contains("s_lambda_grid")) c.s_lambda_grid = list_of<double>(root.at("s_lambda_grid"), "s_lambda_grid");
    if (root.contains("replicates")) c.replicates = root.at("replicates").get<int>();
    if (root.contains("seed")) c.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("threads")) c.threads = root.at("threads").get<int>();
    if (root.contains("sim_method")) c.sim_method = parse_sim_method(root.at("sim_method").get<std::string>());
    if (root.contains("containment")) {
      const auto m = root.at("containment").get<std::string>();
      if (m == "lattice") c.containment = Containment::lattice;
      else if (m == "geometric") c.containment = Containment::geometric;
      else fail(ErrorKind::parse, "containment must be 'lattice' or 'geometric'");
    }
    if (root.contains("selectors")) {
      const json& sel = root.at("selectors");
      check_keys(sel, {"npi", "hj"}, "selectors");
      if (sel.contains("npi")) {
        check_keys(sel.at("npi"), {"c1", "c2"}, "selectors.npi");
        c.npi = NpiConfig{list_of<double>(sel.at("npi").at("c1"), "npi.c1"),
                          list_of<double>(sel.at("npi").at("c2"), "npi.c2")};
      }
      if (sel.contains("hj")) {
        check_keys(sel.at("hj"), {"lambda_m", "candidates"}, "selectors.hj");
        HjConfig hj;
        hj.lambda_m = list_of<int>(sel.at("hj").at("lambda_m"), "hj.lambda_m");
        if (sel.at("hj").contains("candidates")) {
          hj.candidates = list_of<double>(sel.at("hj").at("candidates"), "hj.candidates");
        }
        c.hj = hj;
      }
    }
    if (root.contains("s_lambda_opt")) {
      const json& opt = root.at("s_lambda_opt");
      if (opt.is_number()) {
        c.s_lambda_opt_all = opt.get<double>();
      } else {
        for (const auto& e : opt) {
          check_keys(e, {"region", "model", "scheme", "value"}, "s_lambda_opt entry");
          c.s_lambda_opt[{e.at("region").get<std::string>(), e.at("model").get<std::string>(),
                          parse_scheme(e.value("scheme", std::string("ol")))}] = e.at("value").get<double>();
        }
      }
    }
    if (root.contains("tau_n_sq")) c.tau_n_sq = root.at("tau_n_sq").get<double>();
    if (root.contains("outputs")) {
      const json& out = root.at("outputs");
      check_keys(out, {"mse_csv", "scaling_csv", "phi_csv", "freq_csv"}, "outputs");
      c.mse_csv = out.value("mse_csv", std::string());
      c.scaling_csv = out.value("scaling_csv", std::string());
      c.phi_csv = out.value("phi_csv", std::string());
      c.freq_csv = out.value("freq_csv", std::string());
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("study config: ") + e.what());
  }
  c.validate();
  return c;
}

StudyConfig load_study_config(const std::string& path) { return parse_study_config(read_text_file(path)); }

void StudyConfig::validate() const {
  if (regions.empty()) fail(ErrorKind::invalid_argument, "study needs at least one region");
  if (models.empty()) fail(ErrorKind::invalid_argument, "study needs at least one covariogram");
  if (schemes.empty()) fail(ErrorKind::invalid_argument, "study needs at least one scheme");
  if (replicates < 100) fail(ErrorKind::invalid_argument, "replicate count must be at least 100");
  if (threads < 0) fail(ErrorKind::invalid_argument, "threads must be nonnegative");
  const SmoothStatistic stat = SmoothStatistic::from_name(statistic);
  if (!stat.linear && !tau_n_sq) {
    fail(ErrorKind::invalid_argument, "statistic '" + statistic + "' needs a supplied tau_n_sq");
  }
  if (tau_n_sq && !(*tau_n_sq > 0)) fail(ErrorKind::invalid_argument, "tau_n_sq must be positive");
  std::set<std::string> names;
  const int d = regions.front().region.dim();
  for (const auto& r : regions) {
    if (!names.insert(r.name).second) fail(ErrorKind::invalid_argument, "duplicate region name " + r.name);
    if (r.region.dim() != d) fail(ErrorKind::dimension_mismatch, "all regions must share one dimension");
    for (double s : r.s_lambda_grid) {
      if (!(s > 0)) fail(ErrorKind::invalid_argument, "subsample scales must be positive");
    }
  }
  names.clear();
  for (const auto& m : models) {
    if (!names.insert(m.name).second) fail(ErrorKind::invalid_argument, "duplicate covariogram " + m.name);
    if (m.cov.dim() != d) fail(ErrorKind::dimension_mismatch, "covariogram dimension differs from regions");
  }
  for (double s : s_lambda_grid) {
    if (!(s > 0)) fail(ErrorKind::invalid_argument, "subsample scales must be positive");
  }
  for (const auto& sub : sub_templates) {
    if (sub != "same" && parse_template(sub).dim() != d) {
      fail(ErrorKind::dimension_mismatch, "subsample template " + sub + " has the wrong dimension");
    }
  }
  if (npi) {
    if (npi->c1.empty() || npi->c2.empty()) fail(ErrorKind::invalid_argument, "NPI needs c1 and c2 values");
    for (double v : npi->c1) if (!(v > 0)) fail(ErrorKind::invalid_argument, "NPI c1 must be positive");
    for (double v : npi->c2) if (!(v > 0)) fail(ErrorKind::invalid_argument, "NPI c2 must be positive");
  }
  if (hj) {
    for (int v : hj->lambda_m) if (v < 1) fail(ErrorKind::invalid_argument, "HJ lambda_m must be positive");
  }
  if ((npi || hj) && s_lambda_opt.empty() && !s_lambda_opt_all && s_lambda_grid.empty()) {
    bool every_region_grid = std::all_of(regions.begin(), regions.end(),
                                         [](const StudyRegion& r) { return !r.s_lambda_grid.empty(); });
    if (!every_region_grid) {
      fail(ErrorKind::invalid_argument, "selector study needs s_lambda_opt or an s_lambda_grid");
    }
  }
}

// ---------------------------------------------------------------------------
// Monte Carlo engine

std::pair<double, double> mean_and_se(const std::vector<double>& values) {
  if (values.empty()) return {kNaN, kNaN};
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

std::uint64_t pair_seed(std::uint64_t master, const std::string& region, const std::string& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  feed(region);
  feed(model);
  return master ^ h;
}

namespace {

struct Pair {
  const StudyRegion* region;
  const StudyModel* model;
  LatticeWindow window;
  std::unique_ptr<Generator> gen;
  double tau_n_sq = 0.0;
  std::uint64_t seed = 0;
  std::string note;  // setup failure
};

std::vector<Pair> build_pairs(const StudyConfig& config) {
  std::vector<Pair> pairs;
  for (const auto& r : config.regions) {
    for (const auto& m : config.models) {
      Pair p{&r, &m, lattice_sites(r.region), nullptr, 0.0, pair_seed(config.seed, r.name, m.name), ""};
      try {
        p.gen = std::make_unique<Generator>(m.cov, p.window, config.sim_method);
        p.tau_n_sq = config.tau_n_sq ? *config.tau_n_sq : exact_tau_n_sq(p.window, m.cov);
      } catch (const Error& e) {
        p.note = na_note(e);
      }
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

int thread_count(const StudyConfig& config) {
  if (config.threads > 0) return config.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(r) for r in [0, n) across threads; the first error (lowest r) is rethrown.
template <typename Body>
void parallel_replicates(int n, int threads, Body body) {
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < n; r = next++) body(r);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// Records the failure seen at the lowest replicate index, so the reason is schedule-independent.
class FailureLog {
 public:
  explicit FailureLog(std::size_t cells) : first_(cells, std::numeric_limits<int>::max()), what_(cells) {}
  void record(std::size_t cell, int replicate, const std::string& what) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (replicate < first_[cell]) {
      first_[cell] = replicate;
      what_[cell] = what;
    }
  }
  bool failed(std::size_t cell) const { return first_[cell] != std::numeric_limits<int>::max(); }
  const std::string& what(std::size_t cell) const { return what_[cell]; }

 private:
  std::mutex mutex_;
  std::vector<int> first_;
  std::vector<std::string> what_;
};

Eigen::MatrixXd simulate(const Pair& pair, int replicate, const SmoothStatistic& stat) {
  RngStream stream(pair.seed, static_cast<std::uint64_t>(replicate));
  return lift_scalar_field(pair.gen->sample(stream), stat);
}

std::vector<double> grid_for(const StudyConfig& config, const StudyRegion& region) {
  return region.s_lambda_grid.empty() ? config.s_lambda_grid : region.s_lambda_grid;
}

Template sub_template_for(const std::string& sub, const Region& region) {
  return sub == "same" ? region.shape() : parse_template(sub);
}

struct MseCell {
  std::size_t pair;
  MseRow row;
  std::unique_ptr<CompiledEstimator> estimator;
};

}  // namespace

MseTable mse_study(const StudyConfig& config) {
  config.validate();
  const SmoothStatistic stat = SmoothStatistic::from_name(config.statistic);
  const std::vector<Pair> pairs = build_pairs(config);
  std::vector<MseCell> cells;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Pair& pair = pairs[p];
    const Region& region = pair.region->region;
    for (Scheme scheme : config.schemes) {
      for (const auto& sub : config.sub_templates) {
        for (double s : grid_for(config, *pair.region)) {
          MseCell cell{p, {pair.region->name, pair.model->name, to_string(scheme), sub, s, kNaN, kNaN,
                           config.replicates, pair.note},
                       nullptr};
          if (pair.note.empty()) {
            try {
              SubsampleSpec spec{sub_template_for(sub, region), s, scheme, config.containment};
              cell.estimator = std::make_unique<CompiledEstimator>(pair.window, region, spec);
              if (cell.estimator->non_integer_scale()) cell.row.note = "non-integer NOL scale";
            } catch (const Error& e) {
              cell.row.note = na_note(e);
            }
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  const int reps = config.replicates;
  std::vector<double> values(cells.size() * static_cast<std::size_t>(reps), kNaN);
  FailureLog failures(cells.size());
  parallel_replicates(reps, thread_count(config), [&](int r) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if (!pairs[p].note.empty()) continue;
      Eigen::MatrixXd field;
      bool simulated = false;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].pair != p || !cells[c].estimator) continue;
        try {
          if (!simulated) {
            field = simulate(pairs[p], r, stat);
            simulated = true;
          }
          const double ratio = cells[c].estimator->tau_hat_sq(field, stat) / pairs[p].tau_n_sq - 1.0;
          values[c * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)] = ratio * ratio;
        } catch (const Error& e) {
          failures.record(c, r, na_note(e));
        }
      }
    }
  });

  MseTable table;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    MseRow row = cells[c].row;
    if (cells[c].estimator && failures.failed(c)) row.note = failures.what(c);
    if (cells[c].estimator && !failures.failed(c)) {
      const auto first = values.begin() + static_cast<std::ptrdiff_t>(c * static_cast<std::size_t>(reps));
      std::tie(row.mse, row.mc_se) = mean_and_se(std::vector<double>(first, first + reps));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<ScalingRow> optimal_scaling(const MseTable& table) {
  std::vector<ScalingRow> out;
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::size_t> index;
  for (const auto& row : table.rows) {
    const auto key = std::make_tuple(row.region, row.model, row.scheme, row.sub_template);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({row.region, row.model, row.scheme, row.sub_template, kNaN, kNaN, kNaN, "NA: no valid scale"});
    }
    ScalingRow& best = out[it->second];
    if (row.na() || std::isnan(row.mse)) continue;
    const bool better = std::isnan(best.mse) || row.mse < best.mse ||
                        (row.mse == best.mse && row.s_lambda < best.s_lambda_opt);
    if (better) {
      best.s_lambda_opt = row.s_lambda;
      best.mse = row.mse;
      best.mc_se = row.mc_se;
      best.note.clear();
    }
  }
  return out;
}

std::vector<ScalingRow> optimal_scaling_study(const StudyConfig& config) {
  return optimal_scaling(mse_study(config));
}

namespace {

struct PhiCell {
  std::size_t pair;
  Scheme scheme;
  PhiRow row;
  std::unique_ptr<NpiSelector> npi;
  std::unique_ptr<HjSelector> hj;
  int s_opt = 0;
  std::vector<std::unique_ptr<CompiledEstimator>>* by_scale = nullptr;
};

}  // namespace

PhiTable phi_study(const StudyConfig& config, const std::vector<ScalingRow>& optimal) {
  config.validate();
  PhiTable table;
  if (!config.npi && !config.hj) return table;
  const SmoothStatistic stat = SmoothStatistic::from_name(config.statistic);
  const std::vector<Pair> pairs = build_pairs(config);

  auto lookup_opt = [&](const Pair& pair, Scheme scheme) -> std::optional<double> {
    const CellKey key{pair.region->name, pair.model->name, scheme};
    if (const auto it = config.s_lambda_opt.find(key); it != config.s_lambda_opt.end()) return it->second;
    if (config.s_lambda_opt_all) return *config.s_lambda_opt_all;
    for (const auto& row : optimal) {
      if (row.region == key.region && row.model == key.model && row.scheme == to_string(scheme) &&
          row.sub_template == "same" && row.note.empty()) {
        return row.s_lambda_opt;
      }
    }
    return std::nullopt;
  };

  // Estimators at every admissible integer scale, per (pair, scheme).
  std::map<std::pair<std::size_t, Scheme>, std::vector<std::unique_ptr<CompiledEstimator>>> by_scale;
  std::vector<PhiCell> cells;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Pair& pair = pairs[p];
    const Region& region = pair.region->region;
    for (Scheme scheme : config.schemes) {
      auto& estimators = by_scale[{p, scheme}];
      const int top = max_subsample_scale(region);
      estimators.resize(static_cast<std::size_t>(top) + 1);
      if (pair.note.empty()) {
        for (int s = 1; s <= top; ++s) {
          try {
            estimators[static_cast<std::size_t>(s)] = std::make_unique<CompiledEstimator>(
                pair.window, region, SubsampleSpec{region.shape(), static_cast<double>(s), scheme, config.containment});
          } catch (const Error&) {
          }
        }
      }
      const std::optional<double> s_opt = lookup_opt(pair, scheme);
      auto add = [&](const std::string& selector, const std::string& setting, auto make) {
        PhiCell cell{p, scheme, {pair.region->name, pair.model->name, to_string(scheme), selector, setting,
                                 s_opt ? *s_opt : kNaN, kNaN, kNaN, config.replicates, pair.note},
                     nullptr, nullptr, 0, &estimators};
        if (cell.row.note.empty()) {
          try {
            if (!s_opt) fail(ErrorKind::invalid_argument, "no optimal scale available for this cell");
            cell.s_opt = static_cast<int>(std::lround(*s_opt));
            if (cell.s_opt < 1 || cell.s_opt > top || !estimators[static_cast<std::size_t>(cell.s_opt)]) {
              fail(ErrorKind::degenerate_subsampling, "optimal scale has no valid estimator");
            }
            make(cell);
          } catch (const Error& e) {
            cell.row.note = na_note(e);
          }
        }
        cells.push_back(std::move(cell));
      };
      if (config.npi) {
        for (double c1 : config.npi->c1) {
          for (double c2 : config.npi->c2) {
            add("npi", "c1=" + format_number(c1) + ";c2=" + format_number(c2), [&](PhiCell& cell) {
              cell.npi = std::make_unique<NpiSelector>(pair.window, region, c1, c2, scheme);
            });
          }
        }
      }
      if (config.hj) {
        const std::vector<int>& lams =
            pair.region->hj_lambda_m.empty() ? config.hj->lambda_m : pair.region->hj_lambda_m;
        for (int lm : lams) {
          add("hj", "lambda_m=" + std::to_string(lm), [&](PhiCell& cell) {
            cell.hj = std::make_unique<HjSelector>(pair.window, region, lm, config.hj->candidates, scheme);
          });
        }
      }
    }
  }

  const int reps = config.replicates;
  std::vector<double> phi_sq(cells.size() * static_cast<std::size_t>(reps), kNaN);
  std::vector<int> estimates(cells.size() * static_cast<std::size_t>(reps), 0);
  FailureLog failures(cells.size());
  parallel_replicates(reps, thread_count(config), [&](int r) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      Eigen::MatrixXd field;
      bool simulated = false;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        PhiCell& cell = cells[c];
        if (cell.pair != p || (!cell.npi && !cell.hj)) continue;
        try {
          if (!simulated) {
            field = simulate(pairs[p], r, stat);
            simulated = true;
          }
          const ScalingPlan plan = cell.npi ? cell.npi->select(field, stat) : cell.hj->select(field, stat);
          const int s = plan.lambda_opt_int;
          const auto& est = *cell.by_scale;
          if (s < 1 || static_cast<std::size_t>(s) >= est.size() || !est[static_cast<std::size_t>(s)]) {
            fail(ErrorKind::degenerate_subsampling, "selected scale " + std::to_string(s) + " has no valid estimator");
          }
          const double at_s = est[static_cast<std::size_t>(s)]->tau_hat_sq(field, stat);
          const double at_opt = est[static_cast<std::size_t>(cell.s_opt)]->tau_hat_sq(field, stat);
          const double phi = (at_s - at_opt) / pairs[p].tau_n_sq;
          const std::size_t slot = c * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r);
          phi_sq[slot] = phi * phi;
          estimates[slot] = s;
        } catch (const Error& e) {
          failures.record(c, r, na_note(e));
        }
      }
    }
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    PhiRow row = cells[c].row;
    const bool ran = cells[c].npi || cells[c].hj;
    if (ran && failures.failed(c)) row.note = failures.what(c);
    if (ran && !failures.failed(c)) {
      const auto first = phi_sq.begin() + static_cast<std::ptrdiff_t>(c * static_cast<std::size_t>(reps));
      std::tie(row.e_phi_sq, row.mc_se) = mean_and_se(std::vector<double>(first, first + reps));
      std::map<int, int> freq;
      for (int r = 0; r < reps; ++r) ++freq[estimates[c * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)]];
      for (const auto& [estimate, count] : freq) {
        table.freq.push_back({row.region, row.model, row.scheme, row.selector, row.setting, estimate, count});
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  StudyResult result;
  const bool has_grid = !config.s_lambda_grid.empty() ||
                        std::any_of(config.regions.begin(), config.regions.end(),
                                    [](const StudyRegion& r) { return !r.s_lambda_grid.empty(); });
  if (has_grid) {
    result.mse = mse_study(config);
    result.scaling = optimal_scaling(result.mse);
  }
  result.phi = phi_study(config, result.scaling);
  return result;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string num_or_na(double v) { return std::isnan(v) ? "NA" : format_number(v); }

double parse_num_or_na(const std::string& text) {
  if (text == "NA") return kNaN;
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) fail(ErrorKind::parse, "bad number '" + text + "' in CSV");
  return v;
}

}  // namespace

std::string mse_csv(const MseTable& table) {
  CsvTable out;
  out.header = {"region", "model", "scheme", "sub_template", "s_lambda", "mse", "mc_se", "reps", "note"};
  for (const auto& r : table.rows) {
    out.rows.push_back({r.region, r.model, r.scheme, r.sub_template, format_number(r.s_lambda), num_or_na(r.mse),
                        num_or_na(r.mc_se), std::to_string(r.reps), r.note});
  }
  return to_csv(out);
}

MseTable parse_mse_csv(const std::string& text) {
  const CsvTable csv = parse_csv(text);
  const std::vector<std::string> expected = {"region", "model", "scheme", "sub_template", "s_lambda",
                                             "mse",    "mc_se", "reps",   "note"};
  if (csv.header != expected) fail(ErrorKind::parse, "unexpected MSE CSV header");
  MseTable table;
  for (const auto& r : csv.rows) {
    table.rows.push_back({r[0], r[1], r[2], r[3], parse_num_or_na(r[4]), parse_num_or_na(r[5]),
                          parse_num_or_na(r[6]), std::stoi(r[7]), r[8]});
  }
  return table;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  CsvTable out;
  out.header = {"region", "model", "scheme", "sub_template", "s_lambda_opt", "mse", "mc_se", "note"};
  for (const auto& r : rows) {
    out.rows.push_back({r.region, r.model, r.scheme, r.sub_template, num_or_na(r.s_lambda_opt), num_or_na(r.mse),
                        num_or_na(r.mc_se), r.note});
  }
  return to_csv(out);
}

std::string phi_csv(const PhiTable& table) {
  CsvTable out;
  out.header = {"region", "model", "scheme", "selector", "setting", "s_lambda_opt", "e_phi_sq", "mc_se", "reps", "note"};
  for (const auto& r : table.rows) {
    out.rows.push_back({r.region, r.model, r.scheme, r.selector, r.setting, num_or_na(r.s_lambda_opt),
                        num_or_na(r.e_phi_sq), num_or_na(r.mc_se), std::to_string(r.reps), r.note});
  }
  return to_csv(out);
}

std::string freq_csv(const PhiTable& table) {
  CsvTable out;
  out.header = {"region", "model", "scheme", "selector", "setting", "estimate", "count"};
  for (const auto& r : table.freq) {
    out.rows.push_back({r.region, r.model, r.scheme, r.selector, r.setting, std::to_string(r.estimate),
                        std::to_string(r.count)});
  }
  return to_csv(out);
}

void emit_csv(const MseTable& table, const std::string& path) { write_text_file(path, mse_csv(table)); }

void write_study_outputs(const StudyConfig& config, const StudyResult& result) {
  const std::vector<std::pair<std::string, std::string>> outputs = {
      {config.mse_csv, mse_csv(result.mse)},
      {config.scaling_csv, scaling_csv(result.scaling)},
      {config.phi_csv, phi_csv(result.phi)},
      {config.freq_csv, freq_csv(result.phi)},
  };
  std::vector<std::string> written;
  try {
    for (const auto& [path, content] : outputs) {
      if (path.empty()) continue;
      write_text_file(path, content);
      written.push_back(path);
    }
  } catch (...) {
    for (const auto& path : written) std::remove(path.c_str());
    throw;
  }
}

}  // namespace latblock
