#include "latblock/cli.hpp"

#include "latblock/constants.hpp"
#include "latblock/csv.hpp"
#include "latblock/error.hpp"
#include "latblock/estimators.hpp"
#include "latblock/fieldsim.hpp"
#include "latblock/format.hpp"
#include "latblock/harness.hpp"
#include "latblock/parse.hpp"
#include "latblock/scaling.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace latblock {

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

void print_table(const KeyValues& rows) {
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) {
    std::cout << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }
}

void emit(const KeyValues& rows, const std::string& csv_path) {
  print_table(rows);
  if (csv_path.empty()) return;
  CsvTable table;
  table.header = {"key", "value"};
  for (const auto& [k, v] : rows) table.rows.push_back({k, v});
  write_text_file(csv_path, to_csv(table));
}

// Smallest region offset + Δ R0 (shift 0) whose lattice sites are exactly the sample window.
Region infer_region(const Template& shape, const LatticeWindow& window) {
  const int d = shape.dim();
  if (window.dim() != d) fail(ErrorKind::dimension_mismatch, "data dimension differs from template");
  const Vector width = shape.upper() - shape.lower();
  const Vector extent = (window.upper() - window.lower()).cast<double>();
  const Vector center = (window.upper() + window.lower()).cast<double>() / 2.0;
  for (int extra = 0; extra <= 1; ++extra) {
    const Vector delta = (extent.array() + extra).matrix().cwiseQuotient(width);
    const Vector base = center - delta.cwiseProduct(shape.upper() + shape.lower()) / 2.0;
    for (int mask = 0; mask < (1 << d); ++mask) {
      LatticePoint offset(d);
      for (int i = 0; i < d; ++i) {
        offset[i] = static_cast<int>(((mask >> i) & 1) ? std::ceil(base[i]) : std::floor(base[i]));
      }
      try {
        Region region(shape, delta, Vector::Zero(d), offset);
        if (lattice_sites(region) == window) return region;
      } catch (const Error&) {
      }
    }
  }
  fail(ErrorKind::invalid_argument, "cannot infer the region scaling from the data; pass --delta");
}

Region region_from(const Template& shape, const std::string& delta, const std::string& shift) {
  const int d = shape.dim();
  const Vector s = shift.empty() ? Vector::Zero(d) : parse_vector(shift, d);
  return Region(shape, parse_vector(delta, d), s);
}

Region data_region(const Template& shape, const FieldSample& sample, const std::string& delta,
                   const std::string& shift) {
  if (!delta.empty()) return region_from(shape, delta, shift);
  if (!shift.empty()) fail(ErrorKind::invalid_argument, "--shift needs --delta");
  return infer_region(shape, sample.window);
}

FieldSample load_field(const std::string& path, const SmoothStatistic& stat) {
  FieldSample sample = read_field_csv(path);
  if (sample.arity() == 1 && stat.arity > 1) {
    const Eigen::RowVectorXd scalar = sample.values.row(0);
    sample.values = lift_scalar_field(scalar, stat);
  }
  if (sample.arity() != stat.arity) {
    fail(ErrorKind::dimension_mismatch, "statistic " + stat.name + " needs " + std::to_string(stat.arity) +
                                            " value columns or one scalar column");
  }
  return sample;
}

KeyValues plan_rows(const ScalingPlan& plan) {
  KeyValues rows = {{"method", plan.method},
                    {"scheme", to_string(plan.scheme)},
                    {"s_lambda_opt", format_number(plan.lambda_opt_real)},
                    {"s_lambda_opt_int", std::to_string(plan.lambda_opt_int)},
                    {"dim", std::to_string(plan.dim)},
                    {"det_delta", format_number(plan.det_scale)}};
  if (plan.method == "theory") {
    rows.push_back({"b0", format_number(plan.b0)});
    rows.push_back({"tau2", format_number(plan.tau_sq)});
    rows.push_back({"k0", format_number(plan.k0)});
    rows.push_back({"volume", format_number(plan.volume)});
  }
  if (plan.npi) {
    const auto& n = *plan.npi;
    rows.push_back({"c1", format_number(n.c1)});
    rows.push_back({"c2", format_number(n.c2)});
    rows.push_back({"s1", std::to_string(n.s1)});
    rows.push_back({"s2", std::to_string(n.s2)});
    rows.push_back({"tau_hat_sq", format_number(n.tau_hat_sq)});
    rows.push_back({"tau_hat_sq_s2", format_number(n.tau_hat_sq_s2)});
    rows.push_back({"tau_hat_sq_2s2", format_number(n.tau_hat_sq_2s2)});
    rows.push_back({"b0_hat", format_number(n.b0_hat)});
  }
  if (plan.hj) {
    const auto& h = *plan.hj;
    rows.push_back({"lambda_m", std::to_string(h.lambda_m)});
    rows.push_back({"inner_regions", std::to_string(h.inner_regions)});
    rows.push_back({"proxy", format_number(h.proxy)});
    for (std::size_t i = 0; i < h.candidates.size(); ++i) {
      rows.push_back({"mse[" + format_number(h.candidates[i]) + "]", format_number(h.mse[i])});
    }
    rows.push_back({"argmin", format_number(h.argmin)});
    rows.push_back({"factor", format_number(h.factor)});
  }
  return rows;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Subsampling variance estimation for lattice random fields", "latblock"};
  app.require_subcommand(1);

  // constants
  auto* constants_cmd = app.add_subcommand("constants", "Shape constants and bias constant of a template");
  std::string c_template, c_cov, c_csv;
  constants_cmd->add_option("--template", c_template, "Template spec")->required();
  constants_cmd->add_option("--cov", c_cov, "Covariogram spec");
  constants_cmd->add_option("--csv", c_csv, "Also write key,value CSV");

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "OL/NOL variance estimate from a field CSV");
  std::string e_data, e_template, e_sub, e_delta, e_shift, e_scheme = "ol", e_stat = "mean";
  double e_scale = 0;
  estimate_cmd->add_option("--data", e_data, "Field CSV (s1..sd,v1..vp)")->required();
  estimate_cmd->add_option("--template", e_template, "Region template spec")->required();
  estimate_cmd->add_option("--delta", e_delta, "Region scaling diagonal; inferred from the data when omitted");
  estimate_cmd->add_option("--shift", e_shift, "Lattice shift t");
  estimate_cmd->add_option("--scheme", e_scheme, "ol or nol");
  estimate_cmd->add_option("--scale", e_scale, "Subsample scale")->required();
  estimate_cmd->add_option("--stat", e_stat, "mean, ratio or momvar");
  estimate_cmd->add_option("--sub-template", e_sub, "Subsample template spec (default: region template)");

  // scale
  auto* scale_cmd = app.add_subcommand("scale", "Optimal subsample scaling");
  std::string s_method, s_template, s_delta, s_shift, s_cov, s_data, s_scheme = "ol", s_stat = "mean", s_csv,
      s_candidates;
  std::optional<double> s_b0, s_tau2;
  double s_c1 = 0.5, s_c2 = 0.5;
  int s_lambda_m = 0;
  scale_cmd->add_option("--method", s_method, "theory, npi or hj")
      ->required()
      ->check(CLI::IsMember({"theory", "npi", "hj"}));
  scale_cmd->add_option("--template", s_template, "Region template spec")->required();
  scale_cmd->add_option("--delta", s_delta, "Region scaling diagonal");
  scale_cmd->add_option("--shift", s_shift, "Lattice shift t");
  scale_cmd->add_option("--scheme", s_scheme, "ol or nol");
  scale_cmd->add_option("--b0", s_b0, "Bias constant (theory)");
  scale_cmd->add_option("--tau2", s_tau2, "Long-run variance (theory)");
  scale_cmd->add_option("--cov", s_cov, "Covariogram spec supplying B0 and tau^2 (theory)");
  scale_cmd->add_option("--data", s_data, "Field CSV (npi, hj)");
  scale_cmd->add_option("--stat", s_stat, "mean, ratio or momvar (npi, hj)");
  scale_cmd->add_option("--c1", s_c1, "NPI variance pilot constant");
  scale_cmd->add_option("--c2", s_c2, "NPI bias pilot constant");
  scale_cmd->add_option("--lambda-m", s_lambda_m, "HJ inner region scale");
  scale_cmd->add_option("--candidates", s_candidates, "HJ candidate scales, comma separated");
  scale_cmd->add_option("--csv", s_csv, "Also write key,value CSV");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one Gaussian field replicate");
  std::string m_cov, m_template, m_scale, m_shift, m_out, m_method = "auto";
  std::optional<std::uint64_t> m_seed;
  std::uint64_t m_replicate = 0;
  simulate_cmd->add_option("--cov", m_cov, "Covariogram spec")->required();
  simulate_cmd->add_option("--template", m_template, "Region template spec")->required();
  simulate_cmd->add_option("--scale,--delta", m_scale, "Region scaling diagonal")->required();
  simulate_cmd->add_option("--shift", m_shift, "Lattice shift t");
  simulate_cmd->add_option("--seed", m_seed, "Master seed")->required();
  simulate_cmd->add_option("--replicate", m_replicate, "Replicate index");
  simulate_cmd->add_option("--out", m_out, "Output field CSV")->required();
  simulate_cmd->add_option("--method", m_method, "auto, cholesky or circulant");

  // study
  auto* study_cmd = app.add_subcommand("study", "Run a Monte Carlo study from a JSON config");
  std::string t_config;
  std::optional<std::uint64_t> t_seed;
  std::optional<int> t_threads;
  study_cmd->add_option("--config", t_config, "Study config (JSON)")->required();
  study_cmd->add_option("--seed", t_seed, "Master seed")->required();
  study_cmd->add_option("--threads", t_threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*constants_cmd) {
      const Template shape = parse_template(c_template);
      const ShapeConstants sc = k0(shape);
      KeyValues rows = {{"template", shape.spec()},
                        {"dim", std::to_string(shape.dim())},
                        {"volume", format_number(sc.volume)},
                        {"K0", format_number(sc.k0)},
                        {"K1", format_number(sc.k1)},
                        {"ARE", format_number(are(shape))},
                        {"source", to_string(sc.source)}};
      if (!c_cov.empty()) {
        const Covariogram cov = parse_covariogram(c_cov, shape.dim());
        rows.push_back({"B0", format_number(b0(shape, cov))});
        rows.push_back({"tau2", format_number(tau_sq(cov))});
      }
      emit(rows, c_csv);
    } else if (*estimate_cmd) {
      const SmoothStatistic stat = SmoothStatistic::from_name(e_stat);
      const FieldSample sample = load_field(e_data, stat);
      const Template shape = parse_template(e_template);
      const Region region = data_region(shape, sample, e_delta, e_shift);
      const Template sub = e_sub.empty() ? shape : parse_template(e_sub);
      const SubsampleSpec spec{sub, e_scale, parse_scheme(e_scheme)};
      const EstimatorResult r = subsample_estimate(sample, region, spec, stat);
      KeyValues rows = {{"scheme", to_string(r.scheme)},
                        {"scale", format_number(e_scale)},
                        {"statistic", stat.name},
                        {"subsamples", std::to_string(r.subsample_count)},
                        {"grand_mean", format_number(r.grand_mean)},
                        {"tau_hat_sq", format_number(r.tau_hat_sq)}};
      if (r.non_integer_scale) rows.push_back({"note", "non-integer NOL scale"});
      print_table(rows);
    } else if (*scale_cmd) {
      const Template shape = parse_template(s_template);
      const Scheme scheme = parse_scheme(s_scheme);
      ScalingPlan plan;
      if (s_method == "theory") {
        if (s_delta.empty()) fail(ErrorKind::invalid_argument, "theory scaling needs --delta");
        const Region region = region_from(shape, s_delta, s_shift);
        double b = 0, t2 = 0;
        if (!s_cov.empty()) {
          const Covariogram cov = parse_covariogram(s_cov, shape.dim());
          b = b0(shape, cov);
          t2 = tau_sq(cov);
        }
        if (s_b0) b = *s_b0;
        if (s_tau2) t2 = *s_tau2;
        if (s_cov.empty() && (!s_b0 || !s_tau2)) {
          fail(ErrorKind::invalid_argument, "theory scaling needs --cov or both --b0 and --tau2");
        }
        plan = theoretical_scaling(shape.dim(), region.det_scale(), b, t2, k0(shape), scheme);
      } else {
        if (s_data.empty()) fail(ErrorKind::invalid_argument, s_method + " scaling needs --data");
        const SmoothStatistic stat = SmoothStatistic::from_name(s_stat);
        const FieldSample sample = load_field(s_data, stat);
        const Region region = data_region(shape, sample, s_delta, s_shift);
        if (s_method == "npi") {
          plan = npi_scaling(sample, region, stat, s_c1, s_c2, scheme);
        } else {
          if (s_lambda_m < 1) fail(ErrorKind::invalid_argument, "HJ needs --lambda-m");
          const std::vector<double> candidates =
              s_candidates.empty() ? std::vector<double>{} : parse_reals(s_candidates);
          plan = hj_scaling(sample, region, stat, s_lambda_m, candidates, scheme);
        }
      }
      emit(plan_rows(plan), s_csv);
    } else if (*simulate_cmd) {
      const Template shape = parse_template(m_template);
      const Region region = region_from(shape, m_scale, m_shift);
      const Covariogram cov = parse_covariogram(m_cov, shape.dim());
      const Generator gen(cov, lattice_sites(region), parse_sim_method(m_method));
      RngStream stream(*m_seed, m_replicate);
      write_text_file(m_out, field_csv(sample_field(gen, stream)));
      std::cout << "wrote " << gen.window().size() << " sites to " << m_out << " (" << gen.method() << ")\n";
      if (!gen.fallback_reason().empty()) std::cerr << "note: " << gen.fallback_reason() << '\n';
    } else if (*study_cmd) {
      StudyConfig config = load_study_config(t_config);
      config.seed = *t_seed;
      if (t_threads) config.threads = *t_threads;
      config.validate();
      const StudyResult result = run_study(config);
      write_study_outputs(config, result);
      if (config.mse_csv.empty() && config.scaling_csv.empty() && config.phi_csv.empty()) {
        std::cout << mse_csv(result.mse) << scaling_csv(result.scaling) << phi_csv(result.phi);
      }
    }
  } catch (const Error& e) {
    std::cerr << "latblock: " << e.what() << '\n';
    return e.is_validation() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "latblock: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace latblock
