#include "clamped/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "clamped/ballmode.hpp"
#include "clamped/domain.hpp"
#include "clamped/fdsolver.hpp"
#include "clamped/rearrange.hpp"
#include "clamped/reduction.hpp"
#include "clamped/shapederiv.hpp"
#include "clamped/specialfn.hpp"

namespace clamped::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "key = value" lines plus "check <name> = PASS|FAIL (...)" verdicts.
class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}
  void value(const std::string& key, double v) { out_ << key << " = " << fmt(v) << '\n'; }
  void text(const std::string& key, const std::string& v) { out_ << key << " = " << v << '\n'; }
  void check(const std::string& name, bool pass, const std::string& detail) {
    out_ << "check " << name << " = " << (pass ? "PASS" : "FAIL") << " (" << detail << ")\n";
    ok_ = ok_ && pass;
  }
  bool ok() const { return ok_; }

 private:
  std::ostream& out_;
  bool ok_ = true;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw UsageError("cannot write '" + path + "'");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::pair<int, int> parse_dims(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int d = std::stoi(text);
      return {d, d};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError("bad --dims '" + text + "', expected N or A..B");
  }
}

void require_ball_dim(int d) {
  if (d < 2 || d > 12) throw UsageError("dimension must lie in 2..12");
}

DomainSpec load_spec(const RunConfig& cfg) {
  if (cfg.domain.empty()) throw UsageError("--domain is required");
  DomainSpec spec;
  try {
    spec = load_domain_spec(cfg.domain);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad domain spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (cfg.resolution != 0) spec.resolution = cfg.resolution;
  if (spec.shape != "mask" && spec.resolution < 32) throw UsageError("resolution must be >= 32");
  return spec;
}

struct CsvField {
  std::vector<double> x, y, value;
  bool has_coordinates = false;
};

CsvField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open field '" + path + "'");
  CsvField f;
  std::string line;
  int columns = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        cells.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (f.value.empty()) continue;  // header
      throw UsageError("non-numeric row in '" + path + "': " + line);
    }
    if (columns < 0) columns = static_cast<int>(cells.size());
    if (static_cast<int>(cells.size()) != columns) throw UsageError("ragged rows in '" + path + "'");
    f.value.push_back(cells.back());
    if (columns >= 3) {
      f.x.push_back(cells[columns - 3]);
      f.y.push_back(cells[columns - 2]);
    }
  }
  if (f.value.empty()) throw UsageError("field '" + path + "' has no rows");
  f.has_coordinates = columns >= 3;
  return f;
}

double infer_spacing(const CsvField& f) {
  if (!f.has_coordinates) throw UsageError("field CSV needs x,y columns to infer the grid spacing");
  double h = INFINITY;
  for (const auto* coords : {&f.x, &f.y}) {
    std::set<double> unique(coords->begin(), coords->end());
    double prev = NAN;
    for (double c : unique) {
      if (!std::isnan(prev) && c - prev > 1e-12) h = std::min(h, c - prev);
      prev = c;
    }
  }
  if (!std::isfinite(h)) throw UsageError("cannot infer grid spacing from a single node");
  return h;
}

void write_field_csv(std::ostream& out, const ScalarField& f) {
  out << "index,x,y,value\n";
  for (int k = 0; k < f.domain->interior_count(); ++k) {
    out << k << ',' << fmt(f.domain->x(k)) << ',' << fmt(f.domain->y(k)) << ',' << fmt(f.values[k]) << '\n';
  }
}

void write_profile(std::ostream& out, const RadialProfile& p, const std::string& format) {
  if (format == "csv") out << "s,value\n";
  const char sep = format == "csv" ? ',' : ' ';
  for (const auto& s : p.samples) out << fmt(s.s) << sep << fmt(s.value) << '\n';
}

std::string stats_line(const ComponentStats& s) {
  return "count=" + std::to_string(s.count) + " mean=" + fmt(s.mean) + " min=" + fmt(s.min) + " max=" + fmt(s.max) +
         " max_rel_dev=" + fmt(s.max_relative_deviation);
}

// ---- subcommands ---------------------------------------------------------

int cmd_ball_table(const RunConfig& cfg, std::ostream& out) {
  const auto [lo, hi] = parse_dims(cfg.dims);
  require_ball_dim(lo);
  require_ball_dim(hi);
  if (lo > hi) throw UsageError("--dims range is empty");
  if (!(cfg.volume > 0.0)) throw UsageError("--volume must be positive");
  Output dest(cfg.out, out);
  auto& o = dest.get();
  const bool csv = cfg.format != "columns";
  const char sep = csv ? ',' : ' ';
  if (csv) o << "d,int_uB,int_uB_squared\n";
  for (int d = lo; d <= hi; ++d) {
    const double m = std::abs(mean_uB(make_ball_mode(d, cfg.volume)).quadrature);
    o << d << sep << fmt(m) << sep << fmt(m * m) << '\n';
  }
  return kOk;
}

int cmd_ball_profile(const RunConfig& cfg, std::ostream& out) {
  require_ball_dim(cfg.d);
  if (!(cfg.volume > 0.0)) throw UsageError("--volume must be positive");
  if (cfg.points < 2) throw UsageError("--points must be >= 2");
  const BallMode mode = make_ball_mode(cfg.d, cfg.volume);
  Output dest(cfg.out, out);
  auto& o = dest.get();
  const bool csv = cfg.format == "csv";
  const char sep = csv ? ',' : ' ';
  if (csv) o << "r," << cfg.quantity << '\n';
  for (int i = 0; i < cfg.points; ++i) {
    const double r = mode.radius * i / (cfg.points - 1);
    double v = 0.0;
    if (cfg.quantity == "u") {
      v = eval_u(mode, r);
    } else if (cfg.quantity == "laplacian") {
      v = eval_laplacian_u(mode, r);
    } else if (cfg.quantity == "du") {
      v = eval_radial_derivative_u(mode, r);
    } else {
      throw UsageError("--quantity must be u, du or laplacian");
    }
    o << fmt(r) << sep << fmt(v) << '\n';
  }
  return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const DomainPtr domain = make_domain_ptr(load_spec(cfg));
  EigenOptions opts;
  opts.tol = cfg.tol;
  const auto pairs = lowest_eigenpairs(domain, 2, opts);
  Report rep(out);
  rep.value("h", domain->h());
  rep.value("interior_nodes", domain->interior_count());
  rep.value("area", domain->area());
  rep.value("boundary_components", domain->component_count() - 1);
  rep.value("eigenvalue", pairs[0].eigenvalue);
  rep.value("second_eigenvalue", pairs[1].eigenvalue);
  rep.value("relative_gap", (pairs[1].eigenvalue - pairs[0].eigenvalue) / pairs[0].eigenvalue);
  rep.value("mean_u", pairs[0].mode.integral());
  if (!cfg.out.empty()) {
    Output dest(cfg.out, out);
    write_field_csv(dest.get(), pairs[0].mode);
  }
  return kOk;
}

void reduction_section(Report& rep, const EigenPair& pair, bool exact_g, const DomainSpec& spec) {
  const auto& d = *pair.mode.domain;
  const double h = d.h();
  const ReductionData red = reduce(pair, exact_g);
  rep.text("reduction.g", exact_g ? "constant sqrt(4/(d|Omega|))" : "harmonic extension");
  rep.value("reduction.residual_pde", red.residual_pde);
  rep.value("reduction.residual_quotient", red.residual_quotient);
  rep.value("reduction.residual_z_prime", red.residual_z_prime);
  const double q = variational_quotient(red.z, red.g, red.z);
  rep.value("reduction.quotient", q);
  rep.value("reduction.inverse_sqrt_mu", 1.0 / std::sqrt(red.mu));
  if (!exact_g) {
    rep.check("reduction.pde", red.residual_pde < 1e-5, "residual=" + fmt(red.residual_pde) + " threshold=1e-05");
    const double e = reduced_energy(red.z, red.g, red.mu);
    const double target = std::sqrt(red.mu) * h * h * red.g.values.dot(red.z.values);
    const double rel = std::abs(e - target) / std::abs(target);
    rep.check("reduction.energy_identity", rel < 1e-8, "relative_error=" + fmt(rel) + " threshold=1e-08");
  }
  const SignReport sign = check_sign(red);
  rep.value("sign.g_min", sign.g_min);
  rep.value("sign.z_max_off_ring", sign.z_max_off_ring);
  if (sign.g_nonnegative && !exact_g) {
    rep.check("sign.z_negative", sign.z_negative, "nonnegative_nodes=" + std::to_string(sign.nonnegative_count) +
                                                      " threshold=0");
  } else {
    rep.text("sign.z_negative", "not asserted (g changes sign)");
  }
  const EigenPair scaled{pair.eigenvalue, ScalarField(pair.mode.domain, 2.5 * pair.mode.values)};
  const ReductionData red2 = reduce(scaled, exact_g);
  const double lin = (red2.z.values - 2.5 * red.z.values).norm() / (2.5 * red.z.values.norm()) +
                     (red2.g.values - 2.5 * red.g.values).norm() / (2.5 * red.g.values.norm());
  rep.check("reduction.linearity", lin < 1e-12, "relative_error=" + fmt(lin) + " threshold=1e-12");

  const bool disk = spec.shape == "disk";
  const double tol = 10.0 * h;
  const CriticalityReport crit = check_criticality(pair);
  rep.value("criticality.alpha", crit.alpha);
  for (const auto& c : crit.components) rep.text("criticality.component" + std::to_string(c.component), stats_line(c));
  if (disk) {
    rep.check("criticality.disk", crit.is_critical(tol),
              "max_rel_dev=" + fmt(crit.max_relative_deviation) + " threshold=" + fmt(tol));
  } else {
    rep.value("criticality.max_rel_dev", crit.max_relative_deviation);
  }
  const OverdeterminedReport od = check_overdetermined(pair);
  for (const auto& c : od.components) rep.text("overdetermined.component" + std::to_string(c.component), stats_line(c));
  rep.value("overdetermined.flux_mean", od.flux_mean);
  rep.value("overdetermined.chain_mismatch", od.chain_mismatch);

  const BallMode ball = make_ball_mode(2, d.area());
  const HypothesisMReport m = check_hypothesis_M(pair, ball);
  rep.value("hypothesis_M.mean_u", m.mean_u);
  rep.value("hypothesis_M.mean_uB", m.mean_uB);
  rep.text("hypothesis_M.holds", m.holds ? "yes" : "no");
  rep.value("hypothesis_M.upper_bound", m.upper_bound);
  if (disk) {
    rep.check("hypothesis_M.equality", std::abs(m.mean_u - m.mean_uB) < tol,
              "gap=" + fmt(std::abs(m.mean_u - m.mean_uB)) + " threshold=" + fmt(tol));
    rep.check("hypothesis_M.bound", m.bound_holds, "mean_u=" + fmt(m.mean_u) + " threshold=" + fmt(m.upper_bound));
  }
  const NodalVolumeReport nv = check_nodal_volume(pair, ball);
  rep.text("nodal.precondition", nv.precondition_ok ? "ok" : "violated (int u <= 0)");
  rep.value("nodal.positive_volume", nv.positive_volume);
  rep.value("nodal.sqrt_positive_volume", nv.sqrt_positive_volume);
  rep.value("nodal.ball_mean", nv.ball_mean);
  rep.value("nodal.threshold", nv.threshold);
  const ZeroTraceReport zt = check_zero_laplacian_trace(pair);
  rep.check("zero_trace.bounded_away", zt.bounded_away, "ratio=" + fmt(zt.ratio) + " threshold=0.1");
}

int cmd_verify_reduction(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec spec = load_spec(cfg);
  const DomainPtr domain = make_domain_ptr(spec);
  EigenOptions opts;
  opts.tol = cfg.tol;
  const EigenPair pair = principal_eigenpair(domain, opts);
  Report rep(out);
  rep.value("h", domain->h());
  rep.value("eigenvalue", pair.eigenvalue);
  reduction_section(rep, pair, cfg.exact_g, spec);
  return rep.ok() ? kOk : kAssertionFailed;
}

ScalarField field_from_csv(const CsvField& f, double h) {
  auto domain = std::make_shared<const GridDomain>(
      GridDomain::from_mask({std::vector<int>(f.value.size(), 1)}, h));
  return ScalarField(domain, Eigen::Map<const Eigen::VectorXd>(f.value.data(), static_cast<Eigen::Index>(f.value.size())));
}

int cmd_rearrange(const RunConfig& cfg, std::ostream& out) {
  if (cfg.field.empty()) throw UsageError("--field is required");
  const CsvField csv = read_field_csv(cfg.field);
  const ScalarField f = field_from_csv(csv, infer_spacing(csv));
  RadialProfile p;
  if (cfg.mode == "schwarz") {
    if (f.min() < 0.0) throw UsageError("schwarz rearrangement needs a nonnegative field; use --mode dagger");
    p = schwarz(f);
  } else if (cfg.mode == "dagger") {
    p = talenti_dagger(f);
  } else if (cfg.mode == "sharp") {
    p = sharp(f);
  } else {
    throw UsageError("--mode must be schwarz, sharp or dagger");
  }
  Output dest(cfg.out, out);
  write_profile(dest.get(), p, cfg.format == "csv" ? "csv" : "columns");
  return kOk;
}

int cmd_talenti(const RunConfig& cfg, std::ostream& out) {
  const DomainPtr domain = make_domain_ptr(load_spec(cfg));
  Eigen::VectorXd values = Eigen::VectorXd::Ones(domain->interior_count());
  if (!cfg.source.empty()) {
    const CsvField csv = read_field_csv(cfg.source);
    if (static_cast<int>(csv.value.size()) != domain->interior_count()) {
      throw UsageError("source has " + std::to_string(csv.value.size()) + " values, domain has " +
                       std::to_string(domain->interior_count()) + " interior nodes");
    }
    values = Eigen::Map<const Eigen::VectorXd>(csv.value.data(), static_cast<Eigen::Index>(csv.value.size()));
  }
  const ScalarField f(domain, values);
  if (f.min() < 0.0) throw UsageError("talenti needs a nonnegative source");
  const TalentiReport t = talenti_compare(f);
  Report rep(out);
  const double tol = 10.0 * domain->h();
  rep.value("talenti.v_max", t.v.front());
  rep.value("talenti.u_star_max", t.u_star.samples.front().value);
  rep.check("talenti.min_gap", t.holds(tol), "min_gap=" + fmt(t.min_gap) + " threshold=" + fmt(-tol));
  if (!cfg.out.empty()) {
    Output dest(cfg.out, out);
    dest.get() << "s,v,u_star\n";
    for (std::size_t i = 0; i < t.v.size(); ++i) {
      dest.get() << fmt(t.u_star.samples[i].s) << ',' << fmt(t.v[i]) << ',' << fmt(t.u_star.samples[i].value) << '\n';
    }
  }
  return rep.ok() ? kOk : kAssertionFailed;
}

VectorFieldSpec field_for(const std::string& text, const GridDomain& domain) {
  VectorFieldSpec v;
  try {
    v = parse_vector_field(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (v.kind == VectorFieldSpec::Kind::normal_bump) {
    const auto c = centroid(domain);
    v.cx = c[0];
    v.cy = c[1];
  }
  return v;
}

void shape_section(Report& rep, const DomainSpec& spec, const VectorFieldSpec& v) {
  const double h = spec.spacing();
  const VolumeDerivative vol = volume_derivative(spec, v);
  rep.text("shape.field", describe(v));
  rep.value("shape.volume_exact", vol.exact);
  rep.value("shape.volume_fd", vol.finite_difference);
  const EigenDerivativeReport e = eigenvalue_derivative_check(spec, v);
  rep.value("shape.eigenvalue", e.eigenvalue);
  rep.value("shape.second_eigenvalue", e.second_eigenvalue);
  rep.value("shape.formula", e.formula_value);
  rep.value("shape.fd", e.fd_value);
  rep.value("shape.fd_step", e.step);
  rep.text("shape.fd_method", e.by_rescaling ? "h-rescaling" : "re-masking");
  rep.value("shape.relative_discrepancy", e.relative_discrepancy);
  if (v.kind == VectorFieldSpec::Kind::dilation) {
    rep.check("shape.dilation_law", std::abs(e.fd_value + 4.0 * e.eigenvalue) < 1e-4 * 4.0 * e.eigenvalue,
              "fd=" + fmt(e.fd_value) + " expected=" + fmt(-4.0 * e.eigenvalue) + " threshold=1e-4 relative");
    rep.check("shape.dilation_formula", e.relative_discrepancy < 0.01,
              "relative_discrepancy=" + fmt(e.relative_discrepancy) + " threshold=0.01");
  }
  const GDerivativeReport g = G_derivative_check(spec, v);
  rep.value("shape.G_derivative", g.derivative);
  rep.value("shape.G_normalized", g.normalized);
  if (spec.shape == "disk") {
    rep.check("shape.G_disk", std::abs(g.normalized) < 20.0 * h,
              "normalized=" + fmt(g.normalized) + " threshold=" + fmt(20.0 * h));
  }
}

int cmd_shape_deriv(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec spec = load_spec(cfg);
  const GridDomain domain = make_domain(spec);
  const VectorFieldSpec v = field_for(cfg.field.empty() ? "dilation" : cfg.field, domain);
  Report rep(out);
  rep.value("h", domain.h());
  shape_section(rep, spec, v);
  return rep.ok() ? kOk : kAssertionFailed;
}

int cmd_check_all(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec spec = load_spec(cfg);
  const DomainPtr domain = make_domain_ptr(spec);
  const double h = domain->h();
  EigenOptions opts;
  opts.tol = cfg.tol;
  const auto pairs = lowest_eigenpairs(domain, 2, opts);
  const EigenPair& pair = pairs[0];
  Report rep(out);
  rep.text("domain", to_json(spec).dump());
  rep.value("h", h);
  rep.value("area", domain->area());
  rep.value("boundary_components", domain->component_count() - 1);
  rep.value("eigenvalue", pair.eigenvalue);
  rep.value("second_eigenvalue", pairs[1].eigenvalue);
  const double rq = rayleigh_quotient(pair.mode);
  rep.check("solve.rayleigh", std::abs(rq - pair.eigenvalue) < 1e-8 * pair.eigenvalue,
            "relative_error=" + fmt(std::abs(rq - pair.eigenvalue) / pair.eigenvalue) + " threshold=1e-08");
  rep.check("solve.positive", pair.eigenvalue > 0.0, "eigenvalue=" + fmt(pair.eigenvalue) + " threshold=0");

  reduction_section(rep, pair, cfg.exact_g, spec);
  for (const auto& c : boundary_constancy_scan(pair)) {
    rep.text("constancy.component" + std::to_string(c.component), stats_line(c));
  }

  const RadialProfile dag = talenti_dagger(pair.mode);
  bool equi = true;
  const double lo = pair.mode.min(), hi = pair.mode.max();
  for (int i = 0; i < 20; ++i) {
    const double t = lo + (hi - lo) * (i + 0.5) / 20.0;
    equi = equi && distribution_function(pair.mode, t) == dag.distribution(t);
  }
  rep.check("rearrange.equimeasurable", equi, "20 thresholds, exact equality");
  const double h2 = h * h;
  const double l1 = pair.mode.values.cwiseAbs().sum() * h2, l2 = pair.mode.values.squaredNorm() * h2;
  const double lp_err = std::abs(dag.lp_norm_pow(1) - l1) / l1 + std::abs(dag.lp_norm_pow(2) - l2) / l2;
  rep.check("rearrange.lp", lp_err < 1e-12, "relative_error=" + fmt(lp_err) + " threshold=1e-12");

  const ReductionData red = reduce(pair, false);
  if (red.z.max() <= 0.0) {
    const PolyaSzegoResult ps = polya_szego_check(red.z);
    rep.check("rearrange.polya_szego", ps.holds(10.0 * h),
              "lhs=" + fmt(ps.lhs) + " rhs=" + fmt(ps.rhs) + " threshold=(1-" + fmt(10.0 * h) + ")*rhs");
  } else {
    rep.text("rearrange.polya_szego", "not asserted (z changes sign)");
  }
  const TalentiReport t = talenti_compare(ScalarField(domain, Eigen::VectorXd::Ones(domain->interior_count())));
  rep.check("rearrange.talenti", t.holds(10.0 * h), "min_gap=" + fmt(t.min_gap) + " threshold=" + fmt(-10.0 * h));

  shape_section(rep, spec, VectorFieldSpec::dilation());
  rep.text("result", rep.ok() ? "PASS" : "FAIL");
  return rep.ok() ? kOk : kAssertionFailed;
}

nlohmann::json config_json(const RunConfig& c) {
  return {{"domain", c.domain},         {"d", c.d},
          {"volume", c.volume},         {"resolution", c.resolution},
          {"dims", c.dims},             {"out", c.out},
          {"format", c.format},         {"field", c.field},
          {"f", c.source},              {"mode", c.mode},
          {"quantity", c.quantity},     {"points", c.points},
          {"exact_g", c.exact_g},       {"tol", c.tol}};
}

// Values from a JSON config file, for options not given on the command line.
void apply_config_file(const std::string& path, CLI::App& app, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config: ") + e.what());
  }
  auto given = [&](const std::string& name) {
    for (auto* sub : app.get_subcommands()) {
      const auto* opt = sub->get_option_no_throw("--" + name);
      if (opt && opt->count() > 0) return true;
    }
    return false;
  };
  try {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& k = it.key();
      if (given(k)) continue;
      if (k == "domain") c.domain = it->get<std::string>();
      else if (k == "d") c.d = it->get<int>();
      else if (k == "volume") c.volume = it->get<double>();
      else if (k == "resolution") c.resolution = it->get<int>();
      else if (k == "dims") c.dims = it->get<std::string>();
      else if (k == "out") c.out = it->get<std::string>();
      else if (k == "format") c.format = it->get<std::string>();
      else if (k == "field") c.field = it->get<std::string>();
      else if (k == "f") c.source = it->get<std::string>();
      else if (k == "mode") c.mode = it->get<std::string>();
      else if (k == "quantity") c.quantity = it->get<std::string>();
      else if (k == "points") c.points = it->get<int>();
      else if (k == "exact_g") c.exact_g = it->get<bool>();
      else if (k == "tol") c.tol = it->get<double>();
      else throw UsageError("unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
}

void error_line(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  std::string clean = message;
  for (char& ch : clean) {
    if (ch == '\n') ch = ' ';
  }
  err << "error code=" << code << " kind=" << kind << " message=" << nlohmann::json(clean).dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Clamped plate eigenvalue toolkit"};
  app.set_version_flag("--version", "0.1.0");
  bool print_config = false;
  std::string config_path;
  app.add_flag("--print-config", print_config, "Print all defaults as JSON and exit");
  app.add_option("--config", config_path, "JSON file with option defaults; flags take precedence");

  auto add_domain = [&](CLI::App* s) {
    s->add_option("--domain", cfg.domain, "JSON domain spec");
    s->add_option("--resolution", cfg.resolution, "Override the spec resolution (>= 32)");
  };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", cfg.out, "Output path (default stdout)"); };

  auto* table = app.add_subcommand("ball-table", "Mean of the ball mode per dimension");
  table->add_option("--dims", cfg.dims, "Dimension or range A..B");
  table->add_option("--volume", cfg.volume, "Ball volume");
  table->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "columns"}));
  add_out(table);

  auto* profile = app.add_subcommand("ball-profile", "Radial profile of the ball mode");
  profile->add_option("--d", cfg.d, "Dimension");
  profile->add_option("--volume", cfg.volume, "Ball volume");
  profile->add_option("--points", cfg.points, "Number of radii");
  profile->add_option("--quantity", cfg.quantity, "u, du or laplacian");
  profile->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "columns"}));
  add_out(profile);

  auto* solve = app.add_subcommand("solve", "Principal clamped eigenpair on a grid domain");
  add_domain(solve);
  solve->add_option("--tol", cfg.tol, "Eigenvalue tolerance");
  add_out(solve);

  auto* verify = app.add_subcommand("verify-reduction", "Order reduction and hypothesis reports");
  add_domain(verify);
  verify->add_flag("--exact-g", cfg.exact_g, "Use the constant g of a critical shape");

  auto* rearr = app.add_subcommand("rearrange", "Rearrangement of a field CSV");
  rearr->add_option("--field", cfg.field, "CSV with index,x,y,value rows");
  rearr->add_option("--mode", cfg.mode, "schwarz, sharp or dagger");
  rearr->add_option("--format", cfg.format)->check(CLI::IsMember({"csv", "columns"}));
  add_out(rearr);

  auto* talenti = app.add_subcommand("talenti", "Talenti comparison for -Delta u = f");
  add_domain(talenti);
  talenti->add_option("--f", cfg.source, "Source CSV aligned with the domain nodes (default f = 1)");
  add_out(talenti);

  auto* shape = app.add_subcommand("shape-deriv", "Shape derivative checks");
  add_domain(shape);
  shape->add_option("--field", cfg.field, "dilation | translation[:vx,vy] | bump:theta,width,amplitude");

  auto* all = app.add_subcommand("check-all", "Run every checker on one domain");
  add_domain(all);
  all->add_flag("--exact-g", cfg.exact_g, "Use the constant g of a critical shape");

  app.require_subcommand(0, 1);

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out << app.version() << '\n';
      return kOk;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }
    if (!config_path.empty()) apply_config_file(config_path, app, cfg);
    if (print_config) {
      out << config_json(cfg).dump(2) << '\n';
      return kOk;
    }
    if (app.get_subcommands().empty()) {
      err << app.help();
      error_line(err, kUsage, "usage", "no subcommand given");
      return kUsage;
    }
    CLI::App* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    if (cfg.subcommand == "ball-table") return cmd_ball_table(cfg, out);
    if (cfg.subcommand == "ball-profile") return cmd_ball_profile(cfg, out);
    if (cfg.subcommand == "solve") return cmd_solve(cfg, out);
    if (cfg.subcommand == "verify-reduction") return cmd_verify_reduction(cfg, out);
    if (cfg.subcommand == "rearrange") return cmd_rearrange(cfg, out);
    if (cfg.subcommand == "talenti") return cmd_talenti(cfg, out);
    if (cfg.subcommand == "shape-deriv") return cmd_shape_deriv(cfg, out);
    return cmd_check_all(cfg, out);
  } catch (const UsageError& e) {
    error_line(err, kUsage, "usage", e.what());
    return kUsage;
  } catch (const SolverError& e) {
    error_line(err, kSolverFailed, "solver", e.what());
    return kSolverFailed;
  } catch (const SpectralGapError& e) {
    error_line(err, kSolverFailed, "spectral_gap", e.what());
    return kSolverFailed;
  } catch (const std::invalid_argument& e) {
    error_line(err, kUsage, "usage", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    error_line(err, kSolverFailed, "solver", e.what());
    return kSolverFailed;
  }
}

}  // namespace clamped::cli
