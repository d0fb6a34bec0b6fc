#include "reports/commands.hpp"

#include "analysis/families.hpp"
#include "analysis/radial.hpp"
#include "analysis/spectra.hpp"
#include "core/symbolic.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace symland {

using nlohmann::ordered_json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

FamilySpec family(const std::string& name) {
  try {
    return FamilySpec::parse(name);
  } catch (const UnknownFamily& e) {
    throw UsageError(e.what());
  }
}

std::vector<FamilySpec> families(const RunConfig& cfg) {
  if (cfg.families.empty()) throw UsageError(cfg.command + " needs at least one family");
  std::vector<FamilySpec> out;
  for (const auto& n : cfg.families) out.push_back(family(n));
  return out;
}

KernelSpec kernel_of(const RunConfig& cfg) {
  return cfg.kernel == "gauss" ? KernelSpec::gauss() : KernelSpec::frobenius(3);
}

ordered_json header(const RunConfig& cfg) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = cfg.command;
  return j;
}

std::vector<int> usable(const FamilySpec& f, const std::vector<int>& ladder, ordered_json& skipped) {
  std::vector<int> out;
  for (int d : ladder) {
    if (d >= f.min_d()) out.push_back(d);
    else skipped.push_back(d);
  }
  return out;
}

ordered_json matrix_json(const Matrix& W) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < W.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (int a = 0; a < W.cols(); ++a) r.push_back(W(i, a));
    rows.push_back(r);
  }
  return rows;
}

// ------------------------------------------------------------------ verify

CommandResult cmd_verify(const RunConfig& cfg) {
  if (cfg.d_ladder.empty()) throw UsageError("verify needs --d");
  const auto fams = families(cfg);
  CommandResult res;
  res.report = header(cfg);
  res.report["tol"] = cfg.tol;
  res.csv.push_back({"family", "d", "loss", "formula", "deviation", "gradient_norm", "bound", "pass"});
  bool all = true;
  ordered_json fj = ordered_json::array();
  for (const auto& f : fams) {
    ordered_json e;
    e["family"] = f.name();
    ordered_json skipped = ordered_json::array();
    const auto ds = usable(f, cfg.d_ladder, skipped);
    e["skipped_d"] = skipped;
    bool pass = !ds.empty();
    ordered_json rows = ordered_json::array();
    std::vector<int> built;
    for (int d : ds) {
      ordered_json r;
      r["d"] = d;
      try {
        const PolishedPoint p = construct(f, d);
        const double gn = gradient(f.kernel, p.W).norm();
        const double bound = criticality_bound(p.W);
        r["loss"] = p.loss;
        r["gradient_norm"] = gn;
        r["criticality_bound"] = bound;
        r["critical"] = gn <= bound;
        pass = pass && gn <= bound;
        built.push_back(d);
      } catch (const NewtonFailure& ex) {
        r["error"] = ex.what();
        r["residual"] = ex.residual;
        pass = false;
      }
      rows.push_back(r);
    }
    ordered_json loss_j;
    if (!built.empty()) {
      const LossReport lr = verify_loss_formula(f, built);
      loss_j["exact"] = lr.exact;
      bool lpass = lr.exact ? true : lr.pass;
      for (std::size_t i = 0; i < lr.rows.size(); ++i) {
        const auto& c = lr.rows[i];
        const bool row_pass = lr.exact ? c.deviation <= cfg.tol : true;
        lpass = lpass && row_pass;
        for (auto& r : rows)
          if (r["d"] == c.d) {
            r["formula"] = c.formula;
            r["deviation"] = c.deviation;
            res.csv.push_back({f.name(), std::to_string(c.d), num(c.loss), num(c.formula), num(c.deviation),
                               num(r["gradient_norm"].get<double>()), num(r["criticality_bound"].get<double>()),
                               (r["critical"].get<bool>() && row_pass) ? "true" : "false"});
          }
      }
      loss_j["verdict"] = lr.exact ? (lpass ? "ExactMatch" : "Mismatch")
                                   : (lpass ? "AsymptoticConsistent" : "Mismatch");
      pass = pass && lpass;
    }
    e["rows"] = rows;
    e["loss_formula"] = loss_j;
    e["pass"] = pass;
    all = all && pass;
    fj.push_back(e);
  }
  res.report["families"] = fj;
  res.report["pass"] = all;
  res.exit_code = all ? 0 : 1;
  return res;
}

// ------------------------------------------------------------------ spectrum

ordered_json cluster_rows(const std::vector<ClusterRow>& rows) {
  ordered_json a = ordered_json::array();
  for (const auto& c : rows)
    a.push_back({{"value", c.value}, {"multiplicity", c.multiplicity}, {"predicted", c.predicted}, {"deviation", c.deviation}});
  return a;
}

CommandResult cmd_spectrum(const RunConfig& cfg) {
  if (cfg.d_ladder.empty()) throw UsageError("spectrum needs --d");
  const auto fams = families(cfg);
  CommandResult res;
  res.report = header(cfg);
  res.csv.push_back({"family", "d", "value", "multiplicity", "predicted", "deviation"});
  bool all = true;
  ordered_json fj = ordered_json::array();
  ordered_json iv = ordered_json::array();
  for (const auto& f : fams) {
    ordered_json e;
    e["family"] = f.name();
    ordered_json skipped = ordered_json::array();
    const auto ds = usable(f, cfg.d_ladder, skipped);
    e["skipped_d"] = skipped;
    std::vector<LadderPoint> points;
    if (has_prediction(f)) {
      const Comparison c = compare(f, ds, cfg.hessian_cap);
      e["order"] = order_name(c.order);
      e["verdict"] = verdict_name(c.verdict);
      if (!c.note.empty()) e["note"] = c.note;
      all = all && c.verdict != SpectrumVerdict::Mismatch;
      points = c.points;
    } else {
      e["verdict"] = "NoPrediction";
      for (int d : ds) {
        const SpectrumReport rep = spectrum(f.kernel, construct(f, d).W, cfg.hessian_cap);
        LadderPoint lp;
        lp.d = d;
        lp.loss = rep.loss;
        lp.index = rep.index;
        for (const auto& cl : rep.clusters) lp.rows.push_back({cl.value, cl.multiplicity, std::nan(""), std::nan("")});
        points.push_back(lp);
      }
    }
    ordered_json pj = ordered_json::array();
    for (const auto& p : points) {
      ordered_json pr;
      pr["d"] = p.d;
      pr["loss"] = p.loss;
      pr["index"] = p.index;
      pr["max_deviation"] = p.max_deviation;
      pr["scaled_deviation"] = p.scaled_deviation;
      pr["clusters"] = cluster_rows(p.rows);
      pj.push_back(pr);
      for (const auto& c : p.rows)
        res.csv.push_back({f.name(), std::to_string(p.d), num(c.value), std::to_string(c.multiplicity),
                           num(c.predicted), num(c.deviation)});
      const double dd = p.d;
      iv.push_back({{"family", f.name()},
                    {"d", p.d},
                    {"loss_over_d", p.loss / dd},
                    {"index_over_d2", static_cast<double>(p.index) / (dd * dd)},
                    {"index", p.index},
                    {"higher_order_descents", curve_certified_descents(f, p.d)}});
    }
    e["points"] = pj;
    fj.push_back(e);
  }
  res.report["families"] = fj;
  res.report["index_value_report"] = iv;
  res.report["pass"] = all;
  res.exit_code = all ? 0 : 1;
  return res;
}

// ------------------------------------------------------------------ puiseux

ordered_json series_json(const std::vector<PuiseuxSeries>& s) {
  ordered_json a = ordered_json::array();
  for (const auto& x : s) a.push_back(x.to_string());
  return a;
}

CommandResult cmd_puiseux(const RunConfig& cfg) {
  if (cfg.pattern.empty()) throw UsageError("puiseux needs --pattern");
  PatternShape shape;
  try {
    shape = PatternShape::parse(cfg.pattern);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  const KernelSpec k = kernel_of(cfg);
  const auto system = symbolic_restricted_gradient(k, shape);
  CommandResult res;
  res.report = header(cfg);
  res.report["kernel"] = cfg.kernel;
  res.report["pattern"] = shape.name();
  res.report["depth"] = cfg.depth;
  res.report["num_variables"] = system.size();
  res.csv.push_back({"source", "variable", "series"});
  bool all = true;

  ordered_json search;
  ordered_json branches = ordered_json::array();
  try {
    const ExponentSearch ex = leading_exponents(system);
    ordered_json cands = ordered_json::array();
    for (const auto& tau : ex.candidates) {
      ordered_json t = ordered_json::array();
      for (const auto& q : tau) t.push_back(rational_to_string(q));
      cands.push_back(t);
      for (const auto& A : leading_coefficients(system, tau)) {
        ordered_json b;
        b["tau"] = t;
        ordered_json lead = ordered_json::array();
        std::vector<PuiseuxSeries> seed;
        for (std::size_t i = 0; i < A.size(); ++i) {
          lead.push_back(A[i].to_string());
          seed.push_back(PuiseuxSeries::monomial(tau[i], A[i]));
        }
        b["leading"] = lead;
        try {
          const SeriesExtension se = extend_series(system, seed, cfg.depth);
          b["series"] = series_json(se.series);
          b["q"] = se.q;
          b["exact_solution"] = se.exact_solution;
          b["rational"] = se.rational;
          const std::string src = "branch" + std::to_string(branches.size());
          for (std::size_t i = 0; i < se.series.size(); ++i)
            res.csv.push_back({src, std::to_string(i + 1), se.series[i].to_string()});
        } catch (const std::exception& e) {
          b["error"] = e.what();
          all = false;
        }
        branches.push_back(b);
      }
    }
    search["candidates"] = cands;
    search["outside_lattice"] = ex.outside_lattice;
  } catch (const std::runtime_error& e) {
    search["error"] = e.what();
  }
  res.report["exponent_search"] = search;
  res.report["branches"] = branches;

  ordered_json fams = ordered_json::array();
  const auto catalog = k.kind == KernelKind::Frobenius ? frobenius_catalog() : gauss_catalog();
  for (const auto& f : catalog) {
    if (f.construction != Construction::PuiseuxSeed || f.pattern.name() != shape.name()) continue;
    const auto s = family_series(f, cfg.depth);
    fams.push_back({{"family", f.name()}, {"series", series_json(s)}});
    for (std::size_t i = 0; i < s.size(); ++i) res.csv.push_back({f.name(), std::to_string(i + 1), s[i].to_string()});
  }
  res.report["families"] = fams;
  res.report["pass"] = all;
  res.exit_code = all ? 0 : 1;
  return res;
}

// ------------------------------------------------------------------ radial

CommandResult cmd_radial(const RunConfig& cfg) {
  if (cfg.d_ladder.empty()) throw UsageError("radial needs --d");
  const auto fams = families(cfg);
  const std::vector<double> grid = cfg.r_grid.empty() ? default_r_grid() : cfg.r_grid;
  CommandResult res;
  res.report = header(cfg);
  res.report["r_grid"] = grid;
  res.report["restarts"] = cfg.restarts;
  res.report["seed"] = cfg.seed;
  res.csv.push_back({"family", "d", "r", "sphere_value", "deficit", "fitted_order", "verdict"});
  ordered_json certs = ordered_json::array();
  ordered_json records = ordered_json::array();
  bool all = true;
  std::uint64_t stream = 0;
  for (const auto& f : fams) {
    ordered_json skipped = ordered_json::array();
    for (int d : usable(f, cfg.d_ladder, skipped)) {
      SphereOptions opt;
      opt.restarts = cfg.restarts;
      opt.seed = derive_seed(cfg.seed, stream++);
      const SaddleCertificate c = certify_saddle(f, d, grid, opt);
      const std::string verdict = saddle_verdict_name(c.verdict);
      ordered_json cj;
      cj["family"] = c.family;
      cj["d"] = d;
      cj["index"] = c.index;
      cj["base_loss"] = c.base_loss;
      if (c.fitted_order) {
        cj["fitted_order"] = *c.fitted_order;
        cj["order"] = std::lround(*c.fitted_order);
      } else {
        cj["fitted_order"] = nullptr;
      }
      cj["deficit_over_r3"] = c.rows.empty() ? ordered_json(nullptr) : ordered_json(c.deficit_over_r3);
      cj["verdict"] = verdict;
      certs.push_back(cj);
      for (const auto& r : c.rows) {
        records.push_back({{"family", c.family},
                           {"d", d},
                           {"r", r.r},
                           {"sphere_value", r.sphere_value},
                           {"deficit", r.deficit},
                           {"fitted_order", cj["fitted_order"]},
                           {"verdict", verdict}});
        res.csv.push_back({c.family, std::to_string(d), num(r.r), num(r.sphere_value), num(r.deficit),
                           c.fitted_order ? num(*c.fitted_order) : "", verdict});
      }
      if (c.rows.empty())
        res.csv.push_back({c.family, std::to_string(d), "", "", "", "", verdict});
      all = all && c.verdict != SaddleVerdict::Inconclusive;
    }
  }
  res.report["certificates"] = certs;
  res.report["records"] = records;
  res.report["pass"] = all;
  res.exit_code = all ? 0 : 1;
  return res;
}

// ------------------------------------------------------------------ sphere-min

CommandResult cmd_sphere_min(const RunConfig& cfg) {
  const auto fams = families(cfg);
  if (fams.size() != 1) throw UsageError("sphere-min takes exactly one family");
  if (cfg.d_ladder.size() != 1) throw UsageError("sphere-min takes a single --d");
  if (cfg.r_grid.empty()) throw UsageError("sphere-min needs --r");
  const FamilySpec& f = fams.front();
  const int d = cfg.d_ladder.front();
  if (d < f.min_d()) throw UsageError(f.name() + " needs d >= " + std::to_string(f.min_d()));
  std::optional<PatternShape> pattern;
  if (!cfg.pattern.empty() && cfg.pattern != "Full") {
    try {
      pattern = PatternShape::parse(cfg.pattern);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  const PolishedPoint p = construct(f, d);
  CommandResult res;
  res.report = header(cfg);
  res.report["family"] = f.name();
  res.report["d"] = d;
  res.report["pattern"] = pattern ? pattern->name() : "Full";
  res.report["base_loss"] = p.loss;
  res.csv.push_back({"r", "value", "deficit", "radial_residual"});
  ordered_json rows = ordered_json::array();
  bool all = true;
  for (std::size_t i = 0; i < cfg.r_grid.size(); ++i) {
    SphereOptions opt;
    opt.restarts = cfg.restarts;
    opt.seed = derive_seed(cfg.seed, i);
    SphereMin sm;
    try {
      sm = sphere_min(f.kernel, p.W, pattern, cfg.r_grid[i], opt);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const bool ok = sm.radial_residual <= 1e-6;
    all = all && ok;
    rows.push_back({{"r", cfg.r_grid[i]},
                    {"value", sm.value},
                    {"deficit", p.loss - sm.value},
                    {"radial_residual", sm.radial_residual},
                    {"minimizer", matrix_json(sm.W)}});
    res.csv.push_back({num(cfg.r_grid[i]), num(sm.value), num(p.loss - sm.value), num(sm.radial_residual)});
  }
  res.report["rows"] = rows;
  res.report["pass"] = all;
  res.exit_code = all ? 0 : 1;
  return res;
}

// ------------------------------------------------------------------ report

CommandResult cmd_report(const RunConfig& cfg) {
  const int d = cfg.d_ladder.empty() ? 20 : cfg.d_ladder.back();
  std::vector<FamilySpec> fams;
  if (!cfg.families.empty()) {
    fams = families(cfg);
  } else {
    for (const auto& f : cfg.kernel == "gauss" ? gauss_catalog() : frobenius_catalog())
      if (d >= f.min_d()) fams.push_back(f);
  }
  CommandResult res;
  res.report = header(cfg);
  res.report["kernel"] = cfg.kernel;
  res.report["d"] = d;
  res.report["note"] = "loss/d against index/d^2 is reported, not asserted";
  res.csv.push_back({"family", "d", "loss_over_d", "index_over_d2", "index", "higher_order_descents"});
  ordered_json rows = ordered_json::array();
  for (const auto& r : index_value_report(fams, d, curve_certified_descents)) {
    rows.push_back({{"family", r.family},
                    {"d", r.d},
                    {"loss_over_d", r.loss_over_d},
                    {"index_over_d2", r.index_over_d2},
                    {"gap", std::abs(r.loss_over_d - r.index_over_d2)},
                    {"index", r.index},
                    {"higher_order_descents", r.higher_order_descents}});
    res.csv.push_back({r.family, std::to_string(r.d), num(r.loss_over_d), num(r.index_over_d2),
                       std::to_string(r.index), std::to_string(r.higher_order_descents)});
  }
  res.report["rows"] = rows;
  res.report["pass"] = true;
  return res;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

CommandResult run_command(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "spectrum") return cmd_spectrum(cfg);
  if (cfg.command == "puiseux") return cmd_puiseux(cfg);
  if (cfg.command == "radial") return cmd_radial(cfg);
  if (cfg.command == "sphere-min") return cmd_sphere_min(cfg);
  return cmd_report(cfg);
}

std::string render(const CommandResult& r, OutputFormat f) {
  if (f == OutputFormat::Json) return r.report.dump(2) + "\n";
  std::ostringstream out;
  for (const auto& row : r.csv) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace symland
