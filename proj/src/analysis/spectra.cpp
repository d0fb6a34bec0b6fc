#include "analysis/spectra.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace symland {

std::string verdict_name(SpectrumVerdict v) {
  switch (v) {
    case SpectrumVerdict::ExactMatch:
      return "ExactMatch";
    case SpectrumVerdict::AsymptoticConsistent:
      return "AsymptoticConsistent";
    case SpectrumVerdict::Mismatch:
      return "Mismatch";
  }
  return "?";
}

std::string order_name(PredictionOrder o) {
  switch (o) {
    case PredictionOrder::Exact:
      return "Exact";
    case PredictionOrder::InvD:
      return "o(1/d)";
    case PredictionOrder::InvD23:
      return "o(d^-2/3)";
  }
  return "?";
}

std::vector<double> symmetric_eigenvalues(Matrix A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  if (A.cols() != A.rows()) throw std::invalid_argument("matrix must be square");
  std::vector<double> w(static_cast<std::size_t>(n));
  if (n == 0) return w;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, A.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
  return w;
}

std::vector<Cluster> cluster_eigenvalues(const std::vector<double>& asc) {
  std::vector<Cluster> out;
  if (asc.empty()) return out;
  const double spread = asc.back() - asc.front();
  const double gap = std::max(1e-7, 1e-6 * spread);
  double sum = asc.back();
  long count = 1;
  for (std::size_t i = asc.size() - 1; i-- > 0;) {
    if (asc[i + 1] - asc[i] > gap) {
      out.push_back({sum / count, count});
      sum = 0;
      count = 0;
    }
    sum += asc[i];
    ++count;
  }
  out.push_back({sum / count, count});
  return out;
}

SpectrumReport spectrum(const KernelSpec& k, const Matrix& W, int cap) {
  const long side = static_cast<long>(W.rows()) * W.cols();
  if (side > cap) throw std::invalid_argument("Hessian size " + std::to_string(side) + " exceeds cap " + std::to_string(cap));
  SpectrumReport r;
  r.eigenvalues = symmetric_eigenvalues(hessian(k, W));
  r.clusters = cluster_eigenvalues(r.eigenvalues);
  r.loss = loss_direct(k, W);
  double m = 0;
  for (double x : r.eigenvalues) m = std::max(m, std::abs(x));
  r.tol = 1e-7 * (1 + m);
  for (double x : r.eigenvalues) {
    if (x < -r.tol) ++r.index;
    if (std::abs(x) <= r.tol) ++r.nullity;
  }
  return r;
}

// ---------------------------------------------------------------- tables

namespace {

const MultPoly kOne{Rational(1), Rational(0), Rational(0)};
const MultPoly kDm1{Rational(-1), Rational(1), Rational(0)};
const MultPoly kDm2{Rational(-2), Rational(1), Rational(0)};
const MultPoly kD{Rational(0), Rational(1), Rational(0)};
const MultPoly kDm1Sq{Rational(1), Rational(-2), Rational(1)};
const MultPoly kX{Rational(1), Rational(-3, 2), Rational(1, 2)};   // (d-1)(d-2)/2
const MultPoly kY{Rational(0), Rational(-3, 2), Rational(1, 2)};   // d(d-3)/2
const MultPoly kX1{Rational(3), Rational(-5, 2), Rational(1, 2)};  // (d-2)(d-3)/2
const MultPoly kY1{Rational(2), Rational(-5, 2), Rational(1, 2)};  // (d-1)(d-4)/2

PredictedEntry constant(const std::string& comp, double v, const MultPoly& m, const std::string& expr) {
  return {comp, expr, [v](double) { return v; }, m};
}

PredictedEntry over_d(const std::string& comp, double c, const MultPoly& m, const std::string& expr) {
  return {comp, expr, [c](double d) { return c / d; }, m};
}

}  // namespace

bool has_prediction(const FamilySpec& spec) {
  switch (spec.id) {
    case FamilyId::Cblock:
      return false;
    case FamilyId::C5t:
      return spec.t == 0.0;
    default:
      return true;
  }
}

PredictedTable predicted_table(const FamilySpec& spec) {
  if (!has_prediction(spec)) throw std::invalid_argument("no tabulated spectrum for " + spec.name());
  PredictedTable t;
  t.family = spec.name();
  const double c75 = std::cbrt(75.0);
  switch (spec.id) {
    case FamilyId::C0:
      t.order = PredictionOrder::Exact;
      t.entries = {constant("t", 0, kOne, "0"), constant("s_d", 0, kDm1, "0"), constant("s_d", 0, kDm1, "0"),
                   constant("s_d(x)s_d", 0, kDm1Sq, "0")};
      break;
    case FamilyId::D0:
      // the Hessian at the origin vanishes for this kernel as well
      t.order = PredictionOrder::Exact;
      t.entries = {constant("all", 0, {Rational(0), Rational(0), Rational(1)}, "0")};
      break;
    case FamilyId::C1:
      t.order = PredictionOrder::InvD;
      t.entries = {over_d("t", 18, kOne, "18/d"), constant("s_d", 0, kDm1, "0"), over_d("s_d", -6, kDm1, "-6/d"),
                   over_d("s_d(x)s_d", -12, kDm1Sq, "-12/d")};
      break;
    case FamilyId::C2:
      t.order = PredictionOrder::InvD;
      t.entries = {over_d("t", 18, kOne, "18/d"),     over_d("t", 12, kOne, "12/d"),
                   over_d("s_d", 12, kDm1, "12/d"),   constant("s_d", 0, kDm1, "0"),
                   over_d("s_d", -6, kDm1, "-6/d"),   over_d("x_d", -12, kX, "-12/d"),
                   over_d("y_d", -12, kY, "-12/d")};
      break;
    case FamilyId::CI:
      t.order = PredictionOrder::Exact;
      t.entries = {constant("t", 18, kOne, "18"), constant("t", 6, kOne, "6"),  constant("s_d", 18, kDm1, "18"),
                   constant("s_d", 6, kDm1, "6"),  constant("s_d", 6, kDm1, "6"), constant("x_d", 6, kX, "6"),
                   constant("y_d", 6, kY, "6")};
      break;
    case FamilyId::C3:
      t.order = PredictionOrder::InvD;
      t.entries = {constant("", 18, kOne, "18"),
                   constant("", 6, kDm1, "6"),
                   over_d("", 18, kOne, "18/d"),
                   over_d("", 12, kDm1, "12/d"),
                   over_d("", 6, kOne, "6/d"),
                   constant("", 0, {Rational(-4), Rational(2), Rational(0)}, "0"),
                   over_d("", -6, kDm2, "-6/d"),
                   over_d("", -12, {Rational(5), Rational(-5), Rational(1)}, "-12/d")};
      break;
    case FamilyId::C4:
      t.order = PredictionOrder::Exact;
      t.entries = {constant("", 18, kDm2, "18"),
                   constant("", 9, kOne, "9"),
                   constant("", 6, {Rational(2), Rational(-3), Rational(1)}, "6"),
                   constant("", 3, kDm2, "3"),
                   constant("", 0, kDm1, "0"),
                   constant("", -3, kOne, "-3"),
                   constant("", -6, kOne, "-6")};
      break;
    case FamilyId::C5t:
      t.order = PredictionOrder::Exact;
      t.entries = {constant("", 18, kDm1, "18"), constant("", 6, kDm1Sq, "6"), constant("", 0, kD, "0")};
      break;
    case FamilyId::D1:
      t.order = PredictionOrder::InvD23;
      t.entries = {
          {"t", "162*75^(1/3)/5*d^(1/3) + 144*75^(1/3)/5*d^(-2/3)",
           [c75](double d) { return 162 * c75 / 5 * std::cbrt(d) + 144 * c75 / 5 / std::cbrt(d * d); }, kOne},
          constant("s_d", 0, kDm1, "0"),
          {"s_d", "18*75^(1/3)/5*d^(1/3) - 32*75^(1/3)/5*d^(-2/3)",
           [c75](double d) { return 18 * c75 / 5 * std::cbrt(d) - 32 * c75 / 5 / std::cbrt(d * d); }, kDm1},
          {"s_d(x)s_d", "-72*75^(1/3)/25*d^(1/3) - 304*75^(1/3)/25*d^(-2/3)",
           [c75](double d) { return -72 * c75 / 25 * std::cbrt(d) - 304 * c75 / 25 / std::cbrt(d * d); }, kDm1Sq}};
      break;
    case FamilyId::DI:
      // 108 and 18d+180 are the large-d limits of a 2x2 block; only the 36 entries are exact
      t.order = PredictionOrder::InvD23;
      t.entries = {constant("t", 108, kOne, "108"),
                   {"t", "18d+180", [](double d) { return 18 * d + 180; }, kOne},
                   constant("s_d", 108, kDm1, "108"),
                   constant("s_d", 36, kDm1, "36"),
                   {"s_d", "18d+180", [](double d) { return 18 * d + 180; }, kDm1},
                   constant("x_d", 36, kX, "36"),
                   constant("y_d", 36, kY, "36")};
      break;
    case FamilyId::D2:
      t.order = PredictionOrder::InvD23;
      t.entries = {constant("t", 0, kOne, "0"),
                   constant("t", 0, kOne, "0"),
                   constant("t", 108, kOne, "108"),
                   {"t", "18d+18", [](double d) { return 18 * d + 18; }, kOne},
                   {"t", "18d+162", [](double d) { return 18 * d + 162; }, kOne},
                   constant("s_d-1", 0, kDm2, "0"),
                   constant("s_d-1", 36, kDm2, "36"),
                   constant("s_d-1", 36, kDm2, "36"),
                   constant("s_d-1", 108, kDm2, "108"),
                   {"s_d-1", "18d+162", [](double d) { return 18 * d + 162; }, kDm2},
                   constant("x_d-1", 36, kX1, "36"),
                   constant("y_d-1", 36, kY1, "36")};
      break;
    default:
      throw std::invalid_argument("no tabulated spectrum for " + spec.name());
  }
  return t;
}

long eval_mult(const MultPoly& m, int d) {
  Rational v = m[0] + m[1] * d + m[2] * d * d;
  if (v.get_den() != 1) throw std::logic_error("non-integral multiplicity");
  return v.get_num().get_si();
}

MultPoly total_multiplicity(const PredictedTable& t) {
  MultPoly s{Rational(0), Rational(0), Rational(0)};
  for (const auto& e : t.entries)
    for (int i = 0; i < 3; ++i) s[i] += e.multiplicity[i];
  return s;
}

std::vector<double> predicted_values(const PredictedTable& t, int d) {
  std::vector<double> v;
  for (const auto& e : t.entries) {
    const long m = eval_mult(e.multiplicity, d);
    if (m < 0) throw std::invalid_argument("negative multiplicity at this d");
    v.insert(v.end(), static_cast<std::size_t>(m), e.value(d));
  }
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<Cluster> predicted_clusters(const PredictedTable& t, int d) {
  std::map<double, long, std::greater<double>> m;
  for (const auto& e : t.entries) {
    const long k = eval_mult(e.multiplicity, d);
    if (k > 0) m[e.value(d)] += k;
  }
  std::vector<Cluster> out;
  for (const auto& [v, k] : m) out.push_back({v, k});
  return out;
}

LadderPoint match_prediction(const SpectrumReport& rep, const PredictedTable& t, int d) {
  LadderPoint p;
  p.d = d;
  p.loss = rep.loss;
  p.index = rep.index;
  const auto pred = predicted_values(t, d);
  if (pred.size() != rep.eigenvalues.size()) throw std::logic_error("multiplicity budget does not match Hessian size");
  // sorted matching is the bottleneck-optimal assignment on the line
  std::vector<double> dev(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    dev[i] = std::abs(rep.eigenvalues[i] - pred[i]);
    p.max_deviation = std::max(p.max_deviation, dev[i]);
  }
  // one row per predicted cluster, reporting the mean matched eigenvalue
  std::size_t i = pred.size();
  while (i > 0) {
    std::size_t j = i;
    while (j > 0 && pred[j - 1] == pred[i - 1]) --j;
    ClusterRow row;
    row.predicted = pred[i - 1];
    row.multiplicity = static_cast<long>(i - j);
    double sum = 0;
    for (std::size_t k = j; k < i; ++k) {
      sum += rep.eigenvalues[k];
      row.deviation = std::max(row.deviation, dev[k]);
    }
    row.value = sum / static_cast<double>(i - j);
    p.rows.push_back(row);
    i = j;
  }
  double scale = 1.0;
  if (t.order == PredictionOrder::InvD) scale = d;
  if (t.order == PredictionOrder::InvD23) scale = std::cbrt(static_cast<double>(d) * d);
  p.scaled_deviation = p.max_deviation * scale;
  return p;
}

namespace {

bool exact_match(const SpectrumReport& rep, const PredictedTable& t, int d) {
  const auto pc = predicted_clusters(t, d);
  if (pc.size() != rep.clusters.size()) return false;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (pc[i].multiplicity != rep.clusters[i].multiplicity) return false;
    if (std::abs(pc[i].value - rep.clusters[i].value) > 1e-8 * std::max(1.0, std::abs(pc[i].value))) return false;
  }
  return true;
}

}  // namespace

Comparison compare(const FamilySpec& spec, const std::vector<int>& ladder, int cap) {
  Comparison c;
  c.family = spec.name();
  const PredictedTable t = predicted_table(spec);
  c.order = t.order;
  bool all_exact = !ladder.empty();
  for (int d : ladder) {
    const PolishedPoint p = construct(spec, d);
    const SpectrumReport rep = spectrum(spec.kernel, p.W, cap);
    c.points.push_back(match_prediction(rep, t, d));
    all_exact = all_exact && exact_match(rep, t, d);
  }
  if (all_exact) {
    c.verdict = SpectrumVerdict::ExactMatch;
    return c;
  }
  if (t.order == PredictionOrder::Exact) {
    c.verdict = SpectrumVerdict::Mismatch;
    c.note = "exact table not matched";
    return c;
  }
  if (c.points.size() < 2) {
    c.verdict = SpectrumVerdict::Mismatch;
    c.note = "asymptotic comparison needs at least two ladder points";
    return c;
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    decreasing = decreasing && c.points[i].scaled_deviation < c.points[i - 1].scaled_deviation;
  c.verdict = decreasing ? SpectrumVerdict::AsymptoticConsistent : SpectrumVerdict::Mismatch;
  if (!decreasing) c.note = "scaled deviation not strictly decreasing along the ladder";
  return c;
}

std::vector<IndexValueRow> index_value_report(const std::vector<FamilySpec>& families, int d,
                                              const DescentCounter& descents) {
  std::vector<IndexValueRow> rows;
  for (const auto& f : families) {
    const PolishedPoint p = construct(f, d);
    const SpectrumReport rep = spectrum(f.kernel, p.W);
    IndexValueRow r;
    r.family = f.name();
    r.d = d;
    r.loss_over_d = rep.loss / d;
    r.index = rep.index;
    r.index_over_d2 = static_cast<double>(rep.index) / (static_cast<double>(d) * d);
    r.higher_order_descents = descents ? descents(f, d) : 0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace symland
