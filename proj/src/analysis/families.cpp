#include "analysis/families.hpp"

#include "core/symbolic.hpp"

#include <Eigen/QR>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace symland {

namespace {

struct IdName {
  FamilyId id;
  const char* name;
};

constexpr IdName kNames[] = {{FamilyId::CI, "CI"}, {FamilyId::C0, "C0"}, {FamilyId::C1, "C1"},
                             {FamilyId::C2, "C2"}, {FamilyId::C3, "C3"}, {FamilyId::C4, "C4"},
                             {FamilyId::C5t, "C5t"}, {FamilyId::Cblock, "Cblock"}, {FamilyId::D0, "D0"},
                             {FamilyId::D1, "D1"}, {FamilyId::DI, "DI"}, {FamilyId::D2, "D2"}};

std::string strip(std::string s) {
  std::string out;
  for (char c : s)
    if (c != '_') out += c;
  return out;
}

}  // namespace

FamilySpec FamilySpec::make(FamilyId id, double t, int block) {
  FamilySpec s;
  s.id = id;
  s.t = t;
  s.block = block;
  const bool gauss = id == FamilyId::D0 || id == FamilyId::D1 || id == FamilyId::DI || id == FamilyId::D2;
  s.kernel = gauss ? KernelSpec::gauss() : KernelSpec::frobenius(3);
  switch (id) {
    case FamilyId::C0:
    case FamilyId::C1:
    case FamilyId::D0:
    case FamilyId::D1:
      s.pattern = {PatternKind::Full, 0};
      break;
    case FamilyId::CI:
    case FamilyId::C2:
    case FamilyId::DI:
      s.pattern = {PatternKind::DiagSd, 0};
      break;
    case FamilyId::C3:
    case FamilyId::D2:
      s.pattern = {PatternKind::DiagSd1, 0};
      break;
    case FamilyId::C4:
      s.pattern = {PatternKind::DiagSd2, 0};
      break;
    case FamilyId::C5t:
      s.pattern = {PatternKind::DiagSd11, 0};
      break;
    case FamilyId::Cblock:
      if (block < 1) throw std::invalid_argument("Cblock needs i >= 1");
      s.pattern = {PatternKind::DiagBlock, block};
      break;
  }
  s.construction = (id == FamilyId::C2 || id == FamilyId::C3 || id == FamilyId::D2) ? Construction::PuiseuxSeed
                                                                                    : Construction::Exact;
  return s;
}

FamilySpec FamilySpec::parse(const std::string& raw) {
  std::string name = strip(raw);
  std::string arg;
  auto colon = name.find(':');
  if (colon != std::string::npos) {
    arg = name.substr(colon + 1);
    name = name.substr(0, colon);
  }
  if (name == "C5" && arg.empty()) return make(FamilyId::C5t, 0.0);
  if (name == "C5t" || name == "C5") {
    try {
      std::size_t used = 0;
      double t = std::stod(arg, &used);
      if (used != arg.size() || !std::isfinite(t)) throw std::invalid_argument(arg);
      return make(FamilyId::C5t, t);
    } catch (const std::exception&) {
      throw UnknownFamily("unknown family: " + raw);
    }
  }
  if (name == "Cblock") {
    try {
      std::size_t used = 0;
      int i = std::stoi(arg, &used);
      if (used != arg.size() || i < 1) throw std::invalid_argument(arg);
      return make(FamilyId::Cblock, 0.0, i);
    } catch (const std::exception&) {
      throw UnknownFamily("unknown family: " + raw);
    }
  }
  if (!arg.empty()) throw UnknownFamily("unknown family: " + raw);
  for (const auto& e : kNames)
    if (name == e.name && e.id != FamilyId::C5t && e.id != FamilyId::Cblock) return make(e.id);
  throw UnknownFamily("unknown family: " + raw);
}

std::string FamilySpec::name() const {
  if (id == FamilyId::C5t) {
    if (t == 0.0) return "C5";
    std::ostringstream os;
    os << "C5t:" << t;
    return os.str();
  }
  if (id == FamilyId::Cblock) return "Cblock:" + std::to_string(block);
  for (const auto& e : kNames)
    if (e.id == id) return e.name;
  return "?";
}

int FamilySpec::min_d() const {
  switch (id) {
    case FamilyId::CI:
    case FamilyId::C0:
    case FamilyId::C1:
    case FamilyId::D0:
    case FamilyId::D1:
    case FamilyId::DI:
      return 2;
    case FamilyId::C5t:
      return 3;
    case FamilyId::C4:
      return 3;
    case FamilyId::Cblock:
      return block + 1;
    case FamilyId::C2:
    case FamilyId::C3:
    case FamilyId::D2:
      return 4;
  }
  return 2;
}

std::vector<FamilySpec> frobenius_catalog() {
  return {FamilySpec::make(FamilyId::C0), FamilySpec::make(FamilyId::C1), FamilySpec::make(FamilyId::C2),
          FamilySpec::make(FamilyId::C3), FamilySpec::make(FamilyId::C4), FamilySpec::make(FamilyId::C5t),
          FamilySpec::make(FamilyId::CI)};
}

std::vector<FamilySpec> gauss_catalog() {
  return {FamilySpec::make(FamilyId::D0), FamilySpec::make(FamilyId::D1), FamilySpec::make(FamilyId::DI),
          FamilySpec::make(FamilyId::D2)};
}

// ---------------------------------------------------------------- symbolic caches

namespace {

struct CompiledSystem {
  std::vector<MPoly> system;
  std::vector<NumericPoly> f;
  std::vector<std::vector<NumericPoly>> jac;
};

const CompiledSystem& compiled(const KernelSpec& k, const PatternShape& shape) {
  static std::mutex mu;
  static std::map<std::string, CompiledSystem> cache;
  const std::string key = k.name() + "|" + shape.name();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  CompiledSystem cs;
  cs.system = symbolic_restricted_gradient(k, shape);
  for (const auto& p : cs.system) {
    cs.f.emplace_back(p);
    std::vector<NumericPoly> row;
    for (std::size_t i = 0; i < p.num_xi(); ++i) row.emplace_back(p.differentiate(i));
    cs.jac.push_back(std::move(row));
  }
  return cache.emplace(key, std::move(cs)).first->second;
}

std::vector<PuiseuxSeries> seed_of(FamilyId id) {
  auto q = [](long a, long b) { return Coefficient::rational(Rational(a, b)); };
  auto mono = [&](int e, long a) { return PuiseuxSeries::monomial(Rational(e), q(a, 1)); };
  switch (id) {
    case FamilyId::C2:
      return {mono(-1, -1), mono(-1, 1)};
    case FamilyId::C3:
      return {mono(-1, -1), mono(-1, 1), {}, {}, mono(0, 1)};
    case FamilyId::D2:
      return {mono(0, 1), {}, mono(-1, 1), {}, {}};
    default:
      throw std::invalid_argument("family has no Puiseux seed");
  }
}

long double norm_ld(const std::vector<long double>& v) {
  long double s = 0;
  for (auto x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<PuiseuxSeries> family_series(const FamilySpec& spec, int depth) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<PuiseuxSeries>> cache;
  const auto key = std::make_pair(static_cast<int>(spec.id), depth);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const auto& cs = compiled(spec.kernel, spec.pattern);
  auto ext = extend_series(cs.system, seed_of(spec.id), depth);
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = ext.series;
  return ext.series;
}

NewtonResult newton_polish(const KernelSpec& k, const PatternShape& shape, int d, const Vector& seed, int max_iter) {
  const auto& cs = compiled(k, shape);
  const std::size_t n = cs.f.size();
  if (static_cast<std::size_t>(seed.size()) != n) throw std::invalid_argument("seed has wrong dimension");
  const long double dd = d;
  std::vector<long double> x(seed.data(), seed.data() + n);
  auto F = [&](const std::vector<long double>& z) {
    std::vector<long double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = cs.f[i](z, dd);
    return r;
  };
  NewtonResult out;
  auto r = F(x);
  long double rn = norm_ld(r);
  for (int it = 0; it < max_iter; ++it) {
    if (rn <= 1e-15L * (1 + norm_ld(x))) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd J(n, n);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b(i) = -static_cast<double>(r[i]);
      for (std::size_t j = 0; j < n; ++j) J(i, j) = static_cast<double>(cs.jac[i][j](x, dd));
    }
    Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(b);
    long double lambda = 1;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      std::vector<long double> trial = x;
      for (std::size_t i = 0; i < n; ++i) trial[i] += lambda * step(i);
      auto rt = F(trial);
      long double rtn = norm_ld(rt);
      if (rtn < rn) {
        x = trial;
        r = rt;
        rn = rtn;
        improved = true;
        break;
      }
      lambda /= 2;
    }
    out.iterations = it + 1;
    if (!improved) {
      out.converged = rn <= 1e-12L * (1 + norm_ld(x));
      break;
    }
  }
  out.xi = Vector(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out.xi(static_cast<Eigen::Index>(i)) = static_cast<double>(x[i]);
  out.residual = static_cast<double>(rn);
  if (!out.converged) out.converged = rn <= 1e-12L * (1 + norm_ld(x));
  return out;
}

double criticality_bound(const Matrix& W) {
  const double n = W.norm();
  return 1e-10 * (1 + n * n * n);
}

namespace {

Matrix exact_matrix(const FamilySpec& s, int d) {
  Matrix W = Matrix::Zero(d, d);
  switch (s.id) {
    case FamilyId::CI:
    case FamilyId::DI:
      W.setIdentity();
      break;
    case FamilyId::C0:
    case FamilyId::D0:
      break;
    case FamilyId::C1:
      W.setConstant(1.0 / d);
      break;
    case FamilyId::D1:
      W.setConstant(std::cbrt(3.0 * (d + 2.0 / 3.0) / (5.0 * d * d * d)));
      break;
    case FamilyId::C4:
      for (int i = 0; i < d - 2; ++i) W(i, i) = 1;
      W.block(d - 2, d - 2, 2, 2).setConstant(0.5);
      break;
    case FamilyId::C5t:
      for (int i = 0; i < d - 2; ++i) W(i, i) = 1;
      W(d - 2, d - 2) = std::cbrt(1.0 - s.t * s.t * s.t);
      W(d - 1, d - 2) = s.t;
      break;
    case FamilyId::Cblock:
      for (int i = 0; i < d - s.block; ++i) W(i, i) = 1;
      break;
    default:
      throw std::logic_error("not an exact family");
  }
  return W;
}

}  // namespace

PolishedPoint construct(const FamilySpec& spec, int d) {
  if (d < spec.min_d())
    throw std::invalid_argument(spec.name() + " requires d >= " + std::to_string(spec.min_d()));
  const FixedPointSpace space(IsotropyPattern(spec.pattern, d));
  PolishedPoint p;
  if (spec.construction == Construction::Exact) {
    p.W = exact_matrix(spec, d);
    p.xi = space.coordinates(p.W);
  } else {
    const Vector seed = seed_to_numeric(family_series(spec), d);
    auto nr = newton_polish(spec.kernel, spec.pattern, d, seed);
    if (!nr.converged)
      throw NewtonFailure(spec.name() + ": Newton polish did not converge at d=" + std::to_string(d), nr.residual);
    p.xi = nr.xi;
    p.newton_iterations = nr.iterations;
    p.W = space.embed(p.xi);
  }
  p.residual = space.restrict_gradient(spec.kernel, p.xi).norm();
  p.loss = loss_direct(spec.kernel, p.W);
  if (spec.construction == Construction::PuiseuxSeed && !(p.residual <= 1e-11 * (1 + p.xi.norm())))
    throw NewtonFailure(spec.name() + ": restricted gradient above tolerance after polish", p.residual);
  return p;
}

bool loss_formula_exact(const FamilySpec& spec) { return spec.construction == Construction::Exact; }

double loss_formula(const FamilySpec& spec, int d) {
  const double x = d;
  switch (spec.id) {
    case FamilyId::CI:
    case FamilyId::DI:
      return 0;
    case FamilyId::C0:
      return x;
    case FamilyId::C1:
    case FamilyId::C2:
      return x - 1 / x;
    case FamilyId::C3:
      return x - 1;
    case FamilyId::C4:
      return 1.5;
    case FamilyId::C5t:
      return 1;
    case FamilyId::Cblock:
      return spec.block;
    case FamilyId::D0:
      return 15 * x;
    case FamilyId::D1:
      return 48 * x / 5 - 36.0 / 5 - 12 / (5 * x);
    case FamilyId::D2:
      return 6 + 18 / x;
  }
  return 0;
}

LossReport verify_loss_formula(const FamilySpec& spec, const std::vector<int>& d_list) {
  LossReport rep;
  rep.family = spec.name();
  rep.exact = loss_formula_exact(spec);
  rep.pass = !d_list.empty();
  for (int d : d_list) {
    LossCheck c;
    c.d = d;
    c.loss = construct(spec, d).loss;
    c.formula = loss_formula(spec, d);
    const double diff = std::abs(c.loss - c.formula);
    c.deviation = rep.exact ? diff / std::max(1.0, std::abs(c.formula)) : diff;
    c.pass = rep.exact ? c.deviation <= 1e-9 : true;
    rep.rows.push_back(c);
  }
  if (!rep.exact) {
    // leading-order table value: the gap must shrink faster than 1/d along the ladder
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      const auto& a = rep.rows[i - 1];
      auto& b = rep.rows[i];
      b.pass = b.deviation * b.d < a.deviation * a.d;
    }
  }
  for (const auto& c : rep.rows) rep.pass = rep.pass && c.pass;
  return rep;
}

std::vector<SweepRow> continuum_sweep(const std::vector<double>& t_grid, int d) {
  if (d < 2) throw std::invalid_argument("continuum sweep needs d >= 2");
  std::vector<SweepRow> rows;
  const KernelSpec k = KernelSpec::frobenius(3);
  for (double t : t_grid) {
    Matrix W = Matrix::Zero(d, d);
    for (int i = 0; i < d - 2; ++i) W(i, i) = 1;
    W(d - 2, d - 2) = std::cbrt(1.0 - t * t * t);
    W(d - 1, d - 2) = t;
    SweepRow r;
    r.t = t;
    r.residual = gradient(k, W).norm();
    r.loss = loss_direct(k, W);
    // entries reach |t|^5 in the gradient, so scale the criticality test accordingly
    const double scale = std::pow(1 + std::abs(t), 5);
    r.pass = r.residual <= 1e-11 * scale && std::abs(r.loss - 1) <= 1e-10;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace symland
