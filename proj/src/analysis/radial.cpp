#include "analysis/radial.hpp"

#include "analysis/spectra.hpp"
#include "core/symmetry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace symland {

double radial_residual(const KernelSpec& k, const Matrix& c, const Matrix& W) {
  const Matrix x = W - c;
  const double xn = x.norm();
  if (xn == 0.0) throw std::invalid_argument("radial residual undefined at the centre");
  const Matrix g = gradient(k, W);
  const Eigen::Map<const Vector> gv(g.data(), g.size());
  const Eigen::Map<const Vector> xv(x.data(), x.size());
  double m = 0.0;
  for (Eigen::Index i = 0; i < gv.size(); ++i)
    for (Eigen::Index j = i + 1; j < gv.size(); ++j) m = std::max(m, std::abs(gv(i) * xv(j) - gv(j) * xv(i)));
  return m / (xn * (1 + std::pow(W.norm(), 3)));
}

Matrix RadialCurve::evaluate(double t) const {
  Matrix W = Matrix::Zero(d, d);
  switch (name) {
    case CurveName::Gamma1:
      for (int i = 0; i < d - 1; ++i) W(i, i) = 1;
      W(d - 1, d - 1) = t;
      break;
    case CurveName::Gamma2:
      for (int i = 0; i < d - 1; ++i) W(i, i) = 1 + t;
      break;
    case CurveName::Gamma3:
      for (int i = 0; i < d - 2; ++i) W(i, i) = 1;
      W(d - 2, d - 2) = std::cbrt(1 - t * t * t);
      W(d - 1, d - 2) = t;
      break;
    case CurveName::GammaBlock:
      for (int i = 0; i < d - block; ++i) W(i, i) = 1;
      W(d - block, d - block) = t;
      break;
  }
  return W;
}

double RadialCurve::loss_formula(double t) const {
  switch (name) {
    case CurveName::Gamma1:
      return std::pow(t, 6) - 2 * std::pow(t, 3) + 1;
    case CurveName::Gamma2:
      return (std::pow(t, 6) + 6 * std::pow(t, 5) + 15 * std::pow(t, 4) + 18 * std::pow(t, 3) + 9 * t * t) * (d - 1) + 1;
    case CurveName::Gamma3:
      return 1;
    case CurveName::GammaBlock:
      return std::pow(t, 6) - 2 * std::pow(t, 3) + block;
  }
  return 0;
}

std::string RadialCurve::label() const {
  switch (name) {
    case CurveName::Gamma1:
      return "Gamma1";
    case CurveName::Gamma2:
      return "Gamma2";
    case CurveName::Gamma3:
      return "Gamma3";
    case CurveName::GammaBlock:
      return "GammaBlock:" + std::to_string(block);
  }
  return "?";
}

RadialCurve curve(CurveName name, int d, int block) {
  if (name == CurveName::GammaBlock) {
    if (block < 1 || block >= d) throw std::invalid_argument("GammaBlock needs 1 <= i < d");
    if (d < 2) throw std::invalid_argument("GammaBlock needs d >= 2");
  } else if (d < 3) {
    throw std::invalid_argument("radial curves of C5 need d >= 3");
  }
  RadialCurve c;
  c.name = name;
  c.d = d;
  c.block = block;
  return c;
}

CurveName parse_curve_name(const std::string& s) {
  if (s == "Gamma1") return CurveName::Gamma1;
  if (s == "Gamma2") return CurveName::Gamma2;
  if (s == "Gamma3") return CurveName::Gamma3;
  if (s == "GammaBlock") return CurveName::GammaBlock;
  throw std::invalid_argument("unknown curve: " + s);
}

std::string curve_kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::Descent:
      return "Descent";
    case CurveKind::Ascent:
      return "Ascent";
    case CurveKind::Level:
      return "Level";
  }
  return "?";
}

CurveClass classify_curve(const RadialCurve& c, double window) {
  if (!(window > 0)) throw std::invalid_argument("window must be positive");
  const KernelSpec k = KernelSpec::frobenius(3);
  const double base = loss_direct(k, c.evaluate(c.t0));
  const int n = 50;
  std::vector<double> s(n), delta(n);
  for (int i = 0; i < n; ++i) {
    // log grid over two decades ending at the window
    s[i] = window * std::pow(10.0, -2.0 + 2.0 * i / (n - 1));
    delta[i] = loss_direct(k, c.evaluate(c.t0 + s[i])) - base;
  }
  const double level_tol = 1e-13 * (1 + std::abs(base));
  CurveClass out;
  bool all_small = true;
  for (double x : delta) all_small = all_small && std::abs(x) <= level_tol;
  if (all_small) return out;
  const bool down = delta.back() < 0;
  for (int i = 0; i < n; ++i) {
    const bool ok = down ? delta[i] < 0 : delta[i] > 0;
    if (!ok) throw std::runtime_error("loss is not monotone along " + c.label() + " within the window");
    if (i > 0 && (down ? delta[i] > delta[i - 1] : delta[i] < delta[i - 1]))
      throw std::runtime_error("loss is not monotone along " + c.label() + " within the window");
  }
  out.kind = down ? CurveKind::Descent : CurveKind::Ascent;
  // slope on the lower decade, where the leading term dominates
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = n / 2;
  for (int i = 0; i < m; ++i) {
    const double x = std::log(s[i]), y = std::log(std::abs(delta[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.leading_order = static_cast<int>(std::lround(out.fitted_slope));
  return out;
}

std::optional<RadialCurve> descent_curve(const FamilySpec& spec, int d) {
  switch (spec.id) {
    case FamilyId::C5t:
      if (spec.t != 0.0 || d < 3) return std::nullopt;
      return curve(CurveName::Gamma1, d);
    case FamilyId::C0: {
      if (d < 3) return std::nullopt;
      RadialCurve c = curve(CurveName::Gamma2, d);
      c.t0 = -1.0;
      return c;
    }
    case FamilyId::Cblock:
      if (spec.block >= d) return std::nullopt;
      return curve(CurveName::GammaBlock, d, spec.block);
    default:
      return std::nullopt;
  }
}

int curve_certified_descents(const FamilySpec& spec, int d) {
  const auto c = descent_curve(spec, d);
  if (!c) return 0;
  const CurveClass cc = classify_curve(*c);
  return cc.kind == CurveKind::Descent && cc.leading_order >= 3 ? 1 : 0;
}

CurveConnections curve_connections(int d) {
  CurveConnections out;
  out.gamma1_to_identity_orbit = is_permutation_matrix(curve(CurveName::Gamma1, d).evaluate(1.0));
  out.gamma2_to_zero = curve(CurveName::Gamma2, d).evaluate(-1.0).isZero(0.0);
  const Matrix c5 = construct(FamilySpec::make(FamilyId::C5t), d).W;
  out.gamma3_to_c5_orbit = find_orbit_map(curve(CurveName::Gamma3, d).evaluate(1.0), c5, 1e-12).has_value();
  return out;
}

// ---------------------------------------------------------------- sphere minimisation

namespace {

// eta -> W = c + unvec(B eta), rows stacked; B is the identity in the ambient case and the
// fixed-point basis scaled by 1/sqrt(block size) otherwise, so |eta| is the Frobenius distance.
struct SphereObjective {
  const KernelSpec& k;
  Matrix c;
  bool ambient = true;
  Matrix B;
  int dim = 0;

  Matrix point(const Vector& eta) const {
    const int d = static_cast<int>(c.cols());
    Matrix W = c;
    const Vector v = ambient ? eta : Vector(B * eta);
    for (int i = 0; i < W.rows(); ++i)
      for (int a = 0; a < d; ++a) W(i, a) += v(i * d + a);
    return W;
  }

  Vector stack(const Matrix& G) const {
    const int d = static_cast<int>(G.cols());
    Vector v(G.size());
    for (int i = 0; i < G.rows(); ++i)
      for (int a = 0; a < d; ++a) v(i * d + a) = G(i, a);
    return ambient ? v : Vector(B.transpose() * v);
  }

  double value(const Vector& eta, Vector* grad) const {
    const Matrix W = point(eta);
    if (grad) *grad = stack(gradient(k, W));
    return loss(k, W);
  }

  Matrix hess(const Vector& eta) const {
    const Matrix H = hessian(k, point(eta));
    return ambient ? H : Matrix(B.transpose() * H * B);
  }
};

// Newton on the Lagrange system grad F(eta) = mu eta, |eta| = r.
Vector lagrange_polish(const SphereObjective& obj, Vector eta, double r) {
  const Eigen::Index n = eta.size();
  for (int it = 0; it < 20; ++it) {
    Vector g;
    obj.value(eta, &g);
    const double mu = eta.dot(g) / (r * r);
    Vector F(n + 1);
    F.head(n) = g - mu * eta;
    F(n) = 0.5 * (eta.squaredNorm() - r * r);
    if (F.head(n).norm() <= 1e-15 * (1 + g.norm())) break;
    Matrix J = Matrix::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = obj.hess(eta) - mu * Matrix::Identity(n, n);
    J.block(0, n, n, 1) = -eta;
    J.block(n, 0, 1, n) = eta.transpose();
    const Vector step = J.completeOrthogonalDecomposition().solve(-F);
    eta = (eta + step.head(n)).normalized() * r;
  }
  return eta;
}

}  // namespace

SphereMin sphere_min(const KernelSpec& k, const Matrix& c, const std::optional<PatternShape>& pattern, double r,
                     const SphereOptions& opt) {
  if (!(r > 0)) throw std::invalid_argument("radius must be positive");
  if (opt.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const int d = static_cast<int>(c.cols());
  SphereObjective obj{k, c, true, {}, 0};
  if (pattern) {
    const FixedPointSpace space{IsotropyPattern(*pattern, d)};
    if (!space.contains(c, 1e-12)) throw std::invalid_argument("centre is not in the fixed-point space");
    const auto g = space.block_sizes();
    obj.ambient = false;
    obj.dim = space.dim();
    obj.B = Matrix::Zero(c.size(), obj.dim);
    for (int j = 0; j < obj.dim; ++j) {
      const Matrix E = space.basis(j);
      for (int i = 0; i < E.rows(); ++i)
        for (int a = 0; a < d; ++a) obj.B(i * d + a, j) = E(i, a) / std::sqrt(g[static_cast<std::size_t>(j)]);
    }
  } else {
    obj.dim = static_cast<int>(c.size());
  }

  SphereMin best;
  best.value = std::numeric_limits<double>::infinity();
  Vector best_u;
  for (int rs = 0; rs < opt.restarts; ++rs) {
    std::seed_seq sq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                     static_cast<std::uint32_t>(rs)};
    std::mt19937_64 gen(sq);
    std::normal_distribution<double> nd;
    Vector u(obj.dim);
    for (int i = 0; i < obj.dim; ++i) u(i) = nd(gen);
    u.normalize();
    Vector grad;
    double f = obj.value(r * u, &grad);
    double step = 1e-2;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
      Vector gu = r * grad;
      Vector p = gu - gu.dot(u) * u;
      const double pn2 = p.squaredNorm();
      if (std::sqrt(pn2) <= 1e-15 * (1 + std::abs(f))) break;
      bool moved = false;
      while (step > 1e-30) {
        Vector un = (u - step * p).normalized();
        Vector gn;
        const double fn = obj.value(r * un, &gn);
        if (fn <= f - 1e-4 * step * pn2) {
          u = un;
          f = fn;
          grad = gn;
          moved = true;
          step *= 2;
          break;
        }
        step /= 2;
      }
      if (!moved) break;
    }
    if (f < best.value) {
      best.value = f;
      best_u = u;
      best.iterations = it;
    }
  }
  Vector eta = r * best_u;
  const Vector polished = lagrange_polish(obj, eta, r);
  const double fp = obj.value(polished, nullptr);
  if (fp <= best.value + 1e-13 * (1 + std::abs(best.value))) eta = polished;
  best.W = obj.point(eta);
  best.value = loss_direct(k, best.W);
  best.radial_residual = radial_residual(k, c, best.W);
  return best;
}

std::string saddle_verdict_name(SaddleVerdict v) {
  switch (v) {
    case SaddleVerdict::SaddleCertified:
      return "SaddleCertified";
    case SaddleVerdict::SaddleByIndex:
      return "SaddleByIndex";
    case SaddleVerdict::NotASaddle:
      return "NotASaddle";
    case SaddleVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "?";
}

std::vector<double> default_r_grid() { return {0.01, 0.0178, 0.0316, 0.0562, 0.1}; }

std::optional<double> fit_order(const std::vector<SphereRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& r : rows) {
    if (!(r.deficit > 0)) return std::nullopt;
    const double x = std::log(r.r), y = std::log(r.deficit);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::nullopt;
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

SaddleCertificate certify_saddle(const FamilySpec& spec, int d, const std::vector<double>& r_grid,
                                 const SphereOptions& opt) {
  SaddleCertificate cert;
  cert.family = spec.name();
  cert.d = d;
  const PolishedPoint p = construct(spec, d);
  cert.base_loss = p.loss;
  const SpectrumReport rep = spectrum(spec.kernel, p.W);
  cert.index = rep.index;
  if (rep.index > 0) {
    cert.verdict = SaddleVerdict::SaddleByIndex;
    return cert;
  }
  bool all_below = !r_grid.empty(), all_above = !r_grid.empty();
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    SphereOptions o = opt;
    o.seed = opt.seed * 1000003ULL + i;
    const SphereMin sm = sphere_min(spec.kernel, p.W, std::nullopt, r_grid[i], o);
    SphereRow row{r_grid[i], sm.value, p.loss - sm.value, sm.radial_residual};
    all_below = all_below && row.deficit > 1e-9;
    all_above = all_above && row.deficit < 0;
    cert.rows.push_back(row);
  }
  cert.fitted_order = fit_order(cert.rows);
  if (!cert.rows.empty()) cert.deficit_over_r3 = cert.rows.front().deficit / std::pow(cert.rows.front().r, 3);
  cert.verdict = all_below ? SaddleVerdict::SaddleCertified
                           : (all_above ? SaddleVerdict::NotASaddle : SaddleVerdict::Inconclusive);
  return cert;
}

}  // namespace symland
