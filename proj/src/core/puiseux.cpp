#include "core/puiseux.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace symland {

// ---------------------------------------------------------------- coefficients

Coefficient Coefficient::rational(const Rational& q) {
  Coefficient c;
  c.exact = q;
  c.exact->canonicalize();
  c.value = q.get_d();
  return c;
}

Coefficient Coefficient::radical(int sign, const Rational& base, int root) {
  Coefficient c;
  c.sign = sign < 0 ? -1 : 1;
  c.base = base;
  c.root = root;
  c.value = c.sign * std::pow(base.get_d(), 1.0 / root);
  return c;
}

Coefficient Coefficient::real(double v) {
  Coefficient c;
  c.value = v;
  return c;
}

std::string Coefficient::to_string() const {
  if (exact) return rational_to_string(*exact);
  if (root > 0) return std::string(sign < 0 ? "-" : "") + "(" + rational_to_string(base) + ")^(1/" + std::to_string(root) + ")";
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

Coefficient Coefficient::parse(const std::string& s) {
  auto pos = s.find(")^(1/");
  if (pos != std::string::npos) {
    int sign = 1;
    std::size_t start = 0;
    if (s[0] == '-') {
      sign = -1;
      start = 1;
    }
    if (s[start] != '(') throw std::invalid_argument("bad radical: " + s);
    Rational base = parse_rational(s.substr(start + 1, pos - start - 1));
    int root = std::stoi(s.substr(pos + 5));
    return radical(sign, base, root);
  }
  if (s.find_first_of(".eE") != std::string::npos) return real(std::stod(s));
  return rational(parse_rational(s));
}

bool PuiseuxSeries::all_exact() const {
  return std::all_of(terms.begin(), terms.end(), [](const PuiseuxTerm& t) { return t.coef.is_exact(); });
}

long double PuiseuxSeries::evaluate(long double d) const {
  long double s = 0;
  for (const auto& t : terms) {
    const Rational& e = t.exp;
    long double num = static_cast<long double>(e.get_num().get_si());
    long double den = static_cast<long double>(e.get_den().get_si());
    s += static_cast<long double>(t.coef.exact ? t.coef.exact->get_d() : t.coef.value) * std::pow(d, num / den);
  }
  return s;
}

std::string PuiseuxSeries::to_string() const {
  if (terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += " + ";
    out += "(" + terms[i].coef.to_string() + ")*d^(" + rational_to_string(terms[i].exp) + ")";
  }
  return out;
}

// ---------------------------------------------------------------- univariate helpers

namespace {

using UPoly = std::vector<Rational>;  // low to high

void trim(UPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Rational ueval(const UPoly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

long double ueval_ld(const UPoly& p, long double x) {
  long double acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + static_cast<long double>(it->get_d());
  return acc;
}

UPoly uderiv(const UPoly& p) {
  UPoly r;
  for (std::size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<long>(i));
  trim(r);
  return r;
}

// remainder of a / b
UPoly urem(UPoly a, const UPoly& b) {
  trim(a);
  const int db = static_cast<int>(b.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
    Rational f = a.back() / b.back();
    const int shift = static_cast<int>(a.size()) - 1 - db;
    for (int i = 0; i <= db; ++i) a[i + shift] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

bool divisible(const UPoly& a, const UPoly& b) { return urem(a, b).empty(); }

int sign_of(const Rational& x) { return sgn(x); }

int variations(const std::vector<UPoly>& seq, const Rational& x) {
  int v = 0, last = 0;
  for (const auto& p : seq) {
    int s = sign_of(ueval(p, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

Rational best_rational(double x, long max_den) {
  // continued fraction convergents
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double y = x;
  Rational best = static_cast<long>(std::llround(x));
  for (int it = 0; it < 40; ++it) {
    double a = std::floor(y);
    if (std::abs(a) > 1e15) break;
    long ai = static_cast<long>(a);
    long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den || k2 <= 0) break;
    best = Rational(h2, k2);
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    double frac = y - a;
    if (std::abs(frac) < 1e-15) break;
    y = 1.0 / frac;
  }
  best.canonicalize();
  return best;
}

// Try to name the root exactly: rational root or sign * r^(1/k) with X^k - r dividing p.
Coefficient recognize(const UPoly& p, long double x) {
  Rational r = best_rational(static_cast<double>(x), 1000000);
  if (ueval(p, r) == 0) return Coefficient::rational(r);
  for (int k = 2; k <= 6; ++k) {
    long double y = std::pow(std::abs(x), static_cast<long double>(k));
    if (k % 2 && x < 0) y = -y;
    if (k % 2 == 0) y = std::pow(x, static_cast<long double>(k));
    Rational ry = best_rational(static_cast<double>(y), 1000000);
    UPoly b(k + 1, Rational(0));
    b[0] = -ry;
    b[k] = 1;
    if (divisible(p, b)) {
      if (k % 2) {
        // odd root: x = sign(ry) |ry|^(1/k)
        return Coefficient::radical(sgn(ry), abs(ry), k);
      }
      if (ry > 0) return Coefficient::radical(x < 0 ? -1 : 1, ry, k);
    }
  }
  return Coefficient::real(static_cast<double>(x));
}

}  // namespace

std::vector<Coefficient> real_roots(const std::vector<Rational>& poly_in) {
  UPoly p = poly_in;
  trim(p);
  if (p.size() <= 1) return {};
  std::vector<Coefficient> out;
  // factor out x = 0
  std::size_t low = 0;
  while (low < p.size() && p[low] == 0) ++low;
  if (low > 0) {
    out.push_back(Coefficient::rational(0));
    p.erase(p.begin(), p.begin() + static_cast<long>(low));
  }
  if (p.size() <= 1) return out;

  std::vector<UPoly> seq{p, uderiv(p)};
  while (seq.back().size() > 1) {
    UPoly r = urem(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    seq.push_back(r);
  }
  Rational bound = 0;
  for (const auto& c : p) bound = std::max(bound, Rational(abs(c / p.back())));
  bound += 1;

  std::vector<Rational> exact_hits;
  std::vector<std::pair<Rational, Rational>> isolated;
  std::function<void(Rational, Rational, int)> split = [&](Rational lo, Rational hi, int depth) {
    // roots in (lo, hi]
    const int n = variations(seq, lo) - variations(seq, hi);
    if (n <= 0) return;
    if (n == 1) {
      isolated.push_back({lo, hi});
      return;
    }
    if (depth > 200) throw std::runtime_error("root isolation did not converge");
    Rational mid = (lo + hi) / 2;
    split(lo, mid, depth + 1);
    split(mid, hi, depth + 1);
  };
  split(-bound, bound, 0);

  for (auto [lo, hi] : isolated) {
    if (ueval(p, hi) == 0) {
      exact_hits.push_back(hi);
      continue;
    }
    int slo = sign_of(ueval(p, lo));
    bool hit = false;
    for (int it = 0; it < 120; ++it) {
      Rational mid = (lo + hi) / 2;
      int sm = sign_of(ueval(p, mid));
      if (sm == 0) {
        exact_hits.push_back(mid);
        hit = true;
        break;
      }
      if (slo == 0 || sm == slo) {
        lo = mid;
        slo = sm;
      } else {
        hi = mid;
      }
    }
    if (hit) continue;
    long double x = static_cast<long double>(Rational((lo + hi) / 2).get_d());
    const UPoly dp = uderiv(p);
    for (int it = 0; it < 3; ++it) {
      long double f = ueval_ld(p, x), g = ueval_ld(dp, x);
      if (g == 0) break;
      long double nx = x - f / g;
      if (nx < static_cast<long double>(lo.get_d()) || nx > static_cast<long double>(hi.get_d())) break;
      x = nx;
    }
    out.push_back(recognize(p, x));
  }
  for (const auto& r : exact_hits) out.push_back(Coefficient::rational(r));
  std::sort(out.begin(), out.end(), [](const Coefficient& a, const Coefficient& b) { return a.value < b.value; });
  return out;
}

// ---------------------------------------------------------------- exact linear algebra

namespace {

struct Rref {
  std::size_t n = 0;
  std::vector<std::vector<Rational>> rows;  // augmented, last entry is rhs
  std::vector<std::size_t> pivots;

  // returns false if inconsistent
  bool add(std::vector<Rational> row) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Rational f = row[pivots[r]];
      if (f == 0) continue;
      for (std::size_t j = 0; j <= n; ++j) row[j] -= f * rows[r][j];
    }
    std::size_t piv = n;
    for (std::size_t j = 0; j < n; ++j)
      if (row[j] != 0) {
        piv = j;
        break;
      }
    if (piv == n) return row[n] == 0;
    const Rational inv = 1 / row[piv];
    for (auto& x : row) x *= inv;
    for (auto& other : rows) {
      const Rational f = other[piv];
      if (f == 0) continue;
      for (std::size_t j = 0; j <= n; ++j) other[j] -= f * row[j];
    }
    rows.push_back(std::move(row));
    pivots.push_back(piv);
    return true;
  }
  std::size_t rank() const { return rows.size(); }

  // particular solution (free vars 0) and nullspace basis
  void solution(std::vector<Rational>& x0, std::vector<std::vector<Rational>>& null) const {
    x0.assign(n, 0);
    std::vector<bool> is_piv(n, false);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      x0[pivots[r]] = rows[r][n];
      is_piv[pivots[r]] = true;
    }
    null.clear();
    for (std::size_t f = 0; f < n; ++f) {
      if (is_piv[f]) continue;
      std::vector<Rational> v(n, 0);
      v[f] = 1;
      for (std::size_t r = 0; r < rows.size(); ++r) v[pivots[r]] = -rows[r][f];
      null.push_back(std::move(v));
    }
  }
};

// Solve square system exactly; nullopt when singular.
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (A[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == n) return std::nullopt;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col] / A[col][col];
      for (std::size_t j = col; j < n; ++j) A[r][j] -= f * A[col][j];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return x;
}

Rational det_exact(std::vector<std::vector<Rational>> A) {
  const std::size_t n = A.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r)
      if (A[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(A[piv], A[col]);
      det = -det;
    }
    det *= A[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (A[r][col] == 0) continue;
      const Rational f = A[r][col] / A[col][col];
      for (std::size_t j = col; j < n; ++j) A[r][j] -= f * A[col][j];
    }
  }
  return det;
}

// Fourier-Motzkin: inequalities coef . t <= rhs
struct Ineq {
  std::vector<Rational> a;
  Rational b;
};

void normalize(Ineq& q) {
  Rational m = 0;
  for (const auto& x : q.a) m = std::max(m, Rational(abs(x)));
  if (m == 0) return;
  for (auto& x : q.a) x /= m;
  q.b /= m;
}

struct IneqLess {
  bool operator()(const Ineq& x, const Ineq& y) const {
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  }
};

// Projection of {t : A t <= b} onto coordinate j: returns false if empty. lo/hi unset if unbounded.
bool project_interval(std::vector<Ineq> sys, std::size_t m, std::size_t j, std::optional<Rational>& lo,
                      std::optional<Rational>& hi) {
  for (std::size_t v = 0; v < m; ++v) {
    if (v == j) continue;
    std::vector<Ineq> pos, neg;
    std::set<Ineq, IneqLess> next;
    for (auto& q : sys) {
      if (q.a[v] > 0) {
        pos.push_back(q);
      } else if (q.a[v] < 0) {
        neg.push_back(q);
      } else {
        normalize(q);
        next.insert(q);
      }
    }
    for (const auto& P : pos)
      for (const auto& N : neg) {
        Ineq c;
        const Rational fp = -N.a[v], fn = P.a[v];
        c.a.resize(m);
        for (std::size_t k = 0; k < m; ++k) c.a[k] = fp * P.a[k] + fn * N.a[k];
        c.b = fp * P.b + fn * N.b;
        c.a[v] = 0;
        normalize(c);
        next.insert(c);
        if (next.size() > 200000) throw std::runtime_error("exponent polyhedron too large to project");
      }
    sys.assign(next.begin(), next.end());
  }
  lo.reset();
  hi.reset();
  for (const auto& q : sys) {
    const Rational& c = q.a[j];
    if (c == 0) {
      if (q.b < 0) return false;
      continue;
    }
    const Rational bound = q.b / c;
    if (c > 0) {
      if (!hi || bound < *hi) hi = bound;
    } else {
      if (!lo || bound > *lo) lo = bound;
    }
  }
  if (lo && hi && *lo > *hi) return false;
  return true;
}

// Vertices of {t : a.t <= b}. Throws if the set is nonempty but contains a line.
std::vector<std::vector<Rational>> cell_vertices(std::vector<Ineq> sys, std::size_t m) {
  std::set<Ineq, IneqLess> uniq;
  for (auto& q : sys) {
    normalize(q);
    uniq.insert(q);
  }
  sys.assign(uniq.begin(), uniq.end());
  std::vector<std::vector<Rational>> out;
  std::set<std::vector<Rational>> seen;
  std::vector<std::size_t> pick;
  long visited = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == m) {
      if (++visited > 2000000) throw std::runtime_error("pair enumeration exceeds budget; system too large");
      std::vector<std::vector<Rational>> A;
      std::vector<Rational> b;
      for (auto i : pick) {
        A.push_back(sys[i].a);
        b.push_back(sys[i].b);
      }
      auto t = solve_exact(A, b);
      if (!t) return;
      for (const auto& q : sys) {
        Rational v = 0;
        for (std::size_t j = 0; j < m; ++j) v += q.a[j] * (*t)[j];
        if (v > q.b) return;
      }
      if (seen.insert(*t).second) out.push_back(*t);
      return;
    }
    for (std::size_t i = from; i < sys.size(); ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  if (out.empty()) {
    std::optional<Rational> lo, hi;
    if (project_interval(sys, m, 0, lo, hi))
      throw std::runtime_error("unbounded candidate set: a cell of the exponent arrangement contains a line");
  }
  return out;
}

struct LinForm {
  std::vector<Rational> a;
  Rational b;
  Rational at(const std::vector<Rational>& tau) const {
    Rational v = b;
    for (std::size_t i = 0; i < a.size(); ++i) v += a[i] * tau[i];
    return v;
  }
};

std::vector<std::vector<LinForm>> linear_forms(const std::vector<MPoly>& system, std::size_t n) {
  std::vector<std::vector<LinForm>> eqs;
  for (const auto& p : system) {
    if (p.num_xi() != n) throw std::invalid_argument("system arity mismatch");
    if (p.is_zero()) continue;
    std::vector<LinForm> forms;
    for (const auto& [m, c] : p.terms()) {
      LinForm f;
      for (std::size_t i = 0; i < n; ++i) f.a.push_back(m[i]);
      f.b = m[n];
      forms.push_back(std::move(f));
    }
    eqs.push_back(std::move(forms));
  }
  return eqs;
}

bool attained_twice(const std::vector<LinForm>& eq, const std::vector<Rational>& tau) {
  bool have = false;
  Rational best;
  int count = 0;
  for (const auto& f : eq) {
    Rational v = f.at(tau);
    if (!have || v > best) {
      best = v;
      count = 1;
      have = true;
    } else if (v == best) {
      ++count;
    }
  }
  return count >= 2;
}

}  // namespace

// ---------------------------------------------------------------- exponents

ExponentSearch leading_exponents(const std::vector<MPoly>& system) {
  if (system.empty()) throw std::invalid_argument("empty system");
  const std::size_t n = system.front().num_xi();
  const auto eqs = linear_forms(system, n);
  if (eqs.empty()) throw std::invalid_argument("system is identically zero");

  double budget = 1;
  for (const auto& e : eqs) budget *= 0.5 * e.size() * (e.size() - 1);
  if (budget > 5e7) throw std::runtime_error("pair enumeration exceeds budget; system too large");

  std::set<std::vector<Rational>> found;
  ExponentSearch out;
  std::set<std::vector<Rational>> flagged;

  auto accept = [&](const std::vector<Rational>& tau) {
    for (const auto& e : eqs)
      if (!attained_twice(e, tau)) return;
    for (const auto& t : tau)
      if (t.get_den() > 12) {
        flagged.insert(tau);
        return;
      }
    found.insert(tau);
  };

  std::vector<std::pair<std::size_t, std::size_t>> chosen(eqs.size());

  std::function<void(std::size_t, const Rref&)> dfs = [&](std::size_t k, const Rref& rr) {
    if (rr.rank() == n) {
      std::vector<Rational> x0;
      std::vector<std::vector<Rational>> null;
      rr.solution(x0, null);
      // the chosen pairs must be the maximal terms, otherwise x0 is not a vertex of their cell
      for (std::size_t e = 0; e < k; ++e) {
        const Rational top = eqs[e][chosen[e].first].at(x0);
        for (const auto& f : eqs[e])
          if (f.at(x0) > top) return;
      }
      accept(x0);
      return;
    }
    if (k == eqs.size()) {
      // positive-dimensional affine set: intersect with the max conditions
      std::vector<Rational> x0;
      std::vector<std::vector<Rational>> null;
      rr.solution(x0, null);
      const std::size_t m = null.size();
      std::vector<Ineq> sys;
      for (std::size_t e = 0; e < eqs.size(); ++e) {
        const LinForm& top = eqs[e][chosen[e].first];
        for (const auto& f : eqs[e]) {
          // f(tau) - top(tau) <= 0 with tau = x0 + sum t_j null_j
          Ineq q;
          q.a.assign(m, 0);
          Rational cst = f.at(x0) - top.at(x0);
          for (std::size_t j = 0; j < m; ++j) {
            Rational s = 0;
            for (std::size_t i = 0; i < n; ++i) s += (f.a[i] - top.a[i]) * null[j][i];
            q.a[j] = s;
          }
          q.b = -cst;
          bool trivial = std::all_of(q.a.begin(), q.a.end(), [](const Rational& x) { return x == 0; });
          if (trivial) {
            if (q.b < 0) return;
            continue;
          }
          sys.push_back(q);
        }
      }
      for (const auto& t : cell_vertices(sys, m)) {
        std::vector<Rational> tau = x0;
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t i = 0; i < n; ++i) tau[i] += t[j] * null[j][i];
        accept(tau);
      }
      return;
    }
    const auto& e = eqs[k];
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = i + 1; j < e.size(); ++j) {
        if (e[i].a == e[j].a) continue;
        std::vector<Rational> row(n + 1);
        for (std::size_t v = 0; v < n; ++v) row[v] = e[i].a[v] - e[j].a[v];
        row[n] = e[j].b - e[i].b;
        Rref next = rr;
        if (!next.add(row)) continue;
        chosen[k] = {i, j};
        dfs(k + 1, next);
      }
  };
  Rref start;
  start.n = n;
  dfs(0, start);
  out.candidates.assign(found.begin(), found.end());
  out.outside_lattice = static_cast<int>(flagged.size());
  return out;
}

// ---------------------------------------------------------------- leading coefficients

namespace {

using BiPoly = std::map<std::vector<int>, Rational>;  // exponent vector over A

std::vector<BiPoly> initial_forms(const std::vector<MPoly>& system, const ExponentCandidate& tau) {
  const std::size_t n = tau.size();
  std::vector<BiPoly> out;
  for (const auto& p : system) {
    if (p.is_zero()) continue;
    if (p.num_xi() != n) throw std::invalid_argument("tau length mismatch");
    bool have = false;
    Rational best;
    for (const auto& [m, c] : p.terms()) {
      Rational v = m[n];
      for (std::size_t i = 0; i < n; ++i) v += tau[i] * m[i];
      if (!have || v > best) {
        best = v;
        have = true;
      }
    }
    BiPoly f;
    for (const auto& [m, c] : p.terms()) {
      Rational v = m[n];
      for (std::size_t i = 0; i < n; ++i) v += tau[i] * m[i];
      if (v != best) continue;
      std::vector<int> e(m.begin(), m.begin() + static_cast<long>(n));
      f[e] += c;
    }
    // strip the monomial content (A_i != 0)
    std::vector<int> low(n, INT_MAX);
    for (const auto& [e, c] : f)
      for (std::size_t i = 0; i < n; ++i) low[i] = std::min(low[i], e[i]);
    BiPoly g;
    for (const auto& [e, c] : f) {
      if (c == 0) continue;
      std::vector<int> ee = e;
      for (std::size_t i = 0; i < n; ++i) ee[i] -= low[i];
      g[ee] += c;
    }
    out.push_back(g);
  }
  return out;
}

bool involves(const BiPoly& f, std::size_t var) {
  for (const auto& [e, c] : f)
    if (e[var] > 0) return true;
  return false;
}

// univariate in variable v after fixing the other to an exact rational
UPoly specialize(const BiPoly& f, std::size_t v, const std::vector<std::optional<Rational>>& fixed) {
  UPoly u;
  for (const auto& [e, c] : f) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i == v) continue;
      if (e[i] == 0) continue;
      if (!fixed[i]) throw std::logic_error("specialize: unfixed variable");
      for (int k = 0; k < e[i]; ++k) t *= *fixed[i];
    }
    if (static_cast<int>(u.size()) <= e[v]) u.resize(e[v] + 1, Rational(0));
    u[e[v]] += t;
  }
  trim(u);
  return u;
}

std::vector<long double> numeric_univariate(const BiPoly& f, std::size_t v, const std::vector<long double>& val) {
  std::vector<long double> u;
  for (const auto& [e, c] : f) {
    long double t = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i)
      if (i != v)
        for (int k = 0; k < e[i]; ++k) t *= val[i];
    if (static_cast<int>(u.size()) <= e[v]) u.resize(e[v] + 1, 0.0L);
    u[e[v]] += t;
  }
  return u;
}

std::vector<long double> numeric_real_roots(std::vector<long double> u) {
  long double scale = 0;
  for (auto x : u) scale = std::max(scale, std::abs(x));
  while (!u.empty() && std::abs(u.back()) <= 1e-14L * scale) u.pop_back();
  std::vector<long double> out;
  if (u.size() <= 1) return out;
  const int deg = static_cast<int>(u.size()) - 1;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) C(i, deg - 1) = static_cast<double>(-u[i] / u[deg]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
  for (int i = 0; i < deg; ++i) {
    auto z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
    long double x = z.real();
    for (int it = 0; it < 4; ++it) {
      long double f = 0, g = 0;
      for (int k = deg; k >= 0; --k) {
        g = g * x + f;
        f = f * x + u[k];
      }
      if (g == 0) break;
      x -= f / g;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](long double a, long double b) {
              return std::abs(a - b) <= 1e-9L * (1 + std::abs(a));
            }), out.end());
  return out;
}

long double bi_eval(const BiPoly& f, const std::vector<long double>& a, long double& mag) {
  long double s = 0;
  mag = 0;
  for (const auto& [e, c] : f) {
    long double t = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t *= a[i];
    s += t;
    mag += std::abs(t);
  }
  return s;
}

// Res_{A_y}(P, Q) as a polynomial in A_x
UPoly resultant(const BiPoly& P, const BiPoly& Q, std::size_t x, std::size_t y) {
  auto degs = [&](const BiPoly& f, std::size_t v) {
    int m = 0;
    for (const auto& [e, c] : f) m = std::max(m, e[v]);
    return m;
  };
  const int m = degs(P, y), n = degs(Q, y);
  const int bound = n * degs(P, x) + m * degs(Q, x);
  auto coeffs_at = [&](const BiPoly& f, int deg, const Rational& xv) {
    std::vector<Rational> c(deg + 1, Rational(0));
    for (const auto& [e, cf] : f) {
      Rational t = cf;
      for (int k = 0; k < e[x]; ++k) t *= xv;
      c[e[y]] += t;
    }
    return c;  // low to high in A_y
  };
  std::vector<Rational> xs, vals;
  for (int i = 0; i <= bound; ++i) {
    Rational xv = i;
    auto p = coeffs_at(P, m, xv), q = coeffs_at(Q, n, xv);
    const int N = m + n;
    std::vector<std::vector<Rational>> S(N, std::vector<Rational>(N, Rational(0)));
    for (int r = 0; r < n; ++r)
      for (int k = 0; k <= m; ++k) S[r][r + k] = p[m - k];
    for (int r = 0; r < m; ++r)
      for (int k = 0; k <= n; ++k) S[n + r][r + k] = q[n - k];
    xs.push_back(xv);
    vals.push_back(det_exact(S));
  }
  // Newton interpolation
  const std::size_t K = xs.size();
  std::vector<Rational> dd = vals;
  for (std::size_t j = 1; j < K; ++j)
    for (std::size_t i = K - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
      if (i == j) break;
    }
  UPoly out(1, dd[K - 1]);
  for (std::size_t jj = K - 1; jj-- > 0;) {
    // out = out * (X - xs[jj]) + dd[jj]
    UPoly nxt(out.size() + 1, Rational(0));
    for (std::size_t k = 0; k < out.size(); ++k) {
      nxt[k + 1] += out[k];
      nxt[k] -= out[k] * xs[jj];
    }
    nxt[0] += dd[jj];
    out = nxt;
  }
  trim(out);
  return out;
}

}  // namespace

std::vector<std::vector<Coefficient>> leading_coefficients(const std::vector<MPoly>& system,
                                                           const ExponentCandidate& tau) {
  const std::size_t n = tau.size();
  auto forms = initial_forms(system, tau);
  if (forms.empty()) throw std::invalid_argument("no nonzero equations");
  std::vector<std::vector<Coefficient>> sols;

  auto verify = [&](const std::vector<Coefficient>& A) {
    std::vector<long double> a;
    for (const auto& c : A) a.push_back(c.value);
    for (const auto& f : forms) {
      long double mag;
      long double v = bi_eval(f, a, mag);
      if (std::abs(v) > 1e-8L * (1 + mag)) return false;
    }
    for (auto x : a)
      if (x == 0) return false;
    return true;
  };

  if (n == 1) {
    std::vector<std::optional<Rational>> fixed(1);
    const UPoly u = specialize(forms.front(), 0, fixed);
    for (const auto& r : real_roots(u)) {
      if (r.value == 0) continue;
      std::vector<Coefficient> A{r};
      if (verify(A)) sols.push_back(A);
    }
    return sols;
  }
  if (n != 2) throw std::runtime_error("leading coefficient solver supports at most two unknowns");

  // pick the first-solved variable: an equation in one variable if any, else the resultant
  std::size_t x = 0, y = 1;
  UPoly ux;
  bool found_uni = false;
  for (const auto& f : forms)
    for (std::size_t v = 0; v < 2 && !found_uni; ++v)
      if (!involves(f, 1 - v) && involves(f, v)) {
        x = v;
        y = 1 - v;
        std::vector<std::optional<Rational>> fixed(2);
        ux = specialize(f, v, fixed);
        found_uni = true;
      }
  if (!found_uni) {
    if (forms.size() < 2) throw std::runtime_error("underdetermined leading system");
    ux = resultant(forms[0], forms[1], 0, 1);
    x = 0;
    y = 1;
    if (ux.empty()) throw std::runtime_error("degenerate leading system (common factor)");
  }
  for (const auto& rx : real_roots(ux)) {
    if (rx.value == 0) continue;
    // solve for y from the equations involving y
    std::vector<Coefficient> ys;
    bool got = false;
    for (const auto& f : forms) {
      if (!involves(f, y)) continue;
      if (rx.exact) {
        std::vector<std::optional<Rational>> fixed(2);
        fixed[x] = *rx.exact;
        UPoly uy = specialize(f, y, fixed);
        if (uy.empty()) continue;
        ys = real_roots(uy);
      } else {
        std::vector<long double> val(2, 0.0L);
        val[x] = rx.value;
        for (auto r : numeric_real_roots(numeric_univariate(f, y, val))) {
          Coefficient c = Coefficient::real(static_cast<double>(r));
          if (rx.root > 0) {
            // y = ratio * x with a small rational ratio keeps the radical form
            const Rational ratio = best_rational(static_cast<double>(r / val[x]), 1000);
            if (ratio != 0 && std::abs(static_cast<double>(r) - ratio.get_d() * rx.value) <= 1e-12 * (1 + std::abs(rx.value))) {
              Rational b = rx.base;
              Rational ar = abs(ratio);
              for (int k = 0; k < rx.root; ++k) b *= ar;
              c = Coefficient::radical(sgn(ratio) * rx.sign, b, rx.root);
            }
          }
          ys.push_back(c);
        }
      }
      got = true;
      break;
    }
    if (!got) continue;
    for (const auto& ry : ys) {
      if (ry.value == 0) continue;
      std::vector<Coefficient> A(2);
      A[x] = rx;
      A[y] = ry;
      if (verify(A)) sols.push_back(A);
    }
  }
  return sols;
}

// ---------------------------------------------------------------- series extension

namespace {

template <class T>
struct Num;

template <>
struct Num<Rational> {
  static bool zero(const Rational& x) { return x == 0; }
  static Rational from(const Coefficient& c) { return *c.exact; }
  static Rational from_q(const Rational& q) { return q; }
  static double dbl(const Rational& x) { return x.get_d(); }
  static Coefficient coef(const Rational& x) { return Coefficient::rational(x); }
  static std::optional<std::vector<Rational>> solve(const std::vector<std::vector<Rational>>& A,
                                                    const std::vector<Rational>& b) {
    return solve_exact(A, b);
  }
};

template <>
struct Num<double> {
  static bool zero(double x) { return std::abs(x) <= 1e-10; }
  static double from(const Coefficient& c) { return c.value; }
  static double from_q(const Rational& q) { return q.get_d(); }
  static double dbl(double x) { return x; }
  static Coefficient coef(double x) { return Coefficient::real(x); }
  static std::optional<std::vector<double>> solve(const std::vector<std::vector<double>>& A,
                                                  const std::vector<double>& b) {
    const int n = static_cast<int>(b.size());
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      v(i) = b[i];
      for (int j = 0; j < n; ++j) M(i, j) = A[i][j];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (n == 0 || s(n - 1) <= 1e-10 * s(0)) return std::nullopt;
    Eigen::VectorXd x = svd.solve(v);
    return std::vector<double>(x.data(), x.data() + n);
  }
};

template <class T>
using Laurent = std::map<int, T>;

template <class T>
void add_into(Laurent<T>& a, const Laurent<T>& b, const T& scale, int shift) {
  for (const auto& [k, v] : b) {
    auto& slot = a[k + shift];
    slot += scale * v;
  }
}

template <class T>
void clean(Laurent<T>& a) {
  for (auto it = a.begin(); it != a.end();) {
    if (Num<T>::zero(it->second)) {
      it = a.erase(it);
    } else {
      ++it;
    }
  }
}

template <class T>
Laurent<T> mul(const Laurent<T>& a, const Laurent<T>& b) {
  Laurent<T> r;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) r[i + j] += x * y;
  clean(r);
  return r;
}

template <class T>
int val(const Laurent<T>& a) {
  return a.empty() ? INT_MAX : a.begin()->first;
}

template <class T>
T coeff_at(const Laurent<T>& a, int k) {
  auto it = a.find(k);
  return it == a.end() ? T(0) : it->second;
}

template <class T>
struct Evaluator {
  const std::vector<MPoly>* sys;
  std::vector<std::vector<MPoly>> jac;
  int q = 1;

  Evaluator(const std::vector<MPoly>& s, int qq) : sys(&s), q(qq) {
    const std::size_t n = s.empty() ? 0 : s.front().num_xi();
    for (const auto& p : s) {
      std::vector<MPoly> row;
      for (std::size_t i = 0; i < n; ++i) row.push_back(p.differentiate(i));
      jac.push_back(std::move(row));
    }
  }

  Laurent<T> eval(const MPoly& p, std::vector<std::vector<Laurent<T>>>& pw, const std::vector<Laurent<T>>& xi) const {
    Laurent<T> out;
    const std::size_t n = xi.size();
    for (const auto& [m, c] : p.terms()) {
      Laurent<T> t;
      t[0] = T(1);
      for (std::size_t i = 0; i < n; ++i) {
        if (m[i] == 0) continue;
        while (pw[i].size() <= m[i]) {
          if (pw[i].empty()) {
            Laurent<T> one;
            one[0] = T(1);
            pw[i].push_back(one);
          } else {
            pw[i].push_back(mul(pw[i].back(), xi[i]));
          }
        }
        t = mul(t, pw[i][m[i]]);
        if (t.empty()) break;
      }
      if (t.empty()) continue;
      add_into(out, t, Num<T>::from_q(c), -q * static_cast<int>(m[n]));
    }
    clean(out);
    return out;
  }

  void analyze(const std::vector<Laurent<T>>& xi, std::vector<Laurent<T>>& R,
               std::vector<std::vector<Laurent<T>>>& J) const {
    std::vector<std::vector<Laurent<T>>> pw(xi.size());
    R.clear();
    J.clear();
    for (std::size_t k = 0; k < sys->size(); ++k) {
      R.push_back(eval((*sys)[k], pw, xi));
      std::vector<Laurent<T>> row;
      for (const auto& dp : jac[k]) row.push_back(eval(dp, pw, xi));
      J.push_back(std::move(row));
    }
  }
};

// One linearized correction at precisions p. Returns corrections or nullopt if inadmissible.
template <class T>
std::optional<std::vector<T>> linear_step(const std::vector<Laurent<T>>& R, const std::vector<std::vector<Laurent<T>>>& J,
                                          const std::vector<int>& p, std::vector<int>& c) {
  const std::size_t n = p.size();
  c.assign(R.size(), INT_MAX);
  for (std::size_t k = 0; k < R.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = val(J[k][i]);
      if (v != INT_MAX) c[k] = std::min(c[k], p[i] + v);
    }
    if (c[k] == INT_MAX) return std::nullopt;
    if (val(R[k]) < c[k]) return std::nullopt;
  }
  std::vector<std::vector<T>> L(R.size(), std::vector<T>(n, T(0)));
  std::vector<T> rhs(R.size());
  for (std::size_t k = 0; k < R.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) L[k][i] = coeff_at(J[k][i], c[k] - p[i]);
    rhs[k] = -coeff_at(R[k], c[k]);
  }
  return Num<T>::solve(L, rhs);
}


template <class T>
SeriesExtension extend_impl(const std::vector<MPoly>& red, const std::vector<PuiseuxSeries>& seed_free, int q, int depth) {
  const std::size_t n = seed_free.size();
  Evaluator<T> ev(red, q);

  std::vector<Laurent<T>> full(n);
  std::vector<std::vector<int>> orders(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& t : seed_free[i].terms) {
      Rational o = -t.exp * q;
      if (o.get_den() != 1) throw std::logic_error("seed exponent not on the lattice");
      const int oi = static_cast<int>(o.get_num().get_si());
      full[i][oi] = Num<T>::from(t.coef);
      orders[i].push_back(oi);
    }

  // candidate precisions per variable, in order of preference
  const int top = depth * q + 1;
  std::vector<std::vector<int>> cand(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (orders[i].empty()) {
      for (int pp = -q; pp <= top; ++pp) cand[i].push_back(pp);
    } else {
      std::vector<int> o = orders[i];
      std::sort(o.rbegin(), o.rend());
      for (int oi : o) cand[i].push_back(oi + 1);
    }
  }

  auto truncated = [&](const std::vector<int>& p) {
    std::vector<Laurent<T>> xi(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& [k, v] : full[i])
        if (k < p[i]) xi[i][k] = v;
    return xi;
  };

  std::vector<int> p(n);
  std::vector<Laurent<T>> xi;
  bool chosen = false;
  long tried = 0;
  std::vector<std::size_t> idx(n, 0);
  std::vector<Laurent<T>> R;
  std::vector<std::vector<Laurent<T>>> J;
  while (!chosen) {
    for (std::size_t i = 0; i < n; ++i) p[i] = cand[i][idx[i]];
    xi = truncated(p);
    ev.analyze(xi, R, J);
    bool all_zero = std::all_of(R.begin(), R.end(), [](const Laurent<T>& r) { return r.empty(); });
    if (all_zero) {
      chosen = true;
      break;
    }
    std::vector<int> c;
    auto x = linear_step<T>(R, J, p, c);
    if (x) {
      auto trial = xi;
      for (std::size_t i = 0; i < n; ++i)
        if (!Num<T>::zero((*x)[i])) trial[i][p[i]] = (*x)[i];
      std::vector<Laurent<T>> R2;
      std::vector<std::vector<Laurent<T>>> J2;
      ev.analyze(trial, R2, J2);
      bool ok = true;
      for (std::size_t k = 0; k < R2.size(); ++k) ok = ok && val(R2[k]) > c[k];
      if (ok) {
        chosen = true;
        break;
      }
    }
    if (++tried > 5000) break;
    // next combination
    std::size_t pos = 0;
    while (pos < n) {
      if (++idx[pos] < cand[pos].size()) break;
      idx[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  if (!chosen) throw std::runtime_error("stalled residual: no admissible precision choice for the seed");

  SeriesExtension out;
  out.q = q;
  while (true) {
    ev.analyze(xi, R, J);
    bool all_zero = std::all_of(R.begin(), R.end(), [](const Laurent<T>& r) { return r.empty(); });
    if (all_zero) {
      out.exact_solution = true;
      break;
    }
    if (*std::min_element(p.begin(), p.end()) > depth * q) break;
    std::vector<int> c;
    auto x = linear_step<T>(R, J, p, c);
    if (!x) throw std::runtime_error("stalled residual: singular or inconsistent correction system");
    for (std::size_t i = 0; i < n; ++i) {
      if (!Num<T>::zero((*x)[i])) xi[i][p[i]] = (*x)[i];
      ++p[i];
    }
    std::vector<Laurent<T>> R2;
    std::vector<std::vector<Laurent<T>>> J2;
    ev.analyze(xi, R2, J2);
    int rmin = INT_MAX;
    for (std::size_t k = 0; k < R2.size(); ++k) {
      if (val(R2[k]) <= c[k]) throw std::runtime_error("stalled residual: correction failed to cancel");
      rmin = std::min(rmin, val(R2[k]));
    }
    if (rmin == INT_MAX) {
      out.residual_orders.push_back(Rational(INT_MIN));
    } else {
      out.residual_orders.push_back(Rational(-rmin, q));
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    PuiseuxSeries s;
    for (const auto& [k, v] : xi[i]) {
      if (k > depth * q || Num<T>::zero(v)) continue;
      Rational e(-k, q);
      e.canonicalize();
      s.terms.push_back({e, Num<T>::coef(v)});
    }
    out.series.push_back(std::move(s));
  }
  out.rational = std::is_same_v<T, Rational>;
  return out;
}

long lcm_den(const std::vector<PuiseuxSeries>& s) {
  long q = 1;
  for (const auto& ser : s)
    for (const auto& t : ser.terms) q = std::lcm(q, t.exp.get_den().get_si());
  return q;
}

}  // namespace

std::vector<std::size_t> invariant_zero_variables(const std::vector<MPoly>& system,
                                                  const std::vector<PuiseuxSeries>& seed) {
  const std::size_t n = seed.size();
  if (system.size() != n) return {};
  std::vector<std::size_t> z;
  for (std::size_t i = 0; i < n; ++i)
    if (seed[i].is_zero()) z.push_back(i);
  const std::size_t m = z.size();
  if (m == 0 || m > 12) return {};
  std::vector<std::size_t> best;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> P;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (1u << j)) P.push_back(z[j]);
    if (P.size() <= best.size()) continue;
    if (P.size() == n) continue;
    bool ok = true;
    for (auto i : P) ok = ok && system[i].zero_vars(P).is_zero();
    if (ok) best = P;
  }
  return best;
}

namespace {

struct Reduced {
  std::vector<MPoly> sys;
  std::vector<std::size_t> free;
  std::vector<std::size_t> pinned;
};

Reduced reduce(const std::vector<MPoly>& system, const std::vector<PuiseuxSeries>& seed) {
  Reduced r;
  r.pinned = invariant_zero_variables(system, seed);
  std::vector<bool> is_pinned(seed.size(), false);
  for (auto i : r.pinned) is_pinned[i] = true;
  for (std::size_t i = 0; i < seed.size(); ++i)
    if (!is_pinned[i]) r.free.push_back(i);
  for (std::size_t k = 0; k < system.size(); ++k) {
    if (k < is_pinned.size() && is_pinned[k]) continue;
    r.sys.push_back(system[k].zero_vars(r.pinned).drop_vars(r.pinned));
  }
  return r;
}

}  // namespace

SeriesExtension extend_series(const std::vector<MPoly>& system, const std::vector<PuiseuxSeries>& seed, int depth) {
  if (system.empty()) throw std::invalid_argument("empty system");
  if (seed.size() != system.front().num_xi()) throw std::invalid_argument("seed length must equal number of unknowns");
  if (depth < 0) throw std::invalid_argument("depth must be nonnegative");
  const Reduced r = reduce(system, seed);
  std::vector<PuiseuxSeries> free_seed;
  for (auto i : r.free) free_seed.push_back(seed[i]);
  const int q = static_cast<int>(lcm_den(free_seed));
  bool exact = std::all_of(free_seed.begin(), free_seed.end(), [](const PuiseuxSeries& s) { return s.all_exact(); });
  SeriesExtension part = exact ? extend_impl<Rational>(r.sys, free_seed, q, depth)
                               : extend_impl<double>(r.sys, free_seed, q, depth);
  SeriesExtension out = part;
  out.series.assign(seed.size(), PuiseuxSeries::zero());
  for (std::size_t j = 0; j < r.free.size(); ++j) out.series[r.free[j]] = part.series[j];
  out.pinned = r.pinned;
  return out;
}

Eigen::VectorXd seed_to_numeric(const std::vector<PuiseuxSeries>& series, int d) {
  if (d < 1) throw std::invalid_argument("d must be positive");
  Eigen::VectorXd x(static_cast<Eigen::Index>(series.size()));
  for (std::size_t i = 0; i < series.size(); ++i) x(static_cast<Eigen::Index>(i)) = static_cast<double>(series[i].evaluate(d));
  return x;
}

bool jacobian_nonsingular_check(const std::vector<MPoly>& system, const std::vector<PuiseuxSeries>& series,
                                const std::vector<int>& keep) {
  if (keep.size() != series.size()) throw std::invalid_argument("keep length mismatch");
  const Reduced r = reduce(system, series);
  std::vector<PuiseuxSeries> fs;
  std::vector<int> fk;
  for (auto i : r.free) {
    fs.push_back(series[i]);
    fk.push_back(keep[i]);
  }
  const int q = static_cast<int>(lcm_den(fs));
  const std::size_t n = fs.size();
  // double arithmetic is enough for a singular value test
  Evaluator<double> ev(r.sys, q);
  std::vector<Laurent<double>> xi(n);
  std::vector<int> p(n);
  int maxorder = 0;
  for (const auto& s : fs)
    for (const auto& t : s.terms) {
      Rational o = -t.exp * q;
      maxorder = std::max(maxorder, static_cast<int>(o.get_num().get_si()));
    }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& terms = fs[i].terms;
    const int kp = std::max(0, fk[i]);
    for (int j = 0; j < kp && j < static_cast<int>(terms.size()); ++j) {
      Rational o = -terms[j].exp * q;
      xi[i][static_cast<int>(o.get_num().get_si())] = terms[j].coef.value;
    }
    if (kp < static_cast<int>(terms.size())) {
      Rational o = -terms[kp].exp * q;
      p[i] = static_cast<int>(o.get_num().get_si());
    } else {
      p[i] = (terms.empty() ? maxorder : static_cast<int>(Rational(-terms.back().exp * q).get_num().get_si())) + 1;
    }
  }
  std::vector<Laurent<double>> R;
  std::vector<std::vector<Laurent<double>>> J;
  ev.analyze(xi, R, J);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(R.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < R.size(); ++k) {
    int c = INT_MAX;
    for (std::size_t i = 0; i < n; ++i) {
      const int v = val(J[k][i]);
      if (v != INT_MAX) c = std::min(c, p[i] + v);
    }
    if (c == INT_MAX || val(R[k]) < c) return false;
    for (std::size_t i = 0; i < n; ++i) L(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = coeff_at(J[k][i], c - p[i]);
  }
  if (L.rows() != L.cols() || L.rows() == 0) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > 1e-8 * s(0);
}

}  // namespace symland
