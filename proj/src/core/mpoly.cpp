#include "core/mpoly.hpp"

#include <cctype>
#include <numeric>
#include <stdexcept>

namespace symland {

std::string rational_to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rational(const std::string& s) {
  std::string t;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  if (t.empty()) throw std::invalid_argument("empty rational");
  if (t[0] == '+') t.erase(0, 1);
  Rational q;
  if (q.set_str(t, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  const unsigned da = std::accumulate(a.begin(), a.end(), 0u);
  const unsigned db = std::accumulate(b.begin(), b.end(), 0u);
  if (da != db) return da > db;
  return a > b;
}

MPoly MPoly::constant(std::size_t n, const Rational& c) {
  MPoly p(n);
  p.add_term(Monomial(n + 1, 0), c);
  return p;
}

MPoly MPoly::xi(std::size_t n, std::size_t i) {
  if (i >= n) throw std::out_of_range("xi index");
  MPoly p(n);
  Monomial m(n + 1, 0);
  m[i] = 1;
  p.add_term(m, 1);
  return p;
}

MPoly MPoly::d(std::size_t n) {
  MPoly p(n);
  Monomial m(n + 1, 0);
  m[n] = 1;
  p.add_term(m, 1);
  return p;
}

void MPoly::add_term(const Monomial& m, const Rational& c) {
  if (m.size() != nx_ + 1) throw std::invalid_argument("monomial arity");
  if (c == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

MPoly& MPoly::operator+=(const MPoly& o) {
  if (o.nx_ != nx_) throw std::invalid_argument("MPoly arity mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MPoly& MPoly::operator-=(const MPoly& o) {
  if (o.nx_ != nx_) throw std::invalid_argument("MPoly arity mismatch");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

MPoly& MPoly::operator*=(const MPoly& o) {
  *this = *this * o;
  return *this;
}

MPoly& MPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& kv : terms_) kv.second *= c;
  return *this;
}

MPoly MPoly::operator-() const {
  MPoly r = *this;
  for (auto& kv : r.terms_) kv.second = -kv.second;
  return r;
}

MPoly MPoly::pow(unsigned e) const {
  MPoly r = constant(nx_, 1);
  MPoly b = *this;
  while (e) {
    if (e & 1u) r *= b;
    e >>= 1u;
    if (e) b *= b;
  }
  return r;
}

MPoly MPoly::differentiate(std::size_t var) const {
  if (var > nx_) throw std::out_of_range("variable index");
  MPoly r(nx_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial mm = m;
    mm[var] -= 1;
    r.add_term(mm, c * m[var]);
  }
  return r;
}

MPoly MPoly::zero_vars(const std::vector<std::size_t>& vars) const {
  MPoly r(nx_);
  for (const auto& [m, c] : terms_) {
    bool keep = true;
    for (auto v : vars)
      if (m.at(v) != 0) keep = false;
    if (keep) r.add_term(m, c);
  }
  return r;
}

MPoly MPoly::drop_vars(const std::vector<std::size_t>& vars) const {
  std::vector<bool> drop(nx_, false);
  for (auto v : vars) drop.at(v) = true;
  std::size_t kept = 0;
  for (bool b : drop) kept += b ? 0 : 1;
  MPoly r(kept);
  for (const auto& [m, c] : terms_) {
    Monomial mm;
    for (std::size_t v = 0; v < nx_; ++v) {
      if (drop[v]) {
        if (m[v] != 0) throw std::invalid_argument("dropping a variable that occurs");
      } else {
        mm.push_back(m[v]);
      }
    }
    mm.push_back(m[nx_]);
    r.add_term(mm, c);
  }
  return r;
}

MPoly MPoly::at_d(const Rational& dval) const {
  MPoly r(nx_);
  for (const auto& [m, c] : terms_) {
    Monomial mm = m;
    Rational f = c;
    for (unsigned k = 0; k < m[nx_]; ++k) f *= dval;
    mm[nx_] = 0;
    r.add_term(mm, f);
  }
  return r;
}

unsigned MPoly::degree(std::size_t var) const {
  unsigned deg = 0;
  for (const auto& kv : terms_) deg = std::max(deg, kv.first.at(var));
  return deg;
}

unsigned MPoly::total_degree() const {
  unsigned deg = 0;
  for (const auto& kv : terms_)
    deg = std::max(deg, std::accumulate(kv.first.begin(), kv.first.end(), 0u));
  return deg;
}

Rational MPoly::evaluate(const std::vector<Rational>& xi, const Rational& dval) const {
  if (xi.size() != nx_) throw std::invalid_argument("evaluate: arity");
  Rational acc = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (std::size_t v = 0; v <= nx_; ++v) {
      const Rational& base = v < nx_ ? xi[v] : dval;
      for (unsigned k = 0; k < m[v]; ++k) t *= base;
    }
    acc += t;
  }
  return acc;
}

std::string MPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const bool neg = c < 0;
    Rational a = neg ? Rational(-c) : c;
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t v = 0; v <= nx_; ++v) {
      if (m[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += v < nx_ ? "x" + std::to_string(v + 1) : std::string("d");
      if (m[v] > 1) mono += "^" + std::to_string(m[v]);
    }
    if (mono.empty()) {
      out += rational_to_string(a);
    } else if (a == 1) {
      out += mono;
    } else {
      out += rational_to_string(a) + "*" + mono;
    }
  }
  return out;
}

namespace {

struct Parser {
  const std::string& s;
  std::size_t nx;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("MPoly::parse: " + what + " at offset " + std::to_string(pos));
  }
  unsigned read_uint() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) fail("expected integer");
    return static_cast<unsigned>(std::stoul(s.substr(start, pos - start)));
  }
  // one factor: number, number/number, xK, d, each optionally ^k
  void factor(Monomial& m, Rational& c) {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    char ch = s[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos < s.size() && s[pos] == '/') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
      Rational q = parse_rational(s.substr(start, pos - start));
      skip();
      unsigned e = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        e = read_uint();
      }
      for (unsigned k = 0; k < e; ++k) c *= q;
      return;
    }
    std::size_t var;
    if (ch == 'd') {
      ++pos;
      var = nx;
    } else if (ch == 'x') {
      ++pos;
      unsigned idx = read_uint();
      if (idx == 0 || idx > nx) fail("variable out of range");
      var = idx - 1;
    } else {
      fail(std::string("unexpected '") + ch + "'");
    }
    skip();
    unsigned e = 1;
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      e = read_uint();
    }
    m[var] += e;
  }

  MPoly run() {
    MPoly p(nx);
    skip();
    if (pos < s.size() && s.compare(pos, std::string::npos, "0") == 0) return p;
    bool first = true;
    while (true) {
      skip();
      if (pos >= s.size()) break;
      int sign = 1;
      if (s[pos] == '+' || s[pos] == '-') {
        sign = s[pos] == '-' ? -1 : 1;
        ++pos;
      } else if (!first) {
        fail("expected + or -");
      }
      first = false;
      Monomial m(nx + 1, 0);
      Rational c = sign;
      factor(m, c);
      while (true) {
        skip();
        if (pos < s.size() && s[pos] == '*') {
          ++pos;
          factor(m, c);
        } else {
          break;
        }
      }
      p.add_term(m, c);
    }
    if (first) fail("empty polynomial");
    return p;
  }
};

}  // namespace

MPoly MPoly::parse(const std::string& text, std::size_t num_xi) {
  Parser ps{text, num_xi};
  return ps.run();
}

MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }

MPoly operator*(const MPoly& a, const MPoly& b) {
  if (a.num_xi() != b.num_xi()) throw std::invalid_argument("MPoly arity mismatch");
  MPoly r(a.num_xi());
  Monomial m(a.num_vars());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      for (std::size_t v = 0; v < m.size(); ++v) m[v] = ma[v] + mb[v];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

MPoly operator*(MPoly a, const Rational& c) { return a *= c; }
MPoly operator*(const Rational& c, MPoly a) { return a *= c; }

NumericPoly::NumericPoly(const MPoly& p) : nvars_(p.num_vars()) {
  for (const auto& [m, c] : p.terms()) {
    // long double keeps large-d cancellation in check
    const Rational& q = c;
    long double num = mpz_get_d(q.get_num_mpz_t());
    long double den = mpz_get_d(q.get_den_mpz_t());
    coef_.push_back(num / den);
    exps_.insert(exps_.end(), m.begin(), m.end());
  }
}

long double NumericPoly::operator()(const std::vector<long double>& xi, long double dval) const {
  long double acc = 0;
  const std::size_t nx = nvars_ - 1;
  for (std::size_t t = 0; t < coef_.size(); ++t) {
    long double v = coef_[t];
    const unsigned* e = &exps_[t * nvars_];
    for (std::size_t k = 0; k < nvars_; ++k) {
      const long double base = k < nx ? xi[k] : dval;
      for (unsigned j = 0; j < e[k]; ++j) v *= base;
    }
    acc += v;
  }
  return acc;
}

}  // namespace symland
