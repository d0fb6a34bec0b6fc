#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace symland {

using Rational = mpq_class;

std::string rational_to_string(const Rational& q);
Rational parse_rational(const std::string& s);

// exponents of (x1, ..., xN, d); d is always the last slot
using Monomial = std::vector<unsigned>;

// graded lex, highest first
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class MPoly {
 public:
  using TermMap = std::map<Monomial, Rational, MonomialOrder>;

  MPoly() = default;
  explicit MPoly(std::size_t num_xi) : nx_(num_xi) {}

  static MPoly constant(std::size_t num_xi, const Rational& c);
  static MPoly xi(std::size_t num_xi, std::size_t i);  // 0-based
  static MPoly d(std::size_t num_xi);
  static MPoly parse(const std::string& text, std::size_t num_xi);

  std::size_t num_xi() const { return nx_; }
  std::size_t num_vars() const { return nx_ + 1; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Monomial& m, const Rational& c);

  MPoly& operator+=(const MPoly& o);
  MPoly& operator-=(const MPoly& o);
  MPoly& operator*=(const MPoly& o);
  MPoly& operator*=(const Rational& c);
  MPoly operator-() const;
  MPoly pow(unsigned e) const;

  MPoly differentiate(std::size_t var) const;
  // set the listed xi variables to zero
  MPoly zero_vars(const std::vector<std::size_t>& vars) const;
  // drop the listed xi variables from the variable list; they must not occur
  MPoly drop_vars(const std::vector<std::size_t>& vars) const;
  // substitute d by a rational number
  MPoly at_d(const Rational& dval) const;

  unsigned degree(std::size_t var) const;
  unsigned total_degree() const;

  Rational evaluate(const std::vector<Rational>& xi, const Rational& d) const;
  template <class T>
  T evaluate_as(const std::vector<T>& xi, T d) const;

  std::string to_string() const;

  bool operator==(const MPoly& o) const { return nx_ == o.nx_ && terms_ == o.terms_; }
  bool operator!=(const MPoly& o) const { return !(*this == o); }

 private:
  std::size_t nx_ = 0;
  TermMap terms_;
};

MPoly operator+(MPoly a, const MPoly& b);
MPoly operator-(MPoly a, const MPoly& b);
MPoly operator*(const MPoly& a, const MPoly& b);
MPoly operator*(MPoly a, const Rational& c);
MPoly operator*(const Rational& c, MPoly a);

// compiled form for repeated floating point evaluation
class NumericPoly {
 public:
  NumericPoly() = default;
  explicit NumericPoly(const MPoly& p);
  long double operator()(const std::vector<long double>& xi, long double d) const;

 private:
  std::size_t nvars_ = 0;
  std::vector<long double> coef_;
  std::vector<unsigned> exps_;  // row-major, nvars_ per term
};

template <class T>
T MPoly::evaluate_as(const std::vector<T>& xi, T dval) const {
  T acc = T(0);
  for (const auto& [m, c] : terms_) {
    T t = T(c.get_d());
    for (std::size_t v = 0; v < m.size(); ++v) {
      const T base = v < nx_ ? xi[v] : dval;
      for (unsigned k = 0; k < m[v]; ++k) t *= base;
    }
    acc += t;
  }
  return acc;
}

}  // namespace symland
