#pragma once

#include "core/mpoly.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace symland {

// A real coefficient, kept exact when it is rational or a real radical sign * base^(1/root).
struct Coefficient {
  double value = 0.0;
  std::optional<Rational> exact;
  int root = 0;
  int sign = 1;
  Rational base;

  static Coefficient rational(const Rational& q);
  static Coefficient radical(int sign, const Rational& base, int root);
  static Coefficient real(double v);
  static Coefficient parse(const std::string& s);
  bool is_exact() const { return exact.has_value(); }
  std::string to_string() const;
};

struct PuiseuxTerm {
  Rational exp;  // power of d
  Coefficient coef;
};

struct PuiseuxSeries {
  std::vector<PuiseuxTerm> terms;  // strictly decreasing exponents

  static PuiseuxSeries zero() { return {}; }
  static PuiseuxSeries monomial(const Rational& exp, const Coefficient& c) { return {{{exp, c}}}; }
  bool is_zero() const { return terms.empty(); }
  bool all_exact() const;
  long double evaluate(long double d) const;
  std::string to_string() const;
};

using ExponentCandidate = std::vector<Rational>;

struct ExponentSearch {
  std::vector<ExponentCandidate> candidates;
  int outside_lattice = 0;  // vertex solutions dropped for denominators > 12
};

// Tropical enumeration of tau with the per-equation maximum attained at least twice.
// Positive-dimensional cells contribute their vertices. Throws std::runtime_error when a
// cell contains a whole line, or if the pair enumeration exceeds the internal budget.
ExponentSearch leading_exponents(const std::vector<MPoly>& system);

// Real solutions A (all A_i != 0) of the leading-term cancellation system at tau.
// Empty result means no real branch.
std::vector<std::vector<Coefficient>> leading_coefficients(const std::vector<MPoly>& system,
                                                           const ExponentCandidate& tau);

struct SeriesExtension {
  std::vector<PuiseuxSeries> series;
  std::vector<std::size_t> pinned;        // variables held at zero (invariant subspace)
  int q = 1;                              // d = s^{-q}
  std::vector<Rational> residual_orders;  // leading d-exponent of the residual after each step
  bool exact_solution = false;            // residual vanished identically
  bool rational = true;
};

// Extends seed series until every free series is known through d^{-depth}.
SeriesExtension extend_series(const std::vector<MPoly>& system, const std::vector<PuiseuxSeries>& seed, int depth);

Eigen::VectorXd seed_to_numeric(const std::vector<PuiseuxSeries>& series, int d);

// keep[i] = number of leading terms of series i treated as known. True iff the corrected
// system's Jacobian at s = 0 is nonsingular (sigma_min > 1e-8 sigma_max).
bool jacobian_nonsingular_check(const std::vector<MPoly>& system, const std::vector<PuiseuxSeries>& series,
                                const std::vector<int>& keep);

// Variables of a zero seed whose own equations vanish identically once they are set to zero.
std::vector<std::size_t> invariant_zero_variables(const std::vector<MPoly>& system,
                                                  const std::vector<PuiseuxSeries>& seed);

// real roots of a univariate rational polynomial (coefficients low to high)
std::vector<Coefficient> real_roots(const std::vector<Rational>& poly);

}  // namespace symland
