#pragma once

#include "core/calculus.hpp"
#include "core/puiseux.hpp"
#include "core/symmetry.hpp"
#include "core/tensor_core.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace symland {

enum class FamilyId { CI, C0, C1, C2, C3, C4, C5t, Cblock, D0, D1, DI, D2 };
enum class Construction { Exact, PuiseuxSeed };

struct FamilySpec {
  FamilyId id = FamilyId::CI;
  double t = 0.0;  // C5t only
  int block = 0;   // Cblock only
  KernelSpec kernel;
  PatternShape pattern;
  Construction construction = Construction::Exact;

  // "CI", "C0".."C4", "C5", "C5t:0.7", "Cblock:2", "D0", "D1", "DI", "D2"
  static FamilySpec parse(const std::string& name);
  static FamilySpec make(FamilyId id, double t = 0.0, int block = 0);
  std::string name() const;
  int min_d() const;
  bool frobenius() const { return kernel.kind == KernelKind::Frobenius; }
};

class UnknownFamily : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(const std::string& what, double residual) : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct PolishedPoint {
  Matrix W;
  Vector xi;
  double residual = 0.0;  // norm of the restricted gradient at xi
  double loss = 0.0;
  int newton_iterations = 0;
};

std::vector<FamilySpec> frobenius_catalog();
std::vector<FamilySpec> gauss_catalog();

// Puiseux series of the seeded families, extended to the given depth.
std::vector<PuiseuxSeries> family_series(const FamilySpec& spec, int depth = 4);

PolishedPoint construct(const FamilySpec& spec, int d);

struct NewtonResult {
  Vector xi;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Least-squares Newton on the restricted critical equations with halving backtracking.
NewtonResult newton_polish(const KernelSpec& k, const PatternShape& shape, int d, const Vector& seed,
                           int max_iter = 50);

struct LossCheck {
  int d = 0;
  double loss = 0.0;
  double formula = 0.0;
  double deviation = 0.0;  // |loss - formula|, relative for exact families
  bool pass = false;
};

struct LossReport {
  std::string family;
  bool exact = true;
  std::vector<LossCheck> rows;
  bool pass = false;
};

// Closed-form (exact) or leading-order (asymptotic) loss from the tables.
double loss_formula(const FamilySpec& spec, int d);
bool loss_formula_exact(const FamilySpec& spec);
LossReport verify_loss_formula(const FamilySpec& spec, const std::vector<int>& d_list);

struct SweepRow {
  double t = 0.0;
  double residual = 0.0;  // full gradient norm
  double loss = 0.0;
  bool pass = false;
};
std::vector<SweepRow> continuum_sweep(const std::vector<double>& t_grid, int d);

// Full-gradient criticality bound 1e-10 (1 + |W|^3).
double criticality_bound(const Matrix& W);

}  // namespace symland
