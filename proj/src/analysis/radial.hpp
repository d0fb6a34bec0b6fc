#pragma once

#include "analysis/families.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symland {

// max |g_i x_j - g_j x_i| / (|x| (1 + |W|^3)) with g = grad(W), x = W - c.
// Zero when g and x are parallel, including g = 0.
double radial_residual(const KernelSpec& k, const Matrix& c, const Matrix& W);

enum class CurveName { Gamma1, Gamma2, Gamma3, GammaBlock };

struct RadialCurve {
  CurveName name = CurveName::Gamma1;
  int d = 3;
  int block = 1;     // GammaBlock only
  double t0 = 0.0;   // base parameter; the curve leaves evaluate(t0)

  Matrix evaluate(double t) const;
  double loss_formula(double t) const;
  std::string label() const;
};

RadialCurve curve(CurveName name, int d, int block = 1);
CurveName parse_curve_name(const std::string& s);

enum class CurveKind { Descent, Ascent, Level };
std::string curve_kind_name(CurveKind k);

struct CurveClass {
  CurveKind kind = CurveKind::Level;
  int leading_order = 0;  // 0 for Level
  double fitted_slope = 0.0;
};

// Monotonicity of loss(t0 + s) - loss(t0) for s in (0, window]; throws if not monotone.
CurveClass classify_curve(const RadialCurve& c, double window = 0.1);

// Catalog descent curve leaving the family's base point, if one is known.
std::optional<RadialCurve> descent_curve(const FamilySpec& spec, int d);

// 1 when the family's catalog descent curve classifies as Descent of order >= 3, else 0.
int curve_certified_descents(const FamilySpec& spec, int d);

struct CurveConnections {
  bool gamma1_to_identity_orbit = false;  // Gamma1(1) is a permutation matrix
  bool gamma2_to_zero = false;            // Gamma2(-1) = C0
  bool gamma3_to_c5_orbit = false;        // Gamma3(1) on the orbit of C5
  bool all() const { return gamma1_to_identity_orbit && gamma2_to_zero && gamma3_to_c5_orbit; }
};
CurveConnections curve_connections(int d);

struct SphereMin {
  Matrix W;
  double value = 0.0;
  double radial_residual = 0.0;
  int iterations = 0;
};

struct SphereOptions {
  int restarts = 16;
  int max_iter = 10000;
  std::uint64_t seed = 1;
};

// Projected gradient descent on the sphere of radius r about c; restricted to the
// fixed-point space of `pattern` when given (c must lie in it).
SphereMin sphere_min(const KernelSpec& k, const Matrix& c, const std::optional<PatternShape>& pattern, double r,
                     const SphereOptions& opt = {});

enum class SaddleVerdict { SaddleCertified, SaddleByIndex, NotASaddle, Inconclusive };
std::string saddle_verdict_name(SaddleVerdict v);

struct SphereRow {
  double r = 0.0;
  double sphere_value = 0.0;
  double deficit = 0.0;  // loss(c) - sphere_value
  double radial_residual = 0.0;
};

struct SaddleCertificate {
  std::string family;
  int d = 0;
  long index = 0;
  double base_loss = 0.0;
  std::vector<SphereRow> rows;
  std::optional<double> fitted_order;
  double deficit_over_r3 = 0.0;  // at the smallest radius
  SaddleVerdict verdict = SaddleVerdict::Inconclusive;
};

std::vector<double> default_r_grid();  // one decade, 0.01 .. 0.1
// least-squares slope of log(deficit) against log(r)
std::optional<double> fit_order(const std::vector<SphereRow>& rows);

SaddleCertificate certify_saddle(const FamilySpec& spec, int d, const std::vector<double>& r_grid,
                                 const SphereOptions& opt = {});

}  // namespace symland
