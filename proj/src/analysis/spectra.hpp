#pragma once

#include "analysis/families.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace symland {

enum class SpectrumVerdict { ExactMatch, AsymptoticConsistent, Mismatch };
std::string verdict_name(SpectrumVerdict v);

struct Cluster {
  double value = 0.0;
  long multiplicity = 0;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;  // ascending
  std::vector<Cluster> clusters;    // descending by value
  double loss = 0.0;
  long index = 0;
  long nullity = 0;
  double tol = 0.0;
};

// Default cap on k*d (Hessian side length).
inline constexpr int kDefaultHessianCap = 16384;

std::vector<double> symmetric_eigenvalues(Matrix A);
std::vector<Cluster> cluster_eigenvalues(const std::vector<double>& ascending);
SpectrumReport spectrum(const KernelSpec& k, const Matrix& W, int cap = kDefaultHessianCap);

enum class PredictionOrder { Exact, InvD, InvD23 };
std::string order_name(PredictionOrder o);

// multiplicity c0 + c1 d + c2 d^2
using MultPoly = std::array<Rational, 3>;

struct PredictedEntry {
  std::string component;
  std::string expr;
  std::function<double(double)> value;
  MultPoly multiplicity;
};

struct PredictedTable {
  std::string family;
  PredictionOrder order = PredictionOrder::Exact;
  std::vector<PredictedEntry> entries;
};

bool has_prediction(const FamilySpec& spec);
PredictedTable predicted_table(const FamilySpec& spec);
long eval_mult(const MultPoly& m, int d);
// sum of the multiplicity polynomials, as coefficients
MultPoly total_multiplicity(const PredictedTable& t);

// Expanded multiset (ascending) at d; entries with equal value are merged in clusters().
std::vector<double> predicted_values(const PredictedTable& t, int d);
std::vector<Cluster> predicted_clusters(const PredictedTable& t, int d);

struct ClusterRow {
  double value = 0.0;
  long multiplicity = 0;
  double predicted = 0.0;
  double deviation = 0.0;
};

struct LadderPoint {
  int d = 0;
  double loss = 0.0;
  long index = 0;
  double max_deviation = 0.0;
  double scaled_deviation = 0.0;
  std::vector<ClusterRow> rows;
};

struct Comparison {
  std::string family;
  PredictionOrder order = PredictionOrder::Exact;
  std::vector<LadderPoint> points;
  SpectrumVerdict verdict = SpectrumVerdict::Mismatch;
  std::string note;
};

// Sorted matching of eigenvalues against the expanded prediction at one d.
LadderPoint match_prediction(const SpectrumReport& rep, const PredictedTable& t, int d);
// Exact tables: multisets to 1e-8 relative. Asymptotic: scaled deviation strictly decreasing,
// or ExactMatch if every point already matches to 1e-8.
Comparison compare(const FamilySpec& spec, const std::vector<int>& d_ladder, int cap = kDefaultHessianCap);

struct IndexValueRow {
  std::string family;
  int d = 0;
  double loss_over_d = 0.0;
  double index_over_d2 = 0.0;
  long index = 0;
  int higher_order_descents = 0;
};

using DescentCounter = std::function<int(const FamilySpec&, int)>;
std::vector<IndexValueRow> index_value_report(const std::vector<FamilySpec>& families, int d,
                                              const DescentCounter& descents = nullptr);

}  // namespace symland
