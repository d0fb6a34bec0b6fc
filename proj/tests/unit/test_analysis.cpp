#include "helpers.hpp"

#include "analysis/families.hpp"
#include "analysis/radial.hpp"
#include "analysis/spectra.hpp"
#include "core/symbolic.hpp"

#include <doctest.h>

#include <cmath>

using namespace symland;
using testing_util::rel;

// ---------------------------------------------------------------- families

TEST_CASE("family names") {
  CHECK(FamilySpec::parse("C5").name() == "C5");
  CHECK(FamilySpec::parse("C5t:0.7").t == doctest::Approx(0.7));
  CHECK(FamilySpec::parse("Cblock:2").block == 2);
  CHECK(FamilySpec::parse("D_1").id == FamilyId::D1);
  CHECK_THROWS_AS(FamilySpec::parse("BogusName"), UnknownFamily);
  CHECK_THROWS_AS(FamilySpec::parse("Cblock:0"), UnknownFamily);
  CHECK(FamilySpec::parse("C3").min_d() == 4);
  CHECK(FamilySpec::parse("Cblock:3").min_d() == 4);
  CHECK_THROWS(construct(FamilySpec::parse("C4"), 2));
}

TEST_CASE("exact loss table, d = 3..8") {
  for (int d = 3; d <= 8; ++d) {
    const double x = d;
    CHECK(rel(construct(FamilySpec::parse("C0"), d).loss, x) <= 1e-9);
    CHECK(rel(construct(FamilySpec::parse("C1"), d).loss, x - 1 / x) <= 1e-9);
    CHECK(rel(construct(FamilySpec::parse("C4"), d).loss, 1.5) <= 1e-9);
    for (double t : {0.0, 0.7, -2.0, 1000.0})
      CHECK(rel(construct(FamilySpec::make(FamilyId::C5t, t), d).loss, 1.0) <= 1e-9);
    CHECK(std::abs(construct(FamilySpec::parse("CI"), d).loss) <= 1e-9);
    for (int i = 1; i < d; ++i) CHECK(rel(construct(FamilySpec::make(FamilyId::Cblock, 0, i), d).loss, i) <= 1e-9);
    CHECK(rel(construct(FamilySpec::parse("D0"), d).loss, 15 * x) <= 1e-9);
    CHECK(rel(construct(FamilySpec::parse("D1"), d).loss, 48 * x / 5 - 36.0 / 5 - 12 / (5 * x)) <= 1e-9);
    CHECK(std::abs(construct(FamilySpec::parse("DI"), d).loss) <= 1e-9);
  }
}

TEST_CASE("loss closed forms by exact evaluation of the restricted loss") {
  // C4 on DiagSd2: xi = (1, 0, 0, 0, 1/2, 1/2)
  const MPoly L4 = symbolic_restricted_loss(KernelSpec::frobenius(), PatternShape::parse("DiagSd2"));
  const std::vector<Rational> c4{1, 0, 0, 0, Rational(1, 2), Rational(1, 2)};
  // C1 on Full: xi = 1/d
  const MPoly L1 = symbolic_restricted_loss(KernelSpec::frobenius(), PatternShape::parse("Full"));
  for (int d = 3; d <= 12; ++d) {
    CHECK(L4.evaluate(c4, d) == Rational(3, 2));
    CHECK(L1.evaluate({Rational(1, d)}, d) == Rational(d) - Rational(1, d));
  }
}

TEST_CASE("catalog points are critical") {
  for (const auto& cat : {frobenius_catalog(), gauss_catalog()})
    for (const auto& f : cat)
      for (int d = std::max(3, f.min_d()); d <= 9; ++d) {
        const PolishedPoint p = construct(f, d);
        CHECK_MESSAGE(gradient(f.kernel, p.W).norm() <= criticality_bound(p.W), f.name() << " d=" << d);
      }
  for (double t : {0.7, -2.0})
    for (int d = 3; d <= 8; ++d) {
      const PolishedPoint p = construct(FamilySpec::make(FamilyId::C5t, t), d);
      CHECK(gradient(KernelSpec::frobenius(), p.W).norm() <= criticality_bound(p.W));
    }
}

TEST_CASE("loss formulas: exact and asymptotic verdicts") {
  CHECK(verify_loss_formula(FamilySpec::parse("C4"), {3, 4, 5, 6}).pass);
  const LossReport c3 = verify_loss_formula(FamilySpec::parse("C3"), {8, 16, 32});
  CHECK_FALSE(c3.exact);
  CHECK(c3.pass);
  const LossReport d2 = verify_loss_formula(FamilySpec::parse("D2"), {8, 16, 32});
  CHECK(d2.pass);
}

TEST_CASE("continuum sweep") {
  const auto rows = continuum_sweep({-2.0, -0.5, 0.0, 0.3, 0.7, 2.0, 10.0}, 5);
  for (const auto& r : rows) {
    CHECK(r.pass);
    CHECK(r.loss == doctest::Approx(1).epsilon(1e-10));
  }
}

TEST_CASE("Puiseux-seeded families polish to the restricted critical point") {
  for (const char* n : {"C2", "C3", "D2"})
    for (int d : {8, 12, 20}) {
      const PolishedPoint p = construct(FamilySpec::parse(n), d);
      CHECK(p.residual <= 1e-11 * (1 + p.xi.norm()));
      CHECK(p.newton_iterations <= 50);
    }
}

// ---------------------------------------------------------------- spectra

TEST_CASE("multiplicity budgets sum to d^2") {
  const MultPoly d2{Rational(0), Rational(0), Rational(1)};
  for (const char* n : {"CI", "C0", "C1", "C2", "C3", "C4", "C5", "D0", "D1", "DI", "D2"}) {
    const auto t = predicted_table(FamilySpec::parse(n));
    CHECK_MESSAGE(total_multiplicity(t) == d2, n);
    for (int d = std::max(FamilySpec::parse(n).min_d(), 3); d <= 64; ++d) {
      long total = 0;
      for (const auto& e : t.entries) {
        const long m = eval_mult(e.multiplicity, d);
        CHECK(m >= 0);
        total += m;
      }
      CHECK(total == static_cast<long>(d) * d);
      CHECK(predicted_values(t, d).size() == static_cast<std::size_t>(d * d));
    }
  }
  // y_d has negative dimension at d=2
  CHECK_THROWS_AS(predicted_values(predicted_table(FamilySpec::parse("CI")), 2), std::invalid_argument);
  CHECK_FALSE(has_prediction(FamilySpec::parse("Cblock:2")));
  CHECK_FALSE(has_prediction(FamilySpec::parse("C5t:0.7")));
}

TEST_CASE("clustering") {
  const auto c = cluster_eigenvalues({-1.0, 2.0, 2.0 + 1e-12, 2.0 - 1e-12, 7.0});
  REQUIRE(c.size() == 3);
  CHECK(c[0].value == doctest::Approx(7));
  CHECK(c[1].multiplicity == 3);
  CHECK(c[2].multiplicity == 1);
}

TEST_CASE("exact spectra, small d") {
  for (const char* n : {"CI", "C0", "C4", "C5", "D0"}) {
    const auto f = FamilySpec::parse(n);
    std::vector<int> ds;
    for (int d = std::max(3, f.min_d()); d <= 6; ++d) ds.push_back(d);
    CHECK_MESSAGE(compare(f, ds).verdict == SpectrumVerdict::ExactMatch, n);
  }
  CHECK(compare(FamilySpec::parse("C1"), {4, 5, 6}).verdict == SpectrumVerdict::ExactMatch);
}

TEST_CASE("C4 table against a finite-difference Hessian") {
  const int d = 5;
  const auto f = FamilySpec::parse("C4");
  const Matrix W = construct(f, d).W;
  const double h = 1e-5;
  Matrix H(d * d, d * d);
  for (int j = 0; j < d * d; ++j) {
    Matrix Wp = W, Wm = W;
    Wp(j / d, j % d) += h;
    Wm(j / d, j % d) -= h;
    const Matrix gd = (gradient(f.kernel, Wp) - gradient(f.kernel, Wm)) / (2 * h);
    for (int i = 0; i < d * d; ++i) H(i, j) = gd(i / d, i % d);
  }
  const Matrix Hs = 0.5 * (H + H.transpose());
  const auto ev = symmetric_eigenvalues(Hs);
  const auto pv = predicted_values(predicted_table(f), d);
  REQUIRE(ev.size() == pv.size());
  for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - pv[i]) <= 1e-5);
}

TEST_CASE("D_I spectrum is exact in d through its quadratic") {
  // roots of l^2 - (18d + 288) l + 1944 d + 7776, each d times; 36 with multiplicity d^2 - 2d
  for (int d = 4; d <= 10; ++d) {
    const auto rep = spectrum(KernelSpec::gauss(), Matrix::Identity(d, d));
    const double b = 18.0 * d + 288, c = 1944.0 * d + 7776;
    const double disc = std::sqrt(b * b - 4 * c);
    REQUIRE(rep.clusters.size() == 3);
    CHECK(rep.clusters[0].value == doctest::Approx((b + disc) / 2).epsilon(1e-12));
    CHECK(rep.clusters[0].multiplicity == d);
    CHECK(rep.clusters[1].value == doctest::Approx((b - disc) / 2).epsilon(1e-12));
    CHECK(rep.clusters[1].multiplicity == d);
    CHECK(rep.clusters[2].value == doctest::Approx(36).epsilon(1e-12));
    CHECK(rep.clusters[2].multiplicity == d * d - 2 * d);
    CHECK(rep.index == 0);
  }
}

TEST_CASE("asymptotic spectra, short ladders") {
  CHECK(compare(FamilySpec::parse("C2"), {8, 16}).verdict == SpectrumVerdict::AsymptoticConsistent);
  CHECK(compare(FamilySpec::parse("C3"), {8, 16}).verdict == SpectrumVerdict::AsymptoticConsistent);
  CHECK(compare(FamilySpec::parse("D1"), {8, 16}).verdict == SpectrumVerdict::AsymptoticConsistent);
  // the d = 8 -> 16 step is pre-asymptotic for D2 and D_I
  CHECK(compare(FamilySpec::parse("D2"), {8, 16}).verdict == SpectrumVerdict::Mismatch);
  CHECK(compare(FamilySpec::parse("DI"), {8, 16}).verdict == SpectrumVerdict::Mismatch);
}

TEST_CASE("frozen scaled deviations") {
  // frozen from the sorted matching at each d
  const auto d2 = compare(FamilySpec::parse("D2"), {8, 16});
  CHECK(d2.points[0].scaled_deviation == doctest::Approx(259.13).epsilon(1e-3));
  CHECK(d2.points[1].scaled_deviation == doctest::Approx(261.95).epsilon(1e-3));
  const auto c2 = compare(FamilySpec::parse("C2"), {8, 16});
  CHECK(c2.points[0].scaled_deviation == doctest::Approx(22.6).epsilon(5e-3));
  CHECK(c2.points[1].scaled_deviation == doctest::Approx(13.3).epsilon(5e-3));
}

TEST_CASE("spectrum cap") { CHECK_THROWS(spectrum(KernelSpec::frobenius(), Matrix::Identity(8, 8), 32)); }

TEST_CASE("index/value report") {
  const auto rows = index_value_report(frobenius_catalog(), 20, curve_certified_descents);
  bool saw_c3 = false, saw_ci = false;
  for (const auto& r : rows) {
    if (r.family == "C3") {
      saw_c3 = true;
      CHECK(std::abs(r.loss_over_d - r.index_over_d2) <= 0.3);
    }
    if (r.family == "CI") {
      saw_ci = true;
      CHECK(r.loss_over_d == 0);
      CHECK(r.index == 0);
    }
    if (r.family == "C5" || r.family == "C0") CHECK(r.higher_order_descents == 1);
  }
  CHECK(saw_c3);
  CHECK(saw_ci);
}

// ---------------------------------------------------------------- radial

TEST_CASE("radial residual") {
  const auto k = KernelSpec::frobenius();
  const Matrix c5 = construct(FamilySpec::parse("C5"), 4).W;
  CHECK(radial_residual(k, c5, curve(CurveName::Gamma1, 4).evaluate(0.3)) <= 1e-12);
  CHECK(radial_residual(k, c5, curve(CurveName::Gamma2, 4).evaluate(0.3)) <= 1e-12);
  std::mt19937_64 gen(99);
  int above = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = c5 + 0.05 * testing_util::random_matrix(gen, 4, 4);
    above += radial_residual(k, c5, x) > 1e-3;
  }
  CHECK(above >= 9);
  CHECK_THROWS_AS(radial_residual(k, c5, c5), std::invalid_argument);
}

TEST_CASE("catalog curves: residuals, closed forms, base points") {
  const auto k = KernelSpec::frobenius();
  for (int d = 3; d <= 6; ++d) {
    const Matrix c5 = construct(FamilySpec::parse("C5"), d).W;
    for (auto n : {CurveName::Gamma1, CurveName::Gamma2, CurveName::Gamma3}) {
      const auto c = curve(n, d);
      CHECK((c.evaluate(0) - c5).norm() == 0);
      for (int s = 1; s <= 50; ++s) {
        const double t = 0.5 * s / 50;
        CHECK(radial_residual(k, c5, c.evaluate(t)) <= 1e-10);
        CHECK(rel(loss_direct(k, c.evaluate(t)), c.loss_formula(t)) <= 1e-10);
      }
    }
    for (int i = 1; i < d; ++i) {
      const Matrix cb = construct(FamilySpec::make(FamilyId::Cblock, 0, i), d).W;
      const auto c = curve(CurveName::GammaBlock, d, i);
      CHECK((c.evaluate(0) - cb).norm() == 0);
      for (int s = 1; s <= 50; ++s) {
        const double t = 0.5 * s / 50;
        CHECK(radial_residual(k, cb, c.evaluate(t)) <= 1e-10);
        CHECK(rel(loss_direct(k, c.evaluate(t)), c.loss_formula(t)) <= 1e-10);
      }
    }
  }
  CHECK(curve(CurveName::Gamma1, 5).loss_formula(0.1) == doctest::Approx(0.998001));
  CHECK(curve(CurveName::Gamma2, 3).loss_formula(-1) == doctest::Approx(3));
  CHECK(loss_direct(k, curve(CurveName::GammaBlock, 5, 2).evaluate(0)) == doctest::Approx(2));
  CHECK_THROWS(curve(CurveName::GammaBlock, 5, 5));
  CHECK_THROWS(curve(CurveName::Gamma1, 2));
  CHECK_THROWS(parse_curve_name("Gamma9"));
}

TEST_CASE("curve classification") {
  const auto g1 = classify_curve(curve(CurveName::Gamma1, 5));
  CHECK(g1.kind == CurveKind::Descent);
  CHECK(g1.leading_order == 3);
  const auto g2 = classify_curve(curve(CurveName::Gamma2, 4));
  CHECK(g2.kind == CurveKind::Ascent);
  CHECK(g2.leading_order == 2);
  CHECK(classify_curve(curve(CurveName::Gamma3, 4)).kind == CurveKind::Level);
  const auto gb = classify_curve(curve(CurveName::GammaBlock, 6, 3));
  CHECK(gb.kind == CurveKind::Descent);
  CHECK(gb.leading_order == 3);
  // the window reaches past t = 1 where Gamma1 turns back up
  CHECK_THROWS(classify_curve(curve(CurveName::Gamma1, 4), 2.0));
  CHECK_THROWS(classify_curve(curve(CurveName::Gamma1, 4), 0.0));
}

TEST_CASE("curve connections") {
  for (int d = 3; d <= 7; ++d) CHECK(curve_connections(d).all());
}

TEST_CASE("isotropy along Gamma1") {
  for (int d = 3; d <= 5; ++d)
    for (double t : {0.2, 0.5, 0.9}) {
      const Matrix W = curve(CurveName::Gamma1, d).evaluate(t);
      CHECK(group_contains_pattern(isotropy_group(W, isotropy_tolerance(W)),
                                   IsotropyPattern(PatternShape::parse("DiagSd1"), d)));
    }
}

TEST_CASE("sphere minimisation") {
  const auto k = KernelSpec::frobenius();
  const Matrix c5 = construct(FamilySpec::parse("C5"), 4).W;
  const SphereMin m = sphere_min(k, c5, PatternShape::parse("DiagSd1"), 0.1);
  CHECK(m.value == doctest::Approx(0.998001).epsilon(1e-6));
  CHECK((m.W - curve(CurveName::Gamma1, 4).evaluate(0.1)).norm() <= 1e-6);
  CHECK(m.radial_residual <= 1e-6);

  SphereOptions few;
  few.restarts = 4;
  const SphereMin ci = sphere_min(k, Matrix::Identity(3, 3), std::nullopt, 0.05, few);
  CHECK(ci.value > 0);
  CHECK(ci.radial_residual <= 1e-6);
  const SphereMin c0 = sphere_min(k, Matrix::Zero(3, 3), std::nullopt, 0.1, few);
  CHECK(c0.value < 3);
  CHECK((c0.W).norm() == doctest::Approx(0.1).epsilon(1e-12));

  CHECK_THROWS(sphere_min(k, c5, std::nullopt, 0.0));
  Matrix off = c5;
  off(0, 1) += 0.1;
  CHECK_THROWS(sphere_min(k, off, PatternShape::parse("DiagSd1"), 0.1));
}

TEST_CASE("sphere minimisation is deterministic in the seed") {
  const auto k = KernelSpec::frobenius();
  SphereOptions o;
  o.restarts = 3;
  o.seed = 42;
  const Matrix c = Matrix::Zero(3, 3);
  const SphereMin a = sphere_min(k, c, std::nullopt, 0.05, o);
  const SphereMin b = sphere_min(k, c, std::nullopt, 0.05, o);
  CHECK(a.value == b.value);
  CHECK((a.W - b.W).norm() == 0);
}

TEST_CASE("order fitting") {
  std::vector<SphereRow> rows;
  for (double r : default_r_grid()) rows.push_back({r, 0, 2 * r * r * r, 0});
  REQUIRE(fit_order(rows).has_value());
  CHECK(*fit_order(rows) == doctest::Approx(3).epsilon(1e-12));
  rows[0].deficit = -1;
  CHECK_FALSE(fit_order(rows).has_value());
}

TEST_CASE("saddle certification, small cases") {
  SphereOptions o;
  o.restarts = 8;
  const auto c5 = certify_saddle(FamilySpec::parse("C5"), 3, default_r_grid(), o);
  CHECK(c5.verdict == SaddleVerdict::SaddleCertified);
  REQUIRE(c5.fitted_order.has_value());
  CHECK(std::abs(*c5.fitted_order - 3) <= 0.25);
  CHECK(c5.deficit_over_r3 == doctest::Approx(2).epsilon(1e-3));
  CHECK(certify_saddle(FamilySpec::parse("CI"), 3, {0.02, 0.05}, o).verdict == SaddleVerdict::NotASaddle);
  CHECK(certify_saddle(FamilySpec::parse("C1"), 4, {0.05}, o).verdict == SaddleVerdict::SaddleByIndex);
}
