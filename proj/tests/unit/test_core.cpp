#include "helpers.hpp"

#include "core/calculus.hpp"
#include "core/symmetry.hpp"
#include "core/tensor_core.hpp"

#include <doctest.h>

#include <cmath>

using namespace symland;
using testing_util::random_matrix;
using testing_util::random_perm;
using testing_util::rel;

namespace {

// E[<S, x^3>^2] summed over all index pairs with Gaussian moments; d^6 terms, tiny d only.
double gaussian_norm_by_moments(const DenseSymTensor& S) {
  const int d = S.dim();
  double acc = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            for (int o = 0; o < d; ++o) {
              std::vector<int> r(static_cast<std::size_t>(d), 0);
              for (int idx : {i, j, l, m, n, o}) ++r[static_cast<std::size_t>(idx)];
              acc += S.at(i, j, l) * S.at(m, n, o) * gaussian_moment(r);
            }
  return acc;
}

}  // namespace

TEST_CASE("gaussian moments") {
  CHECK(gaussian_moment({2}) == doctest::Approx(1));
  CHECK(gaussian_moment({4}) == doctest::Approx(3));
  CHECK(gaussian_moment({6}) == doctest::Approx(15));
  CHECK(gaussian_moment({3}) == 0);
  CHECK(gaussian_moment({2, 2}) == doctest::Approx(1));
  CHECK(gaussian_moment({4, 2}) == doctest::Approx(3));
}

TEST_CASE("kernel constants") {
  CHECK(KernelSpec::frobenius(3).target_constant(5) == doctest::Approx(5));
  CHECK(KernelSpec::gauss().target_constant(5) == doctest::Approx(75));
  CHECK(KernelSpec::parse("gauss") == KernelSpec::gauss());
  CHECK_THROWS(KernelSpec::parse("cubic"));
}

TEST_CASE("simple losses") {
  const int d = 5;
  const Matrix I = Matrix::Identity(d, d);
  CHECK(loss(KernelSpec::frobenius(), I) == doctest::Approx(0).epsilon(1e-14));
  CHECK(loss(KernelSpec::gauss(), I) == doctest::Approx(0).epsilon(1e-14));
  CHECK(loss(KernelSpec::frobenius(), Matrix::Zero(d, d)) == doctest::Approx(d));
  CHECK(loss(KernelSpec::gauss(), Matrix::Zero(d, d)) == doctest::Approx(15 * d));
  Matrix C5 = I;
  C5(d - 1, d - 1) = 0;
  CHECK(loss(KernelSpec::frobenius(), C5) == doctest::Approx(1));
}

TEST_CASE("permutation matrices are zero-loss under both kernels") {
  std::mt19937_64 gen(11);
  for (int d = 2; d <= 8; ++d) {
    const auto p = random_perm(gen, d);
    Matrix P = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) P(i, p[static_cast<std::size_t>(i)]) = 1;
    CHECK(is_permutation_matrix(P));
    CHECK(std::abs(loss(KernelSpec::frobenius(), P)) <= 1e-12);
    CHECK(std::abs(loss(KernelSpec::gauss(), P)) <= 1e-12);
  }
}

TEST_CASE("kernel loss agrees with the dense tensor oracle") {
  std::mt19937_64 gen(5);
  for (int d = 2; d <= 8; ++d)
    for (int rep = 0; rep < 3; ++rep) {
      const Matrix W = random_matrix(gen, d, d, 0.7);
      for (const auto& k : {KernelSpec::frobenius(), KernelSpec::gauss()}) {
        const double a = loss(k, W);
        const double b = loss_dense_oracle(k, W);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
        CHECK(std::abs(loss_direct(k, W) - b) <= 1e-10 * std::max(1.0, std::abs(b)));
      }
    }
}

TEST_CASE("gaussian norm formula against the moment sum") {
  std::mt19937_64 gen(17);
  for (int d = 2; d <= 3; ++d) {
    const Matrix W = random_matrix(gen, 2, d);
    const DenseSymTensor S = DenseSymTensor::from_rows(W);
    CHECK(rel(S.gaussian_norm_sq(), gaussian_norm_by_moments(S)) <= 1e-12);
  }
}

TEST_CASE("Frobenius kernel of other orders") {
  // order 2: |W^T W - I|_F^2
  std::mt19937_64 gen(3);
  const Matrix W = random_matrix(gen, 4, 4);
  const Matrix M = W.transpose() * W - Matrix::Identity(4, 4);
  CHECK(rel(loss(KernelSpec::frobenius(2), W), M.squaredNorm()) <= 1e-12);
}

TEST_CASE("invariance and equivariance on random pairs") {
  std::mt19937_64 gen(2024);
  const int d = 4;
  for (const auto& k : {KernelSpec::frobenius(), KernelSpec::gauss()}) {
    double worst_loss = 0, worst_grad = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix W = random_matrix(gen, d, d);
      const PermPair s{random_perm(gen, d), random_perm(gen, d)};
      const Matrix sW = act(s, W);
      worst_loss = std::max(worst_loss, std::abs(loss(k, sW) - loss(k, W)) / (1 + std::abs(loss(k, W))));
      const Matrix g1 = gradient(k, sW), g2 = act(s, gradient(k, W));
      worst_grad = std::max(worst_grad, (g1 - g2).norm() / (1 + g2.norm()));
    }
    CHECK(worst_loss <= 1e-10);
    CHECK(worst_grad <= 1e-10);
  }
}

TEST_CASE("finite-difference checks") {
  std::mt19937_64 gen(8);
  for (const auto& k : {KernelSpec::frobenius(), KernelSpec::gauss()})
    for (int d : {2, 3, 4}) {
      const Matrix W = random_matrix(gen, d, d, 0.6);
      const FdCheck g = fd_check_gradient(k, W);
      const FdCheck h = fd_check_hessian(k, W);
      CHECK(g.passed);
      CHECK(g.max_error <= 1e-5);
      CHECK(h.passed);
      CHECK(h.max_error <= 1e-4);
    }
}

TEST_CASE("Hessian is symmetric and equivariant under the stacked permutation") {
  std::mt19937_64 gen(21);
  const int d = 3;
  const Matrix W = random_matrix(gen, d, d);
  const PermPair s{random_perm(gen, d), random_perm(gen, d)};
  for (const auto& k : {KernelSpec::frobenius(), KernelSpec::gauss()}) {
    const Matrix H = hessian(k, W);
    CHECK((H - H.transpose()).norm() <= 1e-12 * (1 + H.norm()));
    const Matrix Hs = hessian(k, act(s, W));
    const auto p = stacked_permutation(s, d);
    double worst = 0;
    for (int a = 0; a < d * d; ++a)
      for (int b = 0; b < d * d; ++b)
        worst = std::max(worst, std::abs(Hs(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)]) - H(a, b)));
    CHECK(worst <= 1e-10 * (1 + H.norm()));
  }
}

TEST_CASE("eigenpair critical points") {
  // orthogonal target reduction: scaled eigenvectors of the identity target are critical
  const int d = 4;
  std::vector<Vector> v{Vector::Unit(d, 0), Vector::Unit(d, 1)};
  const Matrix W = eigenpair_critical_point(v, {1.0, 1.0}, 3, d);
  CHECK(gradient(KernelSpec::frobenius(), W).norm() <= 1e-12);
  CHECK(loss(KernelSpec::frobenius(), W) == doctest::Approx(2));
  // T(w, w) = lambda w for w = 2 e_0 gives lambda = 2 and the rescaled row e_0
  const Matrix W2 = eigenpair_critical_point({Vector::Unit(d, 0) * 2.0}, {2.0}, 3, d);
  CHECK((W2.row(0).transpose() - Vector::Unit(d, 0)).norm() <= 1e-14);
  std::vector<Vector> bad{Vector::Unit(d, 0), Vector::Ones(d)};
  CHECK_THROWS_AS(eigenpair_critical_point(bad, {1.0, 1.0}, 3, d), std::invalid_argument);
}

TEST_CASE("isotropy and orbit lengths") {
  const int d = 4;
  const Matrix I = Matrix::Identity(d, d);
  CHECK(orbit_length(I) == 24);
  CHECK(orbit_length(Matrix::Zero(d, d)) == 1);
  Matrix C5 = I;
  C5(3, 3) = 0;
  // Delta(S_3 x S_1) with the free zero-row/zero-column swap
  const auto g = isotropy_group(C5, isotropy_tolerance(C5));
  CHECK(group_contains_pattern(g, IsotropyPattern(PatternShape::parse("DiagSd1"), d)));
  CHECK(g.size() * orbit_length(C5) == 24ull * 24ull);
  Matrix perm = Matrix::Zero(d, d);
  perm(0, 1) = perm(1, 0) = perm(2, 3) = perm(3, 2) = 1;
  const auto m = find_orbit_map(I, perm, 1e-12);
  REQUIRE(m.has_value());
  CHECK((act(*m, I) - perm).norm() <= 1e-12);
}

TEST_CASE("fixed-point space basis, embedding and restricted gradient") {
  const int d = 5;
  const FixedPointSpace sp{IsotropyPattern(PatternShape::parse("DiagSd1"), d)};
  REQUIRE(sp.dim() == 5);
  const auto g = sp.block_sizes();
  CHECK(g[0] == 4);   // diag of class 0
  CHECK(g[1] == 12);  // off-diagonal of class 0
  CHECK(g[2] == 4);
  CHECK(g[3] == 4);
  CHECK(g[4] == 1);
  Vector xi(5);
  xi << 0.3, -0.1, 0.2, 0.05, 0.9;
  const Matrix W = sp.embed(xi);
  CHECK(sp.contains(W, 1e-14));
  CHECK((sp.coordinates(W) - xi).norm() <= 1e-14);
  // gradient at a fixed point stays in the space
  const Matrix G = gradient(KernelSpec::frobenius(), W);
  CHECK(sp.contains(G, 1e-12));
}
