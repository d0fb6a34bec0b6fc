#include "core/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace symland {

Matrix gradient(const KernelSpec& k, const Matrix& W) {
  const Matrix G = W * W.transpose();
  const Vector a = G.diagonal();
  const int d = static_cast<int>(W.cols());
  if (k.kind == KernelKind::Frobenius) {
    const int n = k.n;
    const Matrix Gp = G.array().pow(n - 1).matrix();
    const Matrix Wp = W.array().pow(n - 1).matrix();
    return 2.0 * n * (Gp * W - Wp);
  }
  // student part: sum_j (18 G_ij^2 + 9 a_i a_j) w_j + 18 (sum_j a_j G_ij) w_i
  Matrix C = 18.0 * G.array().square().matrix() + 9.0 * a * a.transpose();
  Matrix S = C * W;
  const Vector t = G * a;
  S += 18.0 * t.asDiagonal() * W;
  // target part: 18 W_ij^2 + 9 a_i + 18 (sum_j W_ij) w_i
  Matrix T = 18.0 * W.array().square().matrix();
  T.colwise() += 9.0 * a;
  const Vector rs = W.rowwise().sum();
  T += 18.0 * rs.asDiagonal() * W;
  (void)d;
  return 2.0 * (S - T);
}

Matrix hessian(const KernelSpec& k, const Matrix& W) {
  const int kr = static_cast<int>(W.rows());
  const int d = static_cast<int>(W.cols());
  const Matrix G = W * W.transpose();
  const Vector a = G.diagonal();
  Matrix H = Matrix::Zero(static_cast<Eigen::Index>(kr) * d, static_cast<Eigen::Index>(kr) * d);
  const Matrix I = Matrix::Identity(d, d);

  if (k.kind == KernelKind::Frobenius) {
    const double n = k.n;
    for (int i = 0; i < kr; ++i) {
      const Vector wi = W.row(i).transpose();
      for (int j = 0; j < kr; ++j) {
        const Vector wj = W.row(j).transpose();
        const double s = G(i, j);
        // kappa_wv(w_i, w_j) = n s^{n-1} I + n(n-1) s^{n-2} w_j w_i^T
        auto blk = H.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d);
        blk.noalias() = 2.0 * n * (n - 1) * std::pow(s, n - 2) * wj * wi.transpose();
        blk.diagonal().array() += 2.0 * n * std::pow(s, n - 1);
      }
      Vector c = G.row(i).transpose().array().pow(n - 2).matrix();
      Matrix D = W.transpose() * c.asDiagonal() * W;
      const Vector tgt = wi.array().pow(n - 2).matrix();
      D.diagonal() -= tgt;
      H.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(i) * d, d, d) += 2.0 * n * (n - 1) * D;
    }
    return H;
  }

  for (int i = 0; i < kr; ++i) {
    const Vector wi = W.row(i).transpose();
    for (int j = 0; j < kr; ++j) {
      const Vector wj = W.row(j).transpose();
      const double s = G(i, j);
      auto blk = H.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(j) * d, d, d);
      blk.noalias() = 36.0 * s * (wj * wi.transpose() + wi * wj.transpose());
      blk.noalias() += 18.0 * a(j) * wi * wi.transpose();
      blk.noalias() += 18.0 * a(i) * wj * wj.transpose();
      blk.diagonal().array() += 18.0 * s * s + 9.0 * a(i) * a(j);
      blk *= 2.0;
    }
    // sum_j kappa_ww(w_i, w_j) - sum_j kappa_ww(w_i, e_j)
    const Vector g = G.row(i).transpose();
    Matrix D = 36.0 * W.transpose() * g.asDiagonal() * W;
    const Vector u = W.transpose() * a;  // sum_j a_j w_j
    D += 18.0 * (u * wi.transpose() + wi * u.transpose());
    D.diagonal().array() += 18.0 * a.dot(g);
    D.diagonal() -= 36.0 * wi;
    const Vector ones = Vector::Ones(d);
    D -= 18.0 * (ones * wi.transpose() + wi * ones.transpose());
    D.diagonal().array() -= 18.0 * wi.sum();
    H.block(static_cast<Eigen::Index>(i) * d, static_cast<Eigen::Index>(i) * d, d, d) += 2.0 * D;
  }
  (void)I;
  return H;
}

FdCheck fd_check_gradient(const KernelSpec& k, const Matrix& W, double step, double tol) {
  const Matrix g = gradient(k, W);
  FdCheck out;
  out.step = step;
  Matrix Wp = W;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j) {
      const double h = step * (1.0 + std::abs(W(i, j)));
      Wp(i, j) = W(i, j) + h;
      const double fp = loss(k, Wp);
      Wp(i, j) = W(i, j) - h;
      const double fm = loss(k, Wp);
      Wp(i, j) = W(i, j);
      const double fd = (fp - fm) / (2.0 * h);
      out.max_error = std::max(out.max_error, std::abs(fd - g(i, j)) / (1.0 + std::abs(g(i, j))));
    }
  out.passed = out.max_error <= tol;
  return out;
}

FdCheck fd_check_hessian(const KernelSpec& k, const Matrix& W, double step, double tol) {
  const Matrix H = hessian(k, W);
  const int d = static_cast<int>(W.cols());
  FdCheck out;
  out.step = step;
  Matrix Wp = W;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < d; ++j) {
      const double h = step * (1.0 + std::abs(W(i, j)));
      Wp(i, j) = W(i, j) + h;
      const Matrix gp = gradient(k, Wp);
      Wp(i, j) = W(i, j) - h;
      const Matrix gm = gradient(k, Wp);
      Wp(i, j) = W(i, j);
      const Matrix col = (gp - gm) / (2.0 * h);
      const Eigen::Index c = static_cast<Eigen::Index>(i) * d + j;
      for (int r = 0; r < W.rows(); ++r)
        for (int s = 0; s < d; ++s) {
          const double an = H(static_cast<Eigen::Index>(r) * d + s, c);
          out.max_error = std::max(out.max_error, std::abs(col(r, s) - an) / (1.0 + std::abs(an)));
        }
    }
  out.passed = out.max_error <= tol;
  return out;
}

Matrix eigenpair_critical_point(const std::vector<Vector>& eigvecs, const std::vector<double>& eigvals,
                                int n, int d) {
  if (eigvecs.size() != eigvals.size()) throw std::invalid_argument("eigvecs/eigvals length mismatch");
  if (static_cast<int>(eigvecs.size()) > d) throw std::invalid_argument("more eigenvectors than rows");
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  Matrix W = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < eigvecs.size(); ++i) {
    const Vector& w = eigvecs[i];
    if (w.size() != d) throw std::invalid_argument("eigenvector length mismatch");
    const double nn = w.squaredNorm();
    if (nn == 0.0) throw std::invalid_argument("zero eigenvector");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(w.dot(eigvecs[j])) > 1e-12 * std::sqrt(nn * eigvecs[j].squaredNorm()))
        throw std::invalid_argument("eigenvectors are not orthogonal");
    const double q = eigvals[i] / std::pow(nn, n - 1);
    double t;
    if (n % 2) {
      t = q < 0 ? -std::pow(-q, 1.0 / n) : std::pow(q, 1.0 / n);
    } else {
      if (q < 0) throw std::invalid_argument("negative ratio with even n");
      t = std::pow(q, 1.0 / n);
    }
    W.row(static_cast<Eigen::Index>(i)) = t * w.transpose();
  }
  return W;
}

}  // namespace symland
