#include "core/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace symland {

KernelSpec KernelSpec::parse(const std::string& name) {
  if (name == "frobenius" || name == "frob") return frobenius(3);
  if (name == "gauss" || name == "gaussian") return gauss();
  if (name.rfind("frobenius:", 0) == 0) {
    int n = std::stoi(name.substr(10));
    if (n < 2) throw std::invalid_argument("frobenius order must be >= 2");
    return frobenius(n);
  }
  throw std::invalid_argument("unknown kernel: " + name);
}

std::string KernelSpec::name() const {
  if (kind == KernelKind::CubicGaussian) return "gauss";
  return n == 3 ? "frobenius" : "frobenius:" + std::to_string(n);
}

double KernelSpec::eval(double s, double a, double b) const {
  if (kind == KernelKind::Frobenius) return std::pow(s, n);
  return 6.0 * s * s * s + 9.0 * a * b * s;
}

double KernelSpec::target_constant(int d) const {
  return static_cast<double>(d) * eval(1.0, 1.0, 1.0);
}

double kernel_eval(const KernelSpec& k, const Vector& w, const Vector& v) {
  return k.eval(w.dot(v), w.squaredNorm(), v.squaredNorm());
}

double loss(const KernelSpec& k, const Matrix& W) {
  const int d = static_cast<int>(W.cols());
  const Matrix G = W * W.transpose();
  const Vector a = G.diagonal();
  double student = 0.0, cross = 0.0;
  if (k.kind == KernelKind::Frobenius) {
    student = G.array().pow(k.n).sum();
    cross = W.array().pow(k.n).sum();
  } else {
    const Eigen::ArrayXXd g = G.array();
    student = 6.0 * g.cube().sum() + 9.0 * (a * a.transpose()).cwiseProduct(G).sum();
    const Eigen::ArrayXXd w = W.array();
    cross = 6.0 * w.cube().sum() + 9.0 * (W.rowwise().sum().cwiseProduct(a)).sum();
  }
  return student - 2.0 * cross + k.target_constant(d);
}

double loss_direct(const KernelSpec& k, const Matrix& W) {
  if (k.kind == KernelKind::Frobenius && k.n != 3) return loss(k, W);
  const int d = static_cast<int>(W.cols());
  const std::size_t dd = static_cast<std::size_t>(d);
  std::vector<double> D(dd * dd * dd, 0.0);
  for (int r = 0; r < W.rows(); ++r)
    for (int i = 0; i < d; ++i) {
      const double wi = W(r, i);
      if (wi == 0.0) continue;
      for (int j = 0; j < d; ++j) {
        const double wij = wi * W(r, j);
        if (wij == 0.0) continue;
        double* row = &D[(i * dd + j) * dd];
        for (int l = 0; l < d; ++l) row[l] += wij * W(r, l);
      }
    }
  for (int i = 0; i < d; ++i) D[(i * dd + i) * dd + i] -= 1.0;
  double fro = 0.0;
  for (double x : D) fro += x * x;
  if (k.kind == KernelKind::Frobenius) return fro;
  double tr = 0.0;
  for (int i = 0; i < d; ++i) {
    double t = 0.0;
    for (int j = 0; j < d; ++j) t += D[(i * dd + j) * dd + j];
    tr += t * t;
  }
  return 6.0 * fro + 9.0 * tr;
}

DenseSymTensor::DenseSymTensor(int d) : d_(d), data_(static_cast<std::size_t>(d) * d * d, 0.0) {}

DenseSymTensor DenseSymTensor::from_rows(const Matrix& W) {
  const int d = static_cast<int>(W.cols());
  DenseSymTensor t(d);
  for (int r = 0; r < W.rows(); ++r)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) t.at(i, j, l) += W(r, i) * W(r, j) * W(r, l);
  return t;
}

DenseSymTensor& DenseSymTensor::operator-=(const DenseSymTensor& o) {
  if (o.d_ != d_) throw std::invalid_argument("tensor dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

double DenseSymTensor::frobenius_sq() const {
  double s = 0.0;
  for (double x : data_) s += x * x;
  return s;
}

double gaussian_moment(const std::vector<int>& r) {
  double h = 1.0;
  for (int ri : r) {
    if (ri < 0) throw std::invalid_argument("negative moment index");
    if (ri % 2) return 0.0;
    for (int m = ri - 1; m > 1; m -= 2) h *= m;
  }
  return h;
}

double DenseSymTensor::gaussian_norm_sq() const {
  // polynomial coefficients of <S, x^{(x)3}> on monomials x_i x_j x_l, i <= j <= l
  struct Mono {
    std::vector<int> p;
    double a;
  };
  std::vector<Mono> monos;
  for (int i = 0; i < d_; ++i)
    for (int j = i; j < d_; ++j)
      for (int l = j; l < d_; ++l) {
        std::vector<int> p(d_, 0);
        ++p[i];
        ++p[j];
        ++p[l];
        double mult = (i == j && j == l) ? 1.0 : (i == j || j == l) ? 3.0 : 6.0;
        monos.push_back({std::move(p), mult * at(i, j, l)});
      }
  double s = 0.0;
  std::vector<int> r(d_);
  for (const auto& m1 : monos) {
    if (m1.a == 0.0) continue;
    for (const auto& m2 : monos) {
      if (m2.a == 0.0) continue;
      for (int t = 0; t < d_; ++t) r[t] = m1.p[t] + m2.p[t];
      s += gaussian_moment(r) * m1.a * m2.a;
    }
  }
  return s;
}

double loss_dense_oracle(const KernelSpec& k, const Matrix& W) {
  const int d = static_cast<int>(W.cols());
  if (d > 12) throw std::invalid_argument("dense oracle limited to d <= 12");
  if (k.kind == KernelKind::Frobenius && k.n != 3)
    throw std::invalid_argument("dense oracle only covers order-3 tensors");
  DenseSymTensor s = DenseSymTensor::from_rows(W);
  s -= DenseSymTensor::from_rows(Matrix::Identity(d, d));
  return k.kind == KernelKind::Frobenius ? s.frobenius_sq() : s.gaussian_norm_sq();
}

bool is_permutation_matrix(const Matrix& W, double tol) {
  if (W.rows() != W.cols()) return false;
  for (int i = 0; i < W.rows(); ++i) {
    int ones = 0;
    for (int j = 0; j < W.cols(); ++j) {
      const double x = W(i, j);
      if (std::abs(x - 1.0) <= tol) {
        ++ones;
      } else if (std::abs(x) > tol) {
        return false;
      }
    }
    if (ones != 1) return false;
  }
  for (int j = 0; j < W.cols(); ++j) {
    int ones = 0;
    for (int i = 0; i < W.rows(); ++i) ones += std::abs(W(i, j) - 1.0) <= tol ? 1 : 0;
    if (ones != 1) return false;
  }
  return true;
}

}  // namespace symland
