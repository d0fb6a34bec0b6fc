#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace symland {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelKind { Frobenius, CubicGaussian };

// Frobenius uses <w,v>^n (order n tensors), the Gaussian kernel is fixed at order 3:
// 6 s^3 + 9 |w|^2 |v|^2 s.
struct KernelSpec {
  KernelKind kind = KernelKind::Frobenius;
  int n = 3;

  static KernelSpec frobenius(int order = 3) { return {KernelKind::Frobenius, order}; }
  static KernelSpec gauss() { return {KernelKind::CubicGaussian, 3}; }
  static KernelSpec parse(const std::string& name);
  std::string name() const;
  bool operator==(const KernelSpec& o) const { return kind == o.kind && n == o.n; }

  // kappa(w,v) written through s = <w,v>, a = |w|^2, b = |v|^2
  double eval(double s, double a, double b) const;
  // sum_{i,j<=d} kappa(e_i,e_j)
  double target_constant(int d) const;
};

double kernel_eval(const KernelSpec& k, const Vector& w, const Vector& v);

// Loss of the k x d student W against T_e (d orthonormal target rows).
double loss(const KernelSpec& k, const Matrix& W);

// Same value, but the residual tensor is formed before the norm is taken, so large
// rows that cancel in the tensor do not cancel in floating point. O(k d^3); order 3 only
// (other orders fall back to loss()).
double loss_direct(const KernelSpec& k, const Matrix& W);

// Loss from explicitly assembled order-3 tensors; independent of the kernel trick.
// Limited to d <= 12.
double loss_dense_oracle(const KernelSpec& k, const Matrix& W);

// E[x^r] for standard normal x, r a multi-index
double gaussian_moment(const std::vector<int>& r);

bool is_permutation_matrix(const Matrix& W, double tol = 1e-12);

// Symmetric order-3 tensor on R^d, stored densely.
class DenseSymTensor {
 public:
  explicit DenseSymTensor(int d);
  static DenseSymTensor from_rows(const Matrix& W);  // sum_i w_i^{(x)3}
  int dim() const { return d_; }
  double& at(int i, int j, int l) { return data_[(static_cast<std::size_t>(i) * d_ + j) * d_ + l]; }
  double at(int i, int j, int l) const { return data_[(static_cast<std::size_t>(i) * d_ + j) * d_ + l]; }
  DenseSymTensor& operator-=(const DenseSymTensor& o);
  double frobenius_sq() const;
  // E[<S, x^{(x)3}>^2] under x ~ N(0, I)
  double gaussian_norm_sq() const;

 private:
  int d_;
  std::vector<double> data_;
};

}  // namespace symland
