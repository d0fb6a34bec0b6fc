#pragma once

#include "core/tensor_core.hpp"

namespace symland {

// Gradient in the same k x d layout as W.
Matrix gradient(const KernelSpec& k, const Matrix& W);

// Hessian in stacked-row coordinates: index (i, a) -> i * d + a.
Matrix hessian(const KernelSpec& k, const Matrix& W);

struct FdCheck {
  double max_error = 0.0;     // relative to 1 + |analytic|
  double step = 0.0;
  bool passed = false;
};

FdCheck fd_check_gradient(const KernelSpec& k, const Matrix& W, double step = 1e-5, double tol = 1e-5);
FdCheck fd_check_hessian(const KernelSpec& k, const Matrix& W, double step = 1e-5, double tol = 1e-4);

// Rows t_i w_i with t_i = (lambda_i / <w_i,w_i>^{n-1})^{1/n}, padded with zero rows to d x d.
// The eigenvectors must be pairwise orthogonal.
Matrix eigenpair_critical_point(const std::vector<Vector>& eigvecs, const std::vector<double>& eigvals,
                                int n, int d);

}  // namespace symland
