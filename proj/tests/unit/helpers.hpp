#pragma once

#include "core/symmetry.hpp"
#include "core/tensor_core.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace testing_util {

inline symland::Matrix random_matrix(std::mt19937_64& gen, int k, int d, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  symland::Matrix W(k, d);
  for (int i = 0; i < k; ++i)
    for (int a = 0; a < d; ++a) W(i, a) = nd(gen);
  return W;
}

inline std::vector<int> random_perm(std::mt19937_64& gen, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), gen);
  return p;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing_util
