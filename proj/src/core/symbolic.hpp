#pragma once

#include "core/mpoly.hpp"
#include "core/symmetry.hpp"
#include "core/tensor_core.hpp"

#include <vector>

namespace symland {

enum class RowRelation { Same, Distinct, Cross };

struct BlockInnerEntry {
  int p = 0;
  int q = 0;
  RowRelation rel = RowRelation::Same;
  MPoly inner;  // <w_r, w_r'> for representative rows
  MPoly count;  // number of ordered (r, r') pairs, polynomial in d
};

struct BlockInnerTable {
  std::size_t num_xi = 0;
  std::vector<MPoly> class_sizes;
  std::vector<BlockInnerEntry> entries;
};

BlockInnerTable block_inner_table(const PatternShape& shape);

// number of matrix entries in each basis block, polynomials in d
std::vector<MPoly> block_size_polys(const PatternShape& shape);

MPoly symbolic_restricted_loss(const KernelSpec& k, const PatternShape& shape);

// Entry values of the gradient on each basis block (no Gram division needed).
std::vector<MPoly> symbolic_restricted_gradient(const KernelSpec& k, const PatternShape& shape);

}  // namespace symland
