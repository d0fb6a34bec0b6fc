#pragma once

#include "core/tensor_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symland {

struct PermPair {
  std::vector<int> rows;  // i -> rows[i], 0-based
  std::vector<int> cols;

  static PermPair identity(int k, int d);
  PermPair compose(const PermPair& o) const;  // (this o other)
  PermPair inverse() const;
  bool operator==(const PermPair& o) const { return rows == o.rows && cols == o.cols; }
  bool operator<(const PermPair& o) const { return rows != o.rows ? rows < o.rows : cols < o.cols; }
};

bool is_permutation(const std::vector<int>& p);

// (sigma W)_{sigma1(a), sigma2(b)} = W_{ab}
Matrix act(const PermPair& s, const Matrix& W);
// action on the stacked-row layout, as a permutation of indices i*d+a
std::vector<int> stacked_permutation(const PermPair& s, int d);

double isotropy_tolerance(const Matrix& W);

std::vector<PermPair> isotropy_group(const Matrix& W, double tol);
std::uint64_t orbit_length(const Matrix& W);
// sigma with sigma W1 = W2 (within tol), searched by backtracking
std::optional<PermPair> find_orbit_map(const Matrix& W1, const Matrix& W2, double tol);

enum class PatternKind { Full, DiagSd, DiagSd1, DiagSd2, DiagSd11, DiagBlock };

// Shape of a diagonal block pattern, independent of d. Class 0 holds d - m indices, the
// trailing classes have constant sizes.
struct PatternShape {
  PatternKind kind = PatternKind::DiagSd;
  int block = 0;  // DiagBlock only

  static PatternShape parse(const std::string& name);
  std::string name() const;
  std::vector<int> trailing() const;
  int trailing_total() const;
  int min_d() const;
  bool operator==(const PatternShape& o) const { return kind == o.kind && block == o.block; }
};

enum class BlockKind { All, Diag, Off, Cross };

struct BasisBlock {
  int row_class = 0;
  int col_class = 0;
  BlockKind kind = BlockKind::Diag;
};

std::vector<BasisBlock> basis_blocks(const PatternShape& shape);

struct IsotropyPattern {
  PatternShape shape;
  int d = 0;

  IsotropyPattern(PatternShape s, int dim);
  std::vector<std::vector<int>> classes() const;
  // (pi,pi) generators, or independent row/col generators for Full
  std::vector<PermPair> generators() const;
  std::uint64_t group_order() const;
};

// true if every generator of the pattern group lies in the given group
bool group_contains_pattern(const std::vector<PermPair>& group, const IsotropyPattern& p);
// named pattern whose group order and row/column orbit sizes match, if any
std::optional<PatternShape> match_pattern(const std::vector<PermPair>& group, int d);

class FixedPointSpace {
 public:
  explicit FixedPointSpace(IsotropyPattern p);

  const IsotropyPattern& pattern() const { return pattern_; }
  int dim() const { return static_cast<int>(blocks_.size()); }
  const std::vector<BasisBlock>& blocks() const { return blocks_; }

  Matrix basis(int i) const;
  // number of matrix entries in each block (the Gram diagonal of the 0/1 basis)
  std::vector<double> block_sizes() const;
  Matrix embed(const Vector& xi) const;
  // block averages; the orthogonal projection onto the space in basis coordinates
  Vector coordinates(const Matrix& W) const;
  bool contains(const Matrix& W, double tol) const;
  Vector restrict_gradient(const KernelSpec& k, const Vector& xi) const;

 private:
  template <class F>
  void for_each_entry(int block, F&& f) const;

  IsotropyPattern pattern_;
  std::vector<BasisBlock> blocks_;
  std::vector<int> class_of_;
};

}  // namespace symland
