#include "core/symmetry.hpp"

#include "core/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace symland {

PermPair PermPair::identity(int k, int d) {
  PermPair p;
  p.rows.resize(k);
  p.cols.resize(d);
  std::iota(p.rows.begin(), p.rows.end(), 0);
  std::iota(p.cols.begin(), p.cols.end(), 0);
  return p;
}

PermPair PermPair::compose(const PermPair& o) const {
  if (o.rows.size() != rows.size() || o.cols.size() != cols.size())
    throw std::invalid_argument("compose: size mismatch");
  PermPair r;
  r.rows.resize(rows.size());
  r.cols.resize(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) r.rows[i] = rows[o.rows[i]];
  for (std::size_t i = 0; i < cols.size(); ++i) r.cols[i] = cols[o.cols[i]];
  return r;
}

PermPair PermPair::inverse() const {
  PermPair r;
  r.rows.resize(rows.size());
  r.cols.resize(cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) r.rows[rows[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < cols.size(); ++i) r.cols[cols[i]] = static_cast<int>(i);
  return r;
}

bool is_permutation(const std::vector<int>& p) {
  std::vector<bool> seen(p.size(), false);
  for (int x : p) {
    if (x < 0 || x >= static_cast<int>(p.size()) || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

Matrix act(const PermPair& s, const Matrix& W) {
  if (static_cast<Eigen::Index>(s.rows.size()) != W.rows() || static_cast<Eigen::Index>(s.cols.size()) != W.cols())
    throw std::invalid_argument("act: permutation size mismatch");
  if (!is_permutation(s.rows) || !is_permutation(s.cols)) throw std::invalid_argument("act: not a bijection");
  Matrix out(W.rows(), W.cols());
  for (int a = 0; a < W.rows(); ++a)
    for (int b = 0; b < W.cols(); ++b) out(s.rows[a], s.cols[b]) = W(a, b);
  return out;
}

std::vector<int> stacked_permutation(const PermPair& s, int d) {
  std::vector<int> p(s.rows.size() * d);
  for (std::size_t a = 0; a < s.rows.size(); ++a)
    for (int b = 0; b < d; ++b) p[a * d + b] = s.rows[a] * d + s.cols[b];
  return p;
}

double isotropy_tolerance(const Matrix& W) {
  return 1e-9 * (1.0 + W.cwiseAbs().maxCoeff());
}

namespace {

bool fixes(const Matrix& W, const std::vector<int>& r, const std::vector<int>& c, double tol) {
  for (int a = 0; a < W.rows(); ++a)
    for (int b = 0; b < W.cols(); ++b)
      if (std::abs(W(r[a], c[b]) - W(a, b)) > tol) return false;
  return true;
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace

std::vector<PermPair> isotropy_group(const Matrix& W, double tol) {
  const int k = static_cast<int>(W.rows());
  const int d = static_cast<int>(W.cols());
  if (k > 6 || d > 6) throw std::invalid_argument("isotropy brute force limited to k, d <= 6");
  std::vector<PermPair> out;
  std::vector<int> r(k), c(d);
  std::iota(r.begin(), r.end(), 0);
  do {
    std::iota(c.begin(), c.end(), 0);
    do {
      if (fixes(W, r, c, tol)) out.push_back({r, c});
    } while (std::next_permutation(c.begin(), c.end()));
  } while (std::next_permutation(r.begin(), r.end()));
  return out;
}

std::uint64_t orbit_length(const Matrix& W) {
  const auto g = isotropy_group(W, isotropy_tolerance(W));
  return factorial(static_cast<int>(W.rows())) * factorial(static_cast<int>(W.cols())) / g.size();
}

std::optional<PermPair> find_orbit_map(const Matrix& W1, const Matrix& W2, double tol) {
  if (W1.rows() != W2.rows() || W1.cols() != W2.cols()) return std::nullopt;
  const int k = static_cast<int>(W1.rows());
  const int d = static_cast<int>(W1.cols());

  auto sorted_row = [](const Matrix& W, int i) {
    std::vector<double> v(W.cols());
    for (int j = 0; j < W.cols(); ++j) v[j] = W(i, j);
    std::sort(v.begin(), v.end());
    return v;
  };
  std::vector<std::vector<double>> s1(k), s2(k);
  for (int i = 0; i < k; ++i) {
    s1[i] = sorted_row(W1, i);
    s2[i] = sorted_row(W2, i);
  }
  auto same = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
  };

  std::vector<int> rowmap(k, -1);
  std::vector<bool> used(k, false);
  // cand[b][c]: column b of W1 may go to column c of W2
  std::vector<std::vector<char>> cand(d, std::vector<char>(d, 1));

  std::function<bool(int)> rec = [&](int a) -> bool {
    if (a == k) return true;
    for (int r = 0; r < k; ++r) {
      if (used[r] || !same(s1[a], s2[r])) continue;
      auto saved = cand;
      bool ok = true;
      for (int b = 0; b < d && ok; ++b) {
        bool any = false;
        for (int c = 0; c < d; ++c) {
          if (cand[b][c] && std::abs(W2(r, c) - W1(a, b)) > tol) cand[b][c] = 0;
          any = any || cand[b][c];
        }
        ok = any;
      }
      if (ok) {
        used[r] = true;
        rowmap[a] = r;
        if (rec(a + 1)) return true;
        used[r] = false;
      }
      cand = std::move(saved);
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;

  // bipartite matching of columns under the final compatibility
  std::vector<int> match_c(d, -1);
  std::function<bool(int, std::vector<bool>&)> aug = [&](int b, std::vector<bool>& seen) -> bool {
    for (int c = 0; c < d; ++c) {
      if (!cand[b][c] || seen[c]) continue;
      seen[c] = true;
      if (match_c[c] < 0 || aug(match_c[c], seen)) {
        match_c[c] = b;
        return true;
      }
    }
    return false;
  };
  for (int b = 0; b < d; ++b) {
    std::vector<bool> seen(d, false);
    if (!aug(b, seen)) return std::nullopt;
  }
  PermPair p;
  p.rows = rowmap;
  p.cols.assign(d, -1);
  for (int c = 0; c < d; ++c) p.cols[match_c[c]] = c;
  if ((act(p, W1) - W2).cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return p;
}

PatternShape PatternShape::parse(const std::string& name) {
  if (name == "Full") return {PatternKind::Full, 0};
  if (name == "DiagSd") return {PatternKind::DiagSd, 0};
  if (name == "DiagSd1") return {PatternKind::DiagSd1, 0};
  if (name == "DiagSd2") return {PatternKind::DiagSd2, 0};
  if (name == "DiagSd11") return {PatternKind::DiagSd11, 0};
  if (name.rfind("DiagBlock:", 0) == 0) {
    int i = std::stoi(name.substr(10));
    if (i < 1) throw std::invalid_argument("DiagBlock size must be >= 1");
    return {PatternKind::DiagBlock, i};
  }
  throw std::invalid_argument("unknown pattern: " + name);
}

std::string PatternShape::name() const {
  switch (kind) {
    case PatternKind::Full: return "Full";
    case PatternKind::DiagSd: return "DiagSd";
    case PatternKind::DiagSd1: return "DiagSd1";
    case PatternKind::DiagSd2: return "DiagSd2";
    case PatternKind::DiagSd11: return "DiagSd11";
    case PatternKind::DiagBlock: return "DiagBlock:" + std::to_string(block);
  }
  return "?";
}

std::vector<int> PatternShape::trailing() const {
  switch (kind) {
    case PatternKind::Full:
    case PatternKind::DiagSd: return {};
    case PatternKind::DiagSd1: return {1};
    case PatternKind::DiagSd2: return {2};
    case PatternKind::DiagSd11: return {1, 1};
    case PatternKind::DiagBlock: return {block};
  }
  return {};
}

int PatternShape::trailing_total() const {
  auto t = trailing();
  return std::accumulate(t.begin(), t.end(), 0);
}

int PatternShape::min_d() const {
  // class 0 may be empty only for DiagSd11 (C_{5,t} at d = 2)
  if (kind == PatternKind::DiagSd11) return 2;
  return std::max(2, trailing_total() + 1);
}

std::vector<BasisBlock> basis_blocks(const PatternShape& shape) {
  if (shape.kind == PatternKind::Full) return {{0, 0, BlockKind::All}};
  const auto tr = shape.trailing();
  const int nc = 1 + static_cast<int>(tr.size());
  std::vector<BasisBlock> out;
  for (int p = 0; p < nc; ++p)
    for (int c = 0; c < nc; ++c) {
      if (p == c) {
        out.push_back({p, p, BlockKind::Diag});
        if (p == 0 || tr[p - 1] >= 2) out.push_back({p, p, BlockKind::Off});
      } else {
        out.push_back({p, c, BlockKind::Cross});
      }
    }
  return out;
}

IsotropyPattern::IsotropyPattern(PatternShape s, int dim) : shape(s), d(dim) {
  if (d < shape.min_d())
    throw std::invalid_argument("d = " + std::to_string(d) + " too small for pattern " + shape.name());
}

std::vector<std::vector<int>> IsotropyPattern::classes() const {
  if (shape.kind == PatternKind::Full) {
    std::vector<int> all(d);
    std::iota(all.begin(), all.end(), 0);
    return {all};
  }
  const auto tr = shape.trailing();
  std::vector<std::vector<int>> out;
  int start = 0;
  const int big = d - shape.trailing_total();
  out.emplace_back();
  for (int i = 0; i < big; ++i) out.back().push_back(start++);
  for (int sz : tr) {
    out.emplace_back();
    for (int i = 0; i < sz; ++i) out.back().push_back(start++);
  }
  return out;
}

std::vector<PermPair> IsotropyPattern::generators() const {
  std::vector<PermPair> gens;
  const auto cls = classes();
  for (const auto& c : cls)
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      PermPair p = PermPair::identity(d, d);
      if (shape.kind == PatternKind::Full) {
        std::swap(p.rows[c[j]], p.rows[c[j + 1]]);
        gens.push_back(p);
        p = PermPair::identity(d, d);
        std::swap(p.cols[c[j]], p.cols[c[j + 1]]);
        gens.push_back(p);
      } else {
        std::swap(p.rows[c[j]], p.rows[c[j + 1]]);
        std::swap(p.cols[c[j]], p.cols[c[j + 1]]);
        gens.push_back(p);
      }
    }
  return gens;
}

std::uint64_t IsotropyPattern::group_order() const {
  std::uint64_t o = 1;
  for (const auto& c : classes()) o *= factorial(static_cast<int>(c.size()));
  return shape.kind == PatternKind::Full ? o * o : o;
}

bool group_contains_pattern(const std::vector<PermPair>& group, const IsotropyPattern& p) {
  for (const auto& g : p.generators())
    if (std::find(group.begin(), group.end(), g) == group.end()) return false;
  return true;
}

namespace {

std::vector<int> orbit_sizes(const std::vector<PermPair>& group, int n, bool rows) {
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) { return comp[x] == x ? x : comp[x] = find(comp[x]); };
  for (const auto& g : group) {
    const auto& p = rows ? g.rows : g.cols;
    for (int i = 0; i < n; ++i) comp[find(i)] = find(p[i]);
  }
  std::vector<int> cnt(n, 0);
  for (int i = 0; i < n; ++i) ++cnt[find(i)];
  std::vector<int> out;
  for (int c : cnt)
    if (c) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::optional<PatternShape> match_pattern(const std::vector<PermPair>& group, int d) {
  if (group.empty()) return std::nullopt;
  const int k = static_cast<int>(group.front().rows.size());
  if (k != d) return std::nullopt;
  const auto ro = orbit_sizes(group, d, true);
  const auto co = orbit_sizes(group, d, false);
  for (PatternKind kind : {PatternKind::Full, PatternKind::DiagSd, PatternKind::DiagSd1, PatternKind::DiagSd2,
                           PatternKind::DiagSd11}) {
    PatternShape s{kind, 0};
    if (d < s.min_d() || d - s.trailing_total() < 1) continue;
    IsotropyPattern p(s, d);
    if (p.group_order() != group.size()) continue;
    std::vector<int> sizes;
    for (const auto& c : p.classes()) sizes.push_back(static_cast<int>(c.size()));
    std::sort(sizes.begin(), sizes.end());
    if (sizes == ro && sizes == co) return s;
  }
  return std::nullopt;
}

FixedPointSpace::FixedPointSpace(IsotropyPattern p) : pattern_(std::move(p)), blocks_(basis_blocks(pattern_.shape)) {
  class_of_.assign(pattern_.d, 0);
  const auto cls = pattern_.classes();
  for (std::size_t c = 0; c < cls.size(); ++c)
    for (int i : cls[c]) class_of_[i] = static_cast<int>(c);
}

template <class F>
void FixedPointSpace::for_each_entry(int block, F&& f) const {
  const BasisBlock& b = blocks_.at(block);
  const int d = pattern_.d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      bool in = false;
      switch (b.kind) {
        case BlockKind::All: in = true; break;
        case BlockKind::Diag: in = i == j && class_of_[i] == b.row_class; break;
        case BlockKind::Off: in = i != j && class_of_[i] == b.row_class && class_of_[j] == b.row_class; break;
        case BlockKind::Cross: in = class_of_[i] == b.row_class && class_of_[j] == b.col_class; break;
      }
      if (in) f(i, j);
    }
}

Matrix FixedPointSpace::basis(int i) const {
  Matrix B = Matrix::Zero(pattern_.d, pattern_.d);
  for_each_entry(i, [&](int a, int b) { B(a, b) = 1.0; });
  return B;
}

std::vector<double> FixedPointSpace::block_sizes() const {
  std::vector<double> out(blocks_.size(), 0.0);
  for (int i = 0; i < dim(); ++i) for_each_entry(i, [&](int, int) { out[i] += 1.0; });
  return out;
}

Matrix FixedPointSpace::embed(const Vector& xi) const {
  if (xi.size() != dim()) throw std::invalid_argument("embed: expected " + std::to_string(dim()) + " coordinates");
  Matrix W = Matrix::Zero(pattern_.d, pattern_.d);
  for (int i = 0; i < dim(); ++i) for_each_entry(i, [&](int a, int b) { W(a, b) = xi(i); });
  return W;
}

Vector FixedPointSpace::coordinates(const Matrix& W) const {
  if (W.rows() != pattern_.d || W.cols() != pattern_.d) throw std::invalid_argument("coordinates: size mismatch");
  Vector xi = Vector::Zero(dim());
  for (int i = 0; i < dim(); ++i) {
    double s = 0.0;
    int n = 0;
    for_each_entry(i, [&](int a, int b) {
      s += W(a, b);
      ++n;
    });
    xi(i) = n ? s / n : 0.0;
  }
  return xi;
}

bool FixedPointSpace::contains(const Matrix& W, double tol) const {
  return (embed(coordinates(W)) - W).cwiseAbs().maxCoeff() <= tol;
}

Vector FixedPointSpace::restrict_gradient(const KernelSpec& k, const Vector& xi) const {
  return coordinates(gradient(k, embed(xi)));
}

}  // namespace symland
