#include "core/symbolic.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace symland {

namespace {

struct Model {
  std::size_t n = 0;  // number of xi
  int nc = 0;         // number of classes
  std::vector<MPoly> size;
  std::map<std::tuple<int, int, int>, int> var;  // (p, c, kind) -> xi index
  bool full = false;

  MPoly zero() const { return MPoly(n); }
  MPoly one() const { return MPoly::constant(n, 1); }
  MPoly cst(const Rational& q) const { return MPoly::constant(n, q); }

  // entry value of row class p, column class c; kind 0 diag, 1 off, 2 cross
  MPoly val(int p, int c, int kind) const {
    if (full) return MPoly::xi(n, 0);
    auto it = var.find({p, c, kind});
    return it == var.end() ? zero() : MPoly::xi(n, it->second);
  }
  MPoly D(int p) const { return val(p, p, 0); }
  MPoly O(int p) const { return val(p, p, 1); }
  MPoly X(int p, int c) const { return val(p, c, 2); }

  // <w_r, w_r'> for r in p, r' in q
  MPoly inner(int p, int q, RowRelation rel) const {
    MPoly s = zero();
    for (int c = 0; c < nc; ++c) {
      const MPoly& sc = size[c];
      if (p != c && q != c) {
        s += sc * X(p, c) * X(q, c);
      } else if (p == c && q != c) {
        s += D(p) * X(q, c) + (sc - one()) * O(p) * X(q, c);
      } else if (q == c && p != c) {
        s += D(q) * X(p, c) + (sc - one()) * O(q) * X(p, c);
      } else if (rel == RowRelation::Same) {
        s += D(p) * D(p) + (sc - one()) * O(p) * O(p);
      } else {
        s += MPoly::constant(n, 2) * D(p) * O(p) + (sc - cst(2)) * O(p) * O(p);
      }
    }
    return s;
  }
};

Model make_model(const PatternShape& shape) {
  Model m;
  const auto blocks = basis_blocks(shape);
  m.n = blocks.size();
  const MPoly d = MPoly::d(m.n);
  if (shape.kind == PatternKind::Full) {
    m.full = true;
    m.nc = 1;
    m.size = {d};
    return m;
  }
  const auto tr = shape.trailing();
  m.nc = 1 + static_cast<int>(tr.size());
  m.size.push_back(d - MPoly::constant(m.n, shape.trailing_total()));
  for (int t : tr) m.size.push_back(MPoly::constant(m.n, t));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const int kind = b.kind == BlockKind::Diag ? 0 : b.kind == BlockKind::Off ? 1 : 2;
    m.var[{b.row_class, b.col_class, kind}] = static_cast<int>(i);
  }
  return m;
}

MPoly kernel_poly(const KernelSpec& k, const MPoly& s, const MPoly& a, const MPoly& b) {
  if (k.kind == KernelKind::Frobenius) return s.pow(static_cast<unsigned>(k.n));
  return Rational(6) * s.pow(3) + Rational(9) * a * b * s;
}

// kappa_w(w, v) = alpha(s, a, b) v + beta(s, a, b) w
MPoly kernel_alpha(const KernelSpec& k, const MPoly& s, const MPoly& a, const MPoly& b) {
  if (k.kind == KernelKind::Frobenius) return Rational(k.n) * s.pow(static_cast<unsigned>(k.n - 1));
  return Rational(18) * s * s + Rational(9) * a * b;
}

MPoly kernel_beta(const KernelSpec& k, const MPoly& s, const MPoly& a, const MPoly& b) {
  (void)a;
  if (k.kind == KernelKind::Frobenius) return MPoly(s.num_xi());
  return Rational(18) * b * s;
}

}  // namespace

BlockInnerTable block_inner_table(const PatternShape& shape) {
  const Model m = make_model(shape);
  BlockInnerTable t;
  t.num_xi = m.n;
  t.class_sizes = m.size;
  for (int p = 0; p < m.nc; ++p)
    for (int q = 0; q < m.nc; ++q) {
      if (p == q) {
        t.entries.push_back({p, p, RowRelation::Same, m.inner(p, p, RowRelation::Same), m.size[p]});
        t.entries.push_back(
            {p, p, RowRelation::Distinct, m.inner(p, p, RowRelation::Distinct), m.size[p] * (m.size[p] - m.one())});
      } else {
        t.entries.push_back({p, q, RowRelation::Cross, m.inner(p, q, RowRelation::Cross), m.size[p] * m.size[q]});
      }
    }
  return t;
}

std::vector<MPoly> block_size_polys(const PatternShape& shape) {
  const Model m = make_model(shape);
  std::vector<MPoly> out;
  for (const auto& b : basis_blocks(shape)) {
    switch (b.kind) {
      case BlockKind::All: out.push_back(m.size[0] * m.size[0]); break;
      case BlockKind::Diag: out.push_back(m.size[b.row_class]); break;
      case BlockKind::Off: out.push_back(m.size[b.row_class] * (m.size[b.row_class] - m.one())); break;
      case BlockKind::Cross: out.push_back(m.size[b.row_class] * m.size[b.col_class]); break;
    }
  }
  return out;
}

MPoly symbolic_restricted_loss(const KernelSpec& k, const PatternShape& shape) {
  const Model m = make_model(shape);
  const BlockInnerTable t = block_inner_table(shape);
  std::vector<MPoly> a(m.nc);
  for (int p = 0; p < m.nc; ++p) a[p] = m.inner(p, p, RowRelation::Same);

  MPoly loss = m.zero();
  for (const auto& e : t.entries) loss += e.count * kernel_poly(k, e.inner, a[e.p], a[e.q]);

  const MPoly one = m.one();
  MPoly cross = m.zero();
  for (int p = 0; p < m.nc; ++p) {
    MPoly row = m.zero();
    for (int c = 0; c < m.nc; ++c) {
      if (c == p) {
        row += kernel_poly(k, m.D(p), a[p], one) + (m.size[p] - one) * kernel_poly(k, m.O(p), a[p], one);
      } else {
        row += m.size[c] * kernel_poly(k, m.X(p, c), a[p], one);
      }
    }
    cross += m.size[p] * row;
  }
  loss -= Rational(2) * cross;
  const Rational tc = k.kind == KernelKind::Frobenius ? Rational(1) : Rational(15);
  loss += tc * MPoly::d(m.n);
  return loss;
}

std::vector<MPoly> symbolic_restricted_gradient(const KernelSpec& k, const PatternShape& shape) {
  const Model m = make_model(shape);
  const MPoly one = m.one();
  std::vector<MPoly> a(m.nc);
  for (int p = 0; p < m.nc; ++p) a[p] = m.inner(p, p, RowRelation::Same);

  std::vector<MPoly> out;
  for (const auto& b : basis_blocks(shape)) {
    const int p = b.row_class;
    const int c = b.col_class;
    // representative entry (r, j): j == r for Diag/All, j in class p with j != r for Off
    const bool diag = b.kind == BlockKind::Diag || b.kind == BlockKind::All;
    const MPoly w_rj = b.kind == BlockKind::Off ? m.O(p) : b.kind == BlockKind::Cross ? m.X(p, c) : m.D(p);

    MPoly student = (kernel_alpha(k, a[p], a[p], a[p]) + kernel_beta(k, a[p], a[p], a[p])) * w_rj;
    if (!diag) {
      // the row whose index is j
      const RowRelation rel = c == p ? RowRelation::Distinct : RowRelation::Cross;
      const MPoly s = m.inner(p, c, rel);
      student += kernel_alpha(k, s, a[p], a[c]) * m.D(c) + kernel_beta(k, s, a[p], a[c]) * w_rj;
    }
    for (int q = 0; q < m.nc; ++q) {
      MPoly cnt = m.size[q];
      if (q == p) cnt -= one;
      if (!diag && q == c) cnt -= one;
      const RowRelation rel = q == p ? RowRelation::Distinct : RowRelation::Cross;
      const MPoly s = m.inner(p, q, rel);
      const MPoly w_qj = q == c ? m.O(c) : m.X(q, c);
      student += cnt * (kernel_alpha(k, s, a[p], a[q]) * w_qj + kernel_beta(k, s, a[p], a[q]) * w_rj);
    }

    MPoly beta_sum = m.zero();
    for (int cc = 0; cc < m.nc; ++cc) {
      if (cc == p) {
        beta_sum += kernel_beta(k, m.D(p), a[p], one) + (m.size[p] - one) * kernel_beta(k, m.O(p), a[p], one);
      } else {
        beta_sum += m.size[cc] * kernel_beta(k, m.X(p, cc), a[p], one);
      }
    }
    const MPoly target = kernel_alpha(k, w_rj, a[p], one) + w_rj * beta_sum;
    out.push_back(Rational(2) * (student - target));
  }
  return out;
}

}  // namespace symland
