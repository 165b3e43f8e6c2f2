#pragma once

#include "dgdeform/dga.hpp"

namespace dgdeform {

enum class Side { Left, Right };

// DG module over a DG algebra, by action constants. For side == Right the act
// table row (a_i, m_j) holds the coordinates of m_j * a_i; for Left, of
// a_i * m_j.
template <class K>
struct DGModule {
  std::string name;
  AlgebraPtr<K> over;
  Side side = Side::Right;
  GradedSpace space;
  MatX<K> act;  // (dim_A * dim_M) x dim_M
  MatX<K> d;    // dim_M x dim_M

  Index dim() const { return space.total_dim(); }
  Index adim() const { return over->dim(); }

  VecX<K> basis_vec(Index i) const {
    VecX<K> v = VecX<K>::Zero(dim());
    v(i) = over->one();
    return v;
  }
  VecX<K> basis_act(Index ai, Index mj) const {
    return act.row(ai * dim() + mj).transpose();
  }
  VecX<K> apply(const VecX<K>& a, const VecX<K>& m) const {
    VecX<K> out = VecX<K>::Zero(dim());
    for (Index i = 0; i < adim(); ++i) {
      if (a(i).is_zero()) continue;
      for (Index j = 0; j < dim(); ++j)
        if (!m(j).is_zero()) out += a(i) * m(j) * basis_act(i, j);
    }
    return out;
  }
  // matrix of x -> x*a (right) or x -> a*x (left)
  MatX<K> action_operator(const VecX<K>& a) const {
    MatX<K> op = MatX<K>::Zero(dim(), dim());
    for (Index j = 0; j < dim(); ++j) op.col(j) = apply(a, basis_vec(j));
    return op;
  }
  Complex<K> as_complex() const { return Complex<K>{space, d, Window::all()}; }
  std::string show(const VecX<K>& v) const { return show_element(space, v); }
};

template <class K>
std::vector<Violation> validate_module(const DGModule<K>& M) {
  const auto& A = *M.over;
  std::vector<Violation> out;
  const Index na = A.dim(), nm = M.dim();
  if (M.act.rows() != na * nm || M.act.cols() != nm) return {{"shape", "action table"}};
  if (M.d.rows() != nm || M.d.cols() != nm) return {{"shape", "differential"}};
  auto la = [&](Index i) { return A.space.label(i); };
  auto lm = [&](Index j) { return M.space.label(j); };

  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < nm; ++j) {
      VecX<K> r = M.basis_act(i, j);
      for (Index k = 0; k < nm; ++k)
        if (!r(k).is_zero() &&
            M.space.degree_of(k) != A.space.degree_of(i) + M.space.degree_of(j)) {
          out.push_back({"degree", "action " + la(i) + " on " + lm(j) + " inhomogeneous"});
          return out;
        }
    }
  for (Index j = 0; j < nm; ++j)
    if (M.basis_act(A.unit, j) != M.basis_vec(j)) {
      out.push_back({"unit-action", "1 does not fix " + lm(j)});
      return out;
    }
  for (Index i = 0; i < na; ++i)
    for (Index i2 = 0; i2 < na; ++i2)
      for (Index j = 0; j < nm; ++j) {
        VecX<K> via_product, iterated;
        if (M.side == Side::Right) {
          // m*(ab) = (m*a)*b  with table row (a,m) = m*a
          via_product = M.apply(A.basis_mul(i, i2), M.basis_vec(j));
          iterated = M.apply(A.basis_vec(i2), M.basis_act(i, j));
        } else {
          via_product = M.apply(A.basis_mul(i, i2), M.basis_vec(j));
          iterated = M.apply(A.basis_vec(i), M.basis_act(i2, j));
        }
        if (via_product != iterated) {
          out.push_back({"associativity",
                         la(i) + "," + la(i2) + " on " + lm(j) + " fails"});
          return out;
        }
      }
  if (!is_homogeneous(M.space, M.space, 1, M.d)) {
    out.push_back({"differential-degree", "d not of degree +1"});
    return out;
  }
  if (!is_zero(MatX<K>(M.d * M.d))) {
    out.push_back({"differential", "d^2 != 0"});
    return out;
  }
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < nm; ++j) {
      VecX<K> lhs = M.d * M.basis_act(i, j);
      VecX<K> rhs;
      if (M.side == Side::Right)
        // d(m*a) = dm*a + (-1)^{|m|} m*da
        rhs = M.apply(A.basis_vec(i), VecX<K>(M.d * M.basis_vec(j))) +
              sign_of<K>(M.space.degree_of(j)) * M.apply(A.diff(A.basis_vec(i)), M.basis_vec(j));
      else
        // d(a*m) = da*m + (-1)^{|a|} a*dm
        rhs = M.apply(A.diff(A.basis_vec(i)), M.basis_vec(j)) +
              sign_of<K>(A.space.degree_of(i)) *
                  M.apply(A.basis_vec(i), VecX<K>(M.d * M.basis_vec(j)));
      if (lhs != rhs) {
        out.push_back({"leibniz", "d against action of " + la(i) + " on " + lm(j)});
        return out;
      }
    }
  return out;
}

template <class K>
DGModule<K> checked_module(DGModule<K> m) {
  auto vs = validate_module(m);
  if (!vs.empty()) throw ValidationError(std::move(vs));
  return m;
}

// A as a module over itself.
template <class K>
DGModule<K> regular_module(AlgebraPtr<K> A, Side side) {
  DGModule<K> M;
  M.name = A->name + (side == Side::Right ? "_r" : "_l");
  M.over = A;
  M.side = side;
  M.space = A->space;
  M.d = A->d;
  const Index n = A->dim();
  M.act = MatX<K>::Zero(n * n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      M.act.row(i * n + j) =
          (side == Side::Right ? A->basis_mul(j, i) : A->basis_mul(i, j)).transpose();
  return M;
}

// k as a module over an augmented algebra.
template <class K>
DGModule<K> trivial_module(AlgebraPtr<K> A, Side side, const std::string& name = "k") {
  if (!A->aug) throw std::invalid_argument("trivial_module: algebra has no augmentation");
  DGModule<K> M;
  M.name = name;
  M.over = A;
  M.side = side;
  M.space = GradedSpace({std::string("1")}, {0});
  M.d = MatX<K>::Zero(1, 1);
  M.act = MatX<K>::Zero(A->dim(), 1);
  for (Index i = 0; i < A->dim(); ++i) M.act(i, 0) = (*A->aug)(i);
  return M;
}

// shift M[s]: degree of e drops by s, d picks (-1)^s, right action unchanged
template <class K>
DGModule<K> shift_module(const DGModule<K>& M, int s) {
  if (M.side != Side::Right)
    throw std::invalid_argument("shift_module: right modules only");
  DGModule<K> out = M;
  out.name = M.name + "[" + std::to_string(s) + "]";
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (Index i = 0; i < M.dim(); ++i) {
    labels.push_back(M.space.label(i));
    degrees.push_back(M.space.degree_of(i) - s);
  }
  // same ordering: degree shift preserves the sort
  out.space = GradedSpace(labels, degrees);
  out.d = sign_of<K>(s) * M.d;
  return out;
}

// ---------------------------------------------------------------------------
// sub / quotient modules

template <class K>
struct SubmoduleData {
  DGModule<K> module;
  MatX<K> inclusion;  // big coords of sub basis
  MatX<K> retraction; // some left inverse of inclusion
};

template <class K>
GradedSpace space_from_columns(const GradedSpace& big, const MatX<K>& cols,
                               const std::string& prefix) {
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (Index j = 0; j < cols.cols(); ++j) {
    degrees.push_back(column_degree<K>(big, VecX<K>(cols.col(j))));
    labels.push_back(prefix + std::to_string(j));
  }
  return GradedSpace(labels, degrees);
}

// Reorders columns so they match the degree-sorted GradedSpace built on them.
template <class K>
MatX<K> sort_columns_by_degree(const GradedSpace& big, MatX<K> cols) {
  std::vector<std::pair<int, Index>> keyed;
  for (Index j = 0; j < cols.cols(); ++j)
    keyed.emplace_back(column_degree<K>(big, VecX<K>(cols.col(j))), j);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  MatX<K> out(cols.rows(), cols.cols());
  for (Index j = 0; j < cols.cols(); ++j) out.col(j) = cols.col(keyed[static_cast<std::size_t>(j)].second);
  return out;
}

template <class K>
SubmoduleData<K> submodule(const DGModule<K>& M, MatX<K> basis, const std::string& name) {
  basis = sort_columns_by_degree<K>(M.space, std::move(basis));
  const Index q = basis.cols(), n = M.dim();
  MatX<K> ext = extend_basis<K>(basis, MatX<K>(MatX<K>::Identity(n, n)));
  MatX<K> full(n, q + ext.cols());
  full << basis, ext;
  auto inv = inverse<K>(full);
  if (!inv) throw std::invalid_argument("submodule: basis not independent");
  MatX<K> retr = inv->topRows(q);

  DGModule<K> S;
  S.name = name;
  S.over = M.over;
  S.side = M.side;
  S.space = space_from_columns<K>(M.space, basis, name + "_");
  S.d = MatX<K>::Zero(q, q);
  for (Index j = 0; j < q; ++j) {
    VecX<K> img = M.d * basis.col(j);
    if (!in_span<K>(basis, img)) throw std::invalid_argument("submodule: not d-stable");
    S.d.col(j) = retr * img;
  }
  S.act = MatX<K>::Zero(M.adim() * q, q);
  for (Index i = 0; i < M.adim(); ++i)
    for (Index j = 0; j < q; ++j) {
      VecX<K> img = M.apply(M.over->basis_vec(i), VecX<K>(basis.col(j)));
      if (!in_span<K>(basis, img)) throw std::invalid_argument("submodule: not action-stable");
      S.act.row(i * q + j) = (retr * img).transpose();
    }
  return {std::move(S), std::move(basis), std::move(retr)};
}

template <class K>
struct QuotientModuleData {
  DGModule<K> module;
  MatX<K> proj;     // big -> quotient coords
  MatX<K> section;  // quotient -> big
};

template <class K>
QuotientModuleData<K> quotient_module(const DGModule<K>& M, const MatX<K>& sub,
                                      const std::string& name) {
  const Index n = M.dim();
  for (Index j = 0; j < sub.cols(); ++j) {
    if (!in_span<K>(sub, VecX<K>(M.d * sub.col(j))))
      throw std::invalid_argument("quotient_module: subspace not d-stable");
    for (Index i = 0; i < M.adim(); ++i)
      if (!in_span<K>(sub, M.apply(M.over->basis_vec(i), VecX<K>(sub.col(j)))))
        throw std::invalid_argument("quotient_module: subspace not action-stable");
  }
  MatX<K> compl_cols =
      sort_columns_by_degree<K>(M.space, extend_basis<K>(sub, MatX<K>(MatX<K>::Identity(n, n))));
  const Index q = compl_cols.cols();
  MatX<K> full(n, sub.cols() + q);
  full << sub, compl_cols;
  auto inv = inverse<K>(full);
  if (!inv) throw std::logic_error("quotient_module: completion failed");
  MatX<K> proj = inv->bottomRows(q);

  DGModule<K> Q;
  Q.name = name;
  Q.over = M.over;
  Q.side = M.side;
  Q.space = space_from_columns<K>(M.space, compl_cols, name + "_");
  Q.d = proj * M.d * compl_cols;
  Q.act = MatX<K>::Zero(M.adim() * q, q);
  for (Index i = 0; i < M.adim(); ++i)
    for (Index j = 0; j < q; ++j)
      Q.act.row(i * q + j) =
          (proj * M.apply(M.over->basis_vec(i), VecX<K>(compl_cols.col(j)))).transpose();
  return {std::move(Q), std::move(proj), std::move(compl_cols)};
}

// ---------------------------------------------------------------------------
// Hom complexes

// Basis of the graded module maps M -> N (same algebra, same side), together
// with the Hom differential df = d∘f - (-1)^{|f|} f∘d.
template <class K>
struct HomComplex {
  GradedSpace space;             // one slot per basis map, degree = its shift
  std::vector<MatX<K>> basis;    // flat matrices dim(N) x dim(M)
  MatX<K> d;                     // differential on map coordinates
  const DGModule<K>* source = nullptr;  // informational
  const DGModule<K>* target = nullptr;

  MatX<K> realize(const VecX<K>& coords) const {
    MatX<K> out = MatX<K>::Zero(basis.empty() ? 0 : basis.front().rows(),
                                basis.empty() ? 0 : basis.front().cols());
    for (std::size_t b = 0; b < basis.size(); ++b)
      if (!coords(static_cast<Index>(b)).is_zero()) out += coords(static_cast<Index>(b)) * basis[b];
    return out;
  }
  Complex<K> as_complex() const { return Complex<K>{space, d, Window::all()}; }
};

template <class K>
VecX<K> express_in_maps(const std::vector<MatX<K>>& basis, const MatX<K>& target) {
  const Index nb = static_cast<Index>(basis.size());
  const Index sz = target.size();
  MatX<K> cols(sz, nb);
  for (Index b = 0; b < nb; ++b)
    cols.col(b) = Eigen::Map<const VecX<K>>(basis[static_cast<std::size_t>(b)].data(), sz);
  auto co = solve<K>(cols, VecX<K>(Eigen::Map<const VecX<K>>(target.data(), sz)));
  if (!co) throw std::logic_error("express_in_maps: target outside span");
  return *co;
}

// Module-map condition: right side f(m*a) = f(m)*a; left side
// f(a*m) = (-1)^{|f||a|} a*f(m).
template <class K>
HomComplex<K> hom_complex(const DGModule<K>& M, const DGModule<K>& N,
                          const std::string& name = "f") {
  if (M.over != N.over && !(M.over->space == N.over->space))
    throw std::invalid_argument("hom_complex: modules over different algebras");
  if (M.side != N.side) throw std::invalid_argument("hom_complex: side mismatch");
  const Index nm = M.dim(), nn = N.dim(), na = M.adim();
  HomComplex<K> H;
  H.source = &M;
  H.target = &N;

  std::vector<std::string> labels;
  std::vector<int> degrees;
  int lo = (nn && nm) ? N.space.min_degree() - M.space.max_degree() : 0;
  int hi = (nn && nm) ? N.space.max_degree() - M.space.min_degree() : -1;
  for (int s = lo; s <= hi; ++s) {
    // unknown slots for a shift-s homogeneous map
    std::vector<std::pair<Index, Index>> slots;  // (row in N, col in M)
    for (Index j = 0; j < nm; ++j)
      for (Index i = 0; i < nn; ++i)
        if (N.space.degree_of(i) == M.space.degree_of(j) + s) slots.emplace_back(i, j);
    if (slots.empty()) continue;
    const Index u = static_cast<Index>(slots.size());
    auto realize_slot = [&](const VecX<K>& x) {
      MatX<K> F = MatX<K>::Zero(nn, nm);
      for (Index t = 0; t < u; ++t) F(slots[static_cast<std::size_t>(t)].first, slots[static_cast<std::size_t>(t)].second) = x(t);
      return F;
    };
    // constraints: for every algebra basis element and module basis element
    std::vector<Eigen::Matrix<K, 1, Eigen::Dynamic>> rows;
    for (Index ai = 0; ai < na; ++ai)
      for (Index mj = 0; mj < nm; ++mj) {
        // lhs slots: F(act_M(a_i, m_j)); rhs: ±act_N(a_i, F(m_j))
        VecX<K> acted = M.basis_act(ai, mj);
        K sgn = (M.side == Side::Right)
                    ? K(1)
                    : sign_of<K>(s * M.over->space.degree_of(ai));
        for (Index ni = 0; ni < nn; ++ni) {
          Eigen::Matrix<K, 1, Eigen::Dynamic> row =
              Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(u);
          bool nonzero = false;
          for (Index t = 0; t < u; ++t) {
            auto [ri, cj] = slots[static_cast<std::size_t>(t)];
            K c(0);
            if (!acted(cj).is_zero() && ri == ni) c += acted(cj);
            // subtract ±(act_N(a_i, e_{ri}))(ni) for cj == mj
            if (cj == mj) c -= sgn * N.basis_act(ai, ri)(ni);
            if (!c.is_zero()) nonzero = true;
            row(t) = c;
          }
          if (nonzero) rows.push_back(std::move(row));
        }
      }
    MatX<K> C = MatX<K>::Zero(static_cast<Index>(rows.size()), u);
    for (std::size_t r = 0; r < rows.size(); ++r) C.row(static_cast<Index>(r)) = rows[r];
    MatX<K> sol = rows.empty() ? MatX<K>(MatX<K>::Identity(u, u)) : kernel<K>(C);
    for (Index b = 0; b < sol.cols(); ++b) {
      H.basis.push_back(realize_slot(VecX<K>(sol.col(b))));
      degrees.push_back(s);
      labels.push_back(name + std::to_string(H.basis.size() - 1));
    }
  }
  H.space = GradedSpace(labels, degrees);
  const Index nb = static_cast<Index>(H.basis.size());
  H.d = MatX<K>::Zero(nb, nb);
  for (Index b = 0; b < nb; ++b) {
    int s = H.space.degree_of(b);
    MatX<K> df = N.d * H.basis[static_cast<std::size_t>(b)] -
                 sign_of<K>(s) * H.basis[static_cast<std::size_t>(b)] * M.d;
    H.d.col(b) = express_in_maps<K>(H.basis, df);
  }
  return H;
}

// End(E) as a DG algebra under composition, with the identity as a basis
// element.
template <class K>
struct EndAlgebra {
  DGAlgebra<K> algebra;
  std::vector<MatX<K>> ops;  // operator per basis element, aligned with space
};

template <class K>
EndAlgebra<K> end_algebra(const DGModule<K>& E, const std::string& name = "") {
  HomComplex<K> H = hom_complex(E, E, "e");
  const Index n = E.dim();
  // re-basis so that id is the first degree-0 element
  std::vector<MatX<K>> ops;
  ops.push_back(MatX<K>::Identity(n, n));
  {
    const Index sz = n * n;
    MatX<K> pool(sz, static_cast<Index>(H.basis.size()));
    for (std::size_t b = 0; b < H.basis.size(); ++b)
      pool.col(static_cast<Index>(b)) = Eigen::Map<const VecX<K>>(H.basis[b].data(), sz);
    MatX<K> idcol(sz, 1);
    idcol.col(0) = Eigen::Map<const VecX<K>>(ops[0].data(), sz);
    MatX<K> extra = extend_basis<K>(idcol, pool);
    for (Index j = 0; j < extra.cols(); ++j) {
      MatX<K> F(n, n);
      Eigen::Map<VecX<K>>(F.data(), sz) = extra.col(j);
      ops.push_back(std::move(F));
    }
  }
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (std::size_t b = 0; b < ops.size(); ++b) {
    labels.push_back("e" + std::to_string(b));
    int deg = 0;
    bool seen = false;
    for (Index j = 0; j < n && !seen; ++j)
      for (Index i = 0; i < n; ++i)
        if (!ops[b](i, j).is_zero()) {
          deg = E.space.degree_of(i) - E.space.degree_of(j);
          seen = true;
          break;
        }
    degrees.push_back(deg);
  }
  GradedSpace sp(labels, degrees);
  // align ops with the sorted order
  std::vector<MatX<K>> sorted(ops.size());
  std::vector<bool> used(ops.size(), false);
  for (Index g = 0; g < sp.total_dim(); ++g) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      if (used[b] || labels[b] != sp.label(g)) continue;
      sorted[static_cast<std::size_t>(g)] = ops[b];
      used[b] = true;
      break;
    }
  }
  ops = std::move(sorted);

  DGAlgebra<K> B;
  B.name = name.empty() ? "End(" + E.name + ")" : name;
  B.field = E.over->field;
  B.space = sp;
  const Index q = sp.total_dim();
  for (Index g = 0; g < q; ++g)
    if (ops[static_cast<std::size_t>(g)] == MatX<K>(MatX<K>::Identity(n, n))) B.unit = g;
  B.mul_table = MatX<K>::Zero(q * q, q);
  B.d = MatX<K>::Zero(q, q);
  for (Index a = 0; a < q; ++a) {
    MatX<K> da = E.d * ops[static_cast<std::size_t>(a)] -
                 sign_of<K>(sp.degree_of(a)) * ops[static_cast<std::size_t>(a)] * E.d;
    B.d.col(a) = express_in_maps<K>(ops, da);
    for (Index b = 0; b < q; ++b)
      B.mul_table.row(a * q + b) =
          express_in_maps<K>(ops, MatX<K>(ops[static_cast<std::size_t>(a)] * ops[static_cast<std::size_t>(b)])).transpose();
  }
  return {std::move(B), std::move(ops)};
}

// ---------------------------------------------------------------------------
// tensor context A⊗R and base change

template <class K>
struct TensorContext {
  AlgebraPtr<K> A;  // ambient algebra
  AlgebraPtr<K> R;  // artinian-ish coefficient algebra
  AlgebraPtr<K> T;  // A⊗R
  TensorIndexer ix;

  VecX<K> embed_A(const VecX<K>& a) const {
    VecX<K> out = VecX<K>::Zero(T->dim());
    for (Index i = 0; i < A->dim(); ++i)
      if (!a(i).is_zero()) out(ix.index(i, R->unit)) = a(i);
    return out;
  }
  VecX<K> embed_R(const VecX<K>& r) const {
    VecX<K> out = VecX<K>::Zero(T->dim());
    for (Index j = 0; j < R->dim(); ++j)
      if (!r(j).is_zero()) out(ix.index(A->unit, j)) = r(j);
    return out;
  }
};

template <class K>
TensorContext<K> make_tensor_context(AlgebraPtr<K> A, AlgebraPtr<K> R) {
  auto t = tensor_algebras(*A, *R);
  return TensorContext<K>{A, R, share(std::move(t.algebra)), std::move(t.indexer)};
}

// p*(S) = S⊗R with d = d_S⊗1 + 1⊗d_R, as a right A⊗R-module.
template <class K>
DGModule<K> p_star(const TensorContext<K>& ctx, const DGModule<K>& S) {
  if (S.side != Side::Right) throw std::invalid_argument("p_star: right modules only");
  const auto& A = *ctx.A;
  const auto& R = *ctx.R;
  TensorIndexer mx(S.space, R.space);
  const Index ns = S.dim(), nr = R.dim(), n = ns * nr, nt = ctx.T->dim();
  DGModule<K> M;
  M.name = "p*(" + S.name + ")";
  M.over = ctx.T;
  M.side = Side::Right;
  M.space = mx.space();
  M.d = MatX<K>::Zero(n, n);
  M.act = MatX<K>::Zero(nt * n, n);
  for (Index s = 0; s < ns; ++s)
    for (Index r = 0; r < nr; ++r) {
      const Index g = mx.index(s, r);
      VecX<K> ds = S.d * S.basis_vec(s);
      for (Index k = 0; k < ns; ++k)
        if (!ds(k).is_zero()) M.d(mx.index(k, r), g) += ds(k);
      VecX<K> dr = R.diff(R.basis_vec(r));
      K sg = sign_of<K>(S.space.degree_of(s));
      for (Index k = 0; k < nr; ++k)
        if (!dr(k).is_zero()) M.d(mx.index(s, k), g) += sg * dr(k);
      // (s⊗q)·(a⊗r) = (-1)^{|q||a|}(s·a)⊗(qr)
      for (Index ai = 0; ai < A.dim(); ++ai)
        for (Index rj = 0; rj < nr; ++rj) {
          const Index t = ctx.ix.index(ai, rj);
          K koszul = sign_of<K>(R.space.degree_of(r) * A.space.degree_of(ai));
          VecX<K> sa = S.basis_act(ai, s);
          VecX<K> qr = R.basis_mul(r, rj);
          for (Index k = 0; k < ns; ++k) {
            if (sa(k).is_zero()) continue;
            for (Index l = 0; l < nr; ++l)
              if (!qr(l).is_zero())
                M.act(t * n + g, mx.index(k, l)) += koszul * sa(k) * qr(l);
          }
        }
    }
  return M;
}

// i*(T) = T/(T·m): quotient by the image of the maximal-ideal action,
// restricted to a module over A.
template <class K>
DGModule<K> i_star(const TensorContext<K>& ctx, const DGModule<K>& M,
                   const std::string& name = "") {
  const auto& R = *ctx.R;
  std::vector<VecX<K>> gens;
  for (Index rj = 0; rj < R.dim(); ++rj) {
    if (rj == R.unit) continue;
    VecX<K> e = ctx.embed_R(R.basis_vec(rj));
    for (Index m = 0; m < M.dim(); ++m) {
      VecX<K> v = M.apply(e, M.basis_vec(m));
      if (!is_zero(v)) gens.push_back(std::move(v));
    }
  }
  MatX<K> sub(M.dim(), static_cast<Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) sub.col(static_cast<Index>(i)) = gens[i];
  sub = column_space<K>(sub);
  auto q = quotient_module(M, sub, name.empty() ? "i*(" + M.name + ")" : name);
  // restrict to A along a ↦ a⊗1
  DGModule<K> out;
  out.name = q.module.name;
  out.over = ctx.A;
  out.side = M.side;
  out.space = q.module.space;
  out.d = q.module.d;
  const Index nq = out.dim();
  out.act = MatX<K>::Zero(ctx.A->dim() * nq, nq);
  for (Index ai = 0; ai < ctx.A->dim(); ++ai) {
    VecX<K> e = ctx.embed_A(ctx.A->basis_vec(ai));
    for (Index j = 0; j < nq; ++j)
      out.act.row(ai * nq + j) =
          (q.proj * M.apply(e, VecX<K>(q.section.col(j)))).transpose();
  }
  return out;
}

// i^!(T) = {x : x·(1⊗m) = 0}: the common kernel of the ideal action, as a
// module over A.
template <class K>
DGModule<K> i_shriek(const TensorContext<K>& ctx, const DGModule<K>& M,
                     const std::string& name = "") {
  const auto& R = *ctx.R;
  std::vector<MatX<K>> ops;
  for (Index rj = 0; rj < R.dim(); ++rj) {
    if (rj == R.unit) continue;
    ops.push_back(M.action_operator(ctx.embed_R(R.basis_vec(rj))));
  }
  MatX<K> stacked(static_cast<Index>(ops.size()) * M.dim(), M.dim());
  for (std::size_t i = 0; i < ops.size(); ++i)
    stacked.middleRows(static_cast<Index>(i) * M.dim(), M.dim()) = ops[i];
  MatX<K> ker = ops.empty() ? MatX<K>(MatX<K>::Identity(M.dim(), M.dim())) : kernel<K>(stacked);
  auto s = submodule(M, ker, name.empty() ? "i!(" + M.name + ")" : name);
  DGModule<K> out;
  out.name = s.module.name;
  out.over = ctx.A;
  out.side = M.side;
  out.space = s.module.space;
  out.d = s.module.d;
  const Index nq = out.dim();
  out.act = MatX<K>::Zero(ctx.A->dim() * nq, nq);
  for (Index ai = 0; ai < ctx.A->dim(); ++ai) {
    VecX<K> e = ctx.embed_A(ctx.A->basis_vec(ai));
    for (Index j = 0; j < nq; ++j)
      out.act.row(ai * nq + j) =
          (s.retraction * M.apply(e, VecX<K>(s.inclusion.col(j)))).transpose();
  }
  return out;
}

// Augmented homomorphism of algebras given by its matrix on coordinates.
template <class K>
struct AlgebraHom {
  AlgebraPtr<K> source, target;
  MatX<K> map;  // dim(target) x dim(source)

  VecX<K> operator()(const VecX<K>& x) const { return map * x; }
};

template <class K>
std::vector<Violation> validate_hom(const AlgebraHom<K>& h) {
  const auto& A = *h.source;
  const auto& B = *h.target;
  std::vector<Violation> out;
  if (!is_homogeneous(A.space, B.space, 0, h.map)) {
    out.push_back({"hom-degree", "not degree 0"});
    return out;
  }
  if (h.map * A.unit_vec() != B.unit_vec()) {
    out.push_back({"hom-unit", "does not preserve the unit"});
    return out;
  }
  if (!is_zero(MatX<K>(h.map * A.d - B.d * h.map))) {
    out.push_back({"hom-differential", "does not commute with d"});
    return out;
  }
  for (Index i = 0; i < A.dim(); ++i)
    for (Index j = 0; j < A.dim(); ++j) {
      VecX<K> lhs = h.map * A.basis_mul(i, j);
      VecX<K> rhs = B.mul(VecX<K>(h.map * A.basis_vec(i)), VecX<K>(h.map * A.basis_vec(j)));
      if (lhs != rhs) {
        out.push_back({"hom-multiplicative",
                       A.space.label(i) + "*" + A.space.label(j) + " violated"});
        return out;
      }
    }
  if (A.aug && B.aug && !is_zero(MatX<K>(MatX<K>((*B.aug) * h.map) - MatX<K>(*A.aug))))
    out.push_back({"hom-augmented", "does not commute with augmentations"});
  return out;
}

// restriction of scalars along 1⊗φ : A⊗R -> A⊗Q ... used as φ_*
template <class K>
DGModule<K> restrict_along(const TensorContext<K>& ctx_src, const TensorContext<K>& ctx_tgt,
                           const AlgebraHom<K>& phi, const DGModule<K>& M) {
  // M is over ctx_tgt.T (= A⊗Q); the result is over ctx_src.T (= A⊗R)
  DGModule<K> out;
  out.name = "res(" + M.name + ")";
  out.over = ctx_src.T;
  out.side = M.side;
  out.space = M.space;
  out.d = M.d;
  const Index n = M.dim();
  out.act = MatX<K>::Zero(ctx_src.T->dim() * n, n);
  for (Index ai = 0; ai < ctx_src.A->dim(); ++ai)
    for (Index rj = 0; rj < ctx_src.R->dim(); ++rj) {
      Index t = ctx_src.ix.index(ai, rj);
      VecX<K> phir = phi.map * ctx_src.R->basis_vec(rj);
      VecX<K> img = VecX<K>::Zero(ctx_tgt.T->dim());
      for (Index qj = 0; qj < ctx_tgt.R->dim(); ++qj)
        if (!phir(qj).is_zero()) img(ctx_tgt.ix.index(ai, qj)) = phir(qj);
      MatX<K> op = M.action_operator(img);
      for (Index j = 0; j < n; ++j) out.act.row(t * n + j) = op.col(j).transpose();
    }
  return out;
}

// φ*(M) = M⊗_R Q along φ : R -> Q, for M over A⊗R.
template <class K>
DGModule<K> extend_along(const TensorContext<K>& ctx_src, const TensorContext<K>& ctx_tgt,
                         const AlgebraHom<K>& phi, const DGModule<K>& M) {
  const auto& A = *ctx_src.A;
  const auto& R = *ctx_src.R;
  const auto& Q = *ctx_tgt.R;
  TensorIndexer mx(M.space, Q.space);
  const Index nm = M.dim(), nq = Q.dim(), n = nm * nq;

  // ambient M⊗Q with d⊗1 + 1⊗d and the two-sided action
  DGModule<K> big;
  big.name = M.name + "⊗Q";
  big.over = ctx_tgt.T;
  big.side = Side::Right;
  big.space = mx.space();
  big.d = MatX<K>::Zero(n, n);
  big.act = MatX<K>::Zero(ctx_tgt.T->dim() * n, n);
  for (Index m = 0; m < nm; ++m)
    for (Index q = 0; q < nq; ++q) {
      Index g = mx.index(m, q);
      VecX<K> dm = M.d * M.basis_vec(m);
      for (Index k = 0; k < nm; ++k)
        if (!dm(k).is_zero()) big.d(mx.index(k, q), g) += dm(k);
      VecX<K> dq = Q.diff(Q.basis_vec(q));
      K sg = sign_of<K>(big.space.degree_of(g) - Q.space.degree_of(q));
      for (Index k = 0; k < nq; ++k)
        if (!dq(k).is_zero()) big.d(mx.index(m, k), g) += sg * dq(k);
      for (Index ai = 0; ai < A.dim(); ++ai)
        for (Index qj = 0; qj < nq; ++qj) {
          Index t = ctx_tgt.ix.index(ai, qj);
          // (m⊗q)·(a⊗q') = (-1)^{|q||a|} (m·(a⊗1))⊗(q q')
          K koszul = sign_of<K>(Q.space.degree_of(q) * A.space.degree_of(ai));
          VecX<K> ma = M.apply(ctx_src.embed_A(A.basis_vec(ai)), M.basis_vec(m));
          VecX<K> qq = Q.basis_mul(q, qj);
          for (Index k = 0; k < nm; ++k) {
            if (ma(k).is_zero()) continue;
            for (Index l = 0; l < nq; ++l)
              if (!qq(l).is_zero()) big.act(t * n + g, mx.index(k, l)) += koszul * ma(k) * qq(l);
          }
        }
    }
  // relations (m·(1⊗r))⊗q - m⊗(φ(r)·q), r in the maximal ideal and r = 1
  std::vector<VecX<K>> rels;
  for (Index rj = 0; rj < R.dim(); ++rj) {
    if (rj == R.unit) continue;
    VecX<K> phir = phi.map * R.basis_vec(rj);
    for (Index m = 0; m < nm; ++m) {
      VecX<K> mr = M.apply(ctx_src.embed_R(R.basis_vec(rj)), M.basis_vec(m));
      for (Index q = 0; q < nq; ++q) {
        VecX<K> rel = VecX<K>::Zero(n);
        for (Index k = 0; k < nm; ++k)
          if (!mr(k).is_zero()) rel(mx.index(k, q)) += mr(k);
        VecX<K> pq = Q.mul(phir, Q.basis_vec(q));
        for (Index l = 0; l < nq; ++l)
          if (!pq(l).is_zero()) rel(mx.index(m, l)) -= pq(l);
        if (!is_zero(rel)) rels.push_back(std::move(rel));
      }
    }
  }
  MatX<K> sub(n, static_cast<Index>(rels.size()));
  for (std::size_t i = 0; i < rels.size(); ++i) sub.col(static_cast<Index>(i)) = rels[i];
  sub = column_space<K>(sub);
  auto quot = quotient_module(big, sub, "φ*(" + M.name + ")");
  return quot.module;
}

// ---------------------------------------------------------------------------
// truncation (Lemma-style, base algebra concentrated in degrees <= 0)

template <class K>
struct TruncationTriple {
  DGModule<K> below;   // τ_{<n}
  MatX<K> inclusion;
  DGModule<K> above;   // τ_{>=n} = M / τ_{<n}
  MatX<K> projection;
};

template <class K>
TruncationTriple<K> truncate_module(const DGModule<K>& M, int n) {
  if (M.over->space.total_dim() && M.over->space.max_degree() > 0)
    throw std::invalid_argument("truncate_module: base algebra has positive degrees");
  std::vector<VecX<K>> cols;
  for (Index i = 0; i < M.dim(); ++i)
    if (M.space.degree_of(i) < n) cols.push_back(M.basis_vec(i));
  for (Index i = 0; i < M.dim(); ++i)
    if (M.space.degree_of(i) == n - 1) {
      VecX<K> v = M.d * M.basis_vec(i);
      if (!is_zero(v)) cols.push_back(std::move(v));
    }
  MatX<K> span(M.dim(), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) span.col(static_cast<Index>(i)) = cols[i];
  span = column_space<K>(span);
  auto sub = submodule(M, span, "τ<" + std::to_string(n) + "(" + M.name + ")");
  auto quot = quotient_module(M, sub.inclusion, "τ≥" + std::to_string(n) + "(" + M.name + ")");
  return {std::move(sub.module), std::move(sub.inclusion), std::move(quot.module),
          std::move(quot.proj)};
}

// ---------------------------------------------------------------------------
// M ⊗_B F  (M right B-module, F left B-module carrying a right A-action)

template <class K>
struct BimoduleBF {
  DGModule<K> left;             // left B-module structure on the space
  std::optional<DGModule<K>> right;  // optional right A-module structure, same space
};

template <class K>
DGModule<K> tensor_over_algebra(const DGModule<K>& M, const BimoduleBF<K>& F,
                                const std::string& name = "") {
  if (M.side != Side::Right || F.left.side != Side::Left)
    throw std::invalid_argument("tensor_over_algebra: need right ⊗ left");
  if (!F.right) throw std::invalid_argument("tensor_over_algebra: F needs a right structure");
  const auto& B = *M.over;
  const auto& FL = F.left;
  TensorIndexer mx(M.space, FL.space);
  const Index nm = M.dim(), nf = FL.dim(), n = nm * nf;
  AlgebraPtr<K> Aout = F.right->over;

  DGModule<K> big;
  big.name = name.empty() ? M.name + "⊗_B" + FL.name : name;
  big.over = Aout;
  big.side = Side::Right;
  big.space = mx.space();
  big.d = MatX<K>::Zero(n, n);
  const Index nact = Aout->dim();
  big.act = MatX<K>::Zero(nact * n, n);
  for (Index m = 0; m < nm; ++m)
    for (Index f = 0; f < nf; ++f) {
      Index g = mx.index(m, f);
      VecX<K> dm = M.d * M.basis_vec(m);
      for (Index k = 0; k < nm; ++k)
        if (!dm(k).is_zero()) big.d(mx.index(k, f), g) += dm(k);
      VecX<K> df = FL.d * FL.basis_vec(f);
      K sg = sign_of<K>(M.space.degree_of(m));
      for (Index k = 0; k < nf; ++k)
        if (!df(k).is_zero()) big.d(mx.index(m, k), g) += sg * df(k);
      for (Index ai = 0; ai < nact; ++ai) {
        VecX<K> fa = F.right->basis_act(ai, f);
        for (Index l = 0; l < nf; ++l)
          if (!fa(l).is_zero()) big.act(ai * n + g, mx.index(m, l)) += fa(l);
      }
    }
  std::vector<VecX<K>> rels;  // (m·b)⊗f - m⊗(b·f)
  for (Index bi = 0; bi < B.dim(); ++bi) {
    if (bi == B.unit) continue;
    for (Index m = 0; m < nm; ++m) {
      VecX<K> mb = M.basis_act(bi, m);
      for (Index f = 0; f < nf; ++f) {
        VecX<K> rel = VecX<K>::Zero(n);
        for (Index k = 0; k < nm; ++k)
          if (!mb(k).is_zero()) rel(mx.index(k, f)) += mb(k);
        VecX<K> bf = FL.basis_act(bi, f);
        for (Index l = 0; l < nf; ++l)
          if (!bf(l).is_zero()) rel(mx.index(m, l)) -= bf(l);
        if (!is_zero(rel)) rels.push_back(std::move(rel));
      }
    }
  }
  MatX<K> sub(n, static_cast<Index>(rels.size()));
  for (std::size_t i = 0; i < rels.size(); ++i) sub.col(static_cast<Index>(i)) = rels[i];
  sub = column_space<K>(sub);
  auto quot = quotient_module(big, sub, big.name);
  return quot.module;
}

// ---------------------------------------------------------------------------
// mapping cone and the endomorphisms-preserving-a-summand subalgebra

template <class K>
struct ConeData {
  DGModule<K> cone;             // E[1] ⊕ E'
  std::vector<Index> e_block;   // cone coordinates of the shifted E basis
  std::vector<Index> ep_block;  // cone coordinates of the E' basis
};

template <class K>
ConeData<K> mapping_cone(const DGModule<K>& E, const DGModule<K>& Eprime, const MatX<K>& g) {
  if (E.side != Side::Right || Eprime.side != Side::Right)
    throw std::invalid_argument("mapping_cone: right modules only");
  if (!is_homogeneous(E.space, Eprime.space, 0, g))
    throw std::invalid_argument("mapping_cone: map not of degree 0");
  if (!is_zero(MatX<K>(Eprime.d * g - g * E.d)))
    throw std::invalid_argument("mapping_cone: map not closed");
  const Index ne = E.dim(), np = Eprime.dim(), n = ne + np;
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (Index i = 0; i < ne; ++i) {
    labels.push_back("s" + E.space.label(i));
    degrees.push_back(E.space.degree_of(i) - 1);
  }
  for (Index i = 0; i < np; ++i) {
    labels.push_back(Eprime.space.label(i));
    degrees.push_back(Eprime.space.degree_of(i));
  }
  GradedSpace sp(labels, degrees);
  // the sorted order permutes blocks; build permutation old->new
  std::vector<Index> to_new(static_cast<std::size_t>(n));
  {
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Index old = 0; old < n; ++old) {
      for (Index g2 = 0; g2 < n; ++g2) {
        if (used[static_cast<std::size_t>(g2)]) continue;
        if (sp.label(g2) == labels[static_cast<std::size_t>(old)] &&
            sp.degree_of(g2) == degrees[static_cast<std::size_t>(old)]) {
          to_new[static_cast<std::size_t>(old)] = g2;
          used[static_cast<std::size_t>(g2)] = true;
          break;
        }
      }
    }
  }
  DGModule<K> C;
  C.name = "cone";
  C.over = E.over;
  C.side = Side::Right;
  C.space = sp;
  C.d = MatX<K>::Zero(n, n);
  C.act = MatX<K>::Zero(E.adim() * n, n);
  auto put_d = [&](Index r_old, Index c_old, const K& v) { C.d(to_new[static_cast<std::size_t>(r_old)], to_new[static_cast<std::size_t>(c_old)]) += v; };
  for (Index j = 0; j < ne; ++j) {
    for (Index i = 0; i < ne; ++i)
      if (!E.d(i, j).is_zero()) put_d(i, j, -E.d(i, j));
    for (Index i = 0; i < np; ++i)
      if (!g(i, j).is_zero()) put_d(ne + i, j, g(i, j));
  }
  for (Index j = 0; j < np; ++j)
    for (Index i = 0; i < np; ++i)
      if (!Eprime.d(i, j).is_zero()) put_d(ne + i, ne + j, Eprime.d(i, j));
  for (Index ai = 0; ai < E.adim(); ++ai) {
    for (Index j = 0; j < ne; ++j) {
      VecX<K> r = E.basis_act(ai, j);
      for (Index k = 0; k < ne; ++k)
        if (!r(k).is_zero())
          C.act(ai * n + to_new[static_cast<std::size_t>(j)], to_new[static_cast<std::size_t>(k)]) += r(k);
    }
    for (Index j = 0; j < np; ++j) {
      VecX<K> r = Eprime.basis_act(ai, j);
      for (Index k = 0; k < np; ++k)
        if (!r(k).is_zero())
          C.act(ai * n + to_new[static_cast<std::size_t>(ne + j)], to_new[static_cast<std::size_t>(ne + k)]) += r(k);
    }
  }
  ConeData<K> out;
  out.cone = std::move(C);
  for (Index i = 0; i < ne; ++i) out.e_block.push_back(to_new[static_cast<std::size_t>(i)]);
  for (Index i = 0; i < np; ++i) out.ep_block.push_back(to_new[static_cast<std::size_t>(ne + i)]);
  return out;
}

// DG algebra structure on a composition-closed space of operators on E
// (identity is adjoined as a basis element if missing).
template <class K>
struct OperatorAlgebra {
  DGAlgebra<K> algebra;
  std::vector<MatX<K>> ops;
};

template <class K>
OperatorAlgebra<K> algebra_from_ops(const DGModule<K>& E, std::vector<MatX<K>> pool,
                                    const std::string& name) {
  const Index n = E.dim();
  std::vector<MatX<K>> ops;
  ops.push_back(MatX<K>::Identity(n, n));
  {
    const Index sz = n * n;
    MatX<K> poolm(sz, static_cast<Index>(pool.size()));
    for (std::size_t b = 0; b < pool.size(); ++b)
      poolm.col(static_cast<Index>(b)) = Eigen::Map<const VecX<K>>(pool[b].data(), sz);
    MatX<K> idcol(sz, 1);
    idcol.col(0) = Eigen::Map<const VecX<K>>(ops[0].data(), sz);
    MatX<K> extra = extend_basis<K>(idcol, poolm);
    for (Index j = 0; j < extra.cols(); ++j) {
      MatX<K> F(n, n);
      Eigen::Map<VecX<K>>(F.data(), sz) = extra.col(j);
      ops.push_back(std::move(F));
    }
  }
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (std::size_t b = 0; b < ops.size(); ++b) {
    labels.push_back(name + std::to_string(b));
    int deg = 0;
    bool seen = false;
    for (Index j = 0; j < n && !seen; ++j)
      for (Index i = 0; i < n; ++i)
        if (!ops[b](i, j).is_zero()) {
          deg = E.space.degree_of(i) - E.space.degree_of(j);
          seen = true;
          break;
        }
    degrees.push_back(deg);
  }
  GradedSpace sp(labels, degrees);
  std::vector<MatX<K>> sorted(ops.size());
  {
    std::vector<bool> used(ops.size(), false);
    for (Index g = 0; g < sp.total_dim(); ++g)
      for (std::size_t b = 0; b < ops.size(); ++b) {
        if (used[b] || labels[b] != sp.label(g)) continue;
        sorted[static_cast<std::size_t>(g)] = ops[b];
        used[b] = true;
        break;
      }
  }
  ops = std::move(sorted);
  DGAlgebra<K> B;
  B.name = name;
  B.field = E.over->field;
  B.space = sp;
  const Index q = sp.total_dim();
  for (Index g = 0; g < q; ++g)
    if (ops[static_cast<std::size_t>(g)] == MatX<K>(MatX<K>::Identity(n, n))) B.unit = g;
  B.mul_table = MatX<K>::Zero(q * q, q);
  B.d = MatX<K>::Zero(q, q);
  for (Index a = 0; a < q; ++a) {
    MatX<K> da = E.d * ops[static_cast<std::size_t>(a)] -
                 sign_of<K>(sp.degree_of(a)) * ops[static_cast<std::size_t>(a)] * E.d;
    B.d.col(a) = express_in_maps<K>(ops, da);
    for (Index b = 0; b < q; ++b)
      B.mul_table.row(a * q + b) = express_in_maps<K>(
          ops, MatX<K>(ops[static_cast<std::size_t>(a)] * ops[static_cast<std::size_t>(b)])).transpose();
  }
  return {std::move(B), std::move(ops)};
}

// Zig-zag End(E) <- C -> End(E') through the endomorphisms of the cone that
// leave E' stable, with acyclicity verdicts for both kernels.
template <class K>
struct KellerZigzag {
  ConeData<K> cone;
  OperatorAlgebra<K> C;        // subalgebra of End(cone)
  OperatorAlgebra<K> endE;
  OperatorAlgebra<K> endEp;
  MatX<K> p;                   // C-coords -> End(E')-coords
  MatX<K> q;                   // C-coords -> End(E)-coords
  bool p_quasi_iso = false;
  bool q_quasi_iso = false;
};

template <class K>
bool subcomplex_acyclic(const GradedSpace& space, const MatX<K>& d, MatX<K> sub) {
  if (sub.cols() == 0) return true;
  sub = sort_columns_by_degree<K>(space, std::move(sub));
  MatX<K> ext = extend_basis<K>(sub, MatX<K>(MatX<K>::Identity(d.rows(), d.rows())));
  MatX<K> full(d.rows(), sub.cols() + ext.cols());
  full << sub, ext;
  auto inv = inverse<K>(full);
  if (!inv) throw std::logic_error("subcomplex_acyclic: completion failed");
  MatX<K> retr = inv->topRows(sub.cols());
  for (Index j = 0; j < sub.cols(); ++j)
    if (!in_span<K>(sub, VecX<K>(d * sub.col(j))))
      throw std::logic_error("subcomplex_acyclic: not d-stable");
  GradedSpace sp = space_from_columns<K>(space, sub, "v");
  Complex<K> c{sp, MatX<K>(retr * d * sub), Window::all()};
  return acyclic_on(c, Window::at(sp.min_degree() - 1, sp.max_degree() + 1));
}

template <class K>
KellerZigzag<K> mapping_cone_keller(const DGModule<K>& E, const DGModule<K>& Eprime,
                                    const MatX<K>& g) {
  KellerZigzag<K> out;
  out.cone = mapping_cone(E, Eprime, g);
  const DGModule<K>& C = out.cone.cone;
  HomComplex<K> H = hom_complex(C, C, "c");
  // stability: f(E') ⊆ E'
  std::vector<MatX<K>> stable;
  const Index nb = static_cast<Index>(H.basis.size());
  std::vector<Eigen::Matrix<K, 1, Eigen::Dynamic>> rows;
  for (Index col : out.cone.ep_block)
    for (Index row : out.cone.e_block) {
      Eigen::Matrix<K, 1, Eigen::Dynamic> r(nb);
      bool nz = false;
      for (Index b = 0; b < nb; ++b) {
        r(b) = H.basis[static_cast<std::size_t>(b)](row, col);
        if (!r(b).is_zero()) nz = true;
      }
      if (nz) rows.push_back(std::move(r));
    }
  MatX<K> constr = MatX<K>::Zero(static_cast<Index>(rows.size()), nb);
  for (std::size_t i = 0; i < rows.size(); ++i) constr.row(static_cast<Index>(i)) = rows[i];
  MatX<K> coeffs = rows.empty() ? MatX<K>(MatX<K>::Identity(nb, nb)) : kernel<K>(constr);
  for (Index j = 0; j < coeffs.cols(); ++j) stable.push_back(H.realize(VecX<K>(coeffs.col(j))));
  out.C = algebra_from_ops(C, std::move(stable), "c");
  out.endE = algebra_from_ops(E, hom_complex(E, E).basis, "a");
  out.endEp = algebra_from_ops(Eprime, hom_complex(Eprime, Eprime).basis, "b");

  const Index qc = out.C.algebra.dim();
  out.p = MatX<K>::Zero(out.endEp.algebra.dim(), qc);
  out.q = MatX<K>::Zero(out.endE.algebra.dim(), qc);
  const Index ne = E.dim(), np = Eprime.dim();
  for (Index b = 0; b < qc; ++b) {
    const MatX<K>& f = out.C.ops[static_cast<std::size_t>(b)];
    MatX<K> fp(np, np), fe(ne, ne);
    for (Index i = 0; i < np; ++i)
      for (Index j = 0; j < np; ++j) fp(i, j) = f(out.cone.ep_block[static_cast<std::size_t>(i)], out.cone.ep_block[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < ne; ++i)
      for (Index j = 0; j < ne; ++j) fe(i, j) = f(out.cone.e_block[static_cast<std::size_t>(i)], out.cone.e_block[static_cast<std::size_t>(j)]);
    out.p.col(b) = express_in_maps<K>(out.endEp.ops, fp);
    // induced map on cone/E' = E[1], un-shifted by the degree sign twist
    out.q.col(b) = express_in_maps<K>(
        out.endE.ops, MatX<K>(sign_of<K>(out.C.algebra.space.degree_of(b)) * fe));
  }
  out.p_quasi_iso = subcomplex_acyclic<K>(out.C.algebra.space, out.C.algebra.d, kernel<K>(out.p));
  out.q_quasi_iso = subcomplex_acyclic<K>(out.C.algebra.space, out.C.algebra.d, kernel<K>(out.q));
  return out;
}

// ---------------------------------------------------------------------------
// dual of an artinian algebra: R* with both module structures, the counit and
// the coaugmentation, plus the comultiplication dual to the product

template <class K>
struct DualCoalgebra {
  AlgebraPtr<K> source;
  GradedSpace space;         // e_i* in degree -|e_i|, aligned so dual_index works
  std::vector<Index> dual_of;  // dual_of[g] = index in R of the functional e_g*
  DGModule<K> left;          // left R-action  (side = Left)
  DGModule<K> right;         // right R-action (side = Right)
  Eigen::Matrix<K, 1, Eigen::Dynamic> counit;  // f -> f(1)
  VecX<K> coaug;             // image of 1 under k -> R*
  MatX<K> comul;             // R* -> R*⊗R* in pair coordinates of TensorIndexer
  TensorIndexer pair_ix;     // (R*, R*) indexer for comul

  Index dual_index(Index i_in_R) const {
    for (Index g = 0; g < static_cast<Index>(dual_of.size()); ++g)
      if (dual_of[static_cast<std::size_t>(g)] == i_in_R) return g;
    throw std::logic_error("dual_index: missing");
  }
  // evaluation pairing <e_g*, e_i>
  K eval(Index g, Index i) const {
    return dual_of[static_cast<std::size_t>(g)] == i ? source->one() : K(0);
  }
};

template <class K>
DualCoalgebra<K> dual_of_artinian(const ArtinianProfile<K>& prof) {
  AlgebraPtr<K> R = prof.algebra;
  const auto& A = *R;
  const Index n = A.dim();
  DualCoalgebra<K> out;
  out.source = R;
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (Index i = 0; i < n; ++i) {
    labels.push_back(A.space.label(i) + "*");
    degrees.push_back(-A.space.degree_of(i));
  }
  out.space = GradedSpace(labels, degrees);
  out.dual_of.resize(static_cast<std::size_t>(n));
  for (Index g = 0; g < n; ++g) {
    auto idx = A.space.find(out.space.label(g).substr(0, out.space.label(g).size() - 1));
    if (!idx) throw std::logic_error("dual_of_artinian: label mismatch");
    out.dual_of[static_cast<std::size_t>(g)] = *idx;
  }
  // differential: (df)(r) = -(-1)^{|f|} f(dr)
  MatX<K> d = MatX<K>::Zero(n, n);
  for (Index g = 0; g < n; ++g) {
    Index i = out.dual_of[static_cast<std::size_t>(g)];
    K s = -sign_of<K>(out.space.degree_of(g));
    for (Index j = 0; j < n; ++j) {
      K c = A.d(i, j);  // coefficient of e_i in d(e_j)
      if (!c.is_zero()) d(out.dual_index(j), g) += s * c;
    }
  }
  // left action: (r·f)(q) = (-1)^{(|f|+|q|)|r|} f(q r)
  DGModule<K> L;
  L.name = A.name + "*_left";
  L.over = R;
  L.side = Side::Left;
  L.space = out.space;
  L.d = d;
  L.act = MatX<K>::Zero(n * n, n);
  for (Index ri = 0; ri < n; ++ri)
    for (Index fg = 0; fg < n; ++fg) {
      Index fi = out.dual_of[static_cast<std::size_t>(fg)];
      for (Index qi = 0; qi < n; ++qi) {
        K c = A.basis_mul(qi, ri)(fi);  // f(q r)
        if (c.is_zero()) continue;
        int sgn_exp = (out.space.degree_of(fg) + A.space.degree_of(qi)) * A.space.degree_of(ri);
        L.act(ri * n + fg, out.dual_index(qi)) += sign_of<K>(sgn_exp) * c;
      }
    }
  // right action: (f·r)(p) = f(r p)
  DGModule<K> Rm;
  Rm.name = A.name + "*_right";
  Rm.over = R;
  Rm.side = Side::Right;
  Rm.space = out.space;
  Rm.d = d;
  Rm.act = MatX<K>::Zero(n * n, n);
  for (Index ri = 0; ri < n; ++ri)
    for (Index fg = 0; fg < n; ++fg) {
      Index fi = out.dual_of[static_cast<std::size_t>(fg)];
      for (Index pi = 0; pi < n; ++pi) {
        K c = A.basis_mul(ri, pi)(fi);  // f(r p)
        if (!c.is_zero()) Rm.act(ri * n + fg, out.dual_index(pi)) += c;
      }
    }
  out.left = std::move(L);
  out.right = std::move(Rm);
  out.counit = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(n);
  out.counit(out.dual_index(A.unit)) = A.one();
  // coaugmentation: the augmentation functional (1* in normal form)
  out.coaug = VecX<K>::Zero(n);
  if (A.aug) {
    for (Index i = 0; i < n; ++i)
      if (!(*A.aug)(i).is_zero()) out.coaug(out.dual_index(i)) += (*A.aug)(i);
  } else {
    out.coaug(out.dual_index(A.unit)) = A.one();
  }
  // comultiplication dual to the product: Δ(e_k*) = Σ (-1)^{|e_a||e_b|} c^k_{ab} e_a*⊗e_b*
  out.pair_ix = TensorIndexer(out.space, out.space);
  out.comul = MatX<K>::Zero(n * n, n);
  for (Index k = 0; k < n; ++k)
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) {
        K c = A.basis_mul(a, b)(k);
        if (c.is_zero()) continue;
        int e = A.space.degree_of(a) * A.space.degree_of(b);
        out.comul(out.pair_ix.index(out.dual_index(a), out.dual_index(b)), out.dual_index(k)) +=
            sign_of<K>(e) * c;
      }
  return out;
}

// ---------------------------------------------------------------------------
// graded R-free <-> graded R-cofree swap

// M ⊗_R R*  for M a right (A⊗R)-module.
template <class K>
DGModule<K> tensor_R_dual(const TensorContext<K>& ctx, const DGModule<K>& M,
                          const DualCoalgebra<K>& dual, const std::string& name = "") {
  const auto& A = *ctx.A;
  const auto& R = *ctx.R;
  TensorIndexer mx(M.space, dual.space);
  const Index nm = M.dim(), nr = R.dim(), n = nm * nr;
  DGModule<K> big;
  big.name = name.empty() ? M.name + "⊗R*" : name;
  big.over = ctx.T;
  big.side = Side::Right;
  big.space = mx.space();
  big.d = MatX<K>::Zero(n, n);
  big.act = MatX<K>::Zero(ctx.T->dim() * n, n);
  for (Index m = 0; m < nm; ++m)
    for (Index f = 0; f < nr; ++f) {
      Index g = mx.index(m, f);
      VecX<K> dm = M.d * M.basis_vec(m);
      for (Index k = 0; k < nm; ++k)
        if (!dm(k).is_zero()) big.d(mx.index(k, f), g) += dm(k);
      VecX<K> df = dual.right.d * dual.right.basis_vec(f);
      K sg = sign_of<K>(M.space.degree_of(m));
      for (Index k = 0; k < nr; ++k)
        if (!df(k).is_zero()) big.d(mx.index(m, k), g) += sg * df(k);
      for (Index ai = 0; ai < A.dim(); ++ai)
        for (Index rj = 0; rj < nr; ++rj) {
          Index t = ctx.ix.index(ai, rj);
          // (m⊗f)·(a⊗r) = (-1)^{|f||a|}(m·(a⊗1))⊗(f·r)
          K koszul = sign_of<K>(dual.space.degree_of(f) * A.space.degree_of(ai));
          VecX<K> ma = M.apply(ctx.embed_A(A.basis_vec(ai)), M.basis_vec(m));
          VecX<K> fr = dual.right.basis_act(rj, f);
          for (Index k = 0; k < nm; ++k) {
            if (ma(k).is_zero()) continue;
            for (Index l = 0; l < nr; ++l)
              if (!fr(l).is_zero()) big.act(t * n + g, mx.index(k, l)) += koszul * ma(k) * fr(l);
          }
        }
    }
  // relations (m·(1⊗r))⊗f - m⊗(r·f)
  std::vector<VecX<K>> rels;
  for (Index rj = 0; rj < nr; ++rj) {
    if (rj == R.unit) continue;
    for (Index m = 0; m < nm; ++m) {
      VecX<K> mr = M.apply(ctx.embed_R(R.basis_vec(rj)), M.basis_vec(m));
      for (Index f = 0; f < nr; ++f) {
        VecX<K> rel = VecX<K>::Zero(n);
        for (Index k = 0; k < nm; ++k)
          if (!mr(k).is_zero()) rel(mx.index(k, f)) += mr(k);
        VecX<K> rf = dual.left.basis_act(rj, f);
        for (Index l = 0; l < nr; ++l)
          if (!rf(l).is_zero()) rel(mx.index(m, l)) -= rf(l);
        if (!is_zero(rel)) rels.push_back(std::move(rel));
      }
    }
  }
  MatX<K> sub(n, static_cast<Index>(rels.size()));
  for (std::size_t i = 0; i < rels.size(); ++i) sub.col(static_cast<Index>(i)) = rels[i];
  sub = column_space<K>(sub);
  auto quot = quotient_module(big, sub, big.name);
  return quot.module;
}

// Basis of "graded maps X -> M intertwining a family of operator pairs":
// F with F∘opX[i] = opM[i]∘F for every i, split by degree shift.
template <class K>
struct GradedMapBasis {
  std::vector<MatX<K>> maps;
  std::vector<int> degrees;
};

template <class K>
GradedMapBasis<K> intertwiner_basis(const GradedSpace& Xsp, const GradedSpace& Msp,
                                    const std::vector<MatX<K>>& opX,
                                    const std::vector<MatX<K>>& opM) {
  const Index nx = Xsp.total_dim(), nm = Msp.total_dim();
  GradedMapBasis<K> out;
  int lo = (nm && nx) ? Msp.min_degree() - Xsp.max_degree() : 0;
  int hi = (nm && nx) ? Msp.max_degree() - Xsp.min_degree() : -1;
  for (int sdeg = lo; sdeg <= hi; ++sdeg) {
    std::vector<std::pair<Index, Index>> slots;
    for (Index j = 0; j < nx; ++j)
      for (Index i = 0; i < nm; ++i)
        if (Msp.degree_of(i) == Xsp.degree_of(j) + sdeg) slots.emplace_back(i, j);
    if (slots.empty()) continue;
    const Index u = static_cast<Index>(slots.size());
    std::vector<Eigen::Matrix<K, 1, Eigen::Dynamic>> rows;
    for (std::size_t o = 0; o < opX.size(); ++o) {
      for (Index xj = 0; xj < nx; ++xj)
        for (Index mi = 0; mi < nm; ++mi) {
          Eigen::Matrix<K, 1, Eigen::Dynamic> row = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(u);
          bool nz = false;
          for (Index t = 0; t < u; ++t) {
            auto [ri, cj] = slots[static_cast<std::size_t>(t)];
            K c(0);
            if (ri == mi && !opX[o](cj, xj).is_zero()) c += opX[o](cj, xj);
            if (cj == xj) c -= opM[o](mi, ri);
            if (!c.is_zero()) nz = true;
            row(t) = c;
          }
          if (nz) rows.push_back(std::move(row));
        }
    }
    MatX<K> C = MatX<K>::Zero(static_cast<Index>(rows.size()), u);
    for (std::size_t r = 0; r < rows.size(); ++r) C.row(static_cast<Index>(r)) = rows[r];
    MatX<K> sol = rows.empty() ? MatX<K>(MatX<K>::Identity(u, u)) : kernel<K>(C);
    for (Index b = 0; b < sol.cols(); ++b) {
      MatX<K> F = MatX<K>::Zero(nm, nx);
      for (Index t = 0; t < u; ++t)
        F(slots[static_cast<std::size_t>(t)].first, slots[static_cast<std::size_t>(t)].second) = sol(t, b);
      out.maps.push_back(std::move(F));
      out.degrees.push_back(sdeg);
    }
  }
  return out;
}

// Right-S-linear graded maps X -> M (X a right S-module; M's S-action given by
// the embedding of S into M's base algebra).
template <class K>
GradedMapBasis<K> right_linear_map_basis(const DGModule<K>& X,
                                         const std::vector<MatX<K>>& s_ops_on_X,
                                         const DGModule<K>& M,
                                         const std::vector<MatX<K>>& s_ops_on_M) {
  return intertwiner_basis<K>(X.space, M.space, s_ops_on_X, s_ops_on_M);
}

// Hom_{S^0}(X, M): right-S-linear maps from a (left-R, right-S)-bimodule X
// into a right (A⊗S)-module M, carrying the right (A⊗R)-action
//   (g·(a⊗r))(x) = (-1)^{|a|(|r|+|x|)} g(r·x)·(a⊗1).
template <class K>
DGModule<K> hom_over_base(const TensorContext<K>& ctx_out,  // A⊗R
                          const TensorContext<K>& ctx_in,   // A⊗S
                          const DGModule<K>& Xright,        // right S-module
                          const DGModule<K>& Xleft,         // left R-module, same space
                          const DGModule<K>& M,             // over ctx_in.T
                          const std::string& name = "") {
  const auto& A = *ctx_out.A;
  const auto& R = *ctx_out.R;
  const auto& S = *ctx_in.R;
  const Index nx = Xright.dim(), nm = M.dim();
  std::vector<MatX<K>> opX, opM;
  for (Index si = 0; si < S.dim(); ++si) {
    if (si == S.unit) continue;
    opX.push_back(Xright.action_operator(S.basis_vec(si)));
    opM.push_back(M.action_operator(ctx_in.embed_R(S.basis_vec(si))));
  }
  GradedMapBasis<K> basis = intertwiner_basis<K>(Xright.space, M.space, opX, opM);
  std::vector<MatX<K>>& maps = basis.maps;
  std::vector<int>& degs = basis.degrees;
  std::vector<std::string> labels;
  for (std::size_t b = 0; b < maps.size(); ++b) labels.push_back("h" + std::to_string(b));
  GradedSpace sp(labels, degs);
  std::vector<MatX<K>> sorted(maps.size());
  {
    std::vector<bool> used(maps.size(), false);
    for (Index g = 0; g < sp.total_dim(); ++g)
      for (std::size_t b = 0; b < maps.size(); ++b) {
        if (used[b] || labels[b] != sp.label(g)) continue;
        sorted[static_cast<std::size_t>(g)] = maps[b];
        used[b] = true;
        break;
      }
  }
  maps = std::move(sorted);
  const Index q = sp.total_dim();
  DGModule<K> H;
  H.name = name.empty() ? "Hom(" + Xright.name + "," + M.name + ")" : name;
  H.over = ctx_out.T;
  H.side = Side::Right;
  H.space = sp;
  H.d = MatX<K>::Zero(q, q);
  for (Index b = 0; b < q; ++b) {
    MatX<K> dF = M.d * maps[static_cast<std::size_t>(b)] -
                 sign_of<K>(sp.degree_of(b)) * maps[static_cast<std::size_t>(b)] * Xright.d;
    H.d.col(b) = express_in_maps<K>(maps, dF);
  }
  H.act = MatX<K>::Zero(ctx_out.T->dim() * q, q);
  for (Index ai = 0; ai < A.dim(); ++ai)
    for (Index rj = 0; rj < R.dim(); ++rj) {
      Index t = ctx_out.ix.index(ai, rj);
      VecX<K> ea = ctx_in.embed_A(A.basis_vec(ai));
      MatX<K> ract = Xleft.action_operator(Xleft.over->basis_vec(rj));  // x -> r·x
      for (Index b = 0; b < q; ++b) {
        const MatX<K>& F = maps[static_cast<std::size_t>(b)];
        MatX<K> G = MatX<K>::Zero(nm, nx);
        for (Index xj = 0; xj < nx; ++xj) {
          // (g·(a⊗r))(x_j) = (-1)^{|a|(|r|+|x_j|)} g(r·x_j)·(a⊗1)
          VecX<K> gx = F * ract.col(xj);
          VecX<K> res = M.apply(ea, gx);
          K s = sign_of<K>(A.space.degree_of(ai) *
                           (R.space.degree_of(rj) + Xright.space.degree_of(xj)));
          G.col(xj) = s * res;
        }
        H.act.row(t * q + b) = express_in_maps<K>(maps, G).transpose();
      }
    }
  return H;
}

// Hom_{R^0}(R*, M): the cofree -> free swap.
template <class K>
DGModule<K> hom_R_dual(const TensorContext<K>& ctx, const DGModule<K>& M,
                       const DualCoalgebra<K>& dual, const std::string& name = "") {
  return hom_over_base(ctx, ctx, dual.right, dual.left, M,
                       name.empty() ? "Hom(R*," + M.name + ")" : name);
}

// Structural detection of graded R-freeness: a degree-0 graded splitting of
// M -> i*M extending to a chain-level graded iso (i*M)⊗R -> M.
template <class K>
std::optional<MatX<K>> graded_free_witness(const TensorContext<K>& ctx, const DGModule<K>& M) {
  // a graded lift of i*M paired against R must hit a basis of M
  const auto& R = *ctx.R;
  std::vector<VecX<K>> gens;
  for (Index rj = 0; rj < R.dim(); ++rj) {
    if (rj == R.unit) continue;
    VecX<K> e = ctx.embed_R(R.basis_vec(rj));
    for (Index m = 0; m < M.dim(); ++m) {
      VecX<K> v = M.apply(e, M.basis_vec(m));
      if (!is_zero(v)) gens.push_back(std::move(v));
    }
  }
  MatX<K> sub(M.dim(), static_cast<Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) sub.col(static_cast<Index>(i)) = gens[i];
  sub = column_space<K>(sub);
  MatX<K> lift = sort_columns_by_degree<K>(
      M.space, extend_basis<K>(sub, MatX<K>(MatX<K>::Identity(M.dim(), M.dim()))));
  // candidate map (i*M basis j, R basis r) -> lift_j · (1⊗r)
  const Index nk = lift.cols(), nr = R.dim();
  MatX<K> phi(M.dim(), nk * nr);
  for (Index j = 0; j < nk; ++j)
    for (Index r = 0; r < nr; ++r)
      phi.col(j * nr + r) = M.apply(ctx.embed_R(R.basis_vec(r)), VecX<K>(lift.col(j)));
  if (rank<K>(phi) == M.dim() && M.dim() == nk * nr) return phi;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// module comparisons

template <class K>
bool is_module_map(const DGModule<K>& M, const DGModule<K>& N, const MatX<K>& f) {
  if (f.rows() != N.dim() || f.cols() != M.dim()) return false;
  for (Index ai = 0; ai < M.adim(); ++ai) {
    MatX<K> actM = M.action_operator(M.over->basis_vec(ai));
    MatX<K> actN = N.action_operator(N.over->basis_vec(ai));
    if (!is_zero(MatX<K>(f * actM - actN * f))) return false;
  }
  return true;
}

template <class K>
bool is_chain_map(const DGModule<K>& M, const DGModule<K>& N, const MatX<K>& f) {
  return is_zero(MatX<K>(f * M.d - N.d * f));
}

// closed degree-0 module isomorphism along the given matrix
template <class K>
bool modules_match_via(const DGModule<K>& M, const DGModule<K>& N, const MatX<K>& f) {
  if (M.dim() != N.dim()) return false;
  if (!is_homogeneous(M.space, N.space, 0, f)) return false;
  if (rank<K>(f) != M.dim()) return false;
  return is_chain_map(M, N, f) && is_module_map(M, N, f);
}

}  // namespace dgdeform
