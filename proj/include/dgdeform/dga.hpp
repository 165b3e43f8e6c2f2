#pragma once

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dgdeform/graded.hpp"

namespace dgdeform {

template <class K>
K sign_of(int exponent) {
  return (exponent % 2 == 0) ? K(1) : K(-1);
}

struct Violation {
  std::string axiom;
  std::string detail;
};

inline std::string violations_text(const std::vector<Violation>& vs) {
  std::string out;
  for (const auto& v : vs) out += v.axiom + ": " + v.detail + "\n";
  return out;
}

struct ValidationError : std::runtime_error {
  std::vector<Violation> violations;
  explicit ValidationError(std::vector<Violation> vs)
      : std::runtime_error(violations_text(vs)), violations(std::move(vs)) {}
};

// Finite-dimensional DG algebra given by structure constants on a graded
// basis. Element values are coordinate vectors against space's global order.
template <class K>
struct DGAlgebra {
  std::string name;
  FieldSpec field;
  GradedSpace space;
  Index unit = 0;
  MatX<K> mul_table;  // row pair_index(i,j) = coordinates of e_i * e_j
  MatX<K> d;          // column j = coordinates of d(e_j)
  std::optional<Eigen::Matrix<K, 1, Eigen::Dynamic>> aug;

  Index dim() const { return space.total_dim(); }
  K one() const { return scalar_from_int<K>(1, field); }

  VecX<K> unit_vec() const {
    VecX<K> v = VecX<K>::Zero(dim());
    v(unit) = one();
    return v;
  }
  VecX<K> basis_vec(Index i) const {
    VecX<K> v = VecX<K>::Zero(dim());
    v(i) = one();
    return v;
  }
  VecX<K> basis_mul(Index i, Index j) const {
    return mul_table.row(i * dim() + j).transpose();
  }

  VecX<K> mul(const VecX<K>& a, const VecX<K>& b) const {
    VecX<K> out = VecX<K>::Zero(dim());
    for (Index i = 0; i < dim(); ++i) {
      if (a(i).is_zero()) continue;
      for (Index j = 0; j < dim(); ++j) {
        if (b(j).is_zero()) continue;
        out += a(i) * b(j) * basis_mul(i, j);
      }
    }
    return out;
  }

  VecX<K> diff(const VecX<K>& a) const { return d * a; }

  // x -> a*x  (resp. x -> x*a) as a matrix on coordinates.
  MatX<K> left_mult(const VecX<K>& a) const {
    MatX<K> m = MatX<K>::Zero(dim(), dim());
    for (Index j = 0; j < dim(); ++j) m.col(j) = mul(a, basis_vec(j));
    return m;
  }
  MatX<K> right_mult(const VecX<K>& a) const {
    MatX<K> m = MatX<K>::Zero(dim(), dim());
    for (Index j = 0; j < dim(); ++j) m.col(j) = mul(basis_vec(j), a);
    return m;
  }

  // Inverse of 1 + n for nilpotent n, by the geometric series.
  VecX<K> invert_unipotent(const VecX<K>& g) const {
    VecX<K> n = g - unit_vec();
    VecX<K> acc = unit_vec(), pow = n;
    K s(-1);
    for (Index guard = 0; guard <= dim(); ++guard) {
      if (is_zero(pow)) return acc;
      acc += s * pow;
      pow = mul(n, pow);
      s = -s;
    }
    throw std::invalid_argument("invert_unipotent: element is not unipotent");
  }

  Complex<K> as_complex() const { return Complex<K>{space, d, Window::all()}; }

  std::string show(const VecX<K>& v) const { return show_element(space, v); }
};

template <class K>
using AlgebraPtr = std::shared_ptr<const DGAlgebra<K>>;

template <class K>
AlgebraPtr<K> share(DGAlgebra<K> a) {
  return std::make_shared<const DGAlgebra<K>>(std::move(a));
}

// ---------------------------------------------------------------------------
// validation

template <class K>
std::vector<Violation> validate_algebra(const DGAlgebra<K>& A) {
  std::vector<Violation> out;
  const Index n = A.dim();
  auto lbl = [&](Index i) { return A.space.label(i); };

  if (A.mul_table.rows() != n * n || A.mul_table.cols() != n)
    return {{"shape", "multiplication table has wrong shape"}};
  if (A.d.rows() != n || A.d.cols() != n)
    return {{"shape", "differential has wrong shape"}};
  if (A.unit < 0 || A.unit >= n) return {{"unit", "unit index out of range"}};
  if (A.space.degree_of(A.unit) != 0)
    out.push_back({"unit", "unit " + lbl(A.unit) + " is not in degree 0"});

  for (Index i = 0; i < n && out.size() < 8; ++i)
    for (Index j = 0; j < n; ++j) {
      VecX<K> p = A.basis_mul(i, j);
      for (Index k = 0; k < n; ++k)
        if (!p(k).is_zero() &&
            A.space.degree_of(k) != A.space.degree_of(i) + A.space.degree_of(j)) {
          out.push_back({"degree", "product " + lbl(i) + "*" + lbl(j) +
                                       " has inhomogeneous component " + lbl(k)});
          goto after_deg;
        }
    }
after_deg:
  if (!out.empty()) return out;

  for (Index j = 0; j < n; ++j) {
    if (A.basis_mul(A.unit, j) != A.basis_vec(j)) {
      out.push_back({"unit", "1*" + lbl(j) + " != " + lbl(j)});
      return out;
    }
    if (A.basis_mul(j, A.unit) != A.basis_vec(j)) {
      out.push_back({"unit", lbl(j) + "*1 != " + lbl(j)});
      return out;
    }
  }

  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k) {
        VecX<K> left = A.mul(A.basis_mul(i, j), A.basis_vec(k));
        VecX<K> right = A.mul(A.basis_vec(i), A.basis_mul(j, k));
        if (left != right) {
          out.push_back({"associativity",
                         "(" + lbl(i) + "*" + lbl(j) + ")*" + lbl(k) + " != " + lbl(i) +
                             "*(" + lbl(j) + "*" + lbl(k) + ")"});
          return out;
        }
      }

  if (!is_homogeneous(A.space, A.space, 1, A.d)) {
    out.push_back({"differential-degree", "d is not homogeneous of degree +1"});
    return out;
  }
  if (!is_zero(VecX<K>(A.d * A.unit_vec()))) {
    out.push_back({"differential", "d(1) != 0"});
    return out;
  }
  if (!is_zero(MatX<K>(A.d * A.d))) {
    out.push_back({"differential", "d^2 != 0"});
    return out;
  }

  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      VecX<K> lhs = A.diff(A.basis_mul(i, j));
      VecX<K> rhs = A.mul(A.diff(A.basis_vec(i)), A.basis_vec(j)) +
                    sign_of<K>(A.space.degree_of(i)) *
                        A.mul(A.basis_vec(i), A.diff(A.basis_vec(j)));
      if (lhs != rhs) {
        out.push_back({"leibniz", "d(" + lbl(i) + "*" + lbl(j) + ") fails the graded rule"});
        return out;
      }
    }

  if (A.aug) {
    const auto& e = *A.aug;
    if (e.cols() != n) return {{"augmentation", "wrong shape"}};
    for (Index i = 0; i < n; ++i)
      if (!e(i).is_zero() && A.space.degree_of(i) != 0) {
        out.push_back({"augmentation", "nonzero on " + lbl(i) + " of degree != 0"});
        return out;
      }
    if (e(A.unit) != A.one()) {
      out.push_back({"augmentation", "aug(1) != 1"});
      return out;
    }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        K lhs = (e * A.basis_mul(i, j))(0);
        if (lhs != e(i) * e(j)) {
          out.push_back({"augmentation", "aug(" + lbl(i) + "*" + lbl(j) + ") != aug*aug"});
          return out;
        }
      }
    if (!is_zero(MatX<K>(e * A.d))) {
      out.push_back({"augmentation", "aug does not kill d-images"});
      return out;
    }
  }
  return out;
}

template <class K>
DGAlgebra<K> checked(DGAlgebra<K> a) {
  auto vs = validate_algebra(a);
  if (!vs.empty()) throw ValidationError(std::move(vs));
  return a;
}

// ---------------------------------------------------------------------------
// constructions

template <class K>
DGAlgebra<K> opposite_algebra(const DGAlgebra<K>& A) {
  DGAlgebra<K> out = A;
  out.name = A.name + "^op";
  const Index n = A.dim();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out.mul_table.row(i * n + j) =
          sign_of<K>(A.space.degree_of(i) * A.space.degree_of(j)) * A.mul_table.row(j * n + i);
  return out;
}

template <class K>
struct TensorAlgebra {
  DGAlgebra<K> algebra;
  TensorIndexer indexer;  // pair (i in A, j in B) -> global index
};

template <class K>
TensorAlgebra<K> tensor_algebras(const DGAlgebra<K>& A, const DGAlgebra<K>& B) {
  TensorIndexer ix(A.space, B.space);
  const Index na = A.dim(), nb = B.dim(), n = na * nb;
  DGAlgebra<K> T;
  T.name = A.name + "⊗" + B.name;
  T.field = A.field;
  T.space = ix.space();
  T.unit = ix.index(A.unit, B.unit);
  T.mul_table = MatX<K>::Zero(n * n, n);
  T.d = MatX<K>::Zero(n, n);
  for (Index i = 0; i < na; ++i)
    for (Index j = 0; j < nb; ++j) {
      const Index g = ix.index(i, j);
      // d(a⊗b) = da⊗b + (-1)^|a| a⊗db
      VecX<K> dai = A.diff(A.basis_vec(i));
      VecX<K> dbj = B.diff(B.basis_vec(j));
      for (Index k = 0; k < na; ++k)
        if (!dai(k).is_zero()) T.d(ix.index(k, j), g) += dai(k);
      K sa = sign_of<K>(A.space.degree_of(i));
      for (Index k = 0; k < nb; ++k)
        if (!dbj(k).is_zero()) T.d(ix.index(i, k), g) += sa * dbj(k);
      for (Index i2 = 0; i2 < na; ++i2)
        for (Index j2 = 0; j2 < nb; ++j2) {
          const Index g2 = ix.index(i2, j2);
          // (a⊗b)(a'⊗b') = (-1)^{|b||a'|} aa'⊗bb'
          K s = sign_of<K>(B.space.degree_of(j) * A.space.degree_of(i2));
          VecX<K> pa = A.basis_mul(i, i2);
          VecX<K> pb = B.basis_mul(j, j2);
          for (Index k = 0; k < na; ++k) {
            if (pa(k).is_zero()) continue;
            for (Index l = 0; l < nb; ++l)
              if (!pb(l).is_zero()) T.mul_table(g * n + g2, ix.index(k, l)) += s * pa(k) * pb(l);
          }
        }
    }
  if (A.aug && B.aug) {
    Eigen::Matrix<K, 1, Eigen::Dynamic> e = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(n);
    for (Index i = 0; i < na; ++i)
      for (Index j = 0; j < nb; ++j) e(ix.index(i, j)) = (*A.aug)(i) * (*B.aug)(j);
    T.aug = e;
  }
  return {std::move(T), std::move(ix)};
}

// The canonical swap A⊗B -> B⊗A, x⊗y -> (-1)^{|x||y|} y⊗x, as a matrix.
template <class K>
MatX<K> tensor_swap_matrix(const DGAlgebra<K>& A, const DGAlgebra<K>& B,
                           const TensorIndexer& ab, const TensorIndexer& ba) {
  MatX<K> m = MatX<K>::Zero(ba.space().total_dim(), ab.space().total_dim());
  for (Index i = 0; i < A.dim(); ++i)
    for (Index j = 0; j < B.dim(); ++j)
      m(ba.index(j, i), ab.index(i, j)) =
          sign_of<K>(A.space.degree_of(i) * B.space.degree_of(j));
  return m;
}

// ---------------------------------------------------------------------------
// artinian analysis

template <class K>
struct ArtinianProfile {
  AlgebraPtr<K> algebra;
  MatX<K> max_ideal;               // columns: basis of m (global coords)
  int nil_index = 0;               // least n with m^{n+1} = 0
  std::vector<MatX<K>> powers;     // powers[k] = basis of m^{k+1}
  std::vector<MatX<K>> refined;    // descending chain of DG ideals, 1-dim steps,
                                   // starting at m and ending at 0 (exclusive)
};

struct NotArtinian : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class K>
int column_degree(const GradedSpace& sp, const VecX<K>& v) {
  int deg = 0;
  bool seen = false;
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i).is_zero()) continue;
    if (seen && sp.degree_of(i) != deg)
      throw std::invalid_argument("column_degree: inhomogeneous vector");
    deg = sp.degree_of(i);
    seen = true;
  }
  if (!seen) throw std::invalid_argument("column_degree: zero vector");
  return deg;
}

template <class K>
ArtinianProfile<K> artinian_profile(AlgebraPtr<K> R) {
  const auto& A = *R;
  const Index n = A.dim();
  // local normal form: unit is a basis element, the others must span an ideal
  MatX<K> m = MatX<K>::Zero(n, n - 1);
  {
    Index c = 0;
    for (Index i = 0; i < n; ++i)
      if (i != A.unit) m(i, c++) = A.one();
  }
  for (Index i = 0; i < n; ++i) {
    if (i == A.unit) continue;
    for (Index j = 0; j < n; ++j) {
      if (j == A.unit) continue;
      if (!A.basis_mul(i, j)(A.unit).is_zero())
        throw NotArtinian("R/m != k: product " + A.space.label(i) + "*" + A.space.label(j) +
                          " has a unit component (not in local normal form)");
    }
    if (!A.d.col(i).segment(A.unit, 1)(0).is_zero())
      throw NotArtinian("m is not d-closed: d(" + A.space.label(i) + ") has a unit component");
  }

  ArtinianProfile<K> out;
  out.algebra = R;
  out.max_ideal = m;
  // powers of m
  MatX<K> cur = m;
  while (cur.cols() > 0) {
    std::vector<VecX<K>> prods;
    for (Index a = 0; a < cur.cols(); ++a)
      for (Index b = 0; b < m.cols(); ++b) {
        VecX<K> p = A.mul(VecX<K>(cur.col(a)), VecX<K>(m.col(b)));
        if (!is_zero(p)) prods.push_back(std::move(p));
      }
    MatX<K> next(n, static_cast<Index>(prods.size()));
    for (std::size_t i = 0; i < prods.size(); ++i) next.col(static_cast<Index>(i)) = prods[i];
    next = column_space<K>(next);
    if (next.cols() >= cur.cols() && next.cols() > 0)
      throw NotArtinian("maximal ideal is not nilpotent (powers stabilized at dim " +
                        std::to_string(next.cols()) + ")");
    out.powers.push_back(next);
    if (next.cols() == 0) break;
    cur = std::move(next);
  }
  out.nil_index = static_cast<int>(out.powers.size() > 0 ? out.powers.size() : 0);
  if (m.cols() == 0) out.nil_index = 0;
  // powers[] currently holds m^2, m^3, ..., first zero one included
  std::vector<MatX<K>> chain;  // m = P^1 ⊇ m^2 ⊇ ...
  chain.push_back(m);
  for (auto& p : out.powers)
    if (p.cols() > 0) chain.push_back(p);
  out.powers = chain;

  // refine between consecutive powers with flags adapted to the induced
  // differential, so each 1-dim step is d-invariant modulo the previous one
  MatX<K> zero_cols(n, 0);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const MatX<K>& F = chain[k];
    const MatX<K>& G = (k + 1 < chain.size()) ? chain[k + 1] : zero_cols;
    MatX<K> compl_cols = extend_basis<K>(G, F);
    // induced differential on V = F/G in compl coordinates
    Index q = compl_cols.cols();
    MatX<K> full(n, G.cols() + q);
    full << G, compl_cols;
    MatX<K> D = MatX<K>::Zero(q, q);
    for (Index j = 0; j < q; ++j) {
      auto co = coords_in<K>(full, VecX<K>(A.d * compl_cols.col(j)));
      if (!co) throw NotArtinian("power filtration is not d-closed");
      D.col(j) = co->segment(G.cols(), q);
    }
    // flag: image(D) first, then rest of kernel(D), then the remainder
    MatX<K> im = column_space<K>(D);
    MatX<K> ker_ext = extend_basis<K>(im, kernel<K>(D));
    MatX<K> partial(q, im.cols() + ker_ext.cols());
    partial << im, ker_ext;
    MatX<K> rest = extend_basis<K>(partial, MatX<K>(MatX<K>::Identity(q, q)));
    MatX<K> flag(q, q);
    flag << im, ker_ext, rest;
    // descending chain: drop flag vectors from the top
    for (Index keep = q - 1; keep >= 0; --keep) {
      MatX<K> step(n, G.cols() + keep);
      step << G, MatX<K>(compl_cols * flag.leftCols(keep));
      if (step.cols() > 0 || k + 1 == chain.size()) {
        if (step.cols() > 0) out.refined.push_back(step);
      }
    }
  }
  // prepend m itself; chain is m ⊃ ... ⊃ (last nonzero) with 1-dim steps
  out.refined.insert(out.refined.begin(), m);
  // dedupe: first refine step equals m when q>0
  std::vector<MatX<K>> dedup;
  for (auto& s : out.refined) {
    if (!dedup.empty() && dedup.back().cols() == s.cols()) continue;
    dedup.push_back(s);
  }
  out.refined = std::move(dedup);
  return out;
}

// R/I for a two-sided DG ideal given by basis columns.
template <class K>
struct QuotientAlgebra {
  DGAlgebra<K> algebra;
  MatX<K> proj;     // big -> small coordinates
  MatX<K> section;  // small -> big
};

template <class K>
QuotientAlgebra<K> quotient_by_ideal(const DGAlgebra<K>& A, const MatX<K>& ideal,
                                     const std::string& name) {
  const Index n = A.dim();
  // closure checks
  for (Index j = 0; j < ideal.cols(); ++j) {
    if (!in_span<K>(ideal, VecX<K>(A.d * ideal.col(j))))
      throw std::invalid_argument("quotient_by_ideal: ideal not d-closed");
    for (Index i = 0; i < n; ++i) {
      if (!in_span<K>(ideal, A.mul(A.basis_vec(i), VecX<K>(ideal.col(j)))))
        throw std::invalid_argument("quotient_by_ideal: not a left ideal");
      if (!in_span<K>(ideal, A.mul(VecX<K>(ideal.col(j)), A.basis_vec(i))))
        throw std::invalid_argument("quotient_by_ideal: not a right ideal");
    }
  }
  MatX<K> compl_cols = extend_basis<K>(ideal, MatX<K>(MatX<K>::Identity(n, n)));
  Index q = compl_cols.cols();
  MatX<K> full(n, ideal.cols() + q);
  full << ideal, compl_cols;
  auto inv = inverse<K>(full);
  if (!inv) throw std::logic_error("quotient_by_ideal: basis completion failed");
  MatX<K> proj = inv->bottomRows(q);

  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (Index j = 0; j < q; ++j) {
    degrees.push_back(column_degree<K>(A.space, VecX<K>(compl_cols.col(j))));
    labels.push_back(name + "_" + std::to_string(j));
  }
  // keep the unit label recognizable
  DGAlgebra<K> Q;
  Q.name = name;
  Q.field = A.field;
  Q.space = GradedSpace(labels, degrees);
  // GradedSpace sorts by degree; rebuild proj/section against sorted order
  std::vector<Index> order(static_cast<std::size_t>(q));
  {
    std::vector<std::pair<int, Index>> keyed;
    for (Index j = 0; j < q; ++j) keyed.emplace_back(degrees[static_cast<std::size_t>(j)], j);
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (Index g = 0; g < q; ++g) order[static_cast<std::size_t>(g)] = keyed[static_cast<std::size_t>(g)].second;
  }
  MatX<K> sec_sorted(n, q);
  MatX<K> proj_sorted(q, n);
  for (Index g = 0; g < q; ++g) {
    sec_sorted.col(g) = compl_cols.col(order[static_cast<std::size_t>(g)]);
    proj_sorted.row(g) = proj.row(order[static_cast<std::size_t>(g)]);
  }
  VecX<K> unit_coords = proj_sorted * A.unit_vec();
  Index uidx = -1;
  for (Index g = 0; g < q; ++g)
    if (!unit_coords(g).is_zero()) uidx = g;
  if (uidx < 0) throw std::invalid_argument("quotient_by_ideal: unit dies in the quotient");
  {
    // swap section column uidx for the unit's image so [1] is a basis vector
    sec_sorted.col(uidx) = A.unit_vec();
    MatX<K> full2(n, ideal.cols() + q);
    full2 << ideal, sec_sorted;
    auto inv2 = inverse<K>(full2);
    if (!inv2) throw std::invalid_argument("quotient_by_ideal: unit column swap degenerate");
    proj_sorted = inv2->bottomRows(q);
  }
  Q.unit = uidx;
  Q.d = proj_sorted * A.d * sec_sorted;
  Q.mul_table = MatX<K>::Zero(q * q, q);
  for (Index i = 0; i < q; ++i)
    for (Index j = 0; j < q; ++j)
      Q.mul_table.row(i * q + j) =
          (proj_sorted * A.mul(VecX<K>(sec_sorted.col(i)), VecX<K>(sec_sorted.col(j))))
              .transpose();
  if (A.aug) Q.aug = Eigen::Matrix<K, 1, Eigen::Dynamic>((*A.aug) * sec_sorted);
  QuotientAlgebra<K> out{std::move(Q), std::move(proj_sorted), std::move(sec_sorted)};
  auto vs = validate_algebra(out.algebra);
  if (!vs.empty()) throw ValidationError(std::move(vs));
  return out;
}

// ---------------------------------------------------------------------------
// connected cover (sub-DG-algebra with C^0 = k, C^{<0} = 0)

template <class K>
struct ConnectedCover {
  DGAlgebra<K> algebra;
  MatX<K> inclusion;  // dim(B) x dim(C)
};

template <class K>
ConnectedCover<K> connected_cover(const DGAlgebra<K>& B) {
  auto H = complex_cohomology(B.as_complex(),
                              Window::at(B.space.min_degree() - 1, 0));
  for (auto& h : H) {
    if (h.degree < 0 && h.dim != 0)
      throw std::invalid_argument("connected_cover: H^" + std::to_string(h.degree) +
                                  "(B) != 0");
    if (h.degree == 0 && h.dim != 1)
      throw std::invalid_argument("connected_cover: H^0(B) != k");
  }

  const Index n = B.dim();
  std::vector<VecX<K>> cols;
  std::vector<std::string> labels;
  std::vector<int> degrees;
  cols.push_back(B.unit_vec());
  labels.push_back(B.space.label(B.unit));
  degrees.push_back(0);

  // degree 1: K ⊕ L with d(K)=0, K ≅ H^1, and d injective on L with
  // d(L) = d(B^1)
  MatX<K> d0 = B.as_complex().d_block(0);
  MatX<K> d1 = B.as_complex().d_block(1);
  MatX<K> im_d0 = column_space<K>(d0);
  MatX<K> z1 = kernel<K>(d1);
  MatX<K> Kpart = extend_basis<K>(im_d0, z1);
  MatX<K> z1_full(z1.rows(), im_d0.cols() + Kpart.cols());
  z1_full << im_d0, Kpart;
  MatX<K> Lpart = extend_basis<K>(z1_full, MatX<K>(MatX<K>::Identity(B.space.dim(1), B.space.dim(1))));
  MatX<K> inj1 = B.space.template slice_injection<K>(1);
  for (Index j = 0; j < Kpart.cols(); ++j) {
    cols.push_back(VecX<K>(inj1 * Kpart.col(j)));
    labels.push_back("cK" + std::to_string(j));
    degrees.push_back(1);
  }
  for (Index j = 0; j < Lpart.cols(); ++j) {
    cols.push_back(VecX<K>(inj1 * Lpart.col(j)));
    labels.push_back("cL" + std::to_string(j));
    degrees.push_back(1);
  }
  for (Index g = 0; g < n; ++g)
    if (B.space.degree_of(g) >= 2) {
      cols.push_back(B.basis_vec(g));
      labels.push_back(B.space.label(g));
      degrees.push_back(B.space.degree_of(g));
    }

  Index q = static_cast<Index>(cols.size());
  MatX<K> inc(n, q);
  for (Index j = 0; j < q; ++j) inc.col(j) = cols[static_cast<std::size_t>(j)];

  DGAlgebra<K> C;
  C.name = B.name + "_cc";
  C.field = B.field;
  C.space = GradedSpace(labels, degrees);  // already degree-sorted by build order
  C.unit = 0;
  MatX<K> full(n, inc.cols());
  full = inc;
  auto express = [&](const VecX<K>& v) {
    auto co = coords_in<K>(inc, v);
    if (!co) throw std::logic_error("connected_cover: not closed (unexpected)");
    return *co;
  };
  C.d = MatX<K>::Zero(q, q);
  for (Index j = 0; j < q; ++j) C.d.col(j) = express(VecX<K>(B.d * inc.col(j)));
  C.mul_table = MatX<K>::Zero(q * q, q);
  for (Index i = 0; i < q; ++i)
    for (Index j = 0; j < q; ++j)
      C.mul_table.row(i * q + j) =
          express(B.mul(VecX<K>(inc.col(i)), VecX<K>(inc.col(j)))).transpose();
  if (B.aug) C.aug = Eigen::Matrix<K, 1, Eigen::Dynamic>((*B.aug) * inc);

  ConnectedCover<K> out{std::move(C), std::move(inc)};
  auto vs = validate_algebra(out.algebra);
  if (!vs.empty()) throw ValidationError(std::move(vs));

  // inclusion must be an H^i-isomorphism for i >= 0
  int hi = B.space.max_degree() + 1;
  auto HC = complex_cohomology(out.algebra.as_complex(), Window::at(0, hi));
  auto HB = complex_cohomology(B.as_complex(), Window::at(0, hi));
  for (std::size_t t = 0; t < HC.size(); ++t) {
    if (HC[t].dim != HB[t].dim)
      throw std::logic_error("connected_cover: H mismatch at degree " +
                             std::to_string(HC[t].degree));
    if (HC[t].dim == 0) continue;
    int deg = HC[t].degree;
    MatX<K> repsB =
        B.space.template slice_projection<K>(deg) * out.inclusion * out.algebra.space.template slice_injection<K>(deg) * HC[t].reps;
    if (rank<K>(MatX<K>(HB[t].proj * repsB)) != HC[t].dim)
      throw std::logic_error("connected_cover: inclusion not injective on H^" +
                             std::to_string(deg));
  }
  return out;
}

// ---------------------------------------------------------------------------
// degree truncation (quotient by the span of degrees > max_deg)

template <class K>
DGAlgebra<K> truncate_algebra(const DGAlgebra<K>& A, int max_deg) {
  const Index n = A.dim();
  if (A.space.degree_of(A.unit) > max_deg)
    throw std::invalid_argument("truncate_algebra: unit would be truncated");
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (A.space.degree_of(i) <= max_deg && A.space.degree_of(j) <= max_deg) continue;
      VecX<K> p = A.basis_mul(i, j);
      for (Index k = 0; k < n; ++k)
        if (!p(k).is_zero() && A.space.degree_of(k) <= max_deg)
          throw std::invalid_argument(
              "truncate_algebra: high-degree span is not an ideal (product " +
              A.space.label(i) + "*" + A.space.label(j) + " reaches " + A.space.label(k) + ")");
    }

  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i)
    if (A.space.degree_of(i) <= max_deg) keep.push_back(i);
  const Index q = static_cast<Index>(keep.size());
  std::vector<std::string> labels;
  std::vector<int> degrees;
  for (Index g : keep) {
    labels.push_back(A.space.label(g));
    degrees.push_back(A.space.degree_of(g));
  }
  DGAlgebra<K> T;
  T.name = A.name + "_le" + std::to_string(max_deg);
  T.field = A.field;
  T.space = GradedSpace(labels, degrees);
  for (Index t = 0; t < q; ++t)
    if (keep[static_cast<std::size_t>(t)] == A.unit) T.unit = t;
  T.d = MatX<K>::Zero(q, q);
  T.mul_table = MatX<K>::Zero(q * q, q);
  for (Index a = 0; a < q; ++a) {
    for (Index b = 0; b < q; ++b) {
      VecX<K> p = A.basis_mul(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
      for (Index c = 0; c < q; ++c) T.mul_table(a * q + b, c) = p(keep[static_cast<std::size_t>(c)]);
    }
    VecX<K> da = A.diff(A.basis_vec(keep[static_cast<std::size_t>(a)]));
    for (Index c = 0; c < q; ++c) T.d(c, a) = da(keep[static_cast<std::size_t>(c)]);
  }
  if (A.aug) {
    Eigen::Matrix<K, 1, Eigen::Dynamic> e(q);
    for (Index c = 0; c < q; ++c) e(c) = (*A.aug)(keep[static_cast<std::size_t>(c)]);
    T.aug = e;
  }
  return checked(std::move(T));
}

}  // namespace dgdeform
