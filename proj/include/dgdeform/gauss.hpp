#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "dgdeform/scalar.hpp"

namespace Eigen {

template <>
struct NumTraits<dgdeform::Rat> : GenericNumTraits<dgdeform::Rat> {
  typedef dgdeform::Rat Real;
  typedef dgdeform::Rat NonInteger;
  typedef dgdeform::Rat Nested;
  typedef dgdeform::Rat Literal;
  static inline Real epsilon() { return dgdeform::Rat(0); }
  static inline Real dummy_precision() { return dgdeform::Rat(0); }
  static inline int digits10() { return 0; }
  enum {
    IsComplex = 0, IsInteger = 0, IsSigned = 1, RequireInitialization = 1,
    ReadCost = 8, AddCost = 60, MulCost = 60
  };
};

template <>
struct NumTraits<dgdeform::Fp> : GenericNumTraits<dgdeform::Fp> {
  typedef dgdeform::Fp Real;
  typedef dgdeform::Fp NonInteger;
  typedef dgdeform::Fp Nested;
  typedef dgdeform::Fp Literal;
  static inline Real epsilon() { return dgdeform::Fp(0); }
  static inline Real dummy_precision() { return dgdeform::Fp(0); }
  static inline int digits10() { return 9; }
  enum {
    IsComplex = 0, IsInteger = 1, IsSigned = 1, RequireInitialization = 1,
    ReadCost = 1, AddCost = 2, MulCost = 2
  };
};

}  // namespace Eigen

namespace dgdeform {

template <class K>
using MatX = Eigen::Matrix<K, Eigen::Dynamic, Eigen::Dynamic>;
template <class K>
using VecX = Eigen::Matrix<K, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

template <class K>
bool is_zero(const MatX<K>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!m(i, j).is_zero()) return false;
  return true;
}

template <class K>
bool is_zero(const VecX<K>& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (!v(i).is_zero()) return false;
  return true;
}

// Reduced row echelon form with pivot bookkeeping. Pivot choice is "first
// nonzero" — exact fields have no conditioning concerns.
template <class K>
struct Rref {
  MatX<K> mat;
  std::vector<Index> pivot_cols;
  Index rank() const { return static_cast<Index>(pivot_cols.size()); }
};

template <class K>
Rref<K> rref(MatX<K> a) {
  Rref<K> out;
  Index rows = a.rows(), cols = a.cols();
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index piv = -1;
    for (Index i = r; i < rows; ++i)
      if (!a(i, c).is_zero()) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r) a.row(piv).swap(a.row(r));
    K inv = a(r, c).inverse();
    for (Index j = c; j < cols; ++j) a(r, j) *= inv;
    for (Index i = 0; i < rows; ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      K f = a(i, c);
      for (Index j = c; j < cols; ++j) a(i, j) -= f * a(r, j);
    }
    out.pivot_cols.push_back(c);
    ++r;
  }
  out.mat = std::move(a);
  return out;
}

template <class K>
Index rank(const MatX<K>& a) {
  return rref(a).rank();
}

// Solves A x = b exactly; nullopt certifies unsolvability.
template <class K>
std::optional<VecX<K>> solve(const MatX<K>& a, const VecX<K>& b) {
  if (a.rows() != b.size()) throw std::invalid_argument("solve: shape mismatch");
  MatX<K> aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  Rref<K> r = rref(aug);
  VecX<K> x = VecX<K>::Zero(a.cols());
  for (std::size_t k = 0; k < r.pivot_cols.size(); ++k) {
    Index c = r.pivot_cols[k];
    if (c == a.cols()) return std::nullopt;  // pivot in the rhs column
    x(c) = r.mat(static_cast<Index>(k), a.cols());
  }
  return x;
}

// Simultaneous solve A X = B; each column independently solvable or the whole
// call fails.
template <class K>
std::optional<MatX<K>> solve_many(const MatX<K>& a, const MatX<K>& b) {
  MatX<K> x(a.cols(), b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    auto xj = solve<K>(a, VecX<K>(b.col(j)));
    if (!xj) return std::nullopt;
    x.col(j) = *xj;
  }
  return x;
}

// Columns form a basis of ker A.
template <class K>
MatX<K> kernel(const MatX<K>& a) {
  Rref<K> r = rref(a);
  Index cols = a.cols();
  std::vector<bool> is_pivot(cols, false);
  for (Index c : r.pivot_cols) is_pivot[c] = true;
  Index nfree = cols - r.rank();
  MatX<K> out = MatX<K>::Zero(cols, nfree);
  Index k = 0;
  for (Index c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    out(c, k) = K(1);
    for (std::size_t i = 0; i < r.pivot_cols.size(); ++i)
      out(r.pivot_cols[i], k) = -r.mat(static_cast<Index>(i), c);
    ++k;
  }
  return out;
}

// A maximal independent subset of the columns of A (the image basis).
template <class K>
MatX<K> column_space(const MatX<K>& a) {
  Rref<K> r = rref(a);
  MatX<K> out(a.rows(), r.rank());
  for (std::size_t i = 0; i < r.pivot_cols.size(); ++i)
    out.col(static_cast<Index>(i)) = a.col(r.pivot_cols[i]);
  return out;
}

template <class K>
std::optional<MatX<K>> inverse(const MatX<K>& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  return solve_many<K>(a, MatX<K>(MatX<K>::Identity(a.rows(), a.rows())));
}

// Coordinates of v in the given (column) basis, if v lies in its span.
template <class K>
std::optional<VecX<K>> coords_in(const MatX<K>& basis, const VecX<K>& v) {
  return solve<K>(basis, v);
}

template <class K>
bool in_span(const MatX<K>& basis, const VecX<K>& v) {
  return coords_in<K>(basis, v).has_value();
}

// Extends `inner` (independent columns) to a basis of the span of
// [inner | pool]; returns the chosen pool columns.
template <class K>
MatX<K> extend_basis(const MatX<K>& inner, const MatX<K>& pool) {
  MatX<K> acc = inner;
  std::vector<Index> chosen;
  for (Index j = 0; j < pool.cols(); ++j) {
    MatX<K> test(acc.rows(), acc.cols() + 1);
    test.leftCols(acc.cols()) = acc;
    test.col(acc.cols()) = pool.col(j);
    if (rank<K>(test) > acc.cols()) {
      chosen.push_back(j);
      acc = std::move(test);
    }
  }
  MatX<K> out(pool.rows(), static_cast<Index>(chosen.size()));
  for (std::size_t i = 0; i < chosen.size(); ++i) out.col(static_cast<Index>(i)) = pool.col(chosen[i]);
  return out;
}

// Cohomology of  prev --din--> here --dout--> there  at "here".
// reps: columns are representative cocycles; proj: full-space map with
// proj * reps = I and proj * (im din) = 0, so classes of cocycles are read off
// exactly.
template <class K>
struct CohomologySlice {
  Index dim = 0;
  MatX<K> reps;
  MatX<K> proj;
};

template <class K>
CohomologySlice<K> cohomology_slice(const MatX<K>& din, const MatX<K>& dout) {
  Index n = dout.cols();
  CohomologySlice<K> out;
  MatX<K> cycles = kernel<K>(dout);
  MatX<K> bd = column_space<K>(din);
  MatX<K> reps = extend_basis<K>(bd, cycles);
  out.dim = reps.cols();
  out.reps = reps;
  // complete [bd | reps] to a basis of the whole space, then read off the
  // reps-block of the inverse coordinate map
  MatX<K> partial(n, bd.cols() + reps.cols());
  partial << bd, reps;
  MatX<K> compl_basis = extend_basis<K>(partial, MatX<K>(MatX<K>::Identity(n, n)));
  MatX<K> full(n, n);
  full << bd, reps, compl_basis;
  auto inv = inverse<K>(full);
  if (!inv) throw std::logic_error("cohomology basis completion failed");
  out.proj = inv->middleRows(bd.cols(), reps.cols());
  return out;
}

}  // namespace dgdeform
