#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "dgdeform/gauss.hpp"

namespace dgdeform {

// Degree interval, inclusive. Defaults to all of Z.
struct Window {
  int lo = std::numeric_limits<int>::min() / 2;
  int hi = std::numeric_limits<int>::max() / 2;

  static Window all() { return Window{}; }
  static Window at(int lo, int hi) { return Window{lo, hi}; }
  bool contains(int d) const { return lo <= d && d <= hi; }
  bool contains(const Window& w) const { return lo <= w.lo && w.hi <= hi; }
  Window shrink(int margin) const { return Window{lo + margin, hi - margin}; }
  bool is_all() const { return *this == all(); }
  friend bool operator==(const Window&, const Window&) = default;
};

// Finitely supported family of based vector spaces indexed by degree.
// Basis elements carry labels and a fixed global ordering (by degree, then
// declaration order) that all coordinate vectors refer to.
class GradedSpace {
 public:
  GradedSpace() = default;
  GradedSpace(std::vector<std::string> labels, std::vector<int> degrees) {
    if (labels.size() != degrees.size())
      throw std::invalid_argument("GradedSpace: label/degree count mismatch");
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return degrees[a] < degrees[b]; });
    labels_.reserve(order.size());
    degrees_.reserve(order.size());
    for (std::size_t i : order) {
      labels_.push_back(labels[i]);
      degrees_.push_back(degrees[i]);
    }
    for (Index g = 0; g < total_dim(); ++g) {
      auto& range = ranges_[degrees_[g]];
      if (range.second == 0) range.first = g;
      range.second = g + 1 - range.first;
    }
  }

  Index total_dim() const { return static_cast<Index>(labels_.size()); }
  int degree_of(Index g) const { return degrees_[static_cast<std::size_t>(g)]; }
  const std::string& label(Index g) const { return labels_[static_cast<std::size_t>(g)]; }

  Index dim(int degree) const {
    auto it = ranges_.find(degree);
    return it == ranges_.end() ? 0 : it->second.second;
  }
  Index first_index(int degree) const {
    auto it = ranges_.find(degree);
    return it == ranges_.end() ? -1 : it->second.first;
  }
  Index global_index(int degree, Index i) const { return first_index(degree) + i; }

  std::vector<int> degrees() const {
    std::vector<int> out;
    for (const auto& [d, r] : ranges_)
      if (r.second > 0) out.push_back(d);
    return out;
  }
  int min_degree() const { return total_dim() ? degrees_.front() : 0; }
  int max_degree() const { return total_dim() ? degrees_.back() : 0; }

  std::optional<Index> find(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return static_cast<Index>(i);
    return std::nullopt;
  }

  friend bool operator==(const GradedSpace& a, const GradedSpace& b) {
    return a.labels_ == b.labels_ && a.degrees_ == b.degrees_;
  }

  // Inclusion/projection helpers for the degree-d slice.
  template <class K>
  MatX<K> slice_injection(int d) const {
    MatX<K> out = MatX<K>::Zero(total_dim(), dim(d));
    for (Index i = 0; i < dim(d); ++i) out(first_index(d) + i, i) = K(1);
    return out;
  }
  template <class K>
  MatX<K> slice_projection(int d) const {
    return MatX<K>(slice_injection<K>(d).transpose());
  }

 private:
  std::vector<std::string> labels_;
  std::vector<int> degrees_;                          // sorted ascending
  std::map<int, std::pair<Index, Index>> ranges_;     // degree -> (first, count)
};

inline GradedSpace tensor_space(const GradedSpace& a, const GradedSpace& b,
                                const std::string& sep = "⊗") {
  std::vector<std::string> labels;
  std::vector<int> degrees;
  labels.reserve(a.total_dim() * b.total_dim());
  for (Index i = 0; i < a.total_dim(); ++i)
    for (Index j = 0; j < b.total_dim(); ++j) {
      labels.push_back(a.label(i) + sep + b.label(j));
      degrees.push_back(a.degree_of(i) + b.degree_of(j));
    }
  return GradedSpace(std::move(labels), std::move(degrees));
}

// Global index of e_i ⊗ f_j in the *unsorted* pair enumeration.
inline Index pair_index(const GradedSpace& b, Index i, Index j) {
  return i * b.total_dim() + j;
}

// tensor_space sorts by degree, so pair coordinates need the permutation
// taking unsorted pair slots to the sorted global order.
class TensorIndexer {
 public:
  TensorIndexer() = default;
  TensorIndexer(const GradedSpace& a, const GradedSpace& b, const std::string& sep = "⊗")
      : space_(tensor_space(a, b, sep)), na_(a.total_dim()), nb_(b.total_dim()) {
    perm_.resize(static_cast<std::size_t>(na_ * nb_));
    std::vector<std::pair<int, Index>> keyed;
    keyed.reserve(perm_.size());
    for (Index i = 0; i < na_; ++i)
      for (Index j = 0; j < nb_; ++j)
        keyed.emplace_back(a.degree_of(i) + b.degree_of(j), pair_index(b, i, j));
    std::stable_sort(keyed.begin(), keyed.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t g = 0; g < keyed.size(); ++g) perm_[static_cast<std::size_t>(keyed[g].second)] = static_cast<Index>(g);
  }

  const GradedSpace& space() const { return space_; }
  Index index(Index i, Index j) const { return perm_[static_cast<std::size_t>(i * nb_ + j)]; }
  std::pair<Index, Index> split(Index g) const {
    for (Index i = 0; i < na_; ++i)
      for (Index j = 0; j < nb_; ++j)
        if (index(i, j) == g) return {i, j};
    throw std::logic_error("TensorIndexer::split: bad index");
  }

 private:
  GradedSpace space_;
  Index na_ = 0, nb_ = 0;
  std::vector<Index> perm_;
};

// Degree-homogeneous linear map between graded spaces, stored per source
// degree. Missing blocks are zero.
template <class K>
struct GradedMap {
  GradedSpace source, target;
  int shift = 0;
  std::map<int, MatX<K>> blocks;  // keyed by source degree d, shape dim_target(d+shift) x dim_source(d)

  MatX<K> block(int d) const {
    auto it = blocks.find(d);
    if (it != blocks.end()) return it->second;
    return MatX<K>::Zero(target.dim(d + shift), source.dim(d));
  }

  void validate_shapes() const {
    for (const auto& [d, m] : blocks) {
      if (m.rows() != target.dim(d + shift) || m.cols() != source.dim(d))
        throw std::invalid_argument("GradedMap: block shape mismatch at degree " + std::to_string(d));
    }
  }

  // Flatten to a single matrix on global coordinates.
  MatX<K> flat() const {
    MatX<K> out = MatX<K>::Zero(target.total_dim(), source.total_dim());
    for (const auto& [d, m] : blocks) {
      Index sf = source.first_index(d), tf = target.first_index(d + shift);
      if (sf < 0 || tf < 0) continue;
      out.block(tf, sf, m.rows(), m.cols()) = m;
    }
    return out;
  }

  static GradedMap from_flat(const GradedSpace& src, const GradedSpace& tgt, int shift,
                             const MatX<K>& flat) {
    GradedMap out{src, tgt, shift, {}};
    for (int d : src.degrees()) {
      Index sf = src.first_index(d), sn = src.dim(d);
      Index tf = tgt.first_index(d + shift), tn = tgt.dim(d + shift);
      if (tn > 0 && sn > 0) {
        MatX<K> blk = flat.block(tf, sf, tn, sn);
        if (!is_zero(blk)) out.blocks[d] = std::move(blk);
      }
    }
    // anything outside matching blocks must vanish
    MatX<K> rebuilt = out.flat();
    for (Index j = 0; j < flat.cols(); ++j)
      for (Index i = 0; i < flat.rows(); ++i)
        if (flat(i, j) != rebuilt(i, j))
          throw std::invalid_argument("from_flat: map is not homogeneous of the stated shift");
    return out;
  }
};

// Checks a flat matrix is homogeneous of the given shift w.r.t. the space.
template <class K>
bool is_homogeneous(const GradedSpace& src, const GradedSpace& tgt, int shift, const MatX<K>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (!m(i, j).is_zero() && tgt.degree_of(i) != src.degree_of(j) + shift) return false;
  return true;
}

// A cochain complex: graded space with a square-zero degree-+1 differential on
// global coordinates. `complete` marks degrees where the presented data is the
// whole story (truncated constructions shrink it).
template <class K>
struct Complex {
  GradedSpace space;
  MatX<K> d;
  Window complete = Window::all();

  void validate() const {
    if (d.rows() != space.total_dim() || d.cols() != space.total_dim())
      throw std::invalid_argument("Complex: differential shape mismatch");
    if (!is_homogeneous(space, space, 1, d))
      throw std::invalid_argument("Complex: differential is not of degree +1");
    if (!is_zero(MatX<K>(d * d)))
      throw std::invalid_argument("Complex: d^2 != 0");
  }

  MatX<K> d_block(int degree) const {
    Index sf = space.first_index(degree), sn = space.dim(degree);
    Index tn = space.dim(degree + 1), tf = space.first_index(degree + 1);
    MatX<K> out = MatX<K>::Zero(tn, sn);
    if (sn > 0 && tn > 0) out = d.block(tf, sf, tn, sn);
    return out;
  }
};

template <class K>
struct DegreeCohomology {
  int degree = 0;
  Index dim = 0;
  MatX<K> reps;  // columns: cocycle representatives in the degree slice
  MatX<K> proj;  // slice -> H coordinates, kills exactly the image
};

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cohomology per degree over a window; requires one degree of complete data on
// each side of the window.
template <class K>
std::vector<DegreeCohomology<K>> complex_cohomology(const Complex<K>& c, Window range) {
  if (!c.complete.contains(Window{range.lo - 1, range.hi + 1}))
    throw WindowError("complex_cohomology: window exceeds complete data (margin missing)");
  std::vector<DegreeCohomology<K>> out;
  for (int deg = range.lo; deg <= range.hi; ++deg) {
    auto slice = cohomology_slice<K>(c.d_block(deg - 1), c.d_block(deg));
    out.push_back(DegreeCohomology<K>{deg, slice.dim, slice.reps, slice.proj});
  }
  return out;
}

template <class K>
std::vector<Index> cohomology_dims(const Complex<K>& c, Window range) {
  std::vector<Index> dims;
  for (auto& h : complex_cohomology(c, range)) dims.push_back(h.dim);
  return dims;
}

template <class K>
bool acyclic_on(const Complex<K>& c, Window range) {
  for (auto& h : complex_cohomology(c, range))
    if (h.dim != 0) return false;
  return true;
}

// Rendering of coordinate vectors against a space's labels, for reports.
template <class K>
std::string show_element(const GradedSpace& sp, const VecX<K>& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (v(i).is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += scalar_str(v(i)) + "·" + sp.label(i);
  }
  return out.empty() ? "0" : out;
}

}  // namespace dgdeform
