#pragma once

#include <functional>

#include "dgdeform/dgmod.hpp"

namespace dgdeform {

// Incremental construction of a DG algebra from sparse structure constants.
// Unit products are implied; everything else defaults to zero.
template <class K>
class AlgebraBuilder {
 public:
  AlgebraBuilder(std::string name, FieldSpec field) : name_(std::move(name)), field_(field) {}

  AlgebraBuilder& basis(const std::string& label, int degree) {
    labels_.push_back(label);
    degrees_.push_back(degree);
    return *this;
  }
  AlgebraBuilder& unit(const std::string& label) {
    unit_label_ = label;
    return *this;
  }
  AlgebraBuilder& mul(const std::string& a, const std::string& b,
                      std::vector<std::pair<K, std::string>> terms) {
    muls_.push_back({a, b, std::move(terms)});
    return *this;
  }
  AlgebraBuilder& diff(const std::string& a, std::vector<std::pair<K, std::string>> terms) {
    diffs_.push_back({a, std::move(terms)});
    return *this;
  }
  AlgebraBuilder& with_aug() {
    aug_ = true;
    return *this;
  }

  DGAlgebra<K> build() const {
    DGAlgebra<K> A;
    A.name = name_;
    A.field = field_;
    A.space = GradedSpace(labels_, degrees_);
    const Index n = A.space.total_dim();
    auto find = [&](const std::string& l) {
      auto i = A.space.find(l);
      if (!i) throw std::invalid_argument(name_ + ": unknown basis label '" + l + "'");
      return *i;
    };
    A.unit = find(unit_label_);
    A.mul_table = MatX<K>::Zero(n * n, n);
    for (Index j = 0; j < n; ++j) {
      A.mul_table(A.unit * n + j, j) = scalar_from_int<K>(1, field_);
      A.mul_table(j * n + A.unit, j) = scalar_from_int<K>(1, field_);
    }
    for (const auto& m : muls_) {
      Index i = find(m.a), j = find(m.b);
      if (i == A.unit || j == A.unit)
        throw std::invalid_argument(name_ + ": unit products are implied");
      for (const auto& [c, l] : m.terms) A.mul_table(i * n + j, find(l)) += c;
    }
    A.d = MatX<K>::Zero(n, n);
    for (const auto& dl : diffs_) {
      Index j = find(dl.a);
      for (const auto& [c, l] : dl.terms) A.d(find(l), j) += c;
    }
    if (aug_) {
      Eigen::Matrix<K, 1, Eigen::Dynamic> e = Eigen::Matrix<K, 1, Eigen::Dynamic>::Zero(n);
      e(A.unit) = scalar_from_int<K>(1, field_);
      A.aug = e;
    }
    return A;
  }

  DGAlgebra<K> build_checked() const { return checked(build()); }

 private:
  struct MulRule {
    std::string a, b;
    std::vector<std::pair<K, std::string>> terms;
  };
  struct DiffRule {
    std::string a;
    std::vector<std::pair<K, std::string>> terms;
  };
  std::string name_;
  FieldSpec field_;
  std::vector<std::string> labels_;
  std::vector<int> degrees_;
  std::string unit_label_ = "1";
  std::vector<MulRule> muls_;
  std::vector<DiffRule> diffs_;
  bool aug_ = true;
};

// k<x>/(x^{top+1}) with |x| = deg, zero differential. "P6" is top = 6,
// deg = 1; dual numbers and their relatives are low cases.
template <class K>
DGAlgebra<K> truncated_poly(const std::string& name, const std::string& gen, int deg, int top,
                            FieldSpec field) {
  AlgebraBuilder<K> b(name, field);
  b.basis("1", 0).unit("1");
  auto pw = [&](int i) { return i == 1 ? gen : gen + std::to_string(i); };
  for (int i = 1; i <= top; ++i) b.basis(pw(i), i * deg);
  K one = scalar_from_int<K>(1, field);
  for (int i = 1; i <= top; ++i)
    for (int j = 1; j <= top; ++j)
      if (i + j <= top) b.mul(pw(i), pw(j), {{one, pw(i + j)}});
  return b.build_checked();
}

template <class K>
AlgebraPtr<K> fixture_K(FieldSpec f) {
  return share(AlgebraBuilder<K>("K", f).basis("1", 0).unit("1").build_checked());
}

template <class K>
AlgebraPtr<K> fixture_D0(FieldSpec f) {
  return share(truncated_poly<K>("D0", "eps", 0, 1, f));
}

template <class K>
AlgebraPtr<K> fixture_D1(FieldSpec f) {
  return share(truncated_poly<K>("D1", "eps", 1, 1, f));
}

template <class K>
AlgebraPtr<K> fixture_D1minus(FieldSpec f) {
  return share(truncated_poly<K>("D1minus", "eps", -1, 1, f));
}

template <class K>
AlgebraPtr<K> fixture_E3(FieldSpec f) {
  return share(truncated_poly<K>("E3", "eps", 0, 2, f));
}

template <class K>
AlgebraPtr<K> fixture_P6(FieldSpec f) {
  return share(truncated_poly<K>("P6", "t", 1, 6, f));
}

template <class K>
AlgebraPtr<K> fixture_P2(FieldSpec f) {
  return share(truncated_poly<K>("P2", "t", 1, 2, f));
}

template <class K>
AlgebraPtr<K> fixture_S2(FieldSpec f) {
  return share(AlgebraBuilder<K>("S2", f)
                   .basis("1", 0)
                   .basis("x", 2)
                   .unit("1")
                   .build_checked());
}

template <class K>
AlgebraPtr<K> fixture_ACY(FieldSpec f) {
  return share(AlgebraBuilder<K>("ACY", f)
                   .basis("1", 0)
                   .basis("a", 1)
                   .basis("b", 2)
                   .unit("1")
                   .diff("a", {{scalar_from_int<K>(1, f), "b"}})
                   .build_checked());
}

template <class K>
AlgebraPtr<K> fixture_by_name(const std::string& name, FieldSpec f) {
  if (name == "K") return fixture_K<K>(f);
  if (name == "D0") return fixture_D0<K>(f);
  if (name == "D1") return fixture_D1<K>(f);
  if (name == "D1minus") return fixture_D1minus<K>(f);
  if (name == "E3") return fixture_E3<K>(f);
  if (name == "P6") return fixture_P6<K>(f);
  if (name == "P2") return fixture_P2<K>(f);
  if (name == "S2") return fixture_S2<K>(f);
  if (name == "ACY") return fixture_ACY<K>(f);
  throw std::invalid_argument("unknown fixture algebra: " + name);
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"K",  "D0", "D1", "D1minus", "E3",
                                                 "P6", "P2", "S2", "ACY"};
  return names;
}

// Example deformation module: the regular module of P6⊗D1 with the extra
// differential "left multiplication by 1⊗eps".
template <class K>
DGModule<K> fixture_M11(const TensorContext<K>& ctx) {
  DGModule<K> M = regular_module(ctx.T, Side::Right);
  M.name = "M11";
  VecX<K> eps = ctx.embed_R(ctx.R->basis_vec(*ctx.R->space.find("eps")));
  M.d = M.d + ctx.T->left_mult(eps);
  return checked_module(std::move(M));
}

}  // namespace dgdeform
