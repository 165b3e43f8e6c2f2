#pragma once

#include <cstdint>

#include "dgdeform/dgmod.hpp"

namespace dgdeform {

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Working data for the Maurer-Cartan groupoid of (B⊗R, B⊗m).
template <class K>
struct MCContext {
  TensorContext<K> t;          // B⊗R with indexer
  ArtinianProfile<K> profile;  // of R
  std::vector<Index> ideal;    // T-indices spanning B⊗m (a coordinate subspace)

  const DGAlgebra<K>& T() const { return *t.T; }
  const DGAlgebra<K>& B() const { return *t.A; }
  const DGAlgebra<K>& R() const { return *t.R; }

  bool in_ideal(const VecX<K>& x) const {
    std::vector<bool> ok(static_cast<std::size_t>(T().dim()), false);
    for (Index g : ideal) ok[static_cast<std::size_t>(g)] = true;
    for (Index g = 0; g < T().dim(); ++g)
      if (!x(g).is_zero() && !ok[static_cast<std::size_t>(g)]) return false;
    return true;
  }
  std::vector<Index> ideal_slots(int degree) const {
    std::vector<Index> out;
    for (Index g : ideal)
      if (T().space.degree_of(g) == degree) out.push_back(g);
    return out;
  }
};

template <class K>
MCContext<K> make_mc_context(AlgebraPtr<K> B, AlgebraPtr<K> R) {
  MCContext<K> ctx{make_tensor_context(B, R), artinian_profile<K>(R), {}};
  for (Index i = 0; i < B->dim(); ++i)
    for (Index j = 0; j < R->dim(); ++j)
      if (j != R->unit) ctx.ideal.push_back(ctx.t.ix.index(i, j));
  std::sort(ctx.ideal.begin(), ctx.ideal.end());
  return ctx;
}

template <class K>
struct MCResidual {
  VecX<K> q;
  bool is_mc = false;
};

template <class K>
MCResidual<K> mc_residual(const MCContext<K>& ctx, const VecX<K>& alpha) {
  if (!ctx.in_ideal(alpha))
    throw std::invalid_argument("mc_residual: element not in B⊗m");
  for (Index g = 0; g < ctx.T().dim(); ++g)
    if (!alpha(g).is_zero() && ctx.T().space.degree_of(g) != 1)
      throw std::invalid_argument("mc_residual: element not of degree 1");
  VecX<K> q = ctx.T().d * alpha + ctx.T().mul(alpha, alpha);
  bool flat = is_zero(q);
  // operator cross-check: (d + left-mult α)² = left-mult Q(α)
  MatX<K> dop = ctx.T().d + ctx.T().left_mult(alpha);
  if (flat != is_zero(MatX<K>(dop * dop)))
    throw std::logic_error("mc_residual: operator square disagrees with Q");
  return {std::move(q), flat};
}

template <class K>
VecX<K> gauge_act(const MCContext<K>& ctx, const VecX<K>& g, const VecX<K>& alpha) {
  VecX<K> u = g - ctx.T().unit_vec();
  if (!ctx.in_ideal(u)) throw std::invalid_argument("gauge_act: g not in 1 + (B⊗m)^0");
  VecX<K> ginv = ctx.T().invert_unipotent(g);
  VecX<K> out = ctx.T().mul(ctx.T().mul(g, alpha), ginv) +
                ctx.T().mul(g, ctx.T().d * ginv);
  // conjugation identity: (d + g(α)) = g (d + α) g^{-1} as operators
  MatX<K> lhs = ctx.T().d + ctx.T().left_mult(out);
  MatX<K> rhs = ctx.T().left_mult(g) * (MatX<K>(ctx.T().d + ctx.T().left_mult(alpha))) *
                ctx.T().left_mult(ginv);
  if (!is_zero(MatX<K>(lhs - rhs)))
    throw std::logic_error("gauge_act: conjugation identity failed");
  return out;
}

// Members of G(α,β) = {g = 1+u : dg = gα - βg}: an affine-linear space in u.
template <class K>
struct GaugeSystem {
  std::vector<Index> slots0;  // ideal slots of degree 0 (u coordinates)
  MatX<K> L;                  // u ↦ du - uα + βu, restricted to the slots
  VecX<K> rhs;                // α - β as a full T-vector
};

template <class K>
GaugeSystem<K> gauge_system(const MCContext<K>& ctx, const VecX<K>& alpha, const VecX<K>& beta) {
  GaugeSystem<K> sys;
  sys.slots0 = ctx.ideal_slots(0);
  const Index n = ctx.T().dim();
  MatX<K> L(n, static_cast<Index>(sys.slots0.size()));
  for (std::size_t c = 0; c < sys.slots0.size(); ++c) {
    VecX<K> u = VecX<K>::Zero(n);
    u(sys.slots0[c]) = ctx.T().one();
    L.col(static_cast<Index>(c)) = ctx.T().d * u - ctx.T().mul(u, alpha) + ctx.T().mul(beta, u);
  }
  sys.L = std::move(L);
  sys.rhs = alpha - beta;
  return sys;
}

template <class K>
std::optional<VecX<K>> gauge_between(const MCContext<K>& ctx, const VecX<K>& alpha,
                                     const VecX<K>& beta) {
  GaugeSystem<K> sys = gauge_system(ctx, alpha, beta);
  auto u = solve<K>(sys.L, sys.rhs);
  if (!u) return std::nullopt;
  VecX<K> g = ctx.T().unit_vec();
  for (std::size_t c = 0; c < sys.slots0.size(); ++c) g(sys.slots0[c]) += (*u)(static_cast<Index>(c));
  return g;
}

// h-action on maps α→β: g ↦ g + dh + βh + hα for h of degree -1 in the ideal.
template <class K>
MatX<K> homotopy_translations(const MCContext<K>& ctx, const VecX<K>& alpha, const VecX<K>& beta) {
  auto slots = ctx.ideal_slots(-1);
  const Index n = ctx.T().dim();
  MatX<K> H(n, static_cast<Index>(slots.size()));
  for (std::size_t c = 0; c < slots.size(); ++c) {
    VecX<K> h = VecX<K>::Zero(n);
    h(slots[c]) = ctx.T().one();
    H.col(static_cast<Index>(c)) = ctx.T().d * h + ctx.T().mul(beta, h) + ctx.T().mul(h, alpha);
  }
  return H;
}

template <class K>
struct HomotopyVerdict {
  bool homotopic = false;
  VecX<K> witness;  // h with g2 = g1 + dh + βh + hα (full T coords)
};

template <class K>
HomotopyVerdict<K> are_homotopic(const MCContext<K>& ctx, const VecX<K>& g1, const VecX<K>& g2,
                                 const VecX<K>& alpha, const VecX<K>& beta) {
  auto slots = ctx.ideal_slots(-1);
  MatX<K> H = homotopy_translations(ctx, alpha, beta);
  auto h = solve<K>(H, VecX<K>(g2 - g1));
  HomotopyVerdict<K> out;
  out.witness = VecX<K>::Zero(ctx.T().dim());
  if (h) {
    out.homotopic = true;
    for (std::size_t c = 0; c < slots.size(); ++c) out.witness(slots[c]) = (*h)(static_cast<Index>(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// finite-field enumeration

inline std::uint64_t pow_u64_guarded(std::uint64_t base, std::uint64_t exp, std::uint64_t guard) {
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    v *= base;
    if (v > guard) throw CapExceeded("enumeration guard exceeded: " + std::to_string(base) +
                                     "^" + std::to_string(exp));
  }
  return v;
}

// Calls fn for every vector supported on the slots with entries in F_p.
template <class Fn>
void for_each_fp_vector(const std::vector<Index>& slots, std::uint32_t p, Index total_dim,
                        std::uint64_t guard, Fn&& fn) {
  std::uint64_t count = pow_u64_guarded(p, slots.size(), guard);
  std::vector<std::uint32_t> digits(slots.size(), 0);
  VecX<Fp> v = VecX<Fp>::Zero(total_dim);
  for (std::uint64_t it = 0; it < count; ++it) {
    for (std::size_t s = 0; s < slots.size(); ++s) v(slots[s]) = Fp((long long)digits[s], p);
    fn(v);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      if (++digits[s] < p) break;
      digits[s] = 0;
    }
  }
}

struct GroupoidCounts {
  std::uint64_t objects = 0;
  std::vector<std::uint64_t> orbit_sizes;        // by orbit, deterministic order
  std::vector<std::uint64_t> hom_diag;           // |Hom(rep, rep)| per orbit
  std::vector<std::vector<std::uint64_t>> hom;   // |Hom(rep_i, rep_j)|
  std::uint64_t gauge_group_order = 0;
  bool class_equation_ok = false;
};

template <class K>
std::uint64_t hom_set_size(const MCContext<K>& ctx, const VecX<K>& alpha, const VecX<K>& beta,
                           std::uint32_t p) {
  GaugeSystem<K> sys = gauge_system(ctx, alpha, beta);
  auto u = solve<K>(sys.L, sys.rhs);
  if (!u) return 0;
  Index ker = static_cast<Index>(sys.slots0.size()) - rank<K>(sys.L);
  Index hrank = rank<K>(homotopy_translations(ctx, alpha, beta));
  std::uint64_t maps = 1, orbit = 1;
  for (Index i = 0; i < ker; ++i) maps *= p;
  for (Index i = 0; i < hrank; ++i) orbit *= p;
  return maps / orbit;
}

struct MCEnumeration {
  std::vector<VecX<Fp>> objects;
  std::vector<int> orbit_of;  // object index -> orbit id
  std::vector<Index> orbit_reps;
  GroupoidCounts counts;
};

template <class K>
MCEnumeration enumerate_groupoid(const MCContext<Fp>& ctx, std::uint64_t guard = (1ull << 22)) {
  std::uint32_t p = ctx.T().field.p;
  if (p == 0) throw std::invalid_argument("enumerate_groupoid: finite fields only");
  MCEnumeration out;
  auto slots1 = ctx.ideal_slots(1);
  for_each_fp_vector(slots1, p, ctx.T().dim(), guard, [&](const VecX<Fp>& v) {
    VecX<Fp> q = ctx.T().d * v + ctx.T().mul(v, v);
    if (is_zero(q)) out.objects.push_back(v);
  });
  out.counts.objects = out.objects.size();
  // orbit partition via exact gauge solvability
  out.orbit_of.assign(out.objects.size(), -1);
  for (std::size_t i = 0; i < out.objects.size(); ++i) {
    if (out.orbit_of[i] >= 0) continue;
    int id = static_cast<int>(out.orbit_reps.size());
    out.orbit_reps.push_back(static_cast<Index>(i));
    out.orbit_of[i] = id;
    std::uint64_t size = 1;
    for (std::size_t j = i + 1; j < out.objects.size(); ++j) {
      if (out.orbit_of[j] >= 0) continue;
      if (gauge_between(ctx, out.objects[i], out.objects[j])) {
        out.orbit_of[j] = id;
        ++size;
      }
    }
    out.counts.orbit_sizes.push_back(size);
  }
  auto slots0 = ctx.ideal_slots(0);
  out.counts.gauge_group_order = pow_u64_guarded(p, slots0.size(), ~0ull);
  out.counts.hom.assign(out.orbit_reps.size(),
                        std::vector<std::uint64_t>(out.orbit_reps.size(), 0));
  for (std::size_t a = 0; a < out.orbit_reps.size(); ++a)
    for (std::size_t b = 0; b < out.orbit_reps.size(); ++b)
      out.counts.hom[a][b] = hom_set_size(ctx, out.objects[static_cast<std::size_t>(out.orbit_reps[a])],
                                          out.objects[static_cast<std::size_t>(out.orbit_reps[b])], p);
  for (std::size_t a = 0; a < out.orbit_reps.size(); ++a)
    out.counts.hom_diag.push_back(out.counts.hom[a][a]);
  // class equation: |orbit| * |stabilizer maps| = |gauge group| per orbit
  out.counts.class_equation_ok = true;
  for (std::size_t a = 0; a < out.orbit_reps.size(); ++a) {
    const VecX<Fp>& rep = out.objects[static_cast<std::size_t>(out.orbit_reps[a])];
    GaugeSystem<Fp> sys = gauge_system(ctx, rep, rep);
    Index ker = static_cast<Index>(sys.slots0.size()) - rank<Fp>(sys.L);
    std::uint64_t stab = pow_u64_guarded(p, static_cast<std::size_t>(ker), ~0ull);
    if (out.counts.orbit_sizes[a] * stab != out.counts.gauge_group_order)
      out.counts.class_equation_ok = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// obstruction calculus along the socle step R -> R/I, I = m^nil

template <class K>
struct SubcomplexView {
  MatX<K> inc;   // columns: basis in the ambient coordinates
  MatX<K> retr;  // coordinates on the subspace (left inverse of inc)
  Complex<K> cx;
};

template <class K>
SubcomplexView<K> make_subcomplex(const GradedSpace& sp, const MatX<K>& d, MatX<K> basis,
                                  const std::string& prefix) {
  basis = sort_columns_by_degree<K>(sp, std::move(basis));
  const Index n = d.rows(), q = basis.cols();
  MatX<K> ext = extend_basis<K>(basis, MatX<K>(MatX<K>::Identity(n, n)));
  MatX<K> full(n, q + ext.cols());
  full << basis, ext;
  auto inv = inverse<K>(full);
  if (!inv) throw std::logic_error("make_subcomplex: completion failed");
  MatX<K> retr = inv->topRows(q);
  for (Index j = 0; j < q; ++j)
    if (!in_span<K>(basis, VecX<K>(d * basis.col(j))))
      throw std::invalid_argument("make_subcomplex: not d-stable");
  GradedSpace ssp = space_from_columns<K>(sp, basis, prefix);
  Complex<K> cx{ssp, MatX<K>(retr * d * basis), Window::all()};
  return {std::move(basis), std::move(retr), std::move(cx)};
}

// one socle step: R -> Rbar = R/I with I = m^{nil}, so mI = Im = 0
template <class K>
struct SocleStep {
  MCContext<K> full;     // B⊗R
  MCContext<K> quot;     // B⊗Rbar
  MatX<K> proj;          // T -> Tbar (1⊗π)
  MatX<K> sect;          // Tbar -> T
  SubcomplexView<K> BI;  // B⊗I inside T
};

template <class K>
SocleStep<K> make_socle_step(const MCContext<K>& ctx) {
  const auto& prof = ctx.profile;
  if (prof.nil_index < 1) throw std::invalid_argument("make_socle_step: m = 0 has no socle step");
  const MatX<K>& I = prof.powers.back();  // m^{nil}
  auto q = quotient_by_ideal(*ctx.t.R, I, ctx.R().name + "bar");
  AlgebraPtr<K> Rbar = share(q.algebra);
  SocleStep<K> out{ctx, make_mc_context(ctx.t.A, Rbar), {}, {}, {}};
  const Index nb = ctx.B().dim();
  const Index nT = ctx.T().dim(), nTbar = out.quot.T().dim();
  out.proj = MatX<K>::Zero(nTbar, nT);
  out.sect = MatX<K>::Zero(nT, nTbar);
  for (Index b = 0; b < nb; ++b) {
    for (Index r = 0; r < ctx.R().dim(); ++r)
      for (Index rb = 0; rb < Rbar->dim(); ++rb) {
        out.proj(out.quot.t.ix.index(b, rb), ctx.t.ix.index(b, r)) = q.proj(rb, r);
        out.sect(ctx.t.ix.index(b, r), out.quot.t.ix.index(b, rb)) = q.section(r, rb);
      }
  }
  // basis of B⊗I in T coordinates
  MatX<K> basis(nT, nb * I.cols());
  for (Index b = 0; b < nb; ++b)
    for (Index c = 0; c < I.cols(); ++c) {
      VecX<K> v = VecX<K>::Zero(nT);
      for (Index r = 0; r < ctx.R().dim(); ++r)
        if (!I(r, c).is_zero()) v(ctx.t.ix.index(b, r)) += I(r, c);
      basis.col(b * I.cols() + c) = v;
    }
  out.BI = make_subcomplex<K>(ctx.T().space, ctx.T().d, basis, "bi");
  return out;
}

template <class K>
struct ObstructionClass {
  int level = 2;
  Index h_dim = 0;
  VecX<K> cocycle;      // in B⊗I subspace coordinates
  VecX<K> h_class;      // coordinates in H^level(B⊗I)
  bool vanishes = false;
  VecX<K> witness;      // τ (level 2), gauge u (level 1) or homotopy u (level 0)
};

template <class K>
VecX<K> lift_through(const SocleStep<K>& s, const VecX<K>& xi) {
  return s.sect * xi;
}

template <class K>
ObstructionClass<K> obstruction_o2(const SocleStep<K>& s, const VecX<K>& xi) {
  auto res_bar = mc_residual(s.quot, xi);
  if (!res_bar.is_mc) throw std::invalid_argument("obstruction_o2: ξ is not MC modulo I");
  VecX<K> tilde = lift_through(s, xi);
  VecX<K> q = s.full.T().d * tilde + s.full.T().mul(tilde, tilde);
  auto co = coords_in<K>(s.BI.inc, q);
  if (!co) throw std::logic_error("obstruction_o2: Q(lift) escaped B⊗I");
  ObstructionClass<K> out;
  out.level = 2;
  auto H = complex_cohomology(s.BI.cx, Window::at(2, 2));
  out.h_dim = H[0].dim;
  out.cocycle = *co;
  out.h_class = H[0].proj * s.BI.cx.space.template slice_projection<K>(2) * *co;
  out.vanishes = is_zero(out.h_class);
  if (out.vanishes) {
    // τ in (B⊗I)^1 with dτ = Q(lift)
    auto slots = [&] {
      std::vector<Index> v;
      for (Index g = 0; g < s.BI.cx.space.total_dim(); ++g)
        if (s.BI.cx.space.degree_of(g) == 1) v.push_back(g);
      return v;
    }();
    MatX<K> D(s.BI.cx.space.total_dim(), static_cast<Index>(slots.size()));
    for (std::size_t c = 0; c < slots.size(); ++c)
      D.col(static_cast<Index>(c)) = s.BI.cx.d.col(slots[c]);
    auto tau = solve<K>(D, *co);
    if (!tau) throw std::logic_error("obstruction_o2: vanishing class with no primitive");
    out.witness = VecX<K>::Zero(s.BI.cx.space.total_dim());
    for (std::size_t c = 0; c < slots.size(); ++c) out.witness(slots[c]) = (*tau)(static_cast<Index>(c));
  }
  return out;
}

// when o2 vanishes: the corrected lift α̃ - τ, re-verified MC
template <class K>
std::optional<VecX<K>> lift_mc(const SocleStep<K>& s, const VecX<K>& xi,
                               ObstructionClass<K>* cls_out = nullptr) {
  ObstructionClass<K> cls = obstruction_o2(s, xi);
  if (cls_out) *cls_out = cls;
  if (!cls.vanishes) return std::nullopt;
  VecX<K> tilde = lift_through(s, xi) - s.BI.inc * cls.witness;
  auto res = mc_residual(s.full, tilde);
  if (!res.is_mc) throw std::logic_error("lift_mc: corrected lift is not MC");
  return tilde;
}

template <class K>
ObstructionClass<K> difference_o1(const SocleStep<K>& s, const VecX<K>& alpha,
                                  const VecX<K>& beta) {
  if (!is_zero(VecX<K>(s.proj * (alpha - beta))))
    throw std::invalid_argument("difference_o1: elements live over different ξ");
  VecX<K> eta = alpha - beta;
  auto co = coords_in<K>(s.BI.inc, eta);
  if (!co) throw std::logic_error("difference_o1: difference escaped B⊗I");
  if (!is_zero(VecX<K>(s.BI.cx.d * *co)))
    throw std::logic_error("difference_o1: difference is not closed");
  ObstructionClass<K> out;
  out.level = 1;
  auto H = complex_cohomology(s.BI.cx, Window::at(1, 1));
  out.h_dim = H[0].dim;
  out.cocycle = *co;
  out.h_class = H[0].proj * s.BI.cx.space.template slice_projection<K>(1) * *co;
  out.vanishes = is_zero(out.h_class);
  if (out.vanishes) {
    std::vector<Index> slots;
    for (Index g = 0; g < s.BI.cx.space.total_dim(); ++g)
      if (s.BI.cx.space.degree_of(g) == 0) slots.push_back(g);
    MatX<K> D(s.BI.cx.space.total_dim(), static_cast<Index>(slots.size()));
    for (std::size_t c = 0; c < slots.size(); ++c)
      D.col(static_cast<Index>(c)) = s.BI.cx.d.col(slots[c]);
    auto u = solve<K>(D, *co);
    if (!u) throw std::logic_error("difference_o1: vanishing class with no primitive");
    out.witness = VecX<K>::Zero(s.BI.cx.space.total_dim());
    for (std::size_t c = 0; c < slots.size(); ++c) out.witness(slots[c]) = (*u)(static_cast<Index>(c));
  }
  return out;
}

template <class K>
ObstructionClass<K> morphism_o0(const SocleStep<K>& s, const VecX<K>& f1, const VecX<K>& f2) {
  if (!is_zero(VecX<K>(s.proj * (f1 - f2))))
    throw std::invalid_argument("morphism_o0: lifts project to different maps");
  VecX<K> v = f2 - f1;
  auto co = coords_in<K>(s.BI.inc, v);
  if (!co) throw std::logic_error("morphism_o0: difference escaped B⊗I");
  if (!is_zero(VecX<K>(s.BI.cx.d * *co)))
    throw std::logic_error("morphism_o0: difference is not closed");
  ObstructionClass<K> out;
  out.level = 0;
  auto H = complex_cohomology(s.BI.cx, Window::at(0, 0));
  out.h_dim = H[0].dim;
  out.cocycle = *co;
  out.h_class = H[0].proj * s.BI.cx.space.template slice_projection<K>(0) * *co;
  out.vanishes = is_zero(out.h_class);
  if (out.vanishes) {
    std::vector<Index> slots;
    for (Index g = 0; g < s.BI.cx.space.total_dim(); ++g)
      if (s.BI.cx.space.degree_of(g) == -1) slots.push_back(g);
    MatX<K> D(s.BI.cx.space.total_dim(), static_cast<Index>(slots.size()));
    for (std::size_t c = 0; c < slots.size(); ++c)
      D.col(static_cast<Index>(c)) = s.BI.cx.d.col(slots[c]);
    auto u = solve<K>(D, *co);
    if (!u) throw std::logic_error("morphism_o0: vanishing class with no primitive");
    out.witness = VecX<K>::Zero(s.BI.cx.space.total_dim());
    for (std::size_t c = 0; c < slots.size(); ++c) out.witness(slots[c]) = (*u)(static_cast<Index>(c));
  }
  return out;
}

// pushforward along an augmented homomorphism φ: R -> Q
template <class K>
VecX<K> pushforward_mc(const MCContext<K>& src, const MCContext<K>& tgt, const AlgebraHom<K>& phi,
                       const VecX<K>& alpha) {
  const Index nb = src.B().dim();
  MatX<K> map = MatX<K>::Zero(tgt.T().dim(), src.T().dim());
  for (Index b = 0; b < nb; ++b)
    for (Index r = 0; r < src.R().dim(); ++r) {
      VecX<K> pr = phi.map * src.R().basis_vec(r);
      for (Index q = 0; q < tgt.R().dim(); ++q)
        if (!pr(q).is_zero()) map(tgt.t.ix.index(b, q), src.t.ix.index(b, r)) += pr(q);
    }
  VecX<K> out = map * alpha;
  auto res = mc_residual(tgt, out);
  if (!res.is_mc) throw std::logic_error("pushforward_mc: image is not MC");
  return out;
}

// pushforward along ψ: B -> C on the algebra side
template <class K>
VecX<K> pushforward_algebra_side(const MCContext<K>& src, const MCContext<K>& tgt,
                                 const AlgebraHom<K>& psi, const VecX<K>& alpha) {
  const Index nr = src.R().dim();
  MatX<K> map = MatX<K>::Zero(tgt.T().dim(), src.T().dim());
  for (Index b = 0; b < src.B().dim(); ++b) {
    VecX<K> pb = psi.map * src.B().basis_vec(b);
    for (Index r = 0; r < nr; ++r)
      for (Index c = 0; c < tgt.B().dim(); ++c)
        if (!pb(c).is_zero()) map(tgt.t.ix.index(c, r), src.t.ix.index(b, r)) += pb(c);
  }
  VecX<K> out = map * alpha;
  auto res = mc_residual(tgt, out);
  if (!res.is_mc) throw std::logic_error("pushforward_algebra_side: image is not MC");
  return out;
}

}  // namespace dgdeform
